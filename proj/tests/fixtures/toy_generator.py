#!/usr/bin/env python3
# Copyright 2026 The genhub Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Deterministic toy model speaking the genhub chunk protocol.

Sample i of a run with base seed s depends only on (s, i), so splitting a
request into chunks never changes the produced files.
"""
import argparse
import hashlib
import json
import os
import random
import struct
import sys
import zlib

SIZE = 16


def png_bytes(pixels, width, height):
    def chunk(tag, data):
        body = tag + data
        return struct.pack(">I", len(data)) + body + struct.pack(">I", zlib.crc32(body) & 0xFFFFFFFF)

    raw = b"".join(b"\x00" + bytes(pixels[y * width:(y + 1) * width]) for y in range(height))
    header = struct.pack(">IIBBBBB", width, height, 8, 0, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", header) +
            chunk(b"IDAT", zlib.compress(raw, 9)) + chunk(b"IEND", b""))


def sample_pixels(base_seed, index, weights_digest, latent):
    rng = random.Random("%d:%d:%s" % (base_seed, index, weights_digest))
    shift = 0
    if latent:
        shift = int(round(sum(latent) * 17.0))
    return [(rng.randrange(256) + shift) % 256 for _ in range(SIZE * SIZE)]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--request", required=True)
    args = parser.parse_args()
    with open(args.request) as f:
        req = json.load(f)

    params = req.get("params", {})
    behavior = params.get("behavior", "ok")
    if behavior == "exit1":
        print("toy model failing on purpose", file=sys.stderr)
        return 1

    with open(req["weights_path"], "rb") as f:
        weights_digest = hashlib.sha256(f.read()).hexdigest()[:16]

    with open(os.path.join(os.path.dirname(os.path.abspath(__file__)), "model.manifest")) as f:
        manifest = json.load(f)
    kinds = [o["kind"] for o in manifest["outputs"]]
    latent_dim = manifest.get("latent_dim")

    n = int(req["num_samples"])
    offset = int(req.get("sample_offset", 0))
    base_seed = int(req.get("base_seed", req["seed"]))
    latent = params.get("input_latent_vector") or []
    out_dir = req["output_dir"]

    produced = n - 1 if behavior == "short" else n
    samples = []
    for i in range(produced):
        z = latent[i * latent_dim:(i + 1) * latent_dim] if latent_dim and len(latent) > latent_dim \
            else latent
        pixels = sample_pixels(base_seed, offset + i, weights_digest, z)
        files = {}
        for kind in kinds:
            name = "gen_%d_%s.png" % (i, kind)
            if kind == "mask":
                data = [255 if p >= 128 else 0 for p in pixels]
            else:
                data = pixels
            with open(os.path.join(out_dir, name), "wb") as f:
                f.write(png_bytes(data, SIZE, SIZE))
            files[kind] = name
        samples.append({"index": i, "files": files})

    if behavior == "extra":
        with open(os.path.join(out_dir, "stray.txt"), "w") as f:
            f.write("not listed in the response\n")

    with open(req["response_path"], "w") as f:
        json.dump({"status": "ok", "samples": samples}, f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
