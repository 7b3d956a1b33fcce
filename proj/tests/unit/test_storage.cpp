// Copyright 2026 The genhub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <fstream>
#include <future>
#include <thread>

#include "genhub/digest.hpp"
#include "genhub/error.hpp"
#include "genhub/fs_util.hpp"
#include "genhub/package_store.hpp"
#include "genhub/zip_archive.hpp"
#include "toy.hpp"

using namespace genhub;
namespace fs = std::filesystem;
using genhub::testing::CountingTransport;
using genhub::testing::ToySpec;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected genhub::Error");
  return ErrorKind::kInternal;
}

}  // namespace

TEST_SUITE("digest") {
  TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST_CASE("file digest streams the same bytes") {
    TempDir tmp;
    std::string big(3 * 1024 * 1024 + 17, 'x');
    write_file_atomic(tmp.path() / "f", big);
    CHECK(sha256_file(tmp.path() / "f") == sha256_hex(big));
  }

  TEST_CASE("base64 round trip") {
    for (const std::string& s : std::vector<std::string>{"", "a", "ab", "abc", "abcd", std::string("\0\xff\x10", 3)}) {
      CHECK(base64_decode(base64_encode(s)) == s);
    }
    CHECK(base64_encode("abc") == "YWJj");
    CHECK_THROWS_AS(base64_decode("!!!"), Error);
  }
}

TEST_SUITE("zip") {
  TEST_CASE("round trip and byte-identical output regardless of order") {
    std::vector<zip::Entry> a = {{"b/run.sh", "#!/bin/sh\necho hi\n", true},
                                 {"a.txt", std::string(5000, 'z'), false},
                                 {"bin", std::string("\x00\x01\x02", 3), false}};
    auto b = a;
    std::reverse(b.begin(), b.end());
    const auto bytes = zip::write_archive(a);
    CHECK(bytes == zip::write_archive(b));
    auto back = zip::read_archive(bytes);
    std::sort(a.begin(), a.end(), [](auto& x, auto& y) { return x.name < y.name; });
    CHECK(back == a);
  }

  TEST_CASE("python zipfile can read the archive") {
    TempDir tmp;
    zip::write_archive_file(tmp.path() / "a.zip", {{"x/y.txt", "hello", false}});
    const std::string cmd = "python3 -c \"import zipfile,sys; z=zipfile.ZipFile(sys.argv[1]); "
                            "assert z.read('x/y.txt')==b'hello'; assert z.testzip() is None\" " +
                            (tmp.path() / "a.zip").string();
    CHECK(std::system(cmd.c_str()) == 0);
  }

  TEST_CASE("malformed archives") {
    CHECK(kind_of([] { zip::read_archive("not a zip"); }) == ErrorKind::kArchiveFormat);
    auto bytes = zip::write_archive({{"a.txt", "hello world hello world", false}});
    bytes[40] ^= 0x5a;
    CHECK(kind_of([&] { zip::read_archive(bytes); }) == ErrorKind::kArchiveFormat);
    CHECK(kind_of([] { zip::write_archive({{"../evil", "x", false}}); }) ==
          ErrorKind::kArchiveFormat);
    // Rename an entry in place to a path that escapes the extraction root.
    auto escape = zip::write_archive({{"zz/evil", "x", false}});
    for (auto pos = escape.find("zz/evil"); pos != std::string::npos;
         pos = escape.find("zz/evil", pos)) {
      escape.replace(pos, 7, "../evil");
    }
    CHECK(kind_of([&] { zip::read_archive(escape); }) == ErrorKind::kArchiveFormat);
  }

  TEST_CASE("extract restores the executable bit") {
    TempDir tmp;
    zip::write_archive_file(tmp.path() / "a.zip", {{"run.sh", "#!/bin/sh\n", true}});
    zip::extract_archive(tmp.path() / "a.zip", tmp.path() / "out");
    const auto perms = fs::status(tmp.path() / "out" / "run.sh").permissions();
    CHECK((perms & fs::perms::owner_exec) != fs::perms::none);
  }
}

TEST_SUITE("package_store") {
  TEST_CASE("miss then hit without network") {
    TempDir tmp;
    auto toy = genhub::testing::build_toy_model(tmp.path(), ToySpec{});
    auto transport = std::make_shared<CountingTransport>();
    PackageStore store(tmp.path() / "cache", transport, {3, std::chrono::milliseconds(1)});
    const auto ref = PackageRef::from(toy.meta);
    CHECK_FALSE(store.lookup(ref).has_value());
    const auto first = store.ensure_present(ref);
    CHECK(transport->fetches == 1);
    CHECK(fs::exists(first.unpacked_dir / "model.manifest"));
    CHECK(first.checksum_sha256 == toy.archive.checksum_sha256);
    const auto second = store.ensure_present(ref);
    CHECK(transport->fetches == 1);
    CHECK(second == first);
    CHECK(store.lookup(ref) == first);
  }

  TEST_CASE("one flipped byte is rejected and nothing is cached") {
    TempDir tmp;
    auto toy = genhub::testing::build_toy_model(tmp.path(), ToySpec{});
    auto transport = std::make_shared<CountingTransport>();
    transport->corrupt = true;
    PackageStore store(tmp.path() / "cache", transport, {3, std::chrono::milliseconds(1)});
    const auto ref = PackageRef::from(toy.meta);
    try {
      store.ensure_present(ref);
      FAIL("expected checksum mismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kChecksumMismatch);
      CHECK(e.detail().at("expected") == toy.archive.checksum_sha256);
      CHECK(e.detail().at("actual") != toy.archive.checksum_sha256);
    }
    CHECK_FALSE(store.lookup(ref).has_value());
    CHECK_FALSE(fs::exists(store.slot_dir(ref) / "unpacked"));
    transport->corrupt = false;
    CHECK_NOTHROW(store.ensure_present(ref));
  }

  TEST_CASE("verify compares case-insensitively") {
    TempDir tmp;
    write_file_atomic(tmp.path() / "f", "abc");
    std::string upper = sha256_hex("abc");
    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    CHECK(verify(tmp.path() / "f", upper).ok);
    CHECK_FALSE(verify(tmp.path() / "f", sha256_hex("abd")).ok);
    CHECK(kind_of([&] { verify(tmp.path() / "missing", upper); }) == ErrorKind::kIo);
  }

  TEST_CASE("purge removes every slot") {
    TempDir tmp;
    auto toy = genhub::testing::build_toy_model(tmp.path(), ToySpec{});
    PackageStore store(tmp.path() / "cache", std::make_shared<CountingTransport>());
    const auto ref = PackageRef::from(toy.meta);
    store.ensure_present(ref);
    CHECK(store.purge(ref.model_id));
    CHECK_FALSE(store.lookup(ref).has_value());
    CHECK_FALSE(store.purge(ref.model_id));
  }

  TEST_CASE("a crash at either stage leaves no verified slot behind") {
    for (const char* stage : {"downloaded", "unpacked"}) {
      CAPTURE(stage);
      TempDir tmp;
      auto toy = genhub::testing::build_toy_model(tmp.path(), ToySpec{});
      auto transport = std::make_shared<CountingTransport>();
      PackageStore store(tmp.path() / "cache", transport);
      const auto ref = PackageRef::from(toy.meta);
      store.set_fault_hook([&](std::string_view s) {
        if (s == stage) throw std::runtime_error("simulated crash");
      });
      CHECK_THROWS(store.ensure_present(ref));
      CHECK_FALSE(store.lookup(ref).has_value());
      store.set_fault_hook(nullptr);
      const auto entry = store.ensure_present(ref);
      CHECK(transport->fetches == 2);
      CHECK(fs::exists(entry.unpacked_dir / "generate.py"));
    }
  }

  TEST_CASE("concurrent callers share one download") {
    TempDir tmp;
    auto toy = genhub::testing::build_toy_model(tmp.path(), ToySpec{});
    auto transport = std::make_shared<CountingTransport>();
    PackageStore store(tmp.path() / "cache", transport);
    const auto ref = PackageRef::from(toy.meta);
    std::vector<std::future<CacheEntry>> futures;
    for (int i = 0; i < 8; ++i) {
      futures.push_back(std::async(std::launch::async, [&] { return store.ensure_present(ref); }));
    }
    std::vector<CacheEntry> entries;
    for (auto& f : futures) entries.push_back(f.get());
    CHECK(transport->fetches == 1);
    for (const auto& e : entries) CHECK(e.unpacked_dir == entries[0].unpacked_dir);
  }

  TEST_CASE("retryable failures are retried, then surfaced") {
    TempDir tmp;
    auto toy = genhub::testing::build_toy_model(tmp.path(), ToySpec{});
    auto transport = std::make_shared<CountingTransport>();
    transport->fail_first = 2;
    PackageStore store(tmp.path() / "cache", transport, {3, std::chrono::milliseconds(1)});
    const auto ref = PackageRef::from(toy.meta);
    CHECK_NOTHROW(store.ensure_present(ref));
    CHECK(transport->fetches == 3);

    store.purge(ref.model_id);
    transport->fetches = 0;
    transport->fail_first = 10;
    CHECK(kind_of([&] { store.ensure_present(ref); }) == ErrorKind::kNetwork);
    CHECK(transport->fetches == 4);
  }

  TEST_CASE("archive without manifest") {
    TempDir tmp;
    zip::write_archive_file(tmp.path() / "p.zip", {{"generate.py", "print(1)\n", false}});
    PackageRef ref;
    ref.model_id = ModelId("00001_NOMAN");
    ref.url = "file://" + (tmp.path() / "p.zip").string();
    ref.checksum_sha256 = sha256_file(tmp.path() / "p.zip");
    PackageStore store(tmp.path() / "cache", std::make_shared<CountingTransport>());
    CHECK(kind_of([&] { store.ensure_present(ref); }) == ErrorKind::kMissingManifest);
    CHECK_FALSE(store.lookup(ref).has_value());
  }

  TEST_CASE("missing source is a network error") {
    TempDir tmp;
    PackageRef ref;
    ref.model_id = ModelId("00001_GONE");
    ref.url = "file://" + (tmp.path() / "nope.zip").string();
    ref.checksum_sha256 = std::string(64, '0');
    PackageStore store(tmp.path() / "cache", std::make_shared<CountingTransport>(),
                       {1, std::chrono::milliseconds(1)});
    CHECK(kind_of([&] { store.ensure_present(ref); }) == ErrorKind::kNetwork);
  }
}
