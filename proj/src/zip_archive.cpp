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

#include "genhub/zip_archive.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "genhub/error.hpp"
#include "genhub/fs_util.hpp"

namespace genhub::zip {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::uint16_t kVersionNeeded = 20;
constexpr std::uint16_t kVersionMadeBy = (3 << 8) | 20;  // unix, 2.0
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01
constexpr std::uint16_t kDosTime = 0;

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorKind::kArchiveFormat, "invalid zip archive: " + what);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint16_t u16(std::size_t at) const {
    need(at, 2);
    return static_cast<std::uint16_t>(byte(at) | (byte(at + 1) << 8));
  }
  std::uint32_t u32(std::size_t at) const {
    need(at, 4);
    return static_cast<std::uint32_t>(byte(at)) |
           (static_cast<std::uint32_t>(byte(at + 1)) << 8) |
           (static_cast<std::uint32_t>(byte(at + 2)) << 16) |
           (static_cast<std::uint32_t>(byte(at + 3)) << 24);
  }
  std::string_view slice(std::size_t at, std::size_t len) const {
    need(at, len);
    return bytes_.substr(at, len);
  }
  std::size_t size() const { return bytes_.size(); }

 private:
  unsigned byte(std::size_t at) const {
    return static_cast<unsigned char>(bytes_[at]);
  }
  void need(std::size_t at, std::size_t len) const {
    if (at > bytes_.size() || len > bytes_.size() - at) bad("truncated");
  }
  std::string_view bytes_;
};

std::uint32_t crc_of(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < data.size()) {
    const auto chunk = static_cast<uInt>(
        std::min<std::size_t>(data.size() - off, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + off), chunk);
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string deflate_raw(std::string_view data) {
  z_stream zs{};
  if (deflateInit2(&zs, 9, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorKind::kInternal, "deflateInit2 failed");
  }
  std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorKind::kInternal, "deflate failed");
  out.resize(zs.total_out);
  return out;
}

std::string inflate_raw(std::string_view data, std::size_t expected) {
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK) {
    throw Error(ErrorKind::kInternal, "inflateInit2 failed");
  }
  std::string out(expected, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) bad("corrupt deflate stream");
  return out;
}

bool safe_name(const std::string& name) {
  if (name.empty() || name.front() == '/' || name.find('\\') != std::string::npos) {
    return false;
  }
  std::size_t start = 0;
  while (start <= name.size()) {
    const auto slash = name.find('/', start);
    const auto part = name.substr(start, slash == std::string::npos
                                             ? std::string::npos
                                             : slash - start);
    if (part == "..") return false;
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return true;
}

}  // namespace

std::string write_archive(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].name == entries[i - 1].name) {
      throw Error(ErrorKind::kArchiveFormat,
                  "duplicate archive entry " + entries[i].name);
    }
  }

  std::string out;
  std::string central;
  for (const auto& e : entries) {
    if (!safe_name(e.name)) {
      throw Error(ErrorKind::kArchiveFormat, "unsafe entry name " + e.name);
    }
    if (e.data.size() > 0xfffffffeu || out.size() > 0xfffffffeu) {
      throw Error(ErrorKind::kArchiveFormat, "zip64 archives are not supported");
    }
    const std::uint32_t crc = crc_of(e.data);
    std::string packed = deflate_raw(e.data);
    std::uint16_t method = 8;
    if (packed.size() >= e.data.size()) {
      packed = e.data;
      method = 0;
    }
    const auto offset = static_cast<std::uint32_t>(out.size());
    const auto name_len = static_cast<std::uint16_t>(e.name.size());

    put32(out, kLocalSig);
    put16(out, kVersionNeeded);
    put16(out, 0x0800);  // UTF-8 names
    put16(out, method);
    put16(out, kDosTime);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, static_cast<std::uint32_t>(packed.size()));
    put32(out, static_cast<std::uint32_t>(e.data.size()));
    put16(out, name_len);
    put16(out, 0);
    out += e.name;
    out += packed;

    const std::uint32_t mode = e.executable ? 0100755 : 0100644;
    put32(central, kCentralSig);
    put16(central, kVersionMadeBy);
    put16(central, kVersionNeeded);
    put16(central, 0x0800);
    put16(central, method);
    put16(central, kDosTime);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, static_cast<std::uint32_t>(packed.size()));
    put32(central, static_cast<std::uint32_t>(e.data.size()));
    put16(central, name_len);
    put16(central, 0);  // extra
    put16(central, 0);  // comment
    put16(central, 0);  // disk
    put16(central, 0);  // internal attributes
    put32(central, mode << 16);
    put32(central, offset);
    central += e.name;
  }

  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  put32(out, kEndSig);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, cd_offset);
  put16(out, 0);
  return out;
}

void write_archive_file(const fs::path& path, std::vector<Entry> entries) {
  write_file_atomic(path, write_archive(std::move(entries)));
}

std::vector<Entry> read_archive(std::string_view bytes) {
  Reader r(bytes);
  if (bytes.size() < 22) bad("too short");

  std::size_t eocd = std::string_view::npos;
  const std::size_t lowest = bytes.size() >= 22 + 0xffff ? bytes.size() - 22 - 0xffff : 0;
  for (std::size_t at = bytes.size() - 22 + 1; at-- > lowest;) {
    if (r.u32(at) == kEndSig) {
      eocd = at;
      break;
    }
  }
  if (eocd == std::string_view::npos) bad("end of central directory not found");

  const std::uint16_t count = r.u16(eocd + 10);
  const std::uint32_t cd_size = r.u32(eocd + 12);
  const std::uint32_t cd_offset = r.u32(eocd + 16);
  if (count == 0xffff || cd_offset == 0xffffffffu) bad("zip64 is not supported");
  if (static_cast<std::size_t>(cd_offset) + cd_size > eocd) bad("central directory out of range");

  std::vector<Entry> entries;
  std::size_t at = cd_offset;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (r.u32(at) != kCentralSig) bad("bad central directory signature");
    const std::uint16_t made_by = r.u16(at + 4);
    const std::uint16_t flags = r.u16(at + 8);
    const std::uint16_t method = r.u16(at + 10);
    const std::uint32_t crc = r.u32(at + 16);
    const std::uint32_t csize = r.u32(at + 20);
    const std::uint32_t usize = r.u32(at + 24);
    const std::uint16_t name_len = r.u16(at + 28);
    const std::uint16_t extra_len = r.u16(at + 30);
    const std::uint16_t comment_len = r.u16(at + 32);
    const std::uint32_t external = r.u32(at + 38);
    const std::uint32_t local = r.u32(at + 42);
    std::string name(r.slice(at + 46, name_len));
    at += 46 + name_len + extra_len + comment_len;

    if (flags & 0x1) bad("encrypted entry " + name);
    if (csize == 0xffffffffu || usize == 0xffffffffu || local == 0xffffffffu) {
      bad("zip64 is not supported");
    }
    if (!safe_name(name)) bad("unsafe entry name " + name);
    if (name.back() == '/') continue;

    if (r.u32(local) != kLocalSig) bad("bad local header for " + name);
    const std::size_t data_at = local + 30 + r.u16(local + 26) + r.u16(local + 28);
    const std::string_view packed = r.slice(data_at, csize);

    Entry e;
    e.name = std::move(name);
    if (method == 0) {
      if (csize != usize) bad("stored size mismatch for " + e.name);
      e.data = std::string(packed);
    } else if (method == 8) {
      e.data = inflate_raw(packed, usize);
    } else {
      bad("unsupported compression method " + std::to_string(method));
    }
    if (crc_of(e.data) != crc) bad("crc mismatch for " + e.name);
    if ((made_by >> 8) == 3) e.executable = ((external >> 16) & 0111) != 0;
    entries.push_back(std::move(e));
  }
  return entries;
}

void extract_archive(const fs::path& archive, const fs::path& dest) {
  const std::string bytes = read_file(archive);
  const auto entries = read_archive(bytes);
  fs::create_directories(dest);
  for (const auto& e : entries) {
    const fs::path target = dest / fs::path(e.name);
    fs::create_directories(target.parent_path());
    {
      std::ofstream out(target, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorKind::kIo, "cannot write " + target.string());
      out.write(e.data.data(), static_cast<std::streamsize>(e.data.size()));
    }
    auto perms = fs::perms::owner_read | fs::perms::owner_write |
                 fs::perms::group_read | fs::perms::others_read;
    if (e.executable) {
      perms |= fs::perms::owner_exec | fs::perms::group_exec |
               fs::perms::others_exec;
    }
    fs::permissions(target, perms);
  }
}

std::vector<Entry> collect_directory(const fs::path& dir) {
  std::vector<Entry> out;
  for (const auto& item : fs::recursive_directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    Entry e;
    e.name = fs::relative(item.path(), dir).generic_string();
    e.data = read_file(item.path());
    const auto p = fs::status(item.path()).permissions();
    e.executable = (p & fs::perms::owner_exec) != fs::perms::none;
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [](const Entry& a, const Entry& b) { return a.name < b.name; });
  return out;
}

}  // namespace genhub::zip
