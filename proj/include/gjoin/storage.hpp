// Copyright 2026 The gjoin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Secondary-memory graph layout. A graph directory holds four files:
//
//   schema.gjn       text; header lines `#gjn 1`, `#hash <fingerprint>`,
//                    `#side left|right`, then one `name:type` per attribute
//   va.gjn           vertex records sorted by (hash, id)
//   hash.gjn         16-byte records (hash, VA offset), strictly increasing
//   vertexindex.gjn  16-byte records (VA offset, hash), record i is vertex i
//
// Binary files start with the 8-byte magic `GJN1` + kind byte + 3 zero bytes
// and an 8-byte record count. All integers are little-endian; VA offsets are
// absolute byte positions in va.gjn. A VA record is
//
//   u64 id | values in schema order (i64, or u32 length + bytes)
//          | u32 N | N x u64 in-ids | u32 K | K x u64 out-ids

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <ranges>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gjoin/error.hpp"
#include "gjoin/graph.hpp"
#include "gjoin/predicate.hpp"

namespace gjoin {

static_assert(std::endian::native == std::endian::little, "the on-disk format is read in place on little-endian hosts");

namespace fs = std::filesystem;

inline constexpr char kSchemaFile[] = "schema.gjn";
inline constexpr char kVaFile[] = "va.gjn";
inline constexpr char kHashFile[] = "hash.gjn";
inline constexpr char kVertexIndexFile[] = "vertexindex.gjn";

inline constexpr std::size_t kHeaderSize = 16;
inline constexpr std::size_t kDirectoryRecordSize = 16;
inline constexpr std::size_t kIndexRecordSize = 16;
inline constexpr char kFormatVersion = '1';

enum class FileKind : char { VertexArray = 'V', HashDirectory = 'H', VertexIndex = 'I' };

/// Read-only memory mapping of a whole file.
class MappedFile {
 public:
  MappedFile() = default;

  explicit MappedFile(const fs::path& path) : path_(path) {
    int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) throw Error(ErrorCode::IoError, "cannot open " + path.string() + ": " + std::strerror(errno));
    struct stat st {};
    if (::fstat(fd, &st) != 0) {
      ::close(fd);
      throw Error(ErrorCode::IoError, "cannot stat " + path.string());
    }
    size_ = static_cast<std::size_t>(st.st_size);
    if (size_ > 0) {
      void* p = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd, 0);
      if (p == MAP_FAILED) {
        ::close(fd);
        throw Error(ErrorCode::IoError, "cannot map " + path.string() + ": " + std::strerror(errno));
      }
      data_ = static_cast<const unsigned char*>(p);
    }
    ::close(fd);
  }

  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;
  MappedFile(MappedFile&& other) noexcept { swap(other); }
  MappedFile& operator=(MappedFile&& other) noexcept {
    MappedFile tmp(std::move(other));
    swap(tmp);
    return *this;
  }
  ~MappedFile() {
    if (data_) ::munmap(const_cast<unsigned char*>(data_), size_);
  }

  const unsigned char* data() const noexcept { return data_; }
  std::size_t size() const noexcept { return size_; }
  const fs::path& path() const noexcept { return path_; }

  /// Bounds-checked view of [offset, offset + length).
  const unsigned char* at(std::uint64_t offset, std::uint64_t length) const {
    if (offset > size_ || length > size_ - offset) {
      throw Error(ErrorCode::TruncatedFile, path_.filename().string() + ": read of " + std::to_string(length) +
                                                " bytes at offset " + std::to_string(offset) + " past end of file (" +
                                                std::to_string(size_) + " bytes)");
    }
    return data_ + offset;
  }

  template <typename T>
  T load(std::uint64_t offset) const {
    T v;
    std::memcpy(&v, at(offset, sizeof(T)), sizeof(T));
    return v;
  }

 private:
  void swap(MappedFile& o) noexcept {
    std::swap(path_, o.path_);
    std::swap(data_, o.data_);
    std::swap(size_, o.size_);
  }

  fs::path path_;
  const unsigned char* data_ = nullptr;
  std::size_t size_ = 0;
};

/// Unaligned little-endian u64 array living inside a mapping.
class IdList {
 public:
  IdList() = default;
  IdList(const unsigned char* data, std::size_t count) : data_(data), count_(count) {}

  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  VertexId operator[](std::size_t i) const {
    VertexId v;
    std::memcpy(&v, data_ + 8 * i, 8);
    return v;
  }

  std::vector<VertexId> to_vector() const {
    std::vector<VertexId> out(count_);
    for (std::size_t i = 0; i < count_; ++i) out[i] = (*this)[i];
    return out;
  }

 private:
  const unsigned char* data_ = nullptr;
  std::size_t count_ = 0;
};

/// One decoded VA record. Neighbor lists point into the mapping and stay valid
/// as long as the owning IndexedGraph.
struct StoredVertex {
  VertexTuple tuple;
  IdList in;
  IdList out;
  std::uint64_t hash = 0;
};

namespace detail {

class ByteWriter {
 public:
  void u8(unsigned char v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void i64(std::int64_t v) { raw(&v, 8); }
  void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void header(FileKind kind, std::uint64_t count) {
    raw("GJN", 3);
    u8(static_cast<unsigned char>(kFormatVersion));
    u8(static_cast<unsigned char>(kind));
    u8(0);
    u8(0);
    u8(0);
    u64(count);
  }
  std::size_t size() const noexcept { return buf_.size(); }
  void patch_u64(std::size_t at, std::uint64_t v) { std::memcpy(buf_.data() + at, &v, 8); }
  const std::string& bytes() const noexcept { return buf_; }

 private:
  std::string buf_;
};

inline std::uint32_t checked_text_length(std::uint64_t length) {
  if (length > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::OversizeValue, "text value of " + std::to_string(length) + " bytes exceeds 2^32-1");
  }
  return static_cast<std::uint32_t>(length);
}

inline void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

inline std::uint64_t check_header(const MappedFile& file, FileKind kind) {
  if (file.size() < 4 || std::memcmp(file.data(), "GJN", 3) != 0) {
    throw Error(ErrorCode::BadMagic, file.path().string() + ": bad magic");
  }
  if (file.data()[3] != static_cast<unsigned char>(kFormatVersion)) {
    throw Error(ErrorCode::VersionMismatch, file.path().string() + ": unsupported format version '" +
                                                std::string(1, static_cast<char>(file.data()[3])) + "'");
  }
  if (file.size() < kHeaderSize) throw Error(ErrorCode::TruncatedFile, file.path().string() + ": truncated header");
  const unsigned char* h = file.data();
  if (h[4] != static_cast<unsigned char>(kind) || h[5] != 0 || h[6] != 0 || h[7] != 0) {
    throw Error(ErrorCode::BadMagic, file.path().string() + ": unexpected file kind");
  }
  return file.load<std::uint64_t>(8);
}

inline std::string schema_text(const Schema& schema, const SideHash& hash, Side side) {
  std::ostringstream out;
  out << "#gjn " << kFormatVersion << "\n#hash " << hash.fingerprint() << "\n#side " << to_string(side) << "\n";
  for (const auto& a : schema) out << a.name << ':' << to_string(a.type) << '\n';
  return out.str();
}

}  // namespace detail

/// Hash-sorted graph opened read-only through memory mappings. Opening is
/// constant time; records are validated as they are read.
class IndexedGraph {
 public:
  static IndexedGraph open(const fs::path& dir) {
    IndexedGraph g;
    g.dir_ = dir;
    g.read_schema(dir / kSchemaFile);
    g.va_ = MappedFile(dir / kVaFile);
    g.directory_ = MappedFile(dir / kHashFile);
    g.index_ = MappedFile(dir / kVertexIndexFile);
    g.vertex_count_ = detail::check_header(g.va_, FileKind::VertexArray);
    g.hash_count_ = detail::check_header(g.directory_, FileKind::HashDirectory);
    std::uint64_t indexed = detail::check_header(g.index_, FileKind::VertexIndex);
    if (indexed != g.vertex_count_) {
      throw Error(ErrorCode::TruncatedFile, "vertex index holds " + std::to_string(indexed) + " records, VA holds " +
                                                std::to_string(g.vertex_count_));
    }
    if (g.index_.size() != kHeaderSize + kIndexRecordSize * indexed) {
      throw Error(ErrorCode::TruncatedFile, (dir / kVertexIndexFile).string() + ": size does not match record count");
    }
    if (g.directory_.size() != kHeaderSize + kDirectoryRecordSize * g.hash_count_) {
      throw Error(ErrorCode::TruncatedFile, (dir / kHashFile).string() + ": size does not match record count");
    }
    return g;
  }

  const fs::path& directory() const noexcept { return dir_; }
  const Schema& schema() const noexcept { return schema_; }
  const SideHash& hash_spec() const noexcept { return hash_; }
  Side side() const noexcept { return side_; }
  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t hash_count() const noexcept { return hash_count_; }

  /// Hash of vertex `id`, read from the vertex index without touching VA.
  std::uint64_t hash_of(VertexId id) const {
    check_id(id);
    return index_.load<std::uint64_t>(kHeaderSize + kIndexRecordSize * id + 8);
  }

  StoredVertex vertex_by_id(VertexId id) const {
    check_id(id);
    std::uint64_t offset = index_.load<std::uint64_t>(kHeaderSize + kIndexRecordSize * id);
    StoredVertex v = read_vertex(offset, nullptr);
    if (v.tuple.id != id) {
      throw Error(ErrorCode::TruncatedFile, "vertex index entry " + std::to_string(id) + " points at vertex " +
                                                std::to_string(v.tuple.id));
    }
    v.hash = index_.load<std::uint64_t>(kHeaderSize + kIndexRecordSize * id + 8);
    return v;
  }

  /// Decodes the record at `offset` and stores the offset of the following
  /// record in `next` when given.
  StoredVertex read_vertex(std::uint64_t offset, std::uint64_t* next) const {
    StoredVertex v;
    std::uint64_t pos = offset;
    v.tuple.id = va_.load<std::uint64_t>(pos);
    pos += 8;
    v.tuple.values.reserve(schema_.size());
    for (const auto& attr : schema_) {
      if (attr.type == AttrType::Int64) {
        v.tuple.values.emplace_back(va_.load<std::int64_t>(pos));
        pos += 8;
      } else {
        auto len = va_.load<std::uint32_t>(pos);
        pos += 4;
        const auto* p = va_.at(pos, len);
        v.tuple.values.emplace_back(std::string(reinterpret_cast<const char*>(p), len));
        pos += len;
      }
    }
    auto n_in = va_.load<std::uint32_t>(pos);
    pos += 4;
    v.in = IdList(va_.at(pos, 8ull * n_in), n_in);
    pos += 8ull * n_in;
    auto n_out = va_.load<std::uint32_t>(pos);
    pos += 4;
    v.out = IdList(va_.at(pos, 8ull * n_out), n_out);
    pos += 8ull * n_out;
    if (next) *next = pos;
    return v;
  }

  std::uint64_t hash_at(std::size_t i) const {
    return directory_.load<std::uint64_t>(kHeaderSize + kDirectoryRecordSize * i);
  }

  /// Ascending hash column of the directory; compose with
  /// std::views::reverse for a descending scan.
  auto hash_values() const {
    return std::views::iota(std::size_t{0}, hash_count_) |
           std::views::transform([this](std::size_t i) { return hash_at(i); });
  }

  /// Byte range of the VA block holding the vertices of directory entry `i`.
  std::pair<std::uint64_t, std::uint64_t> group_range(std::size_t i) const {
    std::uint64_t begin = directory_.load<std::uint64_t>(kHeaderSize + kDirectoryRecordSize * i + 8);
    std::uint64_t end = i + 1 < hash_count_
                            ? directory_.load<std::uint64_t>(kHeaderSize + kDirectoryRecordSize * (i + 1) + 8)
                            : va_.size();
    if (begin > end || end > va_.size()) {
      throw Error(ErrorCode::TruncatedFile, "hash directory entry " + std::to_string(i) + " points outside VA");
    }
    return {begin, end};
  }

  /// Directory position of `h`, or npos.
  std::size_t find_hash(std::uint64_t h) const {
    std::size_t lo = 0, hi = hash_count_;
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (hash_at(mid) < h) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo < hash_count_ && hash_at(lo) == h ? lo : npos;
  }

  /// Decodes every vertex of directory entry `i`, in VA order.
  std::vector<StoredVertex> group(std::size_t i) const {
    std::vector<StoredVertex> out;
    auto [pos, end] = group_range(i);
    std::uint64_t h = hash_at(i);
    while (pos < end) {
      out.push_back(read_vertex(pos, &pos));
      out.back().hash = h;
    }
    return out;
  }

  /// Vertices whose stored hash equals `h`; empty when `h` is not indexed.
  std::vector<StoredVertex> vertices_by_hash(std::uint64_t h) const {
    std::size_t i = find_hash(h);
    if (i == npos) return {};
    return group(i);
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  void check_id(VertexId id) const {
    if (id >= vertex_count_) {
      throw Error(ErrorCode::IdOutOfRange,
                  "vertex id " + std::to_string(id) + " out of range (" + std::to_string(vertex_count_) + " vertices)");
    }
  }

  void read_schema(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("#gjn ")) {
      throw Error(ErrorCode::BadMagic, path.string() + ": bad magic");
    }
    if (line != std::string("#gjn ") + kFormatVersion) {
      throw Error(ErrorCode::VersionMismatch, path.string() + ": unsupported version '" + line.substr(5) + "'");
    }
    std::string fingerprint = "plain";
    std::vector<Attribute> attrs;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line.starts_with("#hash ")) {
        fingerprint = line.substr(6);
      } else if (line.starts_with("#side ")) {
        side_ = line.substr(6) == "right" ? Side::Right : Side::Left;
      } else if (line[0] != '#') {
        auto colon = line.rfind(':');
        if (colon == std::string::npos) throw Error(ErrorCode::ParseError, path.string() + ": bad attribute line");
        std::string type = line.substr(colon + 1);
        if (type != "int64" && type != "text") {
          throw Error(ErrorCode::ParseError, path.string() + ": unknown type '" + type + "'");
        }
        attrs.push_back({line.substr(0, colon), type == "int64" ? AttrType::Int64 : AttrType::Text});
      }
    }
    schema_ = Schema(std::move(attrs));
    hash_ = SideHash::from_fingerprint(fingerprint, schema_);
  }

  fs::path dir_;
  Schema schema_;
  SideHash hash_;
  Side side_ = Side::Left;
  MappedFile va_;
  MappedFile directory_;
  MappedFile index_;
  std::size_t vertex_count_ = 0;
  std::size_t hash_count_ = 0;
};

/// Writes `g` to `dir` sorted by (hash, id) and opens the result.
inline IndexedGraph build_index(const Graph& g, const SideHash& hash, Side side, const fs::path& dir) {
  const std::size_t n = g.vertex_count();
  std::vector<std::uint64_t> hashes(n);
  for (std::size_t i = 0; i < n; ++i) hashes[i] = hash(g.vertex(i).values);
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    return hashes[a] != hashes[b] ? hashes[a] < hashes[b] : a < b;
  });

  detail::ByteWriter va, directory, index;
  va.header(FileKind::VertexArray, n);
  directory.header(FileKind::HashDirectory, 0);
  std::vector<std::uint64_t> offsets(n);
  std::uint64_t distinct = 0;
  for (std::size_t k = 0; k < n; ++k) {
    VertexId id = order[k];
    offsets[id] = va.size();
    if (k == 0 || hashes[id] != hashes[order[k - 1]]) {
      directory.u64(hashes[id]);
      directory.u64(va.size());
      ++distinct;
    }
    va.u64(id);
    for (const auto& value : g.vertex(id).values) {
      if (const auto* i = std::get_if<std::int64_t>(&value)) {
        va.i64(*i);
      } else {
        const auto& s = std::get<std::string>(value);
        va.u32(detail::checked_text_length(s.size()));
        va.raw(s.data(), s.size());
      }
    }
    auto in = g.in(id);
    va.u32(static_cast<std::uint32_t>(in.size()));
    for (VertexId v : in) va.u64(v);
    auto out = g.out(id);
    va.u32(static_cast<std::uint32_t>(out.size()));
    for (VertexId v : out) va.u64(v);
  }
  directory.patch_u64(8, distinct);
  index.header(FileKind::VertexIndex, n);
  for (std::size_t id = 0; id < n; ++id) {
    index.u64(offsets[id]);
    index.u64(hashes[id]);
  }

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create directory " + dir.string() + ": " + ec.message());
  detail::write_file(dir / kSchemaFile, detail::schema_text(g.schema(), hash, side));
  detail::write_file(dir / kVaFile, va.bytes());
  detail::write_file(dir / kHashFile, directory.bytes());
  detail::write_file(dir / kVertexIndexFile, index.bytes());
  return IndexedGraph::open(dir);
}

inline IndexedGraph build_index(const Graph& g, const HashSpec& spec, Side side, const fs::path& dir) {
  return build_index(g, spec.side(side), side, dir);
}

/// Stores a graph with no join-specific ordering.
inline IndexedGraph write_graph(const Graph& g, const fs::path& dir) {
  return build_index(g, SideHash::plain(), Side::Left, dir);
}

/// Reads every vertex back by id and rebuilds the in-memory graph.
inline Graph materialize(const IndexedGraph& ig) {
  std::vector<VertexTuple> vertices;
  std::vector<Edge> edges;
  vertices.reserve(ig.vertex_count());
  for (VertexId id = 0; id < ig.vertex_count(); ++id) {
    StoredVertex v = ig.vertex_by_id(id);
    for (std::size_t k = 0; k < v.out.size(); ++k) edges.push_back({id, v.out[k]});
    vertices.push_back(std::move(v.tuple));
  }
  return Graph(ig.schema(), std::move(vertices), std::move(edges));
}

inline Graph load_graph(const fs::path& dir) { return materialize(IndexedGraph::open(dir)); }

}  // namespace gjoin
