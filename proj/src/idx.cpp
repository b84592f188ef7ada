#include "uucc/idx.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "uucc/errors.hpp"

namespace uucc {
namespace {

constexpr std::uint8_t kUnsignedByte = 0x08;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open IDX file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

IdxBytes parse_idx(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw FormatError("truncated IDX header", bytes.size());
  if (bytes[0] != 0 || bytes[1] != 0) throw FormatError("bad IDX magic", 0);
  if (bytes[2] != kUnsignedByte) throw FormatError("unsupported IDX type code", 2);

  const std::size_t rank = bytes[3];
  const std::size_t header = 4 + 4 * rank;
  if (bytes.size() < header) throw FormatError("truncated IDX dimension table", bytes.size());

  IdxBytes out;
  std::size_t count = 1;
  for (std::size_t i = 0; i < rank; ++i) {
    out.dims.push_back(read_be32(bytes, 4 + 4 * i));
    count *= out.dims.back();
  }
  if (bytes.size() - header < count) {
    throw FormatError("truncated IDX payload (expected " + std::to_string(count) + " bytes)", bytes.size());
  }
  out.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header),
                  bytes.begin() + static_cast<std::ptrdiff_t>(header + count));
  return out;
}

IdxBytes read_idx_bytes(const std::filesystem::path& path) { return parse_idx(slurp(path)); }

IdxTensor read_idx(const std::filesystem::path& path) {
  IdxBytes raw = read_idx_bytes(path);
  IdxTensor t;
  t.dims = std::move(raw.dims);
  t.data.resize(raw.data.size());
  std::transform(raw.data.begin(), raw.data.end(), t.data.begin(),
                 [](std::uint8_t v) { return static_cast<double>(v) / 255.0; });
  return t;
}

std::vector<std::uint8_t> encode_idx(std::span<const std::size_t> dims, std::span<const std::uint8_t> data) {
  if (dims.size() > 255) throw ConfigError("IDX supports at most 255 dimensions");
  std::size_t count = 1;
  for (std::size_t d : dims) count *= d;
  if (count != data.size()) throw ShapeError("IDX payload size does not match dimensions");
  std::vector<std::uint8_t> out = {0, 0, kUnsignedByte, static_cast<std::uint8_t>(dims.size())};
  for (std::size_t d : dims) {
    const auto v = static_cast<std::uint32_t>(d);
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
  }
  out.insert(out.end(), data.begin(), data.end());
  return out;
}

void write_idx(const std::filesystem::path& path, std::span<const std::size_t> dims,
               std::span<const std::uint8_t> data) {
  const auto bytes = encode_idx(dims, data);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write IDX file " + path.string());
}

LabeledPool pool_from_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                          std::span<const int> positive_classes) {
  const IdxTensor x = read_idx(images);
  const IdxBytes y = read_idx_bytes(labels);
  if (x.dims.empty() || y.dims.size() != 1 || x.dims.front() != y.dims.front()) {
    throw ShapeError("IDX images and labels disagree on the item count");
  }
  if (positive_classes.empty()) throw ConfigError("positive class list is empty");
  const std::size_t items = x.dims.front();
  const std::size_t dim = items == 0 ? 0 : x.data.size() / items;

  LabeledPool pool;
  pool.features = Matrix(items, dim);
  std::copy(x.data.begin(), x.data.end(), pool.features.flat().begin());
  pool.labels.resize(items);
  for (std::size_t i = 0; i < items; ++i) {
    const int cls = y.data[i];
    const bool positive = std::find(positive_classes.begin(), positive_classes.end(), cls) != positive_classes.end();
    pool.labels[i] = positive ? 1 : -1;
  }
  pool.provenance = "idx(" + images.filename().string() + ", " + labels.filename().string() + ")";
  return pool;
}

}  // namespace uucc
