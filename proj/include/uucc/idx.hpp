#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "uucc/data.hpp"

namespace uucc {

/// IDX tensor with unsigned-byte payload (type code 0x08).
struct IdxBytes {
  std::vector<std::size_t> dims;
  std::vector<std::uint8_t> data;
};

struct IdxTensor {
  std::vector<std::size_t> dims;
  std::vector<double> data;  // bytes / 255
};

/// Parses: 0x00 0x00, type code, dimension count, big-endian u32 sizes, payload.
/// Throws FormatError with the offending byte offset: 0 for bad magic, 2 for an
/// unsupported type code, and the end of the available data for truncation.
IdxBytes parse_idx(std::span<const std::uint8_t> bytes);
IdxBytes read_idx_bytes(const std::filesystem::path& path);
/// Same as read_idx_bytes with values scaled to [0, 1].
IdxTensor read_idx(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_idx(std::span<const std::size_t> dims, std::span<const std::uint8_t> data);
void write_idx(const std::filesystem::path& path, std::span<const std::size_t> dims,
               std::span<const std::uint8_t> data);

/// Images file (N x ...) and labels file (N) into a pool where a label is +1 iff
/// its class is listed in positive_classes.
LabeledPool pool_from_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                          std::span<const int> positive_classes);

}  // namespace uucc
