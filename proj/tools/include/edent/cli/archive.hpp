#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "edent/solver.hpp"

namespace edent::cli {

/// Eigenpair archive: one line of JSON, a newline, then a little-endian
/// float64 payload holding the eigenvalues followed by the eigenvectors in
/// row-major order (one row per eigenpair). The header records the payload
/// offset in the file, section offsets relative to the payload, the payload
/// length and its FNV-1a 64-bit checksum.
struct Archive {
  nlohmann::json meta;  ///< model, geometry, sector, labels, tolerances, seed, ...
  EigenSet set;
};

std::uint64_t fnv1a64(const unsigned char* data, std::size_t n);

/// Serialized bytes of an archive (header + payload).
std::string encode_archive(const Archive& a);
void write_archive(const std::filesystem::path& path, const Archive& a);

/// Throws ValidationError on malformed headers, offset/length mismatches
/// (with byte positions) or checksum failure.
Archive read_archive(const std::filesystem::path& path);

}  // namespace edent::cli
