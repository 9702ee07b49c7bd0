#include "edent/cli/archive.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "edent/errors.hpp"

namespace edent::cli {

namespace {

static_assert(std::endian::native == std::endian::little, "archive payload assumes a little-endian host");

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::uint64_t fnv1a64(const unsigned char* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string encode_archive(const Archive& a) {
  const auto count = static_cast<std::size_t>(a.set.values.size());
  const auto dim = static_cast<std::size_t>(a.set.vectors.rows());
  if (static_cast<std::size_t>(a.set.vectors.cols()) != count)
    throw ValidationError("archive: eigenvector count does not match eigenvalue count");

  std::string payload((count + count * dim) * sizeof(double), '\0');
  auto* out = reinterpret_cast<double*>(payload.data());
  for (std::size_t i = 0; i < count; ++i) out[i] = a.set.values[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t r = 0; r < dim; ++r)
      out[count + i * dim + r] = a.set.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i));

  nlohmann::json h = a.meta;
  h["format"] = "edent-eigenpairs";
  h["version"] = 1;
  h["count"] = count;
  h["dimension"] = dim;
  h["residuals"] = a.set.residuals;
  h["eigenvalues_offset"] = 0;
  h["eigenvectors_offset"] = count * sizeof(double);
  h["payload_bytes"] = payload.size();
  h["checksum"] = "fnv1a64:" + hex64(fnv1a64(reinterpret_cast<const unsigned char*>(payload.data()), payload.size()));
  // The header states its own length; iterate until the digits settle.
  std::size_t offset = 0;
  std::string header;
  for (int it = 0; it < 8; ++it) {
    h["payload_offset"] = offset;
    header = h.dump();
    if (header.size() + 1 == offset) break;
    offset = header.size() + 1;
  }
  return header + "\n" + payload;
}

void write_archive(const std::filesystem::path& path, const Archive& a) {
  const std::string bytes = encode_archive(a);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write archive " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("failed writing archive " + path.string());
}

Archive read_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open archive " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw ValidationError("archive: no header line terminator");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(bytes.substr(0, nl));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("archive: corrupt header: ") + e.what());
  }
  if (h.value("format", "") != "edent-eigenpairs") throw ValidationError("archive: not an edent eigenpair archive");

  const auto offset = h.at("payload_offset").get<std::size_t>();
  const auto nbytes = h.at("payload_bytes").get<std::size_t>();
  const auto count = h.at("count").get<std::size_t>();
  const auto dim = h.at("dimension").get<std::size_t>();
  if (offset != nl + 1)
    throw ValidationError("archive: header declares payload at byte " + std::to_string(offset) +
                          " but the header ends at byte " + std::to_string(nl + 1));
  if (bytes.size() != offset + nbytes)
    throw ValidationError("archive: payload expected at bytes [" + std::to_string(offset) + ", " +
                          std::to_string(offset + nbytes) + ") but the file has " + std::to_string(bytes.size()) +
                          " bytes");
  if (nbytes != (count + count * dim) * sizeof(double) ||
      h.at("eigenvectors_offset").get<std::size_t>() != count * sizeof(double))
    throw ValidationError("archive: section offsets disagree with count and dimension");
  const auto* payload = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  const std::string expected = h.at("checksum").get<std::string>();
  const std::string got = "fnv1a64:" + hex64(fnv1a64(payload, nbytes));
  if (got != expected)
    throw ValidationError("archive: checksum failure over payload bytes [" + std::to_string(offset) + ", " +
                          std::to_string(offset + nbytes) + "): header " + expected + ", computed " + got);

  Archive a;
  a.set.values.resize(static_cast<Eigen::Index>(count));
  a.set.vectors.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count));
  std::vector<double> data((count + count * dim));
  std::memcpy(data.data(), payload, nbytes);
  for (std::size_t i = 0; i < count; ++i) a.set.values[static_cast<Eigen::Index>(i)] = data[i];
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t r = 0; r < dim; ++r)
      a.set.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = data[count + i * dim + r];
  a.set.residuals = h.value("residuals", std::vector<double>(count, 0.0));
  for (const char* k : {"format", "version", "count", "dimension", "residuals", "eigenvalues_offset",
                        "eigenvectors_offset", "payload_bytes", "checksum", "payload_offset"})
    h.erase(k);
  a.meta = std::move(h);
  return a;
}

}  // namespace edent::cli
