#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "hodgedirac/grid.hpp"

// Snapshot file format, version 1. Fixed 64-byte little-endian header:
//   offset 0  : magic "HDGF"
//   offset 4  : uint32 version (1)
//   offset 8  : uint32 dim
//   offset 12 : uint32 points per axis
//   offset 16 : uint32 domain (0 physical, 1 spectral)
//   offset 20 : uint32 reserved (0)
//   offset 24 : float64 box length
//   offset 32 : zero padding up to 64
// Payload: point-major float64; physical fields store 2^dim values per
// point, spectral fields store (re, im) pairs per blade per point.

namespace hodgedirac {

namespace detail {
inline constexpr char kSnapshotMagic[4] = {'H', 'D', 'G', 'F'};
inline constexpr std::uint32_t kSnapshotVersion = 1;
}  // namespace detail

inline void write_snapshot(const MultivectorGridField& F, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
  char header[64] = {};
  std::memcpy(header, detail::kSnapshotMagic, 4);
  std::uint32_t v32;
  v32 = detail::kSnapshotVersion;
  std::memcpy(header + 4, &v32, 4);
  v32 = std::uint32_t(F.dim());
  std::memcpy(header + 8, &v32, 4);
  v32 = std::uint32_t(F.spec().npoints);
  std::memcpy(header + 12, &v32, 4);
  v32 = F.domain() == Domain::physical ? 0u : 1u;
  std::memcpy(header + 16, &v32, 4);
  double L = F.spec().box_length;
  std::memcpy(header + 24, &L, 8);
  out.write(header, 64);

  const long long total = F.total();
  const int nc = F.ncoeff();
  std::vector<double> row(F.domain() == Domain::physical ? nc : 2 * nc);
  for (long long p = 0; p < total; ++p) {
    if (F.domain() == Domain::physical) {
      for (int b = 0; b < nc; ++b) row[b] = F.component(b)[p];
    } else {
      for (int b = 0; b < nc; ++b) {
        row[2 * b] = F.component_cx(b)[p].real();
        row[2 * b + 1] = F.component_cx(b)[p].imag();
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size() * 8));
  }
  if (!out) throw std::runtime_error("write_snapshot: write failed for " + path);
}

inline MultivectorGridField read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
  char header[64];
  in.read(header, 64);
  if (in.gcount() != 64) throw std::runtime_error("read_snapshot: truncated header");
  if (std::memcmp(header, detail::kSnapshotMagic, 4) != 0)
    throw std::runtime_error("read_snapshot: bad magic");
  std::uint32_t version, dim, npoints, domain;
  std::memcpy(&version, header + 4, 4);
  std::memcpy(&dim, header + 8, 4);
  std::memcpy(&npoints, header + 12, 4);
  std::memcpy(&domain, header + 16, 4);
  double L;
  std::memcpy(&L, header + 24, 8);
  if (version != detail::kSnapshotVersion) throw std::runtime_error("read_snapshot: bad version");
  if (dim < 2 || dim > unsigned(kMaxGridDim) || npoints > (1u << 20))
    throw std::runtime_error("read_snapshot: dimension overflow");
  GridSpec spec{int(dim), int(npoints), L};
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("read_snapshot: ") + e.what());
  }
  if (domain > 1) throw std::runtime_error("read_snapshot: bad domain tag");

  MultivectorGridField F = domain == 0 ? MultivectorGridField::physical(spec)
                                       : MultivectorGridField::spectral(spec);
  const long long total = spec.total();
  const int nc = F.ncoeff();
  std::vector<double> row(domain == 0 ? nc : 2 * nc);
  for (long long p = 0; p < total; ++p) {
    in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * 8));
    if (in.gcount() != std::streamsize(row.size() * 8))
      throw std::runtime_error("read_snapshot: truncated payload");
    if (domain == 0) {
      for (int b = 0; b < nc; ++b) F.component(b)[p] = row[b];
    } else {
      for (int b = 0; b < nc; ++b)
        F.component_cx(b)[p] = std::complex<double>(row[2 * b], row[2 * b + 1]);
    }
  }
  return F;
}

}  // namespace hodgedirac
