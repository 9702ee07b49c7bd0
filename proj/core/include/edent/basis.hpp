#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edent/lattice.hpp"

namespace edent {

/// Local Hilbert space of one site.
enum class LocalSpace {
  electron,   ///< empty, up, down, double (two spin channels)
  spin_half,  ///< digits {0,1} <-> m = -1/2, +1/2
  spin_one,   ///< digits {0,1,2} <-> m = -1, 0, +1
};

inline bool is_fermionic(LocalSpace s) { return s == LocalSpace::electron; }
/// 2s for spin sites; 1 for electrons (each electron carries s = 1/2).
int twice_site_spin(LocalSpace s);
std::string to_string(LocalSpace s);

/// Conserved quantum numbers of a block. Spin models leave n_electrons empty.
struct Sector {
  std::optional<int> n_electrons;
  int twice_ms = 0;

  friend bool operator==(const Sector&, const Sector&) = default;
};

/// Throws ValidationError when the sector is inconsistent with the space
/// (missing/extra electron count, parity mismatch, |2M_S| too large).
void validate_sector(int n_sites, LocalSpace space, const Sector& sector);

/// Dimension of a sector without enumerating it; 0 for unreachable sectors.
std::uint64_t sector_dimension(int n_sites, LocalSpace space, const Sector& sector);

/// Encoded basis states of one sector, strictly ascending.
///
/// Electron codes are (up_mask << n_sites) | dn_mask with site i on bit i, so
/// ascending order is lexicographic in (up_mask, dn_mask). Spin codes pack
/// one 2-bit digit per site (site i at bits 2i, 2i+1).
class BasisTable {
 public:
  BasisTable(int n_sites, LocalSpace space, Sector sector, std::vector<std::uint64_t> states);

  int n_sites() const noexcept { return n_sites_; }
  LocalSpace space() const noexcept { return space_; }
  const Sector& sector() const noexcept { return sector_; }
  std::size_t size() const noexcept { return states_.size(); }
  bool empty() const noexcept { return states_.empty(); }
  std::uint64_t state(std::size_t i) const { return states_[i]; }
  const std::vector<std::uint64_t>& states() const noexcept { return states_; }

  /// Index of an encoded state, or -1 when it is not in this sector.
  std::int64_t index_of(std::uint64_t code) const;

  std::uint32_t up_mask(std::uint64_t code) const { return static_cast<std::uint32_t>(code >> n_sites_); }
  std::uint32_t dn_mask(std::uint64_t code) const {
    return static_cast<std::uint32_t>(code & ((std::uint64_t{1} << n_sites_) - 1));
  }
  std::uint64_t encode(std::uint32_t up, std::uint32_t dn) const {
    return (std::uint64_t{up} << n_sites_) | dn;
  }

 private:
  int n_sites_;
  LocalSpace space_;
  Sector sector_;
  std::vector<std::uint64_t> states_;
  // Electron fast path: rank of each mask among same-popcount masks.
  std::vector<std::int32_t> up_rank_;
  std::vector<std::int32_t> dn_rank_;
  std::uint32_t up_count_ = 0;
  std::uint32_t dn_count_ = 0;
};

inline int spin_digit(std::uint64_t code, int site) { return static_cast<int>((code >> (2 * site)) & 3u); }
inline std::uint64_t with_spin_digit(std::uint64_t code, int site, int digit) {
  return (code & ~(std::uint64_t{3} << (2 * site))) | (std::uint64_t(digit) << (2 * site));
}

/// All states of the sector in canonical order; an unreachable sector yields
/// an empty table.
BasisTable enumerate_sector(int n_sites, LocalSpace space, const Sector& sector);
inline BasisTable enumerate_sector(const Geometry& g, LocalSpace space, const Sector& sector) {
  return enumerate_sector(g.n_sites(), space, sector);
}

struct MultipletCount {
  int twice_s = 0;
  std::uint64_t count = 0;
};

/// Number of spin-S multiplets, count_S = dim(M_S = S) - dim(M_S = S + 1),
/// for the half-filled electron system (N_e = n_sites) or the spin system.
std::vector<MultipletCount> multiplet_counts(int n_sites, LocalSpace space);

/// Left-block quantum numbers; n_left is 0 for spin models.
struct BlockSector {
  int n_left = 0;
  int twice_ms_left = 0;

  friend auto operator<=>(const BlockSector&, const BlockSector&) = default;
};

/// Per-state factorization of a sector across a bipartition.
///
/// For electrons, `sign` is the parity of reordering creation operators from
/// the global order (all up by site, then all down by site) into block order
/// (left up, left down, right up, right down). For a prefix cut this reduces
/// to (-1)^{n_dn(left) * n_up(right)}.
struct BipartiteIndex {
  Bipartition cut;
  std::vector<BlockSector> sectors;      ///< left-block sectors, ascending
  std::vector<std::int32_t> left_dim;    ///< per sector
  std::vector<std::int32_t> right_dim;   ///< per sector (complementary right sector)
  std::vector<std::int32_t> sector_of;   ///< per global state
  std::vector<std::int32_t> left_index;  ///< per global state, within its sector
  std::vector<std::int32_t> right_index;
  std::vector<std::int8_t> sign;
};

BipartiteIndex bipartite_factorize(const BasisTable& basis, const Bipartition& cut);

/// Sign of reordering the occupied modes of an electron state into block
/// order. Exposed for tests.
int block_reorder_sign(std::uint32_t up, std::uint32_t dn, const Bipartition& cut, int n_sites);

}  // namespace edent
