#include "edent/basis.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <unordered_map>

#include "edent/errors.hpp"

namespace edent {

namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

// Ascending masks over n bits with exactly k set bits (Gosper's hack).
std::vector<std::uint32_t> masks_with_popcount(int n, int k) {
  std::vector<std::uint32_t> out;
  if (k < 0 || k > n) return out;
  if (k == 0) return {0u};
  out.reserve(binomial(n, k));
  std::uint64_t v = (std::uint64_t{1} << k) - 1;
  const std::uint64_t limit = std::uint64_t{1} << n;
  while (v < limit) {
    out.push_back(static_cast<std::uint32_t>(v));
    const std::uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
  }
  return out;
}

// (n_up, n_dn) of an electron sector, or nullopt when unreachable.
std::optional<std::pair<int, int>> spin_channel_counts(int n_sites, const Sector& s) {
  const int ne = *s.n_electrons;
  const int up = (ne + s.twice_ms) / 2;
  const int dn = (ne - s.twice_ms) / 2;
  if (up < 0 || dn < 0 || up > n_sites || dn > n_sites) return std::nullopt;
  return std::pair{up, dn};
}

// Number of digit strings of length n (digits 0..two_s) whose sum of 2m equals
// twice_ms, where 2m = 2d - two_s.
std::uint64_t spin_strings(int n, int two_s, int twice_ms) {
  // Shift: sum of digits D = (twice_ms + n * two_s) / 2.
  const int total = twice_ms + n * two_s;
  if (total < 0 || total % 2 != 0) return 0;
  const int target = total / 2;
  if (target > n * two_s) return 0;
  std::vector<std::uint64_t> ways(target + 1, 0);
  ways[0] = 1;
  for (int site = 0; site < n; ++site) {
    std::vector<std::uint64_t> next(target + 1, 0);
    for (int d = 0; d <= target; ++d) {
      if (ways[d] == 0) continue;
      for (int x = 0; x <= two_s && d + x <= target; ++x) next[d + x] += ways[d];
    }
    ways.swap(next);
  }
  return ways[target];
}

void enumerate_spin(int site, int n, int two_s, int remaining, std::uint64_t code,
                    std::vector<std::uint64_t>& out) {
  if (site == n) {
    if (remaining == 0) out.push_back(code);
    return;
  }
  const int left_after = n - site - 1;
  for (int d = 0; d <= two_s; ++d) {
    const int rem = remaining - d;
    if (rem < 0) break;
    if (rem > left_after * two_s) continue;
    enumerate_spin(site + 1, n, two_s, rem, code | (std::uint64_t(d) << (2 * site)), out);
  }
}

}  // namespace

int twice_site_spin(LocalSpace s) {
  switch (s) {
    case LocalSpace::electron:
    case LocalSpace::spin_half:
      return 1;
    case LocalSpace::spin_one:
      return 2;
  }
  return 1;
}

std::string to_string(LocalSpace s) {
  switch (s) {
    case LocalSpace::electron:
      return "electron";
    case LocalSpace::spin_half:
      return "spin_half";
    case LocalSpace::spin_one:
      return "spin_one";
  }
  return "?";
}

void validate_sector(int n_sites, LocalSpace space, const Sector& s) {
  if (is_fermionic(space)) {
    if (!s.n_electrons) throw ValidationError("sector: electron models need n_electrons");
    const int ne = *s.n_electrons;
    if (ne < 0 || ne > 2 * n_sites)
      throw ValidationError("sector: n_electrons " + std::to_string(ne) + " outside 0.." +
                            std::to_string(2 * n_sites));
    if (std::abs(s.twice_ms) > ne)
      throw ValidationError("sector: |2M_S| = " + std::to_string(std::abs(s.twice_ms)) +
                            " exceeds n_electrons = " + std::to_string(ne));
    if ((ne + s.twice_ms) % 2 != 0)
      throw ValidationError("sector: parity of 2M_S does not match n_electrons");
  } else {
    if (s.n_electrons) throw ValidationError("sector: spin models take no n_electrons");
    const int max = n_sites * twice_site_spin(space);
    if (std::abs(s.twice_ms) > max)
      throw ValidationError("sector: |2M_S| exceeds the maximum " + std::to_string(max));
    if ((max + s.twice_ms) % 2 != 0)
      throw ValidationError("sector: parity of 2M_S does not match the site spins");
  }
}

std::uint64_t sector_dimension(int n_sites, LocalSpace space, const Sector& s) {
  validate_sector(n_sites, space, s);
  if (is_fermionic(space)) {
    auto counts = spin_channel_counts(n_sites, s);
    if (!counts) return 0;
    return binomial(n_sites, counts->first) * binomial(n_sites, counts->second);
  }
  return spin_strings(n_sites, twice_site_spin(space), s.twice_ms);
}

BasisTable::BasisTable(int n_sites, LocalSpace space, Sector sector, std::vector<std::uint64_t> states)
    : n_sites_(n_sites), space_(space), sector_(sector), states_(std::move(states)) {
  if (!std::is_sorted(states_.begin(), states_.end()) ||
      std::adjacent_find(states_.begin(), states_.end()) != states_.end())
    throw ValidationError("BasisTable: states must be strictly ascending");
  if (is_fermionic(space_) && n_sites_ <= 20 && !states_.empty()) {
    const std::size_t full = std::size_t{1} << n_sites_;
    up_rank_.assign(full, -1);
    dn_rank_.assign(full, -1);
    auto counts = spin_channel_counts(n_sites_, sector_);
    std::int32_t r = 0;
    for (auto m : masks_with_popcount(n_sites_, counts->first)) up_rank_[m] = r++;
    up_count_ = static_cast<std::uint32_t>(r);
    r = 0;
    for (auto m : masks_with_popcount(n_sites_, counts->second)) dn_rank_[m] = r++;
    dn_count_ = static_cast<std::uint32_t>(r);
  }
}

std::int64_t BasisTable::index_of(std::uint64_t code) const {
  if (!up_rank_.empty()) {
    const std::uint64_t up = code >> n_sites_;
    const std::uint64_t dn = code & ((std::uint64_t{1} << n_sites_) - 1);
    if (up >= up_rank_.size()) return -1;
    const auto ru = up_rank_[up];
    const auto rd = dn_rank_[dn];
    if (ru < 0 || rd < 0) return -1;
    return std::int64_t{ru} * dn_count_ + rd;
  }
  auto it = std::lower_bound(states_.begin(), states_.end(), code);
  if (it == states_.end() || *it != code) return -1;
  return it - states_.begin();
}

BasisTable enumerate_sector(int n_sites, LocalSpace space, const Sector& sector) {
  if (n_sites < 1) throw ValidationError("enumerate_sector: need at least one site");
  if (is_fermionic(space) && n_sites > 31)
    throw ValidationError("enumerate_sector: electron bases support at most 31 sites");
  validate_sector(n_sites, space, sector);
  std::vector<std::uint64_t> states;
  if (is_fermionic(space)) {
    if (auto counts = spin_channel_counts(n_sites, sector)) {
      const auto ups = masks_with_popcount(n_sites, counts->first);
      const auto dns = masks_with_popcount(n_sites, counts->second);
      states.reserve(ups.size() * dns.size());
      for (auto u : ups)
        for (auto d : dns) states.push_back((std::uint64_t{u} << n_sites) | d);
    }
  } else {
    const int two_s = twice_site_spin(space);
    const int total = sector.twice_ms + n_sites * two_s;
    states.reserve(spin_strings(n_sites, two_s, sector.twice_ms));
    enumerate_spin(0, n_sites, two_s, total / 2, 0, states);
    std::sort(states.begin(), states.end());
  }
  return BasisTable(n_sites, space, sector, std::move(states));
}

std::vector<MultipletCount> multiplet_counts(int n_sites, LocalSpace space) {
  std::optional<int> ne;
  int max_twice = n_sites * twice_site_spin(space);
  if (is_fermionic(space)) {
    ne = n_sites;
    max_twice = n_sites;
  }
  const int lowest = max_twice % 2;
  std::vector<MultipletCount> out;
  for (int two_s = lowest; two_s <= max_twice; two_s += 2) {
    const auto here = sector_dimension(n_sites, space, Sector{ne, two_s});
    const auto above = two_s + 2 <= max_twice ? sector_dimension(n_sites, space, Sector{ne, two_s + 2}) : 0;
    out.push_back({two_s, here - above});
  }
  return out;
}

int block_reorder_sign(std::uint32_t up, std::uint32_t dn, const Bipartition& cut, int n_sites) {
  const int nl = static_cast<int>(cut.left.size());
  const int nr = static_cast<int>(cut.right.size());
  // Block position of each site within its block, and block of each site.
  int pos[32];
  bool is_left[32];
  for (int p = 0; p < nl; ++p) {
    pos[cut.left[p]] = p;
    is_left[cut.left[p]] = true;
  }
  for (int p = 0; p < nr; ++p) {
    pos[cut.right[p]] = p;
    is_left[cut.right[p]] = false;
  }
  // Key in block order: [left up | left dn | right up | right dn].
  auto key = [&](int site, bool is_up) {
    if (is_left[site]) return is_up ? pos[site] : nl + pos[site];
    return 2 * nl + (is_up ? pos[site] : nr + pos[site]);
  };
  std::uint64_t seen = 0;
  int inversions = 0;
  auto visit = [&](int k) {
    inversions += std::popcount(seen >> (k + 1));
    seen |= std::uint64_t{1} << k;
  };
  for (int i = 0; i < n_sites; ++i)
    if (up >> i & 1u) visit(key(i, true));
  for (int i = 0; i < n_sites; ++i)
    if (dn >> i & 1u) visit(key(i, false));
  return (inversions & 1) ? -1 : 1;
}

BipartiteIndex bipartite_factorize(const BasisTable& basis, const Bipartition& cut) {
  const int n = basis.n_sites();
  cut.validate(n);
  const bool fermion = is_fermionic(basis.space());
  const int two_s = twice_site_spin(basis.space());
  const int nl = static_cast<int>(cut.left.size());

  // Local code of the block and its quantum numbers.
  auto local = [&](std::uint64_t code, const std::vector<int>& sites) {
    std::uint64_t out = 0;
    const int m = static_cast<int>(sites.size());
    if (fermion) {
      const auto up = basis.up_mask(code);
      const auto dn = basis.dn_mask(code);
      std::uint64_t lu = 0, ld = 0;
      for (int p = 0; p < m; ++p) {
        lu |= std::uint64_t(up >> sites[p] & 1u) << p;
        ld |= std::uint64_t(dn >> sites[p] & 1u) << p;
      }
      out = (lu << m) | ld;
    } else {
      for (int p = 0; p < m; ++p) out |= std::uint64_t(spin_digit(code, sites[p])) << (2 * p);
    }
    return out;
  };
  auto quantum = [&](std::uint64_t lcode, int m) {
    if (fermion) {
      const int u = std::popcount(lcode >> m);
      const int d = std::popcount(lcode & ((std::uint64_t{1} << m) - 1));
      return BlockSector{u + d, u - d};
    }
    int tm = 0;
    for (int p = 0; p < m; ++p) tm += 2 * spin_digit(lcode, p) - two_s;
    return BlockSector{0, tm};
  };

  const std::size_t dim = basis.size();
  std::vector<std::uint64_t> lcodes(dim), rcodes(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    lcodes[i] = local(basis.state(i), cut.left);
    rcodes[i] = local(basis.state(i), cut.right);
  }

  // Sorted unique local codes; index within sector follows ascending code.
  auto build_side = [](std::vector<std::uint64_t> codes, auto&& qn) {
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    std::unordered_map<std::uint64_t, std::int32_t> index;
    std::map<BlockSector, std::int32_t> counts;
    index.reserve(codes.size());
    for (auto c : codes) index.emplace(c, counts[qn(c)]++);
    return std::pair{std::move(index), std::move(counts)};
  };
  const int nr = n - nl;
  auto [lindex, lcounts] = build_side(lcodes, [&](std::uint64_t c) { return quantum(c, nl); });
  auto [rindex, rcounts] = build_side(rcodes, [&](std::uint64_t c) { return quantum(c, nr); });

  BipartiteIndex out;
  out.cut = cut;
  std::map<BlockSector, std::int32_t> sector_id;
  for (auto& [s, count] : lcounts) {
    sector_id.emplace(s, static_cast<std::int32_t>(out.sectors.size()));
    out.sectors.push_back(s);
    out.left_dim.push_back(count);
  }
  const int total_n = basis.sector().n_electrons.value_or(0);
  const int total_ms = basis.sector().twice_ms;
  for (const auto& s : out.sectors) {
    BlockSector right{fermion ? total_n - s.n_left : 0, total_ms - s.twice_ms_left};
    auto it = rcounts.find(right);
    out.right_dim.push_back(it == rcounts.end() ? 0 : it->second);
  }

  out.sector_of.resize(dim);
  out.left_index.resize(dim);
  out.right_index.resize(dim);
  out.sign.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    out.sector_of[i] = sector_id.at(quantum(lcodes[i], nl));
    out.left_index[i] = lindex.at(lcodes[i]);
    out.right_index[i] = rindex.at(rcodes[i]);
    out.sign[i] = fermion ? static_cast<std::int8_t>(block_reorder_sign(
                                basis.up_mask(basis.state(i)), basis.dn_mask(basis.state(i)), cut, n))
                          : std::int8_t{1};
  }
  return out;
}

}  // namespace edent
