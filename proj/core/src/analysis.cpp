#include "edent/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "edent/errors.hpp"

namespace edent {

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * double(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

std::size_t bin_of(double e, double lo, double width) {
  return static_cast<std::size_t>(std::floor((e - lo) / width));
}

void check_even_length(int n) {
  if (n < 4 || n % 2 != 0)
    throw ValidationError("chain length " + std::to_string(n) + " rejected: sweeps need even lengths >= 4");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

Profile dos_histogram(const std::vector<double>& energies, double bin_width) {
  if (!(bin_width > 0.0)) throw ValidationError("dos_histogram: bin width must be positive");
  if (energies.empty()) throw ValidationError("dos_histogram: empty eigenvalue list");
  const auto [lo_it, hi_it] = std::minmax_element(energies.begin(), energies.end());
  const double lo = *lo_it;
  const std::size_t bins = bin_of(*hi_it, lo, bin_width) + 1;
  Profile p;
  p.y.assign(bins, 0.0);
  for (double e : energies) p.y[bin_of(e, lo, bin_width)] += 1.0;
  for (std::size_t k = 0; k < bins; ++k) p.x.push_back(lo + double(k) * bin_width);
  p.metadata = "dos bin_width=" + format_double(bin_width) + " eV";
  return p;
}

Smoothing Smoothing::parse(const std::string& text) {
  Smoothing s;
  if (text == "none") return s;
  if (text == "paper") {
    s.kind = Kind::paper;
    return s;
  }
  if (text.rfind("energy_bin", 0) == 0) {
    s.kind = Kind::energy_bin;
    const auto rest = text.substr(10);
    if (rest.empty()) return s;
    if (rest.size() < 3 || rest.front() != '(' || rest.back() != ')')
      throw ValidationError("bad smoothing '" + text + "' (expected energy_bin or energy_bin(<width>))");
    try {
      s.width = std::stod(rest.substr(1, rest.size() - 2));
    } catch (const std::exception&) {
      throw ValidationError("bad smoothing width in '" + text + "'");
    }
    if (!(s.width > 0.0)) throw ValidationError("smoothing width must be positive");
    return s;
  }
  throw ValidationError("unknown smoothing '" + text + "' (expected none, paper, energy_bin(<width>))");
}

std::string Smoothing::to_string() const {
  switch (kind) {
    case Kind::none:
      return "none";
    case Kind::paper:
      return "paper";
    case Kind::energy_bin:
      return "energy_bin(" + format_double(width) + ")";
  }
  return "?";
}

std::vector<std::pair<std::size_t, std::size_t>> paper_groups(std::size_t n) {
  if (n < 90) throw ValidationError("paper smoothing needs at least 90 states, got " + std::to_string(n));
  std::vector<std::pair<std::size_t, std::size_t>> low, high, mid;
  for (std::size_t i = 0; i < 5; ++i) low.emplace_back(i, i + 1);
  for (std::size_t i = 5; i < 40; i += 4) low.emplace_back(i, std::min<std::size_t>(i + 4, 40));
  for (auto [a, b] : low) high.emplace_back(n - b, n - a);
  std::reverse(high.begin(), high.end());
  for (std::size_t i = 40; i < n - 40; i += 10) mid.emplace_back(i, std::min(i + 10, n - 40));
  low.insert(low.end(), mid.begin(), mid.end());
  low.insert(low.end(), high.begin(), high.end());
  return low;
}

Profile smooth_profile(const std::vector<double>& energies, const std::vector<double>& entropies,
                       const Smoothing& smoothing, std::string* warning) {
  if (energies.size() != entropies.size())
    throw ValidationError("smooth_profile: energy and entropy counts differ");
  const std::size_t n = energies.size();
  Profile p;
  p.metadata = "smoothing=" + smoothing.to_string();
  auto add_group = [&](std::size_t a, std::size_t b) {
    double e = 0.0, s = 0.0, s2 = 0.0;
    for (std::size_t i = a; i < b; ++i) {
      e += energies[i];
      s += entropies[i];
    }
    const double m = double(b - a);
    const double mean = s / m;
    for (std::size_t i = a; i < b; ++i) s2 += (entropies[i] - mean) * (entropies[i] - mean);
    p.x.push_back(e / m);
    p.y.push_back(mean);
    p.err.push_back(b - a > 1 ? std::sqrt(s2 / (m - 1.0) / m) : 0.0);
  };

  Smoothing::Kind kind = smoothing.kind;
  if (kind == Smoothing::Kind::paper && n < 90) {
    if (warning) *warning += "paper smoothing needs >= 90 states (have " + std::to_string(n) + "); using none\n";
    kind = Smoothing::Kind::none;
    p.metadata = "smoothing=none (paper requested, too few states)";
  }
  switch (kind) {
    case Smoothing::Kind::none:
      p.x = energies;
      p.y = entropies;
      break;
    case Smoothing::Kind::paper:
      for (auto [a, b] : paper_groups(n)) add_group(a, b);
      break;
    case Smoothing::Kind::energy_bin: {
      if (n == 0) break;
      const double lo = *std::min_element(energies.begin(), energies.end());
      std::size_t a = 0;
      while (a < n) {
        std::size_t b = a;
        const auto bin = bin_of(energies[a], lo, smoothing.width);
        while (b < n && bin_of(energies[b], lo, smoothing.width) == bin) ++b;
        add_group(a, b);
        a = b;
      }
      break;
    }
  }
  return p;
}

std::vector<double> state_entropies(const EigenSet& set, const BasisTable& basis, const Bipartition& cut) {
  const auto idx = bipartite_factorize(basis, cut);
  std::vector<double> s(set.size());
  for (std::size_t i = 0; i < set.size(); ++i)
    s[i] = schmidt_spectrum(set.vectors.col(static_cast<Eigen::Index>(i)), basis, idx).entropy;
  return s;
}

Profile entropy_profile(const EigenSet& set, const BasisTable& basis, const Bipartition& cut,
                        const Smoothing& smoothing, std::string* warning) {
  std::vector<double> e(set.values.data(), set.values.data() + set.values.size());
  return smooth_profile(e, state_entropies(set, basis, cut), smoothing, warning);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ValidationError("spearman: series lengths differ");
  if (a.size() < 2) return 0.0;
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = double(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

EntropyDosComparison entropy_vs_logdos(const std::vector<double>& energies, const std::vector<double>& entropies,
                                       double bin_width) {
  if (energies.size() != entropies.size())
    throw ValidationError("entropy_vs_logdos: energy and entropy counts differ");
  const Profile dos = dos_histogram(energies, bin_width);
  const double lo = dos.x.front();
  std::vector<double> sum(dos.size(), 0.0);
  for (std::size_t i = 0; i < energies.size(); ++i) sum[bin_of(energies[i], lo, bin_width)] += entropies[i];
  EntropyDosComparison out;
  out.pairs.metadata = "entropy_vs_logdos bin_width=" + format_double(bin_width) + " eV";
  for (std::size_t k = 0; k < dos.size(); ++k) {
    if (dos.y[k] == 0.0) continue;
    out.pairs.x.push_back(std::log2(dos.y[k]));
    out.pairs.y.push_back(sum[k] / dos.y[k]);
  }
  if (out.pairs.size() >= 4) out.correlation = spearman(out.pairs.x, out.pairs.y);
  return out;
}

EntropyDosComparison entropy_vs_logdos(const EigenSet& set, const BasisTable& basis, const Bipartition& cut,
                                       double bin_width) {
  std::vector<double> e(set.values.data(), set.values.data() + set.values.size());
  return entropy_vs_logdos(e, state_entropies(set, basis, cut), bin_width);
}

std::vector<ModelSpec> standard_sweep_models() {
  std::vector<ModelSpec> out;
  for (double u : {0.0, 2.0, 4.0, 6.0, 8.0, 12.0, 40.0}) out.push_back(ModelSpec::hubbard(-1.0, u));
  out.push_back(ModelSpec::ppp_standard());
  out.push_back(ModelSpec::heisenberg(1.0, LocalSpace::spin_half));
  out.push_back(ModelSpec::heisenberg(1.0, LocalSpace::spin_one));
  return out;
}

std::string describe(const ModelSpec& model) {
  switch (model.kind) {
    case ModelKind::heisenberg:
      return "heisenberg " + to_string(model.site_space) + " J=" + format_double(model.J);
    case ModelKind::huckel:
      return "huckel t=" + format_double(model.t);
    default:
      return to_string(model.kind) + " t=" + format_double(model.t) + " U=" + format_double(model.U);
  }
}

ChainState chain_ground_state(const ModelSpec& model, int n_sites, double bond_length, const LanczosOptions& opts) {
  Geometry g = build_chain(n_sites, bond_length);
  const LocalSpace space = model.local_space();
  Sector sector{std::nullopt, 0};
  if (is_fermionic(space))
    sector.n_electrons = n_sites;
  else
    sector.twice_ms = (n_sites * twice_site_spin(space)) % 2;
  auto basis = std::make_shared<const BasisTable>(enumerate_sector(g, space, sector));
  Hamiltonian h(g, model, basis);
  if (h.dim() <= 400) {
    const auto full = dense_spectrum(h);
    return {g, basis, full.values[0], full.vectors.col(0)};
  }
  const auto r = lanczos_lowest(h, 1, opts);
  return {g, basis, r.values[0], r.vectors.col(0)};
}

Profile sweep_ground_state(const ModelSpec& model, const std::vector<int>& lengths, double bond_length,
                           const LanczosOptions& opts) {
  for (int n : lengths) check_even_length(n);
  Profile p;
  p.metadata = describe(model) + " ground state, half cut";
  for (int n : lengths) {
    const auto st = chain_ground_state(model, n, bond_length, opts);
    p.x.push_back(n);
    p.y.push_back(schmidt_spectrum(st.vector, *st.basis, half_cut(st.geometry, n / 2)).entropy);
  }
  return p;
}

Profile sweep_block_size(const ModelSpec& model, int n_sites, const std::vector<int>& blocks, double bond_length,
                         const LanczosOptions& opts) {
  std::vector<int> ks = blocks;
  if (ks.empty())
    for (int k = 1; k < n_sites; ++k) ks.push_back(k);
  for (int k : ks)
    if (k < 1 || k >= n_sites) throw ValidationError("block size " + std::to_string(k) + " outside 1..n_sites-1");
  const auto st = chain_ground_state(model, n_sites, bond_length, opts);
  Profile p;
  p.metadata = describe(model) + " ground state, N=" + std::to_string(n_sites) + ", prefix blocks";
  for (int k : ks) {
    p.x.push_back(k);
    p.y.push_back(schmidt_spectrum(st.vector, *st.basis, half_cut(st.geometry, k)).entropy);
  }
  return p;
}

std::string TargetState::to_string() const { return std::to_string(root) + ":" + label.to_string(); }

TargetState TargetState::parse(const std::string& text) {
  TargetState t;
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    t.label = SymmetryLabel::parse(text);
    return t;
  }
  try {
    t.root = std::stoi(text.substr(0, colon));
  } catch (const std::exception&) {
    throw ValidationError("bad root in target '" + text + "'");
  }
  if (t.root < 1) throw ValidationError("target root must be >= 1 in '" + text + "'");
  t.label = SymmetryLabel::parse(text.substr(colon + 1));
  return t;
}

std::vector<TargetState> standard_excited_targets() {
  return {TargetState::parse("1:1_Ag+"), TargetState::parse("2:1_Ag+"), TargetState::parse("1:1_Bu-"),
          TargetState::parse("1:3_Bu+")};
}

double labelled_state_entropy(const ModelSpec& model, int n_sites, const TargetState& target, double bond_length,
                              const LanczosOptions& opts, C2Convention convention) {
  if (model.kind == ModelKind::heisenberg) throw ValidationError("labelled states need an electronic model");
  const Geometry g = build_chain(n_sites, bond_length);
  Sector sector{n_sites, target.label.twice_s};
  auto basis = std::make_shared<const BasisTable>(enumerate_sector(g, LocalSpace::electron, sector));
  Hamiltonian h(g, model, basis);
  SymmetryOps ops(g, basis, convention);
  const auto set = lowest_in_label(h, ops, target.label, target.root, opts);
  const Vector v = set.vectors.col(target.root - 1);
  return schmidt_spectrum(v, *basis, half_cut(g, n_sites / 2)).entropy;
}

std::vector<Profile> excited_state_series(const ModelSpec& model, const std::vector<int>& lengths,
                                          const std::vector<TargetState>& targets, double bond_length,
                                          const LanczosOptions& opts, C2Convention convention) {
  for (int n : lengths) check_even_length(n);
  std::vector<Profile> out;
  for (const auto& t : targets) {
    Profile p;
    p.metadata = describe(model) + " " + t.to_string() + ", half cut";
    for (int n : lengths) {
      p.x.push_back(n);
      p.y.push_back(labelled_state_entropy(model, n, t, bond_length, opts, convention));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace edent
