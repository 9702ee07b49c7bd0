#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edent/entanglement.hpp"
#include "edent/solver.hpp"
#include "edent/symmetry.hpp"

namespace edent {

/// Paired series for plotting. `err` is empty or one standard error per point.
struct Profile {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;
  std::string metadata;

  std::size_t size() const noexcept { return x.size(); }
};

/// Counts per bin [E_min + k w, E_min + (k+1) w); x holds the lower edges.
Profile dos_histogram(const std::vector<double>& energies, double bin_width = 0.5);

struct Smoothing {
  enum class Kind { none, paper, energy_bin };
  Kind kind = Kind::none;
  double width = 0.5;  ///< energy_bin only, eV

  /// "none", "paper", "energy_bin" or "energy_bin(0.25)".
  static Smoothing parse(const std::string& text);
  std::string to_string() const;
};

/// Groups used by the `paper` scheme as half-open index ranges [first, last).
/// With n states: 5 raw at each end, then runs of 4 up to 40 states in from
/// each end (the innermost run has 3), then runs of 10 in the middle (the
/// last may be shorter). Requires n >= 90.
std::vector<std::pair<std::size_t, std::size_t>> paper_groups(std::size_t n);

/// Smooths (energy, entropy) pairs already sorted by energy. The `paper`
/// scheme falls back to `none` below 90 states and appends a note to
/// `warning` when given.
Profile smooth_profile(const std::vector<double>& energies, const std::vector<double>& entropies,
                       const Smoothing& smoothing, std::string* warning = nullptr);

/// Entropy of every eigenpair across the cut, then smooth_profile.
Profile entropy_profile(const EigenSet& set, const BasisTable& basis, const Bipartition& cut,
                        const Smoothing& smoothing, std::string* warning = nullptr);

/// Entropy of each eigenpair across the cut.
std::vector<double> state_entropies(const EigenSet& set, const BasisTable& basis, const Bipartition& cut);

/// Spearman rank correlation with average ranks for ties; 0 when either
/// series has no variance.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct EntropyDosComparison {
  Profile pairs;                       ///< x = log2(DoS count), y = mean entropy per nonempty bin
  std::optional<double> correlation;   ///< nullopt with fewer than 4 nonempty bins
};
EntropyDosComparison entropy_vs_logdos(const std::vector<double>& energies, const std::vector<double>& entropies,
                                       double bin_width = 0.5);
EntropyDosComparison entropy_vs_logdos(const EigenSet& set, const BasisTable& basis, const Bipartition& cut,
                                       double bin_width = 0.5);

/// Model families of the chain-length sweep.
std::vector<ModelSpec> standard_sweep_models();
std::string describe(const ModelSpec& model);

/// Ground-state entropy at the half cut of open chains of the given even
/// lengths (>= 4); x = length.
Profile sweep_ground_state(const ModelSpec& model, const std::vector<int>& lengths,
                           double bond_length = kDefaultBondLength, const LanczosOptions& opts = {});

/// Ground-state entropy of one chain for every prefix block in `blocks`
/// (1..n_sites-1; empty means all); x = block size.
Profile sweep_block_size(const ModelSpec& model, int n_sites, const std::vector<int>& blocks = {},
                         double bond_length = kDefaultBondLength, const LanczosOptions& opts = {});

/// Ground state of an open chain: the lowest state of the half-filled 2M_S = 0
/// sector (electrons) or of the lowest-|M_S| sector (spins).
struct ChainState {
  Geometry geometry;
  std::shared_ptr<const BasisTable> basis;
  double energy = 0.0;
  Vector vector;
};
ChainState chain_ground_state(const ModelSpec& model, int n_sites, double bond_length = kDefaultBondLength,
                              const LanczosOptions& opts = {});

/// The root-th lowest state carrying a label; written "2:1_Ag+" for the
/// second singlet Ag+ state. A bare label means root 1.
struct TargetState {
  SymmetryLabel label;
  int root = 1;

  std::string to_string() const;
  static TargetState parse(const std::string& text);
};
std::vector<TargetState> standard_excited_targets();

/// Entropy vs chain length for each target, via lowest_in_label; one
/// profile per target in the order given.
std::vector<Profile> excited_state_series(const ModelSpec& model, const std::vector<int>& lengths,
                                          const std::vector<TargetState>& targets,
                                          double bond_length = kDefaultBondLength, const LanczosOptions& opts = {},
                                          C2Convention convention = C2Convention::fermionic);

/// Entropy of one labelled state of a half-filled chain across its half cut.
double labelled_state_entropy(const ModelSpec& model, int n_sites, const TargetState& target,
                              double bond_length = kDefaultBondLength, const LanczosOptions& opts = {},
                              C2Convention convention = C2Convention::fermionic);

}  // namespace edent
