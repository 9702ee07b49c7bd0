#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "edent/basis.hpp"
#include "edent/hamiltonian.hpp"
#include "edent/lattice.hpp"
#include "edent/solver.hpp"

namespace edent {

/// Weights below this are numerical zeros in entropy sums and histograms.
inline constexpr double kWeightFloor = 1e-16;

/// -sum w log2 w over w >= kWeightFloor.
double entropy_bits(const std::vector<double>& weights);

/// RDM eigenvalues of one left-block sector, descending.
struct SectorSpectrum {
  BlockSector sector;
  std::vector<double> weights;
  double partial_entropy = 0.0;
};

/// Left-block reduced density matrix spectrum, grouped by left sector.
struct RDMSpectrum {
  std::vector<SectorSpectrum> sectors;  ///< ascending BlockSector order
  double entropy = 0.0;                 ///< bits
  double log2_left_fock = 0.0;          ///< log2 of the left block Fock dimension
  double log2_right_fock = 0.0;

  double total_weight() const;
  std::vector<double> all_weights() const;  ///< descending
  /// log2(min(dim_left, dim_right)), the largest attainable entropy.
  double entropy_bound() const { return log2_left_fock < log2_right_fock ? log2_left_fock : log2_right_fock; }
};

/// Schmidt decomposition per left sector: singular values of each coefficient
/// block, w = sigma^2. Throws ValidationError unless |<v|v> - 1| <= 1e-10.
RDMSpectrum schmidt_spectrum(const Vector& v, const BasisTable& basis, const Bipartition& cut);
RDMSpectrum schmidt_spectrum(const Vector& v, const BasisTable& basis, const BipartiteIndex& index);

/// Entropies from the left RDM (C C^T) and the right RDM (C^T C), each
/// diagonalized on its own.
struct TwoSidedEntropy {
  double left = 0.0;
  double right = 0.0;
  std::vector<double> left_weights;   ///< descending, including zeros
  std::vector<double> right_weights;  ///< descending, including zeros
};
TwoSidedEntropy entropy_both_sides(const Vector& v, const BasisTable& basis, const Bipartition& cut);

struct SectorEntropy {
  BlockSector sector;
  double partial_entropy = 0.0;
};

/// Partial entropies per left sector, sorted by descending partial entropy
/// (ties keep ascending sector order).
std::vector<SectorEntropy> sector_table(const RDMSpectrum& spectrum);
std::vector<SectorEntropy> sector_table(const Vector& v, const BasisTable& basis, const Bipartition& cut);

/// n_p = #{w : 10^-p > w >= 10^-(p+1)}, p = 0..15. Weights equal to 1 land
/// in n_0; w < 1e-16 is dropped.
using DecadeHistogram = std::array<std::uint64_t, 16>;
DecadeHistogram decade_histogram(const std::vector<double>& weights);
DecadeHistogram decade_histogram(const RDMSpectrum& spectrum);

/// Spectrum of rho_av = (1/g) sum_i rho_i over the columns of `members`,
/// which must be orthonormal to 1e-8. Invariant under orthonormal remixing.
RDMSpectrum degenerate_average(const Matrix& members, const BasisTable& basis, const Bipartition& cut);
RDMSpectrum degenerate_average(const DegenerateManifold& manifold, const EigenSet& set, const BasisTable& basis,
                               const Bipartition& cut);

/// Block entropy of the non-interacting (U = 0) ground state of the sector,
/// from the correlation matrix of occupied hopping orbitals restricted to the
/// left sites, summed over both spin channels. Throws ValidationError when the
/// last filled and first empty one-body levels of a channel are degenerate.
double free_fermion_oracle(const Geometry& geometry, double t, const Bipartition& cut, const Sector& sector);

}  // namespace edent
