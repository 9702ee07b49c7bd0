#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "edent/hamiltonian.hpp"
#include "edent/symmetry.hpp"

namespace edent {

/// Eigenpairs in ascending order; vectors are the columns of `vectors`.
struct EigenSet {
  Vector values;
  Matrix vectors;
  std::vector<double> residuals;  ///< ||H v - lambda v|| per pair

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
};

using LinearOperator = std::function<void(const Vector& x, Vector& y)>;
/// In-place map applied to every new Krylov direction (e.g. a symmetry
/// projector). Must be idempotent and commute with the operator.
using VectorFilter = std::function<void(Vector& x)>;

inline constexpr std::size_t kDefaultDenseCap = 20000;

/// Full spectrum via dense diagonalization. Throws ValidationError when the
/// dimension exceeds `cap` (use lanczos_lowest instead).
EigenSet dense_spectrum(const Hamiltonian& h, std::size_t cap = kDefaultDenseCap);
EigenSet dense_spectrum(const Matrix& symmetric);

struct LanczosOptions {
  double tol = 1e-10;               ///< absolute residual ||A v - theta v||
  std::uint64_t seed = 1;
  int block_size = 0;               ///< 0 picks 1 for k = 1, else min(k, 8)
  int max_basis = 0;                ///< 0 picks max(40, 2 (k + block) + 20)
  int max_restarts = 2000;
  VectorFilter filter;              ///< optional
};

/// k lowest eigenpairs of a symmetric operator by block Lanczos with full
/// reorthogonalization and thick restarts. The block size bounds the largest
/// multiplicity that is reliably resolved. Throws ConvergenceError after
/// max_restarts with the best residual reached.
EigenSet lanczos_lowest(const LinearOperator& op, std::size_t dim, int k, const LanczosOptions& opts = {});
EigenSet lanczos_lowest(const Hamiltonian& h, int k, const LanczosOptions& opts = {});

/// k lowest states carrying a symmetry label. The Hamiltonian's sector must
/// have 2M_S = 2S of the label (the highest-weight component). Every Krylov
/// direction is projected onto the requested C2/eh parities, and states of
/// higher spin are lifted by a penalty lambda (S^2 - S(S+1)) whose strength is
/// increased until every returned state has the requested spin. Returned
/// eigenvalues and residuals refer to H itself.
EigenSet lowest_in_label(const Hamiltonian& h, const SymmetryOps& ops, const SymmetryLabel& label, int k,
                         const LanczosOptions& opts = {});

/// Convenience: builds the half-filled (electrons) or plain spin sector with
/// 2M_S = 2S of the label.
EigenSet lowest_in_label(const Geometry& geometry, const ModelSpec& model, const SymmetryLabel& label, int k,
                         const LanczosOptions& opts = {}, C2Convention convention = C2Convention::fermionic);

/// Full spectrum of the symmetry-adapted subspace with the given parities
/// (0 = unconstrained) and, optionally, fixed total spin. The subspace is built
/// from projected basis-state orbits and diagonalized densely; vectors are
/// returned in the sector basis.
EigenSet subspace_spectrum(const Hamiltonian& h, const SymmetryOps& ops, int c2_parity, int eh_parity,
                           std::optional<int> twice_s, std::size_t cap = kDefaultDenseCap);

struct DegenerateManifold {
  double value = 0.0;             ///< first member's eigenvalue
  std::vector<std::size_t> members;  ///< indices into the eigenset

  std::size_t multiplicity() const noexcept { return members.size(); }
};

/// Greedy grouping of ascending eigenvalues: a value joins the open manifold
/// when |lambda - lambda_ref| <= rel_tol * max(1, |lambda_ref|).
std::vector<DegenerateManifold> group_degenerate(const Vector& values, double rel_tol = 1e-9);
std::vector<DegenerateManifold> group_degenerate(const EigenSet& set, double rel_tol = 1e-9);

/// Rotates each degenerate manifold so its members diagonalize C2, then the
/// electron-hole operator, then S^2, and returns one label per eigenpair.
/// Within a manifold members are ordered (+,+) < (+,-) < (-,+) < (-,-).
std::vector<SymmetryLabel> label_eigenset(EigenSet& set, const SymmetryOps& ops, double rel_tol = 1e-9);

/// max_i ||H v_i - lambda_i v_i|| recomputed from scratch.
std::vector<double> residual_norms(const Hamiltonian& h, const EigenSet& set);
/// max |<v_i, v_j> - delta_ij|.
double orthonormality_error(const EigenSet& set);

}  // namespace edent
