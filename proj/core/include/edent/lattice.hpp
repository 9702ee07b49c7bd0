#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace edent {

using Vec3 = std::array<double, 3>;

inline constexpr double kDefaultBondLength = 1.397;  // Å

/// Site geometry of a finite cluster. Sites are 0-based internally; the text
/// format and all user-facing output are 1-based.
class Geometry {
 public:
  /// Validates: no self bonds, bond endpoints in range, no duplicate bonds,
  /// all inter-site distances strictly positive. Bonds are normalized to
  /// (lo, hi) and sorted.
  Geometry(std::string name, std::vector<Vec3> coords,
           std::vector<std::pair<int, int>> bonds);

  const std::string& name() const noexcept { return name_; }
  int n_sites() const noexcept { return static_cast<int>(coords_.size()); }
  const std::vector<Vec3>& coords() const noexcept { return coords_; }
  const std::vector<std::pair<int, int>>& bonds() const noexcept { return bonds_; }

  double distance(int i, int j) const;
  bool bonded(int i, int j) const;
  int degree(int i) const;

  /// Site permutation of a declared two-fold axis (C2), if any.
  const std::optional<std::vector<int>>& c2_map() const noexcept { return c2_; }
  /// Attaches a C2 permutation after checking it is an involution that
  /// preserves the bond set and every pairwise distance.
  void declare_c2(std::vector<int> perm);

  /// Two-colouring of the bond graph (+1/-1 per site, site 0 gets -1, i.e.
  /// (-1)^i with 1-based i), or nullopt when the bond graph has odd cycles.
  std::optional<std::vector<int>> sublattice_signs() const;

 private:
  std::string name_;
  std::vector<Vec3> coords_;
  std::vector<std::pair<int, int>> bonds_;
  std::optional<std::vector<int>> c2_;
};

/// Ordered left/right split of the sites. Orders matter for the fermionic
/// reordering sign in the bipartite factorization.
struct Bipartition {
  std::vector<int> left;
  std::vector<int> right;

  /// Throws ValidationError unless left/right partition 0..n_sites-1 and are
  /// both non-empty.
  void validate(int n_sites) const;
};

/// Collinear, equally spaced chain along x with consecutive bonds. Declares
/// the reflection i -> N-1-i as its C2.
Geometry build_chain(int n_sites, double bond_length = kDefaultBondLength);

/// Regular icosahedron with a five-fold axis along z. Site order:
/// 0 apex, 1..5 upper ring, 6..10 lower ring, 11 bottom apex; so sites 0..5
/// (1..6 in file numbering) are the upper half. C2 is the horizontal
/// two-fold axis at 18 degrees from x, which swaps the two halves.
Geometry build_icosahedron(double edge_length = kDefaultBondLength);

/// Site permutation of the icosahedron C2 axis in the canonical ordering.
const std::array<int, 12>& icosahedron_c2_table();

Geometry parse_geometry(const std::string& text, const std::string& fallback_name = "geometry");
Geometry load_geometry(const std::filesystem::path& path);
/// Emits the text format with 17 significant digits; parse(serialize(g)) is
/// bit-exact and serialize(parse(text)) reproduces `text` for emitted files.
std::string serialize_geometry(const Geometry& g);

/// Prefix cut: left = sites 0..left_size-1, right = the rest. For the
/// icosahedron this is the upper/lower split when left_size = 6.
Bipartition half_cut(const Geometry& g, int left_size);

}  // namespace edent
