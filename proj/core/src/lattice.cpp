#include "edent/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "edent/errors.hpp"

namespace edent {

namespace {

double dist(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool preserves_structure(const Geometry& g, const std::vector<int>& perm, double tol) {
  const int n = g.n_sites();
  if (static_cast<int>(perm.size()) != n) return false;
  for (int i = 0; i < n; ++i) {
    if (perm[i] < 0 || perm[i] >= n || perm[perm[i]] != i) return false;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(g.distance(i, j) - g.distance(perm[i], perm[j])) > tol) return false;
  for (auto [a, b] : g.bonds())
    if (!g.bonded(perm[a], perm[b])) return false;
  return true;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Geometry::Geometry(std::string name, std::vector<Vec3> coords,
                   std::vector<std::pair<int, int>> bonds)
    : name_(std::move(name)), coords_(std::move(coords)) {
  const int n = n_sites();
  if (n < 1) throw ValidationError("geometry: no sites");
  if (n > 32) throw ValidationError("geometry: at most 32 sites are supported");
  std::set<std::pair<int, int>> seen;
  for (auto [i, j] : bonds) {
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw ValidationError("geometry: bond <" + std::to_string(i + 1) + "," +
                            std::to_string(j + 1) + "> references a site outside 1.." +
                            std::to_string(n));
    if (i == j)
      throw ValidationError("geometry: self-pair bond <" + std::to_string(i + 1) + "," +
                            std::to_string(j + 1) + ">");
    auto key = std::minmax(i, j);
    if (!seen.insert({key.first, key.second}).second)
      throw ValidationError("geometry: duplicate bond <" + std::to_string(key.first + 1) +
                            "," + std::to_string(key.second + 1) + ">");
  }
  bonds_.assign(seen.begin(), seen.end());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!(dist(coords_[i], coords_[j]) > 0.0))
        throw ValidationError("geometry: sites " + std::to_string(i + 1) + " and " +
                              std::to_string(j + 1) + " coincide (r_ij = 0)");
}

double Geometry::distance(int i, int j) const { return dist(coords_.at(i), coords_.at(j)); }

bool Geometry::bonded(int i, int j) const {
  auto key = std::minmax(i, j);
  return std::binary_search(bonds_.begin(), bonds_.end(), std::pair{key.first, key.second});
}

int Geometry::degree(int i) const {
  return static_cast<int>(std::count_if(bonds_.begin(), bonds_.end(), [i](const auto& b) {
    return b.first == i || b.second == i;
  }));
}

void Geometry::declare_c2(std::vector<int> perm) {
  if (!preserves_structure(*this, perm, 1e-9))
    throw ValidationError("geometry '" + name_ +
                          "': declared C2 map is not a bond- and distance-preserving involution");
  c2_ = std::move(perm);
}

std::optional<std::vector<int>> Geometry::sublattice_signs() const {
  const int n = n_sites();
  std::vector<int> color(n, 0);
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : bonds_) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (int root = 0; root < n; ++root) {
    if (color[root] != 0) continue;
    // Site 1 (index 0) is odd, so it carries (-1)^1 = -1.
    color[root] = (root % 2 == 0) ? -1 : 1;
    std::vector<int> stack{root};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v]) {
        if (color[w] == 0) {
          color[w] = -color[v];
          stack.push_back(w);
        } else if (color[w] == color[v]) {
          return std::nullopt;
        }
      }
    }
  }
  return color;
}

void Bipartition::validate(int n_sites) const {
  if (left.empty() || right.empty())
    throw ValidationError("bipartition: both blocks must be non-empty");
  std::vector<int> seen(n_sites, 0);
  for (int s : left) {
    if (s < 0 || s >= n_sites) throw ValidationError("bipartition: site out of range");
    ++seen[s];
  }
  for (int s : right) {
    if (s < 0 || s >= n_sites) throw ValidationError("bipartition: site out of range");
    ++seen[s];
  }
  for (int i = 0; i < n_sites; ++i)
    if (seen[i] != 1)
      throw ValidationError("bipartition: site " + std::to_string(i + 1) +
                            (seen[i] == 0 ? " is in neither block" : " is in both blocks"));
}

Geometry build_chain(int n_sites, double bond_length) {
  if (n_sites < 2) throw ValidationError("build_chain: need at least 2 sites");
  if (!(bond_length > 0.0)) throw ValidationError("build_chain: bond_length must be positive");
  std::vector<Vec3> coords(n_sites);
  std::vector<std::pair<int, int>> bonds;
  for (int i = 0; i < n_sites; ++i) coords[i] = {i * bond_length, 0.0, 0.0};
  for (int i = 0; i + 1 < n_sites; ++i) bonds.emplace_back(i, i + 1);
  Geometry g("chain-" + std::to_string(n_sites), std::move(coords), std::move(bonds));
  std::vector<int> reflect(n_sites);
  for (int i = 0; i < n_sites; ++i) reflect[i] = n_sites - 1 - i;
  g.declare_c2(std::move(reflect));
  return g;
}

const std::array<int, 12>& icosahedron_c2_table() {
  // Rotation by pi about the horizontal axis at 18 degrees: ring angle
  // theta -> 36deg - theta, z -> -z. Upper ring k (72k deg) lands on lower
  // ring slot m with 36 + 72m = 36 - 72k, i.e. m = (-k) mod 5.
  static const std::array<int, 12> table = {11, 6, 10, 9, 8, 7, 1, 5, 4, 3, 2, 0};
  return table;
}

Geometry build_icosahedron(double edge_length) {
  if (!(edge_length > 0.0))
    throw ValidationError("build_icosahedron: edge_length must be positive");
  const double pi = std::numbers::pi;
  // Circumradius R = a sin(2 pi / 5); ring height R/sqrt5, radius 2R/sqrt5.
  const double R = edge_length * std::sin(2.0 * pi / 5.0);
  const double h = R / std::sqrt(5.0);
  const double r = 2.0 * R / std::sqrt(5.0);
  std::vector<Vec3> c(12);
  c[0] = {0.0, 0.0, R};
  for (int k = 0; k < 5; ++k) {
    const double up = 2.0 * pi * k / 5.0;
    const double dn = up + pi / 5.0;
    c[1 + k] = {r * std::cos(up), r * std::sin(up), h};
    c[6 + k] = {r * std::cos(dn), r * std::sin(dn), -h};
  }
  c[11] = {0.0, 0.0, -R};

  std::vector<std::pair<int, int>> bonds;
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j)
      if (std::abs(dist(c[i], c[j]) - edge_length) < 1e-9 * edge_length) bonds.emplace_back(i, j);
  Geometry g("icosahedron", std::move(c), std::move(bonds));
  const auto& t = icosahedron_c2_table();
  g.declare_c2(std::vector<int>(t.begin(), t.end()));
  return g;
}

Geometry parse_geometry(const std::string& text, const std::string& fallback_name) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::string name = fallback_name;

  auto fail = [&](const std::string& msg) -> ValidationError {
    return ValidationError("geometry parse error at line " + std::to_string(lineno) + ": " + msg);
  };
  // Returns the next non-blank, comment-stripped line; picks up `# geometry:` names.
  auto next = [&](std::string& out) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) {
        auto comment = line.substr(hash + 1);
        const std::string tag = " geometry:";
        if (comment.rfind(tag, 0) == 0) {
          auto v = comment.substr(tag.size());
          v.erase(0, v.find_first_not_of(" \t"));
          v.erase(v.find_last_not_of(" \t\r") + 1);
          if (!v.empty()) name = v;
        }
        line.erase(hash);
      }
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out = line;
      return true;
    }
    return false;
  };
  auto header = [&](const std::string& key) -> int {
    std::string l;
    if (!next(l)) throw fail("expected '" + key + " <count>', found end of file");
    std::istringstream ls(l);
    std::string k;
    long long count = -1;
    std::string extra;
    if (!(ls >> k >> count) || k != key || (ls >> extra))
      throw fail("expected '" + key + " <count>'");
    if (count < 0) throw fail("negative " + key + " count");
    return static_cast<int>(count);
  };

  const int n = header("sites");
  if (n < 1) throw fail("sites count must be positive");
  std::vector<Vec3> coords(n);
  std::vector<bool> have(n, false);
  for (int k = 0; k < n; ++k) {
    std::string l;
    if (!next(l)) throw fail("expected site line " + std::to_string(k + 1) + " of " + std::to_string(n));
    std::istringstream ls(l);
    int idx = 0;
    Vec3 p{};
    std::string extra;
    if (!(ls >> idx >> p[0] >> p[1] >> p[2]) || (ls >> extra)) throw fail("expected 'i x y z'");
    if (idx < 1 || idx > n) throw fail("site index " + std::to_string(idx) + " outside 1.." + std::to_string(n));
    if (have[idx - 1]) throw fail("site " + std::to_string(idx) + " listed twice");
    have[idx - 1] = true;
    coords[idx - 1] = p;
  }
  const int m = header("bonds");
  std::vector<std::pair<int, int>> bonds;
  for (int k = 0; k < m; ++k) {
    std::string l;
    if (!next(l)) throw fail("expected bond line " + std::to_string(k + 1) + " of " + std::to_string(m));
    std::istringstream ls(l);
    int a = 0, b = 0;
    std::string extra;
    if (!(ls >> a >> b) || (ls >> extra)) throw fail("expected 'i j'");
    if (a == b) throw fail("self-pair bond <" + std::to_string(a) + "," + std::to_string(b) + ">");
    bonds.emplace_back(a - 1, b - 1);
  }
  std::string trailing;
  if (next(trailing)) throw fail("unexpected content after bond list");

  Geometry g(name, std::move(coords), std::move(bonds));
  std::vector<int> reflect(n);
  for (int i = 0; i < n; ++i) reflect[i] = n - 1 - i;
  if (preserves_structure(g, reflect, 1e-9)) {
    g.declare_c2(std::move(reflect));
  } else if (n == 12) {
    const auto& t = icosahedron_c2_table();
    std::vector<int> ico(t.begin(), t.end());
    if (preserves_structure(g, ico, 1e-9)) g.declare_c2(std::move(ico));
  }
  return g;
}

Geometry load_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open geometry file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_geometry(ss.str(), path.stem().string());
}

std::string serialize_geometry(const Geometry& g) {
  std::string out = "# geometry: " + g.name() + "\n";
  out += "sites " + std::to_string(g.n_sites()) + "\n";
  for (int i = 0; i < g.n_sites(); ++i) {
    const auto& p = g.coords()[i];
    out += std::to_string(i + 1) + " " + format_double(p[0]) + " " + format_double(p[1]) + " " +
           format_double(p[2]) + "\n";
  }
  out += "bonds " + std::to_string(g.bonds().size()) + "\n";
  for (auto [a, b] : g.bonds()) out += std::to_string(a + 1) + " " + std::to_string(b + 1) + "\n";
  return out;
}

Bipartition half_cut(const Geometry& g, int left_size) {
  const int n = g.n_sites();
  if (left_size < 1 || left_size >= n)
    throw ValidationError("half_cut: left_size " + std::to_string(left_size) +
                          " outside 1.." + std::to_string(n - 1));
  Bipartition b;
  for (int i = 0; i < n; ++i) (i < left_size ? b.left : b.right).push_back(i);
  return b;
}

}  // namespace edent
