#include "edent/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "edent/errors.hpp"

namespace edent::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

json scalar_value(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  if (!v.empty()) {
    std::size_t used = 0;
    try {
      const long long i = std::stoll(v, &used);
      if (used == v.size()) return i;
    } catch (const std::exception&) {
    }
    try {
      const double d = std::stod(v, &used);
      if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
  }
  return v;
}

// Section reader that rejects unknown keys.
class Block {
 public:
  Block(const json& j, std::string name) : name_(std::move(name)) {
    if (j.is_null()) return;
    if (!j.is_object()) throw ValidationError("config: [" + name_ + "] must be a section");
    j_ = j;
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  void mark(const std::string& key) { used_.insert(key); }

  std::string str(const std::string& key, const std::string& def) {
    used_.insert(key);
    if (!j_.contains(key)) return def;
    const auto& v = j_[key];
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    throw ValidationError("config: " + where(key) + " must be a string");
  }
  double num(const std::string& key, double def) {
    used_.insert(key);
    if (!j_.contains(key)) return def;
    const auto& v = j_[key];
    if (!v.is_number()) throw ValidationError("config: " + where(key) + " must be a number");
    return v.get<double>();
  }
  long long integer(const std::string& key, long long def) {
    used_.insert(key);
    if (!j_.contains(key)) return def;
    const auto& v = j_[key];
    if (!v.is_number_integer()) throw ValidationError("config: " + where(key) + " must be an integer");
    return v.get<long long>();
  }
  std::vector<int> ints(const std::string& key) {
    used_.insert(key);
    std::vector<int> out;
    if (!j_.contains(key)) return out;
    const auto& v = j_[key];
    if (v.is_number_integer()) return {v.get<int>()};
    if (!v.is_array()) throw ValidationError("config: " + where(key) + " must be a list of integers");
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw ValidationError("config: " + where(key) + " must be a list of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }
  std::vector<double> nums(const std::string& key) {
    used_.insert(key);
    std::vector<double> out;
    if (!j_.contains(key)) return out;
    const auto& v = j_[key];
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ValidationError("config: " + where(key) + " must be a list of numbers");
    for (const auto& e : v) {
      if (!e.is_number()) throw ValidationError("config: " + where(key) + " must be a list of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  std::vector<std::string> strs(const std::string& key) {
    used_.insert(key);
    std::vector<std::string> out;
    if (!j_.contains(key)) return out;
    const auto& v = j_[key];
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array()) throw ValidationError("config: " + where(key) + " must be a list");
    for (const auto& e : v) out.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ValidationError("config: unknown key " + where(it.key()));
  }

 private:
  std::string where(const std::string& key) const { return name_.empty() ? "'" + key + "'" : "[" + name_ + "] '" + key + "'"; }
  json j_ = json::object();
  std::string name_;
  std::set<std::string> used_;
};

const std::set<std::string> kTasks{"solve", "entangle", "sector-table", "histogram", "profile", "sweep", "dos"};
const std::set<std::string> kSections{"geometry", "model", "sector", "target", "entangle", "sweep"};

LocalSpace parse_site_spin(const std::string& s) {
  if (s == "1/2" || s == "0.5" || s == "spin_half") return LocalSpace::spin_half;
  if (s == "1" || s == "spin_one") return LocalSpace::spin_one;
  throw ValidationError("config: [model] site_spin must be 1/2 or 1, got '" + s + "'");
}

}  // namespace

json parse_config_text(const std::string& text) {
  json root = json::object();
  json* cur = &root;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section))
        throw ValidationError("config line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      if (root.contains(section)) throw ValidationError("config line " + std::to_string(lineno) + ": repeated section [" + section + "]");
      root[section] = json::object();
      cur = &root[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
    if (cur->contains(key)) throw ValidationError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    if (value.find(',') != std::string::npos) {
      json arr = json::array();
      std::istringstream items(value);
      std::string item;
      while (std::getline(items, item, ',')) arr.push_back(scalar_value(trim(item)));
      (*cur)[key] = arr;
    } else {
      (*cur)[key] = scalar_value(value);
    }
  }
  return root;
}

json model_to_json(const ModelSpec& m) {
  json j;
  j["kind"] = to_string(m.kind);
  if (m.kind == ModelKind::heisenberg) {
    j["J"] = m.J;
    j["site_spin"] = m.site_space == LocalSpace::spin_one ? "1" : "1/2";
  } else {
    j["t"] = m.t;
    if (m.kind != ModelKind::huckel) j["U"] = m.U;
    if (!m.z.empty()) j["z"] = m.z;
  }
  return j;
}

ModelSpec model_from_json(const json& j) {
  Block b(j, "model");
  ModelSpec m;
  m.kind = parse_model_kind(b.str("kind", "hubbard"));
  if (m.kind == ModelKind::ppp) m = ModelSpec::ppp_standard();
  m.t = b.num("t", m.t);
  m.U = b.num("U", m.kind == ModelKind::huckel ? 0.0 : m.U);
  m.J = b.num("J", m.J);
  m.z = b.nums("z");
  const std::string spin = b.str("site_spin", "1/2");
  if (m.kind == ModelKind::heisenberg) m.site_space = parse_site_spin(spin);
  if (m.kind == ModelKind::huckel && m.U != 0.0) throw ValidationError("config: [model] huckel has no U");
  b.finish();
  return m;
}

RunConfig parse_config_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  RunConfig c;
  c.base_dir = base_dir;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.value().is_object() && !kSections.count(it.key()))
      throw ValidationError("config: unknown section [" + it.key() + "]");

  Block top(j, "");
  c.task = top.str("task", "");
  if (c.task.empty()) throw ValidationError("config: 'task' is required");
  if (!kTasks.count(c.task))
    throw ValidationError("config: unknown task '" + c.task +
                          "' (expected solve, entangle, sector-table, histogram, profile, sweep, dos)");
  c.output_dir = top.str("output", "out");
  for (const auto& s : kSections) top.mark(s);
  top.finish();

  Block g(j.value("geometry", json()), "geometry");
  c.geometry_kind = g.str("kind", "chain");
  c.sites = static_cast<int>(g.integer("sites", 0));
  c.bond_length = g.num("bond_length", kDefaultBondLength);
  c.geometry_path = g.str("path", "");
  g.finish();
  if (c.geometry_kind == "file") {
    if (c.geometry_path.empty()) throw ValidationError("config: [geometry] kind = file needs 'path'");
    if (c.geometry_path.is_relative()) c.geometry_path = base_dir / c.geometry_path;
    if (!std::filesystem::exists(c.geometry_path))
      throw ValidationError("config: geometry file not found: " + c.geometry_path.string());
  } else if (c.geometry_kind == "chain") {
    if (c.task != "sweep" && c.sites < 2) throw ValidationError("config: [geometry] chain needs sites >= 2");
  } else if (c.geometry_kind != "icosahedron") {
    throw ValidationError("config: [geometry] kind must be chain, icosahedron or file");
  }
  if (!(c.bond_length > 0.0)) throw ValidationError("config: [geometry] bond_length must be positive (Å)");

  c.model = model_from_json(j.value("model", json::object()));

  Block s(j.value("sector", json()), "sector");
  if (s.has("n_electrons")) c.n_electrons = static_cast<int>(s.integer("n_electrons", 0));
  if (s.has("twice_ms")) c.twice_ms = static_cast<int>(s.integer("twice_ms", 0));
  s.finish();
  if (c.n_electrons && c.model.kind == ModelKind::heisenberg)
    throw ValidationError("config: [sector] n_electrons given for a heisenberg model");

  Block t(j.value("target", json()), "target");
  for (const auto& text : t.strs("labels")) c.targets.push_back(TargetState::parse(text));
  c.k = static_cast<int>(t.integer("k", 0));
  c.method = t.str("method", "auto");
  c.tol = t.num("tol", 1e-10);
  c.seed = static_cast<std::uint64_t>(t.integer("seed", 1));
  c.c2_convention = parse_c2_convention(t.str("c2_convention", "fermionic"));
  c.archive = t.str("archive", "");
  t.finish();
  if (c.k < 0) throw ValidationError("config: [target] k must be >= 0");
  if (c.method != "auto" && c.method != "dense" && c.method != "lanczos")
    throw ValidationError("config: [target] method must be auto, dense or lanczos");
  if (!(c.tol > 0.0)) throw ValidationError("config: [target] tol must be positive");
  if (!c.archive.empty()) {
    if (c.archive.is_relative()) c.archive = base_dir / c.archive;
    if (!std::filesystem::exists(c.archive)) throw ValidationError("config: archive not found: " + c.archive.string());
  }

  Block e(j.value("entangle", json()), "entangle");
  for (int site : e.ints("left")) {
    if (site < 1) throw ValidationError("config: [entangle] left sites are 1-based");
    c.left_sites.push_back(site - 1);
  }
  c.smoothing = Smoothing::parse(e.str("smoothing", "none"));
  c.bin_width = e.num("bin_width", 0.5);
  if (e.has("subspace")) c.subspace = e.str("subspace", "");
  e.finish();
  if (!(c.bin_width > 0.0)) throw ValidationError("config: [entangle] bin_width must be positive (eV)");

  Block w(j.value("sweep", json()), "sweep");
  c.sweep_kind = w.str("kind", "ground");
  c.lengths = w.ints("lengths");
  c.blocks = w.ints("blocks");
  w.finish();
  if (c.task == "sweep") {
    if (c.sweep_kind != "ground" && c.sweep_kind != "block" && c.sweep_kind != "excited")
      throw ValidationError("config: [sweep] kind must be ground, block or excited");
    if (c.sweep_kind != "block" && c.lengths.empty()) throw ValidationError("config: [sweep] needs 'lengths'");
    if (c.sweep_kind == "block" && c.sites < 2) throw ValidationError("config: block sweep needs [geometry] sites");
    if (c.geometry_kind != "chain") throw ValidationError("config: sweeps run on chains");
  }
  if (c.task == "dos" || c.task == "profile") {
    if (c.method == "lanczos") throw ValidationError("config: task " + c.task + " needs a full (dense) spectrum");
  }

  json echo = j;
  echo["model"] = model_to_json(c.model);
  c.echo = echo;
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  json j;
  if (first != std::string::npos && text[first] == '{') {
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ValidationError("config " + path.string() + ": " + e.what());
    }
  } else {
    j = parse_config_text(text);
  }
  return parse_config_json(j, path.parent_path());
}

Geometry build_geometry(const RunConfig& cfg) {
  if (cfg.geometry_kind == "chain") return build_chain(cfg.sites, cfg.bond_length);
  if (cfg.geometry_kind == "icosahedron") return build_icosahedron(cfg.bond_length);
  return load_geometry(cfg.geometry_path);
}

Sector resolve_sector(const RunConfig& cfg, const Geometry& g) {
  const LocalSpace space = cfg.model.local_space();
  Sector s;
  if (is_fermionic(space)) s.n_electrons = cfg.n_electrons.value_or(g.n_sites());
  int lowest = 0;
  if (is_fermionic(space))
    lowest = *s.n_electrons % 2;
  else
    lowest = (g.n_sites() * twice_site_spin(space)) % 2;
  s.twice_ms = cfg.twice_ms.value_or(lowest);
  validate_sector(g.n_sites(), space, s);
  return s;
}

Bipartition resolve_cut(const RunConfig& cfg, const Geometry& g) {
  if (cfg.left_sites.empty()) return half_cut(g, g.n_sites() / 2);
  Bipartition b;
  b.left = cfg.left_sites;
  for (int i = 0; i < g.n_sites(); ++i)
    if (std::find(b.left.begin(), b.left.end(), i) == b.left.end()) b.right.push_back(i);
  b.validate(g.n_sites());
  return b;
}

}  // namespace edent::cli
