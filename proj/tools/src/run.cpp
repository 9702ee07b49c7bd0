#include "edent/cli/run.hpp"

#include <Eigen/Core>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "edent/errors.hpp"

namespace edent::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kAutoDenseDim = 2000;

json sector_json(const Sector& s) {
  json j;
  if (s.n_electrons) j["n_electrons"] = *s.n_electrons;
  j["twice_ms"] = s.twice_ms;
  return j;
}

Sector sector_from_json(const json& j) {
  Sector s;
  if (j.contains("n_electrons")) s.n_electrons = j.at("n_electrons").get<int>();
  s.twice_ms = j.at("twice_ms").get<int>();
  return s;
}

LanczosOptions lanczos_options(const RunConfig& cfg) {
  LanczosOptions o;
  o.tol = cfg.tol;
  o.seed = cfg.seed;
  return o;
}

std::shared_ptr<const BasisTable> make_basis(const Geometry& g, const ModelSpec& m, const Sector& s) {
  auto b = std::make_shared<const BasisTable>(enumerate_sector(g, m.local_space(), s));
  if (b->empty()) throw ValidationError("sector is empty for this geometry");
  return b;
}

StateGroup group_from_archive(const RunConfig& cfg) {
  Archive a = read_archive(cfg.archive);
  const auto& m = a.meta;
  Geometry g = parse_geometry(m.at("geometry").at("text").get<std::string>(),
                              m.at("geometry").at("name").get<std::string>());
  ModelSpec model = model_from_json(m.at("model"));
  auto basis = make_basis(g, model, sector_from_json(m.at("sector")));
  if (static_cast<std::size_t>(a.set.vectors.rows()) != basis->size())
    throw ValidationError("archive dimension does not match its sector");
  StateGroup grp{g, basis, std::move(a.set), {}, {}, m.value("method", "archive")};
  grp.names = m.value("names", std::vector<std::string>{});
  grp.labels = m.value("labels", std::vector<std::string>{});
  grp.names.resize(grp.set.size());
  grp.labels.resize(grp.set.size());
  return grp;
}

std::string write_csv_rows(const std::string& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out = header + "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  }
  return out;
}

std::string file_stem(const StateGroup& g, std::size_t i) {
  std::string s = g.names[i];
  for (auto& c : s)
    if (c == ':' || c == '+' || c == '-') c = c == ':' ? '_' : (c == '+' ? 'p' : 'm');
  return "state_" + s;
}

Archive make_archive(const RunConfig& cfg, const StateGroup& g) {
  Archive a;
  a.meta["model"] = model_to_json(cfg.model);
  a.meta["geometry"] = {{"name", g.geometry.name()}, {"text", serialize_geometry(g.geometry)}};
  a.meta["sector"] = sector_json(g.basis->sector());
  a.meta["names"] = g.names;
  a.meta["labels"] = g.labels;
  a.meta["tolerances"] = {{"residual", cfg.tol}, {"orthonormality", 1e-10}};
  a.meta["seed"] = cfg.seed;
  a.meta["method"] = g.method;
  a.meta["c2_convention"] = to_string(cfg.c2_convention);
  a.set = g.set;
  return a;
}

std::string sector_rows_csv(const std::vector<SectorEntropy>& rows) {
  std::vector<std::vector<std::string>> r;
  for (const auto& s : rows)
    r.push_back({std::to_string(s.sector.twice_ms_left), std::to_string(s.sector.n_left), format_double(s.partial_entropy)});
  return write_csv_rows("two_ms_left,n_left,partial_entropy", r);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string profile_csv(const Profile& p) {
  std::string out = "# metadata: " + p.metadata + "\n";
  const bool err = !p.err.empty();
  out += err ? "x,y,stderr\n" : "x,y\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += format_double(p.x[i]) + "," + format_double(p.y[i]);
    if (err) out += "," + format_double(p.err[i]);
    out += "\n";
  }
  return out;
}

std::string label_text(const Vector& v, const SymmetryOps& ops) {
  const auto spin = total_spin(v, ops.spin());
  std::string s = spin.mixed ? "?" : std::to_string(spin.twice_s + 1);
  if (!ops.has_c2()) return s;
  const auto l = ops.label(v);
  s += "_";
  s += l.c2_parity > 0 ? "A" : (l.c2_parity < 0 ? "B" : "?");
  if (ops.has_eh()) {
    if (l.c2_parity != 0) s += l.c2_parity > 0 ? "g" : "u";
    s += l.eh_parity > 0 ? "+" : (l.eh_parity < 0 ? "-" : "?");
  }
  return s;
}

std::vector<StateGroup> solve_states(const RunConfig& cfg) {
  if (!cfg.archive.empty()) return {group_from_archive(cfg)};
  const Geometry g = build_geometry(cfg);
  const auto opts = lanczos_options(cfg);
  std::vector<StateGroup> out;

  if (cfg.subspace) {
    const auto label = SymmetryLabel::parse(*cfg.subspace);
    Sector s = resolve_sector(cfg, g);
    s.twice_ms = label.twice_s;
    auto basis = make_basis(g, cfg.model, s);
    Hamiltonian h(g, cfg.model, basis);
    SymmetryOps ops(g, basis, cfg.c2_convention);
    StateGroup grp{g, basis, subspace_spectrum(h, ops, label.c2_parity, label.eh_parity, label.twice_s), {}, {},
                   "subspace " + label.to_string()};
    for (std::size_t i = 0; i < grp.set.size(); ++i) {
      grp.names.push_back(std::to_string(i + 1));
      grp.labels.push_back(label.to_string());
    }
    out.push_back(std::move(grp));
    return out;
  }

  if (!cfg.targets.empty()) {
    // One group per sector (2M_S = 2S of the label).
    std::map<int, std::size_t> by_ms;
    for (const auto& t : cfg.targets) {
      Sector s = resolve_sector(cfg, g);
      s.twice_ms = t.label.twice_s;
      auto it = by_ms.find(s.twice_ms);
      if (it == by_ms.end()) {
        auto basis = make_basis(g, cfg.model, s);
        StateGroup grp{g, basis, {}, {}, {}, "lanczos+label"};
        grp.set.vectors.resize(static_cast<Eigen::Index>(basis->size()), 0);
        it = by_ms.emplace(s.twice_ms, out.size()).first;
        out.push_back(std::move(grp));
      }
      auto& grp = out[it->second];
      Hamiltonian h(g, cfg.model, grp.basis);
      SymmetryOps ops(g, grp.basis, cfg.c2_convention);
      const auto r = lowest_in_label(h, ops, t.label, t.root, opts);
      const auto n = grp.set.values.size();
      grp.set.values.conservativeResize(n + 1);
      grp.set.values[n] = r.values[t.root - 1];
      grp.set.vectors.conservativeResize(Eigen::NoChange, n + 1);
      grp.set.vectors.col(n) = r.vectors.col(t.root - 1);
      grp.set.residuals.push_back(r.residuals[static_cast<std::size_t>(t.root - 1)]);
      grp.names.push_back(t.to_string());
      grp.labels.push_back(t.label.to_string());
    }
    return out;
  }

  const Sector s = resolve_sector(cfg, g);
  auto basis = make_basis(g, cfg.model, s);
  Hamiltonian h(g, cfg.model, basis);
  SymmetryOps ops(g, basis, cfg.c2_convention);
  const bool dense = cfg.method == "dense" || (cfg.method == "auto" && (cfg.k == 0 ? h.dim() <= kAutoDenseDim : h.dim() <= 400));
  StateGroup grp{g, basis, {}, {}, {}, dense ? "dense" : "lanczos"};
  if (dense) {
    grp.set = dense_spectrum(h);
    if (cfg.k > 0 && static_cast<std::size_t>(cfg.k) < grp.set.size()) {
      grp.set.values.conservativeResize(cfg.k);
      grp.set.vectors.conservativeResize(Eigen::NoChange, cfg.k);
      grp.set.residuals.resize(static_cast<std::size_t>(cfg.k));
    }
  } else {
    grp.set = lanczos_lowest(h, std::max(cfg.k, 1), opts);
  }
  label_eigenset(grp.set, ops);
  for (std::size_t i = 0; i < grp.set.size(); ++i) {
    grp.names.push_back(std::to_string(i + 1));
    grp.labels.push_back(label_text(grp.set.vectors.col(static_cast<Eigen::Index>(i)), ops));
  }
  out.push_back(std::move(grp));
  return out;
}

OutputSet::OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

void OutputSet::write(const std::string& name, const std::string& content) {
  std::ofstream f(dir_ / (name + ".partial"), std::ios::binary);
  if (!f) throw ValidationError("cannot write " + (dir_ / name).string());
  f << content;
  files_.push_back(name);
}

void OutputSet::write_archive(const std::string& name, const Archive& a) { write(name, encode_archive(a)); }

void OutputSet::commit() {
  for (const auto& f : files_) fs::rename(dir_ / (f + ".partial"), dir_ / f);
  committed_ = true;
}

std::vector<std::string> OutputSet::listed() const {
  std::vector<std::string> out;
  for (const auto& f : files_) out.push_back(committed_ ? f : f + ".partial");
  return out;
}

void run_config(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::path dir = cfg.output_dir.is_relative() ? cfg.base_dir / cfg.output_dir : cfg.output_dir;
  OutputSet out(dir);
  json manifest;
  manifest["config"] = cfg.echo;
  manifest["version"] = "0.3.0";
  manifest["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION);
  manifest["seed"] = cfg.seed;

  auto finish = [&](const std::string& status, const std::string& error) {
    manifest["status"] = status;
    if (!error.empty()) manifest["error"] = error;
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["files"] = out.listed();
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
  };

  try {
    if (cfg.task == "sweep") {
      const auto opts = lanczos_options(cfg);
      if (cfg.sweep_kind == "ground") {
        out.write("sweep_ground.csv", profile_csv(sweep_ground_state(cfg.model, cfg.lengths, cfg.bond_length, opts)));
      } else if (cfg.sweep_kind == "block") {
        out.write("sweep_block.csv",
                  profile_csv(sweep_block_size(cfg.model, cfg.sites, cfg.blocks, cfg.bond_length, opts)));
      } else {
        auto targets = cfg.targets.empty() ? standard_excited_targets() : cfg.targets;
        const auto series =
            excited_state_series(cfg.model, cfg.lengths, targets, cfg.bond_length, opts, cfg.c2_convention);
        for (std::size_t i = 0; i < series.size(); ++i) {
          std::string name = targets[i].to_string();
          for (auto& c : name)
            if (c == ':' || c == '+' || c == '-') c = c == ':' ? '_' : (c == '+' ? 'p' : 'm');
          out.write("sweep_excited_" + name + ".csv", profile_csv(series[i]));
        }
      }
    } else {
      const auto groups = solve_states(cfg);
      std::vector<std::vector<std::string>> energy_rows;
      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& g = groups[gi];
        for (std::size_t i = 0; i < g.set.size(); ++i)
          energy_rows.push_back({g.names[i], g.labels[i], std::to_string(g.basis->sector().twice_ms),
                                 format_double(g.set.values[static_cast<Eigen::Index>(i)]),
                                 format_double(g.set.residuals[i])});
      }
      out.write("energies.csv", write_csv_rows("state,label,two_ms,energy,residual", energy_rows));

      if (cfg.task == "solve") {
        for (const auto& g : groups) {
          const std::string name = groups.size() == 1 ? "eigenpairs.edar"
                                                      : "eigenpairs_2ms" + std::to_string(g.basis->sector().twice_ms) + ".edar";
          out.write_archive(name, make_archive(cfg, g));
        }
      } else if (cfg.task == "entangle" || cfg.task == "sector-table" || cfg.task == "histogram") {
        std::vector<std::vector<std::string>> summary;
        for (const auto& g : groups) {
          const auto cut = resolve_cut(cfg, g.geometry);
          const auto idx = bipartite_factorize(*g.basis, cut);
          for (std::size_t i = 0; i < g.set.size(); ++i) {
            const auto spec = schmidt_spectrum(g.set.vectors.col(static_cast<Eigen::Index>(i)), *g.basis, idx);
            const auto stem = file_stem(g, i);
            summary.push_back({g.names[i], g.labels[i], format_double(g.set.values[static_cast<Eigen::Index>(i)]),
                               format_double(spec.entropy)});
            if (cfg.task == "entangle") {
              std::vector<std::vector<std::string>> rows;
              for (const auto& sec : spec.sectors)
                for (double w : sec.weights)
                  rows.push_back({std::to_string(sec.sector.twice_ms_left), std::to_string(sec.sector.n_left),
                                  format_double(w)});
              out.write(stem + "_rdm.csv", write_csv_rows("two_ms_left,n_left,w", rows));
              std::vector<SectorEntropy> asc;
              for (const auto& sec : spec.sectors) asc.push_back({sec.sector, sec.partial_entropy});
              out.write(stem + "_sectors.csv", sector_rows_csv(asc));
            } else if (cfg.task == "sector-table") {
              const auto table = sector_table(spec);
              out.write(stem + "_sector_table.csv", sector_rows_csv(table));
              log << g.names[i] << " (" << g.labels[i] << ")  S = " << format_double(spec.entropy) << " bits\n";
              for (const auto& r : table) {
                char line[96];
                std::snprintf(line, sizeof line, "  M_s %5.1f  N_e %3d  %.4g\n", r.sector.twice_ms_left / 2.0,
                              r.sector.n_left, r.partial_entropy);
                log << line;
              }
            } else {
              const auto hist = decade_histogram(spec);
              std::vector<std::vector<std::string>> rows;
              for (std::size_t p = 0; p < hist.size(); ++p) rows.push_back({std::to_string(p), std::to_string(hist[p])});
              out.write(stem + "_histogram.csv", write_csv_rows("p,count", rows));
            }
          }
        }
        out.write("entropies.csv", write_csv_rows("state,label,energy,entropy", summary));
      } else if (cfg.task == "profile" || cfg.task == "dos") {
        if (groups.size() != 1) throw ValidationError("task " + cfg.task + " needs a single sector");
        const auto& g = groups.front();
        const auto cut = resolve_cut(cfg, g.geometry);
        std::vector<double> e(g.set.values.data(), g.set.values.data() + g.set.values.size());
        const auto s = state_entropies(g.set, *g.basis, cut);
        if (cfg.task == "profile") {
          std::string warning;
          auto p = smooth_profile(e, s, cfg.smoothing, &warning);
          p.metadata = describe(cfg.model) + ", " + g.method + ", " + p.metadata;
          if (!warning.empty()) log << "warning: " << warning;
          out.write("profile.csv", profile_csv(p));
        } else {
          auto dos = dos_histogram(e, cfg.bin_width);
          dos.metadata = describe(cfg.model) + ", " + g.method + ", " + dos.metadata;
          out.write("dos.csv", profile_csv(dos));
          auto cmp = entropy_vs_logdos(e, s, cfg.bin_width);
          cmp.pairs.metadata += ", spearman=" + (cmp.correlation ? format_double(*cmp.correlation) : "undefined");
          out.write("entropy_vs_logdos.csv", profile_csv(cmp.pairs));
          log << "spearman(entropy, log2 DoS) = "
              << (cmp.correlation ? format_double(*cmp.correlation) : "undefined (fewer than 4 bins)") << "\n";
        }
      }
    }
    out.commit();
  } catch (const std::exception& e) {
    finish("failed", e.what());
    throw;
  }
  finish("ok", "");
  log << "wrote " << out.files().size() << " files to " << dir.string() << "\n";
}

bool verify_archive(const fs::path& path, std::optional<double> tol, std::ostream& out) {
  auto line = [&](bool ok, const std::string& name, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    return ok;
  };
  Archive a;
  try {
    a = read_archive(path);
  } catch (const ValidationError& e) {
    line(false, "payload", e.what());
    out << "SKIP residual, orthonormality, labels: payload unreadable\n";
    return false;
  }
  line(true, "payload", "checksum and offsets match (" + std::to_string(a.set.size()) + " pairs)");

  const auto& m = a.meta;
  const Geometry g = parse_geometry(m.at("geometry").at("text").get<std::string>(),
                                    m.at("geometry").at("name").get<std::string>());
  const ModelSpec model = model_from_json(m.at("model"));
  const auto basis = make_basis(g, model, sector_from_json(m.at("sector")));
  if (static_cast<std::size_t>(a.set.vectors.rows()) != basis->size())
    return line(false, "dimension", "archive rows do not match the sector dimension");
  const Hamiltonian h(g, model, basis);

  bool ok = true;
  const double rtol = tol.value_or(m.at("tolerances").at("residual").get<double>());
  const auto res = residual_norms(h, a.set);
  double worst = 0.0;
  for (double r : res) worst = std::max(worst, r);
  ok &= line(worst <= rtol, "residual", "max ||Hv - Ev|| = " + format_double(worst) + " vs tol " + format_double(rtol));

  const double otol = m.at("tolerances").value("orthonormality", 1e-10);
  const double oerr = orthonormality_error(a.set);
  ok &= line(oerr <= otol, "orthonormality", "max |<vi|vj> - dij| = " + format_double(oerr) + " vs " + format_double(otol));

  const auto conv = parse_c2_convention(m.value("c2_convention", "fermionic"));
  SymmetryOps ops(g, basis, conv);
  const auto labels = m.value("labels", std::vector<std::string>{});
  int bad = 0;
  std::string first_bad;
  for (std::size_t i = 0; i < labels.size() && i < a.set.size(); ++i) {
    if (labels[i].empty()) continue;
    const std::string now = label_text(a.set.vectors.col(static_cast<Eigen::Index>(i)), ops);
    if (now != labels[i] && labels[i].find('?') == std::string::npos) {
      if (!bad) first_bad = "state " + std::to_string(i + 1) + " stored " + labels[i] + ", recomputed " + now;
      ++bad;
    }
  }
  ok &= line(bad == 0, "labels", bad == 0 ? std::to_string(labels.size()) + " labels reproduced" : first_bad);
  return ok;
}

std::string multiplet_table(int n_sites, LocalSpace space) {
  std::ostringstream os;
  os << "S,count\n";
  for (const auto& c : multiplet_counts(n_sites, space)) {
    if (c.twice_s % 2 == 0)
      os << c.twice_s / 2;
    else
      os << c.twice_s << "/2";
    os << "," << c.count << "\n";
  }
  return os.str();
}

}  // namespace edent::cli
