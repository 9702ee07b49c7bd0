#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "edent/cli/run.hpp"
#include "edent/errors.hpp"

namespace {

// EDENT_WORKERS caps the threads used by matrix-vector products.
void apply_worker_count() {
  const char* env = std::getenv("EDENT_WORKERS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw edent::ValidationError("EDENT_WORKERS must be a positive integer");
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(n));
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edent: exact diagonalization and bipartite entanglement for lattice models"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Execute a run configuration");
  std::string config_path;
  run->add_option("config", config_path, "Config file (key = value sections, or JSON)")->required();

  auto* verify = app.add_subcommand("verify", "Re-check an eigenpair archive");
  std::string archive_path;
  std::optional<double> tol;
  verify->add_option("archive", archive_path)->required();
  verify->add_option("--tol", tol, "Residual tolerance (default: the archive's)");

  auto* geometry = app.add_subcommand("geometry", "Geometry utilities");
  geometry->require_subcommand(1);
  auto* emit = geometry->add_subcommand("emit", "Print a geometry in the text format");
  std::string kind;
  int sites = 10;
  double bond = edent::kDefaultBondLength;
  emit->add_option("kind", kind, "chain or icosahedron")->required()->check(CLI::IsMember({"chain", "icosahedron"}));
  emit->add_option("--sites", sites, "Chain length");
  emit->add_option("--bond-length", bond, "Bond length in Å");

  auto* tables = app.add_subcommand("tables", "Tabulated quantities");
  tables->require_subcommand(1);
  auto* multiplets = tables->add_subcommand("multiplets", "Spin multiplet counts (half filling for electrons)");
  int n_sites = 0;
  std::string space = "electron";
  multiplets->add_option("n", n_sites)->required();
  multiplets->add_option("--space", space, "electron, spin_half or spin_one")
      ->check(CLI::IsMember({"electron", "spin_half", "spin_one"}));

  CLI11_PARSE(app, argc, argv);

  try {
    apply_worker_count();
    if (*run) {
      edent::cli::run_config(edent::cli::load_config(config_path), std::cout);
    } else if (*verify) {
      return edent::cli::verify_archive(archive_path, tol, std::cout) ? 0 : 1;
    } else if (*emit) {
      const auto g = kind == "chain" ? edent::build_chain(sites, bond) : edent::build_icosahedron(bond);
      std::cout << edent::serialize_geometry(g);
    } else if (*multiplets) {
      const auto ls = space == "electron"    ? edent::LocalSpace::electron
                      : space == "spin_half" ? edent::LocalSpace::spin_half
                                             : edent::LocalSpace::spin_one;
      std::cout << edent::cli::multiplet_table(n_sites, ls);
    }
  } catch (const edent::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const edent::ConvergenceError& e) {
    std::cerr << "not converged: " << e.what() << " (best residual " << e.best_residual() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
