#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "edent/cli/archive.hpp"
#include "edent/cli/config.hpp"

namespace edent::cli {

/// Eigenpairs of one sector with per-state names and labels.
struct StateGroup {
  Geometry geometry;
  std::shared_ptr<const BasisTable> basis;
  EigenSet set;
  std::vector<std::string> names;   ///< "1:1_Ag+" for targets, else the 1-based state index
  std::vector<std::string> labels;  ///< symmetry label per state ("" when unavailable)
  std::string method;
};

/// Solves (or loads from the configured archive) the states a task needs.
std::vector<StateGroup> solve_states(const RunConfig& cfg);

/// Label text of a state: multiplicity plus whatever parities the sector
/// supports ("1_Ag+", "3_B", "2"), "?" for an undetermined parity.
std::string label_text(const Vector& v, const SymmetryOps& ops);

std::string format_double(double v);  ///< 17 significant digits
std::string profile_csv(const Profile& p);

/// Writes files as <name>.partial and renames them on commit().
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);
  void write(const std::string& name, const std::string& content);
  void write_archive(const std::string& name, const Archive& a);
  void commit();
  const std::vector<std::string>& files() const noexcept { return files_; }
  std::vector<std::string> listed() const;  ///< names as they are on disk
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
  bool committed_ = false;
};

/// Executes a run: writes task outputs and manifest.json into the output
/// directory. Exceptions propagate after the manifest records the failure.
void run_config(const RunConfig& cfg, std::ostream& log);

/// Re-checks an archive and prints one PASS/FAIL line per check. Returns
/// true when every check passes.
bool verify_archive(const std::filesystem::path& path, std::optional<double> tol, std::ostream& out);

std::string multiplet_table(int n_sites, LocalSpace space);

}  // namespace edent::cli
