#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wbl/analytic.hpp"
#include "wbl/optimizer.hpp"

namespace wbl {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip-safe text for a double: 17 significant digits.
std::string format_number(double x);

/// RFC-4180 table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const;
  void write(const std::filesystem::path& path) const;
};

struct SweepPlan {
  std::vector<double> R_list{1.0};
  std::vector<double> h_list;
  MeshRecipe recipe{48, 16, 0.0};
  FlowConfig flow;
  int jobs = 1;
  // When set, each row writes its final mesh to row_dir/R_<R>_h_<h>/final.obj.
  std::filesystem::path row_dir;
};

struct SweepRow {
  double R = 0.0;
  double h = 0.0;
  std::string initial_surface;  // "catenoid" or "truncated_sphere"
  double initial_willmore = 0.0;
  double final_willmore = 0.0;
  double sphere_bound = 0.0;    // closed-form truncated-sphere energy
  bool below_4pi = false;
  double sphere_fit_rms = 0.0;  // of the result rescaled to unit diameter
  double fitted_diameter = 0.0;
  int iterations = 0;
  std::string termination;
  std::string error;            // empty on success
  double runtime_seconds = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // R-major, then h, whatever the completion order

  CsvTable table() const;         // deterministic columns only
  CsvTable timing_table() const;  // runtimes
};

/// One row: catenoid start when h <= h0(R), truncated sphere otherwise,
/// minimized under the Navier condition. Errors are caught into the row.
SweepRow run_sweep_row(double R, double h, const MeshRecipe& recipe, const FlowConfig& flow,
                       const std::filesystem::path& row_dir = {});
/// Rows run concurrently on up to plan.jobs threads.
SweepResult sweep(const SweepPlan& plan);

struct RunOptions {
  std::string subcommand;  // may be empty when rerunning from a manifest
  std::optional<std::filesystem::path> config;
  std::vector<std::string> overrides;  // key=value applied to the subcommand section
  std::filesystem::path out_dir = ".";
  std::optional<unsigned long long> seed;
  std::optional<int> jobs;
  std::optional<std::filesystem::path> manifest;
};

const std::vector<std::string>& subcommand_names();

/// Executes one subcommand, writes its artifacts and manifest.json under
/// out_dir, and returns the process exit status (0 ok, 2 config, 3 numeric,
/// 4 I/O). Messages go to `out`, errors to `err`.
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace wbl
