#include "wbl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include <json.hpp>

#include "wbl/config.hpp"
#include "wbl/curvature.hpp"
#include "wbl/metrics.hpp"
#include "wbl/monotonicity.hpp"
#include "wbl/obj_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace wbl {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

constexpr double kPi = std::numbers::pi;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + p.string());
}

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

}  // namespace

std::string CsvTable::str() const {
  std::string s;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += csv_field(cells[i]);
    }
    s += "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return s;
}

void CsvTable::write(const fs::path& path) const { write_text(path, str()); }

// ---------------------------------------------------------------- sweep

SweepRow run_sweep_row(double R, double h, const MeshRecipe& recipe, const FlowConfig& flow,
                       const fs::path& row_dir) {
  SweepRow row;
  row.R = R;
  row.h = h;
  const auto start = std::chrono::steady_clock::now();
  try {
    BoundaryConfig{R, h}.validate();
    row.sphere_bound = truncated_sphere_energy(R, h);
    const bool plateau = h <= catenoid_critical_height(R);
    row.initial_surface = plateau ? "catenoid" : "truncated_sphere";
    const TriMesh initial = plateau ? catenoid_mesh(R, h, recipe) : truncated_sphere_mesh(R, h, recipe);
    row.initial_willmore = willmore_energy(initial);
    const FlowResult res = minimize(initial, BoundaryCondition::navier(initial), flow);
    row.final_willmore = res.trace.records.back().willmore;
    row.below_4pi = row.final_willmore < 4.0 * kPi;
    row.iterations = static_cast<int>(res.trace.records.size()) - 1;
    row.termination = to_string(res.trace.termination);
    const RescaleReport rep = rescale_diagnostics(res.mesh, RescaleMode::ByDiameter);
    row.sphere_fit_rms = rep.fit.rms;
    row.fitted_diameter = rep.fitted_diameter;
    if (!row_dir.empty()) {
      const fs::path dir = row_dir / ("R_" + format_number(R) + "_h_" + format_number(h));
      fs::create_directories(dir);
      write_obj(dir / "final.obj", res.mesh);
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

SweepResult sweep(const SweepPlan& plan) {
  if (plan.R_list.empty() || plan.h_list.empty()) {
    throw Error(ErrorCode::InvalidConfig, "sweep needs non-empty R and h lists");
  }
  plan.flow.validate();
  std::vector<std::pair<double, double>> grid;
  for (double R : plan.R_list) {
    for (double h : plan.h_list) grid.emplace_back(R, h);
  }
  SweepResult result;
  result.rows.resize(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      result.rows[k] = run_sweep_row(grid[k].first, grid[k].second, plan.recipe, plan.flow, plan.row_dir);
    }
  };
  const int jobs = std::max(1, std::min<int>(plan.jobs, static_cast<int>(grid.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

CsvTable SweepResult::table() const {
  CsvTable t;
  t.header = {"R", "h", "initial_surface", "initial_W", "final_W", "truncated_sphere_bound",
              "below_4pi", "sphere_fit_rms", "fitted_diameter", "iterations", "termination", "error"};
  for (const auto& r : rows) {
    t.rows.push_back({format_number(r.R), format_number(r.h), r.initial_surface,
                      format_number(r.initial_willmore), format_number(r.final_willmore),
                      format_number(r.sphere_bound), r.below_4pi ? "1" : "0",
                      format_number(r.sphere_fit_rms), format_number(r.fitted_diameter),
                      std::to_string(r.iterations), r.termination, r.error});
  }
  return t;
}

CsvTable SweepResult::timing_table() const {
  CsvTable t;
  t.header = {"R", "h", "runtime_seconds"};
  for (const auto& r : rows) {
    t.rows.push_back({format_number(r.R), format_number(r.h), format_number(r.runtime_seconds)});
  }
  return t;
}

// ---------------------------------------------------------------- subcommands

namespace {

struct Context {
  std::string name;
  ConfigDocument config;
  fs::path out_dir;
  fs::path base_dir;  // relative input paths resolve against this
  unsigned long long seed = 0;
  int jobs = 1;
  std::ostream& out;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;

  double num(const std::string& key, double fallback) const { return config.get_double(name, key, fallback); }
  int integer(const std::string& key, int fallback) const { return config.get_int(name, key, fallback); }
  std::string str(const std::string& key, const std::string& fallback) const {
    return config.get_string(name, key, fallback);
  }
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const {
    return config.get_list(name, key, fallback);
  }
  bool flag(const std::string& key, bool fallback) const { return config.get_bool(name, key, fallback); }

  fs::path input(const std::string& key) {
    if (!config.has(name, key)) throw Error(ErrorCode::ConfigParse, "[" + name + "] requires '" + key + "'");
    fs::path p = config.get_string(name, key, "");
    if (p.empty()) throw Error(ErrorCode::ConfigParse, "[" + name + "] '" + key + "' is empty");
    if (p.is_relative()) p = base_dir / p;
    p = fs::weakly_canonical(p);
    config.set(name, key, p.string());  // resolved path goes into the manifest
    inputs.push_back(p);
    return p;
  }
  TriMesh mesh(const std::string& key) { return read_obj(input(key)); }
  fs::path output(const std::string& file) {
    const fs::path p = out_dir / file;
    outputs.push_back(p);
    return p;
  }
};

MeshRecipe recipe_from(const Context& c, MeshRecipe fallback = {}) {
  MeshRecipe r;
  r.n_around = c.integer("n_around", fallback.n_around);
  r.n_axial = c.integer("n_axial", fallback.n_axial);
  r.target_edge = c.num("target_edge", fallback.target_edge);
  r.validate();
  return r;
}

FlowConfig flow_from(const Context& c, FlowConfig f = {}) {
  f.max_iters = c.integer("max_iters", f.max_iters);
  f.initial_step = c.num("initial_step", f.initial_step);
  f.max_move = c.num("max_move", f.max_move);
  f.backtrack = c.num("backtrack", f.backtrack);
  f.armijo = c.num("armijo", f.armijo);
  f.grad_tol = c.num("grad_tol", f.grad_tol);
  f.eps_flow_factor = c.num("eps_flow_factor", f.eps_flow_factor);
  f.min_move = c.num("min_move", f.min_move);
  f.lbfgs_history = c.integer("lbfgs_history", f.lbfgs_history);
  f.validate();
  return f;
}

const std::set<std::string> kFlowKeys = {"max_iters", "initial_step", "max_move",        "backtrack",
                                         "armijo",    "grad_tol",     "eps_flow_factor", "min_move",
                                         "lbfgs_history"};
const std::set<std::string> kRecipeKeys = {"n_around", "n_axial", "target_edge"};

std::set<std::string> keys(std::initializer_list<std::string> own,
                           std::initializer_list<const std::set<std::string>*> extra = {}) {
  std::set<std::string> out(own);
  for (const auto* s : extra) out.insert(s->begin(), s->end());
  return out;
}

void cmd_generate(Context& c) {
  const std::string surface = c.str("surface", "truncated_sphere");
  const double R = c.num("R", 1.0), h = c.num("h", 1.0);
  const MeshRecipe recipe = recipe_from(c);
  TriMesh mesh;
  bool on_gamma = true;
  if (surface == "truncated_sphere") {
    mesh = truncated_sphere_mesh(R, h, recipe);
  } else if (surface == "catenoid") {
    mesh = catenoid_mesh(R, h, recipe);
  } else if (surface == "cylinder") {
    mesh = cylinder_mesh(R, h, recipe);
  } else if (surface == "icosphere") {
    mesh = icosphere(Vec3::Zero(), c.num("radius", 1.0), c.integer("subdivisions", 3));
    on_gamma = false;
  } else if (surface == "disk") {
    mesh = flat_disk(c.num("radius", 1.0), recipe);
    on_gamma = false;
  } else if (surface == "cap") {
    mesh = spherical_cap(c.num("radius", 1.0), c.num("polar_angle", kPi / 2), recipe);
    on_gamma = false;
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown surface '" + surface + "'");
  }
  write_obj(c.output(c.str("output", surface + ".obj")), mesh);
  const int samples = c.integer("boundary_samples", 0);
  if (samples > 0) {
    if (!on_gamma) throw Error(ErrorCode::InvalidConfig, "boundary_samples only applies to the two-circle surfaces");
    const CircleSamples g = gamma_Rh_samples(R, h, samples);
    CsvTable t;
    t.header = {"curve", "x", "y", "z"};
    for (const auto& p : g.upper) t.rows.push_back({"upper", format_number(p.x()), format_number(p.y()), format_number(p.z())});
    for (const auto& p : g.lower) t.rows.push_back({"lower", format_number(p.x()), format_number(p.y()), format_number(p.z())});
    t.write(c.output("gamma.csv"));
  }
  c.out << surface << ": " << mesh.num_vertices() << " vertices, " << mesh.num_faces() << " faces, "
        << mesh.loops().size() << " boundary loops\n";
}

void cmd_energy(Context& c) {
  const TriMesh mesh = c.mesh("mesh");
  double length = 0.0;
  for (const auto& loop : mesh.loops()) length += loop_length(mesh, loop);
  const double W = willmore_energy(mesh);
  CsvTable t;
  t.header = {"vertices", "faces", "boundary_loops", "euler_characteristic", "area", "boundary_length",
              "willmore", "willmore_over_4pi", "second_form_norm_sq", "gauss_bonnet_residual"};
  t.rows.push_back({std::to_string(mesh.num_vertices()), std::to_string(mesh.num_faces()),
                    std::to_string(mesh.loops().size()), std::to_string(mesh.euler_characteristic()),
                    format_number(mesh.total_area()), format_number(length), format_number(W),
                    format_number(W / (4.0 * kPi)), format_number(second_form_norm_sq(mesh)),
                    format_number(gauss_bonnet_residual(mesh))});
  t.write(c.output("energy.csv"));
  c.out << "W = " << format_number(W) << " (W / 4pi = " << format_number(W / (4.0 * kPi)) << ")\n";
}

std::vector<double> radius_schedule(const Context& c) {
  if (c.config.has(c.name, "radii")) return c.list("radii", {});
  const double lo = c.num("rho_min", 0.05), hi = c.num("rho_max", 4.0);
  const int count = c.integer("count", 12);
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw Error(ErrorCode::InvalidConfig, "need 0 < rho_min < rho_max and count >= 2");
  }
  std::vector<double> r(count);
  for (int k = 0; k < count; ++k) r[k] = lo * std::pow(hi / lo, double(k) / (count - 1));
  return r;
}

CsvTable profile_table(const MonotoneProfile& prof) {
  CsvTable t;
  t.header = {"rho", "area_ratio", "energy_term", "curvature_remainder", "boundary_remainder", "A",
              "violation_flag"};
  std::vector<char> flag(prof.samples.size(), 0);
  for (const auto& v : prof.violations) flag[v.second] = 1;
  for (std::size_t k = 0; k < prof.samples.size(); ++k) {
    const auto& s = prof.samples[k];
    t.rows.push_back({format_number(s.rho), format_number(s.area_ratio), format_number(s.energy_term),
                      format_number(s.curvature_remainder), format_number(s.boundary_remainder),
                      format_number(s.total), flag[k] ? "1" : "0"});
  }
  return t;
}

void cmd_monotonicity(Context& c) {
  const TriMesh mesh = c.mesh("mesh");
  MonotoneOptions opts;
  opts.tau_rel = c.num("tau", opts.tau_rel);
  const MonotoneEvaluator eval(mesh, opts);
  const std::vector<double> radii = radius_schedule(c);
  const int random_points = c.integer("random_points", 0);
  if (random_points > 0) {
    std::vector<int> interior;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (!mesh.is_boundary_vertex(v)) interior.push_back(v);
    }
    if (interior.empty()) throw Error(ErrorCode::InvalidInput, "mesh has no interior vertices");
    std::mt19937_64 rng(c.seed);
    CsvTable points;
    points.header = {"point", "vertex", "x", "y", "z", "violations"};
    int total = 0;
    for (int k = 0; k < random_points; ++k) {
      const int v = interior[std::uniform_int_distribution<std::size_t>(0, interior.size() - 1)(rng)];
      const Vec3 p0 = mesh.position(v);
      const MonotoneProfile prof = eval.profile(p0, radii);
      profile_table(prof).write(c.output("monotonicity_" + std::to_string(k) + ".csv"));
      points.rows.push_back({std::to_string(k), std::to_string(v), format_number(p0.x()), format_number(p0.y()),
                             format_number(p0.z()), std::to_string(prof.violations.size())});
      total += static_cast<int>(prof.violations.size());
    }
    points.write(c.output("points.csv"));
    c.out << random_points << " base points, " << total << " violations\n";
    return;
  }
  const std::vector<double> p = c.list("p0", {0.0, 0.0, 0.0});
  if (p.size() != 3) throw Error(ErrorCode::InvalidConfig, "p0 needs three coordinates");
  Vec3 p0(p[0], p[1], p[2]);
  if (c.flag("snap", false)) p0 = snap_to_vertex(mesh, p0);
  const MonotoneProfile prof = eval.profile(p0, radii);
  profile_table(prof).write(c.output("monotonicity.csv"));
  c.out << radii.size() << " radii, " << prof.violations.size() << " violations (tolerance "
        << format_number(prof.tolerance) << ")\n";
}

void cmd_minimize(Context& c) {
  const TriMesh mesh = c.mesh("mesh");
  const FlowConfig flow = flow_from(c);
  const std::string mode = c.str("mode", "navier");
  BoundaryCondition bc;
  if (mode == "navier") {
    bc = BoundaryCondition::navier(mesh);
  } else if (mode == "clamped") {
    bc = BoundaryCondition::clamped_to_current(mesh, c.num("lambda", 10.0));
  } else {
    throw Error(ErrorCode::InvalidConfig, "mode must be navier or clamped");
  }
  const FlowResult res = minimize(mesh, bc, flow);
  write_obj(c.output(c.str("output", "final.obj")), res.mesh);
  CsvTable t;
  t.header = {"iter", "objective", "willmore", "penalty", "grad_norm", "step"};
  for (const auto& r : res.trace.records) {
    t.rows.push_back({std::to_string(r.iter), format_number(r.objective), format_number(r.willmore),
                      format_number(r.penalty), format_number(r.grad_norm), format_number(r.step)});
  }
  t.write(c.output("trace.csv"));
  const auto& first = res.trace.records.front();
  const auto& last = res.trace.records.back();
  c.out << "objective " << format_number(first.objective) << " -> " << format_number(last.objective) << " in "
        << last.iter << " iterations, " << to_string(res.trace.termination) << ", "
        << res.trace.rejected_steps << " rejected steps\n";
  if (res.trace.termination == Termination::LineSearchFailed) {
    c.out << "warning: line search failed; the best mesh reached was written\n";
  }
}

PointSample sample_by(const TriMesh& mesh, const std::string& kind) {
  if (kind == "dense") return sample_mesh(mesh);
  if (kind == "vertices") return sample_points(mesh.positions());
  if (kind == "boundary") return sample_boundary(mesh);
  throw Error(ErrorCode::InvalidConfig, "sample must be dense, vertices or boundary");
}

void cmd_hausdorff(Context& c) {
  const std::string kind = c.str("sample", "dense");
  const PointSample a = sample_by(c.mesh("a"), kind);
  const PointSample b = sample_by(c.mesh("b"), kind);
  const double ab = directed_hausdorff(a, b), ba = directed_hausdorff(b, a);
  CsvTable t;
  t.header = {"a_to_b", "b_to_a", "hausdorff", "spacing_a", "spacing_b"};
  t.rows.push_back({format_number(ab), format_number(ba), format_number(std::max(ab, ba)),
                    format_number(a.spacing), format_number(b.spacing)});
  t.write(c.output("hausdorff.csv"));
  c.out << "d_H = " << format_number(std::max(ab, ba)) << "\n";
}

void cmd_diagnose(Context& c) {
  const TriMesh mesh = c.mesh("mesh");
  const std::string mode = c.str("mode", "by_diameter");
  RescaleReport rep;
  if (mode == "by_diameter") {
    rep = rescale_diagnostics(mesh, RescaleMode::ByDiameter);
  } else if (mode == "by_h") {
    rep = rescale_diagnostics(mesh, RescaleMode::ByHeight, c.num("h", 0.0));
  } else {
    throw Error(ErrorCode::InvalidConfig, "mode must be by_diameter or by_h");
  }
  std::string gap = "";
  int components = count_components(mesh);
  if (mesh.has_boundary()) {
    const double glue = c.num("glue_tol", default_glue_tolerance(mesh));
    components = connected_components(mesh, {sample_boundary(mesh)}, glue).count;
    if (count_components(mesh) == 1) gap = format_number(lower_bound_gap(mesh));
  }
  CsvTable t;
  t.header = {"mode", "diameter", "willmore_minus_4pi", "boundary_length_over_diameter", "fit", "fit_rms",
              "fit_max_residual", "fitted_diameter", "components", "lower_bound_gap"};
  t.rows.push_back({mode, format_number(rep.diameter), format_number(rep.willmore_excess),
                    format_number(rep.boundary_per_diameter), rep.fit.kind == FitKind::Sphere ? "sphere" : "plane",
                    format_number(rep.fit.rms), format_number(rep.fit.max_residual),
                    format_number(rep.fitted_diameter), std::to_string(components), gap});
  t.write(c.output("diagnose.csv"));
  std::ostringstream txt;
  txt << "diameter                  " << format_number(rep.diameter) << "\n"
      << "W - 4 pi                  " << format_number(rep.willmore_excess) << "\n"
      << "boundary length/diameter  " << format_number(rep.boundary_per_diameter) << "\n"
      << (rep.fit.kind == FitKind::Sphere ? "sphere" : "plane") << " fit rms            "
      << format_number(rep.fit.rms) << " (max " << format_number(rep.fit.max_residual) << ")\n";
  if (rep.fit.kind == FitKind::Sphere) txt << "fitted diameter           " << format_number(rep.fitted_diameter) << "\n";
  txt << "components                " << components << "\n";
  if (!gap.empty()) txt << "lower bound gap           " << gap << (gap[0] == '-' ? "  (negative: discretization)" : "") << "\n";
  txt << "note: " << rep.note << "\n";
  write_text(c.output("diagnose.txt"), txt.str());
  c.out << txt.str();
}

void cmd_threshold(Context& c) {
  const std::vector<double> Rs = c.list("R", {1.0});
  CsvTable t;
  t.header = {"R", "h0"};
  for (double R : Rs) {
    const double h0 = catenoid_critical_height(R);
    t.rows.push_back({format_number(R), format_number(h0)});
    char line[96];
    std::snprintf(line, sizeof line, "h0(R=%g) = %.12g\n", R, h0);
    c.out << line;
  }
  t.write(c.output("threshold.csv"));
}

void cmd_sweep(Context& c) {
  SweepPlan plan;
  plan.R_list = c.list("R", {1.0});
  plan.h_list = c.list("h", {});
  if (plan.h_list.empty()) throw Error(ErrorCode::ConfigParse, "[sweep] requires 'h'");
  plan.recipe = recipe_from(c, plan.recipe);
  FlowConfig flow;
  flow.max_iters = 300;
  plan.flow = flow_from(c, flow);
  plan.jobs = c.jobs;
  if (c.flag("write_meshes", false)) plan.row_dir = c.out_dir / "rows";
  const SweepResult res = sweep(plan);
  res.table().write(c.output("sweep.csv"));
  res.timing_table().write(c.output("sweep_timing.csv"));
  int failed = 0;
  for (const auto& r : res.rows) failed += !r.error.empty();
  c.out << res.rows.size() << " rows, " << failed << " failed\n";
}

struct Subcommand {
  std::set<std::string> keys;
  std::function<void(Context&)> body;
};

const std::map<std::string, Subcommand>& registry() {
  static const std::map<std::string, Subcommand> r = {
      {"generate", {keys({"surface", "R", "h", "radius", "subdivisions", "polar_angle", "output",
                          "boundary_samples"}, {&kRecipeKeys}), cmd_generate}},
      {"energy", {keys({"mesh"}), cmd_energy}},
      {"monotonicity", {keys({"mesh", "p0", "snap", "radii", "rho_min", "rho_max", "count", "tau",
                              "random_points"}), cmd_monotonicity}},
      {"minimize", {keys({"mesh", "mode", "lambda", "output"}, {&kFlowKeys}), cmd_minimize}},
      {"hausdorff", {keys({"a", "b", "sample"}), cmd_hausdorff}},
      {"diagnose", {keys({"mesh", "mode", "h", "glue_tol"}), cmd_diagnose}},
      {"threshold", {keys({"R"}), cmd_threshold}},
      {"sweep", {keys({"R", "h", "write_meshes"}, {&kRecipeKeys, &kFlowKeys}), cmd_sweep}},
  };
  return r;
}

json config_json(const ConfigDocument& doc) {
  json j = json::object();
  for (const auto& [section, entries] : doc.sections()) {
    if (entries.empty()) continue;
    json s = json::object();
    for (const auto& [key, entry] : entries) s[key] = entry.value;
    j[section] = s;
  }
  return j;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, _] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

int run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    std::string name = options.subcommand;
    ConfigDocument config;
    fs::path base_dir = fs::current_path();
    unsigned long long seed = options.seed.value_or(0);
    int jobs = options.jobs.value_or(1);

    if (options.manifest) {
      json m;
      try {
        m = json::parse(read_file(*options.manifest));
      } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigParse, options.manifest->string() + ": " + e.what());
      }
      const std::string recorded = m.value("subcommand", "");
      if (!name.empty() && name != recorded) {
        throw Error(ErrorCode::ConfigParse, "manifest was written by '" + recorded + "', not '" + name + "'");
      }
      name = recorded;
      if (m.contains("config")) {
        for (const auto& [section, entries] : m["config"].items()) {
          for (const auto& [key, value] : entries.items()) config.set(section, key, value.get<std::string>());
        }
      }
      if (!options.seed) seed = m.value("seed", 0ULL);
      if (!options.jobs) jobs = m.value("jobs", 1);
      // Outputs only reproduce when the inputs are the ones the manifest saw.
      for (const auto& rec : m.value("inputs", json::array())) {
        const std::string path = rec.value("path", "");
        if (sha256_hex(read_file(path)) != rec.value("sha256", "")) {
          throw Error(ErrorCode::Io, "input " + path + " changed since the manifest was written");
        }
      }
    } else if (options.config) {
      config = ConfigDocument::load(*options.config);
      base_dir = fs::absolute(*options.config).parent_path();
    }

    const auto it = registry().find(name);
    if (it == registry().end()) throw Error(ErrorCode::ConfigParse, "unknown subcommand '" + name + "'");
    config.apply_overrides(name, options.overrides);
    std::set<std::string> known(subcommand_names().begin(), subcommand_names().end());
    config.validate(name, it->second.keys, known);
    if (jobs < 1) throw Error(ErrorCode::InvalidConfig, "jobs must be >= 1");

    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + options.out_dir.string() + ": " + ec.message());

    Context ctx{name, config, options.out_dir, base_dir, seed, jobs, out, {}, {}};
    it->second.body(ctx);

    json inputs = json::array();
    std::string input_digest = ctx.config.canonical();
    for (const auto& p : ctx.inputs) {
      const std::string h = sha256_hex(read_file(p));
      inputs.push_back({{"path", p.string()}, {"sha256", h}});
      input_digest += p.string() + "=" + h + "\n";
    }
    json outputs = json::array();
    for (const auto& p : ctx.outputs) {
      outputs.push_back({{"path", fs::relative(p, options.out_dir).generic_string()},
                         {"sha256", sha256_hex(read_file(p))}});
    }
    json manifest = {{"tool", "wbl"},         {"version", kVersion},
                     {"versions", {{"wbl", kVersion}, {"eigen", eigen_version()}, {"compiler", __VERSION__}}},
                     {"subcommand", name},    {"seed", seed},
                     {"jobs", jobs},          {"config", config_json(ctx.config)},
                     {"inputs", inputs},      {"inputs_hash", sha256_hex(input_digest)},
                     {"outputs", outputs}};
    write_text(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace wbl
