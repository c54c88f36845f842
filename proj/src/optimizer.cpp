#include "wbl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "wbl/curvature.hpp"

namespace wbl {

namespace {

// Forward-mode dual number over the nine coordinates of one triangle.
struct Dual {
  double v = 0.0;
  Eigen::Matrix<double, 9, 1> d = Eigen::Matrix<double, 9, 1>::Zero();
};

Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + b.d * a.v}; }
Dual operator*(double s, const Dual& a) { return {s * a.v, s * a.d}; }
Dual operator/(const Dual& a, const Dual& b) {
  return {a.v / b.v, (a.d * b.v - b.d * a.v) / (b.v * b.v)};
}
Dual sqrt(const Dual& a) {
  const double r = std::sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}

using DVec = std::array<Dual, 3>;

DVec sub(const DVec& a, const DVec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Dual dot(const DVec& a, const DVec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Dual dot(const Vec3& a, const DVec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
DVec cross(const DVec& a, const DVec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Adds d/dp of  sum_edges w_o <ubar_i - ubar_j, p_j - p_i> + sum_k abar_k m_k
// for one face, where w_o is the half-cotangent opposite edge (i, j) and m_k
// the corner's mixed-area share; ubar and abar are held fixed.
void face_vjp(const TriMesh& mesh, int f, const std::vector<Vec3>& ubar,
              const std::vector<double>& abar, std::vector<Vec3>& grad) {
  const Face& t = mesh.faces()[f];
  std::array<DVec, 3> p;
  for (int k = 0; k < 3; ++k) {
    for (int c = 0; c < 3; ++c) {
      p[k][c].v = mesh.position(t[k])[c];
      p[k][c].d[3 * k + c] = 1.0;
    }
  }
  const Dual area = 0.5 * sqrt(dot(cross(sub(p[1], p[0]), sub(p[2], p[0])),
                                   cross(sub(p[1], p[0]), sub(p[2], p[0]))));
  std::array<Dual, 3> dots;
  for (int k = 0; k < 3; ++k) dots[k] = dot(sub(p[(k + 1) % 3], p[k]), sub(p[(k + 2) % 3], p[k]));

  Dual phi;
  for (int k = 0; k < 3; ++k) {
    const int i = k, j = (k + 1) % 3, o = (k + 2) % 3;
    const Dual w = 0.25 * (dots[o] / area);
    phi = phi + w * dot(Vec3(ubar[t[i]] - ubar[t[j]]), sub(p[j], p[i]));
  }
  const int obtuse = dots[0].v < 0 ? 0 : dots[1].v < 0 ? 1 : dots[2].v < 0 ? 2 : -1;
  for (int k = 0; k < 3; ++k) {
    Dual ca;
    if (obtuse >= 0) {
      ca = (k == obtuse ? 0.5 : 0.25) * area;
    } else {
      const int j = (k + 1) % 3, l = (k + 2) % 3;
      const DVec el = sub(p[l], p[k]), ej = sub(p[j], p[k]);
      ca = (0.125 * (dot(el, el) * dots[j] + dot(ej, ej) * dots[l])) / (2.0 * area);
    }
    phi = phi + abar[t[k]] * ca;
  }
  for (int k = 0; k < 3; ++k) grad[t[k]] += phi.d.segment<3>(3 * k);
}

struct Penalty {
  double value = 0.0;
  double deviation = 0.0;
};

Penalty penalty_value(const BoundaryData& bd, const BoundaryCondition& bc) {
  Penalty out;
  if (bc.mode != BoundaryMode::Clamped) return out;
  for (std::size_t s = 0; s < bd.size(); ++s) {
    out.deviation += (bd.conormals[s] - bc.targets[s]).squaredNorm() * bd.dual_lengths[s];
  }
  out.value = 0.5 * bc.lambda * out.deviation;
  return out;
}

double mean_edge_length(const TriMesh& mesh) {
  double sum = 0.0;
  for (const auto& e : mesh.edges()) sum += (mesh.position(e[0]) - mesh.position(e[1])).norm();
  return mesh.num_edges() > 0 ? sum / mesh.num_edges() : 0.0;
}

double min_face_area(const TriMesh& mesh) {
  const auto& a = mesh.face_areas();
  return a.empty() ? 0.0 : *std::min_element(a.begin(), a.end());
}

double max_norm(const std::vector<Vec3>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, x.norm());
  return m;
}

double inner(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].dot(b[i]);
  return s;
}

}  // namespace

BoundaryCondition BoundaryCondition::navier(const TriMesh& mesh) {
  BoundaryCondition bc;
  bc.mode = BoundaryMode::Navier;
  if (mesh.has_boundary()) bc.boundary_vertices = conormal_field(mesh).vertices;
  return bc;
}

BoundaryCondition BoundaryCondition::clamped(const TriMesh& mesh, std::vector<Vec3> targets,
                                             double lambda) {
  BoundaryCondition bc;
  bc.mode = BoundaryMode::Clamped;
  bc.boundary_vertices = conormal_field(mesh).vertices;
  bc.targets = std::move(targets);
  bc.lambda = lambda;
  bc.check(mesh);
  return bc;
}

BoundaryCondition BoundaryCondition::clamped_to_current(const TriMesh& mesh, double lambda) {
  return clamped(mesh, conormal_field(mesh).conormals, lambda);
}

void BoundaryCondition::check(const TriMesh& mesh) const {
  if (mode == BoundaryMode::Clamped) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidConfig, "clamped mode needs lambda > 0");
    for (const auto& t : targets) {
      if (std::abs(t.norm() - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidConfig, "target conormals must be unit vectors");
      }
    }
    if (!mesh.has_boundary()) throw Error(ErrorCode::BoundaryMismatch, "mesh has no boundary");
    if (targets.size() != boundary_vertices.size()) {
      throw Error(ErrorCode::BoundaryMismatch, "one target conormal per boundary vertex is required");
    }
  }
  if (boundary_vertices.empty() && mode == BoundaryMode::Navier) return;
  const std::vector<int> actual =
      mesh.has_boundary() ? conormal_field(mesh).vertices : std::vector<int>{};
  if (actual != boundary_vertices) {
    throw Error(ErrorCode::BoundaryMismatch, "boundary vertices differ from the boundary condition");
  }
}

ObjectiveValue evaluate_objective(const TriMesh& mesh, const BoundaryCondition& bc) {
  bc.check(mesh);
  ObjectiveValue out;
  out.willmore = willmore_energy(mesh);
  if (bc.mode == BoundaryMode::Clamped) {
    const Penalty p = penalty_value(conormal_field(mesh), bc);
    out.penalty = p.value;
    out.conormal_deviation = p.deviation;
  }
  out.total = out.willmore + out.penalty;
  return out;
}

double objective(const TriMesh& mesh, const BoundaryCondition& bc) {
  return evaluate_objective(mesh, bc).total;
}

VertexField gradient(const TriMesh& mesh, const BoundaryCondition& bc) {
  bc.check(mesh);
  const int nv = mesh.num_vertices();
  const auto lap = cotan_laplacian(mesh);
  const auto h = mean_curvature_vectors(mesh);  // validates interior mixed areas
  const auto& A = mesh.mixed_areas();

  std::vector<Vec3> ubar(nv, Vec3::Zero());
  std::vector<double> abar(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    if (h.on_boundary(v)) continue;
    ubar[v] = lap[v] / (2.0 * A[v]);
    abar[v] = -lap[v].squaredNorm() / (4.0 * A[v] * A[v]);
  }

  if (bc.mode == BoundaryMode::Clamped) {
    const BoundaryData bd = conormal_field(mesh);
    for (std::size_t s = 0; s < bd.size(); ++s) {
      const int i = bd.vertices[s];
      const Vec3& t = bd.tangents[s];
      Vec3 ratio_sum = Vec3::Zero();  // sum_j L_j / A_j over interior neighbours
      int n = 0;
      for (int j : mesh.vertex_neighbors(i)) {
        if (h.on_boundary(j)) continue;
        ratio_sum += lap[j] / A[j];
        ++n;
      }
      Vec3 hbar = n > 0 ? Vec3(ratio_sum / (2.0 * n)) : Vec3::Zero();
      Vec3 u = -lap[i] + 2.0 * hbar * A[i];
      u -= u.dot(t) * t;
      const double len = u.norm();
      if (len <= 1e-14 * mesh.extent()) continue;  // fallback branch, locally constant
      const Vec3& co = bd.conormals[s];
      const Vec3 dev = bc.lambda * bd.dual_lengths[s] * (co - bc.targets[s]);
      Vec3 q = dev - co.dot(dev) * co;
      q = (q - q.dot(t) * t) / len;
      ubar[i] -= q;
      if (n > 0) {
        abar[i] += q.dot(ratio_sum) / n;
        for (int j : mesh.vertex_neighbors(i)) {
          if (h.on_boundary(j)) continue;
          ubar[j] += q * (A[i] / (n * A[j]));
          abar[j] -= q.dot(lap[j]) * A[i] / (n * A[j] * A[j]);
        }
      }
    }
  }

  std::vector<Vec3> grad(nv, Vec3::Zero());
  for (int f = 0; f < mesh.num_faces(); ++f) face_vjp(mesh, f, ubar, abar, grad);
  VertexField out(std::move(grad));
  for (int v = 0; v < nv; ++v) {
    if (mesh.is_boundary_vertex(v)) {
      out[v] = Vec3::Zero();
      out.set_boundary(v, true);
    }
  }
  return out;
}

void FlowConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, what);
  };
  require(max_iters > 0, "max_iters must be positive");
  require(initial_step > 0.0, "initial_step must be positive");
  require(max_move > 0.0, "max_move must be positive");
  require(backtrack > 0.0 && backtrack < 1.0, "backtrack must lie in (0, 1)");
  require(armijo > 0.0 && armijo < 1.0, "armijo must lie in (0, 1)");
  require(grad_tol > 0.0, "grad_tol must be positive");
  require(eps_flow_factor > 0.0, "eps_flow_factor must be positive");
  require(min_move > 0.0, "min_move must be positive");
  require(lbfgs_history >= 0, "lbfgs_history must be non-negative");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::GradientTolerance: return "gradient_tolerance";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::LineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

bool FlowTrace::strictly_decreasing() const {
  for (std::size_t k = 1; k < records.size(); ++k) {
    if (!(records[k].objective < records[k - 1].objective)) return false;
  }
  return true;
}

FlowResult minimize(const TriMesh& start, const BoundaryCondition& bc, const FlowConfig& config) {
  config.validate();
  bc.check(start);
  const int nv = start.num_vertices();
  const double hbar = mean_edge_length(start);

  FlowResult result{start, {}};
  FlowTrace& trace = result.trace;
  trace.eps_flow = config.eps_flow_factor * min_face_area(start);

  TriMesh mesh = start;
  ObjectiveValue value = evaluate_objective(mesh, bc);
  std::vector<Vec3> g = gradient(mesh, bc).values();
  trace.records.push_back({0, value.total, value.willmore, value.penalty, max_norm(g), 0.0});

  std::deque<std::pair<std::vector<Vec3>, std::vector<Vec3>>> history;  // (s, y)

  for (int iter = 1;; ++iter) {
    if (trace.records.back().grad_norm <= config.grad_tol) {
      trace.termination = Termination::GradientTolerance;
      break;
    }
    if (iter > config.max_iters) {
      trace.termination = Termination::MaxIterations;
      break;
    }

    // L-BFGS two-loop recursion on the interior coordinates; if no step
    // along it is accepted, the memory is dropped and -g is tried once.
    std::vector<Vec3> d;
    double step = 0.0;
    bool accepted = false;
    TriMesh trial_mesh;
    ObjectiveValue trial_value;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1 && history.empty()) break;
      if (attempt == 1) history.clear();
      d.assign(nv, Vec3::Zero());
      for (int v = 0; v < nv; ++v) d[v] = -g[v];
      if (!history.empty()) {
        std::vector<double> alpha(history.size());
        for (int k = static_cast<int>(history.size()) - 1; k >= 0; --k) {
          const auto& [s, y] = history[k];
          alpha[k] = inner(s, d) / inner(y, s);
          for (int v = 0; v < nv; ++v) d[v] -= alpha[k] * y[v];
        }
        const auto& [s_last, y_last] = history.back();
        const double gamma = inner(s_last, y_last) / inner(y_last, y_last);
        for (auto& x : d) x *= gamma;
        for (std::size_t k = 0; k < history.size(); ++k) {
          const auto& [s, y] = history[k];
          const double beta = inner(y, d) / inner(y, s);
          for (int v = 0; v < nv; ++v) d[v] += (alpha[k] - beta) * s[v];
        }
      }
      double slope = inner(g, d);
      if (!(slope < 0.0)) {
        history.clear();
        for (int v = 0; v < nv; ++v) d[v] = -g[v];
        slope = inner(g, d);
      }
      for (int v = 0; v < nv; ++v) {
        if (mesh.is_boundary_vertex(v)) d[v] = Vec3::Zero();
      }
      const double dmax = max_norm(d);

      step = history.empty() ? config.initial_step * hbar / dmax : 1.0;
      step = std::min(step, config.max_move * hbar / dmax);

      while (step * dmax >= config.min_move * hbar) {
        std::vector<Vec3> x = mesh.positions();
        for (int v = 0; v < nv; ++v) {
          if (!mesh.is_boundary_vertex(v)) x[v] += step * d[v];
        }
        bool admissible = true;
        try {
          trial_mesh = mesh.with_positions(std::move(x));
          if (min_face_area(trial_mesh) < trace.eps_flow) {
            admissible = false;
          } else {
            trial_value = evaluate_objective(trial_mesh, bc);
            admissible = std::isfinite(trial_value.total);
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DegenerateFace && e.code() != ErrorCode::ZeroMixedArea) throw;
          admissible = false;
        }
        if (!admissible) {
          ++trace.rejected_steps;
        } else if (trial_value.total < value.total &&
                   trial_value.total <= value.total + config.armijo * step * slope) {
          accepted = true;
          break;
        }
        step *= config.backtrack;
      }
    }
    if (!accepted) {
      trace.termination = Termination::LineSearchFailed;
      break;
    }

    std::vector<Vec3> g_new = gradient(trial_mesh, bc).values();
    if (config.lbfgs_history > 0) {
      std::vector<Vec3> s(nv), y(nv);
      for (int v = 0; v < nv; ++v) {
        s[v] = step * d[v];
        y[v] = g_new[v] - g[v];
      }
      const double sy = inner(s, y);
      if (sy > 1e-12 * std::sqrt(inner(s, s) * inner(y, y))) {
        history.emplace_back(std::move(s), std::move(y));
        if (static_cast<int>(history.size()) > config.lbfgs_history) history.pop_front();
      }
    }
    mesh = std::move(trial_mesh);
    value = trial_value;
    g = std::move(g_new);
    trace.records.push_back(
        {iter, value.total, value.willmore, value.penalty, max_norm(g), step * std::sqrt(inner(d, d))});
  }
  result.mesh = std::move(mesh);
  return result;
}

}  // namespace wbl
