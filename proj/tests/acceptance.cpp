// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "pixelinv/analysis.hpp"
#include "pixelinv/experiments.hpp"

using namespace pixelinv;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Sigma random_sigma(std::mt19937& rng, int n, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return Sigma(v);
}

Eigen::MatrixXd values(const ForwardSetup& s, const Sigma& sigma, SolverOptions o = {}) {
  return forward_matrix(s.stiffness, sigma, s.loads, o).values;
}

ExperimentConfig defaults(const std::string& experiment) {
  return ExperimentConfig::from(KeyValueFile{}, experiment);
}

// 1 ---------------------------------------------------------------------------
Outcome stiffness_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  const PixelGrid grid(3);
  const TriMesh mesh = build_mesh(grid, 4);
  const StiffnessSet set = assemble_pixel_matrices(mesh, grid);
  std::vector<double> ones(9, 1.0);
  const SparseMatrix b_one = assemble_global(mesh, ones);
  double diff = 0.0;
  for (int i = 0; i < 9; ++i) {
    ones[i] = 2.0;
    diff = std::max(diff, max_abs_entry(set.pixel_matrices[i] - (assemble_global(mesh, ones) - b_one)));
    ones[i] = 1.0;
  }
  SparseMatrix sum = set.b0;
  for (const auto& bi : set.pixel_matrices) sum += bi;
  const double total = max_abs_entry(sum - b_one);
  const double t = seconds_since(t0);
  return {diff <= 1e-14 && total <= 1e-14 && t < 1.0,
          "difference " + fmt("%.2e", diff) + ", sum " + fmt("%.2e", total) + ", " +
              fmt("%.3f s", t)};
}

// 2 ---------------------------------------------------------------------------
Outcome jacobian_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  const ForwardSetup s = make_setup(3, 4);
  std::mt19937 rng(20210901);
  std::vector<Sigma> points{Sigma::constant(9)};
  for (int i = 0; i < 5; ++i) points.push_back(random_sigma(rng, 9));
  const double h = 1e-5;
  // Solver noise in the differenced values is amplified by 1/h.
  const SolverOptions tight{1e-13, 0};
  double metric = 0.0;  // max |fd - exact| / max(1, |exact|)
  double scaled = 0.0;  // max |fd - exact| / max |slice|
  for (const Sigma& sigma : points) {
    const MatrixMeasurement f = forward_matrix(s.stiffness, sigma, s.loads);
    for (int i = 0; i < 9; ++i) {
      const Eigen::MatrixXd fd =
          (values(s, sigma.with(i, sigma[i] + h), tight) -
           values(s, sigma.with(i, sigma[i] - h), tight)) /
          (2 * h);
      const Eigen::MatrixXd& exact = f.jacobian.slices[i];
      const Eigen::MatrixXd err = (fd - exact).cwiseAbs();
      metric = std::max(metric, (err.array() / exact.cwiseAbs().array().max(1.0)).maxCoeff());
      scaled = std::max(scaled, err.maxCoeff() / exact.cwiseAbs().maxCoeff());
    }
  }
  const double t = seconds_since(t0);
  return {metric <= 1e-5 && scaled <= 1e-5 && t < 30.0,
          "64x9 at 6 points, error " + fmt("%.2e", metric) + ", scaled " + fmt("%.2e", scaled) +
              ", " + fmt("%.2f s", t)};
}

// 3 ---------------------------------------------------------------------------
Outcome solve_economy() {
  const ForwardSetup s = make_setup(3, 4);
  const MatrixMeasurement f = forward_matrix(s.stiffness, Sigma::constant(9), s.loads);
  return {s.loads.size() == 8 && f.solves == 8,
          "m=" + std::to_string(s.loads.size()) + ", solves=" + std::to_string(f.solves)};
}

// 4 ---------------------------------------------------------------------------
Outcome symmetry_and_definiteness() {
  const ForwardSetup s = make_setup(3, 4);
  std::mt19937 rng(4);
  double asym = 0.0;
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd f = values(s, trial == 0 ? Sigma::constant(9) : random_sigma(rng, 9));
    asym = std::max(asym, (f - f.transpose()).cwiseAbs().maxCoeff() / f.cwiseAbs().maxCoeff());
    worst = std::min(worst, loewner_min_eig(f));
  }
  const double at_one = loewner_min_eig(values(s, Sigma::constant(9)));
  return {asym <= 1e-10 && worst >= -1e-10 && at_one > 0.0,
          "relative asymmetry " + fmt("%.2e", asym) + ", min eig " + fmt("%.3e", worst) +
              ", min eig at 1 " + fmt("%.3e", at_one)};
}

// 5 ---------------------------------------------------------------------------
Outcome monotonicity() {
  const ForwardSetup s = make_setup(3, 4);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    const Sigma lo = random_sigma(rng, 9);
    std::vector<double> hi(9);
    for (int i = 0; i < 9; ++i) hi[i] = lo[i] + u(rng) * (2.0 - lo[i]);
    worst = std::min(worst, loewner_min_eig(values(s, lo) - values(s, Sigma(hi))));
  }
  return {worst >= -1e-9, "20 ordered pairs, min eig " + fmt("%.3e", worst)};
}

// 6 ---------------------------------------------------------------------------
Outcome convexity() {
  const ForwardSetup s = make_setup(3, 4);
  std::mt19937 rng(6);
  double tangent = std::numeric_limits<double>::infinity();
  double segment = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    const Sigma s0 = random_sigma(rng, 9);
    const Sigma s1 = random_sigma(rng, 9);
    const MatrixMeasurement f0 = forward_matrix(s.stiffness, s0, s.loads);
    const Eigen::MatrixXd f1 = values(s, s1);
    std::vector<double> tau(9);
    for (int i = 0; i < 9; ++i) tau[i] = s1[i] - s0[i];
    tangent = std::min(tangent,
                       loewner_min_eig(f1 - f0.values - directional_derivative(f0.jacobian, tau)));
    for (double t : {0.25, 0.5, 0.75}) {
      std::vector<double> mid(9);
      for (int i = 0; i < 9; ++i) mid[i] = (1 - t) * s0[i] + t * s1[i];
      segment = std::min(segment,
                         loewner_min_eig((1 - t) * f0.values + t * f1 - values(s, Sigma(mid))));
    }
  }
  return {tangent >= -1e-9 && segment >= -1e-9,
          "tangent min eig " + fmt("%.3e", tangent) + ", segment min eig " + fmt("%.3e", segment)};
}

// 7 ---------------------------------------------------------------------------
Outcome refinement_ordering() {
  const ForwardSetup base = make_setup(3, 2);
  const ForwardSetup s4 = refine_setup(base, 4);
  const ForwardSetup s8 = refine_setup(base, 8);
  std::mt19937 rng(7);
  double worst = std::numeric_limits<double>::infinity();
  bool diagonal = true;
  bool cauchy = true;
  for (int trial = 0; trial < 5; ++trial) {
    const Sigma sigma = trial == 0 ? Sigma::constant(9) : random_sigma(rng, 9);
    const Eigen::MatrixXd f2 = values(base, sigma);
    const Eigen::MatrixXd f4 = values(s4, sigma);
    const Eigen::MatrixXd f8 = values(s8, sigma);
    worst = std::min({worst, loewner_min_eig(f4 - f2), loewner_min_eig(f8 - f4)});
    for (int j = 0; j < 8; ++j) {
      diagonal = diagonal && f2(j, j) <= f4(j, j) && f4(j, j) <= f8(j, j);
      cauchy = cauchy && (f8(j, j) - f4(j, j)) < (f4(j, j) - f2(j, j));
    }
    cauchy = cauchy && (f8 - f4).norm() < (f4 - f2).norm();
  }
  return {worst >= -1e-9 && diagonal && cauchy,
          "k=2,4,8 min eig " + fmt("%.3e", worst) + ", diagonal " +
              (diagonal ? "non-decreasing" : "NOT monotone") + ", differences " +
              (cauchy ? "decreasing" : "NOT decreasing")};
}

// 8 ---------------------------------------------------------------------------
Outcome nonuniqueness_shapes() {
  const auto rows = run_nonuniqueness_sweep(defaults("nonuniqueness"));
  std::map<int, std::vector<double>> curve;
  for (const SweepRow& r : rows) curve[r.pixel].push_back(r.value);
  bool middle = strictly_increasing(curve[5]);
  bool corners = true;
  for (int p : {1, 3, 7, 9}) corners = corners && strictly_decreasing(curve[p]);
  bool edges = true;
  for (int p : {2, 4, 6, 8}) edges = edges && has_interior_maximum(curve[p]);
  return {middle && corners && edges,
          std::string("middle ") + (middle ? "increasing" : "NOT increasing") + ", corners " +
              (corners ? "decreasing" : "NOT decreasing") + ", edges " +
              (edges ? "interior maximum" : "NO interior maximum")};
}

// 9 ---------------------------------------------------------------------------
Outcome landscape_minima() {
  const ExperimentConfig c = defaults("landscape");
  const Landscape l = run_residual_landscape(c);
  double at_truth = std::numeric_limits<double>::infinity();
  for (const LandscapeRow& r : l.diagonal) {
    if (r.sigma4 == 0.5) at_truth = r.residual;
  }
  std::vector<double> diag;
  for (const LandscapeRow& r : l.diagonal) diag.push_back(r.residual);
  std::vector<double> spurious;
  for (int i : strict_local_minima(diag)) {
    if (std::abs(l.diagonal[i].sigma4 - 0.5) > 10 * c.landscape_step) {
      spurious.push_back(l.diagonal[i].sigma4);
    }
  }
  std::string where;
  for (double v : spurious) where += (where.empty() ? "" : ",") + fmt("%g", v);
  return {at_truth <= 1e-20 && !spurious.empty(),
          "R(0.5,0.5) = " + fmt("%.2e", at_truth) + ", other diagonal minima at [" + where + "]"};
}

// 10 --------------------------------------------------------------------------
Outcome stability_trend() {
  ExperimentConfig c = defaults("stability");
  c.k = 2;
  c.k_large = 2;
  c.nx_min = 2;
  c.nx_max = 8;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<StabilityRow> rows = run_stability_study(c);
  const double t_small = seconds_since(t0);
  c.nx_min = 9;
  c.nx_max = 15;
  for (const StabilityRow& r : run_stability_study(c)) rows.push_back(r);

  bool increasing = true;
  bool shape = false;
  bool finite = true;
  for (const StabilityRow& r : rows) {
    finite = finite && !r.rank_deficient;
    if (r.nx == 3) shape = r.jacobian_rows == 64 && r.jacobian_cols == 9;
  }
  for (std::size_t i = 1; i < rows.size() && rows[i].nx <= 5; ++i) {
    increasing = increasing && rows[i].condition > rows[i - 1].condition;
  }
  // Least-squares line through (n, log cond).
  const int count = static_cast<int>(rows.size());
  double sx = 0, sy = 0;
  for (const StabilityRow& r : rows) {
    sx += r.n;
    sy += std::log(r.condition);
  }
  const double mx = sx / count, my = sy / count;
  double sxx = 0, sxy = 0, syy = 0;
  for (const StabilityRow& r : rows) {
    const double dx = r.n - mx, dy = std::log(r.condition) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double r2 = finite ? sxy * sxy / (sxx * syy) : 0.0;
  return {increasing && shape && finite && r2 >= 0.9 && t_small < 300.0,
          "nx=2..15, cond " + fmt("%.3g", rows.front().condition) + " .. " +
              fmt("%.3g", rows.back().condition) + ", R^2 " + fmt("%.4f", r2) +
              ", nx<=8 in " + fmt("%.1f s", t_small)};
}

// 11 --------------------------------------------------------------------------
Outcome oracle_equivalence() {
  // Dense quadrature: gradients of the local hats from the Vandermonde system,
  // integrated with the edge-midpoint rule, summed element by element.
  const PixelGrid grid(2);
  const TriMesh mesh = build_mesh(grid, 1);
  Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(mesh.num_free, mesh.num_free);
  for (const auto& tri : mesh.triangles) {
    Eigen::Matrix3d vander;
    for (int a = 0; a < 3; ++a) {
      vander.row(a) << 1.0, mesh.vertices[tri[a]].x, mesh.vertices[tri[a]].y;
    }
    const Eigen::Matrix3d coeff = vander.inverse();  // column a: hat a
    const double area = std::abs(vander.determinant()) / 2.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const int ia = mesh.free_index[tri[a]], ib = mesh.free_index[tri[b]];
        if (ia < 0 || ib < 0) continue;
        double q = 0.0;
        for (int point = 0; point < 3; ++point) {
          q += (coeff(1, a) * coeff(1, b) + coeff(2, a) * coeff(2, b)) * area / 3.0;
        }
        oracle(ia, ib) += q;
      }
    }
  }
  const Eigen::MatrixXd assembled =
      Eigen::MatrixXd(global_matrix(assemble_pixel_matrices(mesh, grid), std::vector<double>(4, 1.0)));
  const double b_err = (assembled - oracle).cwiseAbs().maxCoeff();

  std::mt19937 rng(11);
  std::normal_distribution<double> g;
  double cg_err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 10 + 5 * trial;
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      y[i] = g(rng);
      for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    }
    const Eigen::MatrixXd spd = a.transpose() * a + n * Eigen::MatrixXd::Identity(n, n);
    const SparseMatrix sparse = spd.sparseView();
    const Eigen::VectorXd x = solve_spd(sparse, y).solution;
    const Eigen::VectorXd ref = spd.llt().solve(y);
    cg_err = std::max(cg_err, (x - ref).norm() / ref.norm());
  }
  return {b_err <= 1e-12 && cg_err <= 1e-8,
          "B_1 vs quadrature " + fmt("%.2e", b_err) + ", CG vs Cholesky " + fmt("%.2e", cg_err)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"stiffness identities", stiffness_identities},
      {"Jacobian exactness", jacobian_exactness},
      {"solve economy", solve_economy},
      {"symmetry and definiteness", symmetry_and_definiteness},
      {"Loewner monotonicity", monotonicity},
      {"Loewner convexity", convexity},
      {"refinement ordering", refinement_ordering},
      {"non-uniqueness sweep", nonuniqueness_shapes},
      {"residual landscape", landscape_minima},
      {"conditioning trend", stability_trend},
      {"oracle equivalence", oracle_equivalence},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failures;
    std::printf("%s %2zu %s: %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
