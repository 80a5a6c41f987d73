#include <doctest.h>

#include <random>

#include <Eigen/Cholesky>

#include "pixelinv/assembly.hpp"
#include "pixelinv/forward.hpp"
#include "pixelinv/linsolve.hpp"

using namespace pixelinv;

namespace {

SparseMatrix random_spd(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  Eigen::MatrixXd spd = a.transpose() * a + n * Eigen::MatrixXd::Identity(n, n);
  return spd.sparseView();
}

Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

}  // namespace

TEST_CASE("zero right-hand side returns zero without iterating") {
  std::mt19937 rng(1);
  const SparseMatrix a = random_spd(6, rng);
  const SolveReport r = solve_spd(a, Eigen::VectorXd::Zero(6));
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.solution.isZero(0.0));
}

TEST_CASE("one-by-one system") {
  SparseMatrix a(1, 1);
  a.insert(0, 0) = 4.0;
  const SolveReport r = solve_spd(a, Eigen::VectorXd::Ones(1));
  CHECK(r.solution[0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("random SPD systems agree with a dense Cholesky oracle") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const SparseMatrix a = random_spd(20, rng);
    const Eigen::VectorXd y = random_vector(20, rng);
    const Eigen::VectorXd oracle = Eigen::MatrixXd(a).llt().solve(y);
    const SolveReport r = solve_spd(a, y);
    CHECK(r.converged);
    CHECK(r.residual_norm <= 1e-10);
    CHECK((r.solution - oracle).norm() <= 1e-8 * oracle.norm());
    // The reported residual is the true relative residual.
    CHECK((a * r.solution - y).norm() / y.norm() ==
          doctest::Approx(r.residual_norm).epsilon(1e-6));
  }
}

TEST_CASE("solve_multi matches repeated single solves") {
  std::mt19937 rng(3);
  const SparseMatrix a = random_spd(15, rng);
  std::vector<Eigen::VectorXd> rhs;
  for (int i = 0; i < 4; ++i) rhs.push_back(random_vector(15, rng));
  rhs.push_back(rhs.front());
  const auto reports = solve_multi(a, rhs);
  REQUIRE(reports.size() == rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    const SolveReport single = solve_spd(a, rhs[i]);
    CHECK(reports[i].converged);
    CHECK((reports[i].solution - single.solution).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK((reports.front().solution - reports.back().solution).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solver instance counts solves") {
  std::mt19937 rng(9);
  const SparseMatrix a = random_spd(5, rng);
  const SpdSolver solver(a, {});
  CHECK(solver.solve_count() == 0);
  for (int i = 0; i < 3; ++i) solver.solve(random_vector(5, rng));
  CHECK(solver.solve_count() == 3);
}

TEST_CASE("solves with the stiffness matrix on nx=3, k=4") {
  const ForwardSetup setup = make_setup(3, 4);
  const SparseMatrix b = global_matrix(setup.stiffness, Sigma::constant(9).values());
  const Eigen::MatrixXd dense = Eigen::MatrixXd(b);
  std::vector<Eigen::VectorXd> rhs;
  for (const LoadVector& load : setup.loads) rhs.push_back(load.y);
  const auto reports = solve_multi(b, rhs);
  REQUIRE(reports.size() == 8);
  for (std::size_t l = 0; l < reports.size(); ++l) {
    CHECK(reports[l].converged);
    CHECK((b * reports[l].solution - rhs[l]).norm() <= 1e-10 * rhs[l].norm());
    const Eigen::VectorXd oracle = dense.llt().solve(rhs[l]);
    CHECK((reports[l].solution - oracle).norm() <= 1e-8 * oracle.norm());
  }
  // Symmetry of B^{-1}: y_l . B^{-1} y_r == y_r . B^{-1} y_l.
  for (std::size_t l = 0; l < rhs.size(); ++l) {
    for (std::size_t r = 0; r < rhs.size(); ++r) {
      const double lr = rhs[l].dot(reports[r].solution);
      const double rl = rhs[r].dot(reports[l].solution);
      CHECK(std::abs(lr - rl) <= 1e-9 * std::max(std::abs(lr), 1e-300));
    }
  }
}

TEST_CASE("non-convergence is reported and raised") {
  const ForwardSetup setup = make_setup(3, 4);
  const SparseMatrix b = global_matrix(setup.stiffness, Sigma::constant(9).values());
  const SolverOptions capped{1e-14, 2};
  const SpdSolver solver(b, capped);
  const SolveReport r = solver.solve(setup.loads[0].y);
  CHECK_FALSE(r.converged);
  CHECK(r.residual_norm > 1e-14);
  CHECK_THROWS_AS(solve_spd(b, setup.loads[0].y, capped), SolveError);
  try {
    solve_spd(b, setup.loads[0].y, capped);
  } catch (const SolveError& e) {
    CHECK_FALSE(e.report().converged);
  }
}

TEST_CASE("non-positive diagonal is rejected") {
  SparseMatrix a(2, 2);
  a.insert(0, 0) = 1.0;
  a.insert(1, 1) = 0.0;
  CHECK_THROWS(SpdSolver(a, {}));
}
