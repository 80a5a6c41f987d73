#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pixelinv/config.hpp"
#include "pixelinv/forward.hpp"

namespace pixelinv {

// --- Non-uniqueness sweep ----------------------------------------------------

struct SweepRow {
  int pixel = 0;  // 1-based, lower-left pixel is 1
  double sigma = 0.0;
  double value = 0.0;
};

/// F_{l,r} with l the lower-left disk and r the top-right disk, varying one
/// pixel at a time over {step, 2 step, ..., max} with all others at 1.
std::vector<SweepRow> run_nonuniqueness_sweep(const ExperimentConfig& config);

// --- Residual landscape ------------------------------------------------------

struct LandscapeRow {
  double sigma4 = 0.0;
  double sigma6 = 0.0;
  double residual = 0.0;
};

struct Landscape {
  std::vector<LandscapeRow> grid;      // sigma4 outer, sigma6 inner
  std::vector<LandscapeRow> diagonal;  // sigma4 == sigma6
};

/// R(sigma) = |F(sigma) - F(sigma_hat)|^2 for F = (F_{1,7}, F_{1,8}) on the
/// 3x3 grid, sigma_hat = 1 except pixels 4 and 6 at 0.5, varying pixels 4
/// and 6.
Landscape run_residual_landscape(const ExperimentConfig& config);

// --- Stability study ---------------------------------------------------------

struct StabilityRow {
  int nx = 0;
  int n = 0;
  int m = 0;
  int k = 0;
  long jacobian_rows = 0;
  long jacobian_cols = 0;
  double condition = 0.0;
  bool rank_deficient = false;
};

/// Condition number of the flattened F'(1) for nx in [nx_min, nx_max] with all
/// boundary-pixel disks as excitations and measurements.
std::vector<StabilityRow> run_stability_study(const ExperimentConfig& config);

// --- Property suite ----------------------------------------------------------

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // violation magnitude; pass iff measured <= tolerance
  double tolerance = 0.0;
  double default_tolerance = 0.0;
  std::string reason;      // "", "tolerance" or "violation"
};

struct PropertyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  std::string to_json(const ExperimentConfig& config) const;
};

PropertyReport run_property_suite(const ExperimentConfig& config);

// --- Output ------------------------------------------------------------------

/// Every CSV starts with `# config: ...` followed by a header row; reals use
/// 17 significant digits.
void write_csv(std::ostream& out, const ExperimentConfig& config,
               const std::vector<SweepRow>& rows);
void write_csv(std::ostream& out, const ExperimentConfig& config,
               const std::vector<LandscapeRow>& rows);
void write_csv(std::ostream& out, const ExperimentConfig& config,
               const std::vector<StabilityRow>& rows);

std::string format_real(double v);

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Each index is handled exactly once.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

// --- Series shape helpers ----------------------------------------------------

bool strictly_increasing(const std::vector<double>& v);
bool strictly_decreasing(const std::vector<double>& v);
/// Non-decreasing up to an interior argmax and non-increasing after it, with
/// a strict rise and a strict fall.
bool has_interior_maximum(const std::vector<double>& v);
/// Indices i (0 < i < size-1) with v[i] < v[i-1] and v[i] < v[i+1].
std::vector<int> strict_local_minima(const std::vector<double>& v);

/// Sample points {step, 2 step, ..., max}, computed without accumulation drift.
std::vector<double> sample_grid(double step, double max);

}  // namespace pixelinv
