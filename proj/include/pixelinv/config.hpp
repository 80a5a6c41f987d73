#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

namespace pixelinv {

/// Bad config file contents or out-of-range values (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` text; `#` starts a comment, blank lines are ignored.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in);
  static KeyValueFile load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

struct ExperimentConfig {
  std::string experiment;
  int nx = 3;
  int k = 4;
  double radius_fraction = 0.25;

  // Non-uniqueness sweep.
  double sweep_step = 0.01;
  double sweep_max = 3.0;

  // Residual landscape.
  double landscape_step = 0.002;
  double landscape_max = 0.6;

  // Stability study; meshes for nx >= k_large_from use k_large.
  int nx_min = 2;
  int nx_max = 15;
  int k_large = 2;
  int k_large_from = 10;

  double solver_tol = 1e-10;
  int max_iter = 0;  // 0 means 10 * N
  unsigned seed = 20210901;
  int threads = 0;  // 0 means hardware concurrency

  // Property suite.
  int samples = 20;
  double check_tolerance = 0.0;  // > 0 overrides every tolerance-based check
  bool corrupt_pixel_matrix = false;  // negative-control hook

  std::string out;

  /// Applies entries over the defaults; unknown keys and out-of-range values
  /// throw ConfigError.
  static ExperimentConfig from(const KeyValueFile& file,
                               const std::string& experiment);
  void validate() const;

  /// Sorted `key=value` list separated by `; `, for CSV comment lines.
  std::string describe() const;
  std::map<std::string, std::string> as_map() const;
};

}  // namespace pixelinv
