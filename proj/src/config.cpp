#include "pixelinv/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace pixelinv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long i = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in) {
  KeyValueFile file;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    file.entries_[key] = trim(line.substr(eq + 1));
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

ExperimentConfig ExperimentConfig::from(const KeyValueFile& file,
                                        const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto as_int = [](int& dst) -> Setter {
    return [&dst](const std::string& k, const std::string& v) {
      dst = static_cast<int>(parse_long(k, v));
    };
  };
  auto as_double = [](double& dst) -> Setter {
    return [&dst](const std::string& k, const std::string& v) {
      dst = parse_double(k, v);
    };
  };
  const std::map<std::string, Setter> setters = {
      {"nx", as_int(c.nx)},
      {"k", as_int(c.k)},
      {"radius_fraction", as_double(c.radius_fraction)},
      {"sweep_step", as_double(c.sweep_step)},
      {"sweep_max", as_double(c.sweep_max)},
      {"landscape_step", as_double(c.landscape_step)},
      {"landscape_max", as_double(c.landscape_max)},
      {"nx_min", as_int(c.nx_min)},
      {"nx_max", as_int(c.nx_max)},
      {"k_large", as_int(c.k_large)},
      {"k_large_from", as_int(c.k_large_from)},
      {"solver_tol", as_double(c.solver_tol)},
      {"max_iter", as_int(c.max_iter)},
      {"threads", as_int(c.threads)},
      {"samples", as_int(c.samples)},
      {"check_tolerance", as_double(c.check_tolerance)},
      {"seed",
       [&c](const std::string& k, const std::string& v) {
         const long s = parse_long(k, v);
         if (s < 0) throw ConfigError("config: seed must be non-negative");
         c.seed = static_cast<unsigned>(s);
       }},
      {"corrupt_pixel_matrix",
       [&c](const std::string& k, const std::string& v) {
         c.corrupt_pixel_matrix = parse_bool(k, v);
       }},
      {"out", [&c](const std::string&, const std::string& v) { c.out = v; }},
  };
  for (const auto& [key, value] : file.entries()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second(key, value);
  }
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("config: ") + what);
  };
  require(nx >= 1 && nx <= 64, "nx must lie in [1, 64]");
  require(k >= 1 && k <= 64, "k must lie in [1, 64]");
  require(radius_fraction > 0.0 && radius_fraction < 0.5,
          "radius_fraction must lie in (0, 0.5)");
  require(sweep_step > 0.0 && sweep_max >= sweep_step,
          "sweep_step must be positive and <= sweep_max");
  require(landscape_step > 0.0 && landscape_max >= landscape_step,
          "landscape_step must be positive and <= landscape_max");
  require(nx_min >= 2 && nx_max >= nx_min && nx_max <= 64,
          "need 2 <= nx_min <= nx_max <= 64");
  require(k_large >= 1 && k_large_from >= 2, "k_large >= 1 and k_large_from >= 2");
  require(solver_tol > 0.0 && solver_tol < 1.0, "solver_tol must lie in (0, 1)");
  require(max_iter >= 0, "max_iter must be >= 0");
  require(threads >= 0, "threads must be >= 0");
  require(samples >= 1, "samples must be >= 1");
  require(check_tolerance >= 0.0, "check_tolerance must be >= 0");
}

std::map<std::string, std::string> ExperimentConfig::as_map() const {
  return {
      {"experiment", experiment},
      {"nx", std::to_string(nx)},
      {"k", std::to_string(k)},
      {"radius_fraction", fmt_double(radius_fraction)},
      {"sweep_step", fmt_double(sweep_step)},
      {"sweep_max", fmt_double(sweep_max)},
      {"landscape_step", fmt_double(landscape_step)},
      {"landscape_max", fmt_double(landscape_max)},
      {"nx_min", std::to_string(nx_min)},
      {"nx_max", std::to_string(nx_max)},
      {"k_large", std::to_string(k_large)},
      {"k_large_from", std::to_string(k_large_from)},
      {"solver_tol", fmt_double(solver_tol)},
      {"max_iter", std::to_string(max_iter)},
      {"seed", std::to_string(seed)},
      {"samples", std::to_string(samples)},
      {"check_tolerance", fmt_double(check_tolerance)},
      {"corrupt_pixel_matrix", corrupt_pixel_matrix ? "true" : "false"},
  };
}

std::string ExperimentConfig::describe() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : as_map()) {
    if (!first) os << "; ";
    os << k << '=' << v;
    first = false;
  }
  return os.str();
}

}  // namespace pixelinv
