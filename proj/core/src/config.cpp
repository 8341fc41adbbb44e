#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "krv/bench.hpp"
#include "krv/error.hpp"

namespace krv {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_num(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw Error("");
    return v;
  } catch (...) {
    throw Error("config: bad number '" + s + "' for key '" + key + "'");
  }
}

// "1..51" | "1,3,5" | "7"
std::vector<int> parse_int_grid(const std::string& s, const std::string& key) {
  std::vector<int> out;
  auto dots = s.find("..");
  if (dots != std::string::npos) {
    int lo = static_cast<int>(parse_num(trim(s.substr(0, dots)), key));
    int hi = static_cast<int>(parse_num(trim(s.substr(dots + 2)), key));
    if (hi < lo) throw Error("config: empty range for key '" + key + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  for (const auto& item : split_list(s)) out.push_back(static_cast<int>(parse_num(item, key)));
  return out;
}

// "0.05:0.05:1.0" | "0.1,0.5" | "0.7"
std::vector<double> parse_real_grid(const std::string& s, const std::string& key) {
  std::vector<double> out;
  auto c1 = s.find(':');
  if (c1 != std::string::npos) {
    auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw Error("config: expected start:step:end for key '" + key + "'");
    double start = parse_num(trim(s.substr(0, c1)), key);
    double step = parse_num(trim(s.substr(c1 + 1, c2 - c1 - 1)), key);
    double end = parse_num(trim(s.substr(c2 + 1)), key);
    if (step <= 0.0) throw Error("config: step must be positive for key '" + key + "'");
    for (int i = 0;; ++i) {
      double v = start + i * step;
      if (v > end + step * 1e-9) break;
      out.push_back(v);
    }
    return out;
  }
  for (const auto& item : split_list(s)) out.push_back(parse_num(item, key));
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.learners = {"knn", "wnn", "kernn", "krv", "rvm_bern", "rvm_gauss"};
  for (int k = 1; k <= 51; ++k) cfg.k_grid.push_back(k);
  for (int i = 1; i <= 20; ++i) cfg.width_grid.push_back(0.05 * i);
  cfg.delta_grid = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
  return cfg;
}

void ExperimentConfig::validate() const {
  if (datasets.empty()) throw Error("config: no datasets given");
  if (learners.empty()) throw Error("config: empty learner set");
  for (const auto& l : learners) {
    if (l != "knn" && l != "wnn" && l != "kernn" && l != "krv" && l != "rvm_bern" &&
        l != "rvm_gauss")
      throw Error("config: unknown learner '" + l + "'");
  }
  if (k_grid.empty()) throw Error("config: empty k_grid");
  for (int k : k_grid)
    if (k < 1) throw Error("config: k values must be positive");
  if (kernel_family == KernelSpec::Family::gaussian) {
    if (width_grid.empty()) throw Error("config: empty width_grid");
    for (double w : width_grid)
      if (!(w > 0.0)) throw Error("config: widths must be positive");
  }
  if (delta_grid.empty()) throw Error("config: empty delta_grid");
  for (double d : delta_grid)
    if (!(d > 0.0)) throw Error("config: delta values must be positive");
  if (poly_order < 1) throw Error("config: poly_order must be at least 1");
  if (runs < 1) throw Error("config: runs must be at least 1");
  if (folds < 2) throw Error("config: folds must be at least 2");
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "datasets") {
      cfg.datasets = split_list(value);
    } else if (key == "learners") {
      cfg.learners = split_list(value);
    } else if (key == "kernel") {
      if (value == "gaussian")
        cfg.kernel_family = KernelSpec::Family::gaussian;
      else if (value == "polynomial")
        cfg.kernel_family = KernelSpec::Family::polynomial;
      else
        throw Error(origin + ": unknown kernel '" + value + "'");
    } else if (key == "k_grid") {
      cfg.k_grid = parse_int_grid(value, key);
    } else if (key == "width_grid") {
      cfg.width_grid = parse_real_grid(value, key);
    } else if (key == "delta_grid") {
      cfg.delta_grid = parse_real_grid(value, key);
    } else if (key == "poly_order") {
      cfg.poly_order = static_cast<int>(parse_num(value, key));
    } else if (key == "runs") {
      cfg.runs = static_cast<int>(parse_num(value, key));
    } else if (key == "folds") {
      cfg.folds = static_cast<int>(parse_num(value, key));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_num(value, key));
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_num(value, key));
    } else {
      throw Error(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }

  // Canonical ascending order; cell enumeration and tie-breaking depend on it.
  std::sort(cfg.k_grid.begin(), cfg.k_grid.end());
  std::sort(cfg.width_grid.begin(), cfg.width_grid.end());
  std::sort(cfg.delta_grid.begin(), cfg.delta_grid.end());
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace krv
