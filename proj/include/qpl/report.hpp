#pragma once

#include <map>
#include <string>
#include <vector>

#include "qpl/check.hpp"

namespace qpl {

// One verification record: the identity string is the formula or property
// the residual certifies, the name adds its context and is unique within a
// report.
struct CheckRecord {
  std::string name;
  std::string identity;
  std::string tol_class;
  double residual = 0;
  double tolerance = 0;
  bool pass = false;
  double runtime_ms = 0;
};

struct Report {
  std::string suite;
  std::string group;
  unsigned long long seed = 1;
  int points = 0;
  std::vector<CheckRecord> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
  double max_residual() const {
    double w = 0;
    for (const auto& c : checks) w = std::max(w, c.residual);
    return w;
  }
};

// Run configuration. Round-trips through the key=value text bit-exactly:
// parse(config_text(c)) reproduces c field for field, doubles included.
struct SuiteConfig {
  std::string suite;
  std::string group = "su2";
  unsigned long long seed = 1;
  int points = 20;
  std::map<std::string, double> tol;  // overrides: closed_form, fd_first, fd_second, rank_rel
  std::string out;                    // output path, empty = stdout
  std::string format = "json";       // json | csv | md
};

SuiteConfig parse_config_text(const std::string& text);
SuiteConfig load_config_file(const std::string& path);
std::string config_text(const SuiteConfig& c);

// Tolerance table for a model after applying the config overrides.
Tolerances apply_tol_overrides(const Tolerances& base, const std::map<std::string, double>& tol);

// Group argument resolution: a builtin kind ("su2", "su3", "so3", "torusK")
// or a path to a JSON model descriptor file.
ModelPtr resolve_group(const std::string& arg);

const std::vector<std::string>& suite_names();

// Execute one named suite. Throws std::invalid_argument for an unknown suite
// or group.
Report run_suite(const SuiteConfig& c);

// Renderings. The JSON body is a deterministic function of (config, seed):
// wall-clock data (ISO time and per-check runtimes) is confined to the single
// top-level "timestamp" object so consumers can drop that one key when
// comparing runs. CSV and Markdown carry the runtimes inline.
std::string report_json(const Report& r);
std::string report_csv(const Report& r);
std::string report_markdown(const Report& r);
std::string render_report(const Report& r, const std::string& format);

}  // namespace qpl
