#include "qpl/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qpl {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + s);
  }
}

const std::vector<std::string> kTolKeys = {"closed_form", "fd_first", "fd_second", "rank_rel"};

}  // namespace

SuiteConfig parse_config_text(const std::string& text) {
  SuiteConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto strip = [](std::string s) {
      const size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    if (key == "suite") {
      c.suite = val;
    } else if (key == "group") {
      c.group = val;
    } else if (key == "seed") {
      c.seed = std::stoull(val);
    } else if (key == "points") {
      c.points = std::stoi(val);
    } else if (key == "out") {
      c.out = val;
    } else if (key == "format") {
      c.format = val;
    } else if (key.rfind("tol.", 0) == 0) {
      const std::string sub = key.substr(4);
      if (std::find(kTolKeys.begin(), kTolKeys.end(), sub) == kTolKeys.end())
        throw std::invalid_argument("config: unknown tolerance class '" + sub + "'");
      c.tol[sub] = parse_double(val, key);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  return c;
}

SuiteConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_text(const SuiteConfig& c) {
  std::ostringstream out;
  out << "suite = " << c.suite << "\n";
  out << "group = " << c.group << "\n";
  out << "seed = " << c.seed << "\n";
  out << "points = " << c.points << "\n";
  for (const auto& [k, v] : c.tol) out << "tol." << k << " = " << format_double(v) << "\n";
  if (!c.out.empty()) out << "out = " << c.out << "\n";
  out << "format = " << c.format << "\n";
  return out.str();
}

Tolerances apply_tol_overrides(const Tolerances& base,
                               const std::map<std::string, double>& tol) {
  Tolerances t = base;
  for (const auto& [k, v] : tol) {
    if (k == "closed_form")
      t.closed_form = v;
    else if (k == "fd_first")
      t.fd_first = v;
    else if (k == "fd_second")
      t.fd_second = v;
    else if (k == "rank_rel")
      t.rank_rel = v;
    else
      throw std::invalid_argument("unknown tolerance class '" + k + "'");
  }
  return t;
}

ModelPtr resolve_group(const std::string& arg) {
  if (arg.size() > 5 && arg.substr(arg.size() - 5) == ".json") {
    std::ifstream in(arg);
    if (!in) throw std::invalid_argument("group: cannot open descriptor " + arg);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::make_shared<GroupModel>(model_from_json(buf.str()));
  }
  return build_model(arg);
}

std::string report_json(const Report& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["group"] = r.group;
  j["seed"] = r.seed;
  j["points"] = r.points;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json rec;
    rec["name"] = c.name;
    rec["identity"] = c.identity;
    rec["class"] = c.tol_class;
    rec["residual"] = c.residual;
    rec["tolerance"] = c.tolerance;
    rec["pass"] = c.pass;
    j["checks"].push_back(rec);
  }
  int passed = 0;
  for (const auto& c : r.checks) passed += c.pass ? 1 : 0;
  j["summary"] = {{"total", r.checks.size()},
                  {"passed", passed},
                  {"max_residual", r.max_residual()},
                  {"all_pass", r.all_pass()}};
  // All wall-clock data lives under this one key; drop it to compare runs.
  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  nlohmann::ordered_json timing;
  timing["generated"] = stamp;
  double total = 0;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    per.push_back(c.runtime_ms);
    total += c.runtime_ms;
  }
  timing["total_ms"] = total;
  timing["check_ms"] = per;
  j["timestamp"] = timing;
  return j.dump(2) + "\n";
}

std::string report_csv(const Report& r) {
  std::ostringstream out;
  out << "suite,group,seed,points,name,identity,class,residual,tolerance,pass,runtime_ms\n";
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  };
  for (const auto& c : r.checks) {
    out << r.suite << ',' << r.group << ',' << r.seed << ',' << r.points << ',' << quote(c.name)
        << ',' << quote(c.identity) << ',' << c.tol_class << ',' << format_double(c.residual)
        << ',' << format_double(c.tolerance) << ',' << (c.pass ? "true" : "false") << ','
        << format_double(c.runtime_ms) << "\n";
  }
  return out.str();
}

std::string report_markdown(const Report& r) {
  std::ostringstream out;
  out << "# Suite `" << r.suite << "` on `" << r.group << "` (seed " << r.seed << ", "
      << r.points << " points)\n\n";
  out << "| check | identity | class | residual | tolerance | pass |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& c : r.checks) {
    char res[32], tol[32];
    std::snprintf(res, sizeof(res), "%.3e", c.residual);
    std::snprintf(tol, sizeof(tol), "%.1e", c.tolerance);
    out << "| " << c.name << " | `" << c.identity << "` | " << c.tol_class << " | " << res
        << " | " << tol << " | " << (c.pass ? "yes" : "NO") << " |\n";
  }
  int passed = 0;
  for (const auto& c : r.checks) passed += c.pass ? 1 : 0;
  out << "\n" << (r.all_pass() ? "All " : "FAILED: ") << passed << "/" << r.checks.size()
      << " checks passed; max residual " << format_double(r.max_residual()) << ".\n";
  return out.str();
}

std::string render_report(const Report& r, const std::string& format) {
  if (format == "json") return report_json(r);
  if (format == "csv") return report_csv(r);
  if (format == "md") return report_markdown(r);
  throw std::invalid_argument("unknown report format '" + format + "'");
}

}  // namespace qpl
