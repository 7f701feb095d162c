#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qpl/model.hpp"
#include "qpl/reduction.hpp"
#include "qpl/report.hpp"
#include "qpl/series.hpp"
#include "qpl/word.hpp"

namespace py = pybind11;
using namespace qpl;

namespace {

py::dict report_to_dict(const Report& r) {
  py::dict d;
  d["suite"] = r.suite;
  d["group"] = r.group;
  d["seed"] = r.seed;
  d["points"] = r.points;
  py::list checks;
  for (const auto& c : r.checks) {
    py::dict rec;
    rec["name"] = c.name;
    rec["identity"] = c.identity;
    rec["class"] = c.tol_class;
    rec["residual"] = c.residual;
    rec["tolerance"] = c.tolerance;
    rec["pass"] = c.pass;
    rec["runtime_ms"] = c.runtime_ms;
    checks.append(rec);
  }
  d["checks"] = checks;
  d["all_pass"] = r.all_pass();
  d["max_residual"] = r.max_residual();
  return d;
}

py::dict bracket_dict(int genus, int boundary, const std::string& group,
                      const std::string& w1, const std::string& w2,
                      unsigned long long seed) {
  ModelPtr G = resolve_group(group);
  SurfaceData surf;
  surf.genus = genus;
  surf.boundary = boundary;
  RepVarietySpace R = build_rep_variety(surf, G, RepVariant::Full);
  ScalarFunction F1 = parse_trace_word(R, w1);
  ScalarFunction F2 = parse_trace_word(R, w2);

  std::mt19937_64 rng(seed);
  Point m0 = R.X.sample(rng);
  LevelSetPoint lp = project_to_level_set(R.X, m0, CMat(CMat::Identity(G->n, G->n)));
  const double bracket = reduced_bracket(R.X, F1, F2, lp.m);

  std::mt19937_64 crng(seed + 1);
  py::dict d;
  d["genus"] = genus;
  d["boundary"] = boundary;
  d["group"] = group;
  d["w1"] = w1;
  d["w2"] = w2;
  d["seed"] = seed;
  d["projection_iterations"] = lp.iterations;
  d["level_distance"] = lp.distance;
  d["locally_free"] = lp.locally_free;
  d["invariance_w1"] = invariance_defect(R.X, F1, crng, 3);
  d["invariance_w2"] = invariance_defect(R.X, F2, crng, 3);
  d["bracket"] = bracket;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qpl, m) {
  m.doc() = "verification suites for quasi-Poisson structures on compact matrix groups";

  m.def("suite_names", []() { return suite_names(); },
        "names of the available verification suites");

  m.def(
      "run_suite",
      [](const std::string& suite, const std::string& group, unsigned long long seed,
         int points, const std::map<std::string, double>& tol) {
        SuiteConfig c;
        c.suite = suite;
        c.group = group;
        c.seed = seed;
        c.points = points;
        c.tol = tol;
        return report_to_dict(run_suite(c));
      },
      py::arg("suite"), py::arg("group") = "su2", py::arg("seed") = 1,
      py::arg("points") = 20, py::arg("tol") = std::map<std::string, double>{},
      "run one verification suite and return the report as a dict");

  m.def("bracket", &bracket_dict, py::arg("genus") = 1, py::arg("boundary") = 1,
        py::arg("group") = "su2", py::arg("w1"), py::arg("w2"), py::arg("seed") = 1,
        "reduced bracket of two trace words at a projected level-set point");

  m.def(
      "cotangent_table",
      [](double x, long nmax) {
        std::vector<std::tuple<long, double, double>> rows;
        for (const auto& r : cotangent_table(x, nmax))
          rows.emplace_back(r.N, r.value, r.error);
        return rows;
      },
      py::arg("x"), py::arg("nmax") = 4096,
      "rows (N, partial sum, error) of the symmetric cotangent series");
  m.def("cotangent_limit", &cotangent_limit, py::arg("x"));
  m.def(
      "fitted_decay_rate",
      [](const std::vector<std::tuple<long, double, double>>& rows) {
        std::vector<SeriesRow> rs;
        for (const auto& [n, v, e] : rows) rs.push_back(SeriesRow{n, v, e});
        return fitted_decay_rate(rs);
      },
      py::arg("rows"), "least-squares slope of log error against log N");

  m.def(
      "model_descriptor", [](const std::string& kind) { return model_to_json(*build_model(kind)); },
      py::arg("kind"), "JSON descriptor of a builtin group model");
  m.def(
      "descriptor_name",
      [](const std::string& text) { return model_from_json(text).name; }, py::arg("text"),
      "parse a JSON model descriptor and return its name");

  py::register_exception<WordParseError>(m, "WordParseError");
}
