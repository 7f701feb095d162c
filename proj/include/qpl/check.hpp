#pragma once

#include <string>
#include <vector>

#include "qpl/model.hpp"

namespace qpl {

// Tolerance class of a numerical check, by derivative depth of its weakest
// ingredient: closed-form paths, one finite-difference layer, or nested
// finite differences.
enum class TolClass { ClosedForm, FdFirst, FdSecond, RankRel };

inline double tol_of(const Tolerances& t, TolClass c) {
  switch (c) {
    case TolClass::ClosedForm: return t.closed_form;
    case TolClass::FdFirst: return t.fd_first;
    case TolClass::FdSecond: return t.fd_second;
    case TolClass::RankRel: return t.rank_rel;
  }
  return t.closed_form;
}

inline const char* tol_class_name(TolClass c) {
  switch (c) {
    case TolClass::ClosedForm: return "closed-form";
    case TolClass::FdFirst: return "fd-first";
    case TolClass::FdSecond: return "fd-second";
    case TolClass::RankRel: return "rank-rel";
  }
  return "closed-form";
}

// One verified identity: the residual is a max over sampled points. The
// identity string is the mathematical anchor; name adds the context
// (space, group, sample size).
struct Residual {
  std::string identity;
  std::string name;
  double value = 0;
  TolClass cls = TolClass::ClosedForm;
};

inline void push_max(std::vector<Residual>& out, const std::string& identity,
                     const std::string& name, double v, TolClass cls) {
  for (auto& r : out)
    if (r.identity == identity && r.name == name && r.cls == cls) {
      if (v > r.value) r.value = v;
      return;
    }
  out.push_back(Residual{identity, name, v, cls});
}

}  // namespace qpl
