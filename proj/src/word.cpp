#include "qpl/word.hpp"

#include <cctype>

namespace qpl {

Word parse_word(const std::string& text, const std::map<std::string, int>& names) {
  Word w;
  size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    if (!std::islower(static_cast<unsigned char>(text[i])))
      throw WordParseError("expected generator name", static_cast<int>(i));
    size_t start = i;
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    std::string name = text.substr(start, i - start);
    auto it = names.find(name);
    if (it == names.end())
      throw WordParseError("unknown generator '" + name + "'", static_cast<int>(start));
    WordLetter l;
    l.factor = it->second;
    if (i < text.size() && text[i] == '\'') {
      size_t mark = i;
      l.inverse = true;
      ++i;
      if (i < text.size() && text[i] == '\'')
        throw WordParseError("repeated inverse mark", static_cast<int>(mark));
    }
    w.letters.push_back(l);
  }
  return w;
}

std::map<std::string, int> generator_names(int genus, int boundary) {
  std::map<std::string, int> names;
  int f = 0;
  for (int j = 1; j <= genus; ++j) {
    names["a" + std::to_string(j)] = f++;
    names["b" + std::to_string(j)] = f++;
  }
  for (int k = 1; k <= boundary; ++k) names["c" + std::to_string(k)] = f++;
  return names;
}

CMat eval_word(const ModelSpace& S, const Word& w, const Point& m) {
  if (S.factors.empty()) throw std::invalid_argument("eval_word: empty space");
  const int n = S.factors[0].model->n;
  CMat u = CMat::Identity(n, n);
  for (const auto& l : w.letters) {
    const CMat& g = m.p[l.factor].g;
    u = l.inverse ? CMat(u * g.adjoint()) : CMat(u * g);
  }
  return u;
}

RMat word_right_jacobian(const ModelSpace& S, const GroupModel& G, const Word& w,
                         const Point& m) {
  RMat R = RMat::Zero(G.d, S.D);
  const int n = G.n;
  CMat u = CMat::Identity(n, n);
  for (const auto& l : w.letters) {
    const Factor& f = S.factors[l.factor];
    const CMat& g = m.p[l.factor].g;
    if (!l.inverse) {
      u = u * g;
      R.block(0, f.offset, G.d, f.model->d) += G.Ad(u);
    } else {
      R.block(0, f.offset, G.d, f.model->d) -= G.Ad(u);
      u = u * g.adjoint();
    }
  }
  return R;
}

SmoothMap word_map(const ModelSpace& S, const ModelSpace& Gspace, const Word& w) {
  SmoothMap F;
  F.dom = &S;
  F.cod = &Gspace;
  ModelSpace Sc = S;
  ModelPtr Gm = Gspace.factors[0].model;
  Word wc = w;
  F.value = [Sc, wc](const Point& m) {
    Point out;
    out.p.push_back(FactorPoint{eval_word(Sc, wc, m), RVec()});
    return out;
  };
  F.jac = [Sc, wc, Gm](const Point& m) -> RMat {
    CMat W = eval_word(Sc, wc, m);
    return Gm->Ad(W.adjoint()) * word_right_jacobian(Sc, *Gm, wc, m);
  };
  F.exact_jac = true;
  return F;
}

MomentComponent word_moment(const ModelSpace& S, ModelPtr target, const Word& w) {
  MomentComponent mc;
  mc.target = target;
  mc.group_valued = true;
  ModelSpace Sc = S;
  Word wc = w;
  mc.value = [Sc, wc](const Point& m) { return eval_word(Sc, wc, m); };
  mc.rmat = [Sc, wc, target](const Point& m) {
    return word_right_jacobian(Sc, *target, wc, m);
  };
  mc.exact = true;
  return mc;
}

MomentComponent moment_product(const ModelSpace& S, const MomentComponent& A,
                               const MomentComponent& B) {
  (void)S;
  if (!A.group_valued || !B.group_valued)
    throw std::invalid_argument("moment_product: group-valued components required");
  MomentComponent mc;
  mc.target = A.target;
  mc.group_valued = true;
  auto av = A.value, bv = B.value;
  auto ar = A.rmat, br = B.rmat;
  ModelPtr T = A.target;
  mc.value = [av, bv](const Point& m) { return CMat(av(m) * bv(m)); };
  mc.rmat = [av, ar, br, T](const Point& m) { return RMat(ar(m) + T->Ad(av(m)) * br(m)); };
  mc.exact = A.exact && B.exact;
  return mc;
}

MomentComponent moment_inverse(const ModelSpace& S, const MomentComponent& A) {
  (void)S;
  MomentComponent mc;
  mc.target = A.target;
  mc.group_valued = true;
  auto av = A.value;
  auto ar = A.rmat;
  ModelPtr T = A.target;
  mc.value = [av](const Point& m) { return CMat(av(m).adjoint()); };
  mc.rmat = [av, ar, T](const Point& m) { return RMat(-(T->Ad(av(m).adjoint()) * ar(m))); };
  mc.exact = A.exact;
  return mc;
}

MomentComponent exp_moment(const ModelSpace& S, const MomentComponent& alg) {
  (void)S;
  if (alg.group_valued) throw std::invalid_argument("exp_moment: algebra-valued input required");
  MomentComponent mc;
  mc.target = alg.target;
  mc.group_valued = true;
  auto xv = alg.alg_value;
  auto xj = alg.rmat;
  ModelPtr T = alg.target;
  mc.value = [xv, T](const Point& m) { return T->exp_coords(xv(m)); };
  mc.rmat = [xv, xj, T](const Point& m) {
    RVec x = xv(m);
    RMat dexp = analytic_of_ad(*T, x, [](cxd s) {
      if (std::abs(s) < 1e-3) {
        // (e^s - 1)/s = sum s^k/(k+1)!
        cxd acc = 0, term = 1;
        for (int k = 0; k <= 8; ++k) {
          acc += term / static_cast<double>(k + 1);
          term *= s / static_cast<double>(k + 1);
        }
        return acc;
      }
      return (std::exp(s) - 1.0) / s;
    });
    return RMat(dexp * xj(m));
  };
  mc.exact = alg.exact;
  return mc;
}

MomentComponent log_moment(const ModelSpace& S, const MomentComponent& grp) {
  (void)S;
  if (!grp.group_valued) throw std::invalid_argument("log_moment: group-valued input required");
  MomentComponent mc;
  mc.target = grp.target;
  mc.group_valued = false;
  auto gv = grp.value;
  auto gr = grp.rmat;
  ModelPtr T = grp.target;
  mc.alg_value = [gv, T](const Point& m) { return T->log_coords(gv(m)); };
  mc.rmat = [gv, gr, T](const Point& m) {
    RVec x = T->log_coords(gv(m));
    // Inverse of the right-trivialized exp differential: s/(e^s - 1) = nu(-s).
    RMat J = analytic_of_ad(*T, x, [](cxd s) { return nu_fn(-s); });
    return RMat(J * gr(m));
  };
  mc.exact = grp.exact;
  return mc;
}

MomentComponent factor_moment(const ModelSpace& S, int factor) {
  Word w;
  w.letters.push_back(WordLetter{factor, false});
  return word_moment(S, S.factors[factor].model, w);
}

MomentComponent algebra_factor_moment(const ModelSpace& S, int factor) {
  if (!S.factors[factor].is_algebra)
    throw std::invalid_argument("algebra_factor_moment: factor is not an algebra");
  MomentComponent mc;
  mc.target = S.factors[factor].model;
  mc.group_valued = false;
  const int off = S.factors[factor].offset;
  const int d = mc.target->d;
  const int D = S.D;
  mc.alg_value = [factor](const Point& m) { return m.p[factor].xi; };
  mc.rmat = [off, d, D](const Point&) {
    RMat J = RMat::Zero(d, D);
    J.block(0, off, d, d).setIdentity();
    return J;
  };
  mc.exact = true;
  return mc;
}

MultiVectorField moment_pullback_right(const ModelSpace& S, const MomentComponent& mc, int a) {
  auto r = mc.rmat;
  return with_fd_derivative(S, 1, [r, a](const Point& m) {
    return AltTensor::vector(r(m).row(a).transpose());
  });
}

MultiVectorField moment_pullback_left(const ModelSpace& S, const MomentComponent& mc, int a) {
  if (!mc.group_valued)
    throw std::invalid_argument("moment_pullback_left: group-valued component required");
  auto r = mc.rmat;
  auto v = mc.value;
  ModelPtr T = mc.target;
  return with_fd_derivative(S, 1, [r, v, T, a](const Point& m) {
    RMat L = T->Ad(v(m).adjoint()) * r(m);
    return AltTensor::vector(L.row(a).transpose());
  });
}

}  // namespace qpl
