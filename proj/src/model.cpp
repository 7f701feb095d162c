#include "qpl/model.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace qpl {

namespace {

using json = nlohmann::ordered_json;

std::vector<CMat> su2_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  CMat s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, cxd(0, -1), cxd(0, 1), 0;
  s3 << 1, 0, 0, -1;
  std::vector<CMat> b;
  for (const CMat& m : {s1, s2, s3}) b.push_back(cxd(0, -1) * s * m);
  return b;
}

std::vector<CMat> su3_basis() {
  auto Z = [] { return CMat::Zero(3, 3).eval(); };
  std::vector<CMat> lam(8, Z());
  lam[0](0, 1) = lam[0](1, 0) = 1;
  lam[1](0, 1) = cxd(0, -1);
  lam[1](1, 0) = cxd(0, 1);
  lam[2](0, 0) = 1;
  lam[2](1, 1) = -1;
  lam[3](0, 2) = lam[3](2, 0) = 1;
  lam[4](0, 2) = cxd(0, -1);
  lam[4](2, 0) = cxd(0, 1);
  lam[5](1, 2) = lam[5](2, 1) = 1;
  lam[6](1, 2) = cxd(0, -1);
  lam[6](2, 1) = cxd(0, 1);
  const double r3 = 1.0 / std::sqrt(3.0);
  lam[7](0, 0) = r3;
  lam[7](1, 1) = r3;
  lam[7](2, 2) = -2 * r3;
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<CMat> b;
  for (const CMat& m : lam) b.push_back(cxd(0, -1) * s * m);
  return b;
}

std::vector<CMat> so3_basis() {
  // (L_a)_{ij} = -eps_{aij}; orthonormal under -(1/2)tr(XY).
  std::vector<CMat> b(3, CMat::Zero(3, 3));
  int perm[3][2] = {{1, 2}, {2, 0}, {0, 1}};  // (a, i, j) with eps_{aij} = +1
  for (int a = 0; a < 3; ++a) {
    b[a](perm[a][0], perm[a][1]) = -1;  // -eps_{a,i,j} with eps_{a,perm}=+1
    b[a](perm[a][1], perm[a][0]) = 1;
  }
  return b;
}

std::vector<CMat> torus_basis(int k) {
  std::vector<CMat> b;
  for (int j = 0; j < k; ++j) {
    CMat m = CMat::Zero(k, k);
    m(j, j) = cxd(0, 1);
    b.push_back(m);
  }
  return b;
}

void fill_structure_constants(GroupModel& G) {
  G.f.assign(static_cast<size_t>(G.d) * G.d * G.d, 0.0);
  for (int b = 0; b < G.d; ++b)
    for (int c = 0; c < G.d; ++c) {
      CMat br = G.bracket(G.basis[b], G.basis[c]);
      for (int a = 0; a < G.d; ++a) {
        double v = G.inner(G.basis[a], br);
        if (std::abs(v) < 1e-14) v = 0.0;
        G.f[(static_cast<size_t>(a) * G.d + b) * G.d + c] = v;
      }
    }
}

}  // namespace

ModelPtr build_model(const std::string& kind) {
  auto G = std::make_shared<GroupModel>();
  G->name = kind;
  if (kind == "su2") {
    G->n = 2;
    G->basis = su2_basis();
  } else if (kind == "su3") {
    G->n = 3;
    G->basis = su3_basis();
  } else if (kind == "so3") {
    G->n = 3;
    G->basis = so3_basis();
    G->ip_scale = 0.5;
    G->real_entries = true;
  } else if (kind.rfind("torus", 0) == 0) {
    int k = std::stoi(kind.substr(5));
    if (k < 1 || k > 8) throw std::domain_error("build_model: torus rank out of range: " + kind);
    G->n = k;
    G->basis = torus_basis(k);
    G->det_one = false;
  } else {
    throw std::domain_error("build_model: unknown group kind '" + kind + "'");
  }
  G->d = static_cast<int>(G->basis.size());
  fill_structure_constants(*G);
  return G;
}

RMat analytic_of_ad(const GroupModel& G, const RVec& xi, const std::function<cxd(cxd)>& fn) {
  double imag = 0;
  RMat out = spectral_apply_antisym(G.ad(xi), fn, &imag);
  if (imag > 1e-9)
    throw std::runtime_error("analytic_of_ad: function does not respect conjugate symmetry");
  return out;
}

namespace {

// Series of nu(s)=s/(1-e^{-s}) about 0: 1 + s/2 + s^2/12 - s^4/720 + s^6/30240.
cxd nu_series(cxd s) {
  cxd s2 = s * s;
  return 1.0 + s / 2.0 + s2 / 12.0 - s2 * s2 / 720.0 + s2 * s2 * s2 / 30240.0;
}

// Series of phi(s)=1/s-(1/2)coth(s/2): -s/12 + s^3/720 - s^5/30240.
cxd phi_series(cxd s) {
  cxd s2 = s * s;
  return s * (-1.0 / 12.0 + s2 / 720.0 - s2 * s2 / 30240.0);
}

}  // namespace

cxd nu_fn(cxd s) {
  if (std::abs(s) < 1e-3) return nu_series(s);
  cxd den = 1.0 - std::exp(-s);
  if (std::abs(den) < 1e-12)
    throw std::domain_error("nu: pole at spectral point s = " + std::to_string(s.real()) + "+" +
                            std::to_string(s.imag()) + "i");
  return s / den;
}

cxd phi_fn(cxd s) {
  if (std::abs(s) < 1e-3) return phi_series(s);
  cxd em = std::exp(-s);
  cxd den = 1.0 - em;
  if (std::abs(den) < 1e-12)
    throw std::domain_error("phi: pole at spectral point s = " + std::to_string(s.real()) + "+" +
                            std::to_string(s.imag()) + "i");
  // (1/2)coth(s/2) = (1/2)(1+e^{-s})/(1-e^{-s})
  return 1.0 / s - 0.5 * (1.0 + em) / den;
}

CentralizerSplit centralizer_split(const GroupModel& G, const CMat& g) {
  RMat K = G.Ad(g) - RMat::Identity(G.d, G.d);
  Eigen::JacobiSVD<RMat> svd(K, Eigen::ComputeFullV);
  RVec sv = svd.singularValues();
  double smax = sv.size() ? sv[0] : 0.0;
  double th = G.tol.rank_rel * std::max(smax, 1.0);
  int k = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] < th) ++k;
  CentralizerSplit out;
  out.dim_h = k;
  out.h_basis = svd.matrixV().rightCols(k);
  out.perp_basis = svd.matrixV().leftCols(G.d - k);
  out.proj_h = out.h_basis * out.h_basis.transpose();
  out.proj_perp = RMat::Identity(G.d, G.d) - out.proj_h;
  return out;
}

std::vector<double> embedded_subalgebra_f(const GroupModel& G, const RMat& proj_h) {
  std::vector<double> fh(static_cast<size_t>(G.d) * G.d * G.d, 0.0);
  std::vector<CMat> pe(G.d);
  for (int a = 0; a < G.d; ++a) {
    RVec col = proj_h.col(a);
    pe[a] = G.alg_of(col);
  }
  for (int b = 0; b < G.d; ++b)
    for (int c = 0; c < G.d; ++c) {
      CMat br = G.bracket(pe[b], pe[c]);
      for (int a = 0; a < G.d; ++a)
        fh[(static_cast<size_t>(a) * G.d + b) * G.d + c] = G.inner(pe[a], br);
    }
  return fh;
}

GroupModel subgroup_model(const GroupModel& G, const RMat& h_basis, const std::string& name) {
  GroupModel H;
  H.name = name;
  H.n = G.n;
  H.d = static_cast<int>(h_basis.cols());
  H.basis.reserve(H.d);
  for (int a = 0; a < H.d; ++a) H.basis.push_back(G.alg_of(h_basis.col(a)));
  H.ip_scale = G.ip_scale;
  H.det_one = G.det_one;
  H.real_entries = G.real_entries;
  H.tol = G.tol;
  H.f.assign(static_cast<size_t>(H.d) * H.d * H.d, 0.0);
  for (int b = 0; b < H.d; ++b)
    for (int c = 0; c < H.d; ++c) {
      CMat br = G.bracket(H.basis[b], H.basis[c]);
      for (int a = 0; a < H.d; ++a)
        H.f[(static_cast<size_t>(a) * H.d + b) * H.d + c] = G.inner(H.basis[a], br);
    }
  return H;
}

std::string model_to_json(const GroupModel& G) {
  json j;
  j["name"] = G.name;
  j["n"] = G.n;
  j["d"] = G.d;
  json basis = json::array();
  for (const CMat& m : G.basis) {
    json rows = json::array();
    for (int r = 0; r < G.n; ++r)
      for (int c = 0; c < G.n; ++c) rows.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    basis.push_back(rows);
  }
  j["basis"] = basis;
  j["f"] = G.f;
  j["ip_scale"] = G.ip_scale;
  j["det_one"] = G.det_one;
  j["real_entries"] = G.real_entries;
  j["tolerances"] = {{"closed_form", G.tol.closed_form}, {"fd_first", G.tol.fd_first},
                     {"fd_second", G.tol.fd_second},     {"rank_rel", G.tol.rank_rel},
                     {"exp_drift", G.tol.exp_drift},     {"log_branch", G.tol.log_branch},
                     {"natural_margin", G.tol.natural_margin}};
  return j.dump(2);
}

GroupModel model_from_json(const std::string& text) {
  json j = json::parse(text);
  GroupModel G;
  G.name = j.at("name").get<std::string>();
  G.n = j.at("n").get<int>();
  G.d = j.at("d").get<int>();
  for (const auto& mat : j.at("basis")) {
    CMat m(G.n, G.n);
    int idx = 0;
    for (int r = 0; r < G.n; ++r)
      for (int c = 0; c < G.n; ++c, ++idx)
        m(r, c) = cxd(mat[idx][0].get<double>(), mat[idx][1].get<double>());
    G.basis.push_back(m);
  }
  G.f = j.at("f").get<std::vector<double>>();
  G.ip_scale = j.at("ip_scale").get<double>();
  G.det_one = j.at("det_one").get<bool>();
  G.real_entries = j.at("real_entries").get<bool>();
  const auto& t = j.at("tolerances");
  G.tol.closed_form = t.at("closed_form").get<double>();
  G.tol.fd_first = t.at("fd_first").get<double>();
  G.tol.fd_second = t.at("fd_second").get<double>();
  G.tol.rank_rel = t.at("rank_rel").get<double>();
  G.tol.exp_drift = t.at("exp_drift").get<double>();
  G.tol.log_branch = t.at("log_branch").get<double>();
  G.tol.natural_margin = t.at("natural_margin").get<double>();
  return G;
}

RVec random_algebra(const GroupModel& G, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> N(0.0, 1.0);
  RVec v(G.d);
  for (int a = 0; a < G.d; ++a) v[a] = N(rng);
  v *= scale / std::sqrt(static_cast<double>(G.d));
  // Keep exponential coordinates well inside the principal branch.
  for (int guard = 0; guard < 8; ++guard) {
    RVec th = eigenphases(G.exp_coords(v));
    double worst = 0;
    for (int k = 0; k < th.size(); ++k) worst = std::max(worst, std::abs(th[k]));
    if (worst < M_PI - 0.35) break;
    v *= 0.5;
  }
  return v;
}

CMat random_group(const GroupModel& G, std::mt19937_64& rng, double scale) {
  return G.exp_coords(random_algebra(G, rng, scale));
}

}  // namespace qpl
