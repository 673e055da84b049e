#pragma once

// R-matrix of SO_{q,r}(M), its metric, projectors, and identity suites.

#include <chrono>
#include <string>

#include "orthoq/itensor.hpp"
#include "orthoq/linalg.hpp"
#include "orthoq/report.hpp"

namespace orthoq {

/// Nonzero components of R, read off the explicit table.
inline SparseTensor4 build_R(const GeometryPtr& g) {
  const int m = g->dim();
  const int n2 = g->n2();
  const Scalar r = g->r();
  const Scalar rinv = Scalar::s_pow(-2);
  const Scalar lam = g->lambda();
  SparseTensor4 R(g);
  for (int a = 0; a < m; ++a) {
    const int ap = g->prime(a);
    if (a == n2) {
      R.set({a, a, a, a}, Scalar(1));
    } else {
      R.set({a, a, a, a}, r);
      R.set({a, ap, a, ap}, rinv);
    }
    for (int b = 0; b < m; ++b) {
      if (a == b || ap == b) continue;
      R.set({a, b, a, b}, r / g->q(a, b));
      if (a > b) R.set({a, b, b, a}, lam);
    }
    if (a > ap) R.set({a, ap, ap, a}, lam * (Scalar(1) - g->r_half(g->rho2(a) - g->rho2(ap))));
    for (int b = 0; b < a; ++b) {
      if (ap == b) continue;
      R.add({a, ap, b, g->prime(b)}, -lam * g->r_half(g->rho2(a) - g->rho2(b)));
    }
  }
  return R;
}

inline SparseTensor4 build_R(int dim) { return build_R(make_geometry(dim)); }

inline MetricVec build_metric(const GeometryPtr& g) { return MetricVec(g); }

/// R-hat: Rhat^{ab}_{cd} = R^{ba}_{cd}.
inline SparseTensor4 hat(const SparseTensor4& R) { return R.swap_upper(); }

/// Inverse of R-hat as an operator: (R^{-1})^{ab}_{dc}.
inline SparseTensor4 hat_inverse(const SparseTensor4& Rinv) { return Rinv.swap_lower(); }

/// R_plus^{AC}_{BD} = R^{CA}_{DB}.
inline SparseTensor4 r_plus(const SparseTensor4& R) { return R.swap_upper().swap_lower(); }

struct RMatrixBundle {
  GeometryPtr geometry;
  SparseTensor4 R, Rhat, Rinv, Rhatinv, Rplus, Rminus;
  MetricVec C;
  SparseTensor4 K, P0, PS, PA;
  Scalar trace;  // C_ab C^ab

  explicit RMatrixBundle(GeometryPtr g) : geometry(g), C(g) {
    R = build_R(g);
    Rhat = hat(R);
    Rinv = R.map_params(inversion_map());
    Rhatinv = hat_inverse(Rinv);
    Rplus = r_plus(R);
    Rminus = Rinv;
    build_projectors();
  }

  static RMatrixBundle make(int dim) { return RMatrixBundle(make_geometry(dim)); }

 private:
  void build_projectors() {
    const int m = geometry->dim();
    K = SparseTensor4(geometry);
    trace = Scalar();
    for (int a = 0; a < m; ++a) {
      trace += C(a, geometry->prime(a)) * C(a, geometry->prime(a));
      for (int c = 0; c < m; ++c)
        K.set({a, geometry->prime(a), c, geometry->prime(c)}, C(a, geometry->prime(a)) * C(c, geometry->prime(c)));
    }
    P0 = K.scaled(trace.inverse());
    const Scalar r = geometry->r();
    const Scalar rinv = Scalar::s_pow(-2);
    const Scalar r1n = Scalar::s_pow(2 * (1 - m));
    const Scalar norm = (r + rinv).inverse();
    SparseTensor4 id = SparseTensor4::identity(geometry);
    PS = (Rhat + id.scaled(rinv) - P0.scaled(rinv + r1n)).scaled(norm);
    PA = (id.scaled(r) - Rhat - P0.scaled(r - r1n)).scaled(norm);
  }
};

/// Independent oracle: the closed formula with the n2 factor
/// (1 - delta^{a n2} delta^{b n2}) on the diagonal block.
inline Scalar r_formula_entry(const IndexGeometry& g, int a, int b, int c, int d) {
  const int n2 = g.n2();
  const Scalar r = g.r();
  Scalar out;
  if (a == c && b == d) {
    if (!(a == n2 && b == n2)) {
      Scalar t = r / g.q(a, b);
      if (a == b) t += r - Scalar(1);
      if (b == g.prime(a)) t += Scalar::s_pow(-2) - Scalar(1);
      out += t;
    } else {
      out += Scalar(1);
    }
  }
  Scalar lam_part;
  if (a > b && b == c && a == d) lam_part += Scalar(1);
  if (a > c && g.prime(a) == b && g.prime(c) == d) lam_part -= g.r_half(g.rho2(a) - g.rho2(c));
  return out + lam_part * g.lambda();
}

inline json index_witness(const std::vector<int>& idx) {
  json j = json::array();
  for (int i : idx) j.push_back(i + 1);
  return j;
}

inline json tensor_witness(const TensorDiff& d, const std::vector<std::string>& names) {
  json w;
  w["idx"] = index_witness(d.index);
  w["lhs"] = d.lhs.to_string(names);
  w["rhs"] = d.rhs.to_string(names);
  return w;
}

inline json matrix_witness(const MatrixDiff& d, int dim, const std::vector<std::string>& names) {
  json w;
  std::vector<int> idx = decode_multi(d.row, dim, 3);
  std::vector<int> col = decode_multi(d.col, dim, 3);
  idx.insert(idx.end(), col.begin(), col.end());
  w["idx"] = index_witness(idx);
  w["lhs"] = d.lhs.to_string(names);
  w["rhs"] = d.rhs.to_string(names);
  return w;
}

/// R12 R13 R23 == R23 R13 R12 on V (x) V (x) V.
inline MatrixDiff check_qybe(const SparseTensor4& R) {
  SparseMatrix lhs = triple_compose({{&R, Slot::s12}, {&R, Slot::s13}, {&R, Slot::s23}});
  SparseMatrix rhs = triple_compose({{&R, Slot::s23}, {&R, Slot::s13}, {&R, Slot::s12}});
  return matrix_equal(lhs, rhs);
}

/// Braid form: Rhat12 Rhat23 Rhat12 == Rhat23 Rhat12 Rhat23.
inline MatrixDiff check_braid(const SparseTensor4& Rhat) {
  SparseMatrix lhs = triple_compose({{&Rhat, Slot::s12}, {&Rhat, Slot::s23}, {&Rhat, Slot::s12}});
  SparseMatrix rhs = triple_compose({{&Rhat, Slot::s23}, {&Rhat, Slot::s12}, {&Rhat, Slot::s23}});
  return matrix_equal(lhs, rhs);
}

/// Evaluate a tensor at a rational point as a dense M^2 x M^2 matrix.
inline std::vector<std::vector<Rational>> dense_at(const SparseTensor4& t, const Point& p) {
  const int m = t.dim();
  std::vector<std::vector<Rational>> out(m * m, std::vector<Rational>(m * m, Rational(0)));
  for (const auto& [k, v] : t.entries()) out[k[0] * m + k[1]][k[2] * m + k[3]] = v.specialize(p);
  return out;
}

/// Rank at two generic points; returns -1 if they disagree.
inline int generic_rank(const SparseTensor4& t) {
  const ParamSpace& ps = t.geometry().params();
  std::size_t r1 = rational_rank(dense_at(t, generic_point(ps, 0)));
  std::size_t r2 = rational_rank(dense_at(t, generic_point(ps, 1)));
  return r1 == r2 ? static_cast<int>(r1) : -1;
}

namespace detail {

template <class F>
TensorDiff build_and_compare(const GeometryPtr& g, F&& lhs_rhs) {
  const int m = g->dim();
  TensorDiff d;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int e = 0; e < m; ++e) {
          auto [l, r] = lhs_rhs(a, b, c, e);
          if (!(l == r)) {
            d.equal = false;
            d.index = {a, b, c, e};
            d.lhs = l;
            d.rhs = r;
            return d;
          }
        }
  return d;
}

}  // namespace detail

/// Two-index metric contractions; the callback returns (lhs, rhs) for (i, j).
template <class F>
TensorDiff compare_pairs(const GeometryPtr& g, F&& lhs_rhs) {
  const int m = g->dim();
  TensorDiff d;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      auto [l, r] = lhs_rhs(i, j);
      if (!(l == r)) {
        d.equal = false;
        d.index = {i, j};
        d.lhs = l;
        d.rhs = r;
        return d;
      }
    }
  return d;
}

/// Identity suite for one dimension.
inline Report verify_rmatrix_suite(const RMatrixBundle& B, bool with_ranks = true) {
  const GeometryPtr& g = B.geometry;
  const int m = g->dim();
  const auto& names = g->params().var_names();
  const MetricVec& C = B.C;
  Report rep("rmatrix");
  auto add_diff = [&](const std::string& name, const std::string& ref, const TensorDiff& d, bool asserted = true) {
    json w = d.equal ? json(nullptr) : tensor_witness(d, names);
    if (asserted)
      rep.add(name, ref, d.equal, w);
    else
      rep.note(name, ref, d.equal, w);
  };

  // Construction cross-check against the closed formula.
  add_diff("R matches closed formula", "Rmp", detail::build_and_compare(g, [&](int a, int b, int c, int d) {
             return std::pair{B.R(a, b, c, d), r_formula_entry(*g, a, b, c, d)};
           }));

  MatrixDiff q = check_qybe(B.R);
  rep.add("QYBE R12 R13 R23 = R23 R13 R12", "QYB", q.equal, q.equal ? json(nullptr) : matrix_witness(q, m, names));
  MatrixDiff br = check_braid(B.Rhat);
  rep.add("braid relation for Rhat", "QYB", br.equal, br.equal ? json(nullptr) : matrix_witness(br, m, names));

  {
    TensorDiff d;
    for (const auto& [k, v] : B.R.entries())
      if ((k[0] == k[2] && k[1] < k[3]) || k[0] < k[2]) {
        d.equal = false;
        d.index.assign(k.begin(), k.end());
        d.lhs = v;
        break;
      }
    add_diff("R upper triangular", "Rprop1", d);
  }

  SparseTensor4 id = SparseTensor4::identity(g);
  add_diff("R Rinv = I (Rinv by parameter inversion)", "Rprop1", tensor_equal(tensor_compose(B.R, B.Rinv), id));
  add_diff("Rinv R = I", "Rprop1", tensor_equal(tensor_compose(B.Rinv, B.R), id));

  {
    SparseTensor4 Rp = B.R.map_params(transpose_map());
    add_diff("(R_q)^{ab}_{cd} = (R_p)^{dc}_{ba}, p_ab = q_ba", "Rprop1",
             detail::build_and_compare(g, [&](int a, int b, int c, int d) {
               return std::pair{B.R(a, b, c, d), Rp(d, c, b, a)};
             }));
    add_diff("candidate R^{ab}_{cd} = R^{c'd'}_{a'b'}", "Rprop1", detail::build_and_compare(g, [&](int a, int b, int c, int d) {
               return std::pair{B.R(a, b, c, d), B.R(g->prime(c), g->prime(d), g->prime(a), g->prime(b))};
             }),
             false);
  }

  // crc1: C_ab Rhat^{bc}_{de} = Rhatinv^{cf}_{ad} C_fe ; crc2: Rhat^{bc}_{de} C^{ea} = C^{bf} Rhatinv^{ca}_{fd}
  auto crc1 = [&](const SparseTensor4& X, const SparseTensor4& Y) {
    return detail::build_and_compare(g, [&](int a, int c, int d, int e) {
      const int b = g->prime(a);
      const int f = g->prime(e);
      return std::pair{C(a, b) * X(b, c, d, e), Y(c, f, a, d) * C(f, e)};
    });
  };
  auto crc2 = [&](const SparseTensor4& X, const SparseTensor4& Y) {
    return detail::build_and_compare(g, [&](int b, int c, int d, int a) {
      const int e = g->prime(a);
      const int f = g->prime(b);
      return std::pair{X(b, c, d, e) * C(e, a), C(b, f) * Y(c, a, f, d)};
    });
  };
  add_diff("C Rhat = Rhatinv C", "crc1", crc1(B.Rhat, B.Rhatinv));
  add_diff("Rhat C = C Rhatinv", "crc2", crc2(B.Rhat, B.Rhatinv));
  add_diff("C Rhatinv = Rhat C", "crc1", crc1(B.Rhatinv, B.Rhat));
  add_diff("Rhatinv C = C Rhat", "crc2", crc2(B.Rhatinv, B.Rhat));

  const Scalar r1n = Scalar::s_pow(2 * (1 - m));
  add_diff("C_ab Rhat^{ab}_{cd} = r^{1-N} C_cd", "CR", compare_pairs(g, [&](int c, int d) {
             Scalar sum;
             for (int a = 0; a < m; ++a) sum += C(a, g->prime(a)) * B.Rhat(a, g->prime(a), c, d);
             return std::pair{sum, r1n * C(c, d)};
           }));
  add_diff("C^{cd} Rhat^{ab}_{cd} = r^{1-N} C^{ab}", "CR", compare_pairs(g, [&](int a, int b) {
             Scalar sum;
             for (int c = 0; c < m; ++c) sum += C(c, g->prime(c)) * B.Rhat(a, b, c, g->prime(c));
             return std::pair{sum, r1n * C(a, b)};
           }));

  // R^{ab}_{cc'} = -lambda C^{ba} C_{cc'} and R^{aa'}_{cd} = -lambda C^{a'a} C_{cd}, a > c, a != c'.
  {
    const Scalar lam = g->lambda();
    TensorDiff d1, d2, lit;
    for (int a = 0; a < m && d1.equal && d2.equal; ++a)
      for (int c = 0; c < a; ++c) {
        if (a == g->prime(c)) continue;
        for (int b = 0; b < m; ++b) {
          Scalar lhs = B.R(a, b, c, g->prime(c));
          Scalar rhs = -lam * C(b, a) * C(c, g->prime(c));
          if (!(lhs == rhs) && d1.equal) d1 = {false, {a, b, c, g->prime(c)}, lhs, rhs};
          Scalar printed = C(a, b) * C(c, g->prime(c));
          if (!(lhs == printed) && lit.equal) lit = {false, {a, b, c, g->prime(c)}, lhs, printed};
        }
        for (int d = 0; d < m; ++d) {
          Scalar lhs = B.R(a, g->prime(a), c, d);
          Scalar rhs = -lam * C(g->prime(a), a) * C(c, d);
          if (!(lhs == rhs) && d2.equal) d2 = {false, {a, g->prime(a), c, d}, lhs, rhs};
        }
      }
    add_diff("R^{ab}_{cc'} = -lambda C^{ba} C_{cc'} (a>c, a!=c')", "foraa'", d1);
    add_diff("R^{aa'}_{cd} = -lambda C^{a'a} C_{cd} (a>c, a!=c')", "foraa'", d2);
    add_diff("printed form R^{ab}_{cc'} = C^{ab} C_{cc'}", "foraa'", lit, false);
  }

  // Projectors.
  add_diff("P_S + P_A + P_0 = I", "proiett", tensor_equal(B.PS + B.PA + B.P0, id));
  const std::pair<const SparseTensor4*, const char*> projs[] = {{&B.PS, "P_S"}, {&B.PA, "P_A"}, {&B.P0, "P_0"}};
  for (const auto& [p, pn] : projs)
    add_diff(std::string(pn) + "^2 = " + pn, "proiett", tensor_equal(tensor_compose(*p, *p), *p));
  SparseTensor4 zero(g);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j)
        add_diff(std::string(projs[i].second) + " " + projs[j].second + " = 0", "proiett",
                 tensor_equal(tensor_compose(*projs[i].first, *projs[j].first), zero));
  {
    const Scalar r = g->r();
    SparseTensor4 rhs = B.PS.scaled(r) - B.PA.scaled(Scalar::s_pow(-2)) + B.P0.scaled(r1n);
    add_diff("Rhat = r P_S - r^{-1} P_A + r^{1-N} P_0", "proiett", tensor_equal(B.Rhat, rhs));
  }
  if (with_ranks) {
    const int ra = generic_rank(B.PA), r0 = generic_rank(B.P0), rs = generic_rank(B.PS);
    json w{{"P_S", rs}, {"P_A", ra}, {"P_0", r0}};
    rep.add("projector ranks N(N+1)/2-1, N(N-1)/2, 1", "proiett",
            rs == m * (m + 1) / 2 - 1 && ra == m * (m - 1) / 2 && r0 == 1, w);
  }
  return rep;
}

inline Report verify_rmatrix_suite(int dim) { return verify_rmatrix_suite(RMatrixBundle::make(dim)); }

/// Block comparison of R_{N+2} with the SO(N) decomposition.
inline Report decompose_embedding(int n) {
  Report rep("embedding");
  const int M = n + 2;
  auto big = make_geometry(M);
  auto inner = IndexGeometry::block(n, 1, M);
  const auto& names = big->params().var_names();
  SparseTensor4 Rb = build_R(big);
  SparseTensor4 Ri = build_R(inner);
  MetricVec Ci(inner);
  const int o = 0, bu = M - 1;  // circle and bullet
  const Scalar r = big->r(), rinv = Scalar::s_pow(-2), lam = big->lambda();
  const Scalar r_rho = Scalar::s_pow(n);  // r^{N/2}
  const Scalar r_mrho = Scalar::s_pow(-n);
  const Scalar f = lam * (Scalar(1) - Scalar::s_pow(-2 * n));

  SparseTensor4 T(big);
  T.set({o, o, o, o}, r);
  T.set({o, bu, o, bu}, rinv);
  T.set({bu, o, bu, o}, rinv);
  T.set({bu, bu, bu, bu}, r);
  T.set({bu, o, o, bu}, f);
  for (int a = 1; a <= n; ++a) {
    T.set({o, a, o, a}, r / big->q(o, a));
    T.set({bu, a, bu, a}, r / big->q(bu, a));
    T.set({a, o, a, o}, r / big->q(a, o));
    T.set({a, bu, a, bu}, r / big->q(a, bu));
    T.set({bu, a, a, bu}, lam);
    T.set({a, o, o, a}, lam);
    for (int b = 1; b <= n; ++b) {
      T.set({bu, o, a, b}, -Ci(a - 1, b - 1) * lam * r_mrho);
      T.set({a, b, o, bu}, -Ci(b - 1, a - 1) * lam * r_mrho);
      for (int c = 1; c <= n; ++c)
        for (int d = 1; d <= n; ++d) {
          Scalar v = Ri(a - 1, b - 1, c - 1, d - 1);
          if (!v.is_zero()) T.set({a, b, c, d}, v);
        }
    }
  }
  TensorDiff d = tensor_equal(Rb, T);
  rep.add("R_{N+2} equals block template", "Rbig", d.equal, d.equal ? json(nullptr) : tensor_witness(d, names));

  // Report where f(r) sits.
  std::string cell = "none";
  if (Rb(bu, o, o, bu) == f) cell = "row bullet-circle, column circle-bullet";
  if (Rb(o, bu, bu, o) == f) cell = "row circle-bullet, column bullet-circle";
  rep.note("f(r) = lambda(1 - r^{-2rho}) cell", "Rbig", cell != "none", json{{"cell", cell}});
  rep.add("C_{bullet circle} = r^{N/2}", "Rbig", MetricVec(big)(bu, o) == r_rho);
  rep.add("inner block equals R of SO(N)", "Rbig", detail::build_and_compare(inner, [&](int a, int b, int c, int e) {
                                                     return std::pair{Rb(a + 1, b + 1, c + 1, e + 1), Ri(a, b, c, e)};
                                                   }).equal);
  // classical limit: corners and f vanish
  Point p1 = make_point(big->params(), {{"s", 1}});
  for (int v = 1; v < big->params().num_vars(); ++v) p1[v] = Rational(1);
  bool classical = f.specialize(p1) == 0;
  for (int a = 1; a <= n; ++a) classical = classical && Rb(bu, o, a, M - 1 - a).specialize(p1) == 0;
  rep.add("classical limit kills f(r) and corners", "Rbig", classical);
  return rep;
}

}  // namespace orthoq
