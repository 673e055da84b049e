#pragma once

// Regular functionals on SO(M): the algebra generated by L+, L- and eps,
// evaluated on free words in the matrix entries T^A_B.
//
// A functional f is stored as an AlgebraElement whose letters are L+/L-
// generators; the empty word is eps and concatenation is the convolution
// product.  On words of length k, f is represented by the M^k x M^k matrix
// rho_k(f) with entries f(T^{C1}_{D1} ... T^{Ck}_{Dk}) (row C, column D),
// and rho_k(fg) = rho_k(f) rho_k(g).

#include <deque>
#include <mutex>
#include <optional>
#include <random>
#include <set>

#include "orthoq/linalg.hpp"
#include "orthoq/parallel.hpp"
#include "orthoq/presentation.hpp"

namespace orthoq {

using FunctionalElement = AlgebraElement;

struct NotInIU : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline FunctionalElement eps() { return FunctionalElement::one(); }
inline FunctionalElement lp(int a, int b) { return FunctionalElement::gen(gen_lp(a, b)); }
inline FunctionalElement lm(int a, int b) { return FunctionalElement::gen(gen_lm(a, b)); }
inline FunctionalElement lpm(bool plus, int a, int b) { return plus ? lp(a, b) : lm(a, b); }

inline bool is_functional_gen(Gen g) { return gen_kind(g) == GenKind::LPlus || gen_kind(g) == GenKind::LMinus; }

inline std::string functional_word_string(const Word& w) { return w.empty() ? "eps" : word_string(w); }

inline std::string functional_string(const FunctionalElement& f, const std::vector<std::string>& names) {
  if (f.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it) {
    if (!first) out += " + ";
    first = false;
    out += "(" + it->second.to_string(names) + ") " + functional_word_string(it->first);
  }
  return out;
}

/// T^{C1}_{D1} ... T^{Ck}_{Dk} from row and column codes at level k.
inline Word t_word(int row, int col, int m, int k) {
  std::vector<int> c = decode_multi(row, m, k), d = decode_multi(col, m, k);
  Word w;
  for (int i = 0; i < k; ++i) w.push_back(gen_big(c[i], d[i]));
  return w;
}

/// Evaluation engine for one SO(M) geometry, optionally at a monomial
/// specialization of the parameters (e.g. the uniparametric line).
class Evaluator {
 public:
  explicit Evaluator(GeometryPtr g, std::optional<std::array<Monomial, kMaxVars>> pmap = std::nullopt)
      : geom_(std::move(g)), C_(geom_), m_(geom_->dim()) {
    R_ = build_R(geom_);
    if (pmap) R_ = R_.map_params(*pmap);
    Rinv_ = R_.map_params(inversion_map());
    Rplus_ = r_plus(R_);
    by_first_[0].resize(m_);
    by_first_[1].resize(m_);
    for (const auto& [idx, v] : Rplus_.entries()) by_first_[0][idx[0]].push_back({idx[1], idx[2], idx[3], v});
    for (const auto& [idx, v] : Rinv_.entries()) by_first_[1][idx[0]].push_back({idx[1], idx[2], idx[3], v});
  }
  explicit Evaluator(int m) : Evaluator(make_geometry(m)) {}

  int dim() const { return m_; }
  const GeometryPtr& geometry_ptr() const { return geom_; }
  const IndexGeometry& geometry() const { return *geom_; }
  const std::vector<std::string>& names() const { return geom_->params().var_names(); }
  const SparseTensor4& R() const { return R_; }
  const SparseTensor4& Rinv() const { return Rinv_; }
  /// R+^{AC}_{BD} = R^{CA}_{DB}
  const SparseTensor4& Rplus() const { return Rplus_; }
  const SparseTensor4& Rminus() const { return Rinv_; }
  const MetricVec& C() const { return C_; }

  /// Make rho_k of every generator available for k <= level.
  void warm(int level) const {
    std::lock_guard<std::mutex> lock(mutex_);
    while (static_cast<int>(levels_.size()) <= level) build_next_level();
  }

  /// rho_k of a single L+ / L- generator.
  const SparseMatrix& gen_matrix(Gen g, int k) const {
    if (!is_functional_gen(g)) throw std::invalid_argument("not a functional generator: " + gen_name(g));
    warm(k);
    std::lock_guard<std::mutex> lock(mutex_);
    const int sign = gen_kind(g) == GenKind::LPlus ? 0 : 1;
    return levels_[k][sign][gen_i(g) * m_ + gen_j(g)];
  }

  /// rho_k(f).
  SparseMatrix matrix(const FunctionalElement& f, int k) const {
    const int n = ipow(m_, k);
    SparseMatrix out(n, n);
    for (const auto& [w, c] : f.terms()) {
      if (w.empty()) {
        out = out + SparseMatrix::identity(n).scaled(c);
        continue;
      }
      SparseMatrix acc = gen_matrix(w[0], k).scaled(c);
      for (std::size_t i = 1; i < w.size() && !acc.is_zero(); ++i) acc = acc * gen_matrix(w[i], k);
      out = out + acc;
    }
    return out;
  }

  /// f on a single word in the T alphabet.
  Scalar eval(const FunctionalElement& f, const Word& tword) const {
    const int k = static_cast<int>(tword.size());
    int row = 0, col = 0;
    for (Gen g : tword) {
      if (gen_kind(g) != GenKind::BigT || gen_i(g) >= m_ || gen_j(g) >= m_)
        throw std::invalid_argument("evaluation needs SO(M) matrix entries, got " + gen_name(g));
      row = row * m_ + gen_i(g);
      col = col * m_ + gen_j(g);
    }
    Scalar out;
    for (const auto& [w, c] : f.terms()) {
      std::map<int, Scalar> vec{{row, c}};
      for (Gen g : w) {
        const SparseMatrix& mat = gen_matrix(g, k);
        std::map<int, Scalar> next;
        for (const auto& [i, x] : vec)
          for (const auto& [j, y] : mat.row(i)) {
            auto [it, ins] = next.try_emplace(j, x * y);
            if (!ins) {
              it->second += x * y;
              if (it->second.is_zero()) next.erase(it);
            }
          }
        vec = std::move(next);
        if (vec.empty()) break;
      }
      auto it = vec.find(col);
      if (it != vec.end()) out += it->second;
    }
    return out;
  }

  /// f on an element of the free algebra over the T alphabet.
  Scalar eval(const FunctionalElement& f, const AlgebraElement& a) const {
    Scalar out;
    for (const auto& [w, c] : a.terms()) out += c * eval(f, w);
    return out;
  }

 private:
  struct Entry {
    int c, e, d;
    Scalar v;
  };

  void build_next_level() const {
    const int k = static_cast<int>(levels_.size());
    std::array<std::vector<SparseMatrix>, 2> level;
    if (k == 0) {
      for (int s = 0; s < 2; ++s)
        for (int a = 0; a < m_; ++a)
          for (int b = 0; b < m_; ++b) {
            SparseMatrix one(1, 1);
            if (a == b) one.add(0, 0, Scalar(1));
            level[s].push_back(std::move(one));
          }
      levels_.push_back(std::move(level));
      return;
    }
    const int sub = ipow(m_, k - 1);
    const int n = sub * m_;
    const auto& prev = levels_[k - 1];
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < m_; ++a)
        for (int b = 0; b < m_; ++b) {
          // rho_k(L^A_B)[(C1,c),(D1,d)] = sum_E Rpm^{A C1}_{E D1} rho_{k-1}(L^E_B)[c,d]
          SparseMatrix mat(n, n);
          for (const Entry& en : by_first_[s][a]) {
            const SparseMatrix& p = prev[s][en.e * m_ + b];
            for (int i = 0; i < sub; ++i)
              for (const auto& [j, w] : p.row(i)) mat.add(en.c * sub + i, en.d * sub + j, en.v * w);
          }
          level[s].push_back(std::move(mat));
        }
    levels_.push_back(std::move(level));
  }

  GeometryPtr geom_;
  MetricVec C_;
  int m_;
  SparseTensor4 R_, Rinv_, Rplus_;
  std::array<std::vector<std::vector<Entry>>, 2> by_first_;
  mutable std::mutex mutex_;
  mutable std::deque<std::array<std::vector<SparseMatrix>, 2>> levels_;
};

// ---------------------------------------------------------------------------
// Costructures

/// kappa'(L^A_B) = C^{A'A} L^{B'}_{A'} C_{BB'}, extended antimultiplicatively.
inline FunctionalElement antipode_L(const FunctionalElement& f, const MetricVec& C) {
  const int m = C.geometry().dim();
  FunctionalElement out;
  for (const auto& [w, c] : f.terms()) {
    FunctionalElement acc = FunctionalElement::scalar(c);
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      const int a = gen_i(*it), b = gen_j(*it);
      const int ap = m - 1 - a, bp = m - 1 - b;
      const Gen img = gen_kind(*it) == GenKind::LPlus ? gen_lp(bp, ap) : gen_lm(bp, ap);
      acc = acc * FunctionalElement::gen(img, C(ap, a) * C(b, bp));
    }
    out += acc;
  }
  return out;
}

/// Delta'(L^A_B) = sum_G L^A_G (x) L^G_B, extended multiplicatively.
inline TensorElement coproduct_L(const FunctionalElement& f, int m) {
  TensorElement out;
  for (const auto& [w, c] : f.terms()) {
    TensorElement acc = TensorElement::pure({}, {}, c);
    for (Gen g : w) {
      TensorElement d;
      const bool plus = gen_kind(g) == GenKind::LPlus;
      for (int x = 0; x < m; ++x) {
        const Gen l = plus ? gen_lp(gen_i(g), x) : gen_lm(gen_i(g), x);
        const Gen r = plus ? gen_lp(x, gen_j(g)) : gen_lm(x, gen_j(g));
        d.add({Word{l}, Word{r}}, Scalar(1));
      }
      acc = acc * d;
    }
    out += acc;
  }
  return out;
}

/// eps'(f) = f(I).
inline Scalar counit_L(const FunctionalElement& f) {
  Scalar out;
  for (const auto& [w, c] : f.terms()) {
    bool diag = true;
    for (Gen g : w) diag = diag && gen_i(g) == gen_j(g);
    if (diag) out += c;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Equality of functionals on free words of bounded length

struct FunctionalDiff {
  bool equal = true;
  Word word;
  Scalar lhs, rhs;

  json witness(const std::vector<std::string>& names) const {
    if (equal) return nullptr;
    return json{{"word", word_string(word)}, {"lhs", lhs.to_string(names)}, {"rhs", rhs.to_string(names)}};
  }
};

inline FunctionalDiff functional_equal(const Evaluator& ev, const FunctionalElement& f, const FunctionalElement& g,
                                       int degree) {
  FunctionalDiff d;
  const FunctionalElement diff = f - g;
  if (diff.is_zero()) return d;
  for (int k = 0; k <= degree; ++k) {
    SparseMatrix mat = ev.matrix(diff, k);
    for (int i = 0; i < mat.rows(); ++i)
      if (!mat.row(i).empty()) {
        d.equal = false;
        d.word = t_word(i, mat.row(i).front().first, ev.dim(), k);
        d.lhs = ev.eval(f, d.word);
        d.rhs = ev.eval(g, d.word);
        return d;
      }
  }
  return d;
}

/// One instance of a functional identity lhs = rhs.
struct FunctionalRelation {
  std::string family;
  std::string ref;
  std::string instance;
  FunctionalElement lhs, rhs;
};

/// Check every instance at the given degree; one report line per family.
inline Report check_functional_relations(const Evaluator& ev, const std::vector<FunctionalRelation>& rels, int degree,
                                         int jobs, const std::string& suite) {
  ev.warm(degree);
  std::vector<FunctionalDiff> diffs(rels.size());
  parallel_for(rels.size(), jobs, [&](std::size_t i) { diffs[i] = functional_equal(ev, rels[i].lhs, rels[i].rhs, degree); });
  Report rep(suite);
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::size_t, std::optional<std::size_t>>> fam;  // count, first failure
  for (std::size_t i = 0; i < rels.size(); ++i) {
    auto [it, ins] = fam.try_emplace(rels[i].family, 0, std::nullopt);
    if (ins) order.push_back(rels[i].family);
    ++it->second.first;
    if (!diffs[i].equal && !it->second.second) it->second.second = i;
  }
  for (const auto& name : order) {
    const auto& [count, bad] = fam.at(name);
    std::size_t first = 0;
    while (rels[first].family != name) ++first;
    if (bad) {
      json w = diffs[*bad].witness(ev.names());
      w["instance"] = rels[*bad].instance;
      w["instances"] = count;
      rep.add(name, rels[first].ref, false, w);
    } else {
      rep.add(name, rels[first].ref, true, json{{"instances", count}, {"degree", degree}});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Relation instances

namespace detail {

/// X^{AB}_{EF} grouped by the upper pair and by the lower pair.
struct PairIndex {
  std::map<std::pair<int, int>, std::vector<std::tuple<int, int, Scalar>>> upper, lower;
  explicit PairIndex(const SparseTensor4& x) {
    for (const auto& [k, v] : x.entries()) {
      upper[{k[0], k[1]}].emplace_back(k[2], k[3], v);
      lower[{k[2], k[3]}].emplace_back(k[0], k[1], v);
    }
  }
  const std::vector<std::tuple<int, int, Scalar>>& up(int a, int b) const {
    static const std::vector<std::tuple<int, int, Scalar>> none;
    auto it = upper.find({a, b});
    return it == upper.end() ? none : it->second;
  }
  const std::vector<std::tuple<int, int, Scalar>>& low(int c, int d) const {
    static const std::vector<std::tuple<int, int, Scalar>> none;
    auto it = lower.find({c, d});
    return it == lower.end() ? none : it->second;
  }
};

inline std::string idx_label(std::initializer_list<int> ids) {
  std::string s;
  for (int i : ids) s += (s.empty() ? "" : ",") + std::to_string(i);
  return s;
}

}  // namespace detail

using LMatrix = std::function<FunctionalElement(int, int)>;

/// X_12 L2_2 L1_1 = L1_1 L2_2 X_12 in components:
/// X^{AB}_{EF} L2^F_D L1^E_C = L1^A_E L2^B_F X^{EF}_{CD}.
inline std::vector<FunctionalRelation> exchange_relations(const SparseTensor4& X, const LMatrix& L1, const LMatrix& L2,
                                                          const std::string& family, const std::string& ref) {
  const int m = X.dim();
  detail::PairIndex ix(X);
  std::vector<FunctionalRelation> out;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) {
          FunctionalElement lhs, rhs;
          for (const auto& [e, f, v] : ix.up(a, b)) lhs += (L2(f, d) * L1(e, c)).scaled(v);
          for (const auto& [e, f, v] : ix.low(c, d)) rhs += (L1(a, e) * L2(b, f)).scaled(v);
          out.push_back({family, ref, detail::idx_label({a, b, c, d}), lhs, rhs});
        }
  return out;
}

/// C^{AB} L^C_B L^D_A = C^{DC} eps and C_{AB} L^B_C L^A_D = C_{DC} eps.
inline std::vector<FunctionalRelation> orthogonality_relations(const MetricVec& C, const LMatrix& L,
                                                               const std::string& tag) {
  const int m = C.geometry().dim();
  std::vector<FunctionalRelation> out;
  for (int c = 0; c < m; ++c)
    for (int d = 0; d < m; ++d) {
      FunctionalElement l1, l2;
      for (int a = 0; a < m; ++a) {
        const int ap = m - 1 - a;
        l1 += (L(c, ap) * L(d, a)).scaled(C(a, ap));
        l2 += (L(ap, c) * L(a, d)).scaled(C(a, ap));
      }
      out.push_back({tag + " CLL1", "CLL1", detail::idx_label({c, d}), l1, eps().scaled(C(d, c))});
      out.push_back({tag + " CLL2", "CLL2", detail::idx_label({c, d}), l2, eps().scaled(C(d, c))});
    }
  return out;
}

/// The matrix 𝓡: R on inner index pairs, the diagonal R^{AB}_{AB}
/// elsewhere, zero otherwise.
inline SparseTensor4 iso_rmatrix(const SparseTensor4& R) {
  const int m = R.dim();
  auto inner = [&](int i) { return i > 0 && i < m - 1; };
  SparseTensor4 out(R.geometry_ptr());
  for (const auto& [k, v] : R.entries()) {
    const bool all_inner = inner(k[0]) && inner(k[1]) && inner(k[2]) && inner(k[3]);
    const bool diagonal = k[0] == k[2] && k[1] == k[3];
    if (all_inner || diagonal) out.set(k, v);
  }
  return out;
}

/// 𝓛+: L+ restricted to inner blocks plus the two corner diagonals.
inline FunctionalElement cal_lp(int a, int b, int m) {
  auto inner = [&](int i) { return i > 0 && i < m - 1; };
  if ((inner(a) && inner(b)) || (a == b && (a == 0 || a == m - 1))) return lp(a, b);
  return {};
}

/// Monomial F^4 value (q_{AC}/r)^2.
inline Scalar twist_f4(const IndexGeometry& g, int a, int c) {
  const Scalar x = g.q(a, c) * Scalar::s_pow(-2);
  return x * x;
}

/// rho_k of the character T^C_D -> chi(C) delta^C_D, as a functional check
/// target for (1effe1).
inline bool character_matches(const Evaluator& ev, const FunctionalElement& f, const std::vector<Scalar>& chi,
                              int degree, FunctionalDiff& diff) {
  const int m = ev.dim();
  for (int k = 0; k <= degree; ++k) {
    SparseMatrix got = ev.matrix(f, k);
    const int n = ipow(m, k);
    SparseMatrix want(n, n);
    for (int i = 0; i < n; ++i) {
      Scalar v(1);
      for (int c : decode_multi(i, m, k)) v *= chi[c];
      want.add(i, i, v);
    }
    MatrixDiff d = matrix_equal(got, want);
    if (!d.equal) {
      diff.equal = false;
      diff.word = t_word(d.row, d.col, m, k);
      diff.lhs = d.lhs;
      diff.rhs = d.rhs;
      return false;
    }
  }
  return true;
}

struct EnvelopeOptions {
  int degree = 3;
  int jobs = 1;
};

inline int default_envelope_degree(int n) { return n <= 3 ? 3 : 2; }

/// Relation suite for the functionals of SO(N+2) and the IU subalgebra.
inline Report verify_envelope_suite(int n, EnvelopeOptions opt = {}) {
  const int m = n + 2;
  const int o = 0, bu = m - 1;
  Evaluator ev(make_geometry(m));
  const IndexGeometry& g = ev.geometry();
  const MetricVec& C = ev.C();
  const SparseTensor4& R = ev.R();
  const int D = opt.degree;
  ev.warm(D);
  Report rep("envelope");

  LMatrix Lp = [](int a, int b) { return lp(a, b); };
  LMatrix Lm = [](int a, int b) { return lm(a, b); };
  LMatrix Lcal = [m](int a, int b) { return cal_lp(a, b, m); };

  // Triangularity on every level up to D.
  {
    bool ok = true;
    json wit;
    for (int a = 0; a < m && ok; ++a)
      for (int b = 0; b < a && ok; ++b)
        for (int k = 1; k <= D && ok; ++k) {
          if (!ev.gen_matrix(gen_lp(a, b), k).is_zero()) {
            ok = false;
            wit = json{{"functional", gen_name(gen_lp(a, b))}, {"level", k}};
          } else if (!ev.gen_matrix(gen_lm(b, a), k).is_zero()) {
            ok = false;
            wit = json{{"functional", gen_name(gen_lm(b, a))}, {"level", k}};
          }
        }
    rep.add("L+ upper and L- lower triangular", "LonT", ok, wit);
  }

  // Well defined on SO(M): the functionals vanish on RTT and CTT relations.
  {
    Presentation so = build_so(m);
    bool ok = true;
    json wit;
    for (int a = 0; a < m && ok; ++a)
      for (int b = 0; b < m && ok; ++b)
        for (bool plus : {true, false}) {
          FunctionalElement f = lpm(plus, a, b);
          for (const auto& rel : so.relations) {
            Scalar v = ev.eval(f, rel.value);
            if (!v.is_zero()) {
              ok = false;
              wit = json{{"functional", functional_string(f, ev.names())}, {"relation", rel.label}};
              break;
            }
          }
          if (!ok) break;
        }
    rep.add("L+- vanish on the defining relations of SO(M)", "LonT", ok, wit);
  }

  std::vector<FunctionalRelation> rels;
  auto append = [&](std::vector<FunctionalRelation> more) {
    for (auto& r : more) rels.push_back(std::move(r));
  };
  append(exchange_relations(R, Lp, Lp, "RLL (L+)", "RLL"));
  append(exchange_relations(R, Lm, Lm, "RLL (L-)", "RLL"));
  append(exchange_relations(R, Lm, Lp, "RL+L-", "RLpLm"));
  append(orthogonality_relations(C, Lp, "L+"));
  append(orthogonality_relations(C, Lm, "L-"));

  // det L = eps and L^A_A L^{A'}_{A'} = eps.
  for (bool plus : {true, false}) {
    const std::string t = plus ? "L+" : "L-";
    FunctionalElement det = eps();
    for (int a = 0; a < m; ++a) det = det * lpm(plus, a, a);
    rels.push_back({"det " + t + " = eps", "detL", "", det, eps()});
    for (int a = 0; a < m; ++a) {
      const int ap = m - 1 - a;
      rels.push_back({t + "^A_A " + t + "^A'_A' = eps", "detL", std::to_string(a),
                      lpm(plus, a, a) * lpm(plus, ap, ap), eps()});
    }
    if (g.n2() >= 0) rels.push_back({t + "^n2_n2 = eps", "detL", "", lpm(plus, g.n2(), g.n2()), eps()});
  }

  // Quantum-plane relations of the L-^a_o.
  {
    IsoContext ctx(n);
    const SparseTensor4& PA = ctx.inner_bundle().PA;
    const SparseTensor4 PAinv = PA.map_params(inversion_map());
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        FunctionalElement l1, l2, l3;
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            l1 += (lm(d + 1, o) * lm(c + 1, o)).scaled(PA(a, b, c, d));
            l2 += (lm(c + 1, o) * lm(d + 1, o)).scaled(PAinv(a, b, c, d));
            l3 += (lm(c + 1, o) * lm(d + 1, o)).scaled(PA(a, b, d, c));  // P_A^{ab}_{fe} L^e L^f
          }
        const std::string id = detail::idx_label({a + 1, b + 1});
        rels.push_back({"P_A L-^d_o L-^c_o = 0", "PLL", id, l1, {}});
        rels.push_back({"inverted-parameter plane form", "PLL", id, l2, {}});
        rels.push_back({"(2elle) P_A L-^e_o L-^f_o = 0", "2elle", id, l3, {}});
      }

    // (restrictedL1), (restrictedL2)
    for (int c = 1; c <= n; ++c) {
      FunctionalElement rhs;
      for (int a = 1; a <= n; ++a) {
        const int b = m - 1 - a;
        rhs += (lm(b, c) * lm(a, o) * lm(bu, bu)).scaled(C(a, b));
      }
      rels.push_back({"L-^b_c from CLL2", "restrictedL1", std::to_string(c), lm(bu, c),
                      rhs.scaled(-C(o, bu).inverse())});
    }
    {
      FunctionalElement rhs;
      for (int a = 1; a <= n; ++a) {
        const int b = m - 1 - a;
        rhs += (lm(b, o) * lm(a, o) * lm(bu, bu)).scaled(C(a, b));
      }
      const Scalar k = -(Scalar::s_pow(-4) * C(bu, o) + C(o, bu)).inverse();
      rels.push_back({"L-^b_o from CLL2", "restrictedL2", "", lm(bu, o), rhs.scaled(k)});
    }

    // (1elle), (3elle) in derived form, (4elle)
    for (int a = 1; a <= n; ++a)
      rels.push_back({"(1elle) L-^o_o L-^a_o = q_{oa}^{-1} L-^a_o L-^o_o", "1elle", std::to_string(a),
                      lm(o, o) * lm(a, o), (lm(a, o) * lm(o, o)).scaled(g.q(o, a).inverse())});
    for (bool plus : {true, false})
      for (int b = 1; b <= n; ++b)
        for (int d = 1; d <= n; ++d) {
          const std::string t = plus ? "L+" : "L-";
          rels.push_back({"(3elle, derived) L-^o_o " + t + "^b_d = (q_{bo}/q_{do}) " + t + "^b_d L-^o_o", "3elle",
                          detail::idx_label({b, d}), lm(o, o) * lpm(plus, b, d),
                          (lpm(plus, b, d) * lm(o, o)).scaled(g.q(b, o) / g.q(d, o))});
        }
    const SparseTensor4& Rp = ev.Rplus();
    const SparseTensor4& Rm = ev.Rminus();
    for (bool plus : {true, false})
      for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b)
          for (int d = 1; d <= n; ++d) {
            const SparseTensor4& X = plus ? Rp : Rm;
            FunctionalElement rhs;
            for (int e = 1; e <= n; ++e)
              for (int f = 1; f <= n; ++f) {
                Scalar v = X(b, a, e, f);
                if (!v.is_zero()) rhs += (lpm(plus, e, d) * lm(f, o)).scaled(v);
              }
            const std::string t = plus ? "L+" : "L-";
            rels.push_back({"(4elle) L-^a_o " + t + "^b_d exchange", "4elle", detail::idx_label({a, b, d}),
                            lm(a, o) * lpm(plus, b, d), rhs.scaled(g.r() / g.q(d, o))});
          }
  }

  // IU in R-matrix form.
  const SparseTensor4 Rcal = iso_rmatrix(R);
  append(exchange_relations(R, Lcal, Lcal, "R Lcal2 Lcal1 = Lcal1 Lcal2 R", "iRLcLc"));
  append(exchange_relations(Rcal, Lcal, Lcal, "Rcal Lcal2 Lcal1 = Lcal1 Lcal2 Rcal", "iRLcLc"));
  append(exchange_relations(Rcal, Lm, Lcal, "Rcal Lcal2 L-1 = L-1 Lcal2 Rcal", "iRLpLm"));
  for (auto& r : orthogonality_relations(C, Lcal, "Lcal")) {
    r.ref = "iCLcLc";
    rels.push_back(std::move(r));
  }

  rep.merge(check_functional_relations(ev, rels, D, opt.jobs, "envelope"));

  // Rcal = Lcal+_2(t_1) and its Yang-Baxter equation.
  {
    bool ok = true;
    json wit;
    for (int a = 0; a < m && ok; ++a)
      for (int b = 0; b < m && ok; ++b)
        for (int c = 0; c < m && ok; ++c)
          for (int d = 0; d < m && ok; ++d) {
            Scalar v = ev.eval(cal_lp(b, d, m), Word{gen_big(a, c)});
            if (!(v == Rcal(a, b, c, d))) {
              ok = false;
              wit = json{{"index", detail::idx_label({a, b, c, d})}, {"eval", v.to_string(ev.names())},
                         {"Rcal", Rcal(a, b, c, d).to_string(ev.names())}};
            }
          }
    rep.add("Rcal = Lcal+_2(t_1)", "iRLcLc", ok, wit);
    MatrixDiff q = check_qybe(Rcal);
    rep.add("Rcal satisfies QYBE", "QYB", q.equal, q.equal ? json(nullptr) : matrix_witness(q, m, ev.names()));
  }

  // (1effe1): L+^A_A L-^A_A is the character T^C_D -> (F^4)^{AC} delta.
  {
    bool ok = true;
    json wit;
    for (int a = 0; a < m && ok; ++a) {
      std::vector<Scalar> chi;
      for (int c = 0; c < m; ++c) chi.push_back(twist_f4(g, a, c));
      FunctionalDiff d;
      if (!character_matches(ev, lp(a, a) * lm(a, a), chi, D, d)) {
        ok = false;
        wit = d.witness(ev.names());
        wit["A"] = a;
      }
    }
    rep.add("L+^A_A L-^A_A = F^4(T^A_A, .)", "1effe1", ok, wit);
  }
  return rep;
}

/// L+^1_1 L-^1_1 against eps: fails with a witness for generic
/// parameters, holds on the uniparametric line.
inline Report check_epsiaepsi(int n, int uni_degree = 3) {
  const int m = n + 2;
  Report rep("epsiaepsi");
  Evaluator multi(make_geometry(m));
  FunctionalDiff d = functional_equal(multi, lp(1, 1) * lm(1, 1), eps(), 1);
  json w = d.witness(multi.names());
  rep.add("multiparametric L+^1_1 L-^1_1 != eps detected", "epsiaepsi", !d.equal, w);
  Evaluator uni(make_geometry(m), uniparametric_map());
  bool ok = true;
  json uw;
  for (int a = 0; a < m && ok; ++a) {
    FunctionalDiff du = functional_equal(uni, lp(a, a) * lm(a, a), eps(), uni_degree);
    if (!du.equal) {
      ok = false;
      uw = du.witness(uni.names());
      uw["A"] = a;
    }
  }
  rep.add("uniparametric L+^A_A L-^A_A = eps", "epsiaepsi", ok, ok ? json{{"degree", uni_degree}} : uw);
  return rep;
}

// ---------------------------------------------------------------------------
// IU and the duality with ISO(N)

/// Generators of IU: all nonzero L-, L+^a_b (inner, a <= b), L+^o_o, L+^b_b.
inline std::vector<Gen> iu_generators(int n) {
  const int m = n + 2;
  std::vector<Gen> out;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b <= a; ++b) out.push_back(gen_lm(a, b));
  out.push_back(gen_lp(0, 0));
  for (int a = 1; a <= n; ++a)
    for (int b = a; b <= n; ++b) out.push_back(gen_lp(a, b));
  out.push_back(gen_lp(m - 1, m - 1));
  return out;
}

/// The L+ functionals left out of IU: L+^o_b, L+^a_b, L+^o_b.
inline std::vector<Gen> iu_excluded(int n) {
  const int m = n + 2;
  std::vector<Gen> out;
  for (int b = 1; b <= n; ++b) out.push_back(gen_lp(0, b));
  for (int a = 1; a <= n; ++a) out.push_back(gen_lp(a, m - 1));
  out.push_back(gen_lp(0, m - 1));
  return out;
}

inline bool is_h_entry(int c, int d, int m) { return (d == 0 && c != 0) || (c == m - 1 && d != m - 1); }

struct AnnihilationResult {
  bool annihilates = true;
  Word word;
  Scalar value;
};

/// Does f vanish on every free word of length <= degree containing an
/// H generator?
inline AnnihilationResult iu_annihilates(const Evaluator& ev, const FunctionalElement& f, int degree) {
  const int m = ev.dim();
  AnnihilationResult res;
  for (int k = 1; k <= degree; ++k) {
    SparseMatrix mat = ev.matrix(f, k);
    for (int i = 0; i < mat.rows(); ++i) {
      if (mat.row(i).empty()) continue;
      std::vector<int> c = decode_multi(i, m, k);
      for (const auto& [j, v] : mat.row(i)) {
        std::vector<int> d = decode_multi(j, m, k);
        for (int p = 0; p < k; ++p)
          if (is_h_entry(c[p], d[p], m)) {
            res.annihilates = false;
            res.word = t_word(i, j, m, k);
            res.value = v;
            return res;
          }
      }
    }
  }
  return res;
}

inline Report check_iu_membership(int n, int degree = 3, int jobs = 1) {
  Evaluator ev(make_geometry(n + 2));
  ev.warm(degree);
  Report rep("iu");
  std::vector<Gen> gens = iu_generators(n);
  std::vector<AnnihilationResult> res(gens.size());
  parallel_for(gens.size(), jobs, [&](std::size_t i) { res[i] = iu_annihilates(ev, FunctionalElement::gen(gens[i]), degree); });
  bool ok = true;
  json wit;
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (!res[i].annihilates && ok) {
      ok = false;
      wit = json{{"functional", gen_name(gens[i])}, {"word", word_string(res[i].word)},
                 {"value", res[i].value.to_string(ev.names())}};
    }
  rep.add("every IU generator annihilates H words of length <= " + std::to_string(degree), "IU", ok,
          ok ? json{{"generators", gens.size()}} : wit);
  for (Gen g : iu_excluded(n)) {
    AnnihilationResult r = iu_annihilates(ev, FunctionalElement::gen(g), 1);
    json w = r.annihilates ? json(nullptr)
                           : json{{"word", word_string(r.word)}, {"value", r.value.to_string(ev.names())}};
    rep.add(gen_name(g) + " does not annihilate H", "IU", !r.annihilates, w);
  }
  return rep;
}

/// <f, P(a)> = f(a) through the section x^a -> T^a_b, u -> T^o_o, v -> T^b_b
/// (o and b standing for the first and last big index).
inline Scalar pairing(const Evaluator& ev, const IsoContext& ctx, const FunctionalElement& f, const AlgebraElement& pa,
                      bool check = false) {
  if (check) {
    AnnihilationResult r = iu_annihilates(ev, f, 2);
    if (!r.annihilates) throw NotInIU("functional does not annihilate H on " + word_string(r.word));
  }
  return ev.eval(f, ctx.lift(pa));
}

/// Random elements sum c * w1 h w2 of the ideal H with total degree <= max_degree.
inline std::vector<AlgebraElement> random_h_elements(int n, std::size_t count, std::uint64_t seed,
                                                     int max_degree = 3) {
  const int m = n + 2;
  std::mt19937_64 rng(seed);
  std::vector<Gen> alphabet = big_alphabet(m);
  std::vector<Gen> hs = h_generators(n);
  auto pick = [&](std::size_t size) { return std::uniform_int_distribution<std::size_t>(0, size - 1)(rng); };
  std::uniform_int_distribution<int> coeff(-4, 4), terms(1, 3), len(0, max_degree - 1);
  std::vector<AlgebraElement> out;
  while (out.size() < count) {
    AlgebraElement e;
    const int t = terms(rng);
    for (int i = 0; i < t; ++i) {
      int c = coeff(rng);
      if (c == 0) c = 1;
      const int extra = len(rng);
      const int left = extra == 0 ? 0 : std::uniform_int_distribution<int>(0, extra)(rng);
      Word w;
      for (int j = 0; j < left; ++j) w.push_back(alphabet[pick(alphabet.size())]);
      w.push_back(hs[pick(hs.size())]);
      for (int j = left; j < extra; ++j) w.push_back(alphabet[pick(alphabet.size())]);
      e.add(w, Scalar(c));
    }
    if (!e.is_zero()) out.push_back(std::move(e));
  }
  return out;
}

/// All words of length <= len in the IU generators.
inline std::vector<Word> iu_words(int n, int len) {
  std::vector<Gen> gens = iu_generators(n);
  std::vector<Word> out{Word{}};
  std::vector<Word> layer{Word{}};
  for (int l = 0; l < len; ++l) {
    std::vector<Word> next;
    for (const Word& w : layer)
      for (Gen g : gens) {
        Word x = w;
        x.push_back(g);
        next.push_back(x);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

inline Report check_pairing_well_defined(int n, std::size_t count = 100, std::uint64_t seed = 20240611,
                                         int word_len = 2, int jobs = 1) {
  Evaluator ev(make_geometry(n + 2));
  ev.warm(3);
  std::vector<AlgebraElement> hs = random_h_elements(n, count, seed);
  std::vector<Word> words = iu_words(n, word_len);
  std::vector<std::optional<json>> bad(hs.size());
  parallel_for(hs.size(), jobs, [&](std::size_t i) {
    for (const Word& w : words) {
      Scalar v = ev.eval(FunctionalElement::word(w), hs[i]);
      if (!v.is_zero()) {
        bad[i] = json{{"element", hs[i].to_string(ev.names())}, {"functional", functional_word_string(w)},
                      {"value", v.to_string(ev.names())}};
        return;
      }
    }
  });
  Report rep("pairing");
  std::size_t detected = 0;
  json first;
  for (auto& b : bad)
    if (b) {
      if (!detected) first = *b;
      ++detected;
    }
  json info{{"elements", hs.size()}, {"functionals", words.size()}, {"seed", seed}, {"detected", detected}};
  if (detected) info["first"] = first;
  rep.add("IU words of length <= " + std::to_string(word_len) + " vanish on random H elements", "duality",
          detected == 0, info);
  return rep;
}

/// Hopf-pairing axioms on generator pairs.
inline Report check_hopf_pairing(int n, int jobs = 1) {
  IsoContext ctx(n);
  const int m = n + 2;
  Evaluator ev(ctx.big());
  ev.warm(4);
  const auto& names = ev.names();
  std::vector<Gen> fs = iu_generators(n);
  std::vector<Gen> as = ctx.alphabet();
  Report rep("hopf-pairing");

  auto pair = [&](const FunctionalElement& f, const AlgebraElement& a) { return pairing(ev, ctx, f, a); };
  auto pair_tensor = [&](const FunctionalElement& f, const FunctionalElement& g, const TensorElement& t) {
    Scalar out;
    for (const auto& [k, c] : t.terms())
      out += c * pair(f, AlgebraElement::word(k.first)) * pair(g, AlgebraElement::word(k.second));
    return out;
  };

  // (uuno) <fg, a> = <f (x) g, Delta a>
  {
    std::vector<TensorElement> deltas;
    for (Gen a : as) deltas.push_back(ctx.coproduct(AlgebraElement::gen(a)));
    std::vector<std::optional<json>> bad(fs.size());
    parallel_for(fs.size(), jobs, [&](std::size_t i) {
      FunctionalElement f = FunctionalElement::gen(fs[i]);
      for (Gen gg : fs) {
        FunctionalElement g = FunctionalElement::gen(gg);
        for (std::size_t j = 0; j < as.size(); ++j) {
          Scalar lhs = pair(f * g, AlgebraElement::gen(as[j]));
          Scalar rhs = pair_tensor(f, g, deltas[j]);
          if (!(lhs == rhs)) {
            bad[i] = json{{"f", gen_name(fs[i])}, {"g", gen_name(gg)}, {"a", gen_name(as[j])},
                          {"lhs", lhs.to_string(names)}, {"rhs", rhs.to_string(names)}};
            return;
          }
        }
      }
    });
    json w;
    for (auto& b : bad)
      if (b && w.is_null()) w = *b;
    rep.add("<fg, a> = <f (x) g, Delta a>", "uuno", w.is_null(),
            w.is_null() ? json{{"pairs", fs.size() * fs.size()}, {"elements", as.size()}} : w);
  }

  // (udue) <f, ab> = <Delta' f, a (x) b>
  {
    std::vector<std::optional<json>> bad(fs.size());
    parallel_for(fs.size(), jobs, [&](std::size_t i) {
      FunctionalElement f = FunctionalElement::gen(fs[i]);
      TensorElement df = coproduct_L(f, m);
      for (Gen a : as)
        for (Gen b : as) {
          Scalar lhs = pair(f, AlgebraElement::word({a, b}));
          Scalar rhs;
          for (const auto& [k, c] : df.terms())
            rhs += c * pair(FunctionalElement::word(k.first), AlgebraElement::gen(a)) *
                   pair(FunctionalElement::word(k.second), AlgebraElement::gen(b));
          if (!(lhs == rhs)) {
            bad[i] = json{{"f", gen_name(fs[i])}, {"a", gen_name(a)}, {"b", gen_name(b)},
                          {"lhs", lhs.to_string(names)}, {"rhs", rhs.to_string(names)}};
            return;
          }
        }
    });
    json w;
    for (auto& b : bad)
      if (b && w.is_null()) w = *b;
    rep.add("<f, ab> = <Delta' f, a (x) b>", "udue", w.is_null(),
            w.is_null() ? json{{"functionals", fs.size()}, {"pairs", as.size() * as.size()}} : w);
  }

  // (utre) <kappa' f, a> = <f, kappa a>, on generators and products of two.
  {
    std::vector<std::optional<json>> bad(fs.size());
    std::vector<AlgebraElement> kappas;
    for (Gen a : as) kappas.push_back(ctx.antipode(AlgebraElement::gen(a)));
    parallel_for(fs.size(), jobs, [&](std::size_t i) {
      std::vector<FunctionalElement> tests{FunctionalElement::gen(fs[i])};
      for (Gen gg : fs) tests.push_back(FunctionalElement::word({fs[i], gg}));
      for (const auto& f : tests) {
        FunctionalElement kf = antipode_L(f, ev.C());
        for (std::size_t j = 0; j < as.size(); ++j) {
          Scalar lhs = pair(kf, AlgebraElement::gen(as[j]));
          Scalar rhs = pair(f, kappas[j]);
          if (!(lhs == rhs)) {
            bad[i] = json{{"f", functional_string(f, names)}, {"a", gen_name(as[j])}, {"lhs", lhs.to_string(names)},
                          {"rhs", rhs.to_string(names)}};
            return;
          }
        }
      }
    });
    json w;
    for (auto& b : bad)
      if (b && w.is_null()) w = *b;
    rep.add("<kappa' f, a> = <f, kappa a>", "utre", w.is_null(), w);
  }

  // (uquattro)
  {
    bool ok = true;
    json w;
    for (Gen a : as) {
      Scalar lhs = pair(eps(), AlgebraElement::gen(a));
      Scalar rhs = ctx.counit(AlgebraElement::gen(a));
      if (!(lhs == rhs) && ok) {
        ok = false;
        w = json{{"a", gen_name(a)}};
      }
    }
    for (Gen f : fs) {
      Scalar lhs = pair(FunctionalElement::gen(f), AlgebraElement::one());
      if (!(lhs == counit_L(FunctionalElement::gen(f))) && ok) {
        ok = false;
        w = json{{"f", gen_name(f)}};
      }
    }
    rep.add("<eps, a> = eps(a) and <f, I> = eps'(f)", "uquattro", ok, w);
  }

  // The pairing also kills the defining relations of ISO(N).
  {
    Presentation p = ctx.presentation();
    bool ok = true;
    json w;
    for (Gen f : fs) {
      for (const auto& rel : p.relations) {
        Scalar v = pair(FunctionalElement::gen(f), rel.value);
        if (!v.is_zero()) {
          ok = false;
          w = json{{"f", gen_name(f)}, {"relation", rel.label}, {"value", v.to_string(names)}};
          break;
        }
      }
      if (!ok) break;
    }
    rep.add("IU generators vanish on the ISO(N) relations", "duality", ok, w);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Freeness at bounded degree

/// eta monomials (L-^o_o)^{i0} (L-^1_o)^{i1} ... (L-^N_o)^{iN} with
/// |i0| + i1 + ... + iN <= degree; negative powers use L-^b_b.
inline std::vector<Word> eta_monomials(int n, int degree) {
  const int m = n + 2;
  std::vector<Word> out;
  std::function<void(int, int, Word)> rec = [&](int idx, int left, Word w) {
    if (idx > n) {
      out.push_back(w);
      return;
    }
    for (int p = 0; p <= left; ++p) {
      Word x = w;
      for (int i = 0; i < p; ++i) x.push_back(gen_lm(idx, 0));
      rec(idx + 1, left - p, x);
    }
  };
  for (int i0 = -degree; i0 <= degree; ++i0) {
    Word head;
    for (int i = 0; i < std::abs(i0); ++i) head.push_back(i0 > 0 ? gen_lm(0, 0) : gen_lm(m - 1, m - 1));
    rec(1, degree - std::abs(i0), head);
  }
  return out;
}

/// Rank of the evaluation matrix (rows: words, columns: T-words of length
/// <= degree) at a rational specialization.
inline std::size_t independence_rank(const Evaluator& ev, const std::vector<Word>& ws, int degree, const Point& point) {
  Echelon<Rational> ech;
  ev.warm(degree);
  std::vector<SparseMatrix> dummy;
  for (const Word& w : ws) {
    std::map<int, Rational> row;
    int offset = 0;
    for (int k = 0; k <= degree; ++k) {
      SparseMatrix mat = ev.matrix(FunctionalElement::word(w), k);
      const int n = mat.rows();
      for (int i = 0; i < n; ++i)
        for (const auto& [j, v] : mat.row(i)) {
          Rational x = v.specialize(point);
          if (x != 0) row.emplace(offset + i * n + j, x);
        }
      offset += n * n;
    }
    ech.insert(row);
  }
  return ech.rank();
}

inline Report check_freeness(int n, int eta_degree = 2, int degree = 3) {
  Evaluator ev(make_geometry(n + 2));
  std::vector<Word> ws = eta_monomials(n, eta_degree);
  Point p = generic_point(ev.geometry().params());
  const std::size_t rank = independence_rank(ev, ws, degree, p);
  Report rep("freeness");
  rep.add("eta monomials of degree <= " + std::to_string(eta_degree) + " independent on words of length <= " +
              std::to_string(degree),
          "freeness", rank == ws.size(), json{{"monomials", ws.size()}, {"rank", rank}});
  return rep;
}

}  // namespace orthoq
