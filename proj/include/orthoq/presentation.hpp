#pragma once

// Relation sets of SO_{q,r}(M), ISO_{q,r}(N), the quantum plane and the
// exterior algebra; quadratic rewriting, confluence, Hilbert counts,
// costructures, the projection P and bounded-degree ideal membership.

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "orthoq/algebra.hpp"
#include "orthoq/linalg.hpp"
#include "orthoq/report.hpp"
#include "orthoq/rmatrix.hpp"

namespace orthoq {

struct IncompleteRules : std::runtime_error {
  explicit IncompleteRules(const std::string& w) : std::runtime_error("no rewrite rule for order-violating word " + w) {}
};
struct TopDegreeNotOneDimensional : std::runtime_error {
  TopDegreeNotOneDimensional() : std::runtime_error("top exterior degree is not one-dimensional") {}
};

enum class PresentationKind { SO, ISO, Plane, Exterior, Dilatation };

struct Relation {
  std::string label;
  AlgebraElement value;  // understood as value = 0
};

struct Presentation {
  PresentationKind kind;
  std::string name;
  std::vector<std::string> var_names;
  std::vector<Gen> alphabet;
  std::vector<Relation> relations;

  std::vector<AlgebraElement> values() const {
    std::vector<AlgebraElement> out;
    for (const auto& r : relations) out.push_back(r.value);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Rewriting

class RewriteSystem {
 public:
  using Lead = std::pair<Gen, Gen>;

  const std::map<Lead, AlgebraElement>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool has_rule(Gen a, Gen b) const { return rules_.count({a, b}) != 0; }

  void add_rule(Gen a, Gen b, AlgebraElement rhs) { rules_[{a, b}] = std::move(rhs); }
  void remove_rule(Gen a, Gen b) { rules_.erase({a, b}); }
  void merge(const RewriteSystem& o) {
    for (const auto& [k, v] : o.rules_) rules_[k] = v;
  }

  /// Position of the leftmost reducible pair, or -1.
  int leftmost(const Word& w) const {
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (rules_.count({w[i], w[i + 1]})) return static_cast<int>(i);
    return -1;
  }
  bool is_normal(const Word& w) const { return leftmost(w) < 0; }

  /// One rewrite of w at position p (which must be reducible).
  AlgebraElement rewrite_at(const Word& w, int p, const Scalar& c) const {
    const AlgebraElement& rhs = rules_.at({w[p], w[p + 1]});
    AlgebraElement out;
    for (const auto& [rw, rc] : rhs.terms()) {
      Word nw(w.begin(), w.begin() + p);
      nw.insert(nw.end(), rw.begin(), rw.end());
      nw.insert(nw.end(), w.begin() + p + 2, w.end());
      out.add(std::move(nw), rc * c);
    }
    return out;
  }

  /// Full reduction.  Every rule strictly lowers a word in the degree-
  /// lexicographic order, so processing the largest pending word first
  /// touches each word at most once.
  AlgebraElement reduce(const AlgebraElement& e) const {
    AlgebraElement::Map pending = e.terms();
    AlgebraElement out;
    while (!pending.empty()) {
      auto it = std::prev(pending.end());
      Word w = it->first;
      Scalar c = it->second;
      pending.erase(it);
      int p = leftmost(w);
      if (p < 0) {
        out.add(w, c);
        continue;
      }
      const AlgebraElement step = rewrite_at(w, p, c);
      for (const auto& [nw, nc] : step.terms()) {
        auto [jt, inserted] = pending.try_emplace(nw, nc);
        if (!inserted) {
          jt->second += nc;
          if (jt->second.is_zero()) pending.erase(jt);
        }
      }
    }
    return out;
  }

 private:
  std::map<Lead, AlgebraElement> rules_;
};

/// Gaussian elimination of a quadratic relation space against the
/// degree-lexicographic order: one rule per leading word.  `expected`
/// lists the degree-2 words that must acquire a rule.
inline RewriteSystem derive_rewrite_rules(const std::vector<AlgebraElement>& relations,
                                          const std::vector<Word>& expected) {
  std::set<Word, DegLex> words;
  for (const auto& r : relations)
    for (const auto& [w, c] : r.terms()) words.insert(w);
  // column index grows as words get smaller, so the pivot is the leading word
  std::map<Word, int, DegLex> col;
  std::vector<Word> by_col;
  for (auto it = words.rbegin(); it != words.rend(); ++it) {
    col[*it] = static_cast<int>(by_col.size());
    by_col.push_back(*it);
  }
  Echelon<Scalar> ech;
  for (const auto& r : relations) {
    std::map<int, Scalar> v;
    for (const auto& [w, c] : r.terms()) v.emplace(col.at(w), c);
    ech.insert(v);
  }
  RewriteSystem rs;
  for (const auto& [pc, row] : ech.pivots()) {
    const Word& lead = by_col[pc];
    if (lead.size() != 2) throw IncompleteRules("(leading word of degree " + std::to_string(lead.size()) + ")");
    AlgebraElement rhs;
    for (const auto& [k, c] : row)
      if (k != pc) rhs.add(by_col[k], -c);
    rs.add_rule(lead[0], lead[1], rhs);
  }
  for (const Word& w : expected)
    if (!rs.has_rule(w[0], w[1])) throw IncompleteRules(word_string(w));
  if (rs.size() != expected.size()) {
    for (const auto& [k, v] : rs.rules()) {
      bool found = false;
      for (const Word& w : expected) found = found || (w[0] == k.first && w[1] == k.second);
      if (!found) throw IncompleteRules("unexpected leading word " + word_string({k.first, k.second}));
    }
  }
  return rs;
}

inline std::vector<Word> words_of_length(const std::vector<Gen>& alphabet, std::size_t len) {
  std::vector<Word> out{Word{}};
  for (std::size_t l = 0; l < len; ++l) {
    std::vector<Word> next;
    next.reserve(out.size() * alphabet.size());
    for (const Word& w : out)
      for (Gen g : alphabet) {
        Word nw = w;
        nw.push_back(g);
        next.push_back(std::move(nw));
      }
    out = std::move(next);
  }
  return out;
}

/// All first rewrites of every degree-3 word, each followed by full reduction, agree.
inline Report check_confluence(const RewriteSystem& rs, const std::vector<Gen>& alphabet,
                               const std::vector<std::string>& names, const std::string& label) {
  Report rep("confluence");
  std::size_t ambiguous = 0;
  for (const Word& w : words_of_length(alphabet, 3)) {
    std::vector<AlgebraElement> results;
    for (int p = 0; p < 2; ++p)
      if (rs.has_rule(w[p], w[p + 1])) results.push_back(rs.reduce(rs.rewrite_at(w, p, Scalar(1))));
    if (results.size() < 2) continue;
    ++ambiguous;
    if (!(results[0] == results[1])) {
      json wit{{"word", word_string(w)}, {"left", results[0].to_string(names)}, {"right", results[1].to_string(names)}};
      rep.add(label + " confluent on degree-3 overlaps", "confluence", false, wit);
      return rep;
    }
  }
  rep.add(label + " confluent on degree-3 overlaps", "confluence", true, json{{"overlaps", ambiguous}});
  return rep;
}

/// Overlap resolution together with the requirement that every defining
/// relation of `p` reduces to zero, so a missing rule is caught as well.
inline Report check_confluence(const RewriteSystem& rs, const Presentation& p) {
  Report rep = check_confluence(rs, p.alphabet, p.var_names, p.name);
  for (const auto& rel : p.relations) {
    AlgebraElement rest = rs.reduce(rel.value);
    if (!rest.is_zero()) {
      json wit{{"relation", rel.label}, {"leading", word_string(rel.value.leading_word())},
               {"residue", rest.to_string(p.var_names)}};
      rep.add(p.name + " relations reduce to zero", rel.label, false, wit);
      return rep;
    }
  }
  rep.add(p.name + " relations reduce to zero", "confluence", true, json{{"relations", p.relations.size()}});
  return rep;
}

/// Number of normal words of length d over the alphabet.
inline std::size_t hilbert_dimension(const RewriteSystem& rs, const std::vector<Gen>& alphabet, std::size_t d) {
  // extend normal words letter by letter; normality only depends on adjacent pairs
  std::vector<Word> layer{Word{}};
  for (std::size_t l = 0; l < d; ++l) {
    std::vector<Word> next;
    for (const Word& w : layer)
      for (Gen g : alphabet)
        if (w.empty() || !rs.has_rule(w.back(), g)) {
          Word nw = w;
          nw.push_back(g);
          next.push_back(std::move(nw));
        }
    layer = std::move(next);
  }
  return layer.size();
}

/// Normal words with a given dilatation power k (u^k for k > 0, v^{-k} for
/// k < 0) followed by x-degree d.
inline std::size_t dilatation_count(const RewriteSystem& rs, int n, int k, std::size_t d) {
  std::vector<Gen> xs;
  for (int a = 0; a < n; ++a) xs.push_back(gen_x(a));
  std::vector<Gen> all = xs;
  all.push_back(gen_u());
  all.push_back(gen_v());
  std::size_t count = 0;
  const std::size_t len = static_cast<std::size_t>(std::abs(k)) + d;
  std::function<void(Word&)> rec = [&](Word& w) {
    if (w.size() == len) {
      int ku = 0, kv = 0;
      std::size_t dx = 0;
      for (Gen g : w) {
        if (g == gen_u()) ++ku;
        else if (g == gen_v()) ++kv;
        else ++dx;
      }
      if (ku - kv == k && dx == d && ku + kv == std::abs(k)) ++count;
      return;
    }
    for (Gen g : all)
      if (w.empty() || !rs.has_rule(w.back(), g)) {
        w.push_back(g);
        rec(w);
        w.pop_back();
      }
  };
  Word w;
  rec(w);
  return count;
}

// ---------------------------------------------------------------------------
// SO(M) presentation and costructures on the big alphabet

inline Presentation build_so(int m, bool with_qdet = false);

inline std::vector<Gen> big_alphabet(int m) {
  std::vector<Gen> out;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) out.push_back(gen_big(a, b));
  return out;
}

/// RTT and CTT relations for a matrix alphabet t(a, b).
template <class TGen>
std::vector<Relation> rtt_ctt_relations(const SparseTensor4& R, const MetricVec& C, TGen t, const std::string& rtt_tag,
                                        const std::string& ctt_tag1, const std::string& ctt_tag2) {
  const int m = R.dim();
  std::vector<Relation> out;
  // group R entries by upper and lower pairs
  std::map<std::pair<int, int>, std::vector<std::pair<std::pair<int, int>, Scalar>>> by_upper, by_lower;
  for (const auto& [k, v] : R.entries()) {
    by_upper[{k[0], k[1]}].push_back({{k[2], k[3]}, v});
    by_lower[{k[2], k[3]}].push_back({{k[0], k[1]}, v});
  }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) {
          AlgebraElement rel;
          // R^{ab}_{ef} T^e_c T^f_d - T^b_f T^a_e R^{ef}_{cd}
          for (const auto& [ef, v] : by_upper[{a, b}]) rel.add({t(ef.first, c), t(ef.second, d)}, v);
          for (const auto& [ef, v] : by_lower[{c, d}]) rel.add({t(b, ef.second), t(a, ef.first)}, -v);
          if (!rel.is_zero()) out.push_back({rtt_tag, rel});
        }
  for (int a = 0; a < m; ++a)
    for (int d = 0; d < m; ++d) {
      // C^{bc} T^a_b T^d_c - C^{ad} I
      AlgebraElement r1;
      for (int b = 0; b < m; ++b) r1.add({t(a, b), t(d, m - 1 - b)}, C(b, m - 1 - b));
      r1.add({}, -C(a, d));
      out.push_back({ctt_tag1, r1});
      // C_{ac} T^a_b T^c_d - C_{bd} I   (here b := a, d := d as free indices)
      AlgebraElement r2;
      for (int e = 0; e < m; ++e) r2.add({t(e, a), t(m - 1 - e, d)}, C(e, m - 1 - e));
      r2.add({}, -C(a, d));
      out.push_back({ctt_tag2, r2});
    }
  return out;
}

/// Delta(T^A_B) = sum_C T^A_C (x) T^C_B, extended multiplicatively.
inline TensorElement coproduct_matrix(const AlgebraElement& e, int m, GenKind kind) {
  TensorElement out;
  for (const auto& [w, c] : e.terms()) {
    TensorElement acc = TensorElement::pure({}, {}, c);
    for (Gen g : w) {
      if (gen_kind(g) != kind) throw std::invalid_argument("coproduct: unexpected generator " + gen_name(g));
      TensorElement dg;
      for (int k = 0; k < m; ++k) dg.add({Word{make_gen(kind, gen_i(g), k)}, Word{make_gen(kind, k, gen_j(g))}}, Scalar(1));
      acc = acc * dg;
    }
    out += acc;
  }
  return out;
}

inline Scalar counit_matrix(const AlgebraElement& e) {
  Scalar out;
  for (const auto& [w, c] : e.terms()) {
    bool one = true;
    for (Gen g : w) one = one && gen_i(g) == gen_j(g);
    if (one) out += c;
  }
  return out;
}

/// kappa(T^A_B) = C^{AC} T^D_C C_{DB}, extended antimultiplicatively.
inline AlgebraElement antipode_matrix(const AlgebraElement& e, const MetricVec& C, GenKind kind) {
  const int m = C.geometry().dim();
  AlgebraElement out;
  for (const auto& [w, c] : e.terms()) {
    Word nw;
    Scalar coef = c;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      const int a = gen_i(*it), b = gen_j(*it);
      const int cc = m - 1 - a, d = m - 1 - b;
      coef *= C(a, cc) * C(d, b);
      nw.push_back(make_gen(kind, d, cc));
    }
    out.add(nw, coef);
  }
  return out;
}

inline Presentation build_so(int m, bool with_qdet) {
  (void)with_qdet;
  auto g = make_geometry(m);
  SparseTensor4 R = build_R(g);
  MetricVec C(g);
  Presentation p{PresentationKind::SO, "so(" + std::to_string(m) + ")", g->params().var_names(), big_alphabet(m), {}};
  p.relations = rtt_ctt_relations(R, C, gen_big, "RTT", "Torthogonality", "Torthogonality");
  return p;
}

// ---------------------------------------------------------------------------
// Exterior algebra and quantum determinant of SO(N)

inline std::vector<AlgebraElement> exterior_relations(const SparseTensor4& R) {
  const int n = R.dim();
  const Scalar r = R.geometry().r();
  std::vector<AlgebraElement> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      AlgebraElement rel = AlgebraElement::word({gen_dx(a), gen_dx(b)});
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Scalar v = R(b, a, c, d);
          if (!v.is_zero()) rel.add({gen_dx(c), gen_dx(d)}, r * v);
        }
      if (!rel.is_zero()) out.push_back(rel);
    }
  return out;
}

inline Presentation build_exterior(const GeometryPtr& g) {
  SparseTensor4 R = build_R(g);
  Presentation p{PresentationKind::Exterior, "exterior(" + std::to_string(g->dim()) + ")", g->params().var_names(), {}, {}};
  for (int a = 0; a < g->dim(); ++a) p.alphabet.push_back(gen_dx(a));
  for (auto& rel : exterior_relations(R)) p.relations.push_back({"exterior", rel});
  return p;
}

inline RewriteSystem exterior_rules(const Presentation& p) {
  std::vector<Word> expected;
  for (Gen a : p.alphabet)
    for (Gen b : p.alphabet)
      if (a >= b) expected.push_back({a, b});
  return derive_rewrite_rules(p.values(), expected);
}

/// Coefficient of dV = dx^1...dx^N in delta(dx^1...dx^N).
inline AlgebraElement quantum_determinant(const GeometryPtr& g) {
  const int n = g->dim();
  Presentation ext = build_exterior(g);
  RewriteSystem rs = exterior_rules(ext);
  if (hilbert_dimension(rs, ext.alphabet, n) != 1 || hilbert_dimension(rs, ext.alphabet, n + 1) != 0)
    throw TopDegreeNotOneDimensional();
  Word dv;
  for (int a = 0; a < n; ++a) dv.push_back(gen_dx(a));
  AlgebraElement det;
  std::vector<int> idx(n, 0);
  while (true) {
    Word dw, tw;
    for (int a = 0; a < n; ++a) {
      dw.push_back(gen_dx(idx[a]));
      tw.push_back(gen_t(a, idx[a]));
    }
    AlgebraElement red = rs.reduce(AlgebraElement::word(dw));
    for (const auto& [w, c] : red.terms()) {
      if (w != dv) throw TopDegreeNotOneDimensional();
      det.add(tw, c);
    }
    int k = n - 1;
    while (k >= 0 && ++idx[k] == n) idx[k--] = 0;
    if (k < 0) break;
  }
  return det;
}

inline AlgebraElement quantum_determinant(int n) { return quantum_determinant(make_geometry(n)); }

// ---------------------------------------------------------------------------
// ISO(N) as a quotient of SO(N+2)

class IsoContext {
 public:
  explicit IsoContext(int n)
      : n_(n),
        m_(n + 2),
        big_(make_geometry(n + 2)),
        inner_(IndexGeometry::block(n, 1, n + 2)),
        inner_bundle_(inner_),
        big_metric_(big_) {
    if (n < 1 || n > 13) throw std::invalid_argument("N out of range");
    build_rules();
  }

  int n() const { return n_; }
  int dim() const { return m_; }
  const GeometryPtr& big() const { return big_; }
  const GeometryPtr& inner() const { return inner_; }
  const RMatrixBundle& inner_bundle() const { return inner_bundle_; }
  const SparseTensor4& R() const { return inner_bundle_.R; }
  const MetricVec& C() const { return inner_bundle_.C; }
  const MetricVec& big_metric() const { return big_metric_; }
  const std::vector<std::string>& names() const { return big_->params().var_names(); }
  int circle() const { return 0; }
  int bullet() const { return m_ - 1; }

  /// q_{b bullet} for an inner index b.
  Scalar q_bullet(int b) const { return big_->q(b + 1, m_ - 1); }

  std::vector<Gen> alphabet() const {
    std::vector<Gen> out{gen_u(), gen_v()};
    for (int a = 0; a < n_; ++a) out.push_back(gen_x(a));
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) out.push_back(gen_t(a, b));
    return out;
  }
  std::vector<Gen> zeta_alphabet() const {
    std::vector<Gen> out{gen_u(), gen_v()};
    for (int a = 0; a < n_; ++a) out.push_back(gen_x(a));
    return out;
  }
  std::vector<Gen> x_alphabet() const {
    std::vector<Gen> out;
    for (int a = 0; a < n_; ++a) out.push_back(gen_x(a));
    return out;
  }

  // --- relation sets -------------------------------------------------------

  std::vector<AlgebraElement> plane_relations() const {
    std::vector<AlgebraElement> out;
    const SparseTensor4& PA = inner_bundle_.PA;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        AlgebraElement rel;
        for (int c = 0; c < n_; ++c)
          for (int d = 0; d < n_; ++d) rel.add({gen_x(c), gen_x(d)}, PA(a, b, c, d));
        if (!rel.is_zero()) out.push_back(rel);
      }
    return out;
  }

  std::vector<AlgebraElement> dilatation_relations() const {
    std::vector<AlgebraElement> out;
    for (int b = 0; b < n_; ++b) {
      // u x^b = q_{b bullet} x^b u
      AlgebraElement r1 = AlgebraElement::word({gen_u(), gen_x(b)});
      r1.add({gen_x(b), gen_u()}, -q_bullet(b));
      out.push_back(r1);
      // x^b v = q_{b bullet} v x^b
      AlgebraElement r2 = AlgebraElement::word({gen_x(b), gen_v()});
      r2.add({gen_v(), gen_x(b)}, -q_bullet(b));
      out.push_back(r2);
    }
    AlgebraElement uv = AlgebraElement::word({gen_u(), gen_v()});
    uv.add({}, Scalar(-1));
    AlgebraElement vu = AlgebraElement::word({gen_v(), gen_u()});
    vu.add({}, Scalar(-1));
    out.push_back(uv);
    out.push_back(vu);
    return out;
  }

  std::vector<AlgebraElement> mixed_relations() const {
    std::vector<AlgebraElement> out;
    const SparseTensor4& R = inner_bundle_.R;
    const Scalar r = big_->r();
    for (int b = 0; b < n_; ++b)
      for (int d = 0; d < n_; ++d) {
        for (int a = 0; a < n_; ++a) {
          // T^b_d x^a - (r/q_{d bullet}) R^{ab}_{ef} x^e T^f_d
          AlgebraElement rel = AlgebraElement::word({gen_t(b, d), gen_x(a)});
          const Scalar k = r / q_bullet(d);
          for (int e = 0; e < n_; ++e)
            for (int f = 0; f < n_; ++f) {
              Scalar v = R(a, b, e, f);
              if (!v.is_zero()) rel.add({gen_x(e), gen_t(f, d)}, -k * v);
            }
          out.push_back(rel);
        }
        const Scalar ratio = q_bullet(b) / q_bullet(d);
        // T^b_d v = (q_b/q_d) v T^b_d
        AlgebraElement tv = AlgebraElement::word({gen_t(b, d), gen_v()});
        tv.add({gen_v(), gen_t(b, d)}, -ratio);
        out.push_back(tv);
        // u T^b_d = (q_b/q_d) T^b_d u
        AlgebraElement ut = AlgebraElement::word({gen_t(b, d), gen_u()});
        ut.add({gen_u(), gen_t(b, d)}, -ratio.inverse());
        out.push_back(ut);
      }
    return out;
  }

  Presentation presentation() const {
    Presentation p{PresentationKind::ISO, "iso(" + std::to_string(n_) + ")", names(), alphabet(), {}};
    for (auto& r : rtt_ctt_relations(inner_bundle_.R, inner_bundle_.C, gen_t, "PRTT11", "PRTT31", "PRTT32"))
      p.relations.push_back(std::move(r));
    for (auto& r : mixed_relations()) {
      const Word& lead = r.leading_word();
      std::string tag = gen_kind(lead[1]) == GenKind::X ? "PRTT33" : (lead[1] == gen_v() ? "Tv" : "PRTT24");
      p.relations.push_back({tag, r});
    }
    for (auto& r : plane_relations()) p.relations.push_back({"PRTT13", r});
    for (auto& r : dilatation_relations()) {
      const Word& lead = r.leading_word();
      std::string tag = lead[0] == gen_u() && lead[1] == gen_v()   ? "PRTT21"
                        : lead[0] == gen_v() && lead[1] == gen_u() ? "PRTT21"
                        : lead[1] == gen_v()                       ? "PRTT15"
                                                                   : "PRTT22";
      p.relations.push_back({tag, r});
    }
    return p;
  }

  Presentation plane_presentation() const {
    Presentation p{PresentationKind::Plane, "plane(" + std::to_string(n_) + ")", names(), x_alphabet(), {}};
    for (auto& r : plane_relations()) p.relations.push_back({"PRTT13", r});
    return p;
  }

  // --- rewriting -----------------------------------------------------------

  RewriteSystem plane_rules() const {
    std::vector<Word> expected;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < a; ++b) expected.push_back({gen_x(a), gen_x(b)});
    return derive_rewrite_rules(plane_relations(), expected);
  }
  RewriteSystem dilatation_rules() const {
    std::vector<Word> expected{{gen_u(), gen_v()}, {gen_v(), gen_u()}};
    for (int b = 0; b < n_; ++b) {
      expected.push_back({gen_x(b), gen_u()});
      expected.push_back({gen_x(b), gen_v()});
    }
    return derive_rewrite_rules(dilatation_relations(), expected);
  }
  RewriteSystem mixed_rules() const {
    std::vector<Word> expected;
    for (int b = 0; b < n_; ++b)
      for (int d = 0; d < n_; ++d) {
        for (int a = 0; a < n_; ++a) expected.push_back({gen_t(b, d), gen_x(a)});
        expected.push_back({gen_t(b, d), gen_u()});
        expected.push_back({gen_t(b, d), gen_v()});
      }
    return derive_rewrite_rules(mixed_relations(), expected);
  }

  const RewriteSystem& rules() const { return rules_; }
  AlgebraElement reduce(const AlgebraElement& e) const { return rules_.reduce(e); }

  // --- projection and section ----------------------------------------------

  /// y_b = -r^rho T^a_b C_{ac} x^c u
  AlgebraElement y(int b) const {
    AlgebraElement out;
    const Scalar k = -Scalar::s_pow(n_);
    for (int a = 0; a < n_; ++a) {
      const int c = n_ - 1 - a;
      out.add({gen_t(a, b), gen_x(c), gen_u()}, k * C()(a, c));
    }
    return out;
  }
  /// z = -(r^{-N/2} + r^{N/2-2})^{-1} x^b C_{ba} x^a u
  AlgebraElement z() const {
    AlgebraElement out;
    const Scalar k = -(Scalar::s_pow(-n_) + Scalar::s_pow(n_ - 4)).inverse();
    for (int b = 0; b < n_; ++b) out.add({gen_x(b), gen_x(n_ - 1 - b), gen_u()}, k * C()(b, n_ - 1 - b));
    return out;
  }

  bool is_h_generator(Gen g) const {
    if (gen_kind(g) != GenKind::BigT) return false;
    const int a = gen_i(g), b = gen_j(g);
    return (a != circle() && b == circle()) || (a == bullet() && b != bullet());
  }

  AlgebraElement project_gen(Gen g) const {
    if (gen_kind(g) != GenKind::BigT) throw std::invalid_argument("project: not an SO(N+2) generator");
    const int a = gen_i(g), b = gen_j(g);
    const int o = circle(), bu = bullet();
    if (is_h_generator(g)) return {};
    if (a == o && b == o) return AlgebraElement::gen(gen_u());
    if (a == bu && b == bu) return AlgebraElement::gen(gen_v());
    if (a == o && b == bu) return z();
    if (a == o) return y(b - 1);
    if (b == bu) return AlgebraElement::gen(gen_x(a - 1));
    return AlgebraElement::gen(gen_t(a - 1, b - 1));
  }

  AlgebraElement project(const AlgebraElement& e) const {
    return substitute_generators(e, [&](Gen g) { return project_gen(g); });
  }

  /// Section of P used to lift ISO(N) elements: x -> T^a_bullet, u -> T^o_o, v -> T^b_b.
  Gen lift_gen(Gen g) const {
    switch (gen_kind(g)) {
      case GenKind::U: return gen_big(circle(), circle());
      case GenKind::V: return gen_big(bullet(), bullet());
      case GenKind::X: return gen_big(gen_i(g) + 1, bullet());
      case GenKind::T: return gen_big(gen_i(g) + 1, gen_j(g) + 1);
      default: throw std::invalid_argument("lift: not an ISO(N) generator");
    }
  }
  AlgebraElement lift(const AlgebraElement& e) const {
    AlgebraElement out;
    for (const auto& [w, c] : e.terms()) {
      Word nw;
      for (Gen g : w) nw.push_back(lift_gen(g));
      out.add(nw, c);
    }
    return out;
  }

  // --- costructures on ISO(N) via t^A_B ------------------------------------

  /// t^A_B as an ISO(N) element (big indices).
  AlgebraElement t(int a, int b) const { return project_gen(gen_big(a, b)); }

  TensorElement coproduct(const AlgebraElement& e) const {
    TensorElement out;
    for (const auto& [w, c] : e.terms()) {
      TensorElement acc = TensorElement::pure({}, {}, c);
      for (Gen g : w) acc = acc * coproduct_gen(g);
      out += acc;
    }
    return out;
  }
  Scalar counit(const AlgebraElement& e) const {
    Scalar out;
    for (const auto& [w, c] : e.terms()) {
      bool one = true;
      for (Gen g : w) one = one && counit_gen(g);
      if (one) out += c;
    }
    return out;
  }
  AlgebraElement antipode(const AlgebraElement& e) const {
    AlgebraElement out;
    for (const auto& [w, c] : e.terms()) {
      AlgebraElement acc = AlgebraElement::scalar(c);
      for (auto it = w.rbegin(); it != w.rend(); ++it) acc = acc * antipode_gen(*it);
      out += acc;
    }
    return out;
  }

  TensorElement coproduct_gen(Gen g) const {
    const Gen big = lift_gen(g);
    const int a = gen_i(big), b = gen_j(big);
    TensorElement out;
    for (int c = 0; c < m_; ++c) {
      AlgebraElement l = t(a, c), r = t(c, b);
      for (const auto& [wl, cl] : l.terms())
        for (const auto& [wr, cr] : r.terms()) out.add({wl, wr}, cl * cr);
    }
    return out;
  }
  bool counit_gen(Gen g) const {
    const Gen big = lift_gen(g);
    return gen_i(big) == gen_j(big);
  }
  AlgebraElement antipode_gen(Gen g) const {
    const Gen big = lift_gen(g);
    const int a = gen_i(big), b = gen_j(big);
    const int c = m_ - 1 - a, d = m_ - 1 - b;
    return t(d, c).scaled(big_metric_(a, c) * big_metric_(d, b));
  }

 private:
  void build_rules() {
    rules_ = plane_rules();
    rules_.merge(dilatation_rules());
    rules_.merge(mixed_rules());
  }

  int n_, m_;
  GeometryPtr big_, inner_;
  RMatrixBundle inner_bundle_;
  MetricVec big_metric_;
  RewriteSystem rules_;
};

// ---------------------------------------------------------------------------
// Hopf ideal H of SO(N+2)

inline std::vector<Gen> h_generators(int n) {
  const int m = n + 2;
  std::vector<Gen> out;
  for (int a = 1; a <= n; ++a) out.push_back(gen_big(a, 0));
  for (int b = 1; b <= n; ++b) out.push_back(gen_big(m - 1, b));
  out.push_back(gen_big(m - 1, 0));
  return out;
}

inline Report check_hopf_ideal(int n) {
  Report rep("hopf-ideal");
  const int m = n + 2;
  IsoContext ctx(n);
  const auto& names = ctx.names();
  for (Gen h : h_generators(n)) {
    const std::string hn = gen_name(h);
    TensorElement d = coproduct_matrix(AlgebraElement::gen(h), m, GenKind::BigT);
    bool ok = true;
    json terms = json::array();
    for (const auto& [k, c] : d.terms()) {
      const bool left = ctx.is_h_generator(k.first[0]);
      const bool right = ctx.is_h_generator(k.second[0]);
      ok = ok && (left || right);
      terms.push_back({{"term", word_string(k.first) + " (x) " + word_string(k.second)},
                       {"side", left ? "H (x) A" : (right ? "A (x) H" : "none")}});
    }
    rep.add("Delta(" + hn + ") in H(x)A + A(x)H", "coideal", ok, json{{"decomposition", terms}});
    rep.add("epsilon(" + hn + ") = 0", "coideal", counit_matrix(AlgebraElement::gen(h)).is_zero());
    AlgebraElement k = antipode_matrix(AlgebraElement::gen(h), ctx.big_metric(), GenKind::BigT);
    bool in_h = k.size() == 1 && k.terms().begin()->first.size() == 1 && ctx.is_h_generator(k.terms().begin()->first[0]);
    rep.add("kappa(" + hn + ") in H", "Hideal", in_h, json{{"kappa", k.to_string(names)}});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Bounded-degree ideal membership

struct CertificateTerm {
  Word left;
  int relation;
  Word right;
  std::string coeff;
};

struct MembershipResult {
  bool member = false;
  std::size_t rows = 0, columns = 0;
  std::vector<CertificateTerm> certificate;
};

/// Is e in span{w1 rel w2 : total degree <= bound}?  Coefficients are
/// mapped into the field F by `conv` (identity for Scalar, specialization
/// for Rational).
template <class F, class Conv>
MembershipResult ideal_membership_in(const AlgebraElement& e, const std::vector<AlgebraElement>& relations,
                                     const std::vector<Gen>& alphabet, std::size_t bound, Conv&& conv,
                                     bool certificate = true) {
  MembershipResult res;
  std::map<Word, int, DegLex> col;
  auto column = [&](const Word& w) {
    auto [it, ins] = col.try_emplace(w, static_cast<int>(col.size()));
    return it->second;
  };
  auto to_vec = [&](const AlgebraElement& x) {
    std::map<int, F> v;
    for (const auto& [w, c] : x.terms()) {
      F f = conv(c);
      if (!field_is_zero(f)) v.emplace(column(w), f);
    }
    return v;
  };
  std::vector<std::vector<Word>> by_len(bound + 1);
  for (std::size_t l = 0; l <= bound; ++l) by_len[l] = words_of_length(alphabet, l);

  Echelon<F> ech(certificate);
  std::vector<std::tuple<Word, int, Word>> origin;
  for (std::size_t ri = 0; ri < relations.size(); ++ri) {
    const std::size_t deg = relations[ri].degree();
    if (deg > bound) continue;
    const std::size_t budget = bound - deg;
    for (std::size_t l1 = 0; l1 <= budget; ++l1)
      for (std::size_t l2 = 0; l1 + l2 <= budget; ++l2)
        for (const Word& w1 : by_len[l1])
          for (const Word& w2 : by_len[l2]) {
            AlgebraElement row = AlgebraElement::word(w1) * relations[ri] * AlgebraElement::word(w2);
            ech.insert(to_vec(row));
            origin.emplace_back(w1, static_cast<int>(ri), w2);
          }
  }
  res.rows = origin.size();
  auto target = to_vec(e);
  res.columns = col.size();
  auto combo = ech.express(target);
  res.member = combo.has_value();
  if (res.member && certificate)
    for (const auto& [k, c] : *combo) {
      const auto& [w1, ri, w2] = origin[k];
      std::string cs;
      if constexpr (std::is_same_v<F, Rational>)
        cs = rational_string(c);
      else
        cs = c.to_string({});
      res.certificate.push_back({w1, ri, w2, cs});
    }
  return res;
}

inline MembershipResult ideal_membership(const AlgebraElement& e, const Presentation& p, std::size_t bound,
                                         bool certificate = true) {
  return ideal_membership_in<Scalar>(e, p.values(), p.alphabet, bound, [](const Scalar& c) { return c; },
                                     certificate);
}

/// Same decision at a rational specialization of the parameters.
inline MembershipResult ideal_membership_at(const AlgebraElement& e, const std::vector<AlgebraElement>& relations,
                                            const std::vector<Gen>& alphabet, std::size_t bound, const Point& point,
                                            bool certificate = false) {
  return ideal_membership_in<Rational>(e, relations, alphabet, bound,
                                       [&](const Scalar& c) { return c.specialize(point); }, certificate);
}

}  // namespace orthoq
