#pragma once

// Named verification suites shared by the command-line tool and the
// acceptance runner.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "orthoq/calculus.hpp"
#include "orthoq/envelope.hpp"
#include "orthoq/presentation.hpp"
#include "orthoq/rmatrix.hpp"

namespace orthoq {

struct SuiteOptions {
  int n = 3;
  int degree = 0;  // 0 selects the per-suite default
  int jobs = 1;
  std::uint64_t seed = 20240611;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"rmatrix", "embedding", "presentation", "envelope",
                                              "calculus-projected", "calculus-r1"};
  return names;
}

namespace detail {

inline int permutation_sign(const std::vector<int>& p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

/// Classical specialization of the quantum determinant: every word
/// T^1_{p1} ... T^n_{pn} must carry sign(p) at q = r = 1, every other word 0.
inline json qdet_classical_witness(const AlgebraElement& det, const ParamSpace& ps, int n) {
  Point one;
  for (int i = 0; i < ps.num_vars(); ++i) one[i] = Rational(1);
  for (const auto& [w, c] : det.terms()) {
    std::vector<int> cols;
    bool rows_ok = static_cast<int>(w.size()) == n;
    for (int a = 0; rows_ok && a < n; ++a) {
      rows_ok = gen_kind(w[a]) == GenKind::T && gen_i(w[a]) == a;
      cols.push_back(gen_j(w[a]));
    }
    std::vector<int> sorted = cols;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> iota(n);
    std::iota(iota.begin(), iota.end(), 0);
    const Rational want = rows_ok && sorted == iota ? Rational(detail::permutation_sign(cols)) : Rational(0);
    const Rational got = c.specialize(one);
    if (got != want) return {{"word", word_string(w)}, {"value", rational_string(got)}, {"expected", rational_string(want)}};
  }
  // every permutation word must be present
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    Word w;
    for (int a = 0; a < n; ++a) w.push_back(gen_t(a, p[a]));
    if (det.coeff(w).is_zero()) return {{"word", word_string(w)}, {"value", "0"}, {"expected", "+-1"}};
  } while (std::next_permutation(p.begin(), p.end()));
  return nullptr;
}

inline Report verify_presentation_suite(int n, int max_degree = 4) {
  Report rep("presentation");
  IsoContext ctx(n);
  const auto& names = ctx.names();

  RewriteSystem zeta = ctx.plane_rules();
  zeta.merge(ctx.dilatation_rules());
  rep.merge(check_confluence(ctx.plane_rules(), ctx.x_alphabet(), names, "plane"));
  rep.merge(check_confluence(zeta, ctx.zeta_alphabet(), names, "plane+dilatation"));
  rep.merge(check_confluence(ctx.rules(), ctx.alphabet(), names, "iso"));

  for (int d = 0; d <= max_degree; ++d) {
    const std::size_t want = detail::binomial(static_cast<std::size_t>(n + d - 1), static_cast<std::size_t>(d));
    const std::size_t got = hilbert_dimension(ctx.plane_rules(), ctx.x_alphabet(), static_cast<std::size_t>(d));
    json w = nullptr;
    if (got != want) w = {{"degree", d}, {"got", got}, {"expected", want}};
    rep.add("plane Hilbert dimension at degree " + std::to_string(d) + " is C(N+d-1,d)", "Poincare", got == want, w);
    bool dil_ok = true;
    for (int k = -2; k <= 2 && dil_ok; ++k) {
      const std::size_t c = dilatation_count(zeta, n, k, static_cast<std::size_t>(d));
      if (c != want) {
        dil_ok = false;
        w = {{"degree", d}, {"u-power", k}, {"got", c}, {"expected", want}};
      }
    }
    rep.add("normal words u^k x^... at degree " + std::to_string(d) + " match the plane", "Poincare", dil_ok,
            dil_ok ? json(nullptr) : w);
  }

  {
    auto g = make_geometry(n);
    Presentation ext = build_exterior(g);
    RewriteSystem rs = exterior_rules(ext);
    const std::size_t top = hilbert_dimension(rs, ext.alphabet, static_cast<std::size_t>(n));
    const std::size_t above = hilbert_dimension(rs, ext.alphabet, static_cast<std::size_t>(n + 1));
    rep.add("exterior algebra top degree is one-dimensional", "detT", top == 1 && above == 0,
            top == 1 && above == 0 ? json(nullptr) : json{{"dim_top", top}, {"dim_above", above}});
    rep.merge(check_confluence(rs, ext.alphabet, g->params().var_names(), "exterior"));
    try {
      AlgebraElement det = quantum_determinant(g);
      json w = qdet_classical_witness(det, g->params(), n);
      rep.add("quantum determinant at q = r = 1 is the classical determinant", "detT", w.is_null(), w);
    } catch (const TopDegreeNotOneDimensional& e) {
      rep.add("quantum determinant at q = r = 1 is the classical determinant", "detT", false,
              json{{"error", e.what()}});
    }
  }

  rep.merge(check_hopf_ideal(n));
  return rep;
}

inline Report verify_envelope_all(const SuiteOptions& o) {
  Report rep("envelope");
  const int d = o.degree > 0 ? o.degree : default_envelope_degree(o.n);
  rep.merge(verify_envelope_suite(o.n, {d, o.jobs}));
  rep.merge(check_epsiaepsi(o.n, std::min(d, 3)));
  rep.merge(check_iu_membership(o.n, std::min(d, 3), o.jobs));
  rep.merge(check_pairing_well_defined(o.n, 100, o.seed, 2, o.jobs));
  rep.merge(check_hopf_pairing(o.n, o.jobs));
  rep.merge(check_freeness(o.n, 2, std::min(d, 3)));
  return rep;
}

inline Report verify_calculus_projected(const SuiteOptions& o) {
  Report rep("calculus-projected");
  rep.merge(verify_qlie(o.n, CalculusKind::Projected, {o.degree > 0 ? o.degree : 2, o.jobs}));
  rep.merge(check_leibniz(o.n, o.jobs));
  rep.merge(adjoint_coaction_check(o.n));
  rep.merge(check_bracket(o.n));
  return rep;
}

inline Report verify_calculus_r1(const SuiteOptions& o) {
  return verify_qlie(o.n, CalculusKind::R1, {o.degree > 0 ? o.degree : 2, o.jobs});
}

/// Runs one named suite, or every suite for "all".  The rmatrix suite is run
/// on the inner SO(N) matrix and on the embedded SO(N+2) matrix.
inline Report run_suite(const std::string& name, const SuiteOptions& o) {
  if (name == "all") {
    Report rep("all");
    for (const auto& s : suite_names()) rep.merge(run_suite(s, o));
    return rep;
  }
  if (name == "rmatrix") {
    Report rep("rmatrix");
    for (int m : {o.n, o.n + 2}) {
      Report one = verify_rmatrix_suite(m);
      for (const auto& r : one.results()) {
        CheckResult c = r;
        c.check = "M=" + std::to_string(m) + " " + c.check;
        if (c.asserted)
          rep.add(c.check, c.ref, c.pass, c.witness);
        else
          rep.note(c.check, c.ref, c.pass, c.witness);
      }
    }
    return rep;
  }
  if (name == "embedding") return decompose_embedding(o.n);
  if (name == "presentation") return verify_presentation_suite(o.n);
  if (name == "envelope") return verify_envelope_all(o);
  if (name == "calculus-projected") return verify_calculus_projected(o);
  if (name == "calculus-r1") return verify_calculus_r1(o);
  throw std::invalid_argument("unknown suite " + name);
}

}  // namespace orthoq
