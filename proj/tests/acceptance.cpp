// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "orthoq/suites.hpp"

using namespace orthoq;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "\n      failed: " << what;
    }
  }
  void require(const Report& rep, const std::string& what) {
    if (rep.ok()) return;
    pass = false;
    detail << "\n      failed: " << what;
    for (const auto& r : rep.results())
      if (r.asserted && !r.pass)
        detail << "\n        " << r.check << " [" << r.ref << "]" << (r.witness.is_null() ? "" : " " + r.witness.dump());
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Runs fn and fails the outcome when it exceeds the time budget.
template <class Fn>
void timed(Outcome& o, const std::string& what, double budget, Fn&& fn) {
  const auto t0 = Clock::now();
  fn();
  const double dt = seconds_since(t0);
  o.require(dt < budget, what + " took " + std::to_string(dt) + " s (budget " + std::to_string(budget) + " s)");
}

Report select(const Report& rep, const std::set<std::string>& refs, bool keep) {
  Report out(rep.suite());
  for (const auto& r : rep.results()) {
    if ((refs.count(r.ref) > 0) != keep) continue;
    if (r.asserted)
      out.add(r.check, r.ref, r.pass, r.witness);
    else
      out.note(r.check, r.ref, r.pass, r.witness);
  }
  return out;
}

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double dt = seconds_since(t0);
  if (!o.pass) ++failures;
  std::printf("%s  criterion %2d  %s  (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), dt,
              o.detail.str().c_str());
  std::fflush(stdout);
}

const std::set<std::string> kMetricRefs{"crc1", "crc2", "CR", "foraa'"};

}  // namespace

int main() {
  criterion(1, "QYBE with symbolic parameters, M = 3..6", [](Outcome& o) {
    for (int m = 3; m <= 6; ++m)
      timed(o, "QYBE M=" + std::to_string(m), 60, [&] {
        MatrixDiff d = check_qybe(build_R(m));
        o.require(d.equal, "QYBE M=" + std::to_string(m));
      });
  });

  std::vector<Report> rmatrix_reports;
  criterion(2, "triangularity, inverse, transposition, projectors, spectral decomposition, M = 3..6", [&](Outcome& o) {
    for (int m = 3; m <= 6; ++m)
      timed(o, "rmatrix suite M=" + std::to_string(m), 30, [&] {
        rmatrix_reports.push_back(verify_rmatrix_suite(m));
        Report rep = select(rmatrix_reports.back(), kMetricRefs, false);
        o.require(rep.find("R upper triangular") != nullptr && rep.find("R Rinv = I (Rinv by parameter inversion)"),
                  "suite content M=" + std::to_string(m));
        o.require(rep, "rmatrix M=" + std::to_string(m));
      });
  });

  criterion(3, "metric identities crc1, crc2 (also inverted), CR, foraa', M = 3..6", [&](Outcome& o) {
    o.require(rmatrix_reports.size() == 4, "rmatrix reports from criterion 2");
    for (const auto& full : rmatrix_reports) {
      Report rep = select(full, kMetricRefs, true);
      std::size_t asserted = 0;
      for (const auto& r : rep.results()) asserted += r.asserted ? 1 : 0;
      o.require(asserted >= 6, "metric identity count");
      o.require(rep, "metric identities");
    }
  });

  criterion(4, "embedding of R_N into R_{N+2}, N = 3, 4, 5", [](Outcome& o) {
    for (int n = 3; n <= 5; ++n) o.require(decompose_embedding(n), "embedding N=" + std::to_string(n));
  });

  criterion(5, "plane + dilatation confluence and Hilbert dimensions C(N+d-1,d), d <= 4, N = 3, 4", [](Outcome& o) {
    for (int n = 3; n <= 4; ++n) {
      IsoContext ctx(n);
      RewriteSystem zeta = ctx.plane_rules();
      zeta.merge(ctx.dilatation_rules());
      o.require(check_confluence(zeta, ctx.zeta_alphabet(), ctx.names(), "plane+dilatation"),
                "confluence N=" + std::to_string(n));
      for (int d = 0; d <= 4; ++d) {
        std::size_t want = 1;
        for (int i = 1; i <= d; ++i) want = want * static_cast<std::size_t>(n - 1 + i) / static_cast<std::size_t>(i);
        o.require(hilbert_dimension(ctx.plane_rules(), ctx.x_alphabet(), static_cast<std::size_t>(d)) == want,
                  "hilbert N=" + std::to_string(n) + " d=" + std::to_string(d));
      }
    }
  });

  criterion(6, "exterior top degree one-dimensional; N=3 qdet at q=r=1 is the classical determinant", [](Outcome& o) {
    for (int n = 3; n <= 4; ++n) {
      auto g = make_geometry(n);
      Presentation ext = build_exterior(g);
      RewriteSystem rs = exterior_rules(ext);
      o.require(hilbert_dimension(rs, ext.alphabet, static_cast<std::size_t>(n)) == 1 &&
                    hilbert_dimension(rs, ext.alphabet, static_cast<std::size_t>(n + 1)) == 0,
                "top degree N=" + std::to_string(n));
    }
    auto g3 = make_geometry(3);
    json w = qdet_classical_witness(quantum_determinant(g3), g3->params(), 3);
    o.require(w.is_null(), "qdet specialization " + w.dump());
  });

  criterion(7, "Hopf ideal on the 2N+1 generators of H, N = 3, 4", [](Outcome& o) {
    for (int n = 3; n <= 4; ++n) {
      Report rep = check_hopf_ideal(n);
      o.require(rep.results().size() == static_cast<std::size_t>(3 * (2 * n + 1)), "check count");
      o.require(rep, "hopf ideal N=" + std::to_string(n));
    }
  });

  criterion(8, "envelope suite, N=3 at D=3 and N=4 at D=2", [](Outcome& o) {
    timed(o, "envelope suites", 600, [&] {
      o.require(verify_envelope_suite(3, {3, 1}), "envelope N=3 D=3");
      o.require(verify_envelope_suite(4, {2, 1}), "envelope N=4 D=2");
    });
  });

  criterion(9, "L+^1_1 L-^1_1 = eps fails with generic g and holds uniparametrically", [](Outcome& o) {
    Report rep = check_epsiaepsi(3);
    o.require(rep, "epsiaepsi");
    const CheckResult* multi = rep.find("multiparametric L+^1_1 L-^1_1 != eps detected");
    o.require(multi && multi->pass && !multi->witness.is_null(), "concrete multiparametric witness");
  });

  criterion(10, "IU generators annihilate H words of length <= 3; excluded functionals fail", [](Outcome& o) {
    Report rep = check_iu_membership(3, 3);
    o.require(rep, "IU membership");
    o.require(rep.results().size() == 1 + iu_excluded(3).size(), "one line per excluded functional");
  });

  criterion(11, "pairing well defined on 100 random H elements; Hopf-pairing axioms, N=3", [](Outcome& o) {
    o.require(check_pairing_well_defined(3, 100, 20240611, 2), "pairing on random H");
    Report hp = check_hopf_pairing(3);
    o.require(hp, "Hopf pairing");
    for (const char* ref : {"uuno", "udue", "utre", "uquattro"}) {
      bool seen = false;
      for (const auto& r : hp.results()) seen = seen || r.ref == ref;
      o.require(seen, std::string("axiom ") + ref + " checked");
    }
  });

  criterion(12, "eta monomials of degree <= 2 independent on words of length <= 3, N=3", [](Outcome& o) {
    o.require(check_freeness(3, 2, 3), "freeness");
  });

  criterion(13, "projected calculus relations at D=2, N = 3, 4", [](Outcome& o) {
    for (int n = 3; n <= 4; ++n)
      o.require(verify_qlie(n, CalculusKind::Projected, {2, 1}), "projected N=" + std::to_string(n));
  });

  criterion(14, "r = 1 calculus relations after per-word limits, N=3", [](Outcome& o) {
    Report rep = verify_qlie(3, CalculusKind::R1, {2, 1});
    o.require(rep, "r1 calculus");
    const CheckResult* limits = rep.find("every basis vector has a limit at r = 1");
    o.require(limits && limits->pass, "no PoleAtOne on the basis");
  });

  criterion(15, "Leibniz rule on all generator pairs of iso(3)", [](Outcome& o) {
    Report rep = check_leibniz(3);
    o.require(rep, "Leibniz");
  });

  criterion(16, "adjoint coaction table, N=3", [](Outcome& o) {
    Report rep = adjoint_coaction_check(3);
    o.require(rep, "adjoint coaction");
    const CheckResult* vv = rep.find("P(M^b_{o b o}) = v^2");
    o.require(vv && vv->pass, "P(M^b_{o b o}) = v^2");
    for (const char* z : {"P(M^b_{o b b}) = 0", "P(M^b_{1 b b}) = 0"}) {
      const CheckResult* r = rep.find(z);
      o.require(r && r->pass, z);
    }
  });

  std::printf("%s  %d of 16 criteria failed\n", failures == 0 ? "OK" : "FAILED", failures);
  return failures == 0 ? 0 : 1;
}
