#include <catch_amalgamated.hpp>

#include "orthoq/calculus.hpp"

using namespace orthoq;

namespace {

Point classical_point() {
  Point p;
  for (auto& v : p) v = Rational(1);
  return p;
}

bool all_pass(const Report& rep) {
  for (const auto& r : rep.results()) {
    INFO(r.check << " " << r.witness.dump());
    CHECK((r.pass || !r.asserted));
  }
  return rep.ok();
}

}  // namespace

TEST_CASE("f and chi on the identity", "[calculus]") {
  Evaluator ev(5);
  for (int a = 0; a < 5; ++a) CHECK(ev.eval(build_f(ev, a, a, a, a), AlgebraElement::one()) == Scalar(1));
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) CHECK(ev.eval(build_chi(ev, a, b), AlgebraElement::one()).is_zero());
}

TEST_CASE("chi^b_b reduces to a single f by triangularity", "[calculus]") {
  Evaluator ev(5);
  const Scalar il = ev.geometry().lambda().inverse();
  for (int b = 0; b < 4; ++b) CHECK(build_chi(ev, 4, b) == build_f(ev, 4, 4, 4, b).scaled(il));
  // kappa'(L+^A_C) vanishes for A > C, so f^C_{C A B} needs C >= A
  CHECK(build_f(ev, 1, 1, 3, 2).is_zero());
  CHECK_FALSE(build_f(ev, 3, 3, 1, 2).is_zero());
}

TEST_CASE("tangent bases", "[calculus]") {
  Evaluator ev(5);
  TangentBasis p = tangent_basis(ev, CalculusKind::Projected);
  TangentBasis r = tangent_basis(ev, CalculusKind::R1);
  CHECK(p.size() == 5);
  CHECK(r.size() == 3 + 3 + 1);
  CHECK(p.find(4, 0) >= 0);
  CHECK(r.find(1, 3) < 0);
  CHECK(r.find(2, 3) >= 0);
  for (const auto& v : p.vectors) CHECK(iu_annihilates(ev, v.f, 2).annihilates);
  for (const auto& v : r.vectors) CHECK(iu_annihilates(ev, v.f, 2).annihilates);
  for (int a = 1; a <= 3; ++a) CHECK_FALSE(iu_annihilates(ev, build_chi(ev, a, 4), 1).annihilates);
}

TEST_CASE("classical limit of the r1 tangent vectors", "[calculus]") {
  Evaluator ev(5);
  TangentBasis tb = tangent_basis(ev, CalculusKind::R1);
  const Point one = classical_point();
  // chi^A_B -> E_{A'B'} - E_{BA} on T^C_D
  for (const auto& v : tb.vectors)
    for (int c = 0; c < 5; ++c)
      for (int d = 0; d < 5; ++d) {
        const int a = v.upper, b = v.lower;
        Rational want = Rational((c == 4 - a && d == 4 - b) ? 1 : 0) - Rational((c == b && d == a) ? 1 : 0);
        Scalar got = ev.eval(v.f, Word{gen_big(c, d)}).limit_s_to_1();
        CHECK(got.specialize(one) == want);
      }
}

TEST_CASE("a genuine pole at r = 1 is reported", "[calculus]") {
  Evaluator ev(5);
  FunctionalElement f = (lp(1, 1) * lm(1, 1) - eps()).scaled(ev.geometry().lambda().inverse());
  CHECK_THROWS_AS(check_limits_exist(ev, f, 1), PoleAtOne);
}

TEST_CASE("projected q-Lie algebra", "[calculus]") {
  for (int n : {3, 4}) {
    Report rep = verify_qlie(n, CalculusKind::Projected, {2, 1});
    CHECK(all_pass(rep));
    CHECK(rep.find("calculus-projected/chi_o + lambda chi_o chi_bb = lambda k C chi chi") == nullptr);
    CHECK(rep.find("chi_o + lambda chi_o chi_bb = lambda k C chi chi") != nullptr);
  }
}

TEST_CASE("perturbed projected relation fails", "[calculus]") {
  Evaluator ev(5);
  TangentBasis tb = tangent_basis(ev, CalculusKind::Projected);
  const FunctionalElement& c1 = tb.vectors[tb.find(4, 1)].f;
  const FunctionalElement& cb = tb.vectors[tb.find(4, 4)].f;
  FunctionalElement lhs = c1 * cb - (cb * c1).scaled(Scalar::s_pow(-4));
  CHECK(functional_equal(ev, lhs, c1.scaled(-Scalar::s_pow(-2)), 2).equal);
  CHECK_FALSE(functional_equal(ev, lhs, c1.scaled(Scalar::s_pow(-2)), 2).equal);
  CHECK_FALSE(functional_equal(ev, lhs, c1.scaled(-Scalar::s_pow(2)), 2).equal);
}

TEST_CASE("r1 q-Lie algebra", "[calculus]") {
  Report rep = verify_qlie(3, CalculusKind::R1, {2, 1});
  CHECK(all_pass(rep));
  Evaluator ev(5);
  TangentBasis tb = tangent_basis(ev, CalculusKind::R1);
  const FunctionalElement& c1 = tb.vectors[tb.find(4, 1)].f;
  const FunctionalElement& cb = tb.vectors[tb.find(4, 4)].f;
  CHECK(functional_equal_at_r1(ev, c1 * cb - cb * c1, c1.scaled(Scalar(-1)), 2).equal);
  CHECK_FALSE(functional_equal_at_r1(ev, c1 * cb - cb * c1, c1, 2).equal);
  // at generic r the same identity fails
  CHECK_FALSE(functional_equal(ev, c1 * cb - cb * c1, c1.scaled(Scalar(-1)), 2).equal);
}

TEST_CASE("differential", "[calculus]") {
  IsoContext ctx(3);
  Evaluator ev(ctx.big());
  IsoAction act(ctx, ev);
  TangentBasis tb = tangent_basis(ev, CalculusKind::Projected);
  for (const auto& t : differential(act, tb, AlgebraElement::one())) CHECK(t.coefficient.is_zero());
  auto du = differential(act, tb, AlgebraElement::gen(gen_u()));
  for (std::size_t i = 0; i < tb.size(); ++i) {
    if (tb.vectors[i].lower == 4)
      CHECK(du[i].coefficient == AlgebraElement::gen(gen_u(), Scalar::s_pow(2)));
    else
      CHECK(du[i].coefficient.is_zero());
  }
  // dx^a has a translation part along omega^b and a dilatation part
  auto dx = differential(act, tb, AlgebraElement::gen(gen_x(1)));
  CHECK_FALSE(dx[tb.find(4, 2)].coefficient.is_zero());
  CHECK_FALSE(dx[tb.find(4, 4)].coefficient.is_zero());
  CHECK(dx[tb.find(4, 0)].coefficient.is_zero());
}

TEST_CASE("bimodule matrix on the identity", "[calculus]") {
  IsoContext ctx(3);
  Evaluator ev(ctx.big());
  IsoAction act(ctx, ev);
  TangentBasis tb = tangent_basis(ev, CalculusKind::Projected);
  auto f = bimodule_functionals(ev, tb);
  auto m = bimodule_commute(act, f, AlgebraElement::one());
  for (std::size_t i = 0; i < tb.size(); ++i)
    for (std::size_t j = 0; j < tb.size(); ++j)
      CHECK(m[i][j] == (i == j ? AlgebraElement::one() : AlgebraElement{}));
  // exactly the six families of f^b_{H b B} survive triangularity
  std::size_t nonzero = 0;
  for (auto& row : f)
    for (auto& x : row) nonzero += x.is_zero() ? 0 : 1;
  CHECK(nonzero == 1 + 3 + 1 + 6 + 3 + 1);
}

TEST_CASE("Leibniz rule", "[calculus]") {
  Report rep = check_leibniz(3);
  CHECK(all_pass(rep));

  // dropping the a (chi * b) term breaks it
  IsoContext ctx(3);
  Evaluator ev(ctx.big());
  IsoAction act(ctx, ev);
  TangentBasis tb = tangent_basis(ev, CalculusKind::Projected);
  auto f = bimodule_functionals(ev, tb);
  const AlgebraElement a = AlgebraElement::gen(gen_x(0)), b = AlgebraElement::gen(gen_u());
  const std::size_t j = tb.find(4, 4);
  AlgebraElement direct = act.act(tb.vectors[j].f, a * b);
  auto fb = bimodule_commute(act, f, b);
  AlgebraElement partial;
  for (std::size_t i = 0; i < tb.size(); ++i) partial += act.act(tb.vectors[i].f, a) * fb[i][j];
  CHECK(iso_is_zero(ctx, direct - partial - a * act.act(tb.vectors[j].f, b)));
  CHECK_FALSE(iso_is_zero(ctx, direct - partial));
}

TEST_CASE("adjoint coaction table", "[calculus]") {
  Report rep = adjoint_coaction_check(3);
  CHECK(all_pass(rep));
  CHECK(rep.results().size() == 25);
  IsoContext ctx(3);
  AlgebraElement k = antipode_matrix(AlgebraElement::gen(gen_big(0, 0)), ctx.big_metric(), GenKind::BigT);
  AlgebraElement m00 = ctx.project(AlgebraElement::gen(gen_big(4, 4)) * k);
  CHECK(iso_is_zero(ctx, m00 - AlgebraElement::word({gen_v(), gen_v()})));
  CHECK_FALSE(iso_is_zero(ctx, m00 - AlgebraElement::gen(gen_v())));
}

TEST_CASE("bracket helper agrees with the structure constants", "[calculus]") {
  Report rep = check_bracket(3);
  REQUIRE(rep.results().size() == 1);
  CHECK(rep.results()[0].pass);
  Evaluator ev(5);
  TangentBasis tb = tangent_basis(ev, CalculusKind::Projected);
  CHECK(projected_structure_constants(ev, tb).size() == 4);
}
