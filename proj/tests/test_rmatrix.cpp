#include <catch_amalgamated.hpp>

#include "orthoq/rmatrix.hpp"

using namespace orthoq;

namespace {

Scalar s_(int k) { return Scalar::s_pow(k); }
const Scalar kLam = s_(2) - s_(-2);

Point classical_point(const ParamSpace& ps) {
  Point p;
  for (int v = 0; v < ps.num_vars(); ++v) p[v] = Rational(1);
  return p;
}

}  // namespace

TEST_CASE("R entries for N=3") {
  auto R = build_R(3);
  CHECK(R(0, 0, 0, 0) == s_(2));
  CHECK(R(1, 1, 1, 1) == Scalar(1));
  CHECK(R(2, 0, 0, 2) == kLam * (Scalar(1) - s_(-2)));
  CHECK(R(0, 2, 0, 2) == s_(-2));
  CHECK(R(1, 0, 1, 0) == Scalar(1));  // r/q with q_{2,1} = r
}

TEST_CASE("R reduces to the identity permutation classically") {
  for (int m = 3; m <= 6; ++m) {
    auto R = build_R(m);
    Point p = classical_point(R.geometry().params());
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int d = 0; d < m; ++d)
            CHECK(R(a, b, c, d).specialize(p) == Rational((a == c && b == d) ? 1 : 0));
  }
}

TEST_CASE("metric values") {
  auto g = make_geometry(3);
  MetricVec C = build_metric(g);
  CHECK(C(0, 2) == s_(-1));
  CHECK(C(1, 1) == Scalar(1));
  CHECK(C(0, 1).is_zero());
}

TEST_CASE("projector data") {
  auto B = RMatrixBundle::make(3);
  CHECK(B.trace == s_(2) + Scalar(1) + s_(-2));
  CHECK(B.K(0, 2, 2, 0) == Scalar(1));
  Point p = classical_point(B.geometry->params());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          // classical P_A: (delta delta - swap)/2
          Rational want = Rational((a == c && b == d) ? 1 : 0) - Rational((a == d && b == c) ? 1 : 0);
          CHECK(B.PA(a, b, c, d).specialize(p) == want / 2);
        }
}

TEST_CASE("compose checks from the contract") {
  auto B3 = RMatrixBundle::make(3);
  CHECK(tensor_equal(tensor_compose(B3.PA, B3.PA), B3.PA).equal);
  auto B4 = RMatrixBundle::make(4);
  CHECK(tensor_equal(tensor_compose(B4.R, B4.Rinv), SparseTensor4::identity(B4.geometry)).equal);
  TensorDiff d = tensor_equal(B3.R, B3.Rhat);
  CHECK_FALSE(d.equal);
  CHECK(B3.R(d.index[0], d.index[1], d.index[2], d.index[3]) ==
        B3.R(d.index[0], d.index[1], d.index[2], d.index[3]));  // witness is a real index
  CHECK(d.lhs == B3.R(d.index[0], d.index[1], d.index[2], d.index[3]));
  CHECK(d.rhs == B3.R(d.index[1], d.index[0], d.index[2], d.index[3]));
}

TEST_CASE("suite passes symbolically for M = 3..6") {
  for (int m = 3; m <= 6; ++m) {
    Report rep = verify_rmatrix_suite(m);
    INFO("M = " << m << "\n" << rep.to_text());
    CHECK(rep.ok());
  }
}

TEST_CASE("uniparametric specialization satisfies the suite") {
  for (int m = 4; m <= 5; ++m) {
    auto g = make_geometry(m);
    RMatrixBundle B(g);
    SparseTensor4 U = B.R.map_params(uniparametric_map());
    CHECK(check_qybe(U).equal);
    CHECK(tensor_equal(tensor_compose(U, B.Rinv.map_params(uniparametric_map())), SparseTensor4::identity(g)).equal);
  }
}

TEST_CASE("perturbed R breaks QYBE with witness") {
  auto B = RMatrixBundle::make(3);
  SparseTensor4 bad = B.R;
  bad.add({2, 0, 0, 2}, Scalar(1));
  MatrixDiff d = check_qybe(bad);
  CHECK_FALSE(d.equal);
  CHECK(d.row >= 0);
  SparseTensor4 sign = B.R;
  sign.set({1, 0, 0, 1}, -B.R(1, 0, 0, 1));
  CHECK_FALSE(check_qybe(sign).equal);
}

TEST_CASE("closed formula agrees with the table for M up to 8") {
  for (int m = 3; m <= 8; ++m) {
    auto g = make_geometry(m);
    auto R = build_R(g);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int d = 0; d < m; ++d) REQUIRE(R(a, b, c, d) == r_formula_entry(*g, a, b, c, d));
  }
}

TEST_CASE("embedding decomposition") {
  for (int n = 3; n <= 5; ++n) {
    Report rep = decompose_embedding(n);
    INFO(rep.to_text());
    CHECK(rep.ok());
  }
  auto big = make_geometry(5);
  CHECK(MetricVec(big)(4, 0) == s_(3));
  auto R = build_R(big);
  CHECK(R(4, 0, 0, 4) == kLam * (Scalar(1) - s_(-6)));
}
