#include <catch_amalgamated.hpp>

#include <random>

#include "orthoq/itensor.hpp"

using namespace orthoq;

namespace {

SparseTensor4 random_tensor(std::mt19937& rng, GeometryPtr g, int count) {
  SparseTensor4 t(g);
  std::uniform_int_distribution<int> idx(0, g->dim() - 1);
  std::uniform_int_distribution<int> c(-2, 2);
  for (int i = 0; i < count; ++i)
    t.add({idx(rng), idx(rng), idx(rng), idx(rng)}, Scalar(c(rng)) * Scalar::s_pow(c(rng)));
  return t;
}

}  // namespace

TEST_CASE("rho vector and priming") {
  for (int m = 3; m <= 8; ++m) {
    IndexGeometry g(m);
    for (int a = 0; a < m; ++a) {
      CHECK(g.prime(g.prime(a)) == a);
      CHECK(g.rho2(g.prime(a)) == -g.rho2(a));
    }
    if (m % 2 == 1) {
      CHECK(g.rho2(g.n2()) == 0);
    } else {
      CHECK(g.rho2(m / 2 - 1) == 0);
      CHECK(g.rho2(m / 2) == 0);
      CHECK(g.n2() == -1);
    }
    CHECK(g.rho2(0) == m - 2);
  }
  IndexGeometry g3(3);
  CHECK(g3.rho2_vector() == std::vector<int>{1, 0, -1});
}

TEST_CASE("metric invariants") {
  for (int m = 3; m <= 8; ++m) {
    auto g = make_geometry(m);
    MetricVec c(g);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        CHECK(c(a, b) == c(g->prime(b), g->prime(a)));
        Scalar sum;
        for (int e = 0; e < m; ++e) sum += c(a, e) * c(e, b);
        CHECK(sum == Scalar(a == b ? 1 : 0));
      }
  }
  auto g3 = make_geometry(3);
  MetricVec c3(g3);
  CHECK(c3(0, 2) == Scalar::s_pow(-1));
  CHECK(c3(1, 1) == Scalar(1));
  CHECK(c3(0, 1).is_zero());
}

TEST_CASE("compose is associative and has identity") {
  std::mt19937 rng(7);
  auto g = make_geometry(3);
  SparseTensor4 id = SparseTensor4::identity(g);
  for (int trial = 0; trial < 10; ++trial) {
    SparseTensor4 x = random_tensor(rng, g, 20);
    SparseTensor4 y = random_tensor(rng, g, 20);
    SparseTensor4 z = random_tensor(rng, g, 20);
    CHECK(tensor_equal(tensor_compose(id, x), x).equal);
    CHECK(tensor_equal(tensor_compose(x, id), x).equal);
    CHECK(tensor_equal(tensor_compose(tensor_compose(x, y), z), tensor_compose(x, tensor_compose(y, z))).equal);
  }
}

TEST_CASE("geometry mismatch is rejected") {
  SparseTensor4 a = SparseTensor4::identity(make_geometry(3));
  SparseTensor4 b = SparseTensor4::identity(make_geometry(4));
  CHECK_THROWS_AS(tensor_compose(a, b), GeometryMismatch);
  CHECK_THROWS_AS(tensor_equal(a, b), GeometryMismatch);
}

TEST_CASE("tensor_equal witness") {
  auto g = make_geometry(3);
  SparseTensor4 a(g), b(g);
  a.set({0, 1, 2, 0}, Scalar(2));
  b.set({0, 1, 2, 0}, Scalar(3));
  TensorDiff d = tensor_equal(a, b);
  CHECK_FALSE(d.equal);
  CHECK(d.index == std::vector<int>{0, 1, 2, 0});
  CHECK(d.lhs == Scalar(2));
  CHECK(d.rhs == Scalar(3));
  CHECK(tensor_equal(a, a).equal);
}

TEST_CASE("map_params is an involution") {
  std::mt19937 rng(3);
  auto g = make_geometry(4);
  SparseTensor4 x = random_tensor(rng, g, 30);
  CHECK(tensor_equal(x.map_params(inversion_map()).map_params(inversion_map()), x).equal);
  SparseTensor4 one(g);
  one.set({0, 0, 0, 0}, Scalar::s_pow(2));
  CHECK(one.map_params(inversion_map())(0, 0, 0, 0) == Scalar::s_pow(-2));
}

TEST_CASE("rank-6 lifts do not commute by accident") {
  auto g = make_geometry(3);
  SparseTensor4 id = SparseTensor4::identity(g);
  SparseMatrix i3 = triple_compose({{&id, Slot::s12}});
  CHECK(i3 == SparseMatrix::identity(27));

  // Swap operator P on two slots: P12 P23 != P23 P12.
  SparseTensor4 p(g);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) p.set({a, b, b, a}, Scalar(1));
  SparseMatrix lhs = triple_compose({{&p, Slot::s12}, {&p, Slot::s23}});
  SparseMatrix rhs = triple_compose({{&p, Slot::s23}, {&p, Slot::s12}});
  CHECK_FALSE(matrix_equal(lhs, rhs).equal);
  // Braid relation for the swap holds.
  SparseMatrix b1 = triple_compose({{&p, Slot::s12}, {&p, Slot::s23}, {&p, Slot::s12}});
  SparseMatrix b2 = triple_compose({{&p, Slot::s23}, {&p, Slot::s12}, {&p, Slot::s23}});
  CHECK(matrix_equal(b1, b2).equal);
  // P13 = P12 P23 P12
  SparseMatrix p13 = triple_compose({{&p, Slot::s13}});
  CHECK(matrix_equal(p13, b1).equal);
}
