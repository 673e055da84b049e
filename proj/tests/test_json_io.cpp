#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>

#include "orthoq/envelope.hpp"
#include "orthoq/json_io.hpp"
#include "orthoq/presentation.hpp"
#include "orthoq/rmatrix.hpp"

using namespace orthoq;

TEST_CASE("scalar records", "[io]") {
  ParamSpace ps(5);
  Scalar x = (ps.lambda() * ps.q(0, 1) + Scalar(Rational(3, 7))) * (Scalar::s_pow(2) + Scalar(1)).inverse();
  json j = scalar_json(x, ps.num_vars());
  CHECK(j["den"].size() == 2);
  CHECK(j["num"][0]["exponents"].size() == ps.var_names().size());
  CHECK(scalar_from_json(j, ps.num_vars()) == x);

  json bad = j;
  bad["num"][0]["coeff"] = "0.5";
  CHECK_THROWS_AS(scalar_from_json(bad, ps.num_vars()), SchemaError);
  bad = j;
  bad["den"][0]["exponents"].push_back(0);
  try {
    scalar_from_json(bad, ps.num_vars());
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.pointer == "/den/0/exponents");
  }
}

TEST_CASE("a g-dependent denominator is a schema violation", "[io]") {
  ParamSpace ps(6);
  json j = scalar_json(Scalar(1), ps.num_vars());
  json den = scalar_json(Scalar(ps.q(0, 1)) + Scalar(1), ps.num_vars())["num"];
  j["den"] = den;
  CHECK_THROWS_AS(scalar_from_json(j, ps.num_vars()), SchemaError);
}

TEST_CASE("tensor round trip is bit exact", "[io]") {
  for (int m : {3, 4, 5, 6}) {
    SparseTensor4 R = build_R(m);
    json doc = tensor_json(R);
    auto back = tensor_from_json(doc);
    CHECK_FALSE(back.recanonicalized);
    CHECK(tensor_equal(R, back.value).equal);
    CHECK(canonical_text(tensor_json(back.value)) == canonical_text(doc));
  }
}

TEST_CASE("tensor entries are sorted by idx", "[io]") {
  json doc = tensor_json(build_R(4));
  const auto& e = doc["entries"];
  for (std::size_t i = 1; i < e.size(); ++i)
    CHECK(e[i - 1]["idx"].get<std::vector<int>>() < e[i]["idx"].get<std::vector<int>>());
}

TEST_CASE("unsorted input is accepted and flagged", "[io]") {
  SparseTensor4 R = build_R(3);
  json doc = tensor_json(R);
  std::reverse(doc["entries"].begin(), doc["entries"].end());
  auto back = tensor_from_json(doc);
  CHECK(back.recanonicalized);
  CHECK(tensor_equal(R, back.value).equal);
  CHECK(tensor_json(back.value) == tensor_json(R));
}

TEST_CASE("header validation", "[io]") {
  json doc = tensor_json(build_R(4));
  SECTION("unknown variable") {
    doc["header"]["vars"][1] = "g99";
    try {
      tensor_from_json(doc);
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.pointer == "/header/vars/1");
    }
  }
  SECTION("extra variable") {
    doc["header"]["vars"].push_back("t");
    CHECK_THROWS_AS(tensor_from_json(doc), SchemaError);
  }
  SECTION("series mismatch") {
    doc["header"]["series"] = "B";
    CHECK_THROWS_AS(tensor_from_json(doc), SchemaError);
  }
  SECTION("duplicate entry") {
    doc["entries"].push_back(doc["entries"][0]);
    CHECK_THROWS_AS(tensor_from_json(doc), SchemaError);
  }
  SECTION("index out of range") {
    doc["entries"][0]["idx"][2] = 4;
    try {
      tensor_from_json(doc);
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.pointer == "/entries/0/idx/2");
    }
  }
}

TEST_CASE("algebra and functional elements round trip", "[io]") {
  IsoContext ctx(3);
  const ParamSpace& ps = ctx.big()->params();
  AlgebraElement a = ctx.reduce(AlgebraElement::word(parse_word("x2 x1")) + AlgebraElement::gen(gen_u(), ps.lambda()));
  json ja = element_json(a, ElementKind::Iso, ps);
  auto ba = element_from_json(ja);
  CHECK(ba.value == a);
  CHECK_FALSE(ba.recanonicalized);

  FunctionalElement f = lp(0, 0) * lm(1, 2) - eps().scaled(ps.r());
  json jf = element_json(f, ElementKind::Functional, ps);
  CHECK(jf["terms"][0]["word"] == json::array({"eps"}));
  auto bf = element_from_json(jf);
  CHECK(bf.value == f);
  CHECK_FALSE(bf.recanonicalized);

  json wrong = jf;
  wrong["terms"][1]["word"][0] = "x1";
  try {
    element_from_json(wrong);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.pointer == "/terms/1/word/0");
  }
}

TEST_CASE("file round trip", "[io]") {
  const auto path = std::filesystem::temp_directory_path() / "orthoq_io_test.json";
  json doc = tensor_json(build_R(5));
  save_json(path.string(), doc);
  json back = load_json(path.string());
  CHECK(back == doc);
  CHECK(tensor_equal(tensor_from_json(back).value, build_R(5)).equal);
  std::filesystem::remove(path);
}
