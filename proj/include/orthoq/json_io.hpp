#pragma once

// Canonical JSON documents for scalars, R-type tensors and algebra elements.
//
// Every document carries a header {dim, series, vars}; scalars are written
// as {num: [...], den: [...]} with one {coeff, exponents} record per term,
// exponents ordered as the header's vars.  Loading accepts any term or entry
// order, re-canonicalizes, and reports whether the input differed from the
// canonical text.

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "orthoq/algebra.hpp"
#include "orthoq/itensor.hpp"
#include "orthoq/report.hpp"
#include "orthoq/scalar.hpp"

namespace orthoq {

struct SchemaError : std::runtime_error {
  std::string pointer;
  SchemaError(std::string ptr, const std::string& what)
      : std::runtime_error((ptr.empty() ? std::string("/") : ptr) + ": " + what), pointer(std::move(ptr)) {}
};

template <class T>
struct Loaded {
  T value;
  bool recanonicalized = false;  // input was valid but not in canonical form
};

/// Which generator alphabet an element document uses.
enum class ElementKind { Iso, So, Functional };

inline const char* element_kind_name(ElementKind k) {
  switch (k) {
    case ElementKind::Iso: return "iso";
    case ElementKind::So: return "so";
    case ElementKind::Functional: return "functional";
  }
  return "?";
}

namespace io_detail {

inline std::string ptr(const std::string& base, const std::string& key) { return base + "/" + key; }
inline std::string ptr(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

inline const json& field(const json& j, const std::string& key, const std::string& at) {
  if (!j.is_object()) throw SchemaError(at, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(ptr(at, key), "missing field");
  return *it;
}

inline const json& array_field(const json& j, const std::string& key, const std::string& at) {
  const json& a = field(j, key, at);
  if (!a.is_array()) throw SchemaError(ptr(at, key), "expected an array");
  return a;
}

inline int int_field(const json& j, const std::string& key, const std::string& at) {
  const json& v = field(j, key, at);
  if (!v.is_number_integer()) throw SchemaError(ptr(at, key), "expected an integer");
  return v.get<int>();
}

inline std::string string_field(const json& j, const std::string& key, const std::string& at) {
  const json& v = field(j, key, at);
  if (!v.is_string()) throw SchemaError(ptr(at, key), "expected a string");
  return v.get<std::string>();
}

inline json poly_json(const Poly& p, int nvars) {
  json out = json::array();
  for (const auto& [m, c] : p.terms()) {
    json e = json::array();
    for (int i = 0; i < nvars; ++i) e.push_back(m.e[i]);
    out.push_back({{"coeff", rational_string(c)}, {"exponents", std::move(e)}});
  }
  return out;
}

inline Poly poly_from(const json& arr, int nvars, const std::string& at) {
  std::vector<Poly::Term> terms;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string here = ptr(at, i);
    const std::string cs = string_field(arr[i], "coeff", here);
    if (cs.find_first_of(".eE") != std::string::npos) throw SchemaError(ptr(here, "coeff"), "decimal coefficient");
    Rational c;
    try {
      c = parse_rational(cs);
    } catch (const std::exception&) {
      throw SchemaError(ptr(here, "coeff"), "not a rational: " + cs);
    }
    const json& ex = array_field(arr[i], "exponents", here);
    if (static_cast<int>(ex.size()) != nvars)
      throw SchemaError(ptr(here, "exponents"), "expected " + std::to_string(nvars) + " exponents");
    Monomial m;
    for (int k = 0; k < nvars; ++k) {
      if (!ex[k].is_number_integer()) throw SchemaError(ptr(ptr(here, "exponents"), k), "expected an integer");
      const long v = ex[k].get<long>();
      if (v < INT16_MIN || v > INT16_MAX) throw SchemaError(ptr(ptr(here, "exponents"), k), "exponent out of range");
      m.e[k] = static_cast<std::int16_t>(v);
    }
    terms.emplace_back(m, c);
  }
  return Poly::from_terms(std::move(terms));
}

}  // namespace io_detail

inline json header_json(const ParamSpace& ps) {
  return {{"dim", ps.qdim()}, {"series", std::string(1, series_char(series_of(ps.qdim())))}, {"vars", ps.var_names()}};
}

/// Validates a header against the parameter space of SO(dim).
inline ParamSpace parse_header(const json& doc, const std::string& at = "") {
  const std::string h = io_detail::ptr(at, "header");
  const json& hd = io_detail::field(doc, "header", at);
  const int dim = io_detail::int_field(hd, "dim", h);
  if (dim < 3 || dim > 15) throw SchemaError(io_detail::ptr(h, "dim"), "dimension out of range");
  ParamSpace ps(dim);
  const std::string series = io_detail::string_field(hd, "series", h);
  if (series != std::string(1, series_char(series_of(dim))))
    throw SchemaError(io_detail::ptr(h, "series"), "series " + series + " does not match dim " + std::to_string(dim));
  const json& vars = io_detail::array_field(hd, "vars", h);
  std::vector<std::string> got;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!vars[i].is_string()) throw SchemaError(io_detail::ptr(io_detail::ptr(h, "vars"), i), "expected a string");
    got.push_back(vars[i].get<std::string>());
  }
  const auto& want = ps.var_names();
  for (std::size_t i = 0; i < std::max(got.size(), want.size()); ++i) {
    if (i >= got.size()) throw SchemaError(io_detail::ptr(h, "vars"), "missing variable " + want[i]);
    if (i >= want.size() || got[i] != want[i])
      throw SchemaError(io_detail::ptr(io_detail::ptr(h, "vars"), i), "unknown variable " + got[i]);
  }
  return ps;
}

inline json scalar_json(const Scalar& x, int nvars) {
  return {{"num", io_detail::poly_json(x.num(), nvars)}, {"den", io_detail::poly_json(x.den(), nvars)}};
}

inline Scalar scalar_from_json(const json& j, int nvars, const std::string& at = "") {
  Poly num = io_detail::poly_from(io_detail::array_field(j, "num", at), nvars, io_detail::ptr(at, "num"));
  Poly den = io_detail::poly_from(io_detail::array_field(j, "den", at), nvars, io_detail::ptr(at, "den"));
  if (den.is_zero()) throw SchemaError(io_detail::ptr(at, "den"), "zero denominator");
  try {
    return Scalar::fraction(num, den);
  } catch (const DenominatorClass& e) {
    throw SchemaError(io_detail::ptr(at, "den"), e.what());
  }
}

// Tensors -------------------------------------------------------------------

inline json tensor_json(const SparseTensor4& t) {
  const ParamSpace& ps = t.geometry().params();
  const int nv = ps.num_vars();
  json entries = json::array();
  for (const auto& [idx, v] : t.entries())  // std::map: lexicographic
    entries.push_back({{"idx", {idx[0], idx[1], idx[2], idx[3]}}, {"value", scalar_json(v, nv)}});
  return {{"header", header_json(ps)}, {"kind", "tensor"}, {"entries", std::move(entries)}};
}

inline Loaded<SparseTensor4> tensor_from_json(const json& doc) {
  const ParamSpace ps = parse_header(doc);
  if (io_detail::string_field(doc, "kind", "") != "tensor") throw SchemaError("/kind", "expected \"tensor\"");
  GeometryPtr g = make_geometry(ps.qdim());
  SparseTensor4 t(g);
  const json& entries = io_detail::array_field(doc, "entries", "");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string at = io_detail::ptr("/entries", i);
    const json& idx = io_detail::array_field(entries[i], "idx", at);
    if (idx.size() != 4) throw SchemaError(io_detail::ptr(at, "idx"), "expected 4 indices");
    Index4 k{};
    for (int p = 0; p < 4; ++p) {
      if (!idx[p].is_number_integer() || idx[p].get<int>() < 0 || idx[p].get<int>() >= ps.qdim())
        throw SchemaError(io_detail::ptr(io_detail::ptr(at, "idx"), p), "index out of range");
      k[p] = idx[p].get<int>();
    }
    if (t.entries().count(k)) throw SchemaError(io_detail::ptr(at, "idx"), "duplicate entry");
    Scalar v = scalar_from_json(io_detail::field(entries[i], "value", at), ps.num_vars(), io_detail::ptr(at, "value"));
    if (v.is_zero()) throw SchemaError(io_detail::ptr(at, "value"), "explicit zero entry");
    t.set(k, std::move(v));
  }
  Loaded<SparseTensor4> out{std::move(t), false};
  out.recanonicalized = tensor_json(out.value) != doc;
  return out;
}

// Algebra elements and functionals ------------------------------------------

inline json word_json(const Word& w, ElementKind kind) {
  json out = json::array();
  if (w.empty() && kind == ElementKind::Functional) out.push_back("eps");
  for (Gen g : w) out.push_back(gen_name(g));
  return out;
}

inline json element_json(const AlgebraElement& e, ElementKind kind, const ParamSpace& ps) {
  json terms = json::array();
  for (const auto& [w, c] : e.terms())
    terms.push_back({{"word", word_json(w, kind)}, {"coeff", scalar_json(c, ps.num_vars())}});
  return {{"header", header_json(ps)}, {"kind", element_kind_name(kind)}, {"terms", std::move(terms)}};
}

inline Loaded<AlgebraElement> element_from_json(const json& doc) {
  const ParamSpace ps = parse_header(doc);
  const std::string ks = io_detail::string_field(doc, "kind", "");
  ElementKind kind;
  if (ks == "iso")
    kind = ElementKind::Iso;
  else if (ks == "so")
    kind = ElementKind::So;
  else if (ks == "functional")
    kind = ElementKind::Functional;
  else
    throw SchemaError("/kind", "unknown element kind " + ks);

  AlgebraElement e;
  std::set<Word> seen;
  const json& terms = io_detail::array_field(doc, "terms", "");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string at = io_detail::ptr("/terms", i);
    const json& wj = io_detail::array_field(terms[i], "word", at);
    Word w;
    for (std::size_t p = 0; p < wj.size(); ++p) {
      const std::string here = io_detail::ptr(io_detail::ptr(at, "word"), p);
      if (!wj[p].is_string()) throw SchemaError(here, "expected a generator name");
      const std::string name = wj[p].get<std::string>();
      if (name == "eps" && kind == ElementKind::Functional) continue;
      Gen g;
      try {
        g = parse_gen(name, kind == ElementKind::So);
      } catch (const ParseError& err) {
        throw SchemaError(here, err.what());
      }
      const GenKind gk = gen_kind(g);
      const bool ok = kind == ElementKind::Functional ? (gk == GenKind::LPlus || gk == GenKind::LMinus)
                      : kind == ElementKind::So       ? gk == GenKind::BigT
                                                      : (gk == GenKind::U || gk == GenKind::V || gk == GenKind::X ||
                                                         gk == GenKind::T);
      if (!ok) throw SchemaError(here, "generator " + name + " not in the " + ks + " alphabet");
      w.push_back(g);
    }
    if (!seen.insert(w).second) throw SchemaError(io_detail::ptr(at, "word"), "duplicate word");
    e.add(w, scalar_from_json(io_detail::field(terms[i], "coeff", at), ps.num_vars(), io_detail::ptr(at, "coeff")));
  }
  Loaded<AlgebraElement> out{std::move(e), false};
  out.recanonicalized = element_json(out.value, kind, ps) != doc;
  return out;
}

// Files ---------------------------------------------------------------------

inline std::string canonical_text(const json& doc) { return doc.dump(2) + "\n"; }

inline void save_json(const std::string& path, const json& doc) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << canonical_text(doc);
}

inline json load_json(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw SchemaError("", e.what());
  }
}

}  // namespace orthoq
