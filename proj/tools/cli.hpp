#pragma once

// Command-line front end; main() only forwards to run().

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "orthoq/json_io.hpp"
#include "orthoq/parallel.hpp"
#include "orthoq/suites.hpp"

namespace orthoq::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int n = 3;
  std::string series = "auto";
  std::string spec;
  int degree = 0;
  std::uint64_t seed = 20240611;
  int jobs = 1;
  std::string format = "text";
  std::string out;
  std::string dump;
};

class Output {
 public:
  explicit Output(const RunConfig& cfg) : cfg_(cfg) {}
  bool json_mode() const { return cfg_.format == "json"; }
  std::ostream& text() { return buf_; }
  void set_json(json doc) { doc_ = std::move(doc); }
  void flush() {
    const std::string payload = json_mode() ? canonical_text(doc_) : buf_.str();
    if (cfg_.out.empty()) {
      std::cout << payload;
      return;
    }
    std::ofstream os(cfg_.out, std::ios::binary);
    if (!os) throw UsageError("cannot write " + cfg_.out);
    os << payload;
  }

 private:
  const RunConfig& cfg_;
  std::ostringstream buf_;
  json doc_;
};

inline void check_series(const RunConfig& cfg, int dim) {
  if (cfg.series == "auto") return;
  const std::string want(1, series_char(series_of(dim)));
  if (cfg.series != want)
    throw UsageError("--series " + cfg.series + " does not match dimension " + std::to_string(dim) + " (series " +
                     want + ")");
}

inline Point parse_spec(const RunConfig& cfg, const ParamSpace& ps) {
  std::map<std::string, Rational> values;
  std::stringstream ss(cfg.spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--spec expects k=v pairs, got " + item);
    try {
      values[item.substr(0, eq)] = parse_rational(item.substr(eq + 1));
    } catch (const std::invalid_argument&) {
      throw UsageError("--spec value is not a rational: " + item);
    }
  }
  try {
    return make_point(ps, values);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--spec: ") + e.what());
  }
}

struct Printer {
  const ParamSpace& ps;
  Point point;
  bool any = false;

  Printer(const RunConfig& cfg, const ParamSpace& p) : ps(p), point(parse_spec(cfg, p)) {
    for (const auto& v : point) any = any || v.has_value();
  }
  Scalar apply(const Scalar& x) const { return any ? specialize_partial(x, point) : x; }
  AlgebraElement apply(const AlgebraElement& e) const {
    if (!any) return e;
    AlgebraElement out;
    for (const auto& [w, c] : e.terms()) out.add(w, apply(c));
    return out;
  }
  std::string str(const Scalar& x) const { return apply(x).to_string(ps.var_names()); }
  json scalar(const Scalar& x) const { return scalar_json(apply(x), ps.num_vars()); }
};

inline std::string element_text(const AlgebraElement& e, const Printer& pr, bool functional) {
  if (e.is_zero()) return "0\n";
  std::string out;
  for (const auto& [w, c] : e.terms())
    out += "(" + pr.str(c) + ")  " + (functional ? functional_word_string(w) : word_string(w)) + "\n";
  return out;
}

// Subcommands ------------------------------------------------------------------

inline int cmd_build_r(const RunConfig& cfg) {
  check_series(cfg, cfg.n);
  SparseTensor4 R = build_R(cfg.n);
  Printer pr(cfg, R.geometry().params());
  if (pr.any) {
    SparseTensor4 spec(R.geometry_ptr());
    for (const auto& [k, v] : R.entries()) spec.set(k, pr.apply(v));
    R = std::move(spec);
  }
  json doc = tensor_json(R);
  if (!cfg.dump.empty()) save_json(cfg.dump, doc);
  Output out(cfg);
  if (out.json_mode()) {
    out.set_json(std::move(doc));
  } else {
    out.text() << "R for SO(" << cfg.n << "), series " << series_char(series_of(cfg.n)) << ", " << R.nnz()
               << " nonzero entries\n";
    for (const auto& [k, v] : R.entries())
      out.text() << "R[" << k[0] << "," << k[1] << "," << k[2] << "," << k[3] << "] = " << pr.str(v) << "\n";
  }
  out.flush();
  return kExitPass;
}

inline int cmd_verify(const RunConfig& cfg, const std::string& suite) {
  check_series(cfg, cfg.n);
  if (!cfg.spec.empty()) parse_spec(cfg, ParamSpace(cfg.n + 2));  // validated, never applied
  SuiteOptions o{cfg.n, cfg.degree, cfg.jobs, cfg.seed};
  Report rep = run_suite(suite, o);
  if (!cfg.spec.empty()) rep.note("--spec ignored: verification is symbolic", "", true);
  Output out(cfg);
  if (out.json_mode()) {
    json doc;
    doc["suite"] = suite;
    doc["n"] = cfg.n;
    doc["degree"] = cfg.degree;
    doc["seed"] = std::to_string(cfg.seed);
    doc["ok"] = rep.ok();
    doc["failures"] = rep.failures();
    doc["results"] = rep.to_json();
    out.set_json(std::move(doc));
  } else {
    out.text() << rep.to_text();
    out.text() << (rep.ok() ? "OK" : "FAILED") << "  suite=" << suite << " n=" << cfg.n << " checks="
               << rep.results().size() << " failures=" << rep.failures() << "\n";
  }
  out.flush();
  return rep.ok() ? kExitPass : kExitFail;
}

inline Word parse_user_word(const std::string& text, bool big) {
  try {
    return parse_word(text, big);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
}

inline int cmd_reduce(const RunConfig& cfg, const std::string& algebra, const std::string& word) {
  check_series(cfg, cfg.n);
  IsoContext ctx(cfg.n);
  const Word w = parse_user_word(word, false);
  std::vector<Gen> allowed = algebra == "plane" ? ctx.x_alphabet() : ctx.alphabet();
  for (Gen g : w)
    if (std::find(allowed.begin(), allowed.end(), g) == allowed.end())
      throw UsageError("generator " + gen_name(g) + " is not in the " + algebra + " alphabet for N=" +
                       std::to_string(cfg.n));
  AlgebraElement e = AlgebraElement::word(w);
  AlgebraElement red = algebra == "plane" ? ctx.plane_rules().reduce(e) : ctx.reduce(e);
  Printer pr(cfg, ctx.big()->params());
  Output out(cfg);
  if (out.json_mode())
    out.set_json(element_json(pr.apply(red), ElementKind::Iso, ctx.big()->params()));
  else
    out.text() << element_text(red, pr, false);
  out.flush();
  return kExitPass;
}

inline int cmd_pair(const RunConfig& cfg, const std::string& functional, const std::string& word, bool check) {
  check_series(cfg, cfg.n);
  IsoContext ctx(cfg.n);
  Evaluator ev(ctx.big());
  const Word fw = parse_user_word(functional, true);
  for (Gen g : fw)
    if (!is_functional_gen(g) || gen_i(g) >= ev.dim() || gen_j(g) >= ev.dim())
      throw UsageError("not a functional generator for SO(" + std::to_string(ev.dim()) + "): " + gen_name(g));
  const Word aw = parse_user_word(word, false);
  for (Gen g : aw) {
    const auto al = ctx.alphabet();
    if (std::find(al.begin(), al.end(), g) == al.end())
      throw UsageError("generator " + gen_name(g) + " is not in the iso alphabet");
  }
  Printer pr(cfg, ctx.big()->params());
  Output out(cfg);
  try {
    Scalar v = pairing(ev, ctx, AlgebraElement::word(fw), AlgebraElement::word(aw), check);
    if (out.json_mode())
      out.set_json({{"header", header_json(ctx.big()->params())},
                    {"functional", functional_word_string(fw)},
                    {"word", word_string(aw)},
                    {"value", pr.scalar(v)}});
    else
      out.text() << pr.str(v) << "\n";
    out.flush();
    return kExitPass;
  } catch (const NotInIU& e) {
    if (out.json_mode())
      out.set_json({{"functional", functional_word_string(fw)}, {"error", e.what()}});
    else
      out.text() << "FAIL  " << e.what() << "\n";
    out.flush();
    return kExitFail;
  }
}

inline int cmd_det(const RunConfig& cfg) {
  check_series(cfg, cfg.n);
  auto g = make_geometry(cfg.n);
  AlgebraElement det = quantum_determinant(g);
  Printer pr(cfg, g->params());
  Output out(cfg);
  if (out.json_mode())
    out.set_json(element_json(pr.apply(det), ElementKind::Iso, g->params()));
  else
    out.text() << element_text(det, pr, false);
  out.flush();
  return kExitPass;
}

inline int cmd_lie(const RunConfig& cfg, const std::string& kind) {
  check_series(cfg, cfg.n);
  const bool r1 = kind == "r1";
  const int degree = cfg.degree > 0 ? cfg.degree : 2;
  Evaluator ev(make_geometry(cfg.n + 2));
  ev.warm(degree);
  TangentBasis tb = tangent_basis(ev, r1 ? CalculusKind::R1 : CalculusKind::Projected);
  std::vector<FunctionalRelation> rels = r1 ? r1_relations(ev) : projected_relations(ev, tb);
  std::vector<FunctionalDiff> diffs(rels.size());
  parallel_for(rels.size(), cfg.jobs, [&](std::size_t i) {
    diffs[i] = r1 ? functional_equal_at_r1(ev, rels[i].lhs, rels[i].rhs, degree)
                  : functional_equal(ev, rels[i].lhs, rels[i].rhs, degree);
  });
  const auto& names = ev.names();
  Printer pr(cfg, ev.geometry().params());
  std::vector<StructureConstant> sc;
  if (!r1) sc = projected_structure_constants(ev, tb);

  bool ok = true;
  for (const auto& d : diffs) ok = ok && d.equal;
  Output out(cfg);
  if (out.json_mode()) {
    json table = json::array();
    for (std::size_t i = 0; i < rels.size(); ++i) {
      json row{{"relation", rels[i].family}, {"ref", rels[i].ref}, {"indices", rels[i].instance},
               {"status", diffs[i].equal ? "pass" : "fail"}};
      if (!diffs[i].equal) row["witness"] = diffs[i].witness(names);
      table.push_back(std::move(row));
    }
    json basis = json::array();
    for (const auto& v : tb.vectors) basis.push_back(v.label);
    json consts = json::array();
    for (const auto& c : sc) consts.push_back({{"i", c.i}, {"j", c.j}, {"k", c.k}, {"C_ij^k", pr.scalar(c.value)}});
    out.set_json({{"header", header_json(ev.geometry().params())},
                  {"calculus", calculus_name(tb.kind)},
                  {"degree", degree},
                  {"ok", ok},
                  {"basis", std::move(basis)},
                  {"relations", std::move(table)},
                  {"structure_constants", std::move(consts)}});
  } else {
    out.text() << "basis:";
    for (const auto& v : tb.vectors) out.text() << " " << v.label;
    out.text() << "\n";
    for (std::size_t i = 0; i < rels.size(); ++i) {
      out.text() << (diffs[i].equal ? "PASS" : "FAIL") << "  " << rels[i].family << "  (" << rels[i].instance << ")  ["
                 << rels[i].ref << "]";
      if (!diffs[i].equal) out.text() << "  witness=" << diffs[i].witness(names).dump();
      out.text() << "\n";
    }
    for (const auto& c : sc)
      out.text() << "[" << tb.vectors[c.i].label << ", " << tb.vectors[c.j].label << "] -> " << tb.vectors[c.k].label
                 << " : " << pr.str(c.value) << "\n";
  }
  out.flush();
  return ok ? kExitPass : kExitFail;
}

inline int cmd_load(const RunConfig& cfg, const std::string& path) {
  json doc = load_json(path);
  json canon;
  bool flagged = false;
  std::string kind = doc.is_object() && doc.contains("kind") && doc["kind"].is_string() ? doc["kind"].get<std::string>() : "";
  if (kind == "tensor") {
    auto t = tensor_from_json(doc);
    canon = tensor_json(t.value);
    flagged = t.recanonicalized;
  } else {
    auto e = element_from_json(doc);
    canon = element_json(e.value, kind == "so" ? ElementKind::So : kind == "functional" ? ElementKind::Functional
                                                                                      : ElementKind::Iso,
                         parse_header(doc));
    flagged = e.recanonicalized;
  }
  if (!cfg.dump.empty()) save_json(cfg.dump, canon);
  Output out(cfg);
  if (out.json_mode())
    out.set_json({{"kind", kind}, {"recanonicalized", flagged}, {"canonical", canon}});
  else
    out.text() << "valid " << kind << " document" << (flagged ? " (re-canonicalized)" : " (canonical)") << "\n";
  out.flush();
  return kExitPass;
}

/// Maps an exception escaping a subcommand to the documented exit code.
inline int exit_code_for(std::exception_ptr ep, std::ostream& err) {
  try {
    std::rethrow_exception(ep);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (...) {
    err << "internal error\n";
    return kExitInternal;
  }
}

inline int run(int argc, const char* const* argv) {
  CLI::App app{"Multiparametric orthogonal quantum groups: R-matrices, presentations, envelopes, calculi"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub, bool with_degree, int max_n = 9) {
    sub->add_option("--n", cfg.n, max_n == 11 ? "matrix size M" : "N, the ISO(N) rank")->check(CLI::Range(3, max_n));
    sub->add_option("--series", cfg.series, "auto, B or D")->check(CLI::IsMember({"auto", "B", "D"}));
    sub->add_option("--spec", cfg.spec, "print with parameters specialized, e.g. s=2,g12=3");
    if (with_degree)
      sub->add_option("--degree", cfg.degree, "word-length bound (default per suite)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "seed for random test elements")->capture_default_str();
    sub->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::Range(1, 256));
    sub->add_option("--format", cfg.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--out", cfg.out, "write the report to a file");
  };

  auto* build = app.add_subcommand("build-r", "build the R-matrix of SO(n)");
  common(build, false, 11);
  build->add_option("--dump", cfg.dump, "write the tensor JSON to a file");

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "run verification suites");
  common(verify, true);
  verify->add_option("--suite", suite)->check(CLI::IsMember(
      {"rmatrix", "embedding", "presentation", "envelope", "calculus-projected", "calculus-r1", "all"}));

  std::string algebra = "iso", word;
  auto* reduce = app.add_subcommand("reduce", "normal form of a word in ISO(N) or the quantum plane");
  common(reduce, false);
  reduce->add_option("--algebra", algebra)->check(CLI::IsMember({"iso", "plane"}));
  reduce->add_option("--word", word, "space separated generators, e.g. \"x2 x1\"")->required();

  std::string functional;
  bool check_iu = false;
  auto* pair = app.add_subcommand("pair", "pair a functional word with an ISO(N) word");
  common(pair, false);
  pair->add_option("--functional", functional, "e.g. \"L+[0,0] L-[2,1]\"")->required();
  pair->add_option("--word", word, "ISO(N) word, e.g. \"x1 u\"")->required();
  pair->add_flag("--check", check_iu, "require the functional to annihilate H");

  auto* det = app.add_subcommand("det", "quantum determinant of SO(n)");
  common(det, false, 11);

  std::string kind = "projected";
  auto* lie = app.add_subcommand("lie", "tangent-vector relations and structure constants");
  common(lie, true);
  lie->add_option("--kind", kind)->check(CLI::IsMember({"projected", "r1"}));

  std::string path;
  auto* load = app.add_subcommand("load", "validate and canonicalize a JSON document");
  common(load, false);
  load->add_option("--file", path)->required()->check(CLI::ExistingFile);
  load->add_option("--dump", cfg.dump, "write the canonical document to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*build) return cmd_build_r(cfg);
    if (*verify) return cmd_verify(cfg, suite);
    if (*reduce) return cmd_reduce(cfg, algebra, word);
    if (*pair) return cmd_pair(cfg, functional, word, check_iu);
    if (*det) return cmd_det(cfg);
    if (*lie) return cmd_lie(cfg, kind);
    if (*load) return cmd_load(cfg, path);
  } catch (...) {
    return exit_code_for(std::current_exception(), std::cerr);
  }
  return kExitUsage;
}

}  // namespace orthoq::cli
