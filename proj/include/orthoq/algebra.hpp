#pragma once

// Words in a generator alphabet and finite linear combinations of them.

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "orthoq/scalar.hpp"

namespace orthoq {

enum class GenKind : std::uint8_t { U = 0, V = 1, X = 2, T = 3, DX = 4, BigT = 5, LPlus = 6, LMinus = 7 };

/// Generator code: kind in the high byte, two 4-bit indices below.  The
/// numeric order of codes is the generator order u < v < x < T < dx.
using Gen = std::uint16_t;

constexpr Gen make_gen(GenKind k, int i = 0, int j = 0) {
  return static_cast<Gen>((static_cast<int>(k) << 8) | (i << 4) | j);
}
constexpr GenKind gen_kind(Gen g) { return static_cast<GenKind>(g >> 8); }
constexpr int gen_i(Gen g) { return (g >> 4) & 0xF; }
constexpr int gen_j(Gen g) { return g & 0xF; }

constexpr Gen gen_u() { return make_gen(GenKind::U); }
constexpr Gen gen_v() { return make_gen(GenKind::V); }
constexpr Gen gen_x(int a) { return make_gen(GenKind::X, a); }
constexpr Gen gen_t(int a, int b) { return make_gen(GenKind::T, a, b); }
constexpr Gen gen_dx(int a) { return make_gen(GenKind::DX, a); }
/// SO(M) matrix entry; indices 0..M-1 (circle = 0, bullet = M-1 when embedded).
constexpr Gen gen_big(int a, int b) { return make_gen(GenKind::BigT, a, b); }
/// Regular functionals L+^A_B and L-^A_B on SO(M), big indices.
constexpr Gen gen_lp(int a, int b) { return make_gen(GenKind::LPlus, a, b); }
constexpr Gen gen_lm(int a, int b) { return make_gen(GenKind::LMinus, a, b); }

/// Display name.  Inner indices print 1-based; big-matrix indices print
/// with the embedded labels 0..N+1.
inline std::string gen_name(Gen g) {
  switch (gen_kind(g)) {
    case GenKind::U: return "u";
    case GenKind::V: return "v";
    case GenKind::X: return "x" + std::to_string(gen_i(g) + 1);
    case GenKind::DX: return "dx" + std::to_string(gen_i(g) + 1);
    case GenKind::T: return "T[" + std::to_string(gen_i(g) + 1) + "," + std::to_string(gen_j(g) + 1) + "]";
    case GenKind::BigT: return "T[" + std::to_string(gen_i(g)) + "," + std::to_string(gen_j(g)) + "]";
    case GenKind::LPlus: return "L+[" + std::to_string(gen_i(g)) + "," + std::to_string(gen_j(g)) + "]";
    case GenKind::LMinus: return "L-[" + std::to_string(gen_i(g)) + "," + std::to_string(gen_j(g)) + "]";
  }
  return "?";
}

struct ParseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Parse one generator name; `big` selects the SO(M) alphabet for T[A,B].
inline Gen parse_gen(const std::string& text, bool big = false) {
  auto num = [&](const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw ParseError("bad index in " + text);
    return std::stoi(s);
  };
  if (text == "u") return gen_u();
  if (text == "v") return gen_v();
  if (text.rfind("dx", 0) == 0) return gen_dx(num(text.substr(2)) - 1);
  if (text.rfind("x", 0) == 0) return gen_x(num(text.substr(1)) - 1);
  if ((text.rfind("L+[", 0) == 0 || text.rfind("L-[", 0) == 0) && text.back() == ']') {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw ParseError("bad generator " + text);
    int a = num(text.substr(3, comma - 3));
    int b = num(text.substr(comma + 1, text.size() - comma - 2));
    if (a > 15 || b > 15) throw ParseError("index too large in " + text);
    return text[1] == '+' ? gen_lp(a, b) : gen_lm(a, b);
  }
  if (text.rfind("T[", 0) == 0 && text.back() == ']') {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw ParseError("bad generator " + text);
    int a = num(text.substr(2, comma - 2));
    int b = num(text.substr(comma + 1, text.size() - comma - 2));
    if (big) return gen_big(a, b);
    if (a < 1 || b < 1) throw ParseError("inner indices are 1-based: " + text);
    return gen_t(a - 1, b - 1);
  }
  throw ParseError("unknown generator " + text);
}

using Word = std::vector<Gen>;

/// Degree-lexicographic order on words.
struct DegLex {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

inline std::string word_string(const Word& w) {
  if (w.empty()) return "I";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += " ";
    out += gen_name(w[i]);
  }
  return out;
}

inline Word parse_word(const std::string& text, bool big = false) {
  std::istringstream is(text);
  std::string tok;
  Word w;
  while (is >> tok)
    if (tok != "I" && tok != "eps") w.push_back(parse_gen(tok, big));
  return w;
}

inline Word concat(const Word& a, const Word& b) {
  Word w;
  w.reserve(a.size() + b.size());
  w.insert(w.end(), a.begin(), a.end());
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

class AlgebraElement {
 public:
  using Map = std::map<Word, Scalar, DegLex>;

  AlgebraElement() = default;
  static AlgebraElement word(Word w, const Scalar& c = Scalar(1)) {
    AlgebraElement e;
    e.add(w, c);
    return e;
  }
  static AlgebraElement gen(Gen g, const Scalar& c = Scalar(1)) { return word(Word{g}, c); }
  static AlgebraElement scalar(const Scalar& c) { return word(Word{}, c); }
  static AlgebraElement one() { return scalar(Scalar(1)); }

  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  std::size_t degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.size(); }
  const Word& leading_word() const { return terms_.rbegin()->first; }

  Scalar coeff(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Scalar() : it->second;
  }

  void add(const Word& w, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  void add(Word&& w, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(std::move(w), c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  AlgebraElement& operator+=(const AlgebraElement& o) {
    for (const auto& [w, c] : o.terms_) add(w, c);
    return *this;
  }
  AlgebraElement& operator-=(const AlgebraElement& o) {
    for (const auto& [w, c] : o.terms_) add(w, -c);
    return *this;
  }
  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }

  AlgebraElement scaled(const Scalar& c) const {
    AlgebraElement out;
    if (c.is_zero()) return out;
    for (const auto& [w, x] : terms_) out.terms_.emplace(w, x * c);
    return out;
  }
  friend AlgebraElement operator*(const Scalar& c, const AlgebraElement& a) { return a.scaled(c); }

  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    AlgebraElement out;
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) out.add(concat(wa, wb), ca * cb);
    return out;
  }

  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) { return a.terms_ == b.terms_; }

  template <class F>
  AlgebraElement map_coeffs(F&& f) const {
    AlgebraElement out;
    for (const auto& [w, c] : terms_) out.add(w, f(c));
    return out;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!first) out += " + ";
      first = false;
      out += "(" + it->second.to_string(names) + ")";
      if (!it->first.empty()) out += " " + word_string(it->first);
    }
    return out;
  }

 private:
  Map terms_;
};

/// Algebra homomorphism from the free algebra defined by generator images.
template <class F>
AlgebraElement substitute_generators(const AlgebraElement& e, F&& image) {
  AlgebraElement out;
  for (const auto& [w, c] : e.terms()) {
    AlgebraElement acc = AlgebraElement::scalar(c);
    for (Gen g : w) {
      acc = acc * image(g);
      if (acc.is_zero()) break;
    }
    out += acc;
  }
  return out;
}

/// Elements of A (x) A, keyed by pairs of words.
class TensorElement {
 public:
  using Key = std::pair<Word, Word>;
  struct Less {
    bool operator()(const Key& a, const Key& b) const {
      DegLex d;
      if (d(a.first, b.first)) return true;
      if (d(b.first, a.first)) return false;
      return d(a.second, b.second);
    }
  };
  using Map = std::map<Key, Scalar, Less>;

  static TensorElement pure(const Word& a, const Word& b, const Scalar& c = Scalar(1)) {
    TensorElement t;
    t.add({a, b}, c);
    return t;
  }
  static TensorElement one() { return pure({}, {}); }

  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const Key& k, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  TensorElement& operator+=(const TensorElement& o) {
    for (const auto& [k, c] : o.terms_) add(k, c);
    return *this;
  }
  friend TensorElement operator*(const TensorElement& a, const TensorElement& b) {
    TensorElement out;
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) out.add({concat(ka.first, kb.first), concat(ka.second, kb.second)}, ca * cb);
    return out;
  }
  friend bool operator==(const TensorElement& a, const TensorElement& b) { return a.terms_ == b.terms_; }

  /// Apply linear maps to each tensor factor.
  template <class F, class G>
  TensorElement map_factors(F&& left, G&& right) const {
    TensorElement out;
    for (const auto& [k, c] : terms_) {
      AlgebraElement l = left(k.first);
      if (l.is_zero()) continue;
      AlgebraElement r = right(k.second);
      for (const auto& [wl, cl] : l.terms())
        for (const auto& [wr, cr] : r.terms()) out.add({wl, wr}, c * cl * cr);
    }
    return out;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : terms_) {
      if (!first) out += " + ";
      first = false;
      out += "(" + c.to_string(names) + ") " + word_string(k.first) + " (x) " + word_string(k.second);
    }
    return out;
  }

 private:
  Map terms_;
};

}  // namespace orthoq
