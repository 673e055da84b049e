#pragma once

// Exact coefficient field: Laurent polynomials in s and the independent
// deformation parameters g_ab, with denominators restricted to univariate
// polynomials in s.  r = s^2 throughout.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace orthoq {

using Rational = mpq_class;

inline constexpr int kMaxVars = 12;

struct ZeroInverse : std::domain_error {
  ZeroInverse() : std::domain_error("inverse of zero scalar") {}
};
struct DenominatorClass : std::domain_error {
  explicit DenominatorClass(const std::string& what)
      : std::domain_error("denominator outside (g-monomial)x(s-polynomial) class: " + what) {}
};
struct PoleAtPoint : std::domain_error {
  PoleAtPoint() : std::domain_error("denominator vanishes at specialization point") {}
};
struct PoleAtOne : std::domain_error {
  PoleAtOne() : std::domain_error("genuine pole at s = 1") {}
};

inline Rational parse_rational(const std::string& text) {
  Rational q;
  if (q.set_str(text, 10) != 0) throw std::invalid_argument("bad rational: " + text);
  q.canonicalize();
  return q;
}

inline std::string rational_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Exponent vector over [s, g_1, ..., g_k].  Slot 0 is always s.
struct Monomial {
  std::array<std::int16_t, kMaxVars> e{};

  bool is_one() const {
    return std::all_of(e.begin(), e.end(), [](auto x) { return x == 0; });
  }
  bool s_only() const {
    return std::all_of(e.begin() + 1, e.end(), [](auto x) { return x == 0; });
  }
  Monomial g_part() const {
    Monomial m = *this;
    m.e[0] = 0;
    return m;
  }
  Monomial operator*(const Monomial& o) const {
    Monomial m;
    for (int i = 0; i < kMaxVars; ++i) m.e[i] = static_cast<std::int16_t>(e[i] + o.e[i]);
    return m;
  }
  Monomial inverse() const {
    Monomial m;
    for (int i = 0; i < kMaxVars; ++i) m.e[i] = static_cast<std::int16_t>(-e[i]);
    return m;
  }
  static Monomial var(int index, int power = 1) {
    Monomial m;
    m.e[index] = static_cast<std::int16_t>(power);
    return m;
  }
  auto operator<=>(const Monomial&) const = default;
};

/// Finite map Monomial -> Rational, kept sorted with no zero coefficients.
class Poly {
 public:
  using Term = std::pair<Monomial, Rational>;

  Poly() = default;
  Poly(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (c != 0) terms_.emplace_back(Monomial{}, c);
  }
  Poly(long c) : Poly(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  static Poly monomial(const Monomial& m, const Rational& c = 1) {
    Poly p;
    if (c != 0) p.terms_.emplace_back(m, c);
    return p;
  }
  static Poly from_terms(std::vector<Term> terms) {
    Poly p;
    p.terms_ = std::move(terms);
    p.normalize();
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one()); }
  bool is_one() const { return terms_.size() == 1 && terms_[0].first.is_one() && terms_[0].second == 1; }
  bool is_monomial() const { return terms_.size() == 1; }
  bool s_only() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.first.s_only(); });
  }
  Rational constant_value() const { return terms_.empty() ? Rational(0) : terms_[0].second; }

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

  Poly operator-() const {
    Poly p = *this;
    for (auto& t : p.terms_) t.second = -t.second;
    return p;
  }
  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly out;
    out.terms_.reserve(a.terms_.size() + b.terms_.size());
    auto i = a.terms_.begin();
    auto j = b.terms_.begin();
    while (i != a.terms_.end() && j != b.terms_.end()) {
      if (i->first < j->first) {
        out.terms_.push_back(*i++);
      } else if (j->first < i->first) {
        out.terms_.push_back(*j++);
      } else {
        Rational c = i->second + j->second;
        if (c != 0) out.terms_.emplace_back(i->first, std::move(c));
        ++i;
        ++j;
      }
    }
    out.terms_.insert(out.terms_.end(), i, a.terms_.end());
    out.terms_.insert(out.terms_.end(), j, b.terms_.end());
    return out;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (b.terms_.size() == 1) return a.times_term(b.terms_[0].first, b.terms_[0].second);
    if (a.terms_.size() == 1) return b.times_term(a.terms_[0].first, a.terms_[0].second);
    std::vector<Term> acc;
    acc.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) acc.emplace_back(ma * mb, ca * cb);
    return from_terms(std::move(acc));
  }
  Poly times_term(const Monomial& m, const Rational& c) const {
    Poly out;
    if (c == 0) return out;
    out.terms_.reserve(terms_.size());
    // multiplication by a monomial preserves the term order
    for (const auto& [mt, ct] : terms_) out.terms_.emplace_back(mt * m, ct * c);
    return out;
  }

  /// Replace each variable by a Laurent monomial image.
  Poly substitute(const std::array<Monomial, kMaxVars>& image) const {
    std::vector<Term> acc;
    acc.reserve(terms_.size());
    for (const auto& [m, c] : terms_) {
      Monomial out;
      for (int v = 0; v < kMaxVars; ++v)
        if (m.e[v] != 0)
          for (int w = 0; w < kMaxVars; ++w) out.e[w] = static_cast<std::int16_t>(out.e[w] + m.e[v] * image[v].e[w]);
      acc.emplace_back(out, c);
    }
    return from_terms(std::move(acc));
  }

  Rational evaluate(const std::array<std::optional<Rational>, kMaxVars>& point) const;

  std::string to_string(const std::vector<std::string>& names) const;

 private:
  void normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!out.empty() && out.back().first == t.first) {
        out.back().second += t.second;
      } else {
        if (!out.empty() && out.back().second == 0) out.pop_back();
        out.push_back(std::move(t));
      }
    }
    if (!out.empty() && out.back().second == 0) out.pop_back();
    terms_ = std::move(out);
  }

  std::vector<Term> terms_;
};

namespace detail {

inline Rational rational_pow(const Rational& base, int exponent) {
  if (exponent == 0) return 1;
  Rational b = exponent < 0 ? Rational(1) / base : base;
  int n = exponent < 0 ? -exponent : exponent;
  Rational out = 1;
  while (n > 0) {
    if (n & 1) out *= b;
    b *= b;
    n >>= 1;
  }
  return out;
}

/// Dense univariate polynomial over Q, coefficient i multiplies s^i.
struct UPoly {
  std::vector<Rational> c;

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }
  const Rational& lead() const { return c.back(); }
};

inline UPoly upoly_mod(UPoly a, const UPoly& b) {
  while (!a.is_zero() && a.degree() >= b.degree()) {
    Rational f = a.lead() / b.lead();
    int shift = a.degree() - b.degree();
    for (int i = 0; i <= b.degree(); ++i) a.c[i + shift] -= f * b.c[i];
    a.trim();
  }
  return a;
}

inline UPoly upoly_div_exact(UPoly a, const UPoly& b) {
  UPoly q;
  if (a.degree() < b.degree()) return q;
  q.c.assign(a.degree() - b.degree() + 1, Rational(0));
  while (!a.is_zero() && a.degree() >= b.degree()) {
    Rational f = a.lead() / b.lead();
    int shift = a.degree() - b.degree();
    q.c[shift] = f;
    for (int i = 0; i <= b.degree(); ++i) a.c[i + shift] -= f * b.c[i];
    a.trim();
  }
  if (!a.is_zero()) throw std::logic_error("inexact univariate division");
  q.trim();
  return q;
}

inline UPoly upoly_gcd(UPoly a, UPoly b) {
  a.trim();
  b.trim();
  while (!b.is_zero()) {
    UPoly r = upoly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.is_zero()) {
    Rational l = a.lead();
    for (auto& x : a.c) x /= l;
  }
  return a;
}

/// Poly in s only -> UPoly after multiplying by s^{-min exponent}; returns shift.
inline std::pair<UPoly, int> to_upoly(const Poly& p) {
  UPoly u;
  if (p.is_zero()) return {u, 0};
  int lo = p.terms().front().first.e[0];
  int hi = lo;
  for (const auto& t : p.terms()) {
    lo = std::min<int>(lo, t.first.e[0]);
    hi = std::max<int>(hi, t.first.e[0]);
  }
  u.c.assign(hi - lo + 1, Rational(0));
  for (const auto& t : p.terms()) u.c[t.first.e[0] - lo] += t.second;
  u.trim();
  return {u, lo};
}

inline Poly from_upoly(const UPoly& u, int shift = 0, const Monomial& gpart = {}) {
  std::vector<Poly::Term> terms;
  for (int i = 0; i <= u.degree(); ++i)
    if (u.c[i] != 0) {
      Monomial m = gpart;
      m.e[0] = static_cast<std::int16_t>(i + shift);
      terms.emplace_back(m, u.c[i]);
    }
  return Poly::from_terms(std::move(terms));
}

/// Split a Laurent poly by g-part into univariate Laurent pieces in s.
inline std::map<Monomial, Poly> split_by_g(const Poly& p) {
  std::map<Monomial, std::vector<Poly::Term>> groups;
  for (const auto& [m, c] : p.terms()) {
    Monomial sm;
    sm.e[0] = m.e[0];
    groups[m.g_part()].emplace_back(sm, c);
  }
  std::map<Monomial, Poly> out;
  for (auto& [g, ts] : groups) out.emplace(g, Poly::from_terms(std::move(ts)));
  return out;
}

}  // namespace detail

inline Rational Poly::evaluate(const std::array<std::optional<Rational>, kMaxVars>& point) const {
  Rational total = 0;
  for (const auto& [m, c] : terms_) {
    Rational v = c;
    for (int i = 0; i < kMaxVars; ++i) {
      if (m.e[i] == 0) continue;
      if (!point[i]) throw std::invalid_argument("specialization does not cover variable " + std::to_string(i));
      v *= detail::rational_pow(*point[i], m.e[i]);
    }
    total += v;
  }
  return total;
}

inline std::string Poly::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // highest monomial first reads more naturally
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool unit = m.is_one();
    if (mag != 1 || unit) {
      os << rational_string(mag);
      if (!unit) os << "*";
    }
    bool first_var = true;
    for (int v = 0; v < kMaxVars; ++v) {
      if (m.e[v] == 0) continue;
      if (!first_var) os << "*";
      first_var = false;
      os << (v < static_cast<int>(names.size()) ? names[v] : "v" + std::to_string(v));
      if (m.e[v] != 1) os << "^" << m.e[v];
    }
  }
  return os.str();
}

/// Exact rational function num/den in canonical form: den is a monic
/// polynomial in s with nonzero constant term, coprime to num over Q(g)[s].
class Scalar {
 public:
  Scalar() = default;
  Scalar(const Rational& c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
  Scalar(long c) : Scalar(Rational(c)) {}          // NOLINT(google-explicit-constructor)
  Scalar(int c) : Scalar(Rational(c)) {}           // NOLINT(google-explicit-constructor)
  explicit Scalar(Poly p) : num_(std::move(p)), den_(1) {}

  static Scalar monomial(const Monomial& m, const Rational& c = 1) { return Scalar(Poly::monomial(m, c)); }
  static Scalar s_pow(int k) { return monomial(Monomial::var(0, k)); }
  /// r^{k/2} = s^k.
  static Scalar r_half_pow(int k) { return s_pow(k); }

  /// Build from an arbitrary fraction; throws DenominatorClass when the
  /// denominator is not (g-monomial) x (Laurent polynomial in s).
  static Scalar fraction(const Poly& num, const Poly& den) {
    Scalar out;
    out.set_fraction(num, den);
    return out;
  }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_one(); }
  bool is_one() const { return den_.is_one() && num_.is_one(); }
  bool s_only() const { return num_.s_only(); }

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  Scalar operator-() const {
    Scalar out = *this;
    out.num_ = -out.num_;
    return out;
  }
  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_.is_one() && b.den_.is_one()) return Scalar(a.num_ + b.num_);
    if (a.den_ == b.den_) {
      Scalar out;
      out.num_ = a.num_ + b.num_;
      out.den_ = a.den_;
      out.reduce_common();
      return out;
    }
    auto [da, sa] = detail::to_upoly(a.den_);
    auto [db, sb] = detail::to_upoly(b.den_);
    detail::UPoly g = detail::upoly_gcd(da, db);
    detail::UPoly fa = detail::upoly_div_exact(db, g);  // multiplies a
    detail::UPoly fb = detail::upoly_div_exact(da, g);  // multiplies b
    Scalar out;
    out.num_ = a.num_ * detail::from_upoly(fa) + b.num_ * detail::from_upoly(fb);
    out.den_ = a.den_ * detail::from_upoly(fa);
    out.reduce_common();
    return out;
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.den_.is_one() && b.den_.is_one()) return Scalar(a.num_ * b.num_);
    Scalar out;
    out.num_ = a.num_ * b.num_;
    out.den_ = a.den_ * b.den_;
    out.reduce_common();
    return out;
  }
  friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

  Scalar inverse() const {
    if (is_zero()) throw ZeroInverse();
    return fraction(den_, num_);
  }

  /// Monomial substitution v -> image[v], extended to fractions.
  Scalar substitute(const std::array<Monomial, kMaxVars>& image) const {
    if (den_.is_one()) return Scalar(num_.substitute(image));
    return fraction(num_.substitute(image), den_.substitute(image));
  }

  Rational specialize(const std::array<std::optional<Rational>, kMaxVars>& point) const {
    Rational d = den_.evaluate(point);
    if (d == 0) throw PoleAtPoint();
    return num_.evaluate(point) / d;
  }

  /// Value at s = 1 as a Scalar in the g-variables.
  Scalar limit_s_to_1() const {
    Monomial s1;
    std::array<Monomial, kMaxVars> image{};
    for (int v = 1; v < kMaxVars; ++v) image[v] = Monomial::var(v);
    image[0] = s1;  // s -> 1
    Rational d = 0;
    for (const auto& t : den_.terms()) d += t.second;
    if (d == 0) throw PoleAtOne();
    Scalar out(num_.substitute(image));
    return out * Scalar(Rational(1) / d);
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (den_.is_one()) return num_.to_string(names);
    return "(" + num_.to_string(names) + ")/(" + den_.to_string(names) + ")";
  }

 private:
  void set_fraction(const Poly& num, const Poly& den) {
    if (den.is_zero()) throw ZeroInverse();
    if (num.is_zero()) {
      num_ = Poly();
      den_ = Poly(1);
      return;
    }
    const Monomial gpart = den.terms().front().first.g_part();
    for (const auto& t : den.terms())
      if (t.first.g_part() != gpart) throw DenominatorClass("mixed g-structure in denominator");
    auto [du, shift] = detail::to_upoly(den);
    // den = g^gpart * s^shift * du(s), du(0) != 0
    Monomial strip = gpart;
    strip.e[0] = static_cast<std::int16_t>(shift);
    num_ = num.times_term(strip.inverse(), 1);
    den_ = detail::from_upoly(du);
    reduce_common();
  }

  /// Cancel gcd(num, den) over Q[s] and normalize den to monic.
  void reduce_common() {
    if (num_.is_zero()) {
      den_ = Poly(1);
      return;
    }
    auto [du, dshift] = detail::to_upoly(den_);
    if (dshift != 0) throw std::logic_error("denominator not normalized");
    if (du.degree() > 0) {
      detail::UPoly g = du;
      for (const auto& [gm, piece] : detail::split_by_g(num_)) {
        auto [pu, pshift] = detail::to_upoly(piece);
        g = detail::upoly_gcd(g, pu);
        if (g.degree() == 0) break;
      }
      if (g.degree() > 0) {
        std::vector<Poly::Term> acc;
        for (const auto& [gm, piece] : detail::split_by_g(num_)) {
          auto [pu, pshift] = detail::to_upoly(piece);
          Poly q = detail::from_upoly(detail::upoly_div_exact(pu, g), pshift, gm);
          acc.insert(acc.end(), q.terms().begin(), q.terms().end());
        }
        num_ = Poly::from_terms(std::move(acc));
        du = detail::upoly_div_exact(du, g);
      }
    }
    Rational lead = du.lead();
    if (lead != 1) {
      num_ = num_.times_term(Monomial{}, Rational(1) / lead);
      for (auto& c : du.c) c /= lead;
    }
    den_ = detail::from_upoly(du);
  }

  Poly num_;
  Poly den_{1};
};

// ---------------------------------------------------------------------------
// Parameter space: which q_{AB} are independent and how the rest resolve.

enum class Series { B, D };

inline Series series_of(int dim) { return dim % 2 == 1 ? Series::B : Series::D; }
inline char series_char(Series s) { return s == Series::B ? 'B' : 'D'; }

/// Symbols of SO_{q,r}(qdim): s plus g_ab for 1 <= a < b <= floor(qdim/2).
/// A ParamSpace may describe a block of a bigger group: indices i of this
/// space sit at i + shift in the qdim-dimensional index set.
class ParamSpace {
 public:
  explicit ParamSpace(int dim, int shift = 0, int qdim = -1)
      : dim_(dim), shift_(shift), qdim_(qdim < 0 ? dim : qdim) {
    if (dim_ < 1 || qdim_ < 3) throw std::invalid_argument("dimension must be >= 3");
    if (shift_ < 0 || shift_ + dim_ > qdim_) throw std::invalid_argument("block outside parent index set");
    const int half = qdim_ / 2;
    names_.push_back("s");
    for (int a = 0; a < half; ++a)
      for (int b = a + 1; b < half; ++b) {
        pair_index_[{a, b}] = static_cast<int>(names_.size());
        names_.push_back("g" + std::to_string(a + 1) + std::to_string(b + 1));
      }
    if (static_cast<int>(names_.size()) > kMaxVars) throw std::invalid_argument("too many parameters for kMaxVars");
  }

  int dim() const { return dim_; }
  int qdim() const { return qdim_; }
  int shift() const { return shift_; }
  Series series() const { return series_of(dim_); }
  int num_vars() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& var_names() const { return names_; }

  /// 0-based variable slot of g_{ab} (1-based a < b <= qdim/2), or -1.
  int g_slot(int a1, int b1) const {
    auto it = pair_index_.find({a1 - 1, b1 - 1});
    return it == pair_index_.end() ? -1 : it->second;
  }

  Scalar s() const { return Scalar::s_pow(1); }
  Scalar r() const { return Scalar::s_pow(2); }
  Scalar r_pow(int k) const { return Scalar::s_pow(2 * k); }
  Scalar lambda() const { return Scalar::s_pow(2) - Scalar::s_pow(-2); }

  /// q_{AB} as a Laurent monomial; A, B are 0-based indices of this space.
  Scalar q(int a, int b) const { return Scalar::monomial(q_monomial(a + shift_, b + shift_)); }

 private:
  Monomial q_monomial(int a, int b) const {
    const int half = qdim_ / 2;
    const int n2 = qdim_ % 2 == 1 ? (qdim_ - 1) / 2 : -1;
    auto prime = [&](int i) { return qdim_ - 1 - i; };
    const Monomial r = Monomial::var(0, 2);
    const Monomial r2 = Monomial::var(0, 4);
    if (a == b || b == prime(a) || a == n2 || b == n2) return r;
    if (a >= half) return r2 * q_monomial(prime(a), b).inverse();
    if (b >= half) return r2 * q_monomial(a, prime(b)).inverse();
    if (a < b) return Monomial::var(pair_index_.at({a, b}));
    return r2 * Monomial::var(pair_index_.at({b, a})).inverse();
  }

  int dim_;
  int shift_;
  int qdim_;
  std::vector<std::string> names_;
  std::map<std::pair<int, int>, int> pair_index_;
};

/// Images for the parameter inversion q -> q^{-1}, r -> r^{-1}.
inline std::array<Monomial, kMaxVars> inversion_map() {
  std::array<Monomial, kMaxVars> image{};
  for (int v = 0; v < kMaxVars; ++v) image[v] = Monomial::var(v, -1);
  return image;
}

/// Images for q_ab -> p_ab = q_ba = r^2/q_ab (r fixed).
inline std::array<Monomial, kMaxVars> transpose_map() {
  std::array<Monomial, kMaxVars> image{};
  image[0] = Monomial::var(0);
  for (int v = 1; v < kMaxVars; ++v) image[v] = Monomial::var(0, 4) * Monomial::var(v, -1);
  return image;
}

/// Uniparametric point g_ab = r.
inline std::array<Monomial, kMaxVars> uniparametric_map() {
  std::array<Monomial, kMaxVars> image{};
  image[0] = Monomial::var(0);
  for (int v = 1; v < kMaxVars; ++v) image[v] = Monomial::var(0, 2);
  return image;
}

using Point = std::array<std::optional<Rational>, kMaxVars>;

/// Parse assignments like {"s":"2","g12":"3"} against a ParamSpace.
inline Point make_point(const ParamSpace& ps, const std::map<std::string, Rational>& values) {
  Point p;
  for (const auto& [name, value] : values) {
    if (value == 0) throw std::invalid_argument("specialization values must be nonzero: " + name);
    const auto& names = ps.var_names();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      if (name == "r") throw std::invalid_argument("specialize r through s (r = s^2)");
      throw std::invalid_argument("unknown symbol: " + name);
    }
    p[it - names.begin()] = value;
  }
  return p;
}

/// Substitutes the assigned coordinates of `p` and keeps the others symbolic.
inline Scalar specialize_partial(const Scalar& x, const Point& p) {
  auto sub = [&](const Poly& q) {
    std::vector<Poly::Term> terms;
    for (auto [m, c] : q.terms()) {
      for (int i = 0; i < kMaxVars; ++i)
        if (p[i] && m.e[i] != 0) {
          c *= detail::rational_pow(*p[i], m.e[i]);
          m.e[i] = 0;
        }
      terms.emplace_back(m, c);
    }
    return Poly::from_terms(std::move(terms));
  };
  Poly den = sub(x.den());
  if (den.is_zero()) throw PoleAtPoint();
  return Scalar::fraction(sub(x.num()), den);
}

/// Generic point s = 2, g = 3, 5, 7, ... (shifted by `offset` primes).
inline Point generic_point(const ParamSpace& ps, int offset = 0) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  Point p;
  for (int v = 0; v < ps.num_vars(); ++v) p[v] = Rational(primes[v + offset]);
  if (offset > 0) p[0] = Rational(primes[offset], 3);
  return p;
}

}  // namespace orthoq
