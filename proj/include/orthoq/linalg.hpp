#pragma once

// Exact sparse row reduction over a field (Rational or Scalar).

#include <map>
#include <optional>
#include <vector>

#include "orthoq/scalar.hpp"

namespace orthoq {

template <class F>
bool field_is_zero(const F& x) {
  if constexpr (std::is_same_v<F, Rational>)
    return x == 0;
  else
    return x.is_zero();
}

template <class F>
F field_inverse(const F& x) {
  if constexpr (std::is_same_v<F, Rational>)
    return F(1) / x;
  else
    return x.inverse();
}

/// Incremental echelon basis of sparse vectors keyed by int columns.
/// Each stored row is normalized to pivot coefficient 1 at its smallest
/// column.  Optionally tracks how every row is combined from the inputs.
template <class F>
class Echelon {
 public:
  using Vec = std::map<int, F>;

  explicit Echelon(bool track = false) : track_(track) {}

  std::size_t rank() const { return rows_.size(); }

  /// Reduce v against the basis; when tracking, `combo` receives the input
  /// combination subtracted from v.
  Vec reduce(Vec v, std::map<int, F>* combo = nullptr) const {
    auto it = v.begin();
    while (it != v.end()) {
      auto p = rows_.find(it->first);
      if (p == rows_.end()) {
        ++it;
        continue;
      }
      F c = it->second;
      const int col = it->first;
      for (const auto& [k, x] : p->second.vec) {
        F t = c * x;
        auto [jt, ins] = v.try_emplace(k, F(0));
        jt->second -= t;
        if (field_is_zero(jt->second)) v.erase(jt);
      }
      if (combo)
        for (const auto& [k, x] : p->second.combo) {
          auto [jt, ins] = combo->try_emplace(k, F(0));
          jt->second += c * x;
          if (field_is_zero(jt->second)) combo->erase(jt);
        }
      it = v.upper_bound(col);
    }
    return v;
  }

  /// Insert; returns true if v was independent of the current basis.
  bool insert(const Vec& v) {
    std::map<int, F> combo;
    if (track_) combo[inputs_] = F(1);
    ++inputs_;
    std::map<int, F> sub;
    Vec w = reduce(v, track_ ? &sub : nullptr);
    if (w.empty()) return false;
    if (track_)
      for (const auto& [k, x] : sub) {
        auto [jt, ins] = combo.try_emplace(k, F(0));
        jt->second -= x;
        if (field_is_zero(jt->second)) combo.erase(jt);
      }
    F inv = field_inverse(w.begin()->second);
    for (auto& [k, x] : w) x = x * inv;
    if (track_)
      for (auto& [k, x] : combo) x = x * inv;
    // keep rows fully reduced against the new pivot
    const int pc = w.begin()->first;
    for (auto& [col, row] : rows_) {
      auto f = row.vec.find(pc);
      if (f == row.vec.end()) continue;
      F c = f->second;
      for (const auto& [k, x] : w) {
        auto [jt, ins] = row.vec.try_emplace(k, F(0));
        jt->second -= c * x;
        if (field_is_zero(jt->second)) row.vec.erase(jt);
      }
      if (track_)
        for (const auto& [k, x] : combo) {
          auto [jt, ins] = row.combo.try_emplace(k, F(0));
          jt->second -= c * x;
          if (field_is_zero(jt->second)) row.combo.erase(jt);
        }
    }
    rows_.emplace(pc, Row{std::move(w), std::move(combo)});
    return true;
  }

  /// Membership with certificate: coefficients of input rows summing to v.
  std::optional<std::map<int, F>> express(const Vec& v) const {
    std::map<int, F> combo;
    Vec w = reduce(v, &combo);
    if (!w.empty()) return std::nullopt;
    return combo;
  }

  const std::map<int, Vec> pivots() const {
    std::map<int, Vec> out;
    for (const auto& [c, r] : rows_) out.emplace(c, r.vec);
    return out;
  }

 private:
  struct Row {
    Vec vec;
    std::map<int, F> combo;
  };
  bool track_;
  int inputs_ = 0;
  std::map<int, Row> rows_;
};

/// Rank of a dense matrix of rationals.
inline std::size_t rational_rank(const std::vector<std::vector<Rational>>& m) {
  Echelon<Rational> e;
  for (const auto& row : m) {
    std::map<int, Rational> v;
    for (std::size_t j = 0; j < row.size(); ++j)
      if (row[j] != 0) v.emplace(static_cast<int>(j), row[j]);
    e.insert(v);
  }
  return e.rank();
}

}  // namespace orthoq
