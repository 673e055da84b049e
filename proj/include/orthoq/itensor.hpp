#pragma once

// Index geometry of SO_{q,r}(M) and sparse tensors over Scalar.
// Indices are 0-based internally; text output is 1-based.

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orthoq/scalar.hpp"

namespace orthoq {

struct GeometryMismatch : std::invalid_argument {
  GeometryMismatch() : std::invalid_argument("tensor geometries differ") {}
};

class IndexGeometry {
 public:
  explicit IndexGeometry(int dim) : IndexGeometry(ParamSpace(dim)) {}
  explicit IndexGeometry(ParamSpace params) : params_(std::move(params)) {
    const int m = params_.dim();
    if (m < 3) throw std::invalid_argument("dimension must be >= 3");
    rho2_.resize(m);
    for (int a = 0; a < m; ++a) {
      const int a1 = a + 1;
      if (2 * a1 <= m) {
        rho2_[a] = m - 2 * a1;  // 2*(M/2 - a)
      } else if (m % 2 == 1 && 2 * a1 == m + 1) {
        rho2_[a] = 0;
      } else {
        rho2_[a] = -(m - 2 * (m - a));  // -rho of the primed index
      }
    }
  }

  /// Block [shift, shift+dim) of a bigger group, with its parameters.
  static std::shared_ptr<const IndexGeometry> block(int dim, int shift, int parent_dim) {
    return std::make_shared<const IndexGeometry>(ParamSpace(dim, shift, parent_dim));
  }

  int dim() const { return params_.dim(); }
  Series series() const { return params_.series(); }
  const ParamSpace& params() const { return params_; }
  int prime(int a) const { return dim() - 1 - a; }
  /// Middle index for series B, -1 for series D.
  int n2() const { return dim() % 2 == 1 ? (dim() - 1) / 2 : -1; }
  /// 2*rho_a (integer).
  int rho2(int a) const { return rho2_[a]; }
  const std::vector<int>& rho2_vector() const { return rho2_; }

  Scalar q(int a, int b) const { return params_.q(a, b); }
  Scalar r() const { return params_.r(); }
  Scalar lambda() const { return params_.lambda(); }
  /// r^{k/2}
  Scalar r_half(int k) const { return Scalar::s_pow(k); }

 private:
  ParamSpace params_;
  std::vector<int> rho2_;
};

using GeometryPtr = std::shared_ptr<const IndexGeometry>;

inline GeometryPtr make_geometry(int dim) { return std::make_shared<const IndexGeometry>(dim); }

/// Antidiagonal metric C_ab = r^{-rho_a} delta_{a b'}; equal to its inverse entrywise.
class MetricVec {
 public:
  explicit MetricVec(GeometryPtr g) : geom_(std::move(g)) {
    for (int a = 0; a < geom_->dim(); ++a) values_.push_back(Scalar::s_pow(-geom_->rho2(a)));
  }
  const IndexGeometry& geometry() const { return *geom_; }
  /// C_{ab} (lower) and C^{ab} (upper) coincide.
  Scalar operator()(int a, int b) const { return b == geom_->prime(a) ? values_[a] : Scalar(); }
  const Scalar& diag(int a) const { return values_[a]; }

 private:
  GeometryPtr geom_;
  std::vector<Scalar> values_;
};

using Index4 = std::array<int, 4>;

/// Sparse X^{ab}_{cd}: entries keyed (a, b, c, d), upper pair first.
class SparseTensor4 {
 public:
  SparseTensor4() = default;
  explicit SparseTensor4(GeometryPtr g) : geom_(std::move(g)) {}

  static SparseTensor4 identity(GeometryPtr g) {
    SparseTensor4 t(g);
    for (int a = 0; a < g->dim(); ++a)
      for (int b = 0; b < g->dim(); ++b) t.set({a, b, a, b}, Scalar(1));
    return t;
  }

  const GeometryPtr& geometry_ptr() const { return geom_; }
  const IndexGeometry& geometry() const { return *geom_; }
  int dim() const { return geom_->dim(); }
  const std::map<Index4, Scalar>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }

  Scalar operator()(int a, int b, int c, int d) const {
    auto it = entries_.find({a, b, c, d});
    return it == entries_.end() ? Scalar() : it->second;
  }
  void set(const Index4& idx, Scalar v) {
    check(idx);
    if (v.is_zero())
      entries_.erase(idx);
    else
      entries_[idx] = std::move(v);
  }
  void add(const Index4& idx, const Scalar& v) {
    if (v.is_zero()) return;
    check(idx);
    auto [it, inserted] = entries_.try_emplace(idx, v);
    if (!inserted) {
      it->second += v;
      if (it->second.is_zero()) entries_.erase(it);
    }
  }

  SparseTensor4 operator+(const SparseTensor4& o) const {
    same_geometry(o);
    SparseTensor4 out = *this;
    for (const auto& [k, v] : o.entries_) out.add(k, v);
    return out;
  }
  SparseTensor4 operator-(const SparseTensor4& o) const { return *this + o.scaled(Scalar(-1)); }
  SparseTensor4 scaled(const Scalar& c) const {
    SparseTensor4 out(geom_);
    if (c.is_zero()) return out;
    for (const auto& [k, v] : entries_) out.entries_.emplace(k, v * c);
    return out;
  }

  /// Swap the two upper indices: (PX)^{ab}_{cd} = X^{ba}_{cd}.
  SparseTensor4 swap_upper() const {
    SparseTensor4 out(geom_);
    for (const auto& [k, v] : entries_) out.entries_.emplace(Index4{k[1], k[0], k[2], k[3]}, v);
    return out;
  }
  SparseTensor4 swap_lower() const {
    SparseTensor4 out(geom_);
    for (const auto& [k, v] : entries_) out.entries_.emplace(Index4{k[0], k[1], k[3], k[2]}, v);
    return out;
  }

  /// Entrywise monomial substitution of the parameters.
  SparseTensor4 map_params(const std::array<Monomial, kMaxVars>& image) const {
    SparseTensor4 out(geom_);
    for (const auto& [k, v] : entries_) out.set(k, v.substitute(image));
    return out;
  }

  void same_geometry(const SparseTensor4& o) const {
    if (!geom_ || !o.geom_ || geom_->dim() != o.geom_->dim() || geom_->params().qdim() != o.geom_->params().qdim() ||
        geom_->params().shift() != o.geom_->params().shift())
      throw GeometryMismatch();
  }

 private:
  void check(const Index4& idx) const {
    for (int i : idx)
      if (i < 0 || i >= dim()) throw std::out_of_range("tensor index out of range");
  }

  GeometryPtr geom_;
  std::map<Index4, Scalar> entries_;
};

/// Operator product on V (x) V: (XY)^{ab}_{cd} = X^{ab}_{ef} Y^{ef}_{cd}.
inline SparseTensor4 tensor_compose(const SparseTensor4& x, const SparseTensor4& y) {
  x.same_geometry(y);
  std::map<std::pair<int, int>, std::vector<std::pair<std::pair<int, int>, const Scalar*>>> rows;
  for (const auto& [k, v] : y.entries()) rows[{k[0], k[1]}].push_back({{k[2], k[3]}, &v});
  SparseTensor4 out(x.geometry_ptr());
  for (const auto& [kx, vx] : x.entries()) {
    auto it = rows.find({kx[2], kx[3]});
    if (it == rows.end()) continue;
    for (const auto& [cd, vy] : it->second) out.add({kx[0], kx[1], cd.first, cd.second}, vx * *vy);
  }
  return out;
}

struct TensorDiff {
  bool equal = true;
  std::vector<int> index;  // witness, 0-based
  Scalar lhs, rhs;
};

inline TensorDiff tensor_equal(const SparseTensor4& x, const SparseTensor4& y) {
  x.same_geometry(y);
  TensorDiff d;
  auto report = [&](const Index4& k, const Scalar& a, const Scalar& b) {
    d.equal = false;
    d.index.assign(k.begin(), k.end());
    d.lhs = a;
    d.rhs = b;
  };
  for (const auto& [k, v] : x.entries()) {
    Scalar w = y(k[0], k[1], k[2], k[3]);
    if (!(v == w)) {
      report(k, v, w);
      return d;
    }
  }
  for (const auto& [k, v] : y.entries()) {
    if (x.entries().count(k) == 0) {
      report(k, Scalar(), v);
      return d;
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Sparse matrices over multi-indices.  Rows and columns are integers; a
// multi-index (i_1..i_k) over an alphabet of size M encodes as base-M digits
// with i_1 most significant.

class SparseMatrix {
 public:
  using Row = std::vector<std::pair<int, Scalar>>;

  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows) {}

  static SparseMatrix identity(int n) {
    SparseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.data_[i].emplace_back(i, Scalar(1));
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Row& row(int i) const { return data_[i]; }
  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& r : data_) n += r.size();
    return n;
  }
  bool is_zero() const {
    for (const auto& r : data_)
      if (!r.empty()) return false;
    return true;
  }

  Scalar at(int i, int j) const {
    for (const auto& [c, v] : data_[i])
      if (c == j) return v;
    return {};
  }

  /// Rows must be filled in increasing column order or via add().
  void add(int i, int j, const Scalar& v) {
    if (v.is_zero()) return;
    auto& r = data_[i];
    auto it = std::lower_bound(r.begin(), r.end(), j, [](const auto& e, int col) { return e.first < col; });
    if (it != r.end() && it->first == j) {
      it->second += v;
      if (it->second.is_zero()) r.erase(it);
    } else {
      r.insert(it, {j, v});
    }
  }

  SparseMatrix scaled(const Scalar& c) const {
    SparseMatrix out(rows_, cols_);
    if (c.is_zero()) return out;
    if (c.is_one()) return *this;
    for (int i = 0; i < rows_; ++i) {
      out.data_[i].reserve(data_[i].size());
      for (const auto& [j, v] : data_[i]) out.data_[i].emplace_back(j, v * c);
    }
    return out;
  }

  SparseMatrix operator+(const SparseMatrix& o) const {
    check_shape(o);
    SparseMatrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i) {
      const auto& a = data_[i];
      const auto& b = o.data_[i];
      auto& dst = out.data_[i];
      auto x = a.begin();
      auto y = b.begin();
      while (x != a.end() && y != b.end()) {
        if (x->first < y->first) {
          dst.push_back(*x++);
        } else if (y->first < x->first) {
          dst.push_back(*y++);
        } else {
          Scalar s = x->second + y->second;
          if (!s.is_zero()) dst.emplace_back(x->first, std::move(s));
          ++x;
          ++y;
        }
      }
      dst.insert(dst.end(), x, a.end());
      dst.insert(dst.end(), y, b.end());
    }
    return out;
  }
  SparseMatrix operator-(const SparseMatrix& o) const { return *this + o.scaled(Scalar(-1)); }

  SparseMatrix operator*(const SparseMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix shape mismatch");
    SparseMatrix out(rows_, o.cols_);
    std::vector<Scalar> acc(o.cols_);
    std::vector<char> used(o.cols_, 0);
    std::vector<int> touched;
    for (int i = 0; i < rows_; ++i) {
      touched.clear();
      for (const auto& [k, v] : data_[i])
        for (const auto& [j, w] : o.data_[k]) {
          if (!used[j]) {
            used[j] = 1;
            touched.push_back(j);
            acc[j] = v * w;
          } else {
            acc[j] += v * w;
          }
        }
      std::sort(touched.begin(), touched.end());
      for (int j : touched) {
        if (!acc[j].is_zero()) out.data_[i].emplace_back(j, std::move(acc[j]));
        acc[j] = Scalar();
        used[j] = 0;
      }
    }
    return out;
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  template <class F>
  SparseMatrix transform(F&& f) const {
    SparseMatrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (const auto& [j, v] : data_[i]) out.add(i, j, f(v));
    return out;
  }

 private:
  void check_shape(const SparseMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix shape mismatch");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Row> data_;
};

inline bool operator==(const std::pair<int, Scalar>& a, const std::pair<int, Scalar>& b) {
  return a.first == b.first && a.second == b.second;
}

inline int ipow(int base, int e) {
  int out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

inline std::vector<int> decode_multi(int code, int base, int len) {
  std::vector<int> out(len);
  for (int i = len - 1; i >= 0; --i) {
    out[i] = code % base;
    code /= base;
  }
  return out;
}

inline int encode_multi(const std::vector<int>& idx, int base) {
  int code = 0;
  for (int i : idx) code = code * base + i;
  return code;
}

/// Lift X on V(x)V to V^{(x)3} acting on slots (i, j), i < j in {0,1,2}.
inline SparseMatrix lift3(const SparseTensor4& x, int i, int j) {
  const int m = x.dim();
  const int k = 3 - i - j;  // untouched slot
  SparseMatrix out(m * m * m, m * m * m);
  for (const auto& [idx, v] : x.entries())
    for (int t = 0; t < m; ++t) {
      std::vector<int> row(3), col(3);
      row[i] = idx[0];
      row[j] = idx[1];
      row[k] = t;
      col[i] = idx[2];
      col[j] = idx[3];
      col[k] = t;
      out.add(encode_multi(row, m), encode_multi(col, m), v);
    }
  return out;
}

enum class Slot { s12, s13, s23 };

/// Ordered product of lifted factors on V^{(x)3}, computed sparsely.
inline SparseMatrix triple_compose(const std::vector<std::pair<const SparseTensor4*, Slot>>& factors) {
  if (factors.empty()) throw std::invalid_argument("empty factor list");
  const int m = factors.front().first->dim();
  SparseMatrix acc = SparseMatrix::identity(m * m * m);
  for (const auto& [t, slot] : factors) {
    if (t->dim() != m) throw GeometryMismatch();
    factors.front().first->same_geometry(*t);
    switch (slot) {
      case Slot::s12: acc = acc * lift3(*t, 0, 1); break;
      case Slot::s13: acc = acc * lift3(*t, 0, 2); break;
      case Slot::s23: acc = acc * lift3(*t, 1, 2); break;
    }
  }
  return acc;
}

struct MatrixDiff {
  bool equal = true;
  int row = -1, col = -1;
  Scalar lhs, rhs;
};

inline MatrixDiff matrix_equal(const SparseMatrix& a, const SparseMatrix& b) {
  MatrixDiff d;
  SparseMatrix diff = a - b;
  for (int i = 0; i < diff.rows(); ++i)
    if (!diff.row(i).empty()) {
      d.equal = false;
      d.row = i;
      d.col = diff.row(i).front().first;
      d.lhs = a.at(d.row, d.col);
      d.rhs = b.at(d.row, d.col);
      return d;
    }
  return d;
}

}  // namespace orthoq
