#pragma once

// Dense complex linear algebra for desk-scale quantum systems.
//
// Composite basis convention: |i1,i2,...,in> maps to the flat index
// i1*(n2*...*nn) + i2*(n3*...*nn) + ... + in (first party slowest).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sepdistill {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;
using Dims = std::vector<std::size_t>;

/// Tolerances shared by every module. All thresholds are relative to the
/// largest magnitude entry or singular value of the object being tested.
struct NumericPolicy {
  double tolerance = 1e-10;
  double state_tolerance = 1e-12;
  double probability_floor = 1e-12;
  std::size_t max_dimension = 4096;
  int max_sweeps = 100;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>{});
}

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("ComplexMatrix: entry count " +
                           std::to_string(data_.size()) + " != " +
                           std::to_string(rows_) + "x" + std::to_string(cols_));
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const Complex> diag) {
    ComplexMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  /// |ket><bra| for two vectors.
  static ComplexMatrix outer(std::span<const Complex> ket,
                             std::span<const Complex> bra) {
    ComplexMatrix m(ket.size(), bra.size());
    for (std::size_t i = 0; i < ket.size(); ++i)
      for (std::size_t j = 0; j < bra.size(); ++j)
        m(i, j) = ket[i] * std::conj(bra[j]);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<const Complex> entries() const { return data_; }
  std::span<Complex> entries() { return data_; }

  Vector column(std::size_t c) const {
    Vector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o, "+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o, "-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    return a += b;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    return a -= b;
  }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a,
                                 const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw DimensionError("matrix product: inner dimensions " +
                           std::to_string(a.cols_) + " and " +
                           std::to_string(b.rows_));
    }
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex{}) continue;
        const Complex* brow = &b.data_[k * b.cols_];
        Complex* orow = &out.data_[i * out.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += aik * brow[j];
      }
    }
    return out;
  }

  friend Vector operator*(const ComplexMatrix& a, std::span<const Complex> v) {
    if (a.cols_ != v.size()) {
      throw DimensionError("matrix-vector product: " + std::to_string(a.cols_) +
                           " columns vs vector of " + std::to_string(v.size()));
    }
    Vector out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < a.cols_; ++k) s += a(i, k) * v[k];
      out[i] = s;
    }
    return out;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  void require_same_shape(const ComplexMatrix& o, const char* what) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw DimensionError(std::string("shape mismatch in ") + what);
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

// ---------------------------------------------------------------------------
// vector helpers

inline Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw DimensionError("inner: length mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

inline Vector scaled(std::span<const Complex> v, Complex s) {
  Vector out(v.begin(), v.end());
  for (auto& z : out) z *= s;
  return out;
}

inline Vector axpy(Complex a, std::span<const Complex> x,
                   std::span<const Complex> y) {
  if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
  Vector out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += a * x[i];
  return out;
}

inline double distance(std::span<const Complex> a, std::span<const Complex> b) {
  return norm(axpy(-1.0, b, a));
}

inline Vector basis_vector(std::size_t dim, std::size_t index) {
  Vector v(dim);
  v.at(index) = 1.0;
  return v;
}

// ---------------------------------------------------------------------------
// tensor products

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                          const NumericPolicy& policy = {}) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (rows > policy.max_dimension || cols > policy.max_dimension) {
    throw DimensionError("kron: product dimension " + std::to_string(rows) +
                         "x" + std::to_string(cols) + " exceeds cap " +
                         std::to_string(policy.max_dimension));
  }
  ComplexMatrix out(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

inline ComplexMatrix kron_all(std::span<const ComplexMatrix> factors,
                              const NumericPolicy& policy = {}) {
  if (factors.empty()) throw DimensionError("kron_all: no factors");
  ComplexMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i)
    out = kron(out, factors[i], policy);
  return out;
}

inline Vector kron(std::span<const Complex> a, std::span<const Complex> b) {
  Vector out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

/// Applies `op` to party `party` of a composite vector, identity elsewhere.
/// `op` may be rectangular; the result's dims have `party` replaced by
/// op.rows().
inline Vector apply_local(const ComplexMatrix& op, std::size_t party,
                          std::span<const std::size_t> dims,
                          std::span<const Complex> v) {
  if (party >= dims.size()) throw DimensionError("apply_local: bad party index");
  if (product(dims) != v.size())
    throw DimensionError("apply_local: vector length does not match dims");
  if (op.cols() != dims[party])
    throw DimensionError("apply_local: operator width does not match party dim");
  const std::size_t before = product(dims.subspan(0, party));
  const std::size_t after = product(dims.subspan(party + 1));
  const std::size_t in_dim = dims[party];
  const std::size_t out_dim = op.rows();
  Vector out(before * out_dim * after);
  for (std::size_t b = 0; b < before; ++b)
    for (std::size_t r = 0; r < out_dim; ++r)
      for (std::size_t c = 0; c < in_dim; ++c) {
        const Complex z = op(r, c);
        if (z == Complex{}) continue;
        const Complex* src = &v[(b * in_dim + c) * after];
        Complex* dst = &out[(b * out_dim + r) * after];
        for (std::size_t a = 0; a < after; ++a) dst[a] += z * src[a];
      }
  return out;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition and SVD (cyclic Jacobi, deterministic)

struct HermitianSpectrum {
  std::vector<double> eigenvalues;  // descending
  ComplexMatrix eigenvectors;       // columns
};

struct SingularValueDecomposition {
  std::vector<double> singular_values;  // descending, length min(rows, cols)
  ComplexMatrix left;                   // rows x k, orthonormal columns
  ComplexMatrix right;                  // cols x k, orthonormal columns
};

namespace detail {

// Unitary G (2x2, row-major g00 g01 g10 g11) such that G^dagger [[a, b],
// [conj(b), c]] G is diagonal.
struct Rotation {
  Complex g00, g01, g10, g11;
};

inline Rotation hermitian_rotation(double a, Complex b, double c) {
  const double mag = std::abs(b);
  const Complex phase = b / mag;  // e^{i phi}
  const double theta = (c - a) / (2.0 * mag);
  const double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double cs = 1.0 / std::sqrt(t * t + 1.0);
  const double sn = t * cs;
  // G = diag(1, conj(phase)) * [[cs, sn], [-sn, cs]]
  return {cs, sn, -sn * std::conj(phase), cs * std::conj(phase)};
}

inline void rotate_columns(ComplexMatrix& m, std::size_t p, std::size_t q,
                           const Rotation& g) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const Complex mp = m(r, p);
    const Complex mq = m(r, q);
    m(r, p) = mp * g.g00 + mq * g.g10;
    m(r, q) = mp * g.g01 + mq * g.g11;
  }
}

inline void rotate_rows_adjoint(ComplexMatrix& m, std::size_t p, std::size_t q,
                                const Rotation& g) {
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const Complex mp = m(p, c);
    const Complex mq = m(q, c);
    m(p, c) = std::conj(g.g00) * mp + std::conj(g.g10) * mq;
    m(q, c) = std::conj(g.g01) * mp + std::conj(g.g11) * mq;
  }
}

// Fills the `missing` columns of `basis` so all columns are orthonormal,
// drawing standard basis candidates through two rounds of Gram-Schmidt.
inline void complete_orthonormal(ComplexMatrix& basis,
                                 std::span<const std::size_t> missing) {
  const std::size_t n = basis.rows();
  std::vector<bool> have(basis.cols(), true);
  for (auto c : missing) have[c] = false;
  std::size_t candidate = 0;
  for (auto col : missing) {
    while (true) {
      if (candidate >= n) throw ConvergenceError("orthonormal completion failed");
      Vector v = basis_vector(n, candidate++);
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < basis.cols(); ++j) {
          if (!have[j]) continue;
          const Vector u = basis.column(j);
          v = axpy(-inner(u, v), u, v);
        }
      const double len = norm(v);
      if (len > 1e-6) {
        for (std::size_t r = 0; r < n; ++r) basis(r, col) = v[r] / len;
        have[col] = true;
        break;
      }
    }
  }
}

}  // namespace detail

inline bool is_hermitian(const ComplexMatrix& h, double rel_tol) {
  if (!h.square()) return false;
  const double scale = std::max(h.max_abs(), 1e-300);
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = i; j < h.cols(); ++j)
      if (std::abs(h(i, j) - std::conj(h(j, i))) > rel_tol * scale) return false;
  return true;
}

/// True when h + shift*I admits a Cholesky factorization, i.e. every
/// eigenvalue of the Hermitian matrix h is >= -shift (up to rounding).
inline bool is_positive_semidefinite(const ComplexMatrix& h, double shift) {
  if (!h.square()) return false;
  const std::size_t n = h.rows();
  ComplexMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = h(j, j).real() + shift;
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l(j, k));
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = h(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return true;
}

inline HermitianSpectrum hermitian_eig(const ComplexMatrix& h,
                                       const NumericPolicy& policy = {}) {
  if (h.empty() || !h.square())
    throw DimensionError("hermitian_eig: matrix must be square and nonempty");
  if (!is_hermitian(h, policy.tolerance))
    throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");

  const std::size_t n = h.rows();
  ComplexMatrix a = h;
  // Symmetrize exactly so rounding in the input cannot bias the sweep.
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double floor = 1e-17 * a.frobenius_norm();

  bool converged = n == 1;
  for (int sweep = 0; sweep < policy.max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex b = a(p, q);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (std::abs(b) <= floor || std::abs(b) <= 1e-300 ||
            std::abs(b) <= 1e-18 * std::sqrt(std::abs(app * aqq))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const auto g = detail::hermitian_rotation(app, b, aqq);
        detail::rotate_columns(a, p, q, g);
        detail::rotate_rows_adjoint(a, p, q, g);
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        detail::rotate_columns(v, p, q, g);
      }
    converged = !rotated;
  }
  if (!converged) throw ConvergenceError("hermitian_eig: Jacobi sweeps did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() > a(y, y).real();
  });
  HermitianSpectrum out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

inline SingularValueDecomposition svd(const ComplexMatrix& m,
                                      const NumericPolicy& policy = {}) {
  if (m.empty()) throw DimensionError("svd: empty matrix");
  if (m.rows() < m.cols()) {
    auto t = svd(m.adjoint(), policy);
    return {std::move(t.singular_values), std::move(t.right), std::move(t.left)};
  }
  // One-sided Jacobi: orthogonalize the columns of u, accumulating v.
  const std::size_t n = m.cols();
  ComplexMatrix u = m;
  ComplexMatrix v = ComplexMatrix::identity(n);
  // Orthogonality is only attainable to roughly sqrt(rows) ulps, and columns
  // below eps * ||m|| are noise whose direction is irrelevant.
  const double eps = std::numeric_limits<double>::epsilon();
  const double orth_tol = 4.0 * eps * std::sqrt(static_cast<double>(u.rows()));
  const double fro = m.frobenius_norm();
  const double noise = (eps * fro) * (eps * fro);
  bool converged = n == 1;
  for (int sweep = 0; sweep < policy.max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        Complex gamma = 0.0;
        for (std::size_t r = 0; r < u.rows(); ++r) {
          alpha += std::norm(u(r, p));
          beta += std::norm(u(r, q));
          gamma += std::conj(u(r, p)) * u(r, q);
        }
        if (std::abs(gamma) <= 1e-300 || std::min(alpha, beta) <= noise ||
            std::abs(gamma) <= orth_tol * std::sqrt(alpha * beta))
          continue;
        rotated = true;
        const auto g = detail::hermitian_rotation(alpha, gamma, beta);
        detail::rotate_columns(u, p, q, g);
        detail::rotate_columns(v, p, q, g);
      }
    converged = !rotated;
  }
  if (!converged) throw ConvergenceError("svd: Jacobi sweeps did not converge");

  std::vector<double> sigma(n);
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < u.rows(); ++r) s += std::norm(u(r, c));
    sigma[c] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SingularValueDecomposition out{std::vector<double>(n),
                                 ComplexMatrix(m.rows(), n), ComplexMatrix(n, n)};
  const double largest = sigma[order.front()];
  std::vector<std::size_t> missing;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t c = order[k];
    out.singular_values[k] = sigma[c];
    for (std::size_t r = 0; r < n; ++r) out.right(r, k) = v(r, c);
    // Columns with negligible norm carry no direction; rebuild them below.
    if (sigma[c] > 1e-14 * largest && sigma[c] > 1e-300) {
      for (std::size_t r = 0; r < m.rows(); ++r) out.left(r, k) = u(r, c) / sigma[c];
    } else {
      missing.push_back(k);
    }
  }
  if (!missing.empty()) detail::complete_orthonormal(out.left, missing);
  return out;
}

/// Count of singular values above rel_tol times the largest (0 for a zero
/// matrix or when the largest is below `absolute_floor`).
inline std::size_t numerical_rank(std::span<const double> singular_values,
                                  double rel_tol, double absolute_floor = 0.0) {
  if (singular_values.empty()) return 0;
  const double largest = *std::max_element(singular_values.begin(), singular_values.end());
  const double cut = std::max(rel_tol * largest, absolute_floor);
  if (largest <= absolute_floor || largest == 0.0) return 0;
  return static_cast<std::size_t>(std::count_if(
      singular_values.begin(), singular_values.end(), [&](double s) { return s > cut; }));
}

inline std::size_t matrix_rank(const ComplexMatrix& m, const NumericPolicy& policy = {}) {
  return numerical_rank(svd(m, policy).singular_values, policy.tolerance);
}

// ---------------------------------------------------------------------------
// partial trace

inline ComplexMatrix partial_trace(const ComplexMatrix& rho,
                                   std::span<const std::size_t> dims,
                                   std::vector<std::size_t> keep) {
  if (keep.empty()) throw DimensionError("partial_trace: keep set is empty");
  const std::size_t total = product(dims);
  if (!rho.square() || rho.rows() != total)
    throw DimensionError("partial_trace: matrix side " + std::to_string(rho.rows()) +
                         " does not match product of dims " + std::to_string(total));
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (auto k : keep)
    if (k >= dims.size()) throw DimensionError("partial_trace: party index out of range");

  std::vector<bool> kept(dims.size(), false);
  for (auto k : keep) kept[k] = true;
  Dims keep_dims, drop_dims;
  for (std::size_t i = 0; i < dims.size(); ++i)
    (kept[i] ? keep_dims : drop_dims).push_back(dims[i]);
  const std::size_t keep_total = product(keep_dims);
  const std::size_t drop_total = product(drop_dims);

  // Flat index from (kept multi-index, dropped multi-index).
  auto compose = [&](std::size_t keep_flat, std::size_t drop_flat) {
    std::size_t index = 0;
    std::size_t kstride = keep_total, dstride = drop_total;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      std::size_t digit;
      if (kept[i]) {
        kstride /= dims[i];
        digit = (keep_flat / kstride) % dims[i];
      } else {
        dstride /= dims[i];
        digit = (drop_flat / dstride) % dims[i];
      }
      index = index * dims[i] + digit;
    }
    return index;
  };

  std::vector<std::size_t> map(keep_total * drop_total);
  for (std::size_t k = 0; k < keep_total; ++k)
    for (std::size_t e = 0; e < drop_total; ++e) map[k * drop_total + e] = compose(k, e);

  ComplexMatrix out(keep_total, keep_total);
  for (std::size_t i = 0; i < keep_total; ++i)
    for (std::size_t j = 0; j < keep_total; ++j) {
      Complex s = 0.0;
      for (std::size_t e = 0; e < drop_total; ++e)
        s += rho(map[i * drop_total + e], map[j * drop_total + e]);
      out(i, j) = s;
    }
  return out;
}

}  // namespace sepdistill
