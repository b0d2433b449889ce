// Dense complex linear algebra for the small (dim <= 64) matrices of a
// three-qubit register and its Liouville space.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbac {

using complex = std::complex<double>;

/// Dense row-major complex matrix over Real (double or an extended type).
template <class Real>
class BasicMatrix {
 public:
  using real_type = Real;
  using value_type = std::complex<Real>;

  BasicMatrix() = default;

  BasicMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}

  BasicMatrix(std::size_t rows, std::size_t cols, std::vector<value_type> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
      throw std::invalid_argument("ComplexMatrix: entry count " +
                                  std::to_string(entries_.size()) + " != " +
                                  std::to_string(rows_) + "x" + std::to_string(cols_));
    if (!all_finite())
      throw std::invalid_argument("ComplexMatrix: non-finite entry");
  }

  BasicMatrix(std::initializer_list<std::initializer_list<value_type>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_)
        throw std::invalid_argument("ComplexMatrix: ragged initializer");
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
  }

  static BasicMatrix zeros(std::size_t rows, std::size_t cols) { return BasicMatrix(rows, cols); }

  static BasicMatrix identity(std::size_t n) {
    BasicMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Real(1);
    return m;
  }

  static BasicMatrix diagonal(std::span<const Real> values) {
    BasicMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  /// |row><col| in dimension n.
  static BasicMatrix unit(std::size_t n, std::size_t row, std::size_t col) {
    BasicMatrix m(n, n);
    m(row, col) = Real(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  value_type& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const value_type& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }

  std::span<const value_type> entries() const { return entries_; }
  std::span<value_type> entries() { return entries_; }

  bool all_finite() const {
    using std::isfinite;
    return std::all_of(entries_.begin(), entries_.end(), [](const value_type& z) {
      return isfinite(z.real()) && isfinite(z.imag());
    });
  }

  BasicMatrix adjoint() const {
    BasicMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  BasicMatrix transpose() const {
    BasicMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  BasicMatrix conjugate() const {
    BasicMatrix out = *this;
    for (auto& z : out.entries_) z = std::conj(z);
    return out;
  }

  value_type trace() const {
    require_square("trace");
    value_type t{};
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  BasicMatrix& operator+=(const BasicMatrix& other) {
    require_same_shape(other, "+=");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
  }

  BasicMatrix& operator-=(const BasicMatrix& other) {
    require_same_shape(other, "-=");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
  }

  BasicMatrix& operator*=(value_type scalar) {
    for (auto& z : entries_) z *= scalar;
    return *this;
  }

  friend BasicMatrix operator+(BasicMatrix a, const BasicMatrix& b) { return a += b; }
  friend BasicMatrix operator-(BasicMatrix a, const BasicMatrix& b) { return a -= b; }
  friend BasicMatrix operator*(BasicMatrix a, value_type s) { return a *= s; }
  friend BasicMatrix operator*(value_type s, BasicMatrix a) { return a *= s; }

  friend BasicMatrix operator*(const BasicMatrix& a, const BasicMatrix& b) {
    if (a.cols_ != b.rows_)
      throw std::invalid_argument("ComplexMatrix: product shape mismatch " +
                                  std::to_string(a.cols_) + " vs " + std::to_string(b.rows_));
    BasicMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const value_type aik = a(i, k);
        if (aik == value_type{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  /// Matrix-vector product.
  std::vector<value_type> apply(std::span<const value_type> v) const {
    if (v.size() != cols_)
      throw std::invalid_argument("ComplexMatrix: vector length mismatch");
    std::vector<value_type> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      value_type acc{};
      const value_type* row = entries_.data() + i * cols_;
      for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * v[j];
      out[i] = acc;
    }
    return out;
  }

 private:
  void require_square(const char* what) const {
    if (!is_square())
      throw std::invalid_argument(std::string("ComplexMatrix: ") + what + " needs a square matrix");
  }
  void require_same_shape(const BasicMatrix& other, const char* what) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
      throw std::invalid_argument(std::string("ComplexMatrix: shape mismatch in ") + what);
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<value_type> entries_;
};

using ComplexMatrix = BasicMatrix<double>;

/// Entry-wise conversion between precisions.
template <class To, class From>
BasicMatrix<To> convert(const BasicMatrix<From>& m) {
  BasicMatrix<To> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.entries().size(); ++i)
    out.entries()[i] = std::complex<To>(static_cast<To>(m.entries()[i].real()), static_cast<To>(m.entries()[i].imag()));
  return out;
}

template <class Real>
Real frobenius_norm(const BasicMatrix<Real>& m) {
  using std::sqrt;
  Real s(0);
  for (const auto& z : m.entries()) s += z.real() * z.real() + z.imag() * z.imag();
  return sqrt(s);
}

template <class Real>
Real frobenius_distance(const BasicMatrix<Real>& a, const BasicMatrix<Real>& b) {
  return frobenius_norm(a - b);
}

/// Block structure a(i,j) * b.
template <class Real>
BasicMatrix<Real> kron(const BasicMatrix<Real>& a, const BasicMatrix<Real>& b) {
  using value_type = typename BasicMatrix<Real>::value_type;
  BasicMatrix<Real> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const value_type aij = a(i, j);
      if (aij == value_type{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

inline bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.is_square() && frobenius_distance(m, m.adjoint()) <= tol;
}

/// Ascending eigenvalues of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Input must be Hermitian within 1e-10 (Frobenius).
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("hermitian_eigenvalues: matrix is not square");
  if (!is_hermitian(m, 1e-10))
    throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian");

  const std::size_t n = m.rows();
  // Symmetrize so that round-off in the input does not leak into the sweep.
  ComplexMatrix a = (m + m.adjoint()) * complex{0.5};

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };
  const double scale = std::max(frobenius_norm(a), 1e-300);

  for (int sweep = 0; sweep < 100 && off_norm() > 1e-15 * scale; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r < 1e-300) continue;
        // Phase e^{-i phi} on q turns a(p,q) real; then a real Jacobi rotation.
        const complex phase = std::conj(a(p, q)) / r;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const complex jpp = c, jpq = s, jqp = -s * phase, jqq = c * phase;

        for (std::size_t k = 0; k < n; ++k) {  // a <- a J
          const complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // a <- J^dagger a
          const complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i).real();
  std::sort(eig.begin(), eig.end());
  return eig;
}

/// Partial trace of an n-qubit operator. Qubits are numbered 1..n with
/// qubit 1 the most significant bit of the basis index. The result acts on
/// the kept qubits in ascending order.
template <class Real>
BasicMatrix<Real> partial_trace_qubits(const BasicMatrix<Real>& m, int num_qubits,
                                       std::span<const int> keep) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (!m.is_square() || m.rows() != dim)
    throw std::invalid_argument("partial_trace: expected a " + std::to_string(dim) + "x" +
                                std::to_string(dim) + " matrix");
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");

  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw std::invalid_argument("partial_trace: duplicate subsystem index");
  for (int q : kept)
    if (q < 1 || q > num_qubits)
      throw std::invalid_argument("partial_trace: subsystem index " + std::to_string(q) +
                                  " out of range");

  auto bit = [&](std::size_t index, int qubit) {
    return (index >> (num_qubits - qubit)) & 1u;
  };
  auto reduced_index = [&](std::size_t index) {
    std::size_t r = 0;
    for (int q : kept) r = (r << 1) | bit(index, q);
    return r;
  };
  auto traced_match = [&](std::size_t i, std::size_t j) {
    for (int q = 1; q <= num_qubits; ++q)
      if (!std::binary_search(kept.begin(), kept.end(), q) && bit(i, q) != bit(j, q))
        return false;
    return true;
  };

  const std::size_t out_dim = std::size_t{1} << kept.size();
  BasicMatrix<Real> out(out_dim, out_dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      if (traced_match(i, j)) out(reduced_index(i), reduced_index(j)) += m(i, j);
  return out;
}

/// Partial trace on the three-qubit register (target = 1, resets = 2, 3).
template <class Real>
BasicMatrix<Real> partial_trace(const BasicMatrix<Real>& m, std::span<const int> keep) {
  if (!m.is_square() || m.rows() != 8)
    throw std::invalid_argument("partial_trace: expected an 8x8 matrix, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  return partial_trace_qubits(m, 3, keep);
}

template <class Real>
BasicMatrix<Real> partial_trace(const BasicMatrix<Real>& m, std::initializer_list<int> keep) {
  return partial_trace(m, std::span<const int>(keep.begin(), keep.size()));
}

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kEigenvalueFloor = -1e-10;

/// Hermitian, unit-trace, positive semidefinite matrix of power-of-two size.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {
    const std::size_t d = matrix_.rows();
    if (!matrix_.is_square() || d == 0 || (d & (d - 1)) != 0)
      throw std::invalid_argument("DensityMatrix: dimension must be a power of two");
    if (!matrix_.all_finite()) throw std::domain_error("DensityMatrix: non-finite entry");
    if (!is_hermitian(matrix_, kHermitianTolerance))
      throw std::domain_error("DensityMatrix: not Hermitian");
    const complex tr = matrix_.trace();
    if (std::abs(tr - 1.0) > kTraceTolerance)
      throw std::domain_error("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
    const auto eig = hermitian_eigenvalues(matrix_);
    if (eig.front() < kEigenvalueFloor)
      throw std::domain_error("DensityMatrix: negative eigenvalue " + std::to_string(eig.front()));
  }

  std::size_t dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const complex& operator()(std::size_t r, std::size_t c) const { return matrix_(r, c); }

 private:
  ComplexMatrix matrix_;
};

}  // namespace hbac
