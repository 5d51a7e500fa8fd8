#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "qtm/errors.hpp"

namespace qtm {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Plain value type; all algebra below is
/// out-of-place unless noted.
class ComplexMatrix {
public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}

  static ComplexMatrix identity(std::size_t d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_ && rows_ > 0; }

  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  Complex operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  const std::vector<Complex>& entries() const { return entries_; }
  std::vector<Complex>& entries() { return entries_; }

  ComplexMatrix adjoint() const;
  Complex trace() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(Complex scale);

  friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) {
    lhs -= rhs;
    return lhs;
  }
  friend ComplexMatrix operator*(ComplexMatrix lhs, Complex scale) {
    lhs *= scale;
    return lhs;
  }
  friend ComplexMatrix operator*(Complex scale, ComplexMatrix rhs) {
    rhs *= scale;
    return rhs;
  }
  friend ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

double frobenius_norm(const ComplexMatrix& a);

/// Kronecker product, composite index (i*rows(b)+k, j*cols(b)+l).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Eigenpairs of a Hermitian matrix: values ascending, vectors as columns,
/// A = V diag(values) V^dagger.
struct EigenSystem {
  std::vector<double> values;
  ComplexMatrix vectors;
};

/// Square complex matrix certified Hermitian at construction
/// (||A - A^dagger||_F <= 1e-12 max(1, ||A||_F), then symmetrized).
/// The spectral decomposition is computed on first use and cached; compute
/// it before sharing a single instance across threads.
class HermitianMatrix {
public:
  explicit HermitianMatrix(const ComplexMatrix& m);

  std::size_t dim() const { return mat_.rows(); }
  const ComplexMatrix& matrix() const { return mat_; }

  const EigenSystem& spectrum() const;
  const std::vector<double>& eigenvalues() const { return spectrum().values; }
  double min_eigenvalue() const { return spectrum().values.front(); }
  double max_eigenvalue() const { return spectrum().values.back(); }

private:
  ComplexMatrix mat_;
  mutable std::optional<EigenSystem> spectrum_;
};

/// Cyclic complex Jacobi diagonalization. Converges when the off-diagonal
/// Frobenius mass drops to 1e-14 ||A||_F; budget 50 full sweeps, supported
/// up to d = 256.
EigenSystem eig_hermitian(const HermitianMatrix& a);

double operator_norm(const HermitianMatrix& a); // max |eigenvalue|

/// V f(diag) V^dagger through the cached spectrum.
HermitianMatrix spectral_function(const HermitianMatrix& a,
                                  const std::function<double(double)>& f);

/// Trace over the first (system) factor, composite index (n*d_e + k).
ComplexMatrix partial_trace_system(const ComplexMatrix& rho_se, std::size_t d_s,
                                   std::size_t d_e);
/// Trace over the second (environment) factor.
ComplexMatrix partial_trace_env(const ComplexMatrix& rho_se, std::size_t d_s,
                                std::size_t d_e);

} // namespace qtm
