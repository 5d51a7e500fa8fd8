#include "qtm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qtm {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::DimensionMismatch, std::string(op) + ": shape mismatch");
  }
}

} // namespace

ComplexMatrix ComplexMatrix::identity(std::size_t d) {
  ComplexMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

Complex ComplexMatrix::trace() const {
  if (!square()) fail(ErrorCode::DimensionMismatch, "trace: matrix not square");
  Complex t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

bool ComplexMatrix::all_finite() const {
  for (const Complex& z : entries_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  require_same_shape(*this, rhs, "operator+=");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += rhs.entries_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  require_same_shape(*this, rhs, "operator-=");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= rhs.entries_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (Complex& z : entries_) z *= scale;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) {
    fail(ErrorCode::DimensionMismatch, "operator*: inner dimensions differ");
  }
  ComplexMatrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const Complex a = lhs(i, k);
      if (a == Complex(0.0)) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

double frobenius_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (const Complex& z : a.entries()) sum += std::norm(z);
  return std::sqrt(sum);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m) : mat_(m) {
  if (!m.square()) fail(ErrorCode::DimensionMismatch, "HermitianMatrix: not square");
  if (!m.all_finite()) fail(ErrorCode::InvalidArgument, "HermitianMatrix: non-finite entry");
  const double scale = std::max(1.0, frobenius_norm(m));
  double dev = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      dev += std::norm(m(i, j) - std::conj(m(j, i)));
  if (std::sqrt(dev) > 1e-12 * scale) {
    fail(ErrorCode::NotHermitian, "HermitianMatrix: deviation exceeds 1e-12 tolerance");
  }
  // symmetrize to (A + A^dagger)/2 so downstream algebra sees an exact Hermitian
  for (std::size_t i = 0; i < mat_.rows(); ++i) {
    mat_(i, i) = Complex(mat_(i, i).real(), 0.0);
    for (std::size_t j = i + 1; j < mat_.cols(); ++j) {
      const Complex avg = 0.5 * (mat_(i, j) + std::conj(mat_(j, i)));
      mat_(i, j) = avg;
      mat_(j, i) = std::conj(avg);
    }
  }
}

const EigenSystem& HermitianMatrix::spectrum() const {
  if (!spectrum_) spectrum_ = eig_hermitian(*this);
  return *spectrum_;
}

EigenSystem eig_hermitian(const HermitianMatrix& a) {
  const std::size_t d = a.dim();
  if (d > 256) fail(ErrorCode::InvalidArgument, "eig_hermitian: dimension beyond 256");

  ComplexMatrix work = a.matrix();
  ComplexMatrix vecs = ComplexMatrix::identity(d);
  const double norm_a = frobenius_norm(work);
  const double target = 1e-14 * norm_a;

  auto off_mass = [&]() {
    double sum = 0.0;
    for (std::size_t p = 0; p + 1 < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) sum += std::norm(work(p, q));
    return std::sqrt(2.0 * sum);
  };

  bool converged = norm_a == 0.0 || d == 1 || off_mass() <= target;
  for (int sweep = 0; sweep < 50 && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const Complex apq = work(p, q);
        const double m = std::abs(apq);
        if (m == 0.0) continue;
        const Complex phase = apq / m;

        // unitary 2x2 rotation [[c, -s*phase], [s*conj(phase), c]] chosen to
        // zero the (p,q) entry
        const double theta = (work(p, p).real() - work(q, q).real()) / (2.0 * m);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex sigma = s * phase;
        const Complex sigma_conj = std::conj(sigma);

        work(p, p) += t * m;
        work(q, q) -= t * m;
        work(p, q) = 0.0;
        work(q, p) = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          if (i == p || i == q) continue;
          const Complex aip = work(i, p);
          const Complex aiq = work(i, q);
          work(i, p) = aip * c + aiq * sigma_conj;
          work(i, q) = -aip * sigma + aiq * c;
          work(p, i) = std::conj(work(i, p));
          work(q, i) = std::conj(work(i, q));
        }
        for (std::size_t i = 0; i < d; ++i) {
          const Complex vip = vecs(i, p);
          const Complex viq = vecs(i, q);
          vecs(i, p) = vip * c + viq * sigma_conj;
          vecs(i, q) = -vip * sigma + viq * c;
        }
      }
    }
    converged = off_mass() <= target;
  }
  if (!converged) {
    fail(ErrorCode::NoConvergence, "eig_hermitian: sweep budget of 50 exhausted");
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return work(i, i).real() < work(j, j).real();
  });

  EigenSystem out;
  out.values.resize(d);
  out.vectors = ComplexMatrix(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    out.values[k] = work(order[k], order[k]).real();
    for (std::size_t i = 0; i < d; ++i) out.vectors(i, k) = vecs(i, order[k]);
  }
  return out;
}

double operator_norm(const HermitianMatrix& a) {
  const auto& vals = a.eigenvalues();
  return std::max(std::abs(vals.front()), std::abs(vals.back()));
}

HermitianMatrix spectral_function(const HermitianMatrix& a,
                                  const std::function<double(double)>& f) {
  const EigenSystem& es = a.spectrum();
  const std::size_t d = a.dim();
  ComplexMatrix out(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const double fv = f(es.values[k]);
    if (!std::isfinite(fv)) {
      fail(ErrorCode::InvalidArgument, "spectral_function: f not finite on spectrum");
    }
    if (fv == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      const Complex vi = es.vectors(i, k) * fv;
      for (std::size_t j = 0; j < d; ++j) out(i, j) += vi * std::conj(es.vectors(j, k));
    }
  }
  return HermitianMatrix(out);
}

ComplexMatrix partial_trace_system(const ComplexMatrix& rho_se, std::size_t d_s,
                                   std::size_t d_e) {
  if (!rho_se.square() || rho_se.rows() != d_s * d_e) {
    fail(ErrorCode::DimensionMismatch, "partial_trace_system: d_s*d_e != dim");
  }
  ComplexMatrix out(d_e, d_e);
  for (std::size_t n = 0; n < d_s; ++n)
    for (std::size_t k = 0; k < d_e; ++k)
      for (std::size_t l = 0; l < d_e; ++l) out(k, l) += rho_se(n * d_e + k, n * d_e + l);
  return out;
}

ComplexMatrix partial_trace_env(const ComplexMatrix& rho_se, std::size_t d_s,
                                std::size_t d_e) {
  if (!rho_se.square() || rho_se.rows() != d_s * d_e) {
    fail(ErrorCode::DimensionMismatch, "partial_trace_env: d_s*d_e != dim");
  }
  ComplexMatrix out(d_s, d_s);
  for (std::size_t k = 0; k < d_e; ++k)
    for (std::size_t n = 0; n < d_s; ++n)
      for (std::size_t m = 0; m < d_s; ++m) out(n, m) += rho_se(n * d_e + k, m * d_e + k);
  return out;
}

} // namespace qtm
