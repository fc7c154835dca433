#pragma once

// Dense operator algebra on truncated Fock / qubit spaces.
// Kronecker ordering is fixed everywhere: left factor slow, right factor fast.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "errors.hpp"

namespace gaugeqed {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr cplx I_{0.0, 1.0};

inline double hermitian_deviation(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  double dev = 0.0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i <= j; ++i) dev = std::max(dev, std::abs(m(i, j) - std::conj(m(j, i))));
  return dev;
}

class HermitianOp {
 public:
  HermitianOp() = default;
  explicit HermitianOp(Matrix m, double tol = kHermitianTol) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols())
      throw Error(ErrorKind::InvalidDimension, "operator must be square with dim >= 1");
    // tolerance is relative to the entry scale for large-valued operators
    double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    double dev = hermitian_deviation(m_);
    if (dev > tol * scale)
      throw Error(ErrorKind::Validation,
                  "matrix is not Hermitian (max deviation " + std::to_string(dev) + ")");
  }
  static HermitianOp from_real(const RealMatrix& m) { return HermitianOp(m.cast<cplx>()); }

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  bool is_real() const { return m_.imag().cwiseAbs().maxCoeff() == 0.0; }
  double norm() const { return m_.norm(); }

  HermitianOp operator+(const HermitianOp& o) const { return HermitianOp(m_ + o.m_); }
  HermitianOp operator-(const HermitianOp& o) const { return HermitianOp(m_ - o.m_); }
  HermitianOp operator*(double s) const { return HermitianOp(m_ * s); }

 private:
  Matrix m_;
};

struct LadderPair {
  Matrix a;     // annihilation
  Matrix adag;  // creation
};

struct EigenSystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns
};

inline HermitianOp identity(Index dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidDimension, "identity needs dim >= 1");
  return HermitianOp(Matrix::Identity(dim, dim));
}

inline LadderPair ladder(Index dim) {
  if (dim < 2) throw Error(ErrorKind::InvalidDimension, "ladder needs dim >= 2");
  Matrix a = Matrix::Zero(dim, dim);
  for (Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return {a, a.adjoint()};
}

inline Matrix number_matrix(Index dim) {
  Matrix n = Matrix::Zero(dim, dim);
  for (Index k = 0; k < dim; ++k) n(k, k) = double(k);
  return n;
}

// a^2 with correct entries on the truncated space (no corner artefact)
inline Matrix lower2_matrix(Index dim) {
  Matrix m = Matrix::Zero(dim, dim);
  for (Index n = 2; n < dim; ++n) m(n - 2, n) = std::sqrt(double(n) * double(n - 1));
  return m;
}

// qubit basis: index 0 = ground, index 1 = excited
inline Matrix sigma_plus() {
  Matrix s = Matrix::Zero(2, 2);
  s(1, 0) = 1.0;
  return s;
}
inline Matrix sigma_minus() { return sigma_plus().transpose(); }
inline Matrix sigma_x() { return sigma_plus() + sigma_minus(); }
inline Matrix sigma_y() { return I_ * (sigma_minus() - sigma_plus()); }
inline Matrix sigma_z() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = -1.0;
  s(1, 1) = 1.0;
  return s;
}
inline Matrix proj_ground() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 1.0;
  return s;
}
inline Matrix proj_excited() {
  Matrix s = Matrix::Zero(2, 2);
  s(1, 1) = 1.0;
  return s;
}

inline Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

inline HermitianOp tensor(const HermitianOp& A, const HermitianOp& B) {
  return HermitianOp(kron(A.matrix(), B.matrix()));
}

namespace detail {

// largest-magnitude component made real and positive
inline void fix_phases(Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index best = 0;
    double bmax = -1.0;
    for (Index i = 0; i < v.rows(); ++i) {
      double a = std::abs(v(i, j));
      if (a > bmax * (1.0 + 1e-12)) {
        bmax = a;
        best = i;
      }
    }
    if (bmax > 0.0) v.col(j) *= std::conj(v(best, j)) / bmax;
  }
}

inline void check_info(lapack_int info, const char* routine) {
  if (info != 0)
    throw Error(ErrorKind::Convergence,
                std::string(routine) + " failed with info=" + std::to_string(info));
}

// k lowest (k <= 0 means all) eigenpairs of a real symmetric matrix, destroys `a`
inline EigenSystem syev_real(RealMatrix& a, Index k, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  EigenSystem es;
  if (k <= 0 || k >= n) {
    RealVector w(n);
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'U', n, a.data(), n,
                              w.data()),
               "dsyevd");
    es.values = w;
    if (want_vectors) es.vectors = a.cast<cplx>();
    return es;
  }
  RealVector w(n);
  RealMatrix z(want_vectors ? n : 1, want_vectors ? k : 1);
  std::vector<lapack_int> isuppz(2 * static_cast<size_t>(n));
  lapack_int m = 0;
  check_info(LAPACKE_dsyevr(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'I', 'U', n, a.data(), n,
                            0.0, 0.0, 1, static_cast<lapack_int>(k), 0.0, &m, w.data(), z.data(),
                            want_vectors ? n : 1, isuppz.data()),
             "dsyevr");
  es.values = w.head(m);
  if (want_vectors) es.vectors = z.leftCols(m).cast<cplx>();
  return es;
}

inline EigenSystem heev_complex(Matrix& a, Index k, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  EigenSystem es;
  RealVector w(n);
  if (k <= 0 || k >= n) {
    check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'U', n, a.data(), n,
                              w.data()),
               "zheevd");
    es.values = w;
    if (want_vectors) es.vectors = a;
    return es;
  }
  Matrix z(want_vectors ? n : 1, want_vectors ? k : 1);
  std::vector<lapack_int> isuppz(2 * static_cast<size_t>(n));
  lapack_int m = 0;
  check_info(LAPACKE_zheevr(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'I', 'U', n, a.data(), n,
                            0.0, 0.0, 1, static_cast<lapack_int>(k), 0.0, &m, w.data(), z.data(),
                            want_vectors ? n : 1, isuppz.data()),
             "zheevr");
  es.values = w.head(m);
  if (want_vectors) es.vectors = z.leftCols(m);
  return es;
}

template <class Mat>
inline EigenSystem eigen_fallback(const Mat& a, Index k, bool want_vectors) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Convergence, "self-adjoint eigensolver failed");
  Index m = (k <= 0 || k >= a.rows()) ? a.rows() : k;
  EigenSystem out;
  out.values = es.eigenvalues().head(m);
  if (want_vectors) out.vectors = es.eigenvectors().leftCols(m).template cast<cplx>();
  return out;
}

// Some OpenBLAS builds pick a faulty kernel on virtualized CPUs; probe once and fall back to Eigen.
inline bool lapack_trustworthy() {
  static const bool ok = [] {
    const Index n = 256;
    RealMatrix A(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j <= i; ++j) A(i, j) = A(j, i) = std::sin(1.0 + 0.37 * double(i) + 1.91 * double(j * j % 17));
    bool good = true;
    for (Index k : {Index(0), Index(6)}) {
      RealMatrix B = A;
      EigenSystem es = syev_real(B, k, true);
      RealMatrix V = es.vectors.real();
      good = good && (A * V - V * es.values.asDiagonal()).norm() < 1e-9 * A.norm();
      Matrix Z = A.cast<cplx>() + I_ * (A - A.transpose().eval()).cast<cplx>();
      Matrix Zc = Z;
      EigenSystem ec = heev_complex(Zc, k, true);
      good = good && (Z * ec.vectors - ec.vectors * ec.values.asDiagonal()).norm() < 1e-9 * A.norm();
    }
    return good;
  }();
  return ok;
}

inline EigenSystem solve(const HermitianOp& H, Index k, bool want_vectors) {
  EigenSystem es;
  const bool lapack = lapack_trustworthy();
  if (H.is_real()) {
    RealMatrix a = H.matrix().real();
    es = lapack ? syev_real(a, k, want_vectors) : eigen_fallback(a, k, want_vectors);
  } else {
    Matrix a = H.matrix();
    es = lapack ? heev_complex(a, k, want_vectors) : eigen_fallback(a, k, want_vectors);
  }
  if (want_vectors) fix_phases(es.vectors);
  return es;
}

// real symmetric solve used by the matter builders
inline EigenSystem solve_real(RealMatrix& a, Index k, bool want_vectors) {
  return lapack_trustworthy() ? syev_real(a, k, want_vectors) : eigen_fallback(a, k, want_vectors);
}

}  // namespace detail

inline EigenSystem eig_hermitian(const HermitianOp& H) { return detail::solve(H, 0, true); }

// lowest k eigenpairs only; same conventions as eig_hermitian
inline EigenSystem eig_lowest(const HermitianOp& H, Index k) { return detail::solve(H, k, true); }

inline RealVector eigvals_lowest(const HermitianOp& H, Index k) {
  return detail::solve(H, k, false).values;
}

// f(H) = V f(Λ) V†
inline Matrix hermitian_function(const HermitianOp& H, const std::function<cplx(double)>& f) {
  EigenSystem es = eig_hermitian(H);
  Vector fl(es.values.size());
  for (Index i = 0; i < fl.size(); ++i) fl(i) = f(es.values(i));
  return es.vectors * fl.asDiagonal() * es.vectors.adjoint();
}

inline Matrix expm_antihermitian(const Matrix& K, double tol = kHermitianTol) {
  if (K.rows() != K.cols() || K.rows() < 1)
    throw Error(ErrorKind::InvalidDimension, "generator must be square");
  double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  if ((K + K.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
    throw Error(ErrorKind::Validation, "generator is not anti-Hermitian");
  // K = -iH with H = iK Hermitian
  Matrix H = I_ * K;
  H = 0.5 * (H + H.adjoint()).eval();
  return hermitian_function(HermitianOp(H), [](double x) { return std::exp(-I_ * x); });
}

// S(r) = exp[(r/2)(a^2 - a†^2)] on the truncated space
inline Matrix squeeze_matrix(double r, Index dim) {
  if (!std::isfinite(r)) throw Error(ErrorKind::Validation, "squeeze parameter must be finite");
  if (dim < 2) throw Error(ErrorKind::InvalidDimension, "squeeze needs dim >= 2");
  if (r == 0.0) return Matrix::Identity(dim, dim);
  Matrix a2 = lower2_matrix(dim);
  Matrix K = 0.5 * r * (a2 - a2.adjoint());
  return expm_antihermitian(K);
}

inline double commutator_norm(const Matrix& A, const Matrix& B) {
  return (A * B - B * A).norm();
}

}  // namespace gaugeqed
