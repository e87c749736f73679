#include "amo/krylov.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace amo::krylov {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

Vector expmv(const Eigen::SparseMatrix<Complex>& A, const Vector& v, double t,
             const ExpmvOptions& opts) {
  const int n = int(v.size());
  if (A.rows() != n || A.cols() != n)
    throw std::invalid_argument("expmv: dimension mismatch");
  if (t == 0.0) return v;

  const double v_norm = v.norm();
  if (v_norm == 0.0) return v;
  const double abs_tol = opts.tol * v_norm;

  Vector w = v;
  double remaining = t;
  double h = t;
  int substeps = 0;

  while (remaining > 0.0) {
    if (++substeps > opts.max_substeps)
      throw std::runtime_error("expmv: substep limit exhausted");
    h = std::min(h, remaining);

    const double beta = w.norm();
    if (beta == 0.0) return w;

    // Arnoldi factorization A V_m = V_m H_m + h_{m+1,m} v_{m+1} e_m^T.
    const int m = std::min(opts.max_basis, n);
    Matrix V(n, m + 1);
    Matrix H = Matrix::Zero(m + 1, m);
    V.col(0) = w / beta;
    int k = m;
    bool breakdown = false;
    for (int j = 0; j < m; ++j) {
      Vector p = A * V.col(j);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V.col(i).dot(p);
        p -= H(i, j) * V.col(i);
      }
      // One re-orthogonalization pass keeps the basis clean.
      for (int i = 0; i <= j; ++i) {
        const Complex c = V.col(i).dot(p);
        H(i, j) += c;
        p -= c * V.col(i);
      }
      const double hnorm = p.norm();
      H(j + 1, j) = hnorm;
      if (hnorm < 1e-14 * beta) {
        k = j + 1;
        breakdown = true;
        break;
      }
      V.col(j + 1) = p / hnorm;
    }

    while (true) {
      const Matrix Hk = H.topLeftCorner(k, k);
      const Matrix E = (h * Hk).exp();
      const Vector y = E.col(0);
      double err = 0.0;
      if (!breakdown) err = beta * std::abs(H(k, k - 1)) * std::abs(y(k - 1)) * h;
      if (breakdown || err <= abs_tol * (h / std::abs(t)) || h <= 1e-12 * std::abs(t)) {
        w = V.leftCols(k) * (beta * y);
        remaining -= h;
        if (!breakdown && err < 0.1 * abs_tol * (h / std::abs(t))) h *= 1.8;
        break;
      }
      h *= 0.5;
    }
  }
  return w;
}

}  // namespace amo::krylov
