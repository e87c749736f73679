#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>

namespace amo::krylov {

struct ExpmvOptions {
  int max_basis = 30;       // Arnoldi subspace size
  double tol = 1e-8;        // local error per substep, relative to ||v||
  int max_substeps = 200000;
};

// y = exp(t A) v via Arnoldi projection with adaptive substepping.
// Throws std::runtime_error when the substep count is exhausted.
Eigen::VectorXcd expmv(const Eigen::SparseMatrix<std::complex<double>>& A,
                       const Eigen::VectorXcd& v, double t,
                       const ExpmvOptions& opts = {});

}  // namespace amo::krylov
