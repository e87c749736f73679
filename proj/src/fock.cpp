#include "amo/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace amo::fock {

void HilbertDims::validate() const {
  if (n_photon_max < 1 || n_phonon_max < 1)
    throw std::invalid_argument("HilbertDims: both cutoffs must be >= 1");
}

void ModelParams::validate() const {
  if (!(omega_m > 0)) throw std::invalid_argument("ModelParams: omega_m must be > 0");
  if (kappa < 0) throw std::invalid_argument("ModelParams: kappa must be >= 0");
  if (Omega < 0) throw std::invalid_argument("ModelParams: Omega must be >= 0");
  if (gamma_m < 0) throw std::invalid_argument("ModelParams: gamma_m must be >= 0");
}

QOperator ladder(const HilbertDims& dims, Mode which) {
  dims.validate();
  const int d = dims.dim();
  Matrix m = Matrix::Zero(d, d);
  for (int n1 = 0; n1 < dims.photon_states(); ++n1) {
    for (int n2 = 0; n2 < dims.phonon_states(); ++n2) {
      if (which == Mode::photon && n1 >= 1)
        m(dims.index(n1 - 1, n2), dims.index(n1, n2)) = std::sqrt(double(n1));
      if (which == Mode::phonon && n2 >= 1)
        m(dims.index(n1, n2 - 1), dims.index(n1, n2)) = std::sqrt(double(n2));
    }
  }
  return {dims, std::move(m), false};
}

QOperator number_op(const HilbertDims& dims, Mode which) {
  dims.validate();
  const int d = dims.dim();
  Matrix m = Matrix::Zero(d, d);
  for (int n1 = 0; n1 < dims.photon_states(); ++n1)
    for (int n2 = 0; n2 < dims.phonon_states(); ++n2)
      m(dims.index(n1, n2), dims.index(n1, n2)) = (which == Mode::photon) ? n1 : n2;
  return {dims, std::move(m), true};
}

QOperator identity_op(const HilbertDims& dims) {
  dims.validate();
  return {dims, Matrix::Identity(dims.dim(), dims.dim()), true};
}

QOperator build_hamiltonian(const ModelParams& p, const HilbertDims& dims) {
  p.validate();
  dims.validate();
  const Matrix a = ladder(dims, Mode::photon).entries;
  const Matrix b = ladder(dims, Mode::phonon).entries;
  const Matrix n_ph = a.adjoint() * a;
  const Matrix x = b + b.adjoint();
  Matrix h = -p.delta_L * n_ph + p.omega_m * (b.adjoint() * b) +
             p.g * n_ph * x + p.g2 * x * x * n_ph;
  if (p.Omega != 0.0) h += p.Omega * (a + a.adjoint());
  // Symmetrize away roundoff; the x^2 n term is exactly Hermitian since
  // [x^2, n_photon] = 0.
  h = 0.5 * (h + h.adjoint().eval());
  return {dims, std::move(h), true};
}

std::vector<double> spectrum_undriven(const ModelParams& p, const HilbertDims& dims,
                                      int count) {
  if (p.Omega != 0.0 || p.g2 != 0.0)
    throw std::invalid_argument("spectrum_undriven requires Omega = 0 and g2 = 0");
  if (count < 1 || count > dims.dim())
    throw std::invalid_argument("spectrum_undriven: count out of range");
  ModelParams q = p;
  q.Omega = 0.0;
  const QOperator h = build_hamiltonian(q, dims);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.entries, Eigen::EigenvaluesOnly);
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = solver.eigenvalues()(i);
  return out;
}

Complex expectation(const QOperator& op, const DensityMatrix& rho) {
  if (!(op.dims == rho.dims))
    throw std::invalid_argument("expectation: dims mismatch");
  return (op.entries * rho.entries).trace();
}

DensityMatrix vacuum_state(const HilbertDims& dims) { return pure_state(dims, 0, 0); }

DensityMatrix pure_state(const HilbertDims& dims, int n1, int n2) {
  dims.validate();
  if (n1 < 0 || n1 >= dims.photon_states() || n2 < 0 || n2 >= dims.phonon_states())
    throw std::invalid_argument("pure_state: level out of range");
  Matrix m = Matrix::Zero(dims.dim(), dims.dim());
  m(dims.index(n1, n2), dims.index(n1, n2)) = 1.0;
  return {dims, std::move(m)};
}

}  // namespace amo::fock
