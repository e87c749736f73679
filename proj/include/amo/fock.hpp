#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <vector>

namespace amo::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

// Truncated photon (x) phonon product space: photon levels 0..n_photon_max,
// phonon levels 0..n_phonon_max.
struct HilbertDims {
  int n_photon_max = 4;
  int n_phonon_max = 12;

  int photon_states() const { return n_photon_max + 1; }
  int phonon_states() const { return n_phonon_max + 1; }
  int dim() const { return photon_states() * phonon_states(); }
  // Basis index of |n1 photons> (x) |n2 phonons>.
  int index(int n1, int n2) const { return n1 * phonon_states() + n2; }
  bool operator==(const HilbertDims&) const = default;

  void validate() const;
};

enum class Mode { photon, phonon };

// Rotating-frame model constants (all rad/s):
//   H/hbar = -delta_L a'a + omega_m b'b + g a'a (b + b') + g2 (b + b')^2 a'a
//            + Omega (a' + a)
struct ModelParams {
  double delta_L = 0.0;
  double omega_m = 1.0;
  double g = 0.0;
  double g2 = 0.0;
  double Omega = 0.0;
  double kappa = 0.0;
  double gamma_m = 0.0;  // optional phonon damping, off by default

  void validate() const;
};

// Complex operator on the product basis, with its dims carried along.
struct QOperator {
  HilbertDims dims;
  Matrix entries;
  bool hermitian = false;

  SparseMatrix sparse() const { return entries.sparseView(1.0, 1e-300); }
};

struct DensityMatrix {
  HilbertDims dims;
  Matrix entries;

  double trace_real() const { return entries.trace().real(); }
};

// Lowering operator of one factor, identity on the other.
QOperator ladder(const HilbertDims& dims, Mode which);
QOperator number_op(const HilbertDims& dims, Mode which);
QOperator identity_op(const HilbertDims& dims);

QOperator build_hamiltonian(const ModelParams& p, const HilbertDims& dims);

// Lowest `count` eigenvalues of H/hbar for the undriven, g2-free model
// (Omega = 0, g2 = 0), ascending.
std::vector<double> spectrum_undriven(const ModelParams& p, const HilbertDims& dims,
                                      int count);

Complex expectation(const QOperator& op, const DensityMatrix& rho);

DensityMatrix vacuum_state(const HilbertDims& dims);
DensityMatrix pure_state(const HilbertDims& dims, int n1, int n2);

}  // namespace amo::fock
