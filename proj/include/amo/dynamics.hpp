#pragma once

#include <string>
#include <vector>

#include "amo/fock.hpp"

namespace amo::dynamics {

using fock::Complex;
using fock::DensityMatrix;
using fock::HilbertDims;
using fock::Matrix;
using fock::ModelParams;
using fock::QOperator;
using fock::SparseMatrix;

struct JumpChannel {
  QOperator op;
  double rate = 0.0;
};

// Vectorized Lindblad generator:
//   rho' = -i [H, rho] + sum_j rate_j (L rho L' - 1/2 {L'L, rho})
// with column-major vec(rho).
struct Liouvillian {
  HilbertDims dims;
  SparseMatrix super;          // d^2 x d^2
  double total_rate = 0.0;     // sum of jump rates; sets the marching chunk

  Matrix apply(const Matrix& rho) const;
  // Entrywise L1 norm of L(rho), the steady-state residual measure.
  double residual(const Matrix& rho) const;
};

struct SimControl {
  double omega_ratio = 0.05;   // Omega / kappa used when building drives
  double rel_tol = 1e-8;       // integrator tolerance
  double t_max = 30.0;         // marching horizon, units of 1/kappa
  double eps_ss = 1e-9;        // steady-state residual threshold
  bool allow_strong_drive = false;

  void validate() const;
};

struct CorrelationSeries {
  std::vector<double> tau;     // same time units as the rates in ModelParams
  std::vector<double> values;  // g2(tau)
  ModelParams model;
  HilbertDims dims;
  SimControl ctrl;
  double g2_infinity = 0.0;    // last-grid-point value, reported
};

enum class SteadyStateMethod { time_march, null_space };

struct SteadyStateError : std::runtime_error {
  double residual;
  SteadyStateError(const std::string& what, double res)
      : std::runtime_error(what), residual(res) {}
};

Liouvillian build_liouvillian(const QOperator& H, const std::vector<JumpChannel>& jumps);
// Standard model Liouvillian: cavity jump a at rate kappa, optional phonon
// jump b at gamma_m.
Liouvillian build_model_liouvillian(const ModelParams& p, const HilbertDims& dims);

DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& L, double t,
                     const SimControl& ctrl);

DensityMatrix steady_state(const Liouvillian& L, const SimControl& ctrl,
                           SteadyStateMethod method = SteadyStateMethod::time_march);

double g2_zero(const DensityMatrix& rho_ss);
double photon_number(const DensityMatrix& rho);

CorrelationSeries g2_tau(const DensityMatrix& rho_ss, const Liouvillian& L,
                         const std::vector<double>& tau_grid, const SimControl& ctrl);

// Default tau grid: `points` samples over [0, span_kappa / kappa].
std::vector<double> default_tau_grid(double kappa, int points = 600,
                                     double span_kappa = 40.0);

struct DetuningPoint {
  double delta_L = 0.0;
  double g2 = 0.0;
  double n_photon = 0.0;
  bool converged = false;
  std::string error;
};

std::vector<DetuningPoint> detuning_sweep(const ModelParams& base,
                                          const std::vector<double>& delta_grid,
                                          const HilbertDims& dims, const SimControl& ctrl);

struct AuditReport {
  double g2_base = 0.0;
  double delta_photon_cutoff = 0.0;  // relative change, photon cutoff doubled
  double delta_phonon_cutoff = 0.0;  // relative change, phonon cutoff doubled
  double delta_drive = 0.0;          // stability of the Omega->0 extrapolation
  bool pass = false;
};

// Pass threshold: every relative change below 1e-3.
AuditReport convergence_audit(const ModelParams& p, const HilbertDims& dims,
                              const SimControl& ctrl);

// Dominant oscillation frequency of a series via windowed DFT scan over
// [omega_lo, omega_hi]; used to extract the phonon period from g2(tau).
double dominant_frequency(const std::vector<double>& t, const std::vector<double>& y,
                          double omega_lo, double omega_hi);

}  // namespace amo::dynamics
