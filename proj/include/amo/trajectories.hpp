#pragma once

#include <cstdint>
#include <vector>

#include "amo/fock.hpp"

namespace amo::trajectories {

using fock::HilbertDims;
using fock::ModelParams;
using fock::QOperator;

struct TrajectoryConfig {
  int n_traj = 2000;
  std::uint64_t seed = 0;
  double dt_max = 0.05;      // propagation step cap, units of 1/kappa
  double sample_dt = 0.25;   // observable sampling interval, units of 1/kappa
  double jump_tol = 1e-10;   // norm-threshold bisection tolerance
  double t_max = 30.0;       // units of 1/kappa
  int n_workers = 1;         // results are worker-count independent

  void validate() const;
};

struct TrajectoryEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int n_traj = 0;
};

struct EnsembleResult {
  std::vector<double> t;  // absolute time (same units as 1/rates)
  // obs_mean[k][i]: ensemble average of observable k at t[i].
  std::vector<std::vector<double>> obs_mean;
  std::vector<std::vector<double>> obs_stderr;
  std::vector<double> first_jump_time;  // per trajectory; +inf when no jump
  int n_traj = 0;
};

// Quantum-jump (MCWF) unraveling: non-Hermitian drift H - (i/2) kappa a'a
// (plus the optional phonon channel), jumps sampled by norm threshold.
// Deterministic for a fixed seed at any worker count.
EnsembleResult run_ensemble(const ModelParams& params, const HilbertDims& dims,
                            const TrajectoryConfig& cfg,
                            const std::vector<QOperator>& observables,
                            int init_n1 = 0, int init_n2 = 0);

struct G2Estimate {
  TrajectoryEstimate g2;
  TrajectoryEstimate n_photon;
};

// g2(0) from late-time wavefunction averages (window: final third of t_max).
G2Estimate g2_zero_mcwf(const ModelParams& params, const HilbertDims& dims,
                        const TrajectoryConfig& cfg);

}  // namespace amo::trajectories
