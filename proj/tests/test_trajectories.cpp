#include <cmath>
#include <stdexcept>
#include <limits>

#include "amo/dynamics.hpp"
#include "amo/trajectories.hpp"
#include "doctest.h"

using namespace amo;
using namespace amo::trajectories;
using amo::fock::Mode;

namespace {

fock::ModelParams decay_only() {
  fock::ModelParams p;
  p.omega_m = 1.0;
  p.kappa = 1.0;
  p.Omega = 0.0;
  return p;
}

fock::ModelParams driven_cavity(double delta_L = 0.0) {
  fock::ModelParams p = decay_only();
  p.delta_L = delta_L;
  p.Omega = 0.05;
  return p;
}

}  // namespace

TEST_CASE("single-photon decay matches exp(-kappa t) within 3 sigma") {
  HilbertDims dims{2, 1};
  TrajectoryConfig cfg;
  cfg.n_traj = 600;
  cfg.seed = 42;
  cfg.t_max = 6.0;
  const std::vector<fock::QOperator> obs = {fock::number_op(dims, Mode::photon)};
  const EnsembleResult res = run_ensemble(decay_only(), dims, cfg, obs, 1, 0);
  REQUIRE(res.n_traj == cfg.n_traj);
  REQUIRE(res.obs_mean.size() == 1);
  REQUIRE(res.obs_mean[0].size() == res.t.size());
  int checked = 0;
  for (size_t i = 0; i < res.t.size(); ++i) {
    const double expect = std::exp(-res.t[i]);
    const double err = std::max(res.obs_stderr[0][i], 1e-12);
    if (res.t[i] > 0.2 && res.t[i] < 4.0) {
      CHECK(std::abs(res.obs_mean[0][i] - expect) < 3.0 * err + 1e-9);
      ++checked;
    }
  }
  CHECK(checked > 5);

  // No-jump survival fraction at time t equals the deterministic norm
  // e^{-kappa t} of the unnormalized no-jump branch.
  int survived = 0;
  for (double tj : res.first_jump_time)
    if (tj > 2.0) ++survived;
  const double frac = double(survived) / cfg.n_traj;
  const double expect = std::exp(-2.0);
  const double sigma = std::sqrt(expect * (1.0 - expect) / cfg.n_traj);
  CHECK(std::abs(frac - expect) < 3.0 * sigma);
}

TEST_CASE("driven cavity reaches the Lorentzian photon number") {
  HilbertDims dims{4, 1};
  TrajectoryConfig cfg;
  cfg.n_traj = 400;
  cfg.seed = 9001;
  cfg.t_max = 25.0;
  const fock::ModelParams p = driven_cavity(0.3);
  const std::vector<fock::QOperator> obs = {fock::number_op(dims, Mode::photon)};
  const EnsembleResult res = run_ensemble(p, dims, cfg, obs, 0, 0);
  const double expect = p.Omega * p.Omega / (p.delta_L * p.delta_L + 0.25);
  // Average the late-time window to beat down the sampling noise.
  double mean = 0.0, err2 = 0.0;
  int count = 0;
  for (size_t i = 0; i < res.t.size(); ++i)
    if (res.t[i] > 2.0 * cfg.t_max / 3.0) {
      mean += res.obs_mean[0][i];
      err2 += res.obs_stderr[0][i] * res.obs_stderr[0][i];
      ++count;
    }
  REQUIRE(count > 0);
  mean /= count;
  const double err = std::sqrt(err2 / count);  // conservative: no 1/sqrt(count)
  // Jumps leave a coherent state unchanged, so the ensemble variance
  // collapses; allow a small absolute numerical slack on top of 3 sigma.
  CHECK(std::abs(mean - expect) < 3.0 * err + 1e-5);
}

TEST_CASE("fixed seed is bitwise deterministic at any worker count") {
  HilbertDims dims{3, 2};
  fock::ModelParams p = driven_cavity();
  p.g = 0.3;
  p.delta_L = -p.g * p.g;
  const std::vector<fock::QOperator> obs = {fock::number_op(dims, Mode::photon),
                                            fock::number_op(dims, Mode::phonon)};
  TrajectoryConfig cfg;
  cfg.n_traj = 60;
  cfg.seed = 1234;
  cfg.t_max = 8.0;

  cfg.n_workers = 1;
  const EnsembleResult r1 = run_ensemble(p, dims, cfg, obs, 0, 0);
  cfg.n_workers = 4;
  const EnsembleResult r4 = run_ensemble(p, dims, cfg, obs, 0, 0);
  cfg.n_workers = 7;
  const EnsembleResult r7 = run_ensemble(p, dims, cfg, obs, 0, 0);

  for (size_t k = 0; k < obs.size(); ++k)
    for (size_t i = 0; i < r1.obs_mean[k].size(); ++i) {
      CHECK(r1.obs_mean[k][i] == r4.obs_mean[k][i]);
      CHECK(r1.obs_mean[k][i] == r7.obs_mean[k][i]);
    }
  for (size_t i = 0; i < r1.first_jump_time.size(); ++i)
    CHECK(r1.first_jump_time[i] == r4.first_jump_time[i]);

  // A different seed gives a different sample.
  cfg.n_workers = 1;
  cfg.seed = 4321;
  const EnsembleResult r_alt = run_ensemble(p, dims, cfg, obs, 0, 0);
  double diff = 0.0;
  for (size_t i = 0; i < r1.obs_mean[0].size(); ++i)
    diff += std::abs(r1.obs_mean[0][i] - r_alt.obs_mean[0][i]);
  CHECK(diff > 0.0);
}

TEST_CASE("standard error shrinks like 1/sqrt(n_traj)") {
  HilbertDims dims{3, 1};
  const fock::ModelParams p = driven_cavity();
  const std::vector<fock::QOperator> obs = {fock::number_op(dims, Mode::photon)};
  TrajectoryConfig cfg;
  cfg.seed = 5;
  cfg.t_max = 10.0;

  auto late_err = [&](int n) {
    cfg.n_traj = n;
    const EnsembleResult r = run_ensemble(p, dims, cfg, obs, 0, 0);
    double e = 0.0;
    int c = 0;
    for (size_t i = 0; i < r.t.size(); ++i)
      if (r.t[i] > 5.0) {
        e += r.obs_stderr[0][i];
        ++c;
      }
    return e / c;
  };
  const double e200 = late_err(200);
  const double e800 = late_err(800);
  CHECK(e800 / e200 == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("g2 estimator agrees with the master equation") {
  HilbertDims dims{4, 10};
  fock::ModelParams p;
  p.omega_m = 1.0;
  p.kappa = 0.28;
  p.g = 0.49;
  p.delta_L = -p.g * p.g;
  p.Omega = 0.05 * p.kappa;

  dynamics::SimControl ctrl;
  const auto L = dynamics::build_model_liouvillian(p, dims);
  const auto ss = dynamics::steady_state(L, ctrl, dynamics::SteadyStateMethod::time_march);
  const double g2_ref = dynamics::g2_zero(ss);

  TrajectoryConfig cfg;
  cfg.n_traj = 400;
  cfg.seed = 2024;
  cfg.t_max = 40.0;
  const G2Estimate est = g2_zero_mcwf(p, dims, cfg);
  CHECK(est.g2.n_traj == cfg.n_traj);
  CHECK(est.n_photon.mean ==
        doctest::Approx(dynamics::photon_number(ss)).epsilon(0.25));
  CHECK(std::abs(est.g2.mean - g2_ref) < 3.0 * est.g2.std_error + 0.05);
}

TEST_CASE("config validation") {
  TrajectoryConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.n_traj = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrajectoryConfig{};
  cfg.dt_max = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrajectoryConfig{};
  cfg.n_workers = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
