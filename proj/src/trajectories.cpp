#include "amo/trajectories.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace amo::trajectories {

namespace {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using SparseMatrix = fock::SparseMatrix;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 1));
}

struct JumpOp {
  SparseMatrix op;       // sqrt(rate) L
  double rate;
};

// Shared, read-only per-ensemble machinery: binary ladder of exact
// no-jump propagators exp(-i H_eff dt / 2^k).
struct Engine {
  std::vector<Matrix> U;
  std::vector<JumpOp> jumps;
  double dt = 0.0;
  int bisect_levels = 0;
  int dim = 0;

  Engine(const fock::ModelParams& p, const HilbertDims& dims,
         const TrajectoryConfig& cfg) {
    p.validate();
    if (!(p.kappa > 0))
      throw std::invalid_argument("trajectories: kappa must be > 0 (no jump channel)");
    dim = dims.dim();

    const Matrix H = fock::build_hamiltonian(p, dims).entries;
    const Matrix a = fock::ladder(dims, fock::Mode::photon).entries;
    Matrix Heff = H - Complex(0.0, 0.5) * p.kappa * (a.adjoint() * a);
    jumps.push_back({SparseMatrix((std::sqrt(p.kappa) * a).sparseView()), p.kappa});
    if (p.gamma_m > 0) {
      const Matrix b = fock::ladder(dims, fock::Mode::phonon).entries;
      Heff -= Complex(0.0, 0.5) * p.gamma_m * (b.adjoint() * b);
      jumps.push_back({SparseMatrix((std::sqrt(p.gamma_m) * b).sparseView()), p.gamma_m});
    }

    const double sample_dt = cfg.sample_dt / p.kappa;
    const double dt_cap = cfg.dt_max / p.kappa;
    const int sub = std::max(1, int(std::ceil(sample_dt / dt_cap)));
    dt = sample_dt / sub;
    bisect_levels = std::max(4, int(std::ceil(std::log2(1.0 / cfg.jump_tol))));

    const Matrix Gen = Complex(0.0, -1.0) * Heff;
    U.resize(bisect_levels + 1);
    for (int k = 0; k <= bisect_levels; ++k)
      U[k] = (Gen * (dt / double(1ull << k))).exp();
  }
};

struct Trajectory {
  const Engine& eng;
  Vector psi;
  double threshold;
  double t = 0.0;
  double first_jump = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unif{0.0, 1.0};

  Trajectory(const Engine& e, std::uint64_t seed, int init_index)
      : eng(e), psi(Vector::Zero(e.dim)), rng(seed) {
    psi(init_index) = 1.0;
    threshold = unif(rng);
  }

  void do_jump() {
    std::vector<double> w(eng.jumps.size());
    std::vector<Vector> jumped(eng.jumps.size());
    double total = 0.0;
    for (size_t j = 0; j < eng.jumps.size(); ++j) {
      jumped[j] = eng.jumps[j].op * psi;
      w[j] = jumped[j].squaredNorm();
      total += w[j];
    }
    if (!(total > 0.0)) {
      // Norm hit threshold with no available jump weight (dark state
      // numerics); keep the state and stop jumping.
      threshold = 0.0;
      return;
    }
    double pick = unif(rng) * total;
    size_t j = 0;
    for (; j + 1 < w.size(); ++j) {
      if (pick < w[j]) break;
      pick -= w[j];
    }
    psi = jumped[j] / std::sqrt(w[j]);
    if (!std::isfinite(first_jump)) first_jump = t;
    threshold = unif(rng);
  }

  // Advance by dt / 2^level, locating jumps by binary subdivision. The
  // no-jump norm is monotone nonincreasing, so a threshold crossing
  // inside an interval is always detected at its endpoint.
  void advance(int level) {
    while (true) {
      const Vector trial = eng.U[size_t(level)] * psi;
      if (trial.squaredNorm() > threshold) {
        psi = trial;
        t += eng.dt / double(1ull << level);
        return;
      }
      if (level == eng.bisect_levels) {
        do_jump();
        continue;  // retry the leaf interval with the fresh threshold
      }
      advance(level + 1);
      advance(level + 1);
      return;
    }
  }

  void step() { advance(0); }
};

}  // namespace

void TrajectoryConfig::validate() const {
  if (n_traj < 1) throw std::invalid_argument("TrajectoryConfig: n_traj must be >= 1");
  if (!(dt_max > 0) || !(sample_dt > 0) || !(t_max > 0))
    throw std::invalid_argument("TrajectoryConfig: time settings must be > 0");
  if (!(jump_tol > 0 && jump_tol < 1))
    throw std::invalid_argument("TrajectoryConfig: jump_tol must be in (0, 1)");
  if (n_workers < 1) throw std::invalid_argument("TrajectoryConfig: n_workers must be >= 1");
}

EnsembleResult run_ensemble(const ModelParams& params, const HilbertDims& dims,
                            const TrajectoryConfig& cfg,
                            const std::vector<QOperator>& observables,
                            int init_n1, int init_n2) {
  cfg.validate();
  dims.validate();
  const Engine eng(params, dims, cfg);

  std::vector<Matrix> obs;
  for (const auto& o : observables) {
    if (!(o.dims == dims)) throw std::invalid_argument("run_ensemble: observable dims mismatch");
    obs.push_back(o.entries);
  }

  const double sample_dt = cfg.sample_dt / params.kappa;
  const int n_samples = int(std::round(cfg.t_max / cfg.sample_dt)) + 1;
  const int steps_per_sample = int(std::round(sample_dt / eng.dt));
  const int init_index = dims.index(init_n1, init_n2);

  // Per-trajectory storage indexed by trajectory so the reduction order is
  // fixed regardless of which worker ran which trajectory.
  std::vector<std::vector<double>> traj_obs(
      size_t(cfg.n_traj), std::vector<double>(size_t(n_samples) * obs.size()));
  std::vector<double> first_jump(static_cast<size_t>(cfg.n_traj));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int idx = next.fetch_add(1);
      if (idx >= cfg.n_traj) return;
      Trajectory tr(eng, stream_seed(cfg.seed, std::uint64_t(idx)), init_index);
      auto record = [&](int s) {
        const double inv_norm2 = 1.0 / tr.psi.squaredNorm();
        for (size_t k = 0; k < obs.size(); ++k) {
          const Complex e = tr.psi.dot(obs[k] * tr.psi);
          traj_obs[size_t(idx)][size_t(s) * obs.size() + k] = e.real() * inv_norm2;
        }
      };
      record(0);
      for (int s = 1; s < n_samples; ++s) {
        for (int q = 0; q < steps_per_sample; ++q) tr.step();
        record(s);
      }
      first_jump[size_t(idx)] = tr.first_jump;
    }
  };
  if (cfg.n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < cfg.n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  EnsembleResult out;
  out.n_traj = cfg.n_traj;
  out.t.resize(static_cast<size_t>(n_samples));
  for (int s = 0; s < n_samples; ++s) out.t[size_t(s)] = s * sample_dt;
  out.first_jump_time = std::move(first_jump);
  out.obs_mean.assign(obs.size(), std::vector<double>(size_t(n_samples), 0.0));
  out.obs_stderr.assign(obs.size(), std::vector<double>(size_t(n_samples), 0.0));
  for (size_t k = 0; k < obs.size(); ++k) {
    for (int s = 0; s < n_samples; ++s) {
      double sum = 0.0, sumsq = 0.0;
      for (int i = 0; i < cfg.n_traj; ++i) {
        const double v = traj_obs[size_t(i)][size_t(s) * obs.size() + k];
        sum += v;
        sumsq += v * v;
      }
      const double mean = sum / cfg.n_traj;
      out.obs_mean[k][size_t(s)] = mean;
      if (cfg.n_traj > 1) {
        const double var = std::max(0.0, (sumsq - cfg.n_traj * mean * mean) /
                                             (cfg.n_traj - 1));
        out.obs_stderr[k][size_t(s)] = std::sqrt(var / cfg.n_traj);
      }
    }
  }
  return out;
}

G2Estimate g2_zero_mcwf(const ModelParams& params, const HilbertDims& dims,
                        const TrajectoryConfig& cfg) {
  cfg.validate();
  if (cfg.t_max < 30.0 - 1e-12)
    throw std::invalid_argument("g2_zero_mcwf: t_max must reach the steady regime (>= 30/kappa)");
  const QOperator a = fock::ladder(dims, fock::Mode::photon);
  QOperator n{dims, a.entries.adjoint() * a.entries, true};
  const Matrix a2 = a.entries * a.entries;
  QOperator q{dims, a2.adjoint() * a2, true};

  const EnsembleResult res = run_ensemble(params, dims, cfg, {n, q});

  // Late-time window: final third of the run.
  const double t_lo = (2.0 / 3.0) * res.t.back();
  double n_sum = 0.0, q_sum = 0.0, n_sq = 0.0, q_sq = 0.0;
  int count = 0;
  for (size_t s = 0; s < res.t.size(); ++s) {
    if (res.t[s] < t_lo) continue;
    n_sum += res.obs_mean[0][s];
    q_sum += res.obs_mean[1][s];
    n_sq += res.obs_stderr[0][s] * res.obs_stderr[0][s];
    q_sq += res.obs_stderr[1][s] * res.obs_stderr[1][s];
    ++count;
  }
  const double n_bar = n_sum / count;
  const double q_bar = q_sum / count;
  // Successive window samples of one ensemble are strongly correlated, so
  // no 1/sqrt(count) gain is claimed: the error bar is the RMS of the
  // per-time ensemble standard errors.
  const double n_err = std::sqrt(n_sq / count);
  const double q_err = std::sqrt(q_sq / count);

  G2Estimate out;
  out.n_photon = {n_bar, n_err, cfg.n_traj};
  if (!(n_bar > 1e-300))
    throw std::runtime_error("g2_zero_mcwf: vanishing photon number");
  const double g2 = q_bar / (n_bar * n_bar);
  const double rel =
      std::sqrt((q_err / q_bar) * (q_err / q_bar) + 4.0 * (n_err / n_bar) * (n_err / n_bar));
  out.g2 = {g2, std::abs(g2) * rel, cfg.n_traj};
  return out;
}

}  // namespace amo::trajectories
