#include "amo/dynamics.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "amo/krylov.hpp"

namespace amo::dynamics {

namespace {

using Triplet = Eigen::Triplet<Complex>;

void append_kron(std::vector<Triplet>& out, const SparseMatrix& P,
                 const SparseMatrix& Q, Complex scale) {
  // (P (x) Q)_{(iP * nQ + iQ), (jP * nQ + jQ)} = P(iP,jP) Q(iQ,jQ)
  const int nQ = int(Q.rows());
  for (int kp = 0; kp < P.outerSize(); ++kp) {
    for (SparseMatrix::InnerIterator ip(P, kp); ip; ++ip) {
      for (int kq = 0; kq < Q.outerSize(); ++kq) {
        for (SparseMatrix::InnerIterator iq(Q, kq); iq; ++iq) {
          out.emplace_back(int(ip.row()) * nQ + int(iq.row()),
                           int(ip.col()) * nQ + int(iq.col()),
                           scale * ip.value() * iq.value());
        }
      }
    }
  }
}

Eigen::VectorXcd vec(const Matrix& rho) {
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

Matrix unvec(const Eigen::VectorXcd& v, int d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint().eval()); }

}  // namespace

void SimControl::validate() const {
  if (!(rel_tol > 0)) throw std::invalid_argument("SimControl: rel_tol must be > 0");
  if (!(t_max > 0)) throw std::invalid_argument("SimControl: t_max must be > 0");
  if (!(eps_ss > 0)) throw std::invalid_argument("SimControl: eps_ss must be > 0");
  if (omega_ratio > 0.2 && !allow_strong_drive)
    throw std::invalid_argument(
        "SimControl: Omega/kappa > 0.2 outside the weak-drive regime "
        "(set allow_strong_drive to override)");
}

Matrix Liouvillian::apply(const Matrix& rho) const {
  const int d = dims.dim();
  if (rho.rows() != d || rho.cols() != d)
    throw std::invalid_argument("Liouvillian::apply: dims mismatch");
  return unvec(super * vec(rho), d);
}

double Liouvillian::residual(const Matrix& rho) const {
  return apply(rho).cwiseAbs().sum();
}

Liouvillian build_liouvillian(const QOperator& H, const std::vector<JumpChannel>& jumps) {
  const int d = H.dims.dim();
  SparseMatrix id(d, d);
  id.setIdentity();
  const SparseMatrix h = H.sparse();
  const SparseMatrix ht = SparseMatrix(h.transpose());

  std::vector<Triplet> trips;
  const Complex mi(0.0, -1.0);
  append_kron(trips, id, h, mi);   // -i H rho
  append_kron(trips, ht, id, -mi); // +i rho H

  double total_rate = 0.0;
  for (const auto& j : jumps) {
    if (!(j.op.dims == H.dims))
      throw std::invalid_argument("build_liouvillian: jump dims mismatch");
    if (j.rate < 0) throw std::invalid_argument("build_liouvillian: negative rate");
    if (j.rate == 0.0) continue;
    total_rate += j.rate;
    const SparseMatrix l = j.op.sparse();
    const SparseMatrix lconj = l.conjugate();
    const SparseMatrix ldl = SparseMatrix(l.adjoint() * l);
    const SparseMatrix ldlt = SparseMatrix(ldl.transpose());
    append_kron(trips, lconj, l, Complex(j.rate, 0.0));
    append_kron(trips, id, ldl, Complex(-0.5 * j.rate, 0.0));
    append_kron(trips, ldlt, id, Complex(-0.5 * j.rate, 0.0));
  }

  Liouvillian out;
  out.dims = H.dims;
  out.total_rate = total_rate;
  out.super = SparseMatrix(d * d, d * d);
  out.super.setFromTriplets(trips.begin(), trips.end());
  out.super.makeCompressed();
  return out;
}

Liouvillian build_model_liouvillian(const ModelParams& p, const HilbertDims& dims) {
  const QOperator H = fock::build_hamiltonian(p, dims);
  std::vector<JumpChannel> jumps;
  jumps.push_back({fock::ladder(dims, fock::Mode::photon), p.kappa});
  if (p.gamma_m > 0)
    jumps.push_back({fock::ladder(dims, fock::Mode::phonon), p.gamma_m});
  return build_liouvillian(H, jumps);
}

DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& L, double t,
                     const SimControl& ctrl) {
  if (!(rho0.dims == L.dims)) throw std::invalid_argument("evolve: dims mismatch");
  if (t < 0) throw std::invalid_argument("evolve: t must be >= 0");
  if (t == 0.0) return rho0;
  krylov::ExpmvOptions opts;
  opts.tol = ctrl.rel_tol;
  const Eigen::VectorXcd v = krylov::expmv(L.super, vec(rho0.entries), t, opts);
  return {L.dims, hermitize(unvec(v, L.dims.dim()))};
}

DensityMatrix steady_state(const Liouvillian& L, const SimControl& ctrl,
                           SteadyStateMethod method) {
  ctrl.validate();
  if (!(L.total_rate > 0))
    throw std::invalid_argument("steady_state: no dissipation channel");
  const int d = L.dims.dim();

  if (method == SteadyStateMethod::null_space) {
    // S rho = 0 with Tr rho = 1: replace the first equation by the trace row.
    SparseMatrix A = L.super;
    std::vector<Triplet> trips;
    trips.reserve(size_t(A.nonZeros()) + d);
    for (int k = 0; k < A.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(A, k); it; ++it)
        if (it.row() != 0) trips.emplace_back(int(it.row()), int(it.col()), it.value());
    for (int i = 0; i < d; ++i) trips.emplace_back(0, i * d + i, Complex(1.0, 0.0));
    SparseMatrix M(d * d, d * d);
    M.setFromTriplets(trips.begin(), trips.end());
    M.makeCompressed();

    Eigen::SparseLU<SparseMatrix> lu(M);
    if (lu.info() != Eigen::Success)
      throw SteadyStateError("steady_state: null-space factorization failed "
                             "(possible degeneracy); fall back to time_march",
                             std::numeric_limits<double>::quiet_NaN());
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(d * d);
    b(0) = 1.0;
    const Eigen::VectorXcd x = lu.solve(b);
    DensityMatrix rho{L.dims, hermitize(unvec(x, d))};
    rho.entries /= rho.entries.trace().real();
    const double res = L.residual(rho.entries);
    if (!(res < std::max(ctrl.eps_ss, 1e-8) * L.total_rate))
      throw SteadyStateError("steady_state: null-space residual too large "
                             "(degenerate kernel?); fall back to time_march", res);
    return rho;
  }

  // Time march from the joint vacuum in chunks of a cavity lifetime.
  //
  // With gamma_m = 0 the phonon sector is purely Hamiltonian: the drive heats
  // the motion on a timescale ~ 1/Omega^2, so the residual never reaches
  // eps_ss; it plateaus once the cavity transients (rate ~ kappa/2) are gone.
  // The weak-drive answer is that quasi-steady plateau, reached by t_max.
  // Detector: accept at t_max when the residual has stopped its transient
  // decay (< 2% per lifetime); keep marching (up to 10 t_max) only while it
  // is still falling fast, so gapped models reach eps_ss exactly. Accepting
  // at a fixed t_max keeps plateau states comparable across cutoffs.
  DensityMatrix rho = fock::vacuum_state(L.dims);
  const double chunk = 1.0 / L.total_rate;
  const double t_end = ctrl.t_max / L.total_rate;
  const double t_cap = 10.0 * t_end;
  double t = 0.0;
  double res = L.residual(rho.entries);
  const double res_target = ctrl.eps_ss * L.total_rate;
  while (res >= res_target && t < t_cap) {
    rho = evolve(rho, L, chunk, ctrl);
    rho.entries /= rho.entries.trace().real();
    t += chunk;
    const double next = L.residual(rho.entries);
    const bool transient = next < 0.98 * res;
    res = next;
    if (t >= t_end - 0.5 * chunk && !transient) break;  // plateau: quasi-steady
  }
  if (res >= res_target && t >= t_cap)
    throw SteadyStateError("steady_state: time march did not converge by t_max", res);
  return rho;
}

double photon_number(const DensityMatrix& rho) {
  const QOperator n = fock::number_op(rho.dims, fock::Mode::photon);
  return fock::expectation(n, rho).real();
}

double g2_zero(const DensityMatrix& rho_ss) {
  const Matrix a = fock::ladder(rho_ss.dims, fock::Mode::photon).entries;
  const Matrix a2 = a * a;
  const double n = (a.adjoint() * a * rho_ss.entries).trace().real();
  if (!(n > 1e-300))
    throw std::runtime_error("g2_zero: vanishing photon number, g2 undefined");
  const double num = (a2.adjoint() * a2 * rho_ss.entries).trace().real();
  return num / (n * n);
}

std::vector<double> default_tau_grid(double kappa, int points, double span_kappa) {
  if (!(kappa > 0)) throw std::invalid_argument("default_tau_grid: kappa must be > 0");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = span_kappa / kappa * double(i) / double(points - 1);
  return grid;
}

CorrelationSeries g2_tau(const DensityMatrix& rho_ss, const Liouvillian& L,
                         const std::vector<double>& tau_grid, const SimControl& ctrl) {
  if (!(rho_ss.dims == L.dims)) throw std::invalid_argument("g2_tau: dims mismatch");
  if (tau_grid.empty()) throw std::invalid_argument("g2_tau: empty grid");
  for (size_t i = 1; i < tau_grid.size(); ++i)
    if (!(tau_grid[i] >= tau_grid[i - 1]) || tau_grid[0] < 0)
      throw std::invalid_argument("g2_tau: grid must be nonnegative and ascending");

  const Matrix a = fock::ladder(L.dims, fock::Mode::photon).entries;
  const Matrix num_op = a.adjoint() * a;
  const double n_ss = (num_op * rho_ss.entries).trace().real();
  if (!(n_ss > 1e-300))
    throw std::runtime_error("g2_tau: vanishing photon number, g2 undefined");

  // Quantum regression: propagate a rho_ss a' and read out <n>.
  Matrix X = a * rho_ss.entries * a.adjoint();
  krylov::ExpmvOptions opts;
  opts.tol = ctrl.rel_tol;

  CorrelationSeries out;
  out.tau = tau_grid;
  out.values.resize(tau_grid.size());
  out.dims = L.dims;
  out.ctrl = ctrl;

  const int d = L.dims.dim();
  double t_prev = 0.0;
  Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(X.data(), X.size());
  for (size_t i = 0; i < tau_grid.size(); ++i) {
    const double dt = tau_grid[i] - t_prev;
    if (dt > 0) x = krylov::expmv(L.super, x, dt, opts);
    t_prev = tau_grid[i];
    const Matrix Xi = Eigen::Map<const Matrix>(x.data(), d, d);
    out.values[i] = (num_op * Xi).trace().real() / (n_ss * n_ss);
  }
  out.g2_infinity = out.values.back();
  return out;
}

std::vector<DetuningPoint> detuning_sweep(const ModelParams& base,
                                          const std::vector<double>& delta_grid,
                                          const HilbertDims& dims, const SimControl& ctrl) {
  std::vector<DetuningPoint> out;
  out.reserve(delta_grid.size());
  for (double delta : delta_grid) {
    DetuningPoint pt;
    pt.delta_L = delta;
    try {
      ModelParams p = base;
      p.delta_L = delta;
      const Liouvillian L = build_model_liouvillian(p, dims);
      const DensityMatrix rho = steady_state(L, ctrl);
      pt.n_photon = photon_number(rho);
      pt.g2 = g2_zero(rho);
      pt.converged = true;
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    out.push_back(pt);
  }
  return out;
}

namespace {

double g2_at(const ModelParams& p, const HilbertDims& dims, const SimControl& ctrl) {
  const Liouvillian L = build_model_liouvillian(p, dims);
  return g2_zero(steady_state(L, ctrl));
}

}  // namespace

AuditReport convergence_audit(const ModelParams& p, const HilbertDims& dims,
                              const SimControl& ctrl) {
  AuditReport r;
  r.g2_base = g2_at(p, dims, ctrl);

  HilbertDims photon2 = dims;
  photon2.n_photon_max *= 2;
  r.delta_photon_cutoff = std::abs(g2_at(p, photon2, ctrl) - r.g2_base) / r.g2_base;

  HilbertDims phonon2 = dims;
  phonon2.n_phonon_max *= 2;
  r.delta_phonon_cutoff = std::abs(g2_at(p, phonon2, ctrl) - r.g2_base) / r.g2_base;

  // g2 carries a physical O(Omega^2) two-photon correction (~1e-2 relative
  // at Omega = 0.05 kappa), so the raw halved-drive shift measures that
  // correction, not convergence. Instead check that the quadratic Richardson
  // extrapolation to Omega -> 0 is stable under a further halving.
  ModelParams half = p, quarter = p;
  half.Omega *= 0.5;
  quarter.Omega *= 0.25;
  const double g2_h = g2_at(half, dims, ctrl);
  const double g2_q = g2_at(quarter, dims, ctrl);
  const double ex1 = (4.0 * g2_h - r.g2_base) / 3.0;
  const double ex2 = (4.0 * g2_q - g2_h) / 3.0;
  r.delta_drive = std::abs(ex2 - ex1) / std::abs(ex2);

  r.pass = r.delta_photon_cutoff < 1e-3 && r.delta_phonon_cutoff < 1e-3 &&
           r.delta_drive < 1e-3;
  return r;
}

double dominant_frequency(const std::vector<double>& t, const std::vector<double>& y,
                          double omega_lo, double omega_hi) {
  if (t.size() != y.size() || t.size() < 8)
    throw std::invalid_argument("dominant_frequency: need matched series, >= 8 points");
  const size_t n = t.size();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= double(n);
  const double span = t.back() - t.front();

  double best_w = omega_lo, best_p = -1.0;
  const int scan = 4000;
  for (int k = 0; k <= scan; ++k) {
    const double w = omega_lo + (omega_hi - omega_lo) * double(k) / double(scan);
    Complex s(0.0, 0.0);
    for (size_t i = 0; i < n; ++i) {
      // Hann window against spectral leakage.
      const double win = 0.5 - 0.5 * std::cos(2.0 * M_PI * (t[i] - t.front()) / span);
      s += win * (y[i] - mean) * std::exp(Complex(0.0, -w * t[i]));
    }
    const double p = std::norm(s);
    if (p > best_p) {
      best_p = p;
      best_w = w;
    }
  }
  return best_w;
}

}  // namespace amo::dynamics
