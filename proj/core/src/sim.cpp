#include "subspde/sim.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "subspde/errors.hpp"

namespace subspde {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

bool near_integer(double v) { return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v)); }

// (1/h^2) int_{-h}^{h} (h - |u|) f(|x + u|) du, written over [0, h] so that a
// singularity of f at 0 falls on an endpoint for x = 0 and x = h.
double cell_averaged_covariance(const CorrelationKernel& k, double x, double h) {
  if (k.variant() == KernelVariant::Constant) return 1.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> ts;
  auto g = [&](double u) {
    const double w = h - u;
    const double a = std::abs(x + u);
    const double b = std::abs(x - u);
    const double fa = a > 0.0 ? k.f(a) : 0.0;
    const double fb = b > 0.0 ? k.f(b) : 0.0;
    return w * (fa + fb);
  };
  return ts.integrate(g, 0.0, h, 1e-12) / (h * h);
}

}  // namespace

std::string to_string(SimEquation e) { return e == SimEquation::Heat ? "heat" : "wave"; }

std::string to_string(HeatScheme s) {
  switch (s) {
    case HeatScheme::Explicit: return "explicit";
    case HeatScheme::Implicit: return "implicit";
    case HeatScheme::Spectral: return "spectral";
  }
  return "?";
}

HeatScheme heat_scheme_from_string(const std::string& s) {
  if (s == "explicit") return HeatScheme::Explicit;
  if (s == "implicit") return HeatScheme::Implicit;
  if (s == "spectral") return HeatScheme::Spectral;
  throw SpecError("unknown heat scheme '" + s + "'");
}

double SimulationConfig::horizon() const {
  if (snapshot_times.empty()) throw SpecError("no snapshot times");
  return *std::max_element(snapshot_times.begin(), snapshot_times.end());
}

double SimulationConfig::step() const {
  if (dt > 0.0) return dt;
  const double h = dx();
  double limit = 0.0;
  if (equation == SimEquation::Wave) {
    limit = 0.5 * h;
  } else if (scheme == HeatScheme::Explicit) {
    limit = 0.5 * h * h;
  } else {
    limit = h * h;
  }
  if (snapshot_times.empty() || !(snapshot_times.front() > 0.0)) return limit;
  // shrink so that the first snapshot is a whole number of steps
  const double t1 = *std::min_element(snapshot_times.begin(), snapshot_times.end());
  return t1 / std::ceil(t1 / limit * (1.0 - 1e-12));
}

std::vector<std::size_t> SimulationConfig::snapshot_steps() const {
  const double s = step();
  std::vector<std::size_t> out;
  out.reserve(snapshot_times.size());
  for (double t : snapshot_times) {
    const double k = t / s;
    if (!near_integer(k)) {
      std::ostringstream os;
      os << "snapshot time " << t << " is not a multiple of dt = " << s;
      throw SpecError(os.str());
    }
    out.push_back(static_cast<std::size_t>(std::llround(k)));
  }
  return out;
}

void SimulationConfig::validate() const {
  if (n < 8 || n % 2 != 0) throw SpecError("grid size n must be even and at least 8");
  if (!(L > 0.0) || !std::isfinite(L)) throw SpecError("domain half-length L must be positive");
  if (paths < 1) throw SpecError("path count must be at least 1");
  if (snapshot_times.empty()) throw SpecError("empty snapshot grid");
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    if (!(snapshot_times[i] > 0.0) || !std::isfinite(snapshot_times[i]))
      throw SpecError("snapshot times must be positive and finite");
    if (i > 0 && !(snapshot_times[i] > snapshot_times[i - 1]))
      throw SpecError("snapshot times must be strictly increasing");
  }
  if (dt < 0.0 || !std::isfinite(dt)) throw SpecError("dt must be non-negative");
  const double h = dx();
  const double s = step();
  if (equation == SimEquation::Heat && scheme == HeatScheme::Explicit && s > 0.5 * h * h * (1.0 + 1e-12))
    throw PreconditionError("explicit-stability", "dt must not exceed dx^2/2 for the explicit heat stepper");
  if (equation == SimEquation::Wave) {
    if (s > h * (1.0 + 1e-12)) throw PreconditionError("cfl", "dt must not exceed dx for the wave stepper");
    if (positivity_clip) throw SpecError("positivity clipping is only available for the heat equation");
    if (init.variant() == InitialVariant::Dirac || velocity.variant() == InitialVariant::Dirac)
      throw UnsupportedError("Dirac data are not simulated for the wave equation");
  }
  (void)snapshot_steps();
  if (kernel.dim() != 1) throw UnsupportedError("simulation is one-dimensional; kernel has d != 1");
  if (kernel.variant() == KernelVariant::BesselPotential)
    throw UnsupportedError("bessel-potential noise has no pointwise covariance to sample from");
  for (double p : moment_orders)
    if (!(p > 0.0)) throw SpecError("moment orders must be positive");
  for (double R : sup_radii)
    if (!(R > 0.0) || R > L) throw SpecError("sup radii must lie in (0, L]");
  for (std::size_t lag : holder_lags)
    if (lag == 0 || lag >= n / 2) throw SpecError("holder lags must lie in [1, n/2)");
  if (batches < 2) throw SpecError("at least 2 batches are needed");
}

std::size_t PathEnsemble::snapshot_index(double t) const {
  for (std::size_t s = 0; s < times.size(); ++s)
    if (std::abs(times[s] - t) <= 1e-9 * std::max(1.0, t)) return s;
  std::ostringstream os;
  os << "no snapshot at t = " << t;
  throw SpecError(os.str());
}

// ---------------------------------------------------------------- noise

struct NoiseSampler::Impl {
  enum class Mode { White, Constant, Colored };
  Mode mode = Mode::White;
  double sqrt_dt = 0.0;
  double white_scale = 0.0;
  std::vector<double> cov;           // cell covariance per lag 0..n
  std::vector<double> sqrt_lambda;   // sqrt(lambda_j / m), length m = 2n
  std::size_t m = 0;
  fftw_complex* buf = nullptr;
  fftw_plan plan = nullptr;
  std::vector<double> spare;  // imaginary part of the last synthesis
  bool has_spare = false;

  ~Impl() {
    if (plan) {
      std::lock_guard<std::mutex> lock(fftw_plan_mutex());
      fftw_destroy_plan(plan);
    }
    if (buf) fftw_free(buf);
  }
};

NoiseSampler::NoiseSampler(const CorrelationKernel& k, double dx, double dt, std::size_t n)
    : impl_(new Impl), n_(n) {
  std::unique_ptr<Impl> guard(impl_);
  if (!(dx > 0.0) || !(dt > 0.0) || n == 0) throw SpecError("noise slice needs dx > 0, dt > 0 and n > 0");
  if (k.dim() != 1) throw UnsupportedError("noise sampling is one-dimensional");
  const DalangResult dal = dalang_check(k);
  if (!dal.ok) throw PreconditionError("dalang", dal.reason);
  Impl& s = *impl_;
  s.sqrt_dt = std::sqrt(dt);
  switch (k.variant()) {
    case KernelVariant::SpaceTimeWhite:
      s.mode = Impl::Mode::White;
      s.white_scale = std::sqrt(dt / dx);
      s.cov = {1.0 / dx};
      break;
    case KernelVariant::Constant:
      s.mode = Impl::Mode::Constant;
      s.cov = {1.0};
      break;
    case KernelVariant::BesselPotential:
      throw UnsupportedError("bessel-potential noise has no pointwise covariance to sample from");
    default: {
      s.mode = Impl::Mode::Colored;
      s.m = 2 * n;
      s.cov.resize(n + 1);
      for (std::size_t j = 0; j <= n; ++j) s.cov[j] = cell_averaged_covariance(k, static_cast<double>(j) * dx, dx);
      s.buf = fftw_alloc_complex(s.m);
      {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        s.plan = fftw_plan_dft_1d(static_cast<int>(s.m), s.buf, s.buf, FFTW_FORWARD, FFTW_ESTIMATE);
      }
      for (std::size_t j = 0; j < s.m; ++j) {
        s.buf[j][0] = j <= n ? s.cov[j] : s.cov[s.m - j];
        s.buf[j][1] = 0.0;
      }
      fftw_execute(s.plan);
      double lmax = 0.0, lmin = 0.0;
      for (std::size_t j = 0; j < s.m; ++j) {
        lmax = std::max(lmax, s.buf[j][0]);
        lmin = std::min(lmin, s.buf[j][0]);
      }
      if (lmin < -1e-10 * lmax) {
        std::ostringstream os;
        os << "circulant embedding of " << k.describe() << " has eigenvalue " << lmin << " (max " << lmax
           << "); try doubling n";
        throw EmbeddingError(os.str());
      }
      s.sqrt_lambda.resize(s.m);
      for (std::size_t j = 0; j < s.m; ++j)
        s.sqrt_lambda[j] = std::sqrt(std::max(s.buf[j][0], 0.0) / static_cast<double>(s.m));
      s.spare.resize(n);
      break;
    }
  }
  guard.release();
}

NoiseSampler::~NoiseSampler() { delete impl_; }

NoiseSampler::NoiseSampler(NoiseSampler&& o) noexcept : impl_(std::exchange(o.impl_, nullptr)), n_(o.n_) {}

void NoiseSampler::sample(NormalStream& rng, double* out) {
  Impl& s = *impl_;
  switch (s.mode) {
    case Impl::Mode::White:
      rng.fill(out, n_, s.white_scale);
      return;
    case Impl::Mode::Constant: {
      const double w = s.sqrt_dt * rng();
      std::fill(out, out + n_, w);
      return;
    }
    case Impl::Mode::Colored:
      break;
  }
  // Real and imaginary parts of one synthesis are independent copies of the
  // field; the second is handed out on the next call.
  if (s.has_spare) {
    std::copy(s.spare.begin(), s.spare.end(), out);
    s.has_spare = false;
    return;
  }
  for (std::size_t j = 0; j < s.m; ++j) {
    const double a = rng();
    const double b = rng();
    s.buf[j][0] = s.sqrt_lambda[j] * a;
    s.buf[j][1] = s.sqrt_lambda[j] * b;
  }
  fftw_execute(s.plan);
  for (std::size_t i = 0; i < n_; ++i) {
    out[i] = s.sqrt_dt * s.buf[i][0];
    s.spare[i] = s.sqrt_dt * s.buf[i][1];
  }
  s.has_spare = true;
}

double NoiseSampler::cell_covariance(std::size_t lag) const {
  const Impl& s = *impl_;
  if (s.mode == Impl::Mode::White) return lag == 0 ? s.cov[0] : 0.0;
  if (s.mode == Impl::Mode::Constant) return 1.0;
  if (lag > n_) throw DomainError("lag beyond the embedded range");
  return s.cov[lag];
}

std::vector<double> sample_noise_increment(const CorrelationKernel& k, double dx, double dt, std::size_t n,
                                           NormalStream& rng) {
  NoiseSampler sampler(k, dx, dt, n);
  std::vector<double> out(n);
  sampler.sample(rng, out.data());
  return out;
}

// ---------------------------------------------------------------- steppers

namespace {

// Backward Euler for u_t = (1/2) Delta_h u on a periodic grid: solves
// (1 + 2a) v_i - a v_{i-1} - a v_{i+1} = r_i with a = dt / (2 dx^2), by the
// Thomas algorithm plus a Sherman-Morrison correction for the corners.
class CyclicSolver {
 public:
  CyclicSolver(std::size_t n, double a) : n_(n), a_(a), cp_(n), inv_(n), z_(n), y_(n) {
    const double b = 1.0 + 2.0 * a;
    const double off = -a;
    gamma_ = -b;
    // modified diagonal
    std::vector<double> diag(n, b);
    diag[0] = b - gamma_;
    diag[n - 1] = b - off * off / gamma_;
    inv_[0] = 1.0 / diag[0];
    cp_[0] = off * inv_[0];
    for (std::size_t i = 1; i < n; ++i) {
      inv_[i] = 1.0 / (diag[i] - off * cp_[i - 1]);
      cp_[i] = off * inv_[i];
    }
    std::vector<double> rhs(n, 0.0);
    rhs[0] = gamma_;
    rhs[n - 1] = off;
    thomas(rhs.data(), z_.data());
    vz_ = z_[0] + off / gamma_ * z_[n - 1];
  }

  // x may alias r.
  void solve(const double* r, double* x) {
    thomas(r, y_.data());
    const double off = -a_;
    const double fact = (y_[0] + off / gamma_ * y_[n_ - 1]) / (1.0 + vz_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = y_[i] - fact * z_[i];
  }

 private:
  void thomas(const double* r, double* out) const {
    const double off = -a_;
    out[0] = r[0] * inv_[0];
    for (std::size_t i = 1; i < n_; ++i) out[i] = (r[i] - off * out[i - 1]) * inv_[i];
    for (std::size_t i = n_ - 1; i-- > 0;) out[i] -= cp_[i] * out[i + 1];
  }

  std::size_t n_;
  double a_;
  double gamma_ = 0.0;
  double vz_ = 0.0;
  std::vector<double> cp_, inv_, z_, y_;
};

class SpectralPropagator {
 public:
  SpectralPropagator(std::size_t n, double L, double dt) : n_(n), mult_(n / 2 + 1) {
    real_ = fftw_alloc_real(n);
    spec_ = fftw_alloc_complex(n / 2 + 1);
    {
      std::lock_guard<std::mutex> lock(fftw_plan_mutex());
      fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, spec_, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_, real_, FFTW_ESTIMATE);
    }
    for (std::size_t j = 0; j <= n / 2; ++j) {
      const double kj = std::numbers::pi * static_cast<double>(j) / L;
      mult_[j] = std::exp(-0.5 * kj * kj * dt) / static_cast<double>(n);
    }
  }
  ~SpectralPropagator() {
    {
      std::lock_guard<std::mutex> lock(fftw_plan_mutex());
      fftw_destroy_plan(fwd_);
      fftw_destroy_plan(bwd_);
    }
    fftw_free(real_);
    fftw_free(spec_);
  }
  SpectralPropagator(const SpectralPropagator&) = delete;
  SpectralPropagator& operator=(const SpectralPropagator&) = delete;

  void apply(double* u) {
    std::copy(u, u + n_, real_);
    fftw_execute(fwd_);
    for (std::size_t j = 0; j < mult_.size(); ++j) {
      spec_[j][0] *= mult_[j];
      spec_[j][1] *= mult_[j];
    }
    fftw_execute(bwd_);
    std::copy(real_, real_ + n_, u);
  }

 private:
  std::size_t n_;
  std::vector<double> mult_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

double signed_power(double u, double p) {
  if (p == 1.0) return u;
  if (p == 2.0) return u * u;
  if (p == 3.0) return u * u * u;
  if (p == 4.0) {
    const double s = u * u;
    return s * s;
  }
  if (std::floor(p) == p) return std::pow(u, p);
  return std::pow(std::abs(u), p);
}

std::vector<double> initial_field(const InitialCondition& mu, const SimulationConfig& cfg) {
  std::vector<double> u(cfg.n);
  const double h = cfg.dx();
  for (std::size_t i = 0; i < cfg.n; ++i) u[i] = mu.cell_average(cfg.x_at(i), h);
  return u;
}

// Discrete Laplacian of a periodic field.
inline void laplacian(const std::vector<double>& u, std::vector<double>& out, double inv_h2) {
  const std::size_t n = u.size();
  out[0] = (u[n - 1] - 2.0 * u[0] + u[1]) * inv_h2;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2;
  out[n - 1] = (u[n - 2] - 2.0 * u[n - 1] + u[0]) * inv_h2;
}

struct Recorder {
  const SimulationConfig& cfg;
  std::size_t S, P, R, Z, H;
  std::vector<std::pair<std::size_t, std::size_t>> radius_ranges;

  explicit Recorder(const SimulationConfig& c)
      : cfg(c),
        S(c.snapshot_times.size()),
        P(c.moment_orders.size()),
        R(c.sup_radii.size()),
        Z(c.tail_levels.size()),
        H(c.holder_lags.size()) {
    const double h = c.dx();
    for (double rad : c.sup_radii) {
      const auto k = static_cast<std::size_t>(std::floor(rad / h + 1e-9));
      const std::size_t lo = c.centre() >= k ? c.centre() - k : 0;
      const std::size_t hi = std::min(c.n - 1, c.centre() + k);
      radius_ranges.emplace_back(lo, hi);
    }
  }

  PathRecord blank() const {
    PathRecord r;
    r.centre.assign(S, 0.0);
    r.cell_power_mean.assign(S * P, 0.0);
    r.sup.assign(S * R, 0.0);
    r.cell_exceed.assign(S * Z, 0.0);
    r.increment_sq.assign(S * H, 0.0);
    r.field_min.assign(S, 0.0);
    return r;
  }

  void record(PathRecord& rec, std::size_t s, const std::vector<double>& u) const {
    const std::size_t n = u.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    rec.centre[s] = u[cfg.centre()];
    for (std::size_t q = 0; q < P; ++q) {
      const double p = cfg.moment_orders[q];
      double acc = 0.0;
      for (double v : u) acc += signed_power(v, p);
      rec.cell_power_mean[s * P + q] = acc * inv_n;
    }
    for (std::size_t r = 0; r < R; ++r) {
      const auto [lo, hi] = radius_ranges[r];
      rec.sup[s * R + r] = *std::max_element(u.begin() + static_cast<std::ptrdiff_t>(lo),
                                             u.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    }
    for (std::size_t z = 0; z < Z; ++z) {
      const double level = cfg.tail_levels[z];
      std::size_t count = 0;
      for (double v : u) count += v >= level ? 1 : 0;
      rec.cell_exceed[s * Z + z] = static_cast<double>(count) * inv_n;
    }
    for (std::size_t l = 0; l < H; ++l) {
      const std::size_t lag = cfg.holder_lags[l];
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = u[(i + lag) % n] - u[i];
        acc += d * d;
      }
      rec.increment_sq[s * H + l] = acc * inv_n;
    }
    rec.field_min[s] = *std::min_element(u.begin(), u.end());
  }
};

bool all_finite(const std::vector<double>& u) {
  double acc = 0.0;
  for (double v : u) acc += v * 0.0;
  return acc == 0.0;
}

struct PathOutput {
  PathRecord rec;
  std::vector<std::vector<double>> raw;
};

// Runs every path through `run(i, sampler)`, spreading them over threads.
// Results land in slot i so the ensemble does not depend on the schedule.
template <class Run>
PathEnsemble run_paths(const SimulationConfig& cfg, Run run) {
  cfg.validate();
  PathEnsemble ens;
  ens.config = cfg;
  ens.times = cfg.snapshot_times;
  ens.dt = cfg.step();
  ens.dx = cfg.dx();
  std::vector<PathOutput> out(cfg.paths);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads =
      static_cast<unsigned>(std::min<std::size_t>(cfg.paths, cfg.threads == 0 ? hw : cfg.threads));
  // Build one sampler up front so that spec errors surface on the calling thread.
  NoiseSampler first(cfg.kernel, ens.dx, ens.dt, cfg.n);

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  auto worker = [&](NoiseSampler* given) {
    try {
      std::unique_ptr<NoiseSampler> own;
      NoiseSampler* sampler = given;
      if (!sampler) {
        own = std::make_unique<NoiseSampler>(cfg.kernel, ens.dx, ens.dt, cfg.n);
        sampler = own.get();
      }
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cfg.paths) break;
        out[i] = run(i, *sampler);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!err) err = std::current_exception();
      next.store(cfg.paths);
    }
  };
  if (nthreads <= 1) {
    worker(&first);
  } else {
    std::vector<std::thread> pool;
    pool.emplace_back(worker, &first);
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker, nullptr);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);

  ens.paths.reserve(cfg.paths);
  for (std::size_t i = 0; i < cfg.paths; ++i) {
    if (out[i].rec.aborted) ens.aborted.push_back(i);
    if (i == 0 && cfg.keep_path0) ens.path0 = std::move(out[i].raw);
    ens.paths.push_back(std::move(out[i].rec));
  }
  return ens;
}

}  // namespace

PathEnsemble simulate_heat(const SimulationConfig& cfg) {
  if (cfg.equation != SimEquation::Heat) throw SpecError("simulate_heat needs equation = heat");
  cfg.validate();
  const std::vector<double> u0 = initial_field(cfg.init, cfg);
  const std::vector<std::size_t> steps = cfg.snapshot_steps();
  const double dt = cfg.step();
  const double h = cfg.dx();
  const Recorder recorder(cfg);

  return run_paths(cfg, [&](std::size_t path, NoiseSampler& sampler) {
    PathOutput po;
    po.rec = recorder.blank();
    NormalStream rng(cfg.seed, path);
    std::vector<double> u = u0, w(cfg.n), r(cfg.n), tmp(cfg.n);
    std::unique_ptr<CyclicSolver> solver;
    std::unique_ptr<SpectralPropagator> spectral;
    if (cfg.scheme == HeatScheme::Implicit) solver = std::make_unique<CyclicSolver>(cfg.n, 0.5 * dt / (h * h));
    if (cfg.scheme == HeatScheme::Spectral) spectral = std::make_unique<SpectralPropagator>(cfg.n, cfg.L, dt);
    const double lam = 0.5 * dt / (h * h);
    const std::size_t n = cfg.n;

    std::size_t k = 0;
    for (std::size_t s = 0; s < steps.size(); ++s) {
      for (; k < steps[s]; ++k) {
        sampler.sample(rng, w.data());
        cfg.coeff.apply(u, r);
        switch (cfg.scheme) {
          case HeatScheme::Explicit:
            tmp[0] = u[0] + lam * (u[n - 1] - 2.0 * u[0] + u[1]) + r[0] * w[0];
            for (std::size_t i = 1; i + 1 < n; ++i)
              tmp[i] = u[i] + lam * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + r[i] * w[i];
            tmp[n - 1] = u[n - 1] + lam * (u[n - 2] - 2.0 * u[n - 1] + u[0]) + r[n - 1] * w[n - 1];
            u.swap(tmp);
            break;
          case HeatScheme::Implicit:
            for (std::size_t i = 0; i < n; ++i) u[i] += r[i] * w[i];
            solver->solve(u.data(), u.data());
            break;
          case HeatScheme::Spectral:
            for (std::size_t i = 0; i < n; ++i) u[i] += r[i] * w[i];
            spectral->apply(u.data());
            break;
        }
        if (cfg.positivity_clip)
          for (double& v : u) v = std::max(v, 0.0);
        if ((k & 63u) == 63u && !all_finite(u)) {
          po.rec.aborted = true;
          po.rec.abort_time = static_cast<double>(k + 1) * dt;
          return po;
        }
      }
      if (!all_finite(u)) {
        po.rec.aborted = true;
        po.rec.abort_time = static_cast<double>(k) * dt;
        return po;
      }
      recorder.record(po.rec, s, u);
      if (path == 0 && cfg.keep_path0) po.raw.push_back(u);
    }
    return po;
  });
}

PathEnsemble simulate_wave(const SimulationConfig& cfg) {
  if (cfg.equation != SimEquation::Wave) throw SpecError("simulate_wave needs equation = wave");
  cfg.validate();
  const std::vector<double> u0 = initial_field(cfg.init, cfg);
  const std::vector<double> v0 = initial_field(cfg.velocity, cfg);
  const std::vector<std::size_t> steps = cfg.snapshot_steps();
  const double dt = cfg.step();
  const double h = cfg.dx();
  const double inv_h2 = 1.0 / (h * h);
  const Recorder recorder(cfg);

  // staggered velocity at -dt/2 so that the centred average at 0 is mu1
  std::vector<double> vhalf(cfg.n);
  {
    std::vector<double> lap(cfg.n);
    laplacian(u0, lap, inv_h2);
    for (std::size_t i = 0; i < cfg.n; ++i) vhalf[i] = v0[i] - 0.5 * dt * lap[i];
  }

  return run_paths(cfg, [&](std::size_t path, NoiseSampler& sampler) {
    PathOutput po;
    po.rec = recorder.blank();
    NormalStream rng(cfg.seed, path);
    std::vector<double> u = u0, v = vhalf, w(cfg.n), r(cfg.n), lap(cfg.n);
    std::size_t k = 0;
    for (std::size_t s = 0; s < steps.size(); ++s) {
      for (; k < steps[s]; ++k) {
        sampler.sample(rng, w.data());
        cfg.coeff.apply(u, r);
        laplacian(u, lap, inv_h2);
        for (std::size_t i = 0; i < cfg.n; ++i) {
          v[i] += dt * lap[i] + r[i] * w[i];
          u[i] += dt * v[i];
        }
        if ((k & 63u) == 63u && !all_finite(u)) {
          po.rec.aborted = true;
          po.rec.abort_time = static_cast<double>(k + 1) * dt;
          return po;
        }
      }
      if (!all_finite(u)) {
        po.rec.aborted = true;
        po.rec.abort_time = static_cast<double>(k) * dt;
        return po;
      }
      recorder.record(po.rec, s, u);
      if (path == 0 && cfg.keep_path0) po.raw.push_back(u);
    }
    return po;
  });
}

PathEnsemble simulate(const SimulationConfig& cfg) {
  return cfg.equation == SimEquation::Heat ? simulate_heat(cfg) : simulate_wave(cfg);
}

}  // namespace subspde
