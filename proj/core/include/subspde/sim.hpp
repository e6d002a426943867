#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "subspde/diffusion.hpp"
#include "subspde/initial.hpp"
#include "subspde/noise.hpp"
#include "subspde/rng.hpp"

namespace subspde {

enum class SimEquation { Heat, Wave };
// Explicit: forward Euler for the discrete Laplacian, needs dt <= dx^2/2.
// Implicit: backward Euler (periodic tridiagonal solve), unconditionally stable.
// Spectral: exact periodic heat semigroup through FFT.
enum class HeatScheme { Explicit, Implicit, Spectral };

std::string to_string(SimEquation e);
std::string to_string(HeatScheme s);
HeatScheme heat_scheme_from_string(const std::string& s);

struct SimulationConfig {
  SimEquation equation = SimEquation::Heat;
  HeatScheme scheme = HeatScheme::Implicit;
  double L = 12.8;       // domain [-L, L), periodic
  std::size_t n = 512;   // cells, dx = 2L/n
  double dt = 0.0;       // 0 picks the default step for the scheme
  std::vector<double> snapshot_times{1.0};
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  CorrelationKernel kernel = CorrelationKernel::white(1);
  DiffusionCoefficient coeff = DiffusionCoefficient::ratio_power(0.5, 0.0);
  InitialCondition init = InitialCondition::constant(1.0);
  InitialCondition velocity = InitialCondition::constant(0.0);  // wave only
  bool positivity_clip = false;
  std::vector<double> moment_orders{1.0, 2.0, 3.0};
  std::vector<double> sup_radii{};
  std::vector<double> tail_levels{};
  std::vector<std::size_t> holder_lags{1, 2, 4, 8, 16, 32};
  std::size_t batches = 20;
  unsigned threads = 1;
  bool keep_path0 = false;  // raw snapshots of path 0 for the binary dump

  double dx() const { return 2.0 * L / static_cast<double>(n); }
  double x_at(std::size_t i) const { return -L + dx() * static_cast<double>(i); }
  std::size_t centre() const { return n / 2; }  // the grid point x = 0
  double horizon() const;
  // Resolved time step (dt or the stability limit) and step count per snapshot.
  double step() const;
  std::vector<std::size_t> snapshot_steps() const;
  // Throws SpecError / PreconditionError describing the first violated invariant.
  void validate() const;
};

// Per-path, per-snapshot record. All sums run over the n cells.
struct PathRecord {
  bool aborted = false;
  double abort_time = 0.0;
  std::vector<double> centre;               // [snapshot]
  std::vector<double> cell_power_mean;      // [snapshot][order], mean over cells of u^p
  std::vector<double> sup;                  // [snapshot][radius]
  std::vector<double> cell_exceed;          // [snapshot][level], fraction of cells with u >= z
  std::vector<double> increment_sq;         // [snapshot][lag], mean over cells of (u(x+lag)-u(x))^2
  std::vector<double> field_min;            // [snapshot]
};

struct PathEnsemble {
  SimulationConfig config;
  std::vector<double> times;
  std::vector<PathRecord> paths;
  std::vector<std::size_t> aborted;       // indices of aborted paths
  std::vector<std::vector<double>> path0; // raw fields of path 0 per snapshot
  double dt = 0.0;
  double dx = 0.0;

  std::size_t snapshot_index(double t) const;
  std::size_t live_paths() const { return paths.size() - aborted.size(); }
};

// One noise slice: Cov(W_i, W_j) = dt C_f(x_i - x_j), C_f the cell-averaged
// covariance of the kernel.
class NoiseSampler {
 public:
  NoiseSampler(const CorrelationKernel& k, double dx, double dt, std::size_t n);
  ~NoiseSampler();
  NoiseSampler(NoiseSampler&&) noexcept;
  NoiseSampler(const NoiseSampler&) = delete;
  NoiseSampler& operator=(const NoiseSampler&) = delete;

  void sample(NormalStream& rng, double* out);
  // C_f(k dx) for lag k; for white noise 1/dx at lag 0.
  double cell_covariance(std::size_t lag) const;
  std::size_t size() const { return n_; }

 private:
  struct Impl;
  Impl* impl_;
  std::size_t n_;
};

std::vector<double> sample_noise_increment(const CorrelationKernel& k, double dx, double dt, std::size_t n,
                                           NormalStream& rng);

PathEnsemble simulate_heat(const SimulationConfig& cfg);
PathEnsemble simulate_wave(const SimulationConfig& cfg);
PathEnsemble simulate(const SimulationConfig& cfg);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct MomentRow {
  double t = 0.0;
  double p = 0.0;
  Estimate point;   // E[u(t,0)^p]
  Estimate pooled;  // E[u(t,x)^p] averaged over x (stationary when the data are constant)
};

struct GrowthFit {
  double p = 0.0;
  double slope = 0.0;         // from the point estimates
  double intercept = 0.0;
  double pooled_slope = 0.0;  // from the cell-pooled estimates, NaN when p is not recorded
  bool exponential = false;   // regression against t instead of log t
};

struct MomentTable {
  std::vector<MomentRow> rows;
  std::vector<GrowthFit> growth;  // one per p
};

// Integer p uses u^p, other p use |u|^p. Every requested p must be one of
// config.moment_orders for the pooled column; the point column works for any p.
MomentTable estimate_moments(const PathEnsemble& ens, const std::vector<double>& ps,
                             bool exponential_growth = false);

// Central moments E[(u - E u)^k] at x = 0 for k = 2, 3 with batch-mean errors.
std::vector<MomentRow> estimate_central_moments(const PathEnsemble& ens, const std::vector<int>& ks);

struct TailRow {
  double t = 0.0;
  double z = 0.0;
  std::size_t count = 0;
  std::size_t total = 0;
  double frequency = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  bool censored = false;                // fewer than 10 exceedances
  std::optional<Estimate> pooled;       // cell-pooled frequency when z is a configured level
};

std::vector<TailRow> estimate_tail(const PathEnsemble& ens, double t, const std::vector<double>& z_grid);

struct SupRow {
  double t = 0.0;
  double R = 0.0;
  Estimate mean;
  double median = 0.0;
  double q90 = 0.0;
};

std::vector<SupRow> estimate_spatial_sup(const PathEnsemble& ens, double t, const std::vector<double>& R_grid);

struct HolderFit {
  double slope = 0.0;  // regression slope of log E|du|^2 against log delta
  double eta2 = 0.0;   // slope / 2
  double r2 = 0.0;
  std::vector<double> lags;  // in space units
  std::vector<double> mean_sq;
};

HolderFit estimate_holder(const PathEnsemble& ens, double t);

// Batch-mean standard error of values[i] grouped into `batches` contiguous blocks.
Estimate batch_mean(const std::vector<double>& values, std::size_t batches);

// Least-squares slope and intercept of y against x.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

void write_ensemble_csv(const PathEnsemble& ens, std::ostream& os);
// Header "SSPD", u32 version, u64 n, u64 n_snapshots, f64 dx, f64 dt, then
// n_snapshots f64 times and n_snapshots * n f64 values, all little-endian.
void write_snapshot_binary(const PathEnsemble& ens, std::ostream& os);

}  // namespace subspde
