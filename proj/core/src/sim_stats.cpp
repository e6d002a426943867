#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <ostream>
#include <sstream>

#include "subspde/errors.hpp"
#include "subspde/sim.hpp"

namespace subspde {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kWilsonZ = 1.959963984540054;  // two-sided 95%

std::vector<std::size_t> live_indices(const PathEnsemble& ens) {
  std::vector<std::size_t> out;
  out.reserve(ens.paths.size());
  for (std::size_t i = 0; i < ens.paths.size(); ++i)
    if (!ens.paths[i].aborted) out.push_back(i);
  return out;
}

std::size_t batch_count(const PathEnsemble& ens, std::size_t live) {
  const std::size_t b = std::min(ens.config.batches, live);
  if (b < 2) throw EstimatorError("fewer than 2 batches available for standard errors");
  return b;
}

double power_of(double u, double p) {
  if (std::floor(p) == p) return std::pow(u, p);
  return std::pow(std::abs(u), p);
}

std::optional<std::size_t> find_close(const std::vector<double>& grid, double v) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i] - v) <= 1e-12 * std::max(1.0, std::abs(v))) return i;
  return std::nullopt;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

Estimate batch_mean(const std::vector<double>& values, std::size_t batches) {
  if (batches < 2) throw EstimatorError("batch means need at least 2 batches");
  const std::size_t n = values.size();
  if (n < batches) throw EstimatorError("fewer values than batches");
  std::vector<double> means(batches);
  double total = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * n / batches, hi = (b + 1) * n / batches;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += values[i];
    total += acc;
    means[b] = acc / static_cast<double>(hi - lo);
  }
  const double mean = total / static_cast<double>(n);
  double bm = 0.0;
  for (double m : means) bm += m;
  bm /= static_cast<double>(batches);
  double ss = 0.0;
  for (double m : means) ss += (m - bm) * (m - bm);
  const double var = ss / static_cast<double>(batches - 1);
  return {mean, std::sqrt(var / static_cast<double>(batches))};
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw EstimatorError("linear fit needs at least 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw EstimatorError("linear fit needs distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

MomentTable estimate_moments(const PathEnsemble& ens, const std::vector<double>& ps, bool exponential_growth) {
  const auto live = live_indices(ens);
  const std::size_t B = batch_count(ens, live.size());
  const auto& cfg = ens.config;
  const std::size_t P = cfg.moment_orders.size();
  MomentTable table;
  std::vector<double> vals(live.size());
  for (double p : ps) {
    const auto q = find_close(cfg.moment_orders, p);
    std::vector<double> xs, ys, ys_pooled;
    for (std::size_t s = 0; s < ens.times.size(); ++s) {
      MomentRow row;
      row.t = ens.times[s];
      row.p = p;
      for (std::size_t j = 0; j < live.size(); ++j) vals[j] = power_of(ens.paths[live[j]].centre[s], p);
      row.point = batch_mean(vals, B);
      if (q) {
        for (std::size_t j = 0; j < live.size(); ++j) vals[j] = ens.paths[live[j]].cell_power_mean[s * P + *q];
        row.pooled = batch_mean(vals, B);
      } else {
        row.pooled = {kNaN, kNaN};
      }
      table.rows.push_back(row);
      xs.push_back(exponential_growth ? row.t : std::log(row.t));
      ys.push_back(row.point.value > 0.0 ? std::log(row.point.value) : kNaN);
      ys_pooled.push_back(row.pooled.value > 0.0 ? std::log(row.pooled.value) : kNaN);
    }
    GrowthFit fit;
    fit.p = p;
    fit.exponential = exponential_growth;
    fit.slope = fit.intercept = fit.pooled_slope = kNaN;
    auto finite = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
    };
    if (xs.size() >= 2) {
      if (finite(ys)) std::tie(fit.slope, fit.intercept) = linear_fit(xs, ys);
      if (finite(ys_pooled)) fit.pooled_slope = linear_fit(xs, ys_pooled).first;
    }
    table.growth.push_back(fit);
  }
  return table;
}

std::vector<MomentRow> estimate_central_moments(const PathEnsemble& ens, const std::vector<int>& ks) {
  const auto live = live_indices(ens);
  const std::size_t B = batch_count(ens, live.size());
  std::vector<MomentRow> out;
  std::vector<double> centred(live.size());
  for (std::size_t s = 0; s < ens.times.size(); ++s) {
    double mean = 0.0;
    for (std::size_t j = 0; j < live.size(); ++j) mean += ens.paths[live[j]].centre[s];
    mean /= static_cast<double>(live.size());
    for (int k : ks) {
      if (k < 1) throw EstimatorError("central moment order must be at least 1");
      for (std::size_t j = 0; j < live.size(); ++j)
        centred[j] = std::pow(ens.paths[live[j]].centre[s] - mean, k);
      MomentRow row;
      row.t = ens.times[s];
      row.p = k;
      row.point = batch_mean(centred, B);
      row.pooled = {kNaN, kNaN};
      out.push_back(row);
    }
  }
  return out;
}

std::vector<TailRow> estimate_tail(const PathEnsemble& ens, double t, const std::vector<double>& z_grid) {
  if (z_grid.empty()) throw EstimatorError("empty z grid");
  const std::size_t s = ens.snapshot_index(t);
  const auto live = live_indices(ens);
  if (live.empty()) throw EstimatorError("no live paths");
  const auto& cfg = ens.config;
  const std::size_t Z = cfg.tail_levels.size();
  std::vector<TailRow> out;
  for (double z : z_grid) {
    TailRow row;
    row.t = t;
    row.z = z;
    row.total = live.size();
    for (std::size_t i : live) row.count += ens.paths[i].centre[s] >= z ? 1 : 0;
    const double n = static_cast<double>(row.total);
    const double f = static_cast<double>(row.count) / n;
    row.frequency = f;
    const double z2 = kWilsonZ * kWilsonZ;
    const double centre = (f + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = kWilsonZ * std::sqrt(f * (1.0 - f) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    row.wilson_lo = std::max(0.0, centre - half);
    row.wilson_hi = std::min(1.0, centre + half);
    row.censored = row.count < 10;
    if (const auto q = find_close(cfg.tail_levels, z); q && live.size() >= 2) {
      std::vector<double> vals(live.size());
      for (std::size_t j = 0; j < live.size(); ++j) vals[j] = ens.paths[live[j]].cell_exceed[s * Z + *q];
      row.pooled = batch_mean(vals, std::min(cfg.batches, live.size()));
    }
    out.push_back(row);
  }
  return out;
}

std::vector<SupRow> estimate_spatial_sup(const PathEnsemble& ens, double t, const std::vector<double>& R_grid) {
  if (R_grid.empty()) throw EstimatorError("empty R grid");
  const std::size_t s = ens.snapshot_index(t);
  const auto live = live_indices(ens);
  const std::size_t B = batch_count(ens, live.size());
  const auto& cfg = ens.config;
  const std::size_t R = cfg.sup_radii.size();
  std::vector<SupRow> out;
  std::vector<double> vals(live.size());
  for (double rad : R_grid) {
    if (rad > cfg.L) throw SpecError("sup radius exceeds the domain half-length");
    const auto q = find_close(cfg.sup_radii, rad);
    if (!q) {
      std::ostringstream os;
      os << "radius " << rad << " was not recorded; add it to sup_radii";
      throw SpecError(os.str());
    }
    for (std::size_t j = 0; j < live.size(); ++j) vals[j] = ens.paths[live[j]].sup[s * R + *q];
    SupRow row;
    row.t = t;
    row.R = rad;
    row.mean = batch_mean(vals, B);
    row.median = quantile(vals, 0.5);
    row.q90 = quantile(vals, 0.9);
    out.push_back(row);
  }
  return out;
}

HolderFit estimate_holder(const PathEnsemble& ens, double t) {
  const std::size_t s = ens.snapshot_index(t);
  const auto live = live_indices(ens);
  if (live.empty()) throw EstimatorError("no live paths");
  const auto& cfg = ens.config;
  const std::size_t H = cfg.holder_lags.size();
  if (H < 3) throw EstimatorError("holder regression needs at least 3 lags");
  HolderFit fit;
  std::vector<double> lx, ly;
  double scale = 0.0;
  for (std::size_t i : live) scale = std::max(scale, std::abs(ens.paths[i].field_min[s]));
  for (std::size_t l = 0; l < H; ++l) {
    double acc = 0.0;
    for (std::size_t i : live) acc += ens.paths[i].increment_sq[s * H + l];
    acc /= static_cast<double>(live.size());
    fit.lags.push_back(static_cast<double>(cfg.holder_lags[l]) * ens.dx);
    fit.mean_sq.push_back(acc);
  }
  const double top = *std::max_element(fit.mean_sq.begin(), fit.mean_sq.end());
  if (!(top > 1e-24 * std::max(1.0, scale * scale)))
    throw EstimatorError("flat increments: the field has no rough spatial structure to regress");
  for (std::size_t l = 0; l < H; ++l) {
    if (!(fit.mean_sq[l] > 0.0)) throw EstimatorError("flat increments at some lag");
    lx.push_back(std::log(fit.lags[l]));
    ly.push_back(std::log(fit.mean_sq[l]));
  }
  const auto [slope, icpt] = linear_fit(lx, ly);
  double ss_res = 0.0, ss_tot = 0.0, my = 0.0;
  for (double y : ly) my += y;
  my /= static_cast<double>(ly.size());
  for (std::size_t l = 0; l < ly.size(); ++l) {
    const double r = ly[l] - (icpt + slope * lx[l]);
    ss_res += r * r;
    ss_tot += (ly[l] - my) * (ly[l] - my);
  }
  fit.slope = slope;
  fit.eta2 = 0.5 * slope;
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return fit;
}

void write_ensemble_csv(const PathEnsemble& ens, std::ostream& os) {
  const auto& cfg = ens.config;
  const auto live = live_indices(ens);
  const bool have_se = std::min(cfg.batches, live.size()) >= 2;
  const std::size_t B = std::min(cfg.batches, live.size());
  auto est = [&](const std::vector<double>& v) -> Estimate {
    if (!have_se) {
      if (v.empty()) return {kNaN, kNaN};
      return {v.front(), kNaN};
    }
    return batch_mean(v, B);
  };
  auto row = [&](const char* stat, double t, double param, Estimate e) {
    os << stat << ',' << t << ',' << param << ',' << e.value << ',' << e.se << '\n';
  };
  os.precision(17);
  os << "statistic,t,param,value,se\n";
  const std::size_t P = cfg.moment_orders.size(), R = cfg.sup_radii.size(), Z = cfg.tail_levels.size(),
                    H = cfg.holder_lags.size();
  std::vector<double> v(live.size());
  auto gather = [&](auto get) {
    for (std::size_t j = 0; j < live.size(); ++j) v[j] = get(ens.paths[live[j]]);
    return est(v);
  };
  for (std::size_t s = 0; s < ens.times.size(); ++s) {
    const double t = ens.times[s];
    for (std::size_t q = 0; q < P; ++q) {
      const double p = cfg.moment_orders[q];
      row("moment_point", t, p, gather([&](const PathRecord& r) { return power_of(r.centre[s], p); }));
      row("moment_pooled", t, p, gather([&](const PathRecord& r) { return r.cell_power_mean[s * P + q]; }));
    }
    for (std::size_t r = 0; r < R; ++r)
      row("sup_mean", t, cfg.sup_radii[r], gather([&](const PathRecord& pr) { return pr.sup[s * R + r]; }));
    for (std::size_t z = 0; z < Z; ++z) {
      const double level = cfg.tail_levels[z];
      row("tail_point", t, level,
          gather([&](const PathRecord& pr) { return pr.centre[s] >= level ? 1.0 : 0.0; }));
      row("tail_pooled", t, level, gather([&](const PathRecord& pr) { return pr.cell_exceed[s * Z + z]; }));
    }
    for (std::size_t l = 0; l < H; ++l)
      row("increment_sq", t, static_cast<double>(cfg.holder_lags[l]) * ens.dx,
          gather([&](const PathRecord& pr) { return pr.increment_sq[s * H + l]; }));
    row("field_min", t, 0.0, gather([&](const PathRecord& pr) { return pr.field_min[s]; }));
  }
  row("aborted_paths", ens.times.empty() ? 0.0 : ens.times.back(), 0.0,
      {static_cast<double>(ens.aborted.size()), 0.0});
}

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

}  // namespace

void write_snapshot_binary(const PathEnsemble& ens, std::ostream& os) {
  if (ens.path0.empty()) throw SpecError("no raw snapshots recorded; enable keep_path0");
  os.write("SSPD", 4);
  put_le<std::uint32_t>(os, 1u);
  put_le<std::uint64_t>(os, ens.config.n);
  put_le<std::uint64_t>(os, ens.path0.size());
  put_le<double>(os, ens.dx);
  put_le<double>(os, ens.dt);
  for (std::size_t s = 0; s < ens.path0.size(); ++s) put_le<double>(os, ens.times[s]);
  for (const auto& field : ens.path0)
    for (double x : field) put_le<double>(os, x);
}

}  // namespace subspde
