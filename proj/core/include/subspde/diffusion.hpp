#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

namespace subspde {

enum class Family { RatioPower, LogPerturbed, IteratedLog, Custom };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct Thresholds {
  double M0 = 0.0;  // onset of concavity of |rho|
  double M = 0.0;   // onset of concavity of every rho_p
  double K_M = 0.0; // sup of |rho| on (-M, M)
};

// Parameters of the closed families. Unused fields stay at their defaults.
struct CoefficientParams {
  double alpha = 0.0;
  double beta = 0.0;
  double kappa = 0.0;
  double r = 0.0;
};

// Sublinear diffusion coefficient rho. Immutable; copies share state.
//
//   RatioPower    rho(u) = |u| / (r + |u|)^(1-alpha)          alpha in [0,1), r >= 0
//   LogPerturbed  rho(u) = |u|^alpha * log(e + u^2)^(-beta)   one of three cases below
//   IteratedLog   rho(u) = |u| * exp(-beta * loglog(e+u^2)^kappa)
//   Custom        user evaluator plus declared M0
//
// LogPerturbed accepts (alpha = 0, beta < 0), (alpha in (0,1), beta real)
// and (alpha = 1, beta > 0).
class DiffusionCoefficient {
 public:
  static DiffusionCoefficient ratio_power(double alpha, double r);
  static DiffusionCoefficient log_perturbed(double alpha, double beta);
  static DiffusionCoefficient iterated_log(double beta, double kappa);
  // sup_abs, when given, declares sup|rho| < infinity and enables the
  // bounded-coefficient moment bound.
  static DiffusionCoefficient custom(std::function<double(double)> rho, double declared_M0,
                                     std::optional<double> sup_abs = std::nullopt,
                                     std::string label = "custom");
  static DiffusionCoefficient from_params(Family f, const CoefficientParams& p);

  Family family() const;
  const CoefficientParams& params() const;
  const std::string& label() const;

  double operator()(double u) const;
  // out[i] = rho(in[i]); the same values as operator() but without the
  // per-call dispatch, for the simulation inner loop.
  void apply(std::span<const double> in, std::span<double> out) const;

  double rho_p(double p, double x) const;
  const Thresholds& thresholds() const;
  // sup |rho| over the real line when it is known to be finite.
  std::optional<double> sup_abs() const;
  bool even() const;
  std::string describe() const;

  struct Impl;

 private:
  explicit DiffusionCoefficient(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

double eval_rho(const DiffusionCoefficient& c, double u);
double rho_p(const DiffusionCoefficient& c, double p, double x);
Thresholds concavity_thresholds(const DiffusionCoefficient& c);
// g_p^+(x) + g_p^-(x): centred difference of rho_p with step max(1e-6 x, 1e-9).
double subgradient_gp(const DiffusionCoefficient& c, double p, double x);

struct HypothesisReport {
  bool locally_bounded = true;
  bool sublinear = true;
  bool eventually_concave = true;
  std::string detail;
  bool ok() const { return locally_bounded && sublinear && eventually_concave; }
};

// Numerical check of local boundedness, rho(x)/x -> 0 along {1e6, 1e9, 1e12}
// and concavity of |rho| beyond M0. Does not throw.
HypothesisReport validate_coefficient(const std::function<double(double)>& rho, double M0);

}  // namespace subspde
