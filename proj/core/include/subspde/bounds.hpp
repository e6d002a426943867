#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "subspde/diffusion.hpp"
#include "subspde/envelope.hpp"
#include "subspde/initial.hpp"
#include "subspde/noise.hpp"

namespace subspde {

enum class Regime {
  Auto,                // concave when M0 = 0, general otherwise
  General,             // 2J0^2 + 2(2pi)^d (J1/h + 4 K_M^2 p h + F^{-1}(2 p h))
  Concave,             // same with M = K_M = 0
  Asymptotic,          // t >= 1: 2J0^2 + C (J1/h + F^{-1}(C p h))
  BoundedInitial,      // C_* F^{-1}(C_* p h)
  BoundedCoefficient,  // 2J0^2 + 8 p sup|rho|^2 h
};

enum class EquationKind { Heat, Wave, Fractional };

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);
std::string to_string(EquationKind e);
EquationKind equation_from_string(const std::string& s);

// The existential constants of the bounds. They default to 1 and are meant
// to be fitted or swept, never read as sharp.
struct BoundConstants {
  double C = 1.0;
  double C_star = 1.0;
  double K = 1.0;   // fractional equation
  double K1 = 1.0;  // wave equation
  std::optional<double> K2;  // wave equation, default 4 K_M^2
  double C0 = 1.0;  // scale of the fractional reference kernel
};

// Parameters of the time-fractional equation: Caputo derivative of order b
// in time, fractional Laplacian (-Delta)^{a/2} in space and a
// Riemann-Liouville integral of order gamma applied to the noise term.
struct FractionalParams {
  double a = 2.0;
  double b = 1.0;
  double gamma = 0.0;
  int d = 1;
  double sigma() const { return 2.0 * (1.0 - b - gamma) + b * d / a; }
};

struct BoundReport {
  EquationKind equation = EquationKind::Heat;
  Regime regime = Regime::General;
  double t = 0.0;
  double x = 0.0;  // first coordinate
  double p = 2.0;
  double h = 0.0;  // noise functional used (h_heat, h_wave or t^{1-sigma})
  double term_J0sq = 0.0;
  double term_J1_over_h = 0.0;
  double term_KM = 0.0;
  double term_Finv = 0.0;
  double total = 0.0;
  std::optional<double> sigma;
};

// J1 as used in the heat bound. d = 1: the closed upper bound
// 2^{3/2} pi h(t) J_+(t/2, x)^2. d >= 2: int_0^t k(t-s) E[J0(s, x + sqrt(t-s) Z)^2] ds.
double J1(const InitialCondition& mu, const CorrelationKernel& k, double t, const std::vector<double>& x);

BoundReport moment_bound_heat(const DiffusionCoefficient& rho, const CorrelationKernel& k,
                              const InitialCondition& mu, double t, const std::vector<double>& x,
                              double p, Regime regime = Regime::Auto,
                              const BoundConstants& c = {});

// J0 of the wave equation: (mu0(x+t) + mu0(x-t))/2 + int G(t, x-y) mu1(dy).
double J0_wave(const InitialCondition& mu0, const InitialCondition& mu1, double t, double x);
// Explicit upper bound 4 t k_w(2t) (t int G mu0^2 + 2 (t int G |mu1|)^2).
double J1_wave_bound(const InitialCondition& mu0, const InitialCondition& mu1, const CorrelationKernel& k,
                     double t, double x);

BoundReport moment_bound_wave(const DiffusionCoefficient& rho, const CorrelationKernel& k,
                              const InitialCondition& mu0, const InitialCondition& mu1, double t,
                              double x, double p, const BoundConstants& c = {});

// Throws PreconditionError naming the failed inequality.
void check_fractional_params(const FractionalParams& fp);

// Constant initial data only: J0 = c and J1 = c^2 C0 t^{1-sigma} / (1 - sigma).
// Regimes: Auto, General, Concave, BoundedInitial.
BoundReport moment_bound_fractional(const DiffusionCoefficient& rho, const FractionalParams& fp,
                                    const InitialCondition& mu, double t, const std::vector<double>& x,
                                    double p, Regime regime = Regime::Auto,
                                    const BoundConstants& c = {});

struct TailBound {
  double bound = 1.0;
  double L_t = 0.0;  // below this level the bound carries no information
  double h = 0.0;
};

// h(t) for the given equation. Fractional uses t^{1-sigma}.
double noise_functional(EquationKind eq, const CorrelationKernel& k, double t,
                        const FractionalParams& fp = {});

TailBound tail_bound(const DiffusionCoefficient& rho, const CorrelationKernel& k, double t, double z,
                     EquationKind eq = EquationKind::Heat, const BoundConstants& c = {},
                     const FractionalParams& fp = {});

struct LegendreResult {
  double bound = 1.0;
  double p_star = 2.0;
  double exponent = 0.0;  // sup_p (p log z - alpha(p))
};

// exp(-sup_{p in [2, p_max]} (p log z - alpha(p))), capped at 1.
LegendreResult legendre_tail(const std::function<double(double)>& moment_log, double z,
                             double p_max = 1e6);

// sqrt(F^{-1}(C h(t) log R)).
double spatial_asymptote(const DiffusionCoefficient& rho, const CorrelationKernel& k, double t, double R,
                         EquationKind eq = EquationKind::Heat, double C = 1.0,
                         const FractionalParams& fp = {});

}  // namespace subspde
