#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace subspde {

enum class InitialVariant { Constant, Dirac, PowerLaw, Exponential, Custom };

std::string to_string(InitialVariant v);
InitialVariant initial_variant_from_string(const std::string& s);

// Initial measure mu. PowerLaw is the density |x|^{-ell}, Exponential is
// e^{ell |x|}, Dirac puts `mass` at the origin, Custom is a density on the
// line (d = 1 only).
class InitialCondition {
 public:
  static InitialCondition constant(double c);
  static InitialCondition dirac(double mass = 1.0);
  static InitialCondition power_law(double ell);
  static InitialCondition exponential(double ell);
  static InitialCondition custom(std::function<double(double)> density, std::string label = "custom");
  static InitialCondition make(InitialVariant v, double param);

  InitialVariant variant() const { return variant_; }
  // c, mass or ell depending on the variant
  double param() const { return param_; }
  bool bounded() const;
  bool nonnegative() const;
  // sup |mu| for bounded data
  double sup_abs() const;
  // density at |x| = r (d = 1: at x). Throws for Dirac.
  double density(double x) const;
  // average of the density over [x - h/2, x + h/2]; exact for PowerLaw,
  // Dirac gives mass / h on the cell holding the origin
  double cell_average(double x, double h) const;
  std::string describe() const;

 private:
  InitialCondition(InitialVariant v, double p) : variant_(v), param_(p) {}
  InitialVariant variant_;
  double param_;
  std::shared_ptr<const std::function<double(double)>> custom_;
  std::string label_;
};

// J0(t,x) = int mu(dy) p_t(x - y); x.size() is the dimension.
double J0(const InitialCondition& mu, double t, const std::vector<double>& x);
double J0(const InitialCondition& mu, double t, double x);
// Same with |mu|.
double J_plus(const InitialCondition& mu, double t, const std::vector<double>& x);
double J_plus(const InitialCondition& mu, double t, double x);

// E[g(|x + sqrt(t) Z|)] for a standard Gaussian Z in R^d, |x| = r.
double gaussian_radial_expectation(const std::function<double(double)>& g, double r, double t, int d);

}  // namespace subspde
