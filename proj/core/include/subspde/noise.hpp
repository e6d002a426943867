#pragma once

#include <optional>
#include <string>

namespace subspde {

enum class KernelVariant {
  SpaceTimeWhite,
  Constant,
  Riesz,              // f(x) = |x|^{-alpha}
  OrnsteinUhlenbeck,  // f(x) = exp(-|x|^alpha)
  BesselPotential,    // spectral density (1 + |xi|^2)^{-nu/2}
  BesselSpectral,     // f(x) = (1 + |x|^2)^{-nu/2}
};

std::string to_string(KernelVariant v);
KernelVariant kernel_variant_from_string(const std::string& s);

// Spatial correlation of the noise. Immutable value type.
class CorrelationKernel {
 public:
  static CorrelationKernel white(int d = 1);
  static CorrelationKernel constant(int d = 1);
  static CorrelationKernel riesz(double alpha, int d = 1);
  static CorrelationKernel ornstein_uhlenbeck(double alpha, int d = 1);
  static CorrelationKernel bessel_potential(double nu, int d = 1);
  static CorrelationKernel bessel_spectral(double nu, int d = 1);
  static CorrelationKernel make(KernelVariant v, double param, int d);

  KernelVariant variant() const { return variant_; }
  // alpha for Riesz and OU, nu for the Bessel kernels, 0 otherwise
  double param() const { return param_; }
  int dim() const { return d_; }

  // f at |x| = r for kernels with a pointwise spatial form. Throws
  // UnsupportedError for white noise and the Bessel potential.
  double f(double r) const;
  bool has_spatial_form() const;
  // Spectral density f_hat(xi) / (2 pi)^d at |xi| = r, for the kernels
  // handled in Fourier space (white noise and the Bessel potential).
  double spectral_density(double r) const;

  std::string describe() const;

 private:
  CorrelationKernel(KernelVariant v, double param, int d) : variant_(v), param_(param), d_(d) {}
  KernelVariant variant_;
  double param_;
  int d_;
};

struct DalangResult {
  bool ok = false;
  // sup of eta in (0,1] with the improved condition, when positive
  std::optional<double> improved_eta;
  std::string reason;
};

DalangResult dalang_check(const CorrelationKernel& k);

// Gaussian heat kernel p_t(x) = (2 pi t)^{-d/2} exp(-|x|^2 / (2t)), x given by |x|.
double heat_kernel(double t, double r, int d = 1);

// h(t) = 1/2 int_0^{2t} int p_s(z) f(z) dz ds for the heat propagator.
double h_heat(const CorrelationKernel& k, double t);
std::optional<double> h_heat_closed(const CorrelationKernel& k, double t);
double h_heat_quadrature(const CorrelationKernel& k, double t);

// h(t) = int_0^t int G(s,y)^2-type functional for the 1-d wave kernel
// G(s,y) = 1/2 1{|y| <= s}, i.e. 1/2 int_0^{2t} f(u) (t - u/2)^2 du.
double h_wave(const CorrelationKernel& k, double t);
std::optional<double> h_wave_closed(const CorrelationKernel& k, double t);
double h_wave_quadrature(const CorrelationKernel& k, double t);

// k(t) = int p_t(z) f(z) dz = h'(t/2).
double k_eval(const CorrelationKernel& k, double t);
std::optional<double> k_closed(const CorrelationKernel& k, double t);
double k_quadrature(const CorrelationKernel& k, double t);

// k for the wave kernel: int G(t,z) f(z) dz.
double k_wave(const CorrelationKernel& k, double t);

// |p_{t-s}(a) p_s(b) - p_{s(t-s)/t}(b - s(a+b)/t) p_t(a+b)|, d = 1.
double heat_factorization_check(double t, double s, double a, double b);

}  // namespace subspde
