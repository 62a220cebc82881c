#pragma once

#include <complex>

namespace twistecho {

/// Quadrature model of the TACT echo near the pole: squeezing strength
/// gamma = t_chi N, displacement phi = theta sqrt(N) / 2.
struct OneModeParams {
  int n_atoms = 1;
  double gamma = 0.0;
  double phi = 0.0;
  double echo_ratio = 1.0;
  double sigma = 0.0;

  static OneModeParams from_two_mode(int n_atoms, double t_chi, double theta, double echo_ratio,
                                     double sigma = 0.0);
  void validate() const;
};

/// Largest |gamma| or |r gamma| accepted by the functions that grow
/// exponentially; beyond it they throw OutOfWindowError.
inline constexpr double kOneModeExponentLimit = 20.0;

/// e^{-2 gamma} / N.
double ideal_phase_variance(const OneModeParams& p);
/// e^{-2 gamma} / N + 4 sigma^2 / (N^2 e^{2 r gamma}).
double noisy_phase_variance(const OneModeParams& p);
/// e^{r gamma}.
double one_mode_magnification(const OneModeParams& p);
/// 2 phi e^{gamma}.
double one_mode_snr(const OneModeParams& p);

struct OneModeMoments {
  std::complex<double> mean_bdag;
  double n_b = 0.0;
  double bdag_sq = 0.0;
};

/// <b^dag>, <b^dag b> and <(b^dag)^2> = <b^2> in S^{-1}(r gamma) D(phi) S(gamma)|0>.
OneModeMoments appendix_a_moments(const OneModeParams& p);

/// Method-of-moments phase variance assembled from the moments above:
/// [<b^dag^2 + b^2 + 2 b^dag b + 1> - <b^dag + b>^2] / (N e^{2 r gamma}).
double assembled_phase_variance(const OneModeParams& p);

struct OneModeBreakdown {
  double gamma = 0.0;
  double t_chi = 0.0;
  /// xi_R^2 of the two-mode prepared state, in dB.
  double xi_db = 0.0;
  /// One-mode squeezing e^{-2 gamma}, in dB.
  double one_mode_db = 0.0;
  double deviation = 0.0;
};

/// Smallest gamma at which the noiseless two-mode TACT echo (r = 1, theta
/// near zero) departs from the one-mode sensitivity,
/// |F (Delta theta)^2_one-mode - 1| = deviation. Coarse scan in gamma
/// followed by bisection.
OneModeBreakdown find_one_mode_breakdown(int n_atoms, double deviation = 0.05);

}  // namespace twistecho
