#pragma once

// Delay-line Mach-Zehnder frequency discriminator.
//
// Each detected photon is scored +1 (port e) or -1 (port f); the
// integrated current is the sum of scores. The interferometer is biased so
// that the mean optical frequency w0 satisfies w0*tau = (m + 1/2)*pi. With
// s = (-1)^m the bias parity, a photon at detuning d from w0 sees
//   cos(w tau) = cos(w0 tau + d tau) = -s sin(d tau),
// so only detunings ever enter trigonometric arguments. All frequencies in
// this header are angular (rad/s).

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "spinread/constants.hpp"
#include "spinread/random.hpp"

namespace spinread {

struct SpectralLine {
  double detuning = 0.0;  // rad/s from the bias reference
  double fwhm = 0.0;      // rad/s, Lorentzian

  void validate() const {
    if (!(fwhm >= 0.0) || !std::isfinite(fwhm)) {
      throw std::invalid_argument("SpectralLine: fwhm must be finite and >= 0");
    }
    if (!std::isfinite(detuning)) {
      throw std::invalid_argument("SpectralLine: detuning must be finite");
    }
  }
};

struct InterferometerConfig {
  double delay = 2e-9;               // s
  int bias_parity = 1;               // +1 or -1
  double detector_efficiency = 1.0;
  double dark_rate = 0.0;            // counts/s over both detectors

  void validate() const {
    if (!(delay > 0.0) || !std::isfinite(delay)) {
      throw std::invalid_argument("InterferometerConfig: delay must be > 0");
    }
    if (bias_parity != 1 && bias_parity != -1) {
      throw std::invalid_argument("InterferometerConfig: bias_parity must be +1 or -1");
    }
    if (!(detector_efficiency >= 0.0 && detector_efficiency <= 1.0)) {
      throw std::invalid_argument("InterferometerConfig: detector_efficiency must lie in [0, 1]");
    }
    if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate)) {
      throw std::invalid_argument("InterferometerConfig: dark_rate must be >= 0");
    }
  }
};

enum class Port { kE, kF };

constexpr int port_value(Port p) { return p == Port::kE ? 1 : -1; }

/// cos(w tau) at the biased operating point.
inline double biased_cosine(double detuning, const InterferometerConfig& cfg) {
  return -static_cast<double>(cfg.bias_parity) * std::sin(detuning * cfg.delay);
}

/// Mean of the per-photon +/-1 current over a Lorentzian line.
inline double mean_current(const SpectralLine& line, const InterferometerConfig& cfg) {
  return std::exp(-0.5 * line.fwhm * cfg.delay) * biased_cosine(line.detuning, cfg);
}

/// Variance of the per-photon current, 1 - exp(-gamma tau) cos^2(w tau).
inline double current_variance(const SpectralLine& line, const InterferometerConfig& cfg) {
  const double c = biased_cosine(line.detuning, cfg);
  return 1.0 - std::exp(-line.fwhm * cfg.delay) * c * c;
}

/// Power signal-to-noise ratio per photon for two lines split by
/// delta_omega, bias-optimized:
///   4 sin^2(dw tau/2) / (cos^2(dw tau/2) + e^{gamma tau} - 1).
/// For gamma = 0 and dw tau = pi the contrast is perfect and the ratio
/// diverges; that point throws std::domain_error.
inline double snr_per_photon(double delta_omega, double gamma, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("snr_per_photon: tau must be > 0");
  if (!(gamma >= 0.0)) throw std::domain_error("snr_per_photon: gamma must be >= 0");
  const double half = 0.5 * delta_omega * tau;
  const double s = std::sin(half);
  const double c = std::cos(half);
  const double numerator = 4.0 * s * s;
  const double denominator = c * c + std::expm1(gamma * tau);
  if (numerator == 0.0) return 0.0;
  // cos^2 of a half-angle that is pi/2 up to rounding is ~1e-33, not 0.
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (!(denominator > 16.0 * eps * eps)) {
    throw std::domain_error("snr_per_photon: noise-free operating point, ratio is unbounded");
  }
  return numerator / denominator;
}

struct DelayOptimum {
  double tau = 0.0;
  double snr = 0.0;
};

/// Maximizes snr_per_photon over tau in (0, 20/gamma]. A uniform scan
/// locates the best lobe (the ratio oscillates in tau for narrow lines) and
/// golden-section search refines inside it.
inline DelayOptimum optimal_delay(double delta_omega, double gamma) {
  if (!(delta_omega > 0.0)) throw std::domain_error("optimal_delay: delta_omega must be > 0");
  if (!(gamma > 0.0)) {
    throw std::domain_error("optimal_delay: gamma = 0 leaves the delay domain unbounded");
  }
  const double tau_max = 20.0 / gamma;
  auto f = [&](double tau) { return snr_per_photon(delta_omega, gamma, tau); };

  // Resolve at least ~20 samples per oscillation period 4 pi / delta_omega.
  const double period = 4.0 * constants::pi / delta_omega;
  const int n = static_cast<int>(std::clamp(20.0 * tau_max / period, 2000.0, 2.0e6));
  const double step = tau_max / n;
  int best = 1;
  double best_val = f(step);
  for (int i = 2; i <= n; ++i) {
    const double v = f(step * i);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = step * (best - 1);
  double b = std::min(step * (best + 1), tau_max);
  if (a <= 0.0) a = step * 1e-6;

  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int iter = 0; iter < 200 && (b - a) > 1e-14 * b; ++iter) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  const double tau = 0.5 * (a + b);
  return {tau, f(tau)};
}

/// Time to accumulate the requested power SNR.
inline double integration_time(double target_power_snr, double snr_per_photon_value,
                               double detected_flux) {
  if (!(target_power_snr > 0.0 && snr_per_photon_value > 0.0 && detected_flux > 0.0)) {
    throw std::domain_error("integration_time: all inputs must be > 0");
  }
  return target_power_snr / (snr_per_photon_value * detected_flux);
}

/// Probability that a photon at the given detuning exits port e.
inline double port_probability(double photon_detuning, const InterferometerConfig& cfg) {
  return 0.5 * (1.0 - static_cast<double>(cfg.bias_parity) *
                          std::sin(photon_detuning * cfg.delay));
}

/// Draws a photon detuning from the Lorentzian line.
inline double sample_photon_detuning(const SpectralLine& line, RandomStream& rng) {
  if (line.fwhm == 0.0) return line.detuning;
  return line.detuning + 0.5 * line.fwhm * rng.standard_cauchy();
}

/// Routes a photon of known detuning through the interferometer.
inline Port sample_port(double photon_detuning, const InterferometerConfig& cfg,
                        RandomStream& rng) {
  return rng.uniform() < port_probability(photon_detuning, cfg) ? Port::kE : Port::kF;
}

}  // namespace spinread
