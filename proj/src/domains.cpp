#include "lvr/domains.hpp"

#include "lvr/errors.hpp"

#include <cmath>
#include <numbers>

namespace lvr {

double cardioid_radius(int p, double theta) {
  require(p >= 2, "cardioid: p must be >= 2");
  const double phi = theta / (p - 1);
  if (std::abs(phi) >= std::numbers::pi / 2) return 0.0;
  return std::pow(std::cos(phi), p - 1) / (2.0 * (p - 1));
}

bool in_cardioid(int p, std::complex<double> lambda) {
  require(p >= 2, "cardioid: p must be >= 2");
  if (lambda == 0.0) return false;
  return std::abs(lambda) < cardioid_radius(p, std::arg(lambda));
}

bool in_pacman(const PacmanSpec& spec, std::complex<double> lambda) {
  require(spec.p >= 2, "pacman: p must be >= 2");
  require(spec.eta > 0, "pacman: eta must be positive");
  const double half_angle = std::numbers::pi / 2 + std::numbers::pi / (spec.p - 1) - spec.epsilon;
  require(spec.epsilon > 0 && half_angle > 0, "pacman: epsilon out of range");
  const double r = std::abs(lambda);
  return r > 0 && r < spec.eta && std::abs(std::arg(lambda)) < half_angle;
}

bool in_sokal_domain(const SokalDomainSpec& spec, std::complex<double> z) {
  require(spec.q >= 1, "sokal domain: q must be >= 1");
  require(spec.R > 0, "sokal domain: R must be positive");
  if (z == 0.0) return false;
  const double c = std::cos(std::arg(z) / spec.q);
  if (c <= 0) return false;
  return std::abs(z) < std::pow(2.0 * spec.R * c, spec.q);
}

bool in_borel_strip(const BorelStripSpec& spec, std::complex<double> s) {
  require(spec.sigma > 0, "borel strip: sigma must be positive");
  const double dist = s.real() >= 0 ? std::abs(s.imag()) : std::abs(s);
  return dist < 1.0 / spec.sigma;
}

SokalDomainSpec cardioid_as_sokal(int p) {
  require(p >= 2, "cardioid: p must be >= 2");
  const int q = p - 1;
  return {q, 0.5 * std::pow(2.0 * q, -1.0 / q)};
}

std::vector<BoundaryPoint> cardioid_boundary(int p, int samples) {
  require(p >= 2, "cardioid: p must be >= 2");
  require(samples >= 2, "cardioid_boundary: samples must be >= 2");
  const double tmax = (p - 1) * std::numbers::pi / 2;
  std::vector<BoundaryPoint> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double theta = -tmax + 2 * tmax * i / (samples - 1);
    out.push_back({theta, std::polar(cardioid_radius(p, theta), theta)});
  }
  return out;
}

}  // namespace lvr
