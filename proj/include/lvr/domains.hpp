#pragma once

#include <complex>
#include <vector>

namespace lvr {

struct PacmanSpec {
  int p = 2;
  double eta = 0.1;
  double epsilon = 0.1;
};

// D_R = { z : |z| < (2R)^q cos^q(arg z / q) }.
struct SokalDomainSpec {
  int q = 1;
  double R = 1.0;
};

// Sigma_sigma = { s : dist(s, [0, inf)) < 1/sigma }.
struct BorelStripSpec {
  double sigma = 1.0;
};

struct BoundaryPoint {
  double theta = 0.0;
  std::complex<double> point;
};

// Radius of the cardioid at angle theta; zero outside |theta| < (p-1) pi / 2.
double cardioid_radius(int p, double theta);

bool in_cardioid(int p, std::complex<double> lambda);
bool in_pacman(const PacmanSpec& spec, std::complex<double> lambda);
bool in_sokal_domain(const SokalDomainSpec& spec, std::complex<double> z);
bool in_borel_strip(const BorelStripSpec& spec, std::complex<double> s);

// The D_R with the same membership as the cardioid of order p:
// q = p - 1, R = (1/2) (2(p-1))^{-1/(p-1)}.
SokalDomainSpec cardioid_as_sokal(int p);

// `samples` points spaced uniformly in theta over the closed interval
// [-(p-1) pi/2, (p-1) pi/2]; the endpoints have radius 0.
std::vector<BoundaryPoint> cardioid_boundary(int p, int samples);

}  // namespace lvr
