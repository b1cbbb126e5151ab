#pragma once

#include "common/segment.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cuspzero::model {

// sign * exp(log_abs); log_abs = -inf for an exact zero.
struct LogReal {
  double log_abs = -INFINITY;
  int sign = 0;
  double value() const { return sign * std::exp(log_abs); }
};

// S(k, alpha, y) = sum_n n^(k-1) cos(4 pi n alpha) e^(-4 pi n y).
LogReal s_sum(double k, double alpha, double y);

enum class Direction { V, W };

// Expected density of real zeros per unit y of the Gaussian model on the line Re z = alpha.
double ek_density(double k, double alpha, double y, Direction dir = Direction::V);
// Asymptotic density sqrt(k) / (2 pi y).
double asymptotic_density(double k, double y);

struct ModelConfig {
  double cusp_delta = 0.05;   // cusp regime requires y >= k^(1/2 + cusp_delta)
  double stitch_exponent = 0.55;
  double quad_tol = 1e-6;
};

// Three-term localisation around l = round((k - 1) / (4 pi y)).
double cusp_regime_density(double k, double y, const ModelConfig& cfg = {});
double cusp_regime_density_at(double k, double y, int l);

// Density used for counting: exact form below k^stitch_exponent, cusp form above.
double stitched_density(double k, double y, const ModelConfig& cfg = {});

// Vertical-line y range carrying the segment's model count; Delta3 theta maps to
// y = tan(theta / 2) / 2 on Re z = 1/2.
void segment_to_line(SegmentTag seg, double lo, double hi, double& alpha, double& ylo, double& yhi);

double expected_count(double k, SegmentTag seg, double lo, double hi, const ModelConfig& cfg = {});

// Full-segment ranges used for predictions.
void default_range(double k, SegmentTag seg, double& lo, double& hi);

struct DensityProfile {
  double weight = 0;
  double alpha = 0;
  std::vector<std::pair<double, double>> samples;
  double integrated = 0;
  std::string method;
};

DensityProfile density_profile(double k, SegmentTag seg, double lo, double hi, int points, const ModelConfig& cfg = {});

struct McOptions {
  double grid_factor = 1.0;   // multiplies the grid density
  double coeff_scale = 1.0;   // multiplies every Gaussian coefficient
};

struct McResult {
  int trials = 0;
  double mean = 0;
  double stderr_ = 0;
  uint64_t seed = 0;
  int truncation = 0;
  int grid_points = 0;
  std::vector<int> counts;
};

McResult monte_carlo(double k, SegmentTag seg, double lo, double hi, int trials, uint64_t seed,
                     const McOptions& opt = {});

}  // namespace cuspzero::model
