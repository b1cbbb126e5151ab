#pragma once

#include "common/segment.hpp"
#include "evaluator/evaluator.hpp"
#include "modforms/eigenform.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cuspzero::census {

using modforms::Eigenform;

// A certified sign of the real restriction at one parameter value.
struct CertifiedValue {
  double param = 0;
  double value = 0;      // normalised real value, relative to exp(log_scale)
  double error = 0;
  double log_scale = 0;
  int sign = 0;          // 0 when undetermined at every tier
  int tier_bits = 53;
  bool jittered = false;

  double log_abs() const { return log_scale + std::log(std::fabs(value)); }
};

struct SignChangeBracket {
  SegmentTag segment = SegmentTag::Delta1;
  double lo = 0, hi = 0;
  double value_lo = 0, value_hi = 0;
};

struct ZeroRecord {
  SegmentTag segment = SegmentTag::Delta1;
  double param_lo = 0, param_hi = 0;
  double location = 0;
  double width = 0;
  std::string multiplicity_note = "bracketed only";
  bool corner = false;
  bool forced = false;
  bool jittered = false;

  std::string flags() const;
};

struct ScanPolicy {
  double t_step = 0.125;     // delta1/delta2 grid step in t = (k - 1) / (4 pi y)
  int arc_points = 0;        // delta3 grid size; 0 means ceil(k / 4)
  int refine_levels = 3;     // subdivision rounds around suspicious dips
  int refine_factor = 8;
  int max_escalations = 2;   // 53-bit, then eigenform precision, then twice that
  double jitter = 1e-9;      // fraction of the local step
};

struct ScanLog {
  int undetermined = 0;
  int jittered = 0;
  int escalated = 0;
  std::vector<std::string> notes;
};

// Real restriction with automatic precision escalation (no jitter).
CertifiedValue restrict_real(const Eigenform& f, SegmentTag seg, double param, int max_escalations = 2,
                             ScanLog* log = nullptr);

// Parameter ranges: y for Delta1/Delta2, theta for Delta3.
std::vector<SignChangeBracket> scan_segment(const Eigenform& f, SegmentTag seg, double lo, double hi,
                                            const ScanPolicy& policy = {}, ScanLog* log = nullptr);

ZeroRecord refine_zero(const Eigenform& f, const SignChangeBracket& bracket, double tol,
                       const ScanPolicy& policy = {}, ScanLog* log = nullptr);

struct WindingPolicy {
  int min_points = 16;
  int points_per_term = 4;
  int max_depth = 40;
};

// Zeros of f in {Im z > y, -1/2 < Re z <= 1/2}, including the cusp.
int winding_count(const Eigenform& f, double y, const WindingPolicy& policy = {});

struct SiegelEntry {
  double Y = 0;
  double Y_used = 0;       // after any perturbation off a zero
  int total = 0;           // winding count, cusp included
  int real_delta1 = 0;
  int real_delta2 = 0;
  std::optional<double> ratio;  // (real_delta1 + real_delta2) / (total - 1)
  std::string status = "ok";
};

// When `known` is null the real zeros above Y are found by a fresh scan.
std::vector<SiegelEntry> siegel_census(const Eigenform& f, const std::vector<double>& Ys,
                                       const std::vector<ZeroRecord>* known = nullptr, const ScanPolicy& policy = {});

struct Predictions {
  double delta1 = 0, delta2 = 0, delta3 = 0;
};

struct CensusConfig {
  std::vector<double> Ys;
  double tol = 1e-10;
  ScanPolicy scan;
  // Ladder strips (y_(l+1), y_l) checked by winding for l <= ladder_max (0: ceil(2 sqrt k)).
  int ladder_max = 0;
  std::optional<Predictions> predictions;
};

struct CensusReport {
  int weight = 0;
  int dim_index = 0;
  std::vector<ZeroRecord> zeros;
  int n_delta1 = 0, n_delta2 = 0, n_delta3 = 0;
  std::vector<SiegelEntry> siegel;
  std::optional<Predictions> predictions;
  std::map<int, int> ladder_winding;  // l -> winding count at y_l
  ScanLog log;
  std::vector<std::string> errors;

  int count(SegmentTag s, bool include_corners = true) const;
};

// Forced vanishing orders at i and rho for weight k.
int forced_order_i(int k);
int forced_order_rho(int k);

CensusReport census_report(const Eigenform& f, const CensusConfig& config);

}  // namespace cuspzero::census
