#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "etfspectra/frames.hpp"

namespace etfs {

// All rates are in bits.

enum class Direction { SourceCoding, ChannelCoding };
enum class AmplificationKind { MP, MANOVA, Empirical };

std::string_view to_string(Direction direction);
Direction parse_direction(std::string_view name);  // "sc" | "cc"
AmplificationKind parse_amplification(std::string_view name);  // "mp" | "manova"

struct AmplificationModel {
  AmplificationKind kind = AmplificationKind::MANOVA;
  std::shared_ptr<const FrameMatrix> frame;  // Empirical only
  std::int64_t trials = 100;
  std::uint64_t seed = 0;

  static AmplificationModel mp() { return {AmplificationKind::MP, nullptr, 0, 0}; }
  static AmplificationModel manova() { return {AmplificationKind::MANOVA, nullptr, 0, 0}; }
  static AmplificationModel empirical(std::shared_ptr<const FrameMatrix> frame, std::int64_t trials,
                                      std::uint64_t seed) {
    return {AmplificationKind::Empirical, std::move(frame), trials, seed};
  }
};

struct AmplificationEstimate {
  double mean;
  double stderr_of_mean;
  std::int64_t k;
};

// Monte Carlo AHMR of uniform k-subsets, k = round(beta m).
AmplificationEstimate empirical_amplification(const FrameMatrix& frame, double beta, std::int64_t trials,
                                              std::uint64_t seed);

// Lambda(beta, p). beta < 1 is source coding, beta > 1 channel coding; beta = 1 throws.
// For the empirical model p is implied by the frame and the argument is ignored.
double amplification(const AmplificationModel& model, double beta, double p);

struct RateResult {
  double rate;                  // exact finite-SDR rate
  double rate_high_resolution;  // high-SDR form
  double rdf;                   // (p/2) log2 y
  double excess;                // rate - rdf
};

// Requires p < beta < 1 and sdr >= 1.
RateResult rate_sc(double beta, double p, double sdr, const AmplificationModel& model);
RateResult rate_sc_with_amplification(double beta, double p, double sdr, double lambda);

// Excess rate in terms of the inverse energy eta_s = beta * Lambda, exact and high-resolution forms.
double excess_rate_ie(double beta, double p, double sdr, double eta_s);
double excess_rate_ie_high_resolution(double beta, double p, double sdr, double eta_s);

struct CapacityResult {
  double capacity;  // analog scheme
  double shannon;   // (p/2) log2(1 + y)
  double ratio;     // capacity / shannon, NaN when shannon = 0
};

// Requires beta > 1 and snr >= 0.
CapacityResult capacity_cc(double beta, double p, double snr, const AmplificationModel& model);
CapacityResult capacity_cc_with_amplification(double beta, double p, double snr, double lambda);

struct OptimizeOptions {
  double source_margin = 1e-4;  // bracket [p + margin, 1 - margin]
  double channel_min = 1.0 + 1e-4;
  double channel_max = 1e4;
  int scan_points = 200;  // coarse scan before the Brent refinement; 0 skips it
  bool refine = true;     // false keeps the best scan point (grid-scan fallback)
};

struct Optimum {
  double beta;
  double value;  // rate (minimized) or capacity (maximized)
};

Optimum optimize_beta(Direction direction, double p, double y, const AmplificationModel& model,
                      const OptimizeOptions& options = {});

struct HighResolutionGaps {
  double gap_sc_mp;
  double gap_sc_manova;
  double gap_cc_mp;
  double gap_cc_manova;
  double diff_sc;  // manova - mp, source
  double diff_cc;  // manova - mp, channel
  double diff_sc_analytic;  // (p/2) log2(1 - p)
  double diff_cc_analytic;
  double gap_sc_analytic;   // leading terms of the MP source gap
  double gap_cc_analytic;
};

HighResolutionGaps high_resolution_gaps(double p, double y);

// Binary entropy in bits.
double si_benchmark(double p);

enum class MlieMode { Exact, MonteCarlo };

struct MlieResult {
  double value;  // average of (m/n)(1/2) log2 eta_s over finite patterns
  std::int64_t patterns;
  std::int64_t divergent;  // patterns whose subset Gram is singular
  double eta_min;
  double eta_max;
};

inline constexpr double kMliePatternBudget = 1e6;

// k <= m. MonteCarlo draws `trials` uniform patterns.
MlieResult mlie(const FrameMatrix& frame, std::int64_t k, MlieMode mode, std::int64_t trials = 0,
                std::uint64_t seed = 0);

struct DivergenceProbeRow {
  std::int64_t k;
  double estimate;       // median of means of (1/k) tr((A A')^{-1}), A = H / sqrt(k)
  double lower_envelope;  // k^2 / (2 pi e)
  double upper_envelope;  // k^3 / (2 pi e)
  bool within_envelope;  // within a factor of 10 of the envelope
  double control;        // same estimator for a k x 2k matrix
  double control_limit;  // beta / (1 - beta) with beta = 1/2
};

std::vector<DivergenceProbeRow> square_gaussian_divergence_probe(const std::vector<std::int64_t>& k_values,
                                                                 std::int64_t trials, std::uint64_t seed);

}  // namespace etfs
