#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "etfspectra/frames.hpp"
#include "etfspectra/functionals.hpp"

namespace etfs {

// A frame family, or the MANOVA Gaussian ensemble used as the baseline.
struct ExperimentFamily {
  std::optional<FrameFamily> frame;  // empty means manova_ensemble
  Field field = Field::Complex;      // ensemble field; random frames use it too

  static ExperimentFamily manova_ensemble(Field field = Field::Complex) { return {std::nullopt, field}; }
  static ExperimentFamily of(FrameFamily family) { return {family, Field::Complex}; }
  std::string name() const;
};

// "manova_ensemble" or any frame family name.
ExperimentFamily parse_experiment_family(std::string_view name);

struct ExperimentRecord {
  std::string family;
  std::string field;
  std::string statistic;  // "ks" or a functional name
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t k = 0;
  double beta = 0.0;   // k / m
  double gamma = 0.0;  // m / n
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased, over trials
  double mean_square = 0.0;
  double limit = 0.0;     // functional batches: limiting value; ks: 0
  double raw_mean = 0.0;  // functional batches: mean of the functional itself
  double wall_time = 0.0; // seconds, not exported by default
  std::vector<double> values;  // per trial: Delta_KS, or squared deviation for functionals
};

struct Profile {
  std::string name;
  std::vector<std::int64_t> ladder;
  std::int64_t trials;
};

Profile desk_profile();  // n in {103, 211, 431, 863}, T = 200
Profile full_profile();  // adds 1031 and 2003, T = 10000
Profile parse_profile(std::string_view name);

// Sizes used for one rung of a ladder. Structured families fix m themselves;
// variable-m families use m = floor(gamma n). k = round(beta m).
struct RungSize {
  std::int64_t n;
  std::int64_t m;
  std::int64_t k;
};

// Frame for one rung, or nullopt (with a message in *notice) when the family is
// undefined at that n.
std::optional<FrameMatrix> ladder_frame(const ExperimentFamily& family, std::int64_t n, double gamma,
                                        std::uint64_t seed, std::string* notice = nullptr);

struct BatchOptions {
  std::vector<std::string>* notices = nullptr;  // skipped sizes are reported here
};

std::vector<ExperimentRecord> run_ks_batch(const ExperimentFamily& family, const std::vector<std::int64_t>& ladder,
                                           double beta, double gamma, std::int64_t trials, std::uint64_t seed,
                                           const BatchOptions& options = {});

std::vector<ExperimentRecord> run_functional_batch(const ExperimentFamily& family,
                                                   const std::vector<std::int64_t>& ladder,
                                                   const FunctionalSpec& functional, double beta, double gamma,
                                                   std::int64_t trials, std::uint64_t seed,
                                                   const BatchOptions& options = {});

struct Test1Model {};
struct Test2Model {
  double a0_b0_ratio;
};

struct FitResult {
  std::string label;
  std::string model;  // "test1" | "test2" | "test2_baseline"
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;
  std::optional<double> loglog_coefficient;  // baseline fit only
  std::int64_t points = 0;
};

// Ordinary least squares of y on [1, x]; at least 3 points.
FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Test 1: -1/2 log(variance) on log n.  Test 2: -log(mean) on log n + ratio log log n.
FitResult fit_power_law(const std::vector<ExperimentRecord>& records, const Test1Model& model);
FitResult fit_power_law(const std::vector<ExperimentRecord>& records, const Test2Model& model);

// -log(mean) on {1, log n, log log n}. slope is the log n coefficient and
// loglog_coefficient the other one; ratio() below gives their quotient.
FitResult fit_test2_baseline(const std::vector<ExperimentRecord>& records);
double test2_ratio(const FitResult& baseline);

// Two-sided p-value of equal slopes, t with N_a + N_b - 4 degrees of freedom.
double t_test_equal_slopes(const FitResult& a, const FitResult& b, std::int64_t n_a, std::int64_t n_b);

// Everything that determines a harness run. The canonical form feeds the
// config hash written into exports.
struct HarnessConfig {
  std::string test = "test1";
  std::string family = "dss";
  std::string field = "complex";
  std::string functional = "ac";
  double alpha = 1.0;
  double delta = 0.1;
  double beta = 0.8;
  double gamma = 0.5;
  std::string profile = "desk";
  std::vector<std::int64_t> ladder;  // overrides the profile when non-empty
  std::int64_t trials = 0;           // overrides the profile when positive
  std::uint64_t seed = 1;
};

std::string canonical_string(const HarnessConfig& config);
std::uint64_t config_hash(const HarnessConfig& config);

inline constexpr int kExportVersion = 1;

struct ExportOptions {
  std::uint64_t config_hash = 0;
  bool include_wall_time = false;
  bool include_values = false;  // json only
};

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records, const ExportOptions& options);
void write_records_json(std::ostream& out, const std::vector<ExperimentRecord>& records,
                        const ExportOptions& options);
void write_fits_csv(std::ostream& out, const std::vector<FitResult>& fits, const ExportOptions& options);
void write_fits_json(std::ostream& out, const std::vector<FitResult>& fits, const ExportOptions& options);

struct RecordsFile {
  int version = 0;
  std::uint64_t config_hash = 0;
  std::vector<ExperimentRecord> records;
};
struct FitsFile {
  int version = 0;
  std::uint64_t config_hash = 0;
  std::vector<FitResult> fits;
};

RecordsFile read_records_csv(std::istream& in);
RecordsFile read_records_json(std::istream& in);
FitsFile read_fits_csv(std::istream& in);
FitsFile read_fits_json(std::istream& in);

// Writes to `path`, choosing CSV or JSON by extension (.json is JSON).
void export_records(const std::string& path, const std::vector<ExperimentRecord>& records,
                    const ExportOptions& options);
void export_fits(const std::string& path, const std::vector<FitResult>& fits, const ExportOptions& options);

}  // namespace etfs
