#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "etfspectra/frames.hpp"
#include "etfspectra/spectra.hpp"

namespace etfs {

using Rational = boost::multiprecision::cpp_rational;

// Univariate polynomial with exact rational coefficients; coeffs[i] multiplies x^i.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<Rational> coeffs);
  static RationalPolynomial constant(const Rational& c);
  static RationalPolynomial monomial(const Rational& c, int power);
  // (x + 1)^e
  static RationalPolynomial x_plus_one_pow(int e);

  const std::vector<Rational>& coeffs() const { return coeffs_; }
  Rational coefficient(int power) const;
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double evaluate(double x) const;

  RationalPolynomial operator+(const RationalPolynomial& o) const;
  RationalPolynomial operator-(const RationalPolynomial& o) const;
  RationalPolynomial operator*(const RationalPolynomial& o) const;
  RationalPolynomial scaled(const Rational& c) const;
  bool operator==(const RationalPolynomial& o) const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

// Sorted (descending) cycle lengths of a contracted partition, e.g. {3} or {2, 2}.
using CycleType = std::vector<int>;

// Asymptotic moment m_d as a polynomial in p and x = n/m - 1:
//   m_d = sum_k p^k a_{d,k}(x).
class MomentPolynomial {
 public:
  MomentPolynomial(int d, std::vector<RationalPolynomial> blocks,
                   std::vector<std::map<CycleType, std::int64_t>> block_terms);

  int degree_d() const { return d_; }
  // a_{d,k}(x), k in 1..d
  const RationalPolynomial& block(int k) const;
  // Multiplicity of each product of a_{j,j} factors inside a_{d,k}; k in 1..d-1.
  const std::map<CycleType, std::int64_t>& block_terms(int k) const;
  Rational coefficient(int p_power, int x_power) const;
  // (p power, x power) -> coefficient, zeros omitted
  std::map<std::pair<int, int>, Rational> coefficients() const;
  RationalPolynomial at_p_equals_one() const;
  double evaluate(double p, double x) const;

  std::string to_latex() const;
  std::string to_json() const;

 private:
  int d_;
  std::vector<RationalPolynomial> blocks_;                     // index k - 1
  std::vector<std::map<CycleType, std::int64_t>> block_terms_;  // index k - 1
};

// Block labels in first-appearance order (restricted growth string), 0-based.
struct NonCrossingPartition {
  std::vector<int> labels;
  int block_count() const;
  // Blocks as sorted lists of 1-based elements.
  std::vector<std::vector<int>> blocks() const;
};

bool is_noncrossing(const std::vector<int>& labels);

// Visits every non-crossing partition of {1..d}; d <= 14.
void for_each_noncrossing_partition(int d, const std::function<void(const std::vector<int>& labels, int blocks)>& visit);
std::vector<NonCrossingPartition> enumerate_noncrossing_partitions(int d);

// Contracts the d-cycle 1-2-...-d-1 by the partition, drops self-loops and
// returns the lengths of the remaining edge-disjoint cycles (descending).
// Throws std::invalid_argument for a crossing partition.
CycleType contract_cycle(const NonCrossingPartition& partition);

MomentPolynomial asymptotic_moment(int d);

std::int64_t narayana(int d, int k);
std::int64_t catalan(int d);

struct MomentEstimate {
  double mean;
  double stderr_of_mean;
  std::int64_t trials;
};

// Monte Carlo estimate of (1/n) E tr((X'X)^d).
MomentEstimate empirical_moment(const FrameMatrix& frame, const SelectionMode& mode, int d,
                                std::int64_t trials, std::uint64_t seed);

// a_{d,k}(F) for k = 1..d from tuple enumeration, so that the Bernoulli(p)
// expected moment is sum_k p^k a_{d,k}(F).
struct ExactMoment {
  int d;
  std::vector<double> a;  // a[k], k = 1..d; a[0] unused
  double evaluate(double p) const;
};

inline constexpr double kTupleBudget = 1e8;

ExactMoment exact_expected_moment(const FrameMatrix& frame, int d);

// MANOVA moment plus the finite-n correction (nonzero only for d = 4).
double ewb_bound(double gamma, double p, int d, std::int64_t n);
double ewb_correction(double gamma, double p, int d, std::int64_t n);

// (1/n) sum_{i != j} |c_ij|^4, the crossing contribution to a_{4,2}.
double crossing_term_a42(const FrameMatrix& frame);

struct CrossingProbeRow {
  std::int64_t n;
  std::int64_t m;
  double value;
  double etf_prediction;  // x^2 / (n - 1)
};
// Builds the frame of `family` at each size (see FrameRequest) and reports the crossing term.
std::vector<CrossingProbeRow> crossing_decay_probe(FrameFamily family, const std::vector<std::int64_t>& sizes);

}  // namespace etfs
