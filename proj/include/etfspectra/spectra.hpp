#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "etfspectra/frames.hpp"

namespace etfs {

struct UniformK {
  std::int64_t k;
};
struct Bernoulli {
  double p;
};
using SelectionMode = std::variant<UniformK, Bernoulli>;

// Indices are 0-based and ascending.
struct SubsetSelection {
  std::vector<Eigen::Index> indices;
  SelectionMode mode;
  std::uint64_t seed = 0;
};

SubsetSelection select(std::int64_t n, const SelectionMode& mode, std::uint64_t seed);

// Eigenvalues of the subset Gram on its smaller side, ascending. There are
// r = min(k, m) of them; values below kZeroClamp are set to 0. When k > m the
// k - m structural zeros of the k x k Gram are only counted in zero_count.
struct SubsetSpectrum {
  std::vector<double> eigenvalues;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t k = 0;
  std::int64_t zero_count = 0;

  std::int64_t rank() const { return k < m ? k : m; }
  double beta() const { return double(k) / double(m); }
  double gamma() const { return double(m) / double(n); }
};

inline constexpr double kZeroClamp = 1e-10;
// Relative gap below which sample values are treated as tied in ks_distance.
inline constexpr double kTieWindow = 1e-9;

// Ascending eigenvalues of a Hermitian matrix. The input is symmetrized first.
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& a);
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXd& a);

SubsetSpectrum subset_gram_spectrum(const FrameMatrix& frame, std::span<const Eigen::Index> indices);
SubsetSpectrum subset_gram_spectrum(const FrameMatrix& frame, const SubsetSelection& selection);

// Right-continuous step CDF of a sample.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> values);
  double operator()(double x) const;
  double left_limit(double x) const;
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

// A reference distribution for KS comparisons. left_limit(x) is F(x-); for a
// continuous reference it equals value(x) and may be left empty.
struct ReferenceCdf {
  std::function<double(double)> value;
  std::function<double(double)> left_limit;
};

// sup_x |F_sample(x) - F_ref(x)|, evaluated exactly at the sample jump points
// using both one-sided limits.
double ks_distance(std::span<const double> sample, const ReferenceCdf& reference);
double ks_distance(const SubsetSpectrum& spectrum, const ReferenceCdf& reference);

struct TwoSampleKs {
  double statistic;
  double p_value;  // asymptotic Kolmogorov distribution with small-sample correction
};
TwoSampleKs two_sample_ks(std::span<const double> a, std::span<const double> b);
// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

// Eigenvalues of (n/m) W^{-1/2} B B' W^{-1/2}, W = A A' + B B', with A of size
// k x (n - m) and B of size k x m standard Gaussian over the given field.
// Only the min(k, m) eigenvalues that are generically nonzero are returned.
SubsetSpectrum sample_manova_ensemble(std::int64_t n, std::int64_t m, std::int64_t k, Field field,
                                      std::uint64_t seed);

}  // namespace etfs
