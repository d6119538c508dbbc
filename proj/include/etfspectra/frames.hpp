#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace etfs {

enum class Field { Real, Complex };

enum class FrameFamily {
  DSS,
  LowPassDFT,
  RandomSpectrumDFT,
  RealPaley,
  ComplexPaley,
  Grassmannian,
  Alltop,
  SpikesSines,
  SpikesHadamard,
  GaussianIID,
  HaarReal,
  HaarComplex,
  RandomFourier,
  RandomCosine,
};

std::string_view to_string(FrameFamily family);
std::string_view to_string(Field field);
// Accepts the snake_case names used on the command line (e.g. "dss", "real_paley").
FrameFamily parse_family(std::string_view name);
Field parse_field(std::string_view name);

// m x n matrix whose columns are the frame vectors. Entries are stored as
// complex numbers even for real families; field() records which one it is.
class FrameMatrix {
 public:
  FrameMatrix(Eigen::MatrixXcd entries, FrameFamily family, Field field,
              std::optional<std::uint64_t> seed = std::nullopt);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  Eigen::Index m() const { return entries_.rows(); }
  Eigen::Index n() const { return entries_.cols(); }
  double gamma() const { return double(m()) / double(n()); }
  FrameFamily family() const { return family_; }
  Field field() const { return field_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  // Inner product <f_i, f_j> = f_i' f_j.
  std::complex<double> correlation(Eigen::Index i, Eigen::Index j) const;
  Eigen::MatrixXcd gram() const;

 private:
  Eigen::MatrixXcd entries_;
  FrameFamily family_;
  Field field_;
  std::optional<std::uint64_t> seed_;
};

bool is_prime(std::int64_t n);
// Nonzero squares modulo an odd prime, ascending.
std::vector<std::int64_t> quadratic_residues(std::int64_t prime);
// Legendre symbol (a / prime) for an odd prime.
int legendre_symbol(std::int64_t a, std::int64_t prime);

FrameMatrix construct_dss(std::int64_t n);
FrameMatrix construct_lowpass_dft(std::int64_t n, std::int64_t m);
FrameMatrix construct_random_spectrum_dft(std::int64_t n, std::int64_t m, std::uint64_t seed);
FrameMatrix construct_real_paley(std::int64_t q);
// q prime with q = 3 mod 4; complex ETF with n = q + 1, m = n / 2.
FrameMatrix construct_complex_paley(std::int64_t q);
// n prime with n = 3 mod 4; frequencies {0} plus the non-residues, m = (n + 1) / 2.
FrameMatrix construct_grassmannian(std::int64_t n);
// Union of `redundancy` cubic-chirp orthonormal bases of C^prime: m = prime, n = redundancy * prime.
FrameMatrix construct_alltop(std::int64_t prime, std::int64_t redundancy);
FrameMatrix construct_spikes_sines(std::int64_t m);
FrameMatrix construct_spikes_hadamard(std::int64_t m);

struct RandomFrameOptions {
  Field field = Field::Complex;  // used by GaussianIID only
  bool normalize_columns = false;
};

FrameMatrix construct_random(FrameFamily family, std::int64_t n, std::int64_t m,
                             std::uint64_t seed, const RandomFrameOptions& options = {});

// Parameters for the generic dispatcher. Fields that a family does not use are ignored.
//   dss, grassmannian: n.  real_paley, complex_paley: n = q + 1.
//   alltop: m (prime) and redundancy.  spikes_*: m.  others: n, m, seed.
struct FrameRequest {
  FrameFamily family = FrameFamily::DSS;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t redundancy = 2;
  std::uint64_t seed = 0;
  RandomFrameOptions random;
};

FrameMatrix construct_frame(const FrameRequest& request);

// Largest entry of |F F' - (n/m) I|.
double tightness_residual(const FrameMatrix& frame);
// Largest deviation of a column norm from 1.
double column_norm_residual(const FrameMatrix& frame);
// Largest deviation of an off-diagonal |c_ij| from the Welch value.
double equiangularity_residual(const FrameMatrix& frame);

bool is_tight(const FrameMatrix& frame, double tol = 1e-9);
bool is_equiangular(const FrameMatrix& frame, double tol = 1e-9);
// max_{i != j} |c_ij|
double coherence(const FrameMatrix& frame);
// Squared-correlation form (n - m) / ((n - 1) m) of both Welch bounds.
double welch_rms_bound(std::int64_t n, std::int64_t m);
double welch_max_bound(std::int64_t n, std::int64_t m);
// Mean of |c_ij|^2 over ordered pairs i != j.
double mean_square_cross_correlation(const FrameMatrix& frame);

}  // namespace etfs
