#include "etfspectra/frames.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "etfspectra/random.hpp"

namespace etfs {
namespace {

using cd = std::complex<double>;

struct FamilyName {
  FrameFamily family;
  std::string_view name;
};

constexpr FamilyName kFamilyNames[] = {
    {FrameFamily::DSS, "dss"},
    {FrameFamily::LowPassDFT, "lowpass_dft"},
    {FrameFamily::RandomSpectrumDFT, "random_spectrum_dft"},
    {FrameFamily::RealPaley, "real_paley"},
    {FrameFamily::ComplexPaley, "complex_paley"},
    {FrameFamily::Grassmannian, "grassmannian"},
    {FrameFamily::Alltop, "alltop"},
    {FrameFamily::SpikesSines, "spikes_sines"},
    {FrameFamily::SpikesHadamard, "spikes_hadamard"},
    {FrameFamily::GaussianIID, "gaussian_iid"},
    {FrameFamily::HaarReal, "haar_real"},
    {FrameFamily::HaarComplex, "haar_complex"},
    {FrameFamily::RandomFourier, "random_fourier"},
    {FrameFamily::RandomCosine, "random_cosine"},
};

// exp(2 pi i k / n) with k reduced first so large products stay exact.
cd unit_root(std::int64_t k, std::int64_t n) {
  std::int64_t r = ((k % n) + n) % n;
  double angle = 2.0 * std::numbers::pi * double(r) / double(n);
  return {std::cos(angle), std::sin(angle)};
}

// Rows of the n-point inverse DFT at the given frequencies, entries 1/sqrt(m).
Eigen::MatrixXcd fourier_rows(std::int64_t n, const std::vector<std::int64_t>& freqs) {
  const auto m = static_cast<Eigen::Index>(freqs.size());
  const double scale = 1.0 / std::sqrt(double(m));
  Eigen::MatrixXcd f(m, n);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index i = 0; i < n; ++i) f(r, i) = scale * unit_root(freqs[r] * i, n);
  return f;
}

std::vector<std::int64_t> draw_without_replacement(std::int64_t n, std::int64_t m, Rng& rng) {
  std::vector<std::int64_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  // partial Fisher-Yates
  for (std::int64_t i = 0; i < m; ++i) {
    std::int64_t j = uniform_int(rng, i, n - 1);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return pool;
}

void require_sizes(std::int64_t n, std::int64_t m) {
  if (m < 1 || n < m) throw std::invalid_argument("frame sizes require 1 <= m <= n");
}

// F = sqrt(2) V' where V spans the eigenvalue-2 eigenspace of a Gram matrix
// that is twice a projection of rank n/2.
Eigen::MatrixXcd factor_half_rank_gram(const Eigen::MatrixXcd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const Eigen::Index n = gram.rows();
  const Eigen::Index m = n / 2;
  Eigen::MatrixXcd v = es.eigenvectors().rightCols(m);
  return std::sqrt(2.0) * v.adjoint();
}

}  // namespace

std::string_view to_string(FrameFamily family) {
  for (const auto& entry : kFamilyNames)
    if (entry.family == family) return entry.name;
  return "unknown";
}

std::string_view to_string(Field field) { return field == Field::Real ? "real" : "complex"; }

FrameFamily parse_family(std::string_view name) {
  for (const auto& entry : kFamilyNames)
    if (entry.name == name) return entry.family;
  throw std::invalid_argument("unknown frame family: " + std::string(name));
}

Field parse_field(std::string_view name) {
  if (name == "real") return Field::Real;
  if (name == "complex") return Field::Complex;
  throw std::invalid_argument("unknown field: " + std::string(name));
}

FrameMatrix::FrameMatrix(Eigen::MatrixXcd entries, FrameFamily family, Field field,
                         std::optional<std::uint64_t> seed)
    : entries_(std::move(entries)), family_(family), field_(field), seed_(seed) {}

std::complex<double> FrameMatrix::correlation(Eigen::Index i, Eigen::Index j) const {
  return entries_.col(i).dot(entries_.col(j));
}

Eigen::MatrixXcd FrameMatrix::gram() const { return entries_.adjoint() * entries_; }

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::int64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::int64_t> quadratic_residues(std::int64_t prime) {
  std::vector<std::int64_t> res;
  for (std::int64_t j = 1; j <= (prime - 1) / 2; ++j) res.push_back(j * j % prime);
  std::sort(res.begin(), res.end());
  return res;
}

int legendre_symbol(std::int64_t a, std::int64_t prime) {
  std::int64_t r = ((a % prime) + prime) % prime;
  if (r == 0) return 0;
  // Euler's criterion by square-and-multiply
  std::int64_t result = 1, base = r, e = (prime - 1) / 2;
  while (e > 0) {
    if (e & 1) result = result * base % prime;
    base = base * base % prime;
    e >>= 1;
  }
  return result == 1 ? 1 : -1;
}

FrameMatrix construct_dss(std::int64_t n) {
  if (n < 7 || !is_prime(n) || n % 4 != 3)
    throw std::invalid_argument("dss requires a prime n >= 7 with n = 3 mod 4");
  return {fourier_rows(n, quadratic_residues(n)), FrameFamily::DSS, Field::Complex};
}

FrameMatrix construct_lowpass_dft(std::int64_t n, std::int64_t m) {
  require_sizes(n, m);
  std::vector<std::int64_t> freqs(m);
  std::iota(freqs.begin(), freqs.end(), 0);
  return {fourier_rows(n, freqs), FrameFamily::LowPassDFT, Field::Complex};
}

FrameMatrix construct_random_spectrum_dft(std::int64_t n, std::int64_t m, std::uint64_t seed) {
  require_sizes(n, m);
  Rng rng(seed);
  return {fourier_rows(n, draw_without_replacement(n, m, rng)), FrameFamily::RandomSpectrumDFT,
          Field::Complex, seed};
}

FrameMatrix construct_real_paley(std::int64_t q) {
  if (!is_prime(q) || q % 4 != 1) throw std::invalid_argument("real paley requires a prime q = 1 mod 4");
  const std::int64_t n = q + 1;
  // symmetric conference matrix of order q + 1
  Eigen::MatrixXd conf = Eigen::MatrixXd::Zero(n, n);
  for (std::int64_t i = 1; i < n; ++i) {
    conf(0, i) = conf(i, 0) = 1.0;
    for (std::int64_t j = 1; j < n; ++j) conf(i, j) = legendre_symbol(j - i, q);
  }
  Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(n, n) + conf / std::sqrt(double(q));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  Eigen::MatrixXd f = std::sqrt(2.0) * es.eigenvectors().rightCols(n / 2).transpose();
  return {f.cast<cd>(), FrameFamily::RealPaley, Field::Real};
}

FrameMatrix construct_complex_paley(std::int64_t q) {
  if (!is_prime(q) || q % 4 != 3)
    throw std::invalid_argument("complex paley requires a prime q = 3 mod 4");
  const std::int64_t n = q + 1;
  // skew-symmetric conference matrix of order q + 1
  Eigen::MatrixXd conf = Eigen::MatrixXd::Zero(n, n);
  for (std::int64_t i = 1; i < n; ++i) {
    conf(0, i) = 1.0;
    conf(i, 0) = -1.0;
    for (std::int64_t j = 1; j < n; ++j) conf(i, j) = legendre_symbol(j - i, q);
  }
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Identity(n, n) + cd(0.0, 1.0 / std::sqrt(double(q))) * conf.cast<cd>();
  return {factor_half_rank_gram(gram), FrameFamily::ComplexPaley, Field::Complex};
}

FrameMatrix construct_grassmannian(std::int64_t n) {
  if (n < 7 || !is_prime(n) || n % 4 != 3)
    throw std::invalid_argument("grassmannian requires a prime n >= 7 with n = 3 mod 4");
  std::vector<std::int64_t> freqs{0};
  for (std::int64_t f = 1; f < n; ++f)
    if (legendre_symbol(f, n) == -1) freqs.push_back(f);
  return {fourier_rows(n, freqs), FrameFamily::Grassmannian, Field::Complex};
}

FrameMatrix construct_alltop(std::int64_t prime, std::int64_t redundancy) {
  if (prime < 5 || !is_prime(prime)) throw std::invalid_argument("alltop requires a prime >= 5");
  if (redundancy < 2 || redundancy > prime)
    throw std::invalid_argument("alltop redundancy must lie in [2, prime]");
  const std::int64_t m = prime;
  const double scale = 1.0 / std::sqrt(double(m));
  Eigen::MatrixXcd f(m, redundancy * m);
  for (std::int64_t shift = 0; shift < redundancy; ++shift) {
    for (std::int64_t mod = 0; mod < m; ++mod) {
      for (std::int64_t t = 0; t < m; ++t) {
        std::int64_t u = (t + shift) % m;
        std::int64_t phase = (u * u % m * u + mod * t) % m;
        f(t, shift * m + mod) = scale * unit_root(phase, m);
      }
    }
  }
  return {std::move(f), FrameFamily::Alltop, Field::Complex};
}

FrameMatrix construct_spikes_sines(std::int64_t m) {
  if (m < 2) throw std::invalid_argument("spikes and sines requires m >= 2");
  Eigen::MatrixXcd f(m, 2 * m);
  f.leftCols(m).setIdentity();
  const double scale = 1.0 / std::sqrt(double(m));
  for (std::int64_t t = 0; t < m; ++t)
    for (std::int64_t k = 0; k < m; ++k) f(t, m + k) = scale * unit_root(-t * k, m);
  return {std::move(f), FrameFamily::SpikesSines, Field::Complex};
}

FrameMatrix construct_spikes_hadamard(std::int64_t m) {
  if (m < 2 || (m & (m - 1)) != 0) throw std::invalid_argument("spikes and hadamard requires m a power of 2");
  Eigen::MatrixXd h(1, 1);
  h(0, 0) = 1.0;
  while (h.rows() < m) {
    const Eigen::Index s = h.rows();
    Eigen::MatrixXd next(2 * s, 2 * s);
    next << h, h, h, -h;
    h = std::move(next);
  }
  Eigen::MatrixXd f(m, 2 * m);
  f.leftCols(m).setIdentity();
  f.rightCols(m) = h / std::sqrt(double(m));
  return {f.cast<cd>(), FrameFamily::SpikesHadamard, Field::Real};
}

FrameMatrix construct_random(FrameFamily family, std::int64_t n, std::int64_t m,
                             std::uint64_t seed, const RandomFrameOptions& options) {
  require_sizes(n, m);
  Rng rng(seed);
  Eigen::MatrixXcd f;
  Field field = Field::Complex;

  switch (family) {
    case FrameFamily::GaussianIID: {
      field = options.field;
      const double scale = 1.0 / std::sqrt(double(m));
      f.resize(m, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index r = 0; r < m; ++r)
          f(r, i) = field == Field::Real ? cd(scale * standard_normal(rng), 0.0)
                                         : scale * standard_complex_normal(rng);
      break;
    }
    case FrameFamily::HaarReal:
    case FrameFamily::HaarComplex: {
      field = family == FrameFamily::HaarReal ? Field::Real : Field::Complex;
      Eigen::MatrixXcd g(n, n);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
          g(i, j) = field == Field::Real ? cd(standard_normal(rng), 0.0) : standard_complex_normal(rng);
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
      Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
      const auto& r = qr.matrixQR();
      // make diag(R) positive real so Q is Haar distributed
      for (Eigen::Index j = 0; j < n; ++j) {
        cd d = r(j, j);
        double a = std::abs(d);
        if (a > 0) q.col(j) *= d / a;
      }
      f = std::sqrt(double(n) / double(m)) * q.leftCols(m).transpose();
      break;
    }
    case FrameFamily::RandomFourier:
      f = fourier_rows(n, draw_without_replacement(n, m, rng));
      break;
    case FrameFamily::RandomCosine: {
      field = Field::Real;
      auto freqs = draw_without_replacement(n, m, rng);
      f.resize(m, n);
      const double scale = std::sqrt(double(n) / double(m));
      for (Eigen::Index r = 0; r < m; ++r) {
        const double norm = freqs[r] == 0 ? std::sqrt(1.0 / double(n)) : std::sqrt(2.0 / double(n));
        for (Eigen::Index t = 0; t < n; ++t) {
          double angle = std::numbers::pi * double(2 * t + 1) * double(freqs[r]) / double(2 * n);
          f(r, t) = scale * norm * std::cos(angle);
        }
      }
      break;
    }
    default:
      throw std::invalid_argument("not a random frame family: " + std::string(to_string(family)));
  }

  if (options.normalize_columns) f.colwise().normalize();
  return {std::move(f), family, field, seed};
}

FrameMatrix construct_frame(const FrameRequest& req) {
  switch (req.family) {
    case FrameFamily::DSS: return construct_dss(req.n);
    case FrameFamily::LowPassDFT: return construct_lowpass_dft(req.n, req.m);
    case FrameFamily::RandomSpectrumDFT: return construct_random_spectrum_dft(req.n, req.m, req.seed);
    case FrameFamily::RealPaley: return construct_real_paley(req.n - 1);
    case FrameFamily::ComplexPaley: return construct_complex_paley(req.n - 1);
    case FrameFamily::Grassmannian: return construct_grassmannian(req.n);
    case FrameFamily::Alltop: return construct_alltop(req.m, req.redundancy);
    case FrameFamily::SpikesSines: return construct_spikes_sines(req.m);
    case FrameFamily::SpikesHadamard: return construct_spikes_hadamard(req.m);
    default: return construct_random(req.family, req.n, req.m, req.seed, req.random);
  }
}

double tightness_residual(const FrameMatrix& frame) {
  const auto& f = frame.entries();
  Eigen::MatrixXcd ffh = f * f.adjoint();
  ffh.diagonal().array() -= double(frame.n()) / double(frame.m());
  return ffh.cwiseAbs().maxCoeff();
}

double column_norm_residual(const FrameMatrix& frame) {
  return (frame.entries().colwise().norm().array() - 1.0).abs().maxCoeff();
}

double equiangularity_residual(const FrameMatrix& frame) {
  const Eigen::Index n = frame.n();
  if (n < 2) return 0.0;
  const double welch = std::sqrt(welch_max_bound(n, frame.m()));
  Eigen::MatrixXd mag = frame.gram().cwiseAbs();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j) worst = std::max(worst, std::abs(mag(i, j) - welch));
  return worst;
}

bool is_tight(const FrameMatrix& frame, double tol) { return tightness_residual(frame) <= tol; }

bool is_equiangular(const FrameMatrix& frame, double tol) {
  return equiangularity_residual(frame) <= tol;
}

double coherence(const FrameMatrix& frame) {
  Eigen::MatrixXd mag = frame.gram().cwiseAbs();
  mag.diagonal().setZero();
  return mag.maxCoeff();
}

double welch_rms_bound(std::int64_t n, std::int64_t m) {
  if (n <= 1) return 0.0;
  return double(n - m) / (double(n - 1) * double(m));
}

double welch_max_bound(std::int64_t n, std::int64_t m) { return welch_rms_bound(n, m); }

double mean_square_cross_correlation(const FrameMatrix& frame) {
  const Eigen::Index n = frame.n();
  if (n < 2) return 0.0;
  Eigen::MatrixXd sq = frame.gram().cwiseAbs2();
  double total = sq.sum() - sq.diagonal().sum();
  return total / (double(n) * double(n - 1));
}

}  // namespace etfs
