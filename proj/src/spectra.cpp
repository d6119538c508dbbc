#include "etfspectra/spectra.hpp"

#include <complex>

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "etfspectra/random.hpp"

// Dense kernels go through the complex BLAS/LAPACK routines only. Real inputs are
// promoted to complex: some OpenBLAS builds pick real double kernels that return
// wrong results on CPUs they misdetect, while the complex kernels stay correct.

namespace etfs {
namespace {

using Matrix = Eigen::MatrixXcd;

lapack_int to_lapack(Eigen::Index v) { return static_cast<lapack_int>(v); }

// Ascending eigenvalues of the Hermitian matrix whose lower triangle is stored in h.
// h is overwritten.
std::vector<double> lower_eigenvalues(Matrix& h) {
  const lapack_int n = to_lapack(h.rows());
  if (n == 0) return {};
  std::vector<double> w(n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  std::complex<double> unused;
  lapack_int found = 0;
  lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'N', 'A', 'L', n, h.data(), n, 0.0, 0.0, 0, 0, 0.0, &found,
                                   w.data(), &unused, 1, support.data());
  if (info != 0 || found != n) throw std::runtime_error("eigensolver failed");
  return w;
}

// Lower triangle of a' a (adjoint_first) or a a'.
Matrix gram_lower(const Matrix& a, bool adjoint_first) {
  const Eigen::Index size = adjoint_first ? a.cols() : a.rows();
  const Eigen::Index inner = adjoint_first ? a.rows() : a.cols();
  Matrix g = Matrix::Zero(size, size);
  if (size == 0 || inner == 0) return g;
  cblas_zherk(CblasColMajor, CblasLower, adjoint_first ? CblasConjTrans : CblasNoTrans, to_lapack(size),
              to_lapack(inner), 1.0, a.data(), to_lapack(a.rows()), 0.0, g.data(), to_lapack(size));
  return g;
}

void clamp_small(std::vector<double>& values) {
  for (double& v : values)
    if (v < kZeroClamp) v = 0.0;
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Field field, Rng& rng) {
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      out(i, j) = field == Field::Real ? std::complex<double>(standard_normal(rng), 0.0) : standard_complex_normal(rng);
  return out;
}

// Eigenvalues of (n/m) W^{-1/2} B B' W^{-1/2} with W = A A' + B B' = G G', G = [A B].
std::vector<double> manova_eigenvalues(std::int64_t n, std::int64_t m, std::int64_t k, Field field, Rng& rng) {
  Matrix g(k, n);
  g.leftCols(n - m) = gaussian_matrix(k, n - m, field, rng);
  g.rightCols(m) = gaussian_matrix(k, m, field, rng);
  Matrix w = gram_lower(g, false);
  if (LAPACKE_zpotrf(LAPACK_COL_MAJOR, 'L', to_lapack(k), w.data(), to_lapack(k)) != 0)
    throw std::runtime_error("manova ensemble: A A' + B B' is singular");
  Matrix c = g.rightCols(m);
  const std::complex<double> one(1.0, 0.0);
  cblas_ztrsm(CblasColMajor, CblasLeft, CblasLower, CblasNoTrans, CblasNonUnit, to_lapack(k), to_lapack(m), &one,
              w.data(), to_lapack(k), c.data(), to_lapack(k));
  Matrix h = gram_lower(c, k > m);
  auto ev = lower_eigenvalues(h);
  const double scale = double(n) / double(m);
  for (double& v : ev) v *= scale;
  return ev;
}

}  // namespace

SubsetSelection select(std::int64_t n, const SelectionMode& mode, std::uint64_t seed) {
  Rng rng(seed);
  SubsetSelection out{{}, mode, seed};
  if (const auto* uk = std::get_if<UniformK>(&mode)) {
    if (uk->k < 0 || uk->k > n) throw std::invalid_argument("subset size k must lie in [0, n]");
    std::vector<Eigen::Index> pool(n);
    std::iota(pool.begin(), pool.end(), Eigen::Index{0});
    for (std::int64_t i = 0; i < uk->k; ++i) {
      auto j = uniform_int(rng, i, n - 1);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(uk->k);
    std::sort(pool.begin(), pool.end());
    out.indices = std::move(pool);
  } else {
    double p = std::get<Bernoulli>(mode).p;
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("selection probability must lie in [0, 1]");
    for (std::int64_t i = 0; i < n; ++i)
      if (uniform01(rng) < p) out.indices.push_back(i);
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigenvalues of a non-square matrix");
  Matrix sym = (a + a.adjoint()) * 0.5;
  return lower_eigenvalues(sym);
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXd& a) { return hermitian_eigenvalues(Matrix(a.cast<std::complex<double>>())); }

SubsetSpectrum subset_gram_spectrum(const FrameMatrix& frame, std::span<const Eigen::Index> indices) {
  if (indices.empty()) throw std::invalid_argument("empty subset");
  const auto k = static_cast<Eigen::Index>(indices.size());
  const Eigen::Index m = frame.m();
  const auto& f = frame.entries();

  SubsetSpectrum out;
  out.n = frame.n();
  out.m = m;
  out.k = k;
  out.zero_count = k > m ? k - m : 0;

  Matrix a(m, k);
  for (Eigen::Index j = 0; j < k; ++j) a.col(j) = f.col(indices[j]);
  // the k x k Gram and the m x m frame operator share their nonzero eigenvalues
  Matrix g = gram_lower(a, k <= m);
  out.eigenvalues = lower_eigenvalues(g);
  clamp_small(out.eigenvalues);
  return out;
}

SubsetSpectrum subset_gram_spectrum(const FrameMatrix& frame, const SubsetSelection& selection) {
  return subset_gram_spectrum(frame, std::span<const Eigen::Index>(selection.indices));
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  if (sorted_.empty()) return 0.0;
  auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return double(it - sorted_.begin()) / double(sorted_.size());
}

double EmpiricalCdf::left_limit(double x) const {
  if (sorted_.empty()) return 0.0;
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x);
  return double(it - sorted_.begin()) / double(sorted_.size());
}

double ks_distance(std::span<const double> sample, const ReferenceCdf& reference) {
  if (sample.empty()) throw std::invalid_argument("ks distance of an empty sample");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double count = double(xs.size());
  const auto& left = reference.left_limit ? reference.left_limit : reference.value;

  // values a few ulps apart (eigenvalues on an atom) count as one tie
  auto same = [](double a, double b) { return b - a <= kTieWindow * std::max(1.0, std::abs(a)); };
  double worst = 0.0;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    while (j < xs.size() && same(xs[i], xs[j])) ++j;
    // sample CDF jumps from i/N to j/N across [xs[i], xs[j - 1]]
    worst = std::max(worst, std::abs(double(i) / count - left(xs[i])));
    worst = std::max(worst, std::abs(double(j) / count - reference.value(xs[j - 1])));
    i = j;
  }
  return worst;
}

double ks_distance(const SubsetSpectrum& spectrum, const ReferenceCdf& reference) {
  return ks_distance(std::span<const double>(spectrum.eigenvalues), reference);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges slowly here; the value is 1 to double precision
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = std::exp(-2.0 * double(j) * double(j) * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TwoSampleKs two_sample_ks(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("two-sample ks needs nonempty samples");
  std::vector<double> xa(a.begin(), a.end()), xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const double na = double(xa.size()), nb = double(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == x) ++i;
    while (j < xb.size() && xb[j] == x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

SubsetSpectrum sample_manova_ensemble(std::int64_t n, std::int64_t m, std::int64_t k, Field field,
                                      std::uint64_t seed) {
  if (m < 1 || m > n || k < 1 || k > n)
    throw std::invalid_argument("manova ensemble requires 1 <= m <= n and 1 <= k <= n");
  Rng rng(seed);
  SubsetSpectrum out;
  out.n = n;
  out.m = m;
  out.k = k;
  out.zero_count = k > m ? k - m : 0;
  out.eigenvalues = manova_eigenvalues(n, m, k, field, rng);
  clamp_small(out.eigenvalues);
  return out;
}

}  // namespace etfs
