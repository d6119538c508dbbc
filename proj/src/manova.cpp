#include "etfspectra/manova.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "etfspectra/moments.hpp"

namespace etfs {
namespace {

constexpr double kQuadTol = 1e-13;
constexpr unsigned kQuadDepth = 20;
constexpr double kAtomTol = 1e-12;

double gk_integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, kQuadDepth, kQuadTol);
}

std::vector<Atom> manova_atoms(const ManovaParams& params) {
  std::vector<Atom> atoms;
  if (params.beta > 1.0) atoms.push_back({0.0, 1.0 - 1.0 / params.beta});
  double top = manova_atom_mass(params);
  if (top > 0.0) atoms.push_back({1.0 / params.gamma, top});
  return atoms;
}

}  // namespace

void validate(const ManovaParams& params) {
  if (!(params.beta > 0.0) || !std::isfinite(params.beta))
    throw std::invalid_argument("beta must be positive");
  if (!(params.gamma > 0.0) || params.gamma > 1.0)
    throw std::invalid_argument("gamma must lie in (0, 1]");
  if (params.p() > 1.0 + 1e-12) throw std::invalid_argument("p = beta * gamma must not exceed 1");
}

SpectralLaw::SpectralLaw(double lower, double upper, std::function<double(double)> shape,
                         std::vector<Atom> atoms)
    : lower_(lower), upper_(upper), shape_(std::move(shape)), atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
}

double SpectralLaw::density(double x) const {
  if (!(x > lower_ && x < upper_)) return 0.0;
  return std::sqrt((x - lower_) * (upper_ - x)) * shape_(x);
}

double SpectralLaw::integrate_to(double x, const std::function<double(double)>& psi) const {
  const double width = upper_ - lower_;
  if (!(width > 0.0) || x <= lower_) return 0.0;
  double u = std::min(1.0, (x - lower_) / width);
  double theta_max = std::asin(std::sqrt(u));
  // dx = width sin(2t) dt and sqrt((x-a)(b-x)) = width sin(2t) / 2
  // integrate over v = theta / theta_max; boost's GK error test is not scale
  // invariant and recurses to full depth on very short intervals
  auto integrand = [&](double v) {
    double theta = v * theta_max;
    double s = std::sin(theta);
    double t = lower_ + width * s * s;
    double s2 = std::sin(2.0 * theta);
    return psi(t) * shape_(t) * 0.5 * width * width * s2 * s2 * theta_max;
  };
  return gk_integrate(integrand, 0.0, 1.0);
}

double SpectralLaw::continuous_mass() const {
  return integrate_to(upper_, [](double) { return 1.0; });
}

double SpectralLaw::total_mass() const {
  double total = continuous_mass();
  for (const auto& a : atoms_) total += a.mass;
  return total;
}

double SpectralLaw::cdf(double x) const {
  double total = integrate_to(x, [](double) { return 1.0; });
  for (const auto& a : atoms_)
    if (a.counted_in_cdf(x)) total += a.mass;
  return total;
}

double SpectralLaw::cdf_left(double x) const {
  double total = integrate_to(x, [](double) { return 1.0; });
  for (const auto& a : atoms_)
    if (a.counted_in_left_limit(x)) total += a.mass;
  return total;
}

double SpectralLaw::expect(const std::function<double(double)>& psi) const {
  double total = integrate_to(upper_, psi);
  for (const auto& a : atoms_) total += a.mass * psi(a.location);
  return total;
}

ReferenceCdf SpectralLaw::as_reference() const {
  auto self = std::make_shared<SpectralLaw>(*this);
  return {[self](double x) { return self->cdf(x); }, [self](double x) { return self->cdf_left(x); }};
}

SupportEdges manova_edges(const ManovaParams& params) {
  double a = std::sqrt(std::max(0.0, params.beta * (1.0 - params.gamma)));
  double b = std::sqrt(std::max(0.0, 1.0 - params.p()));
  return {(a - b) * (a - b), (a + b) * (a + b)};
}

double manova_atom_mass(const ManovaParams& params) {
  double mass = 1.0 + 1.0 / params.beta - 1.0 / (params.beta * params.gamma);
  return mass > kAtomTol ? mass : 0.0;
}

SpectralLaw manova_law(const ManovaParams& params) {
  validate(params);
  auto edges = manova_edges(params);
  const double beta = params.beta, gamma = params.gamma;
  auto shape = [beta, gamma](double x) {
    return 1.0 / (2.0 * beta * std::numbers::pi * x * (1.0 - gamma * x));
  };
  return {edges.r_minus, edges.r_plus, shape, manova_atoms(params)};
}

SpectralLaw manova_nonzero_law(const ManovaParams& params) {
  if (params.beta <= 1.0) return manova_law(params);
  validate(params);
  auto edges = manova_edges(params);
  const double gamma = params.gamma;
  // beta * f: the 1/beta in f cancels
  auto shape = [gamma](double x) { return 1.0 / (2.0 * std::numbers::pi * x * (1.0 - gamma * x)); };
  std::vector<Atom> atoms;
  double top = manova_atom_mass(params);
  if (top > 0.0) atoms.push_back({1.0 / gamma, params.beta * top});
  return {edges.r_minus, edges.r_plus, shape, std::move(atoms)};
}

SpectralLaw marchenko_pastur_law(double beta) {
  if (!(beta > 0.0) || beta > 1.0) throw std::invalid_argument("marchenko-pastur beta must lie in (0, 1]");
  double s = std::sqrt(beta);
  auto shape = [beta](double x) { return 1.0 / (2.0 * beta * std::numbers::pi * x); };
  return {(1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s), shape, {}};
}

DensityPoint manova_density(double x, const ManovaParams& params) {
  auto law = manova_law(params);
  DensityPoint out;
  for (const auto& a : law.atoms())
    if (std::abs(x - a.location) <= kAtomTol) out.atom = a;
  if (!out.atom) out.value = law.density(x);
  return out;
}

double manova_cdf(double x, const ManovaParams& params) { return manova_law(params).cdf(x); }

double mp_density(double x, double beta) { return marchenko_pastur_law(beta).density(x); }

double manova_moment_numeric(int d, const ManovaParams& params) {
  if (d < -1) throw std::invalid_argument("moment order must be >= -1");
  if (d == -1 && params.beta >= 1.0)
    throw std::domain_error("inverse moment diverges for beta >= 1");
  auto law = manova_nonzero_law(params);
  double scale = std::min(params.p(), params.gamma);
  return scale * law.expect([d](double t) { return std::pow(t, d); });
}

double manova_moment_closed(int d, const ManovaParams& params) {
  if (d < 1 || d > 6) throw std::invalid_argument("closed-form moments cover d = 1..6");
  const double p = params.p();
  const double x = 1.0 / params.gamma - 1.0;
  switch (d) {
    case 1: return p;
    case 2: return p + p * p * x;
    case 3: return p + 3 * p * p * x + p * p * p * (x * x - x);
    case 4:
      return p + 6 * p * p * x + std::pow(p, 3) * (6 * x * x - 4 * x) +
             std::pow(p, 4) * (x * x * x - 3 * x * x + x);
    default: return asymptotic_moment(d).evaluate(p, x);
  }
}

double manova_ahmr_numeric(const ManovaParams& params) {
  if (params.beta == 1.0) return std::numeric_limits<double>::infinity();
  auto law = manova_nonzero_law(params);
  double mean = law.expect([](double t) { return t; });
  double inv = law.expect([](double t) { return 1.0 / t; });
  return mean * inv;
}

double inverse_moment_amplification(double beta, double p) {
  if (beta == 1.0) return std::numeric_limits<double>::infinity();
  if (beta < 1.0) return (1.0 - p) / (1.0 - beta);
  return (beta - p) / (beta - 1.0);
}

EtaTransform eta_transform_chain(double s, double t, double z) {
  if (s < 0.0 || s >= 1.0 || t < 0.0 || t >= 1.0) throw std::invalid_argument("eta transform needs 0 <= s, t < 1");
  if (z < 0.0) throw std::invalid_argument("eta transform needs z >= 0");
  const double sum = s + t;
  const double disc = 1.0 + (2.0 * sum - 4.0 * s * t) * z + (s - t) * (s - t) * z * z;
  const double eta_tilde = (1.0 + sum * z + std::sqrt(disc)) / (2.0 * (1.0 + z));
  const double top = std::max(s, t);
  EtaTransform out{eta_tilde, (eta_tilde - top) / (1.0 - top), std::numeric_limits<double>::quiet_NaN()};
  if (s != t) out.z_eta_limit = top / std::abs(s - t);
  return out;
}

}  // namespace etfs
