#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "etfspectra/frames.hpp"
#include "etfspectra/spectra.hpp"

namespace etfs {

// beta = k/m, gamma = m/n, p = k/n = beta * gamma.
struct ManovaParams {
  double beta = 0.5;
  double gamma = 0.5;
  Field field = Field::Complex;

  double p() const { return beta * gamma; }
  static ManovaParams from_p(double gamma, double p, Field field = Field::Complex) {
    return {p / gamma, gamma, field};
  }
};

void validate(const ManovaParams& params);

struct SupportEdges {
  double r_minus;
  double r_plus;
};

struct Atom {
  double location;
  double mass;

  // Eigenvalues sitting on an atom come out of floating-point eigensolvers a few
  // ulps to either side of it, so the CDF jump is taken to span a small window.
  static constexpr double kWindow = 1e-9;
  double half_width() const { return kWindow * (location > 1.0 ? location : 1.0); }
  bool counted_in_cdf(double x) const { return location <= x + half_width(); }
  bool counted_in_left_limit(double x) const { return location < x - half_width(); }
};

// A distribution on [0, inf) whose continuous part is
// sqrt((x - lower)(upper - x)) * shape(x) on (lower, upper), plus point masses.
// Integrals use the substitution x = lower + (upper - lower) sin^2(theta), which
// removes the square-root edge behaviour, and adaptive Gauss-Kronrod quadrature.
class SpectralLaw {
 public:
  SpectralLaw(double lower, double upper, std::function<double(double)> shape, std::vector<Atom> atoms);

  double lower_edge() const { return lower_; }
  double upper_edge() const { return upper_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  // Continuous part only; 0 outside (lower, upper).
  double density(double x) const;
  double continuous_mass() const;
  double total_mass() const;
  double cdf(double x) const;
  double cdf_left(double x) const;
  // Integral of psi against the law, atoms included.
  double expect(const std::function<double(double)>& psi) const;
  ReferenceCdf as_reference() const;

 private:
  double integrate_to(double x, const std::function<double(double)>& psi) const;

  double lower_;
  double upper_;
  std::function<double(double)> shape_;
  std::vector<Atom> atoms_;
};

SupportEdges manova_edges(const ManovaParams& params);
double manova_atom_mass(const ManovaParams& params);  // mass at 1/gamma

// Full limiting law: continuous part, atom at 1/gamma and, for beta > 1, the
// (1 - 1/beta) atom at 0.
SpectralLaw manova_law(const ManovaParams& params);
// Law of the nonzero eigenvalues. Same as manova_law for beta <= 1; for
// beta > 1 it is beta times the full law restricted to (0, inf).
SpectralLaw manova_nonzero_law(const ManovaParams& params);
SpectralLaw marchenko_pastur_law(double beta);

struct DensityPoint {
  double value = 0.0;          // continuous part
  std::optional<Atom> atom;    // set when x sits on a point mass
};
DensityPoint manova_density(double x, const ManovaParams& params);
double manova_cdf(double x, const ManovaParams& params);
double mp_density(double x, double beta);

// min(p, gamma) * integral of t^d against the nonzero law. d >= -1; d = -1 needs beta < 1.
double manova_moment_numeric(int d, const ManovaParams& params);
// Exact moment polynomial in (p, x = 1/gamma - 1), d in 1..6.
double manova_moment_closed(int d, const ManovaParams& params);
// Arithmetic-to-harmonic mean ratio of the nonzero law, by quadrature.
double manova_ahmr_numeric(const ManovaParams& params);

// Limit of the AHMR: (1 - p)/(1 - beta) for beta < 1, (beta - p)/(beta - 1) for
// beta > 1. Returns +inf at beta = 1.
double inverse_moment_amplification(double beta, double p);

struct EtaTransform {
  double eta_tilde;
  double eta_normalized;
  double z_eta_limit;  // NaN when s == t
};
EtaTransform eta_transform_chain(double s, double t, double z);

}  // namespace etfs
