#include "etfspectra/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace etfs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct KindName {
  FunctionalKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {FunctionalKind::RIP, "rip"}, {FunctionalKind::StRIP, "strip"}, {FunctionalKind::AC, "ac"},
    {FunctionalKind::Shannon, "shannon"}, {FunctionalKind::Max, "max"}, {FunctionalKind::Min, "min"},
    {FunctionalKind::Cond, "cond"},
};

double rip_of(double lo, double hi) { return std::max(hi - 1.0, 1.0 - lo); }

}  // namespace

std::string_view to_string(FunctionalKind kind) {
  for (const auto& e : kKindNames)
    if (e.kind == kind) return e.name;
  return "unknown";
}

FunctionalKind parse_functional(std::string_view name) {
  for (const auto& e : kKindNames)
    if (e.name == name) return e.kind;
  throw std::invalid_argument("unknown functional: " + std::string(name));
}

void validate(const FunctionalSpec& spec) {
  if (spec.kind == FunctionalKind::StRIP && !(spec.delta > 0.0)) throw std::invalid_argument("StRIP needs delta > 0");
  if (spec.kind == FunctionalKind::Shannon && spec.alpha < 0.0) throw std::invalid_argument("Shannon needs alpha >= 0");
}

double evaluate(const FunctionalSpec& spec, const SubsetSpectrum& spectrum) {
  validate(spec);
  const auto& ev = spectrum.eigenvalues;
  if (ev.empty()) throw std::invalid_argument("functional of an empty spectrum");
  const auto [lo_it, hi_it] = std::minmax_element(ev.begin(), ev.end());
  const double lo = *lo_it, hi = *hi_it;

  switch (spec.kind) {
    case FunctionalKind::RIP: return rip_of(lo, hi);
    case FunctionalKind::StRIP: return rip_of(lo, hi) <= spec.delta ? 1.0 : 0.0;
    case FunctionalKind::Max: return hi;
    case FunctionalKind::Min: return lo;
    case FunctionalKind::Cond: return lo <= kZeroClamp ? kInf : hi / lo;
    case FunctionalKind::AC: {
      if (lo <= kZeroClamp) return kInf;
      double sum = 0.0, inv = 0.0;
      for (double v : ev) {
        sum += v;
        inv += 1.0 / v;
      }
      const double r = double(ev.size());
      return (inv / r) * (sum / r);
    }
    case FunctionalKind::Shannon: {
      double acc = 0.0;
      for (double v : ev) acc += std::log1p(spec.alpha * v);
      return acc / double(spectrum.k);
    }
  }
  throw std::logic_error("unhandled functional kind");
}

double limiting_value(const FunctionalSpec& spec, const LimitParams& params) {
  validate(spec);
  const bool is_mp = std::holds_alternative<MarchenkoPasturParams>(params);
  double lo, hi;
  if (is_mp) {
    double s = std::sqrt(std::get<MarchenkoPasturParams>(params).beta);
    lo = (1.0 - s) * (1.0 - s);
    hi = (1.0 + s) * (1.0 + s);
  } else {
    auto edges = manova_edges(std::get<ManovaParams>(params));
    lo = edges.r_minus;
    hi = edges.r_plus;
  }

  switch (spec.kind) {
    case FunctionalKind::RIP: return rip_of(lo, hi);
    case FunctionalKind::StRIP: return rip_of(lo, hi) <= spec.delta ? 1.0 : 0.0;
    case FunctionalKind::Max: return hi;
    case FunctionalKind::Min: return lo;
    case FunctionalKind::Cond:
      if (lo <= 0.0) throw std::domain_error("condition number limit is undefined at beta = 1");
      return hi / lo;
    case FunctionalKind::AC: {
      if (lo <= 0.0) throw std::domain_error("AC limit is undefined at beta = 1");
      SpectralLaw law = is_mp ? marchenko_pastur_law(std::get<MarchenkoPasturParams>(params).beta)
                              : manova_nonzero_law(std::get<ManovaParams>(params));
      double mean = law.expect([](double t) { return t; });
      double inv = law.expect([](double t) { return 1.0 / t; });
      return mean * inv;
    }
    case FunctionalKind::Shannon: {
      SpectralLaw law = is_mp ? marchenko_pastur_law(std::get<MarchenkoPasturParams>(params).beta)
                              : manova_law(std::get<ManovaParams>(params));
      const double alpha = spec.alpha;
      return law.expect([alpha](double t) { return std::log1p(alpha * t); });
    }
  }
  throw std::logic_error("unhandled functional kind");
}

}  // namespace etfs
