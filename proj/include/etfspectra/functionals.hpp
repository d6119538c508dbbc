#pragma once

#include <string_view>
#include <variant>

#include "etfspectra/manova.hpp"
#include "etfspectra/spectra.hpp"

namespace etfs {

enum class FunctionalKind { RIP, StRIP, AC, Shannon, Max, Min, Cond };

struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::AC;
  double delta = 0.1;  // StRIP threshold
  double alpha = 1.0;  // Shannon SNR weight
};

std::string_view to_string(FunctionalKind kind);
FunctionalKind parse_functional(std::string_view name);
void validate(const FunctionalSpec& spec);

// AC and Cond return +inf when an eigenvalue is (clamped to) zero.
// Shannon uses natural logs and the 1/k normalization.
double evaluate(const FunctionalSpec& spec, const SubsetSpectrum& spectrum);

struct MarchenkoPasturParams {
  double beta;
};
using LimitParams = std::variant<ManovaParams, MarchenkoPasturParams>;

// Value of the functional on the limiting law. Spectral-edge functionals use
// the support edges; AC and Shannon integrate against the law.
double limiting_value(const FunctionalSpec& spec, const LimitParams& params);

}  // namespace etfs
