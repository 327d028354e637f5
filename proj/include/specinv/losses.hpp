#pragma once

#include "specinv/spectral.hpp"
#include "specinv/types.hpp"

#include <span>

namespace specinv {

// All three losses measure squared distances with spectral_energy, i.e. in
// the two-sided spectrum norm under which G is an orthogonal projection.

/// h(S) = ||X - sum_j S_j||^2
double mixing_error(const SourceSet& S, const ComplexSpectrogram& X);

/// i(S) = sum_j ||S_j - G(S_j)||^2
double inconsistency(const SourceSet& S, const StftConfig& cfg,
                     std::size_t signal_length = 0);

/// m(S) = sum_j || |S_j| - V_j ||^2
double magnitude_mismatch(const SourceSet& S,
                          std::span<const MagnitudeSpectrogram> V);

} // namespace specinv
