#pragma once

#include "specinv/types.hpp"

#include <utility>
#include <vector>

namespace specinv {

/// Value reported when the estimate matches the reference exactly.
inline constexpr double kSdrCapDb = 300.0;

/// Plain SDR, 20 log10(||ref|| / ||ref - est||), capped at kSdrCapDb.
double sdr(const TimeSignal& reference, const TimeSignal& estimate);
double sdr(const std::vector<double>& reference,
           const std::vector<double>& estimate);

struct SdrSummary
{
  double mean_db = 0.0;
  std::vector<double> per_item_db;
};

SdrSummary sdr_batch(
    const std::vector<std::pair<TimeSignal, TimeSignal>>& pairs);

} // namespace specinv
