#include "specinv/metrics.hpp"

#include "summation.hpp"

#include <algorithm>
#include <cmath>

namespace specinv {

double sdr(const std::vector<double>& reference,
           const std::vector<double>& estimate)
{
  if (reference.size() != estimate.size())
    throw InvalidArgument("length mismatch: reference has " +
                          std::to_string(reference.size()) +
                          " samples, estimate " +
                          std::to_string(estimate.size()));
  std::vector<double> ref_sq(reference.size()), err_sq(reference.size());
  for (std::size_t n = 0; n < reference.size(); ++n)
  {
    const double e = reference[n] - estimate[n];
    ref_sq[n] = reference[n] * reference[n];
    err_sq[n] = e * e;
  }
  const double signal = detail::pairwise_sum(ref_sq);
  const double error = detail::pairwise_sum(err_sq);
  if (!(signal > 0.0)) throw InvalidArgument("undefined SDR: zero reference");
  if (error == 0.0) return kSdrCapDb;
  return std::min(kSdrCapDb, 10.0 * std::log10(signal / error));
}

double sdr(const TimeSignal& reference, const TimeSignal& estimate)
{
  return sdr(reference.samples, estimate.samples);
}

SdrSummary sdr_batch(
    const std::vector<std::pair<TimeSignal, TimeSignal>>& pairs)
{
  if (pairs.empty()) throw InvalidArgument("empty batch");
  SdrSummary out;
  out.per_item_db.reserve(pairs.size());
  for (const auto& [ref, est] : pairs) out.per_item_db.push_back(sdr(ref, est));
  out.mean_db = detail::pairwise_sum(out.per_item_db) /
                static_cast<double>(out.per_item_db.size());
  return out;
}

} // namespace specinv
