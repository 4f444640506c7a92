#ifndef NETSPECTRO_TRACE_HPP
#define NETSPECTRO_TRACE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "netspectro/errors.hpp"

namespace netspectro {

/// One captured packet: arrival time in seconds relative to the trace start
/// and wire size in bytes (0 when the size is unknown).
struct packet_record {
  double timestamp = 0.0;
  std::uint32_t size = 0;
};

/// Ordered packet arrivals. `origin` is the absolute time (seconds since the
/// epoch, informational) that the relative timestamps were rebased against.
struct trace {
  std::vector<packet_record> records;
  double origin = 0.0;
};

/// Packet counts on a uniform grid. Bin t covers [start + t*p, start + (t+1)*p).
struct binned_series {
  double p = 0.0;  ///< sampling period, seconds
  std::vector<std::uint64_t> counts;
  double start = 0.0;

  std::size_t size() const { return counts.size(); }
  double duration() const { return p * static_cast<double>(counts.size()); }
};

/// Counts with the mean removed. `mean_removed` records the subtracted value.
struct centered_series {
  double p = 0.0;
  std::vector<double> values;
  double mean_removed = 0.0;

  std::size_t size() const { return values.size(); }
};

/// Minimum length for the analysis pipeline (center and everything after).
inline constexpr std::size_t min_bins = 4;

/// Count arrivals per bin of width p seconds. The covered span defaults to
/// the last arrival time; a trailing bin with partial coverage is dropped,
/// as are records beyond the span. A timestamp exactly on a bin boundary
/// belongs to the later bin.
inline binned_series bin_trace(const trace& tr, double p,
                               std::optional<double> duration = std::nullopt) {
  if (tr.records.empty()) throw empty_trace();
  if (!(p > 0.0)) throw non_positive_period();

  const double span = duration ? *duration : tr.records.back().timestamp;
  // The nudge keeps an integral span/p from losing its last bin to rounding.
  const double nbins = std::floor(span / p + 1e-9);
  if (!(nbins >= 1.0)) throw too_few_bins(0, 1);

  binned_series out;
  out.p = p;
  out.start = 0.0;
  out.counts.assign(static_cast<std::size_t>(nbins), 0);
  const double n = static_cast<double>(out.counts.size());
  for (const packet_record& r : tr.records) {
    const double idx = std::floor(r.timestamp / p);
    if (idx < 0.0 || idx >= n) continue;
    ++out.counts[static_cast<std::size_t>(idx)];
  }
  return out;
}

/// Remove the mean so downstream spectra have no DC pedestal.
inline centered_series center(const binned_series& b) {
  if (b.counts.size() < min_bins) throw too_few_bins(b.counts.size(), min_bins);
  double sum = 0.0;
  for (std::uint64_t c : b.counts) sum += static_cast<double>(c);
  const double mean = sum / static_cast<double>(b.counts.size());

  centered_series out;
  out.p = b.p;
  out.mean_removed = mean;
  out.values.reserve(b.counts.size());
  for (std::uint64_t c : b.counts) out.values.push_back(static_cast<double>(c) - mean);
  return out;
}

}  // namespace netspectro

#endif
