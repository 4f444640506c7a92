#ifndef NETSPECTRO_SYNTH_HPP
#define NETSPECTRO_SYNTH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "netspectro/errors.hpp"
#include "netspectro/trace.hpp"

namespace netspectro {

/// Memoryless background arrivals at a fixed rate.
struct poisson_background {
  double rate_pps = 0.0;
};

/// Fixed-period bursts: each window start is period-aligned plus Gaussian
/// jitter; packets_per_burst arrivals spread uniformly over burst_len_s
/// (all at the window start when burst_len_s is 0). An optional active
/// window restricts which burst slots fire.
struct periodic_burst {
  double period_s = 0.0;
  double burst_len_s = 0.0;
  std::uint64_t packets_per_burst = 1;
  double jitter_sd_s = 0.0;
  std::optional<std::array<double, 2>> active_s;
};

/// Inhomogeneous Poisson arrivals with a sinusoidally modulated rate
/// base * (1 + depth * sin(2 pi t / period)).
struct sine_rate {
  double base_rate_pps = 0.0;
  double mod_depth = 0.0;
  double period_s = 0.0;
};

/// A keepalive impulse train plus a Poisson packet flood gated by a duty
/// cycle: the flood is on for the first duty fraction of every damp period.
struct flap_pattern {
  double keepalive_period_s = 30.0;
  double flap_burst_rate_pps = 5.0;
  double damp_period_s = 3600.0;
  double duty = 0.5;
};

using component =
    std::variant<poisson_background, periodic_burst, sine_rate, flap_pattern>;

struct gen_spec {
  double duration_s = 0.0;
  std::uint64_t seed = 0;
  std::vector<component> components;
};

namespace detail {

// Stateless 64-bit mix (splitmix64 finalizer); decorrelates per-component
// seeds derived from one user seed.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic sampling helpers over a fixed engine. The transforms are
// pinned here (rather than std::*_distribution) because distribution
// implementations vary across standard libraries and output bytes must not.
struct sampler {
  explicit sampler(std::uint64_t seed) : eng(seed) {}

  double uniform01() {  // [0, 1)
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  double normal(double sd) {
    if (have_spare) {
      have_spare = false;
      return spare * sd;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi_v<double> * u2;
    spare = r * std::sin(t);
    have_spare = true;
    return r * std::cos(t) * sd;
  }

  std::mt19937_64 eng;
  double spare = 0.0;
  bool have_spare = false;
};

}  // namespace detail

inline void validate(const gen_spec& spec) {
  if (!(spec.duration_s > 0.0)) throw invalid_spec("duration must be positive");
  if (spec.components.empty()) throw invalid_spec("at least one component is required");
  for (const component& c : spec.components) {
    if (const auto* pb = std::get_if<poisson_background>(&c)) {
      if (!(pb->rate_pps >= 0.0)) throw invalid_spec("poisson rate must be >= 0");
    } else if (const auto* b = std::get_if<periodic_burst>(&c)) {
      if (!(b->period_s > 0.0)) throw invalid_spec("burst period must be positive");
      if (!(b->burst_len_s >= 0.0) || b->burst_len_s >= b->period_s)
        throw invalid_spec("burst length must lie in [0, period)");
      if (!(b->jitter_sd_s >= 0.0)) throw invalid_spec("jitter must be >= 0");
      if (b->active_s && !((*b->active_s)[0] <= (*b->active_s)[1]))
        throw invalid_spec("active window must be ordered");
    } else if (const auto* s = std::get_if<sine_rate>(&c)) {
      if (!(s->base_rate_pps >= 0.0)) throw invalid_spec("base rate must be >= 0");
      if (!(s->mod_depth >= 0.0 && s->mod_depth <= 1.0))
        throw invalid_spec("modulation depth must lie in [0, 1]");
      if (!(s->period_s > 0.0)) throw invalid_spec("modulation period must be positive");
    } else if (const auto* f = std::get_if<flap_pattern>(&c)) {
      if (!(f->keepalive_period_s > 0.0)) throw invalid_spec("keepalive period must be positive");
      if (!(f->flap_burst_rate_pps >= 0.0)) throw invalid_spec("flap rate must be >= 0");
      if (!(f->damp_period_s > 0.0)) throw invalid_spec("damp period must be positive");
      if (!(f->duty >= 0.0 && f->duty <= 1.0)) throw invalid_spec("duty must lie in [0, 1]");
    }
  }
}

/// Seed for the index-th component of a spec seeded with `seed`. Components
/// draw from independent streams, so adding or removing one never perturbs
/// the arrivals of the others.
inline std::uint64_t component_seed(std::uint64_t seed, std::size_t index) {
  return detail::mix64(seed ^ detail::mix64(static_cast<std::uint64_t>(index) + 1));
}

/// Arrival times (seconds, sorted, within [0, duration)) of one component.
inline std::vector<double> generate_component(const component& c, std::uint64_t sub_seed,
                                              double duration_s) {
  detail::sampler rng(sub_seed);
  std::vector<double> times;

  if (const auto* pb = std::get_if<poisson_background>(&c)) {
    if (pb->rate_pps > 0.0) {
      for (double t = rng.exponential(pb->rate_pps); t < duration_s;
           t += rng.exponential(pb->rate_pps))
        times.push_back(t);
    }
  } else if (const auto* b = std::get_if<periodic_burst>(&c)) {
    for (std::uint64_t k = 0;; ++k) {
      const double slot = static_cast<double>(k) * b->period_s;
      if (slot >= duration_s) break;
      if (b->active_s && (slot < (*b->active_s)[0] || slot > (*b->active_s)[1])) continue;
      const double start = slot + (b->jitter_sd_s > 0.0 ? rng.normal(b->jitter_sd_s) : 0.0);
      for (std::uint64_t i = 0; i < b->packets_per_burst; ++i) {
        const double t =
            b->burst_len_s > 0.0 ? start + rng.uniform01() * b->burst_len_s : start;
        if (t >= 0.0 && t < duration_s) times.push_back(t);
      }
    }
    std::sort(times.begin(), times.end());
  } else if (const auto* s = std::get_if<sine_rate>(&c)) {
    // Thinning against the peak rate keeps exactness without stepping.
    const double max_rate = s->base_rate_pps * (1.0 + s->mod_depth);
    if (max_rate > 0.0) {
      const double w = 2.0 * std::numbers::pi_v<double> / s->period_s;
      for (double t = rng.exponential(max_rate); t < duration_s;
           t += rng.exponential(max_rate)) {
        const double rate = s->base_rate_pps * (1.0 + s->mod_depth * std::sin(w * t));
        if (rng.uniform01() * max_rate < rate) times.push_back(t);
      }
    }
  } else if (const auto* f = std::get_if<flap_pattern>(&c)) {
    std::vector<double> flood;
    if (f->flap_burst_rate_pps > 0.0 && f->duty > 0.0) {
      for (double t = rng.exponential(f->flap_burst_rate_pps); t < duration_s;
           t += rng.exponential(f->flap_burst_rate_pps)) {
        if (std::fmod(t, f->damp_period_s) < f->duty * f->damp_period_s)
          flood.push_back(t);
      }
    }
    std::vector<double> keep;
    for (std::uint64_t k = 0;; ++k) {
      const double t = static_cast<double>(k) * f->keepalive_period_s;
      if (t >= duration_s) break;
      keep.push_back(t);
    }
    times.resize(flood.size() + keep.size());
    std::merge(flood.begin(), flood.end(), keep.begin(), keep.end(), times.begin());
  }
  return times;
}

/// Generate a trace by superposing all components. The result is sorted and
/// fully determined by the spec (same spec, same bytes); ties across
/// components keep the component order.
inline trace generate(const gen_spec& spec) {
  validate(spec);
  trace tr;
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    const std::vector<double> times =
        generate_component(spec.components[i], component_seed(spec.seed, i), spec.duration_s);
    tr.records.reserve(tr.records.size() + times.size());
    for (double t : times) tr.records.push_back({t, 0});
  }
  std::stable_sort(tr.records.begin(), tr.records.end(),
                   [](const packet_record& a, const packet_record& b) {
                     return a.timestamp < b.timestamp;
                   });
  return tr;
}

namespace detail {

inline void put_u16le(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  os.write(b, 2);
}

inline void put_u32le(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>(v >> 24)};
  os.write(b, 4);
}

}  // namespace detail

/// Write a classic microsecond pcap stream with header-only records
/// (incl_len 0). Timestamps are truncated to whole microseconds; a record
/// whose size is unknown (0) is written with orig_len 60, the minimum
/// Ethernet frame. Returns the number of records written.
inline std::size_t write_pcap(const trace& tr, std::ostream& os) {
  if (tr.records.empty()) throw empty_trace();
  detail::put_u32le(os, 0xa1b2c3d4u);  // magic, microsecond timestamps
  detail::put_u16le(os, 2);            // version 2.4
  detail::put_u16le(os, 4);
  detail::put_u32le(os, 0);      // thiszone
  detail::put_u32le(os, 0);      // sigfigs
  detail::put_u32le(os, 65535);  // snaplen
  detail::put_u32le(os, 1);      // LINKTYPE_ETHERNET

  for (const packet_record& r : tr.records) {
    const double abs_ts = tr.origin + r.timestamp;
    auto sec = static_cast<std::uint32_t>(std::floor(abs_ts));
    auto usec = static_cast<std::uint32_t>(std::floor((abs_ts - std::floor(abs_ts)) * 1e6));
    if (usec >= 1000000u) {  // guard against rounding at a second boundary
      sec += 1;
      usec = 0;
    }
    detail::put_u32le(os, sec);
    detail::put_u32le(os, usec);
    detail::put_u32le(os, 0);
    detail::put_u32le(os, r.size != 0 ? r.size : 60u);
  }
  if (!os) throw io_failure("pcap write failed");
  return tr.records.size();
}

/// Write "timestamp size" lines, timestamps with nanosecond precision.
inline std::size_t write_text_trace(const trace& tr, std::ostream& os) {
  if (tr.records.empty()) throw empty_trace();
  char line[64];
  for (const packet_record& r : tr.records) {
    std::snprintf(line, sizeof line, "%.9f %u\n", tr.origin + r.timestamp, r.size);
    os << line;
  }
  if (!os) throw io_failure("trace write failed");
  return tr.records.size();
}

}  // namespace netspectro

#endif
