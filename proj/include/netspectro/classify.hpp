#ifndef NETSPECTRO_CLASSIFY_HPP
#define NETSPECTRO_CLASSIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "netspectro/errors.hpp"
#include "netspectro/spectral.hpp"

namespace netspectro {

enum class net_layer { link, transport, application };
enum class entry_kind { point, band };
enum class periodicity_origin { protocol, application, human };

inline const char* to_string(net_layer l) {
  switch (l) {
    case net_layer::link: return "link";
    case net_layer::transport: return "transport";
    default: return "application";
  }
}

inline const char* to_string(entry_kind k) {
  return k == entry_kind::point ? "point" : "band";
}

inline const char* to_string(periodicity_origin o) {
  switch (o) {
    case periodicity_origin::protocol: return "protocol";
    case periodicity_origin::application: return "application";
    default: return "human";
  }
}

/// A known source of periodic behaviour: either a point period or a period
/// band. Point entries have period_lo_s == period_hi_s.
struct taxonomy_entry {
  std::string source;
  net_layer layer = net_layer::application;
  entry_kind kind = entry_kind::point;
  double period_lo_s = 0.0;
  double period_hi_s = 0.0;
  periodicity_origin origin = periodicity_origin::protocol;

  bool is_point() const { return kind == entry_kind::point; }
  double period() const { return period_lo_s; }
};

/// A link technology, described by line rate and maximum transfer unit.
struct link_tech {
  std::string name;
  double bandwidth_bps = 0.0;
  double mtu_bytes = 0.0;
};

/// Repetition frequency (Hz) of back-to-back packets of the given size on a
/// link moving throughput_bps: throughput / (8 * size).
inline double base_frequency(double throughput_bps, double packet_size_bytes) {
  if (!(throughput_bps > 0.0) || !(packet_size_bytes > 0.0)) throw non_positive_input();
  return throughput_bps / (8.0 * packet_size_bytes);
}

/// Highest base frequency a link can sustain: MTU-sized packets at line rate.
inline double max_base_frequency(const link_tech& link) {
  return base_frequency(link.bandwidth_bps, link.mtu_bytes);
}

/// Built-in table of known traffic periodicities across layers.
inline const std::vector<taxonomy_entry>& builtin_taxonomy() {
  static const std::vector<taxonomy_entry> table = {
      {"SONET frame", net_layer::link, entry_kind::point, 125e-6, 125e-6,
       periodicity_origin::protocol},
      {"Ethernet 1 Gbps MTU-1500 base period", net_layer::link, entry_kind::point,
       1.0 / base_frequency(1e9, 1500.0), 1.0 / base_frequency(1e9, 1500.0),
       periodicity_origin::protocol},
      {"Ethernet 100 Mbps MTU-1500 base period", net_layer::link, entry_kind::point,
       1.0 / base_frequency(1e8, 1500.0), 1.0 / base_frequency(1e8, 1500.0),
       periodicity_origin::protocol},
      {"Ethernet 10 Mbps MTU-1500 base period", net_layer::link, entry_kind::point,
       1.0 / base_frequency(1e7, 1500.0), 1.0 / base_frequency(1e7, 1500.0),
       periodicity_origin::protocol},
      {"TCP/ICMP round-trip echo", net_layer::transport, entry_kind::band, 0.01, 1.0,
       periodicity_origin::protocol},
      {"BGP KEEPALIVE", net_layer::application, entry_kind::point, 30.0, 30.0,
       periodicity_origin::protocol},
      {"BGP KEEPALIVE (60 s configuration)", net_layer::application, entry_kind::point,
       60.0, 60.0, periodicity_origin::protocol},
      {"BGP route-flap damping", net_layer::application, entry_kind::point, 3600.0,
       3600.0, periodicity_origin::protocol},
      {"DNS update (75 min)", net_layer::application, entry_kind::point, 4500.0, 4500.0,
       periodicity_origin::application},
      {"DNS update (1 h)", net_layer::application, entry_kind::point, 3600.0, 3600.0,
       periodicity_origin::application},
      {"DNS update (24 h)", net_layer::application, entry_kind::point, 86400.0, 86400.0,
       periodicity_origin::application},
      {"diurnal cycle", net_layer::application, entry_kind::point, 86400.0, 86400.0,
       periodicity_origin::human},
      {"diurnal cycle, second harmonic", net_layer::application, entry_kind::point,
       43200.0, 43200.0, periodicity_origin::human},
      {"weekly cycle", net_layer::application, entry_kind::point, 604800.0, 604800.0,
       periodicity_origin::human},
      {"weekly cycle, second harmonic", net_layer::application, entry_kind::point,
       302400.0, 302400.0, periodicity_origin::human},
      {"weekly cycle, third harmonic", net_layer::application, entry_kind::point,
       604800.0 / 3.0, 604800.0 / 3.0, periodicity_origin::human},
  };
  return table;
}

enum class nondetect_reason { none, nyquist, duration };

inline const char* to_string(nondetect_reason r) {
  switch (r) {
    case nondetect_reason::nyquist: return "nyquist";
    case nondetect_reason::duration: return "duration";
    default: return "";
  }
}

struct detect_verdict {
  bool detectable = false;
  nondetect_reason reason = nondetect_reason::none;
};

/// Whether a period can show up at all in a series of n bins of width p:
/// it must clear the Nyquist limit (period >= 2p) and fit at least two full
/// cycles into the observation window (period <= p*n/2).
inline detect_verdict detectability(double period_s, double p, std::size_t n) {
  if (!(period_s > 0.0) || !(p > 0.0)) throw non_positive_input();
  if (period_s < 2.0 * p) return {false, nondetect_reason::nyquist};
  if (period_s > p * static_cast<double>(n) / 2.0) return {false, nondetect_reason::duration};
  return {true, nondetect_reason::none};
}

struct classification_match {
  double detected_period_s = 0.0;
  taxonomy_entry entry;
  double relative_error = 0.0;  ///< |T - T0| / T0 for point entries, 0 in-band
  bool in_band = false;         ///< band entries: detected period falls inside
  detect_verdict verdict;
};

struct classify_options {
  double rel_tol = 0.05;
  std::vector<link_tech> links;            ///< extra point entries, one per link
  std::vector<taxonomy_entry> extra_entries;
  bool include_builtin = true;
};

/// All taxonomy entries compatible with a detected period: point entries
/// within rel_tol relative error, band entries containing the period. Point
/// matches come first, ordered by relative error; every match carries the
/// detectability verdict for the measurement geometry (p, n).
inline std::vector<classification_match> classify_period(double period_s, double p,
                                                         std::size_t n,
                                                         const classify_options& opt = {}) {
  if (!(period_s > 0.0)) throw non_positive_input();
  if (!(opt.rel_tol >= 0.0)) throw parameter_error("rel_tol must be non-negative");

  std::vector<taxonomy_entry> entries;
  if (opt.include_builtin) entries = builtin_taxonomy();
  entries.insert(entries.end(), opt.extra_entries.begin(), opt.extra_entries.end());
  for (const link_tech& link : opt.links) {
    const double period = 1.0 / max_base_frequency(link);
    entries.push_back({link.name + " base period", net_layer::link, entry_kind::point,
                       period, period, periodicity_origin::protocol});
  }

  const detect_verdict verdict = detectability(period_s, p, n);
  std::vector<classification_match> out;
  for (const taxonomy_entry& e : entries) {
    classification_match m;
    m.detected_period_s = period_s;
    m.entry = e;
    m.verdict = verdict;
    if (e.is_point()) {
      m.relative_error = std::fabs(period_s - e.period()) / e.period();
      if (m.relative_error <= opt.rel_tol) out.push_back(m);
    } else if (period_s >= e.period_lo_s && period_s <= e.period_hi_s) {
      m.in_band = true;
      out.push_back(m);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const classification_match& a, const classification_match& b) {
                     if (a.in_band != b.in_band) return !a.in_band;  // points first
                     if (a.in_band) return false;
                     return a.relative_error < b.relative_error;
                   });
  return out;
}

/// Harmonic groups annotated with taxonomy matches.
struct periodicity_report {
  double p = 0.0;
  std::size_t n_bins = 0;
  std::vector<harmonic_group> groups;
  std::vector<std::vector<classification_match>> matches;  ///< per group
  std::vector<double> unmatched_periods_s;                 ///< fundamentals with no match
};

/// Classify every group fundamental against the taxonomy.
inline periodicity_report make_report(const std::vector<harmonic_group>& groups, double p,
                                      std::size_t n_bins,
                                      const classify_options& opt = {}) {
  periodicity_report rep;
  rep.p = p;
  rep.n_bins = n_bins;
  rep.groups = groups;
  for (const harmonic_group& g : groups) {
    auto matches = classify_period(g.fundamental.period_s, p, n_bins, opt);
    if (matches.empty()) rep.unmatched_periods_s.push_back(g.fundamental.period_s);
    rep.matches.push_back(std::move(matches));
  }
  return rep;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_layer(const std::string& s, net_layer& out) {
  if (s == "link") out = net_layer::link;
  else if (s == "transport") out = net_layer::transport;
  else if (s == "application") out = net_layer::application;
  else return false;
  return true;
}

inline bool parse_origin(const std::string& s, periodicity_origin& out) {
  if (s == "protocol") out = periodicity_origin::protocol;
  else if (s == "application") out = periodicity_origin::application;
  else if (s == "human") out = periodicity_origin::human;
  else return false;
  return true;
}

inline bool parse_double(const std::string& s, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size() && out > 0.0;
}

}  // namespace detail

/// Read extra taxonomy entries, one per line:
///   source:layer:kind:period:origin          (point, period in seconds)
///   source:layer:band:lo,hi:origin           (band, bounds in seconds)
/// Blank lines and lines starting with '#' are ignored.
inline std::vector<taxonomy_entry> parse_taxonomy(std::istream& in) {
  std::vector<taxonomy_entry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;

    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(t);
    while (std::getline(ss, field, ':')) fields.push_back(detail::trim(field));
    if (fields.size() != 5) throw malformed_line(line_no);

    taxonomy_entry e;
    e.source = fields[0];
    if (e.source.empty()) throw malformed_line(line_no);
    if (!detail::parse_layer(fields[1], e.layer)) throw malformed_line(line_no);
    if (!detail::parse_origin(fields[4], e.origin)) throw malformed_line(line_no);
    if (fields[2] == "point") {
      e.kind = entry_kind::point;
      if (!detail::parse_double(fields[3], e.period_lo_s)) throw malformed_line(line_no);
      e.period_hi_s = e.period_lo_s;
    } else if (fields[2] == "band") {
      e.kind = entry_kind::band;
      const auto comma = fields[3].find(',');
      if (comma == std::string::npos) throw malformed_line(line_no);
      if (!detail::parse_double(detail::trim(fields[3].substr(0, comma)), e.period_lo_s) ||
          !detail::parse_double(detail::trim(fields[3].substr(comma + 1)), e.period_hi_s) ||
          e.period_hi_s < e.period_lo_s)
        throw malformed_line(line_no);
    } else {
      throw malformed_line(line_no);
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace netspectro

#endif
