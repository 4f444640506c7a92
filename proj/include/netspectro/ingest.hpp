#ifndef NETSPECTRO_INGEST_HPP
#define NETSPECTRO_INGEST_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "netspectro/errors.hpp"
#include "netspectro/trace.hpp"

namespace netspectro {

enum class source_format { text, pcap };

struct ingest_report {
  std::size_t records_read = 0;
  std::size_t records_skipped = 0;   ///< blank/comment lines (text only)
  std::size_t reordered = 0;         ///< records that arrived out of order
  source_format format = source_format::text;
  bool truncated = false;            ///< pcap stream ended mid-record
};

struct ingest_result {
  trace tr;
  ingest_report report;
};

namespace detail {

// Rebase to the earliest timestamp and sort. Returns how many records were
// out of order on the way in.
inline std::size_t finalize_trace(std::vector<packet_record>& recs, double& origin) {
  double min_ts = std::numeric_limits<double>::infinity();
  std::size_t reordered = 0;
  double prev = -std::numeric_limits<double>::infinity();
  for (const packet_record& r : recs) {
    if (r.timestamp < prev) ++reordered;
    prev = r.timestamp;
    min_ts = std::min(min_ts, r.timestamp);
  }
  origin = min_ts;
  for (packet_record& r : recs) r.timestamp -= min_ts;
  std::stable_sort(recs.begin(), recs.end(),
                   [](const packet_record& a, const packet_record& b) {
                     return a.timestamp < b.timestamp;
                   });
  return reordered;
}

}  // namespace detail

/// Read a whitespace-separated text trace: one record per line, absolute
/// timestamp in seconds plus an optional size in bytes. Blank lines and
/// lines starting with '#' are skipped. Timestamps are rebased so the
/// earliest becomes 0; out-of-order records are sorted and counted.
inline ingest_result read_text_trace(std::istream& in) {
  ingest_result res;
  res.report.format = source_format::text;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      ++res.report.records_skipped;
      continue;
    }

    std::istringstream ss(line);
    double ts = 0.0;
    if (!(ss >> ts) || !std::isfinite(ts)) throw malformed_line(line_no);
    long long size = 0;
    std::string tail;
    if (ss >> tail) {
      std::size_t used = 0;
      try {
        size = std::stoll(tail, &used);
      } catch (const std::exception&) {
        throw malformed_line(line_no);
      }
      if (used != tail.size() || size < 0 ||
          size > std::numeric_limits<std::uint32_t>::max())
        throw malformed_line(line_no);
      if (ss >> tail) throw malformed_line(line_no);  // trailing junk
    }
    res.tr.records.push_back({ts, static_cast<std::uint32_t>(size)});
    ++res.report.records_read;
  }

  if (res.tr.records.empty()) throw empty_trace();
  res.report.reordered = detail::finalize_trace(res.tr.records, res.tr.origin);
  return res;
}

namespace detail {

inline std::uint32_t get_u32(const unsigned char* b, bool swap) {
  std::uint32_t v = static_cast<std::uint32_t>(b[0]) |
                    static_cast<std::uint32_t>(b[1]) << 8 |
                    static_cast<std::uint32_t>(b[2]) << 16 |
                    static_cast<std::uint32_t>(b[3]) << 24;
  if (swap)
    v = (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
  return v;
}

}  // namespace detail

/// Read a classic pcap capture (microsecond timestamps, either byte order).
/// Only record headers are interpreted: timestamp and original length.
/// Payload bytes are skipped. A stream that ends mid-record keeps the
/// records seen so far and sets the truncated flag.
inline ingest_result read_pcap(std::istream& in) {
  ingest_result res;
  res.report.format = source_format::pcap;

  unsigned char hdr[24];
  in.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  if (in.gcount() != sizeof hdr) throw truncated_header();

  const std::uint32_t magic = detail::get_u32(hdr, false);
  bool swap = false;
  if (magic == 0xa1b2c3d4u) swap = false;
  else if (magic == 0xd4c3b2a1u) swap = true;
  else throw bad_magic(magic);

  unsigned char rec[16];
  std::vector<char> skip_buf;
  for (;;) {
    in.read(reinterpret_cast<char*>(rec), sizeof rec);
    const std::streamsize got = in.gcount();
    if (got == 0) break;  // clean end of stream
    if (got != sizeof rec) {
      res.report.truncated = true;
      break;
    }
    const std::uint32_t sec = detail::get_u32(rec + 0, swap);
    const std::uint32_t usec = detail::get_u32(rec + 4, swap);
    const std::uint32_t incl_len = detail::get_u32(rec + 8, swap);
    const std::uint32_t orig_len = detail::get_u32(rec + 12, swap);

    const double ts = static_cast<double>(sec) + static_cast<double>(usec) * 1e-6;
    res.tr.records.push_back({ts, orig_len});
    ++res.report.records_read;

    if (incl_len > 0) {
      skip_buf.resize(incl_len);
      in.read(skip_buf.data(), incl_len);
      if (in.gcount() != static_cast<std::streamsize>(incl_len)) {
        res.report.truncated = true;
        break;
      }
    }
  }

  if (res.tr.records.empty()) throw empty_trace();
  res.report.reordered = detail::finalize_trace(res.tr.records, res.tr.origin);
  return res;
}

}  // namespace netspectro

#endif
