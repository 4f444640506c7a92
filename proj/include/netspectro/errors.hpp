#ifndef NETSPECTRO_ERRORS_HPP
#define NETSPECTRO_ERRORS_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace netspectro {

/// Base class for everything thrown by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The data being read is unusable (bad files, empty traces).
struct input_error : error {
  using error::error;
};

/// An argument is outside the operation's contract.
struct parameter_error : error {
  using error::error;
};

struct empty_trace : input_error {
  empty_trace() : input_error("trace contains no records") {}
};

struct file_error : input_error {
  explicit file_error(const std::string& path)
      : input_error("cannot open '" + path + "'") {}
};

struct io_failure : input_error {
  explicit io_failure(const std::string& what) : input_error(what) {}
};

struct malformed_line : input_error {
  explicit malformed_line(std::size_t line_no)
      : input_error("malformed record on line " + std::to_string(line_no)),
        line(line_no) {}
  std::size_t line;
};

struct bad_magic : input_error {
  explicit bad_magic(std::uint32_t magic)
      : input_error("not a classic microsecond pcap stream (magic 0x" +
                    to_hex(magic) + ")"),
        magic(magic) {}
  std::uint32_t magic;

 private:
  static std::string to_hex(std::uint32_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(8, '0');
    for (int i = 7; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
  }
};

struct truncated_header : input_error {
  truncated_header() : input_error("pcap stream shorter than its global header") {}
};

struct non_positive_period : parameter_error {
  non_positive_period() : parameter_error("sampling period must be positive") {}
};

struct too_few_bins : parameter_error {
  too_few_bins(std::size_t n, std::size_t required)
      : parameter_error("series has " + std::to_string(n) + " bins; at least " +
                        std::to_string(required) + " required"),
        bins(n) {}
  std::size_t bins;
};

struct lag_out_of_range : parameter_error {
  lag_out_of_range(std::size_t lag, std::size_t n)
      : parameter_error("max lag " + std::to_string(lag) +
                        " outside [1, " + std::to_string(n ? n - 1 : 0) + "]") {}
};

struct degenerate_acvf : parameter_error {
  explicit degenerate_acvf(std::size_t m)
      : parameter_error("autocovariance needs at least 2 lags, got " +
                        std::to_string(m)) {}
};

struct series_too_short : parameter_error {
  explicit series_too_short(std::size_t n)
      : parameter_error("series of " + std::to_string(n) +
                        " samples is too short for a wavelet transform") {}
};

struct grid_exceeds_series : parameter_error {
  grid_exceeds_series(double max_period, std::size_t n)
      : parameter_error("largest scale has equivalent period " +
                        std::to_string(max_period) + " samples, beyond the " +
                        std::to_string(n) + "-sample series") {}
};

struct empty_band : parameter_error {
  empty_band() : parameter_error("period band intersects no scalogram row") {}
};

struct no_peak : error {
  no_peak() : error("no spectral peak found") {}
};

struct non_positive_input : parameter_error {
  non_positive_input() : parameter_error("inputs must be positive") {}
};

struct invalid_spec : parameter_error {
  explicit invalid_spec(const std::string& what)
      : parameter_error("invalid generator spec: " + what) {}
};

}  // namespace netspectro

#endif
