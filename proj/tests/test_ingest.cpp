#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "netspectro/ingest.hpp"
#include "netspectro/synth.hpp"

using namespace netspectro;

namespace {

ingest_result from_text(const std::string& body) {
  std::istringstream in(body);
  return read_text_trace(in);
}

void put32(std::string& s, std::uint32_t v, bool be) {
  char b[4];
  if (be) {
    b[0] = static_cast<char>(v >> 24);
    b[1] = static_cast<char>((v >> 16) & 0xff);
    b[2] = static_cast<char>((v >> 8) & 0xff);
    b[3] = static_cast<char>(v & 0xff);
  } else {
    b[0] = static_cast<char>(v & 0xff);
    b[1] = static_cast<char>((v >> 8) & 0xff);
    b[2] = static_cast<char>((v >> 16) & 0xff);
    b[3] = static_cast<char>(v >> 24);
  }
  s.append(b, 4);
}

void put16(std::string& s, std::uint16_t v, bool be) {
  char b[2];
  if (be) {
    b[0] = static_cast<char>(v >> 8);
    b[1] = static_cast<char>(v & 0xff);
  } else {
    b[0] = static_cast<char>(v & 0xff);
    b[1] = static_cast<char>(v >> 8);
  }
  s.append(b, 2);
}

std::string pcap_header(bool be, std::uint32_t magic = 0xa1b2c3d4u) {
  std::string s;
  put32(s, magic, be);
  put16(s, 2, be);
  put16(s, 4, be);
  put32(s, 0, be);
  put32(s, 0, be);
  put32(s, 65535, be);
  put32(s, 1, be);
  return s;
}

void pcap_record(std::string& s, bool be, std::uint32_t sec, std::uint32_t usec,
                 std::uint32_t incl, std::uint32_t orig) {
  put32(s, sec, be);
  put32(s, usec, be);
  put32(s, incl, be);
  put32(s, orig, be);
}

}  // namespace

TEST_CASE("text trace with optional sizes") {
  const ingest_result res = from_text("0.0\n0.5 1500\n1.0\n");
  REQUIRE(res.tr.records.size() == 3);
  CHECK(res.tr.origin == 0.0);
  CHECK(res.tr.records[0].size == 0);
  CHECK(res.tr.records[1].size == 1500);
  CHECK(res.tr.records[2].size == 0);
  CHECK(res.report.records_read == 3);
  CHECK(res.report.records_skipped == 0);
  CHECK(res.report.reordered == 0);
  CHECK(res.report.format == source_format::text);
}

TEST_CASE("text trace rebases to the earliest timestamp") {
  const ingest_result res = from_text("100.5\n101.5\n");
  REQUIRE(res.tr.records.size() == 2);
  CHECK(res.tr.origin == 100.5);
  CHECK(res.tr.records[0].timestamp == 0.0);
  CHECK(res.tr.records[1].timestamp == 1.0);
}

TEST_CASE("text trace skips blanks and comments, counts them") {
  const ingest_result res = from_text("# capture start\n\n1.0\n  \n2.0\n");
  CHECK(res.tr.records.size() == 2);
  CHECK(res.report.records_skipped == 3);
}

TEST_CASE("text trace sorts out-of-order records and counts them") {
  const ingest_result res = from_text("2.0\n1.0\n3.0\n");
  REQUIRE(res.tr.records.size() == 3);
  CHECK(res.report.reordered == 1);
  CHECK(res.tr.origin == 1.0);
  CHECK(res.tr.records[0].timestamp == 0.0);
  CHECK(res.tr.records[1].timestamp == 1.0);
  CHECK(res.tr.records[2].timestamp == 2.0);
}

TEST_CASE("text trace rejects malformed lines with their line number") {
  CHECK_THROWS_MATCHES(from_text("abc\n"), malformed_line,
                       Catch::Matchers::Predicate<malformed_line>(
                           [](const malformed_line& e) { return e.line == 1; }));
  CHECK_THROWS_MATCHES(from_text("1.0\n2.0 -5\n"), malformed_line,
                       Catch::Matchers::Predicate<malformed_line>(
                           [](const malformed_line& e) { return e.line == 2; }));
  CHECK_THROWS_AS(from_text("1.0 3.5\n"), malformed_line);       // fractional size
  CHECK_THROWS_AS(from_text("1.0 60 extra\n"), malformed_line);  // trailing junk
  CHECK_THROWS_AS(from_text("nan\n"), malformed_line);
}

TEST_CASE("text trace with no records is an error") {
  CHECK_THROWS_AS(from_text(""), empty_trace);
  CHECK_THROWS_AS(from_text("# only comments\n"), empty_trace);
}

TEST_CASE("pcap single record, little endian") {
  std::string s = pcap_header(false);
  pcap_record(s, false, 1, 500000, 0, 60);
  std::istringstream in(s);
  const ingest_result res = read_pcap(in);
  REQUIRE(res.tr.records.size() == 1);
  CHECK(res.tr.records[0].timestamp == 0.0);
  CHECK(res.tr.records[0].size == 60);
  CHECK(res.tr.origin == Catch::Approx(1.5));
  CHECK(res.report.format == source_format::pcap);
  CHECK_FALSE(res.report.truncated);
}

TEST_CASE("pcap big endian is handled via the swapped magic") {
  std::string s = pcap_header(true, 0xa1b2c3d4u);
  pcap_record(s, true, 10, 250000, 0, 1500);
  pcap_record(s, true, 11, 750000, 0, 64);
  std::istringstream in(s);
  const ingest_result res = read_pcap(in);
  REQUIRE(res.tr.records.size() == 2);
  CHECK(res.tr.records[0].size == 1500);
  CHECK(res.tr.records[1].timestamp == Catch::Approx(1.5));
}

TEST_CASE("pcap rejects foreign magics") {
  // pcapng section header
  std::string s = pcap_header(false, 0x0a0d0d0au);
  std::istringstream in(s);
  CHECK_THROWS_AS(read_pcap(in), bad_magic);

  // nanosecond-resolution pcap is deliberately out of scope
  std::string ns = pcap_header(false, 0xa1b23c4du);
  std::istringstream in2(ns);
  CHECK_THROWS_AS(read_pcap(in2), bad_magic);
}

TEST_CASE("pcap shorter than its global header") {
  std::string s = pcap_header(false).substr(0, 10);
  std::istringstream in(s);
  CHECK_THROWS_AS(read_pcap(in), truncated_header);
}

TEST_CASE("pcap stream ending mid-record keeps earlier records") {
  std::string s = pcap_header(false);
  pcap_record(s, false, 1, 0, 0, 60);
  s.append(8, '\0');  // half of a second record header
  std::istringstream in(s);
  const ingest_result res = read_pcap(in);
  CHECK(res.tr.records.size() == 1);
  CHECK(res.report.truncated);
}

TEST_CASE("pcap skips payload bytes and flags a truncated payload") {
  std::string s = pcap_header(false);
  pcap_record(s, false, 1, 0, 4, 100);
  s.append("\xde\xad\xbe\xef", 4);
  pcap_record(s, false, 2, 0, 8, 200);
  s.append(3, 'x');  // payload cut short
  std::istringstream in(s);
  const ingest_result res = read_pcap(in);
  REQUIRE(res.tr.records.size() == 2);
  CHECK(res.tr.records[1].size == 200);
  CHECK(res.report.truncated);
}

TEST_CASE("pcap with a header but no records is an empty trace") {
  std::string s = pcap_header(false);
  std::istringstream in(s);
  CHECK_THROWS_AS(read_pcap(in), empty_trace);
}

TEST_CASE("synth pcap round-trip preserves time and counts") {
  gen_spec spec;
  spec.duration_s = 100.0;
  spec.seed = 9;
  spec.components.push_back(poisson_background{10.0});
  const trace tr = generate(spec);
  REQUIRE(tr.records.size() >= 900);

  std::ostringstream out(std::ios::binary);
  const std::size_t written = write_pcap(tr, out);
  CHECK(written == tr.records.size());

  std::istringstream in(out.str());
  const ingest_result back = read_pcap(in);
  REQUIRE(back.tr.records.size() == tr.records.size());
  // write_pcap truncates to whole microseconds and the reader rebases, so
  // compare absolute times.
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    const double orig = tr.origin + tr.records[i].timestamp;
    const double got = back.tr.origin + back.tr.records[i].timestamp;
    REQUIRE(std::fabs(orig - got) < 1e-6);
  }
}

TEST_CASE("explicit sizes survive a pcap round-trip exactly") {
  trace tr;
  tr.records = {{0.25, 60}, {1.5, 1500}, {3.75, 9000}};
  std::ostringstream out(std::ios::binary);
  write_pcap(tr, out);
  std::istringstream in(out.str());
  const ingest_result back = read_pcap(in);
  REQUIRE(back.tr.records.size() == 3);
  CHECK(back.tr.records[0].size == 60);
  CHECK(back.tr.records[1].size == 1500);
  CHECK(back.tr.records[2].size == 9000);
}

TEST_CASE("text writer round-trips through the text reader") {
  trace tr;
  tr.records = {{0.0, 40}, {0.123456789, 1500}, {7.5, 0}};
  std::ostringstream out;
  const std::size_t written = write_text_trace(tr, out);
  CHECK(written == 3);

  std::istringstream in(out.str());
  const ingest_result back = read_text_trace(in);
  REQUIRE(back.tr.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::fabs(back.tr.records[i].timestamp - tr.records[i].timestamp) < 1e-9);
    CHECK(back.tr.records[i].size == tr.records[i].size);
  }
}
