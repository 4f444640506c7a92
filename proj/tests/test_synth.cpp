#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "netspectro/synth.hpp"
#include "netspectro/synth_config.hpp"
#include "netspectro/trace.hpp"

using namespace netspectro;
using Catch::Approx;

TEST_CASE("a Poisson background hits its expected count within three sigma") {
  gen_spec g;
  g.duration_s = 1000.0;
  g.seed = 12345;
  g.components.push_back(poisson_background{10.0});
  auto tr = generate(g);
  const double expect = 10.0 * 1000.0;
  REQUIRE(std::fabs(static_cast<double>(tr.records.size()) - expect) <=
          3.0 * std::sqrt(expect));
  // sorted, in-range timestamps
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    REQUIRE(tr.records[i].timestamp >= 0.0);
    REQUIRE(tr.records[i].timestamp < 1000.0);
    if (i > 0) REQUIRE(tr.records[i].timestamp >= tr.records[i - 1].timestamp);
  }
}

TEST_CASE("an unjittered burst train is fully deterministic") {
  gen_spec g;
  g.duration_s = 300.0;
  g.seed = 9;
  periodic_burst b;
  b.period_s = 30.0;
  b.burst_len_s = 3.0;
  b.packets_per_burst = 5;
  b.jitter_sd_s = 0.0;
  g.components.push_back(b);
  auto tr = generate(g);
  REQUIRE(tr.records.size() == 50);  // 10 slots x 5 packets
  for (const auto& r : tr.records) {
    const double slot = std::floor(r.timestamp / 30.0) * 30.0;
    REQUIRE(r.timestamp >= slot);
    REQUIRE(r.timestamp <= slot + 3.0);
  }
  // every slot carries exactly 5 packets
  std::array<int, 10> per_slot{};
  for (const auto& r : tr.records)
    ++per_slot[static_cast<std::size_t>(r.timestamp / 30.0)];
  for (int c : per_slot) REQUIRE(c == 5);
}

TEST_CASE("generation is bitwise reproducible for a fixed seed") {
  gen_spec g;
  g.duration_s = 500.0;
  g.seed = 777;
  g.components.push_back(poisson_background{3.0});
  periodic_burst b;
  b.period_s = 10.0;
  b.burst_len_s = 1.0;
  b.packets_per_burst = 4;
  b.jitter_sd_s = 0.2;
  g.components.push_back(b);
  sine_rate s;
  s.base_rate_pps = 5.0;
  s.mod_depth = 0.5;
  s.period_s = 60.0;
  g.components.push_back(s);

  auto t1 = generate(g);
  auto t2 = generate(g);
  REQUIRE(t1.records.size() == t2.records.size());
  for (std::size_t i = 0; i < t1.records.size(); ++i)
    REQUIRE(t1.records[i].timestamp == t2.records[i].timestamp);

  // a different seed moves the random components
  g.seed = 778;
  auto t3 = generate(g);
  bool same = t1.records.size() == t3.records.size();
  if (same)
    for (std::size_t i = 0; i < t1.records.size(); ++i)
      same = same && t1.records[i].timestamp == t3.records[i].timestamp;
  REQUIRE_FALSE(same);
}

TEST_CASE("a multi-component trace is the sorted merge of its components") {
  gen_spec g;
  g.duration_s = 400.0;
  g.seed = 31415;
  g.components.push_back(poisson_background{2.0});
  sine_rate s;
  s.base_rate_pps = 4.0;
  s.mod_depth = 0.9;
  s.period_s = 40.0;
  g.components.push_back(s);

  auto whole = generate(g);
  auto a = generate_component(g.components[0], component_seed(g.seed, 0), g.duration_s);
  auto b = generate_component(g.components[1], component_seed(g.seed, 1), g.duration_s);
  std::vector<double> merged;
  merged.insert(merged.end(), a.begin(), a.end());
  merged.insert(merged.end(), b.begin(), b.end());
  std::sort(merged.begin(), merged.end());
  REQUIRE(whole.records.size() == merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i)
    REQUIRE(whole.records[i].timestamp == merged[i]);

  // component streams are decoupled: dropping the sine leaves the Poisson
  // arrivals untouched
  gen_spec only_poisson;
  only_poisson.duration_s = g.duration_s;
  only_poisson.seed = g.seed;
  only_poisson.components.push_back(g.components[0]);
  auto solo = generate(only_poisson);
  REQUIRE(solo.records.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    REQUIRE(solo.records[i].timestamp == a[i]);
}

TEST_CASE("a sine-modulated rate demodulates to its own amplitude and phase") {
  const double base = 20.0, depth = 0.8, period = 100.0, duration = 2000.0;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    gen_spec g;
    g.duration_s = duration;
    g.seed = seed;
    sine_rate s;
    s.base_rate_pps = base;
    s.mod_depth = depth;
    s.period_s = period;
    g.components.push_back(s);
    auto binned = bin_trace(generate(g), 1.0, duration);
    const auto n = binned.counts.size();
    REQUIRE(n == 2000);
    double mean = 0.0;
    for (auto c : binned.counts) mean += static_cast<double>(c);
    mean /= static_cast<double>(n);
    REQUIRE(mean == Approx(base).epsilon(0.05));
    // demodulate at the known frequency
    double in_phase = 0.0, quad = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double w = 2.0 * std::numbers::pi * (static_cast<double>(t) + 0.5) / period;
      in_phase += (static_cast<double>(binned.counts[t]) - mean) * std::sin(w);
      quad += (static_cast<double>(binned.counts[t]) - mean) * std::cos(w);
    }
    in_phase *= 2.0 / static_cast<double>(n);
    quad *= 2.0 / static_cast<double>(n);
    REQUIRE(in_phase == Approx(base * depth).epsilon(0.10));
    REQUIRE(std::fabs(quad) <= 0.10 * base * depth);
  }
}

TEST_CASE("a flap pattern floods only its duty window and keeps its keepalives") {
  gen_spec g;
  g.duration_s = 20000.0;
  g.seed = 4242;
  flap_pattern f;
  f.keepalive_period_s = 30.0;
  f.flap_burst_rate_pps = 5.0;
  f.damp_period_s = 3600.0;
  f.duty = 0.5;
  g.components.push_back(f);
  auto tr = generate(g);

  std::size_t off_window = 0, on_window = 0;
  for (const auto& r : tr.records) {
    const double phase = std::fmod(r.timestamp, 3600.0);
    if (phase < 1800.0) {
      ++on_window;
    } else {
      ++off_window;
      // outside the flood window only the 30 s keepalive impulses remain
      const double mod = std::fmod(r.timestamp, 30.0);
      REQUIRE(std::min(mod, 30.0 - mod) <= 1e-9);
    }
  }
  // keepalives tick every 30 s; count how many land on or off the flood window
  std::size_t keep_on = 0, keep_off = 0;
  for (double t = 0.0; t < 20000.0; t += 30.0)
    (std::fmod(t, 3600.0) < 1800.0 ? keep_on : keep_off)++;
  REQUIRE(off_window == keep_off);
  // flood: rate x total on-time (six full 1800 s windows), within three sigma
  double on_time = 0.0;
  for (double w = 0.0; w < 20000.0; w += 3600.0)
    on_time += std::min(w + 1800.0, 20000.0) - w;
  const double expected_flood = 5.0 * on_time;
  const double flood = static_cast<double>(on_window) - static_cast<double>(keep_on);
  REQUIRE(std::fabs(flood - expected_flood) <= 3.0 * std::sqrt(expected_flood));
}

TEST_CASE("pcap output is laid out record by record") {
  trace tr;
  tr.records = {{0.25, 100}, {1.5, 0}, {2.000001, 40}};
  std::ostringstream os(std::ios::binary);
  REQUIRE(write_pcap(tr, os) == 3);
  const std::string bytes = os.str();
  REQUIRE(bytes.size() == 24 + 3 * 16);
  // little-endian microsecond magic
  REQUIRE(static_cast<unsigned char>(bytes[0]) == 0xd4);
  REQUIRE(static_cast<unsigned char>(bytes[1]) == 0xc3);
  REQUIRE(static_cast<unsigned char>(bytes[2]) == 0xb2);
  REQUIRE(static_cast<unsigned char>(bytes[3]) == 0xa1);
  auto u32 = [&](std::size_t off) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off])) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 1])) << 8) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 2])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 3])) << 24);
  };
  // first record: ts 0.25 -> sec 0, usec 250000, incl 0, orig 100
  REQUIRE(u32(24) == 0);
  REQUIRE(u32(28) == 250000);
  REQUIRE(u32(32) == 0);
  REQUIRE(u32(36) == 100);
  // second record: unknown size becomes a minimum-length frame
  REQUIRE(u32(40) == 1);
  REQUIRE(u32(44) == 500000);
  REQUIRE(u32(52) == 60);
  // third record: microsecond truncation
  REQUIRE(u32(56) == 2);
  REQUIRE(u32(60) == 1);
}

TEST_CASE("text output carries nanosecond timestamps and sizes") {
  trace tr;
  tr.origin = 100.0;
  tr.records = {{0.123456789, 64}, {1.0, 0}};
  std::ostringstream os;
  REQUIRE(write_text_trace(tr, os) == 2);
  REQUIRE(os.str() == "100.123456789 64\n101.000000000 0\n");
}

TEST_CASE("writers refuse empty traces") {
  trace tr;
  std::ostringstream os;
  REQUIRE_THROWS_AS(write_pcap(tr, os), empty_trace);
  REQUIRE_THROWS_AS(write_text_trace(tr, os), empty_trace);
}

TEST_CASE("spec validation rejects each malformed field") {
  auto reject = [](gen_spec g) { REQUIRE_THROWS_AS(generate(g), invalid_spec); };

  gen_spec g;
  g.duration_s = 100.0;
  reject(g);  // no components

  g.components.push_back(poisson_background{1.0});
  gen_spec bad = g;
  bad.duration_s = 0.0;
  reject(bad);

  bad = g;
  bad.components[0] = poisson_background{-1.0};
  reject(bad);

  periodic_burst b;
  b.period_s = 10.0;
  b.burst_len_s = 1.0;
  bad = g;
  b.burst_len_s = 10.0;  // len must stay below the period
  bad.components[0] = b;
  reject(bad);

  b.burst_len_s = 1.0;
  b.jitter_sd_s = -0.5;
  bad = g;
  bad.components[0] = b;
  reject(bad);

  b.jitter_sd_s = 0.0;
  b.active_s = std::array<double, 2>{50.0, 40.0};
  bad = g;
  bad.components[0] = b;
  reject(bad);

  sine_rate s;
  s.base_rate_pps = 5.0;
  s.period_s = 10.0;
  s.mod_depth = 1.5;
  bad = g;
  bad.components[0] = s;
  reject(bad);

  s.mod_depth = 0.5;
  s.period_s = 0.0;
  bad = g;
  bad.components[0] = s;
  reject(bad);

  flap_pattern f;
  f.duty = -0.1;
  bad = g;
  bad.components[0] = f;
  reject(bad);

  f.duty = 0.5;
  f.damp_period_s = 0.0;
  bad = g;
  bad.components[0] = f;
  reject(bad);
}

TEST_CASE("generator specs parse from JSON") {
  std::istringstream in(R"({
    "duration_s": 20000,
    "seed": 11,
    "components": [
      {"type": "poisson", "rate_pps": 2.0},
      {"type": "burst", "period_s": 30, "packets_per_burst": 3,
       "burst_len_s": 1.5, "jitter_sd_s": 0.1, "active_s": [100, 700]},
      {"type": "sine", "base_rate_pps": 50, "mod_depth": 0.8, "period_s": 50},
      {"type": "flap", "keepalive_period_s": 60, "flap_burst_rate_pps": 4,
       "damp_period_s": 1800, "duty": 0.25}
    ]
  })");
  auto g = parse_gen_spec(in);
  REQUIRE(g.duration_s == 20000.0);
  REQUIRE(g.seed == 11);
  REQUIRE(g.components.size() == 4);

  const auto& pb = std::get<poisson_background>(g.components[0]);
  REQUIRE(pb.rate_pps == 2.0);

  const auto& b = std::get<periodic_burst>(g.components[1]);
  REQUIRE(b.period_s == 30.0);
  REQUIRE(b.packets_per_burst == 3);
  REQUIRE(b.burst_len_s == 1.5);
  REQUIRE(b.jitter_sd_s == 0.1);
  REQUIRE(b.active_s.has_value());
  REQUIRE((*b.active_s)[0] == 100.0);
  REQUIRE((*b.active_s)[1] == 700.0);

  const auto& s = std::get<sine_rate>(g.components[2]);
  REQUIRE(s.base_rate_pps == 50.0);
  REQUIRE(s.mod_depth == 0.8);
  REQUIRE(s.period_s == 50.0);

  const auto& f = std::get<flap_pattern>(g.components[3]);
  REQUIRE(f.keepalive_period_s == 60.0);
  REQUIRE(f.flap_burst_rate_pps == 4.0);
  REQUIRE(f.damp_period_s == 1800.0);
  REQUIRE(f.duty == 0.25);
}

TEST_CASE("component defaults fill in when the JSON omits them") {
  std::istringstream in(R"({
    "duration_s": 100,
    "components": [
      {"type": "burst", "period_s": 10},
      {"type": "flap"}
    ]
  })");
  auto g = parse_gen_spec(in);
  REQUIRE(g.seed == 0);
  const auto& b = std::get<periodic_burst>(g.components[0]);
  REQUIRE(b.burst_len_s == 0.0);
  REQUIRE(b.packets_per_burst == 1);
  REQUIRE(b.jitter_sd_s == 0.0);
  REQUIRE_FALSE(b.active_s.has_value());
  const auto& f = std::get<flap_pattern>(g.components[1]);
  REQUIRE(f.keepalive_period_s == 30.0);
  REQUIRE(f.flap_burst_rate_pps == 5.0);
  REQUIRE(f.damp_period_s == 3600.0);
  REQUIRE(f.duty == 0.5);
}

TEST_CASE("bad generator JSON is rejected with invalid_spec") {
  auto reject = [](const std::string& text) {
    std::istringstream in(text);
    REQUIRE_THROWS_AS(parse_gen_spec(in), invalid_spec);
  };
  reject("{ not json");
  reject(R"({"components": [{"type": "poisson", "rate_pps": 1}]})");  // no duration
  reject(R"({"duration_s": 10, "components": [{"type": "laser"}]})");  // unknown type
  reject(R"({"duration_s": 10, "components": [{"type": "poisson"}]})");  // missing rate
  reject(R"({"duration_s": 10, "components": [{"type": "sine", "base_rate_pps": 1}]})");
  reject(R"({"duration_s": 10, "components": []})");  // validate(): no components
  reject(R"({"duration_s": 10, "components": [{"type": "sine",
    "base_rate_pps": 1, "period_s": 5, "mod_depth": 2}]})");  // validate(): depth
}
