// netspectro — command-line spectral analysis of packet traces.
//
//   netspectro spectrum  --input trace.pcap --p 0.1 --out-dir results/
//   netspectro scalogram --input trace.txt  --p 1 --band 2:20 --out-dir results/
//   netspectro classify  --input results/peaks.json --out-dir results/
//   netspectro synth     --spec burst.json --out-dir results/ --format pcap
//
// Exit codes: 0 success, 2 unusable input, 3 bad parameters.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netspectro/netspectro.hpp"
#include "netspectro/synth_config.hpp"

namespace ns = netspectro;
using nlohmann::json;

namespace {

struct options {
  std::string input;
  std::string out_dir = ".";
  std::string format;  // "", "text", "pcap"
  double p = 0.0;
  std::size_t max_lag = 0;
  double threshold_k = 6.0;
  double harmonic_tol = 0.02;
  double s0 = 2.0;
  int octaves = 12;
  int voices = 8;
  double omega0 = 6.0;
  std::string band;  // "lo:hi"
  double band_threshold_k = 3.0;
  double rel_tol = 0.05;
  std::string taxonomy_file;
  std::vector<std::string> links;
  std::string spec_file;
  std::optional<std::uint64_t> seed;
};

bool looks_like_pcap(const std::string& path) {
  const std::string ext = std::filesystem::path(path).extension().string();
  return ext == ".pcap" || ext == ".cap" || ext == ".dmp";
}

ns::ingest_result load_trace(const options& opt) {
  const bool pcap = opt.format == "pcap" ||
                    (opt.format.empty() && looks_like_pcap(opt.input));
  std::ifstream in(opt.input, pcap ? std::ios::binary : std::ios::in);
  if (!in) throw ns::file_error(opt.input);
  return pcap ? ns::read_pcap(in) : ns::read_text_trace(in);
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ns::io_failure("cannot write '" + path.string() + "'");
  return out;
}

json peak_to_json(const ns::spectral_peak& pk) {
  return json{{"bin", pk.bin},
              {"frequency_hz", pk.freq_hz},
              {"period_s", pk.period_s},
              {"power", pk.power},
              {"prominence", pk.prominence}};
}

ns::spectral_peak peak_from_json(const json& j) {
  ns::spectral_peak pk;
  pk.bin = j.at("bin").get<std::size_t>();
  pk.freq_hz = j.at("frequency_hz").get<double>();
  pk.period_s = j.at("period_s").get<double>();
  pk.power = j.at("power").get<double>();
  pk.prominence = j.at("prominence").get<double>();
  return pk;
}

json groups_to_json(const std::vector<ns::harmonic_group>& groups) {
  json out = json::array();
  for (const auto& g : groups) {
    json harmonics = json::array();
    for (const auto& h : g.harmonics)
      harmonics.push_back(json{{"order", h.order}, {"peak", peak_to_json(h.peak)}});
    out.push_back(json{{"fundamental", peak_to_json(g.fundamental)},
                       {"harmonics", std::move(harmonics)}});
  }
  return out;
}

std::vector<ns::harmonic_group> groups_from_json(const json& j) {
  std::vector<ns::harmonic_group> groups;
  for (const auto& gj : j) {
    ns::harmonic_group g;
    g.fundamental = peak_from_json(gj.at("fundamental"));
    for (const auto& hj : gj.at("harmonics"))
      g.harmonics.push_back({hj.at("order").get<int>(), peak_from_json(hj.at("peak"))});
    groups.push_back(std::move(g));
  }
  return groups;
}

void parse_band(const std::string& s, double& lo, double& hi) {
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw ns::parameter_error("--band expects lo:hi in seconds");
  try {
    std::size_t used = 0;
    lo = std::stod(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(s);
    const std::string rest = s.substr(colon + 1);
    hi = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw ns::parameter_error("--band expects lo:hi in seconds");
  }
  if (!(lo > 0.0) || !(hi >= lo))
    throw ns::parameter_error("--band bounds must satisfy 0 < lo <= hi");
}

ns::link_tech parse_link(const std::string& s) {
  // name:bandwidth_bps:mtu_bytes
  const auto c1 = s.find(':');
  const auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ns::parameter_error("--link expects name:bandwidth_bps:mtu_bytes");
  ns::link_tech link;
  link.name = s.substr(0, c1);
  try {
    link.bandwidth_bps = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    link.mtu_bytes = std::stod(s.substr(c2 + 1));
  } catch (const std::exception&) {
    throw ns::parameter_error("--link expects name:bandwidth_bps:mtu_bytes");
  }
  if (link.name.empty() || !(link.bandwidth_bps > 0.0) || !(link.mtu_bytes > 0.0))
    throw ns::parameter_error("--link needs a name and positive numbers");
  return link;
}

ns::classify_options build_classify_options(const options& opt) {
  ns::classify_options copt;
  copt.rel_tol = opt.rel_tol;
  for (const std::string& l : opt.links) copt.links.push_back(parse_link(l));
  if (!opt.taxonomy_file.empty()) {
    std::ifstream in(opt.taxonomy_file);
    if (!in) throw ns::file_error(opt.taxonomy_file);
    copt.extra_entries = ns::parse_taxonomy(in);
  }
  return copt;
}

// Consistent numeric formatting for the TSV outputs.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int cmd_spectrum(const options& opt) {
  if (!(opt.p > 0.0)) throw ns::non_positive_period();
  const ns::ingest_result ing = load_trace(opt);
  const ns::binned_series binned = ns::bin_trace(ing.tr, opt.p);
  const ns::centered_series centered = ns::center(binned);
  const ns::acvf_series a = ns::acvf(centered, opt.max_lag);
  const ns::spectrum pg = ns::periodogram(a);
  const auto peaks = ns::detect_peaks(pg, {.threshold_k = opt.threshold_k});
  const auto groups = ns::group_harmonics(peaks, opt.harmonic_tol);

  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);

  {
    auto tsv = open_out(dir / "periodogram.tsv");
    tsv << "frequency_hz\tperiod_s\tpower\n";
    for (std::size_t j = 0; j < pg.size(); ++j) {
      const double period = pg.freq_hz[j] > 0.0 ? 1.0 / pg.freq_hz[j] : 0.0;
      tsv << num(pg.freq_hz[j]) << '\t' << num(period) << '\t' << num(pg.power[j])
          << '\n';
    }
  }
  {
    json out{{"p_s", opt.p},
             {"n_bins", binned.size()},
             {"max_lag", a.max_lag()},
             {"grid_size", pg.size()},
             {"threshold_k", opt.threshold_k},
             {"harmonic_tol", opt.harmonic_tol},
             {"records", ing.report.records_read},
             {"groups", groups_to_json(groups)}};
    json jp = json::array();
    for (const auto& pk : peaks) jp.push_back(peak_to_json(pk));
    out["peaks"] = std::move(jp);
    open_out(dir / "peaks.json") << out.dump(2) << '\n';
  }
  std::cerr << "spectrum: " << peaks.size() << " peaks in " << groups.size()
            << " groups over " << binned.size() << " bins\n";
  return 0;
}

int cmd_scalogram(const options& opt) {
  if (!(opt.p > 0.0)) throw ns::non_positive_period();
  const ns::ingest_result ing = load_trace(opt);
  const ns::binned_series binned = ns::bin_trace(ing.tr, opt.p);
  const ns::centered_series centered = ns::center(binned);
  const ns::scale_grid grid{opt.s0, opt.octaves, opt.voices};
  const ns::scalogram sg = ns::cwt(centered, grid, opt.omega0);

  double band_lo = sg.periods.front(), band_hi = sg.periods.back();
  if (!opt.band.empty()) parse_band(opt.band, band_lo, band_hi);

  const auto bands = ns::detect_transient_bands(sg, band_lo, band_hi, opt.band_threshold_k);
  std::optional<double> envelope;
  try {
    envelope = ns::band_envelope_period(sg, band_lo, band_hi);
  } catch (const ns::no_peak&) {
  }

  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);

  {
    auto tsv = open_out(dir / "scalogram.tsv");
    tsv << "time_s\tperiod_s\tmagnitude\n";
    for (std::size_t b = 0; b < sg.cols(); ++b)
      for (std::size_t i = 0; i < sg.rows(); ++i)
        tsv << num(sg.times[b]) << '\t' << num(sg.periods[i]) << '\t'
            << num(sg.magnitude[i][b]) << '\n';
  }
  {
    auto tsv = open_out(dir / "coi.tsv");
    tsv << "time_s\tmax_trustworthy_period_s\n";
    for (std::size_t b = 0; b < sg.cols(); ++b)
      tsv << num(sg.times[b]) << '\t' << num(sg.coi[b]) << '\n';
  }
  {
    json jb = json::array();
    for (const auto& band : bands)
      jb.push_back(json{{"period_lo_s", band.period_lo_s},
                        {"period_hi_s", band.period_hi_s},
                        {"start_s", band.start_s},
                        {"end_s", band.end_s},
                        {"mean_magnitude", band.mean_magnitude}});
    json out{{"p_s", opt.p},
             {"n_bins", binned.size()},
             {"omega0", opt.omega0},
             {"s0", opt.s0},
             {"octaves", opt.octaves},
             {"voices_per_octave", opt.voices},
             {"band_period_s", json::array({band_lo, band_hi})},
             {"band_threshold_k", opt.band_threshold_k},
             {"bands", std::move(jb)}};
    out["envelope_period_s"] = envelope ? json(*envelope) : json(nullptr);
    open_out(dir / "bands.json") << out.dump(2) << '\n';
  }
  std::cerr << "scalogram: " << sg.rows() << " scales x " << sg.cols()
            << " samples, " << bands.size() << " transient bands\n";
  return 0;
}

int cmd_classify(const options& opt) {
  double p = opt.p;
  std::size_t n_bins = 0;
  std::vector<ns::harmonic_group> groups;

  if (std::filesystem::path(opt.input).extension() == ".json") {
    std::ifstream in(opt.input);
    if (!in) throw ns::file_error(opt.input);
    json j;
    try {
      j = json::parse(in);
      p = j.at("p_s").get<double>();
      n_bins = j.at("n_bins").get<std::size_t>();
      groups = groups_from_json(j.at("groups"));
    } catch (const json::exception& e) {
      throw ns::io_failure("unusable peaks file '" + opt.input + "': " + e.what());
    }
  } else {
    if (!(p > 0.0)) throw ns::non_positive_period();
    const ns::ingest_result ing = load_trace(opt);
    const ns::binned_series binned = ns::bin_trace(ing.tr, p);
    const ns::centered_series centered = ns::center(binned);
    const ns::acvf_series a = ns::acvf(centered, opt.max_lag);
    const ns::spectrum pg = ns::periodogram(a);
    groups = ns::group_harmonics(ns::detect_peaks(pg, {.threshold_k = opt.threshold_k}),
                                 opt.harmonic_tol);
    n_bins = binned.size();
  }

  const ns::classify_options copt = build_classify_options(opt);
  const ns::periodicity_report rep = ns::make_report(groups, p, n_bins, copt);

  json jgroups = json::array();
  for (std::size_t i = 0; i < rep.groups.size(); ++i) {
    const ns::harmonic_group& g = rep.groups[i];
    json matches = json::array();
    for (const ns::classification_match& m : rep.matches[i]) {
      json jm{{"source", m.entry.source},
              {"layer", ns::to_string(m.entry.layer)},
              {"kind", ns::to_string(m.entry.kind)},
              {"origin", ns::to_string(m.entry.origin)},
              {"detectable", m.verdict.detectable}};
      jm["reason"] = m.verdict.detectable ? json(nullptr)
                                          : json(ns::to_string(m.verdict.reason));
      if (m.entry.is_point()) {
        jm["period_s"] = m.entry.period();
        jm["relative_error"] = m.relative_error;
      } else {
        jm["band_s"] = json::array({m.entry.period_lo_s, m.entry.period_hi_s});
        jm["in_band"] = m.in_band;
      }
      matches.push_back(std::move(jm));
    }
    jgroups.push_back(json{{"fundamental_period_s", g.fundamental.period_s},
                           {"fundamental_frequency_hz", g.fundamental.freq_hz},
                           {"prominence", g.fundamental.prominence},
                           {"harmonic_count", g.harmonics.size()},
                           {"matches", std::move(matches)}});
  }
  json out{{"p_s", rep.p},
           {"n_bins", rep.n_bins},
           {"rel_tol", opt.rel_tol},
           {"groups", std::move(jgroups)},
           {"unmatched_periods_s", rep.unmatched_periods_s}};

  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);
  open_out(dir / "report.json") << out.dump(2) << '\n';
  std::cerr << "classify: " << rep.groups.size() << " fundamentals, "
            << rep.unmatched_periods_s.size() << " unmatched\n";
  return 0;
}

int cmd_synth(const options& opt) {
  std::ifstream in(opt.spec_file);
  if (!in) throw ns::file_error(opt.spec_file);
  ns::gen_spec spec = ns::parse_gen_spec(in);

  if (opt.seed) {
    spec.seed = *opt.seed;
  } else if (const char* env = std::getenv("NETSPECTRO_SEED")) {
    try {
      spec.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ns::parameter_error("NETSPECTRO_SEED must be an unsigned integer");
    }
  }

  const ns::trace tr = ns::generate(spec);

  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);
  std::size_t written = 0;
  if (opt.format == "text") {
    auto out = open_out(dir / "trace.txt");
    written = ns::write_text_trace(tr, out);
  } else {
    auto out = open_out(dir / "trace.pcap", true);
    written = ns::write_pcap(tr, out);
  }
  std::cout << written << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral analysis of packet-arrival periodicities"};
  app.require_subcommand(1);
  options opt;

  const auto add_trace_opts = [&](CLI::App* cmd, bool p_required) {
    cmd->add_option("--input,--in", opt.input, "input trace")->required();
    auto* p = cmd->add_option("--p", opt.p, "sampling period, seconds");
    if (p_required) p->required();
    cmd->add_option("--format", opt.format, "input format: text|pcap")
        ->check(CLI::IsMember({"text", "pcap"}));
    cmd->add_option("--out-dir,--out", opt.out_dir, "output directory (default .)");
  };
  const auto add_spectrum_opts = [&](CLI::App* cmd) {
    cmd->add_option("--max-lag", opt.max_lag, "autocovariance lags (default n/2)");
    cmd->add_option("--threshold-k", opt.threshold_k,
                    "peak threshold, noise MADs (default 6)");
    cmd->add_option("--harmonic-tol", opt.harmonic_tol,
                    "harmonic grouping tolerance (default 0.02)");
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "periodogram and harmonic peaks");
  add_trace_opts(spectrum, true);
  add_spectrum_opts(spectrum);

  CLI::App* scalogram = app.add_subcommand("scalogram", "wavelet scalogram and bands");
  add_trace_opts(scalogram, true);
  scalogram->add_option("--s0", opt.s0, "smallest scale, samples (default 2)");
  scalogram->add_option("--octaves", opt.octaves, "octaves (default 12)");
  scalogram->add_option("--voices", opt.voices, "voices per octave (default 8)");
  scalogram->add_option("--omega0", opt.omega0, "wavelet center frequency (default 6)");
  scalogram->add_option("--band", opt.band, "period band lo:hi, seconds");
  scalogram->add_option("--band-threshold-k", opt.band_threshold_k,
                        "band threshold, MADs (default 3)");

  CLI::App* classify =
      app.add_subcommand("classify", "match periodicities against the taxonomy");
  add_trace_opts(classify, false);
  add_spectrum_opts(classify);
  classify->add_option("--rel-tol", opt.rel_tol,
                       "match tolerance, relative (default 0.05)");
  classify->add_option("--taxonomy-file", opt.taxonomy_file, "extra taxonomy entries");
  classify->add_option("--link", opt.links,
                       "extra link tech as name:bandwidth_bps:mtu_bytes");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic trace");
  synth->add_option("--spec", opt.spec_file, "generator spec (JSON)")->required();
  synth->add_option("--out-dir,--out", opt.out_dir, "output directory (default .)");
  synth->add_option("--format", opt.format, "output format: text|pcap")
      ->check(CLI::IsMember({"text", "pcap"}));
  std::uint64_t seed_arg = 0;
  auto* seed_opt = synth->add_option("--seed", seed_arg, "override the spec seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  if (*seed_opt) opt.seed = seed_arg;

  try {
    if (spectrum->parsed()) return cmd_spectrum(opt);
    if (scalogram->parsed()) return cmd_scalogram(opt);
    if (classify->parsed()) return cmd_classify(opt);
    if (synth->parsed()) return cmd_synth(opt);
  } catch (const ns::parameter_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ns::input_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
