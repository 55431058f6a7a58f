// repstat: repeat statistics, urn models and fit scoring from the command line.
//
//   repstat stats    corpus.txt... [--rmax 9] [--alphabet ABC...] [--strip|--error] [-o stats.json]
//   repstat urn      --from-stats stats.json | --hatted --alphabet-size 26  [-o urn.json]
//   repstat weights  --urn urn.json [--unit nat|db] [-o weights.json]
//   repstat score    --urn urn.json (--figure XO... | --a a.txt --b b.txt --shift s) [--prior-log-odds x]
//   repstat sample   --urn urn.json --overlap L --count n --seed k [--keep-trailing-o]
//   repstat simulate --config sim.json [--out report.json] [--csv bins.csv]
//
// Exit codes: 0 success, 2 usage error, 3 data/validation error, 4 numeric/model error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "repstat/json_io.hpp"
#include "repstat/normalize.hpp"
#include "repstat/repstat.hpp"

namespace fs = std::filesystem;
using repstat::io::Json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitModel = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw repstat::DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw repstat::DataError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw repstat::DataError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw repstat::DataError("cannot move '" + tmp.string() + "' to '" + path + "': " + ec.message());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

struct Common {
  std::string out;
  bool reproducible = false;
};

void emit(Json j, const Common& common) {
  if (!common.reproducible) j["created"] = utc_timestamp();
  const std::string text = j.dump(2) + "\n";
  if (common.out.empty() || common.out == "-") {
    std::cout << text;
  } else {
    write_file_atomic(common.out, text);
  }
}

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("-o,--out", common.out, "Output path (default: stdout)");
  cmd->add_flag("--reproducible", common.reproducible, "Omit the creation timestamp");
}

struct TextOptions {
  std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  bool strip = false;
  bool error = false;
  bool no_case_fold = false;

  repstat::Normalizer normalizer() const {
    repstat::NormalizationPolicy policy;
    policy.alphabet = alphabet;
    policy.case_fold = !no_case_fold;
    policy.on_invalid = strip ? repstat::NormalizationPolicy::Invalid::strip : repstat::NormalizationPolicy::Invalid::error;
    return repstat::Normalizer(policy);
  }
};

void add_text_options(CLI::App* cmd, TextOptions& t) {
  cmd->add_option("--alphabet", t.alphabet, "Alphabet symbols in code order");
  auto* strip = cmd->add_flag("--strip", t.strip, "Drop characters outside the alphabet");
  auto* error = cmd->add_flag("--error", t.error, "Reject characters outside the alphabet (default)");
  strip->excludes(error);
  cmd->add_flag("--no-case-fold", t.no_case_fold, "Match letters case-sensitively");
}

repstat::UrnModel load_urn(const std::string& path) {
  return repstat::io::urn_from_json(repstat::io::parse(read_file(path), path));
}

std::optional<double> floor_option(double value) {
  return value > 0.0 ? std::optional<double>(value) : std::nullopt;
}

// ---- subcommands ----

struct StatsArgs {
  std::vector<std::string> inputs;
  int rmax = repstat::kDefaultStatsRmax;
  TextOptions text;
  Common common;
};

void run_stats(const StatsArgs& a) {
  const auto norm = a.text.normalizer();
  std::vector<std::vector<repstat::Symbol>> decodes;
  for (const auto& path : a.inputs) {
    try {
      for (auto& d : norm.decodes(read_file(path))) decodes.push_back(std::move(d));
    } catch (const repstat::ParseError& e) {
      throw repstat::ParseError(path + ": " + e.what(), e.position());
    }
  }
  const auto corpus = repstat::build_corpus(decodes, norm.alphabet_size());
  const auto stats = repstat::compute_statistics(corpus, a.rmax);

  std::cerr << "N = " << stats.N << "  c = " << stats.c << "  total overlap = " << stats.total_overlap()
            << "  cards = " << stats.total_cards << "\n";
  std::cerr << "   r            M_r            N_r\n";
  for (int r = 1; r <= stats.r_max; ++r) {
    const auto i = static_cast<std::size_t>(r - 1);
    char line[96];
    if (i < stats.Nr.size()) {
      std::snprintf(line, sizeof line, "%4d %14lld %14lld\n", r, static_cast<long long>(stats.M[i]),
                    static_cast<long long>(stats.Nr[i]));
    } else {
      std::snprintf(line, sizeof line, "%4d %14lld %14s\n", r, static_cast<long long>(stats.M[i]), "-");
    }
    std::cerr << line;
  }
  emit(repstat::io::to_json(stats), a.common);
}

struct UrnArgs {
  std::string from_stats;
  bool hatted = false;
  int alphabet_size = 26;
  int rmax = 0;
  Common common;
};

void run_urn(const UrnArgs& a) {
  if (a.hatted) {
    const auto urn = a.rmax > 0 ? repstat::hatted_urn(a.alphabet_size, a.rmax) : repstat::hatted_urn(a.alphabet_size);
    emit(repstat::io::to_json(urn), a.common);
    return;
  }
  const auto stats = repstat::io::stats_from_json(repstat::io::parse(read_file(a.from_stats), a.from_stats));
  emit(repstat::io::to_json(repstat::urn_from_stats(stats)), a.common);
}

struct WeightsArgs {
  std::string urn;
  std::string unit = "nat";
  double floor = 0.0;
  Common common;
};

void run_weights(const WeightsArgs& a) {
  const auto w = repstat::weights(load_urn(a.urn), repstat::parse_log_unit(a.unit), floor_option(a.floor));
  emit(repstat::io::to_json(w), a.common);
}

struct ScoreArgs {
  std::string urn;
  std::string figure;
  std::string a_path, b_path;
  long long shift = 0;
  double prior = 0.0;
  std::string unit = "nat";
  double floor = 0.0;
  TextOptions text;
  Common common;
};

void run_score(const ScoreArgs& a) {
  const auto w = repstat::weights(load_urn(a.urn), repstat::parse_log_unit(a.unit), floor_option(a.floor));
  repstat::RepetitionFigure fig;
  if (!a.a_path.empty()) {
    const auto norm = a.text.normalizer();
    const auto ta = norm.sequence(read_file(a.a_path));
    const auto tb = norm.sequence(read_file(a.b_path));
    fig = repstat::figure_from_comparison(ta, tb, a.shift);
  } else {
    fig = repstat::parse_figure(a.figure);
  }
  const auto score = repstat::odds_of_fit(w, fig, a.prior);
  Json j = repstat::io::to_json(score);
  j["overlap"] = fig.length();
  j["figure"] = fig.str();
  emit(j, a.common);
}

struct SampleArgs {
  std::string urn;
  std::size_t overlap = 0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  bool keep_trailing_o = false;
  bool summary_only = false;
  Common common;
};

void run_sample(const SampleArgs& a) {
  const auto urn = load_urn(a.urn);
  const auto result = repstat::sample_figures(urn, a.overlap, a.count, a.seed, a.keep_trailing_o);
  Json j{{"overlap", a.overlap},
         {"count", a.count},
         {"seed", a.seed},
         {"keep_trailing_o", a.keep_trailing_o},
         {"sessions", result.sessions()},
         {"scrapped", result.scrapped},
         {"scrap_rate", result.scrap_rate()},
         {"expected_scrap_rate", 1.0 - repstat::acceptance_proportion(urn)},
         {"draws", result.draws}};
  if (!a.summary_only) {
    Json figs = Json::array();
    for (const auto& f : result.figures) figs.push_back(f.str());
    j["figures"] = std::move(figs);
  }
  emit(j, a.common);
}

struct SimulateArgs {
  std::string config;
  std::string csv;
  int workers = 0;
  Common common;
};

void run_simulate(const SimulateArgs& a) {
  auto cfg = repstat::io::config_from_json(repstat::io::parse(read_file(a.config), a.config));
  if (a.workers > 0) cfg.workers = static_cast<unsigned>(a.workers);
  const auto report = repstat::calibration_experiment(cfg);
  const auto verdict = repstat::assess_calibration(report);
  Json j = repstat::io::to_json(report);
  j["calibration"] = {{"bins_assessed", verdict.assessed}, {"pass", verdict.pass}};
  emit(j, a.common);
  if (!a.csv.empty()) write_file_atomic(a.csv, repstat::io::to_csv(report));
  std::cerr << "pairs " << report.n_pairs << ", right " << report.n_right << ", bins assessed " << verdict.assessed
            << ", calibration " << (verdict.pass ? "ok" : "off") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repetition statistics, urn models and Bayesian scoring of fits"};
  app.require_subcommand(1);

  StatsArgs stats;
  auto* cmd_stats = app.add_subcommand("stats", "Apparent and actual repeat counts of a plaintext corpus");
  cmd_stats->add_option("inputs", stats.inputs, "Corpus files; each line is one decode")->required()->check(CLI::ExistingFile);
  cmd_stats->add_option("--rmax", stats.rmax, "Longest r-gramme to count")->check(CLI::Range(1, 64));
  add_text_options(cmd_stats, stats.text);
  add_common(cmd_stats, stats.common);

  UrnArgs urn;
  auto* cmd_urn = app.add_subcommand("urn", "Card proportions from statistics, or the hatted urn");
  auto* from_stats = cmd_urn->add_option("--from-stats", urn.from_stats, "Statistics artifact");
  auto* hatted = cmd_urn->add_flag("--hatted", urn.hatted, "Uniformly random material");
  cmd_urn->add_option("--alphabet-size", urn.alphabet_size, "Alphabet size for --hatted")->check(CLI::Range(2, 256));
  cmd_urn->add_option("--rmax", urn.rmax, "Truncation for --hatted (default: machine precision, at least 25)");
  from_stats->excludes(hatted);

  WeightsArgs wargs;
  auto* cmd_weights = app.add_subcommand("weights", "Evidence weights mu_r, nu and the correction constant");
  cmd_weights->add_option("--urn", wargs.urn, "Urn artifact")->required();
  cmd_weights->add_option("--unit", wargs.unit, "nat or db")->check(CLI::IsMember({"nat", "db"}));
  cmd_weights->add_option("--smoothing-floor", wargs.floor, "Floor for alpha_r of unseen r (default off)");
  add_common(cmd_weights, wargs.common);
  add_common(cmd_urn, urn.common);

  ScoreArgs score;
  auto* cmd_score = app.add_subcommand("score", "Log-odds and posterior that a fit is right");
  cmd_score->add_option("--urn", score.urn, "Urn artifact")->required();
  auto* fig = cmd_score->add_option("--figure", score.figure, "Repetition figure as an X/O string");
  auto* pa = cmd_score->add_option("--a", score.a_path, "First message (plain text)")->check(CLI::ExistingFile);
  auto* pb = cmd_score->add_option("--b", score.b_path, "Second message (plain text)")->check(CLI::ExistingFile);
  cmd_score->add_option("--shift", score.shift, "Offset of message b against a");
  pa->needs(pb);
  pb->needs(pa);
  fig->excludes(pa);
  cmd_score->add_option("--prior-log-odds", score.prior, "log lambda, in --unit");
  cmd_score->add_option("--unit", score.unit, "nat or db")->check(CLI::IsMember({"nat", "db"}));
  cmd_score->add_option("--smoothing-floor", score.floor, "Floor for alpha_r of unseen r (default off)");
  add_text_options(cmd_score, score.text);
  add_common(cmd_score, score.common);

  SampleArgs sample;
  auto* cmd_sample = app.add_subcommand("sample", "Draw repetition figures from an urn");
  cmd_sample->add_option("--urn", sample.urn, "Urn artifact")->required();
  cmd_sample->add_option("--overlap", sample.overlap, "Figure length L")->required()->check(CLI::PositiveNumber);
  cmd_sample->add_option("--count", sample.count, "Figures to complete")->required()->check(CLI::PositiveNumber);
  cmd_sample->add_option("--seed", sample.seed, "Unsigned 64-bit seed")->required();
  cmd_sample->add_flag("--keep-trailing-o", sample.keep_trailing_o, "Keep the closing O of each figure");
  cmd_sample->add_flag("--summary-only", sample.summary_only, "Omit the figure list");
  add_common(cmd_sample, sample.common);

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo calibration experiment");
  cmd_sim->add_option("--config", sim.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd_sim->add_option("--csv", sim.csv, "Also write per-bin rows as CSV");
  cmd_sim->add_option("--workers", sim.workers, "Override the config's worker count");
  cmd_sim->add_option("-o,--out", sim.common.out, "Report path (default: stdout)");
  cmd_sim->add_flag("--reproducible", sim.common.reproducible, "Omit the creation timestamp");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (cmd_score->parsed() && score.figure.empty() && score.a_path.empty()) {
      std::cerr << "score: give --figure or --a/--b\n";
      return kExitUsage;
    }
    if (cmd_urn->parsed() && !urn.hatted && urn.from_stats.empty()) {
      std::cerr << "urn: give --from-stats or --hatted\n";
      return kExitUsage;
    }
    if (*cmd_stats) run_stats(stats);
    if (*cmd_urn) run_urn(urn);
    if (*cmd_weights) run_weights(wargs);
    if (*cmd_score) run_score(score);
    if (*cmd_sample) run_sample(sample);
    if (*cmd_sim) run_simulate(sim);
  } catch (const repstat::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModel;
  } catch (const repstat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
