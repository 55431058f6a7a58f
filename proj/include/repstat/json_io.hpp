#pragma once

// JSON artifacts: statistics, urns, weights, scores, simulation configs and reports.
// Counts are written as exact integers; proportions and weights as shortest
// round-trip decimals.

#include <cstdint>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "repstat/corpus.hpp"
#include "repstat/error.hpp"
#include "repstat/scorer.hpp"
#include "repstat/simlab.hpp"
#include "repstat/urn.hpp"

namespace repstat::io {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& field(const Json& j, const std::string& name, const std::string& where) {
  if (!j.is_object()) throw DataError(where + ": expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw DataError(where + ": missing field '" + name + "'");
  return *it;
}

inline std::int64_t as_int(const Json& v, const std::string& name, const std::string& where) {
  if (!v.is_number_integer()) throw DataError(where + ": field '" + name + "' must be an integer");
  return v.get<std::int64_t>();
}

inline std::uint64_t as_uint(const Json& v, const std::string& name, const std::string& where) {
  if (!v.is_number_unsigned()) throw DataError(where + ": field '" + name + "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline double as_double(const Json& v, const std::string& name, const std::string& where) {
  if (!v.is_number()) throw DataError(where + ": field '" + name + "' must be a number");
  return v.get<double>();
}

inline std::vector<double> as_doubles(const Json& v, const std::string& name, const std::string& where) {
  if (!v.is_array()) throw DataError(where + ": field '" + name + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_double(v[i], name + "[" + std::to_string(i) + "]", where));
  return out;
}

inline std::vector<Count> as_counts(const Json& v, const std::string& name, const std::string& where) {
  if (!v.is_array()) throw DataError(where + ": field '" + name + "' must be an array of integers");
  std::vector<Count> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_int(v[i], name + "[" + std::to_string(i) + "]", where));
  return out;
}

inline void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.contains(it.key())) throw DataError(where + ": unknown field '" + it.key() + "'");
  }
}

// {"1": x, "2": y, ...} -> dense vector indexed r-1; absent keys are zero.
inline std::vector<double> as_r_map(const Json& v, const std::string& name, const std::string& where) {
  if (!v.is_object()) throw DataError(where + ": field '" + name + "' must be an object keyed by r");
  std::vector<double> out;
  for (auto it = v.begin(); it != v.end(); ++it) {
    int r = 0;
    try {
      std::size_t used = 0;
      r = std::stoi(it.key(), &used);
      if (used != it.key().size()) r = 0;
    } catch (const std::exception&) {
      r = 0;
    }
    if (r < 1) throw DataError(where + ": field '" + name + "' has invalid key '" + it.key() + "'");
    if (out.size() < static_cast<std::size_t>(r)) out.resize(static_cast<std::size_t>(r), 0.0);
    out[static_cast<std::size_t>(r - 1)] = as_double(*it, name + "." + it.key(), where);
  }
  return out;
}

}  // namespace detail

// ---- statistics ----

inline Json to_json(const RepeatStatistics& s) {
  return Json{{"N", s.N}, {"c", s.c}, {"r_max", s.r_max}, {"M", s.M}, {"Nr", s.Nr}, {"total_cards", s.total_cards}};
}

inline RepeatStatistics stats_from_json(const Json& j) {
  const std::string where = "stats";
  using namespace detail;
  RepeatStatistics s;
  s.N = as_int(field(j, "N", where), "N", where);
  s.c = static_cast<int>(as_int(field(j, "c", where), "c", where));
  s.r_max = static_cast<int>(as_int(field(j, "r_max", where), "r_max", where));
  s.M = as_counts(field(j, "M", where), "M", where);
  s.Nr = as_counts(field(j, "Nr", where), "Nr", where);
  s.total_cards = as_int(field(j, "total_cards", where), "total_cards", where);
  if (s.N < 1 || s.c < 1) throw DataError(where + ": N and c must be positive");
  if (s.M.size() != static_cast<std::size_t>(s.r_max)) throw DataError(where + ": M must hold r_max entries");
  return s;
}

// ---- urn ----

inline Json to_json(const UrnModel& urn) {
  Json alpha = Json::object();
  for (int r = 1; r <= urn.r_max(); ++r) alpha[std::to_string(r)] = urn.alpha(r);
  return Json{{"c", urn.alphabet_size()}, {"alpha", alpha}, {"A", urn.no_repeat()}};
}

inline UrnModel urn_from_json(const Json& j) {
  const std::string where = "urn";
  using namespace detail;
  const int c = static_cast<int>(as_int(field(j, "c", where), "c", where));
  std::vector<double> alpha = as_r_map(field(j, "alpha", where), "alpha", where);
  const double a = as_double(field(j, "A", where), "A", where);
  return UrnModel(std::move(alpha), a, c);
}

// ---- weights and scores ----

inline Json to_json(const ScoreWeights& w) {
  Json mu = Json::object();
  for (auto [r, m] : w.mu) mu[std::to_string(r)] = m;
  Json j{{"c", w.c}, {"log_base", to_string(w.unit)}, {"mu", mu}, {"nu", w.nu}, {"correction", w.correction}};
  if (w.floor) j["floor"] = *w.floor;
  return j;
}

inline ScoreWeights weights_from_json(const Json& j) {
  const std::string where = "weights";
  using namespace detail;
  ScoreWeights w;
  w.c = static_cast<int>(as_int(field(j, "c", where), "c", where));
  const Json& base = field(j, "log_base", where);
  if (!base.is_string()) throw DataError(where + ": field 'log_base' must be \"nat\" or \"db\"");
  w.unit = parse_log_unit(base.get<std::string>());
  const Json& mu = field(j, "mu", where);
  const std::vector<double> dense = as_r_map(mu, "mu", where);
  for (auto it = mu.begin(); it != mu.end(); ++it) {
    const int r = std::stoi(it.key());
    w.mu[r] = dense[static_cast<std::size_t>(r - 1)];
  }
  w.nu = as_double(field(j, "nu", where), "nu", where);
  w.correction = as_double(field(j, "correction", where), "correction", where);
  if (j.contains("floor")) w.floor = as_double(j["floor"], "floor", where);
  return w;
}

inline Json to_json(const FitScore& s) {
  return Json{{"log_odds", s.log_odds},     {"posterior", s.posterior},   {"evidence", s.evidence},
              {"prior_log_odds", s.prior_log_odds}, {"correction", s.correction}, {"unit", to_string(s.unit)}};
}

// ---- simulation ----

inline Json to_json(const LanguageModel& lm) {
  switch (lm.kind()) {
    case LanguageModel::Kind::uniform:
      return Json{{"kind", "uniform"}, {"c", lm.alphabet_size()}};
    case LanguageModel::Kind::iid:
      return Json{{"kind", "iid"}, {"probs", lm.probs()}};
    case LanguageModel::Kind::markov1:
      return Json{{"kind", "markov1"}, {"initial", lm.probs()}, {"transition", lm.transition()}};
  }
  return {};
}

inline LanguageModel language_from_json(const Json& j) {
  const std::string where = "config.language";
  using namespace detail;
  const Json& kind = field(j, "kind", where);
  if (!kind.is_string()) throw DataError(where + ": field 'kind' must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "uniform") {
    reject_unknown(j, {"kind", "c"}, where);
    return LanguageModel::uniform(static_cast<int>(as_int(field(j, "c", where), "c", where)));
  }
  if (k == "iid") {
    reject_unknown(j, {"kind", "probs"}, where);
    return LanguageModel::iid(as_doubles(field(j, "probs", where), "probs", where));
  }
  if (k == "markov1") {
    reject_unknown(j, {"kind", "initial", "transition"}, where);
    const Json& t = field(j, "transition", where);
    if (!t.is_array()) throw DataError(where + ": field 'transition' must be an array of rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < t.size(); ++i) rows.push_back(as_doubles(t[i], "transition[" + std::to_string(i) + "]", where));
    return LanguageModel::markov1(as_doubles(field(j, "initial", where), "initial", where), std::move(rows));
  }
  throw DataError(where + ": field 'kind' must be uniform, iid or markov1, got '" + k + "'");
}

inline Json to_json(const ExperimentConfig& cfg) {
  Json j{{"language", to_json(cfg.language)},
         {"corpus_size", cfg.corpus_size},
         {"n_decodes", cfg.n_decodes},
         {"r_max", cfg.r_max},
         {"n_pairs", cfg.traffic.n_pairs},
         {"msg_len", cfg.traffic.msg_len},
         {"overlap", cfg.traffic.overlap},
         {"fraction_right", cfg.traffic.fraction_right},
         {"seed", cfg.traffic.seed},
         {"bin_width", cfg.bin_width},
         {"urn_source", cfg.urn_source == UrnSource::model ? "model" : "corpus"},
         {"workers", cfg.workers}};
  j["smoothing_floor"] = cfg.smoothing_floor ? Json(*cfg.smoothing_floor) : Json(nullptr);
  return j;
}

/// Parses a simulation config. Errors name the offending field.
inline ExperimentConfig config_from_json(const Json& j) {
  const std::string where = "config";
  using namespace detail;
  if (!j.is_object()) throw DataError(where + ": expected a JSON object");
  reject_unknown(j,
                 {"language", "corpus_size", "n_decodes", "r_max", "n_pairs", "msg_len", "overlap", "fraction_right",
                  "seed", "bin_width", "urn_source", "smoothing_floor", "workers"},
                 where);
  ExperimentConfig cfg;
  cfg.language = language_from_json(field(j, "language", where));
  auto size_field = [&](const char* name, std::size_t fallback) {
    return j.contains(name) ? static_cast<std::size_t>(as_uint(j[name], name, where)) : fallback;
  };
  cfg.corpus_size = size_field("corpus_size", cfg.corpus_size);
  cfg.n_decodes = size_field("n_decodes", cfg.n_decodes);
  if (j.contains("r_max")) cfg.r_max = static_cast<int>(as_int(j["r_max"], "r_max", where));
  cfg.traffic.n_pairs = static_cast<std::size_t>(as_uint(field(j, "n_pairs", where), "n_pairs", where));
  cfg.traffic.overlap = static_cast<std::size_t>(as_uint(field(j, "overlap", where), "overlap", where));
  cfg.traffic.msg_len = size_field("msg_len", cfg.traffic.overlap);
  if (j.contains("fraction_right")) cfg.traffic.fraction_right = as_double(j["fraction_right"], "fraction_right", where);
  if (j.contains("seed")) cfg.traffic.seed = as_uint(j["seed"], "seed", where);
  if (j.contains("bin_width")) cfg.bin_width = as_double(j["bin_width"], "bin_width", where);
  if (j.contains("urn_source")) {
    const Json& s = j["urn_source"];
    if (!s.is_string() || (s != "corpus" && s != "model")) {
      throw DataError(where + ": field 'urn_source' must be \"corpus\" or \"model\"");
    }
    cfg.urn_source = s == "model" ? UrnSource::model : UrnSource::corpus;
  }
  if (j.contains("smoothing_floor") && !j["smoothing_floor"].is_null()) {
    cfg.smoothing_floor = as_double(j["smoothing_floor"], "smoothing_floor", where);
  }
  if (j.contains("workers")) cfg.workers = static_cast<unsigned>(as_uint(j["workers"], "workers", where));

  if (cfg.traffic.overlap < 1 || cfg.traffic.overlap > cfg.traffic.msg_len) {
    throw DataError(where + ": field 'overlap' must satisfy 1 <= overlap <= msg_len");
  }
  if (!(cfg.traffic.fraction_right > 0.0 && cfg.traffic.fraction_right < 1.0)) {
    throw DataError(where + ": field 'fraction_right' must lie in (0, 1)");
  }
  if (cfg.traffic.n_pairs < 1) throw DataError(where + ": field 'n_pairs' must be >= 1");
  if (!(cfg.bin_width > 0.0)) throw DataError(where + ": field 'bin_width' must be positive");
  if (cfg.r_max < 1) throw DataError(where + ": field 'r_max' must be >= 1");
  return cfg;
}

inline Json to_json(const CalibrationBin& b) {
  return Json{{"lo", b.lo},
              {"hi", b.hi},
              {"n_total", b.n_total},
              {"n_right", b.n_right},
              {"mean_posterior", b.mean_posterior},
              {"empirical", b.empirical},
              {"std_error", b.std_error}};
}

inline Json to_json(const ExperimentReport& r) {
  Json bins = Json::array();
  for (const auto& b : r.bins) bins.push_back(to_json(b));
  return Json{{"config", to_json(r.config)},
              {"bins", bins},
              {"totals",
               {{"n_pairs", r.n_pairs},
                {"n_right", r.n_right},
                {"prior_log_odds", r.prior_log_odds},
                {"mean_log_odds_right", r.mean_log_odds_right},
                {"mean_log_odds_wrong", r.mean_log_odds_wrong},
                {"gap_std_error", r.gap_std_error}}},
              {"urn", {{"sum_alpha", r.urn_sum_alpha}, {"A", r.urn_no_repeat}, {"r_max", r.urn_r_max}}}};
}

/// One row per calibration bin.
inline std::string to_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "lo,hi,n_total,n_right,mean_posterior,empirical,std_error\n";
  for (const auto& b : r.bins) {
    os << b.lo << ',' << b.hi << ',' << b.n_total << ',' << b.n_right << ',' << b.mean_posterior << ','
       << b.empirical << ',' << b.std_error << '\n';
  }
  return os.str();
}

/// Parses JSON text, turning syntax errors into DataError.
inline Json parse(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(what + ": invalid JSON: " + e.what());
  }
}

}  // namespace repstat::io
