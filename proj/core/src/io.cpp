#include "motiondex/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "motiondex/error.hpp"

namespace motiondex::io {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  raise(Errc::parse_error, where + ": " + what);
}

json parse_json(std::string_view text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    parse_fail(where, e.what());
  }
}

const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object()) parse_fail(where, "expected a JSON object");
  const auto it = obj.find(name);
  if (it == obj.end()) parse_fail(where, std::string("missing field '") + name + "'");
  return *it;
}

std::string get_string(const json& obj, const char* name, const std::string& where) {
  const json& v = field(obj, name, where);
  if (!v.is_string()) parse_fail(where, std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> get_label(const json& obj, const std::string& where) {
  const auto it = obj.find("label");
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) parse_fail(where, "field 'label' must be a string or null");
  return it->get<std::string>();
}

double get_number(const json& v, const std::string& where, const char* name) {
  if (!v.is_number()) parse_fail(where, std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

std::size_t get_count(const json& v, const std::string& where, const char* name) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    parse_fail(where, std::string("field '") + name + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> get_numbers(const json& v, const std::string& where, const char* name) {
  if (!v.is_array()) parse_fail(where, std::string("field '") + name + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(get_number(x, where, name));
  return out;
}

std::vector<Word> get_words(const json& v, const std::string& where) {
  if (!v.is_array()) parse_fail(where, "field 'words' must be an array");
  std::vector<Word> words;
  words.reserve(v.size());
  for (const auto& w : v) {
    if (!w.is_number_integer() || w.get<std::int64_t>() < 0 ||
        w.get<std::int64_t>() > std::numeric_limits<Word>::max()) {
      parse_fail(where, "motion words must be non-negative integers");
    }
    words.push_back(w.get<Word>());
  }
  return words;
}

json label_json(const std::optional<std::string>& label) {
  return label ? json(*label) : json(nullptr);
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    try {
      fn(parse_json(line, where), where);
    } catch (const Error& e) {
      if (e.code() == Errc::parse_error) throw;
      raise(Errc::parse_error, where + ": " + e.what());
    }
  }
  if (in.bad()) raise(Errc::io_error, "read failure");
}

}  // namespace

std::vector<PoseSequence> read_poses(std::istream& in) {
  std::vector<PoseSequence> out;
  for_each_line(in, [&](const json& obj, const std::string& where) {
    const std::string id = get_string(obj, "id", where);
    const double fps = get_number(field(obj, "fps", where), where, "fps");
    const json& frames = field(obj, "frames", where);
    if (!frames.is_array() || frames.empty()) parse_fail(where, "field 'frames' must be a non-empty array");
    std::size_t num_joints = 0;
    std::vector<Joint> joints;
    for (const auto& frame : frames) {
      if (!frame.is_array()) parse_fail(where, "each frame must be an array of joints");
      if (num_joints == 0) num_joints = frame.size();
      if (frame.size() != num_joints) parse_fail(where, "frames differ in joint count");
      for (const auto& j : frame) {
        if (!j.is_array() || j.size() != 3) parse_fail(where, "each joint must be [x, y, z]");
        joints.push_back({get_number(j[0], where, "frames"), get_number(j[1], where, "frames"),
                          get_number(j[2], where, "frames")});
      }
    }
    out.emplace_back(id, get_label(obj, where), fps, num_joints, std::move(joints));
  });
  return out;
}

void write_poses(std::ostream& out, const std::vector<PoseSequence>& poses) {
  for (const auto& p : poses) {
    json frames = json::array();
    for (std::size_t t = 0; t < p.num_frames(); ++t) {
      json frame = json::array();
      for (const auto& j : p.frame(t)) frame.push_back(json::array({j[0], j[1], j[2]}));
      frames.push_back(std::move(frame));
    }
    json obj;
    obj["id"] = p.id();
    obj["label"] = label_json(p.label());
    obj["fps"] = p.fps();
    obj["frames"] = std::move(frames);
    out << obj.dump() << '\n';
  }
}

std::vector<TokenSequence> read_tokens(std::istream& in) {
  std::vector<TokenSequence> out;
  for_each_line(in, [&](const json& obj, const std::string& where) {
    out.push_back({get_string(obj, "id", where), get_label(obj, where), get_words(field(obj, "words", where), where)});
  });
  return out;
}

void write_tokens(std::ostream& out, const std::vector<TokenSequence>& tokens) {
  for (const auto& t : tokens) {
    json obj;
    obj["id"] = t.id;
    obj["label"] = label_json(t.label);
    obj["words"] = t.words;
    out << obj.dump() << '\n';
  }
}

std::string codebook_to_json(const Codebook& cb) {
  const auto& meta = cb.meta();
  json pairs = json::array();
  for (const auto& [i, j] : meta.joint_pairs) pairs.push_back(json::array({i, j}));
  json fm;
  fm["patch_len"] = meta.featurizer.patch_len;
  fm["stride"] = meta.featurizer.stride;
  fm["scale_norm"] = meta.featurizer.scale_norm;
  fm["num_joints"] = meta.num_joints;
  fm["joint_pairs"] = std::move(pairs);

  json codes = json::array(), sums = json::array();
  for (std::size_t k = 0; k < cb.size(); ++k) {
    const auto c = cb.code(k);
    const auto m = cb.ema_sum(k);
    codes.push_back(std::vector<double>(c.begin(), c.end()));
    sums.push_back(std::vector<double>(m.begin(), m.end()));
  }

  json obj;
  obj["version"] = kCodebookVersion;
  obj["K"] = cb.size();
  obj["D"] = cb.dim();
  obj["alpha"] = cb.alpha();
  obj["epsilon"] = cb.epsilon();
  obj["feature_meta"] = std::move(fm);
  obj["codes"] = std::move(codes);
  obj["ema_counts"] = cb.ema_counts();
  obj["ema_sums"] = std::move(sums);
  return obj.dump() + "\n";
}

Codebook codebook_from_json(std::string_view text) {
  const std::string where = "codebook";
  const json obj = parse_json(text, where);
  if (get_count(field(obj, "version", where), where, "version") != kCodebookVersion) {
    parse_fail(where, "unsupported codebook version");
  }
  const std::size_t K = get_count(field(obj, "K", where), where, "K");
  const std::size_t D = get_count(field(obj, "D", where), where, "D");
  const double alpha = get_number(field(obj, "alpha", where), where, "alpha");
  const double epsilon = get_number(field(obj, "epsilon", where), where, "epsilon");

  const json& fm = field(obj, "feature_meta", where);
  FeatureMeta meta;
  meta.featurizer.patch_len = get_count(field(fm, "patch_len", where), where, "patch_len");
  meta.featurizer.stride = get_count(field(fm, "stride", where), where, "stride");
  const json& scale = field(fm, "scale_norm", where);
  if (!scale.is_boolean()) parse_fail(where, "field 'scale_norm' must be a boolean");
  meta.featurizer.scale_norm = scale.get<bool>();
  meta.num_joints = get_count(field(fm, "num_joints", where), where, "num_joints");
  const json& pairs = field(fm, "joint_pairs", where);
  if (!pairs.is_array()) parse_fail(where, "field 'joint_pairs' must be an array");
  for (const auto& p : pairs) {
    if (!p.is_array() || p.size() != 2) parse_fail(where, "joint pairs must be [i, j]");
    meta.joint_pairs.emplace_back(get_count(p[0], where, "joint_pairs"), get_count(p[1], where, "joint_pairs"));
  }
  if (meta.num_joints != 0 && meta.joint_pairs != joint_pair_order(meta.num_joints)) {
    parse_fail(where, "joint pair order is not the lexicographic order for " +
                          std::to_string(meta.num_joints) + " joints");
  }

  try {
    Codebook cb(K, D, alpha, epsilon, meta);
    const json& codes = field(obj, "codes", where);
    const json& sums = field(obj, "ema_sums", where);
    const auto counts = get_numbers(field(obj, "ema_counts", where), where, "ema_counts");
    if (!codes.is_array() || codes.size() != K || !sums.is_array() || sums.size() != K || counts.size() != K) {
      parse_fail(where, "codes, ema_counts and ema_sums must have K rows");
    }
    for (std::size_t k = 0; k < K; ++k) {
      const auto c = get_numbers(codes[k], where, "codes");
      const auto m = get_numbers(sums[k], where, "ema_sums");
      if (c.size() != D || m.size() != D) parse_fail(where, "code rows must have D entries");
      std::copy(c.begin(), c.end(), cb.code(k).begin());
      std::copy(m.begin(), m.end(), cb.ema_sum(k).begin());
      if (counts[k] < 0.0) parse_fail(where, "ema_counts must be non-negative");
      cb.ema_counts()[k] = counts[k];
    }
    return cb;
  } catch (const Error& e) {
    if (e.code() == Errc::parse_error) throw;
    parse_fail(where, e.what());
  }
}

std::string index_to_json(const MotionIndex& idx) {
  json entries = json::array();
  for (const auto& e : idx.entries()) {
    json obj;
    obj["id"] = e.id;
    obj["label"] = label_json(e.label);
    obj["words"] = e.tokens.words;
    obj["hist"] = e.hist.dense();
    obj["periodic"] = e.periodic;
    entries.push_back(std::move(obj));
  }
  json obj;
  obj["version"] = kIndexVersion;
  obj["K"] = idx.vocab();
  obj["entries"] = std::move(entries);
  return obj.dump() + "\n";
}

MotionIndex index_from_json(std::string_view text) {
  const std::string where = "index";
  const json obj = parse_json(text, where);
  if (get_count(field(obj, "version", where), where, "version") != kIndexVersion) {
    parse_fail(where, "unsupported index version");
  }
  const std::size_t K = get_count(field(obj, "K", where), where, "K");
  if (K == 0) parse_fail(where, "K must be positive");
  const json& entries = field(obj, "entries", where);
  if (!entries.is_array()) parse_fail(where, "field 'entries' must be an array");

  MotionIndex idx(K);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const json& e = entries[i];
    const std::string at = where + " entry " + std::to_string(i);
    try {
      IndexEntry entry;
      entry.id = get_string(e, "id", at);
      entry.label = get_label(e, at);
      entry.tokens = {entry.id, entry.label, get_words(field(e, "words", at), at)};
      for (Word w : entry.tokens.words) {
        if (w >= K) parse_fail(at, "word " + std::to_string(w) + " outside vocabulary");
      }
      const auto hist = get_numbers(field(e, "hist", at), at, "hist");
      if (hist.size() != K) parse_fail(at, "histogram must have K bins");
      entry.hist = Histogram(hist, entry.tokens.words.size());
      const auto rebuilt = build_histogram(entry.tokens.words, K).dense();
      for (std::size_t k = 0; k < K; ++k) {
        if (std::abs(hist[k] - rebuilt[k]) > 1e-9) parse_fail(at, "histogram does not match words");
      }
      const json& periodic = field(e, "periodic", at);
      if (!periodic.is_boolean()) parse_fail(at, "field 'periodic' must be a boolean");
      entry.periodic = periodic.get<bool>();
      idx.append_entry(std::move(entry));
    } catch (const Error& err) {
      if (err.code() == Errc::parse_error) throw;
      parse_fail(at, err.what());
    }
  }
  return idx;
}

namespace {

constexpr std::array<const char*, 6> kWeightNames = {"hist", "twed", "lcss", "edr", "erp", "ngram"};

void read_double(const json& obj, const char* name, double& dst, const std::string& where) {
  if (const auto it = obj.find(name); it != obj.end()) dst = get_number(*it, where, name);
}

void read_count(const json& obj, const char* name, std::size_t& dst, const std::string& where) {
  if (const auto it = obj.find(name); it != obj.end()) dst = get_count(*it, where, name);
}

}  // namespace

EngineConfig engine_config_from_json(std::string_view text, bool renormalize) {
  const std::string where = "engine config";
  const json obj = parse_json(text, where);
  if (!obj.is_object()) parse_fail(where, "expected a JSON object");
  EngineConfig cfg;

  if (const auto it = obj.find("weights"); it != obj.end()) {
    if (!it->is_object()) parse_fail(where, "field 'weights' must be an object");
    auto w = cfg.weights.as_array();
    for (std::size_t m = 0; m < w.size(); ++m) {
      const auto f = it->find(kWeightNames[m]);
      if (f == it->end()) parse_fail(where, std::string("weights missing '") + kWeightNames[m] + "'");
      w[m] = get_number(*f, where, kWeightNames[m]);
    }
    cfg.weights = ScoreWeights::from_array(w);
  }
  if (const auto it = obj.find("align"); it != obj.end()) {
    if (!it->is_object()) parse_fail(where, "field 'align' must be an object");
    read_double(*it, "twed_nu", cfg.align.twed_nu, where);
    read_double(*it, "twed_lambda", cfg.align.twed_lambda, where);
    read_double(*it, "lcss_epsilon", cfg.align.lcss_epsilon, where);
    if (const auto d = it->find("lcss_delta"); d != it->end() && !d->is_null()) {
      cfg.align.lcss_delta = get_count(*d, where, "lcss_delta");
    }
    read_double(*it, "edr_epsilon", cfg.align.edr_epsilon, where);
    read_double(*it, "erp_gap", cfg.align.erp_gap, where);
    read_double(*it, "erp_beta", cfg.align.erp_beta, where);
    read_count(*it, "ngram_n", cfg.align.ngram_n, where);
  }
  if (const auto it = obj.find("periodicity"); it != obj.end()) {
    if (!it->is_object()) parse_fail(where, "field 'periodicity' must be an object");
    read_double(*it, "theta", cfg.periodicity.theta, where);
    read_count(*it, "min_peaks", cfg.periodicity.min_peaks, where);
    if (const auto m = it->find("max_lag"); m != it->end() && !m->is_null()) {
      cfg.periodicity.max_lag = get_count(*m, where, "max_lag");
    }
  }
  if (const auto it = obj.find("shortlist_cap"); it != obj.end() && !it->is_null()) {
    cfg.shortlist_cap = get_count(*it, where, "shortlist_cap");
  }

  if (renormalize) cfg.weights = cfg.weights.normalized();
  cfg.validate();
  return cfg;
}

std::string engine_config_to_json(const EngineConfig& cfg) {
  json weights;
  const auto w = cfg.weights.as_array();
  for (std::size_t m = 0; m < w.size(); ++m) weights[kWeightNames[m]] = w[m];
  json align;
  align["twed_nu"] = cfg.align.twed_nu;
  align["twed_lambda"] = cfg.align.twed_lambda;
  align["lcss_epsilon"] = cfg.align.lcss_epsilon;
  align["lcss_delta"] = cfg.align.lcss_delta == std::numeric_limits<std::size_t>::max()
                            ? json(nullptr)
                            : json(cfg.align.lcss_delta);
  align["edr_epsilon"] = cfg.align.edr_epsilon;
  align["erp_gap"] = cfg.align.erp_gap;
  align["erp_beta"] = cfg.align.erp_beta;
  align["ngram_n"] = cfg.align.ngram_n;
  json periodicity;
  periodicity["theta"] = cfg.periodicity.theta;
  periodicity["min_peaks"] = cfg.periodicity.min_peaks;
  periodicity["max_lag"] = cfg.periodicity.max_lag ? json(cfg.periodicity.max_lag) : json(nullptr);

  json obj;
  obj["weights"] = std::move(weights);
  obj["align"] = std::move(align);
  obj["periodicity"] = std::move(periodicity);
  obj["shortlist_cap"] = cfg.shortlist_cap ? json(*cfg.shortlist_cap) : json(nullptr);
  return obj.dump(2) + "\n";
}

std::string retrieval_to_json(const RetrievalResult& result, bool with_timing) {
  json ranked = json::array();
  for (std::size_t r = 0; r < result.ranked.size(); ++r) {
    const auto& c = result.ranked[r];
    json phi, weighted;
    for (std::size_t m = 0; m < kScoredMetrics.size(); ++m) {
      phi[kWeightNames[m]] = c.breakdown.similarity[m];
      weighted[kWeightNames[m]] = c.breakdown.weighted[m];
    }
    json item;
    item["rank"] = r + 1;
    item["id"] = c.candidate_id;
    item["score"] = c.score;
    item["shortlist_rank"] = c.shortlist_rank ? json(c.shortlist_rank) : json(nullptr);
    item["phi"] = std::move(phi);
    item["weighted"] = std::move(weighted);
    if (c.dtw_distance) item["dtw"] = *c.dtw_distance;
    ranked.push_back(std::move(item));
  }
  json obj;
  obj["query_id"] = result.query_id;
  obj["backend"] = to_string(result.backend);
  obj["candidates_scored"] = result.candidates_scored;
  obj["ranked"] = std::move(ranked);
  if (with_timing) {
    obj["timing"] = json{{"stage1_ms", result.timing.stage1_ms}, {"stage2_ms", result.timing.stage2_ms}};
  }
  return obj.dump();
}

std::string health_to_json(std::size_t epoch, bool warmup, const CodebookHealth& health) {
  json obj;
  obj["epoch"] = epoch;
  obj["warmup"] = warmup;
  obj["usage_pct"] = health.usage_pct;
  obj["assignment_entropy"] = health.assignment_entropy;
  obj["quantisation_mse"] = health.quantisation_mse;
  obj["revived"] = health.revived;
  return obj.dump();
}

std::string eval_report_to_json(const EvalReport& report) {
  json per_class;
  for (const auto& [label, s] : report.per_class) {
    per_class[label] = json{{"n_queries", s.n_queries}, {"mean_score", s.mean_score},
                            {"match_rate_pct", s.match_rate_pct}};
  }
  json obj;
  obj["backend"] = to_string(report.backend);
  obj["n_queries"] = report.n_queries;
  obj["top_n"] = report.top_n;
  obj["mean_score"] = report.mean_score;
  obj["match_rate_pct"] = report.match_rate_pct;
  obj["rank1_pct"] = report.rank1_pct();
  obj["rank_histogram"] = json{{"1", report.rank_histogram[0]}, {"2", report.rank_histogram[1]},
                               {"3", report.rank_histogram[2]}, {">3", report.rank_histogram[3]}};
  obj["per_class"] = std::move(per_class);
  obj["warnings"] = report.warnings;
  return obj.dump();
}

std::string eval_report_to_table(const EvalReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "backend      %s\nqueries      %zu\nmean score   %.4f\n",
                std::string(to_string(report.backend)).c_str(), report.n_queries, report.mean_score);
  out << line;
  std::snprintf(line, sizeof line, "match rate   %.1f%% (top-%zu)\nrank-1       %.1f%%\n", report.match_rate_pct,
                report.top_n, report.rank1_pct());
  out << line;
  std::snprintf(line, sizeof line, "best rank    1:%zu  2:%zu  3:%zu  >3:%zu\n\n", report.rank_histogram[0],
                report.rank_histogram[1], report.rank_histogram[2], report.rank_histogram[3]);
  out << line;
  std::snprintf(line, sizeof line, "%-24s %8s %10s %10s\n", "class", "queries", "mean", "match%");
  out << line;
  for (const auto& [label, s] : report.per_class) {
    std::snprintf(line, sizeof line, "%-24s %8zu %10.4f %10.1f\n", label.c_str(), s.n_queries, s.mean_score,
                  s.match_rate_pct);
    out << line;
  }
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  return out.str();
}

std::string eval_queries_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "query_id,label,best_rank,score,top_id\n";
  for (const auto& q : report.queries) {
    out << q.query_id << ',' << q.label << ',';
    if (q.best_rank) out << *q.best_rank;
    out << ',' << q.score << ',' << q.top_id << '\n';
  }
  return out.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) raise(Errc::io_error, "failed reading '" + path.string() + "'");
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::io_error, "cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) raise(Errc::io_error, "failed writing '" + path.string() + "'");
}

}  // namespace motiondex::io
