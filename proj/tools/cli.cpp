#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "motiondex/codebook.hpp"
#include "motiondex/engine.hpp"
#include "motiondex/error.hpp"
#include "motiondex/eval.hpp"
#include "motiondex/index.hpp"
#include "motiondex/io.hpp"
#include "motiondex/parallel.hpp"
#include "motiondex/random.hpp"
#include "motiondex/synth.hpp"

namespace motiondex::cli {

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  int verbosity = 0;
};

// Flags that override engine config file values when given explicitly.
struct EngineFlags {
  std::string config_path;
  bool renormalize = false;
  std::vector<double> weights;
  double twed_nu = 0.0, twed_lambda = 0.0, lcss_epsilon = 0.0, edr_epsilon = 0.0, erp_gap = 0.0,
         erp_beta = 0.0;
  std::size_t lcss_delta = 0, ngram_n = 0, max_shortlist = 0;
  double theta = 0.0;
  std::size_t min_peaks = 0, max_lag = 0;

  CLI::Option* o_weights = nullptr;
  CLI::Option* o_twed_nu = nullptr;
  CLI::Option* o_twed_lambda = nullptr;
  CLI::Option* o_lcss_epsilon = nullptr;
  CLI::Option* o_lcss_delta = nullptr;
  CLI::Option* o_edr_epsilon = nullptr;
  CLI::Option* o_erp_gap = nullptr;
  CLI::Option* o_erp_beta = nullptr;
  CLI::Option* o_ngram_n = nullptr;
  CLI::Option* o_max_shortlist = nullptr;
  CLI::Option* o_theta = nullptr;
  CLI::Option* o_min_peaks = nullptr;
  CLI::Option* o_max_lag = nullptr;

  void add_periodicity(CLI::App* app) {
    o_theta = app->add_option("--theta", theta, "Periodicity autocorrelation threshold");
    o_min_peaks = app->add_option("--min-peaks", min_peaks, "Local maxima required for a periodic flag");
    o_max_lag = app->add_option("--max-lag", max_lag, "Largest autocorrelation lag (default T/2)");
  }

  void add_all(CLI::App* app) {
    app->add_option("--config", config_path, "Engine config file (JSON)");
    app->add_flag("--renormalize", renormalize, "Rescale weights to sum to one instead of rejecting them");
    o_weights = app->add_option("--weights", weights, "hist,twed,lcss,edr,erp,ngram weights")
                    ->delimiter(',')
                    ->expected(6);
    o_twed_nu = app->add_option("--twed-nu", twed_nu, "TWED temporal stiffness");
    o_twed_lambda = app->add_option("--twed-lambda", twed_lambda, "TWED edit penalty");
    o_lcss_epsilon = app->add_option("--lcss-epsilon", lcss_epsilon, "LCSS match tolerance");
    o_lcss_delta = app->add_option("--lcss-delta", lcss_delta, "LCSS lag bound (default unbounded)");
    o_edr_epsilon = app->add_option("--edr-epsilon", edr_epsilon, "EDR match tolerance");
    o_erp_gap = app->add_option("--erp-gap", erp_gap, "ERP gap value");
    o_erp_beta = app->add_option("--erp-beta", erp_beta, "ERP gap penalty scale");
    o_ngram_n = app->add_option("--ngram-n", ngram_n, "n-gram order");
    o_max_shortlist = app->add_option("--max-shortlist", max_shortlist, "Hard cap on the Stage-1 shortlist");
    add_periodicity(app);
  }

  EngineConfig resolve() const {
    EngineConfig cfg;
    if (!config_path.empty()) {
      cfg = io::engine_config_from_json(io::read_file(config_path), renormalize);
    }
    const auto given = [](const CLI::Option* o) { return o != nullptr && o->count() > 0; };
    if (given(o_weights)) {
      cfg.weights = ScoreWeights::from_array({weights[0], weights[1], weights[2], weights[3], weights[4], weights[5]});
      if (renormalize) cfg.weights = cfg.weights.normalized();
    }
    if (given(o_twed_nu)) cfg.align.twed_nu = twed_nu;
    if (given(o_twed_lambda)) cfg.align.twed_lambda = twed_lambda;
    if (given(o_lcss_epsilon)) cfg.align.lcss_epsilon = lcss_epsilon;
    if (given(o_lcss_delta)) cfg.align.lcss_delta = lcss_delta;
    if (given(o_edr_epsilon)) cfg.align.edr_epsilon = edr_epsilon;
    if (given(o_erp_gap)) cfg.align.erp_gap = erp_gap;
    if (given(o_erp_beta)) cfg.align.erp_beta = erp_beta;
    if (given(o_ngram_n)) cfg.align.ngram_n = ngram_n;
    if (given(o_max_shortlist)) cfg.shortlist_cap = max_shortlist;
    if (given(o_theta)) cfg.periodicity.theta = theta;
    if (given(o_min_peaks)) cfg.periodicity.min_peaks = min_peaks;
    if (given(o_max_lag)) cfg.periodicity.max_lag = max_lag;
    cfg.validate();
    return cfg;
  }
};

std::vector<PoseSequence> load_poses(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open '" + path + "' for reading");
  try {
    return io::read_poses(in);
  } catch (const Error& e) {
    if (e.code() == Errc::io_error) throw;
    raise(e.code(), path + ": " + e.what());
  }
}

std::vector<TokenSequence> load_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open '" + path + "' for reading");
  try {
    return io::read_tokens(in);
  } catch (const Error& e) {
    if (e.code() == Errc::io_error) throw;
    raise(e.code(), path + ": " + e.what());
  }
}

void emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    io::write_file(path, contents);
  }
}

// ---- gen-synth -------------------------------------------------------------

struct GenSynthArgs {
  std::string kind = "tokens";
  std::string out;
  SynthCorpusConfig tokens;
  SynthPoseConfig poses;
  std::size_t classes = 0, per_class = 0;
};

void gen_synth(const GenSynthArgs& a, const Common& common, std::ostream& out) {
  std::ostringstream buf;
  if (a.kind == "tokens") {
    SynthCorpusConfig cfg = a.tokens;
    if (a.classes) cfg.n_classes = a.classes;
    if (a.per_class) cfg.per_class = a.per_class;
    cfg.seed = common.seed;
    io::write_tokens(buf, gen_synth_corpus(cfg));
  } else if (a.kind == "poses") {
    SynthPoseConfig cfg = a.poses;
    if (a.classes) cfg.n_classes = a.classes;
    if (a.per_class) cfg.per_class = a.per_class;
    cfg.seed = common.seed;
    io::write_poses(buf, gen_synth_poses(cfg));
  } else {
    raise(Errc::invalid_input, "--kind must be 'tokens' or 'poses'");
  }
  emit(a.out, buf.str(), out);
}

// ---- train-codebook --------------------------------------------------------

struct TrainArgs {
  std::string poses, out;
  std::size_t K = kDefaultVocabulary;
  double alpha = kDefaultAlpha;
  double epsilon = kDefaultEpsilon;
  std::size_t epochs = 10;
  std::size_t warmup_epochs = 1;
  std::size_t batch_size = 16;
  FeaturizerConfig featurizer;
  bool no_scale_norm = false;
  bool no_revive = false;
  std::string reservoir = "last-batch";
};

void train_codebook(const TrainArgs& a, const Common& common, std::ostream& out, std::ostream& err) {
  if (a.batch_size == 0) raise(Errc::invalid_input, "--batch-size must be positive");
  FeaturizerConfig fcfg = a.featurizer;
  fcfg.scale_norm = !a.no_scale_norm;
  fcfg.validate();

  const auto poses = load_poses(a.poses);
  if (poses.empty()) raise(Errc::invalid_input, "no pose sequences in '" + a.poses + "'");
  const std::size_t joints = poses.front().num_joints();
  std::vector<std::vector<PatchFeature>> per_seq(poses.size());
  parallel_for(poses.size(), common.threads, [&](std::size_t i) {
    if (poses[i].num_joints() != joints) {
      raise(Errc::invalid_input, "sequence '" + poses[i].id() + "' has a different joint count");
    }
    per_seq[i] = featurize_sequence(poses[i], fcfg);
  });

  std::vector<PatchFeature> sample;
  for (const auto& p : per_seq) sample.insert(sample.end(), p.begin(), p.end());

  ReservoirPolicy policy;
  if (a.reservoir == "last-batch") {
    policy = ReservoirPolicy::last_batch;
  } else if (a.reservoir == "epoch") {
    policy = ReservoirPolicy::whole_epoch;
  } else {
    raise(Errc::invalid_input, "--reservoir must be 'last-batch' or 'epoch'");
  }

  Codebook cb = init_codebook(sample, a.K, a.alpha, common.seed, FeatureMeta::for_joints(fcfg, joints), a.epsilon);
  if (common.verbosity > 0) {
    err << "training K=" << a.K << " on " << sample.size() << " patches from " << poses.size() << " sequences\n";
  }

  std::ostringstream log;
  std::vector<std::size_t> order(poses.size());
  for (std::size_t epoch = 0; epoch < a.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(common.seed + 0x9e3779b97f4a7c15ULL * (epoch + 1));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);

    std::vector<PatchBatch> batches;
    for (std::size_t start = 0; start < order.size(); start += a.batch_size) {
      PatchBatch batch;
      for (std::size_t i = start; i < std::min(order.size(), start + a.batch_size); ++i) {
        const auto& p = per_seq[order[i]];
        batch.insert(batch.end(), p.begin(), p.end());
      }
      batches.push_back(std::move(batch));
    }

    TrainOptions opts;
    opts.warmup = epoch < a.warmup_epochs;
    opts.revive = !a.no_revive;
    opts.reservoir = policy;
    opts.seed = rng.next();
    const CodebookHealth health = train_epoch(batches, cb, opts);
    log << io::health_to_json(epoch + 1, opts.warmup, health) << '\n';
  }

  io::write_file(a.out, io::codebook_to_json(cb));
  out << log.str();
}

// ---- tokenize --------------------------------------------------------------

struct TokenizeArgs {
  std::string poses, codebook, out;
};

void tokenize(const TokenizeArgs& a, const Common& common, std::ostream& out) {
  const Codebook cb = io::codebook_from_json(io::read_file(a.codebook));
  const auto poses = load_poses(a.poses);
  std::vector<TokenSequence> tokens(poses.size());
  parallel_for(poses.size(), common.threads, [&](std::size_t i) {
    tokens[i] = tokenize_sequence(poses[i], cb.meta().featurizer, cb);
  });
  std::ostringstream buf;
  io::write_tokens(buf, tokens);
  emit(a.out, buf.str(), out);
}

// ---- build-index -----------------------------------------------------------

struct BuildIndexArgs {
  std::string tokens, out, codebook;
  std::size_t K = 0;
};

void build_index_cmd(const BuildIndexArgs& a, const EngineFlags& flags, std::ostream& out, std::ostream& err,
                     const Common& common) {
  std::size_t vocab = a.K;
  if (!a.codebook.empty()) {
    const std::size_t from_cb = io::codebook_from_json(io::read_file(a.codebook)).size();
    if (vocab != 0 && vocab != from_cb) {
      raise(Errc::config_mismatch, "--K disagrees with the codebook size " + std::to_string(from_cb));
    }
    vocab = from_cb;
  }
  if (vocab == 0) vocab = kDefaultVocabulary;
  const EngineConfig cfg = flags.resolve();
  const auto tokens = load_tokens(a.tokens);
  if (tokens.empty()) raise(Errc::invalid_input, "no token sequences in '" + a.tokens + "'");
  const MotionIndex idx = build_index(tokens, vocab, cfg.periodicity);
  if (common.verbosity > 0) err << "indexed " << idx.size() << " sequences over K=" << vocab << '\n';
  emit(a.out, io::index_to_json(idx), out);
}

// ---- query -----------------------------------------------------------------

struct QueryArgs {
  std::string index, tokens, out;
  std::vector<std::string> ids;
  std::size_t k = 10;
  std::string backend = "two-stage";
  bool exclude_self = false;
  bool timing = false;
  bool dtw = false;
};

void query_cmd(const QueryArgs& a, const EngineFlags& flags, const Common& common, std::ostream& out) {
  EngineConfig cfg = flags.resolve();
  cfg.exclude_self = a.exclude_self;
  cfg.dtw_diagnostics = a.dtw;
  cfg.threads = common.threads;
  const Backend backend = backend_from_string(a.backend);
  const MotionIndex idx = io::index_from_json(io::read_file(a.index));

  std::vector<TokenSequence> queries;
  if (!a.tokens.empty()) queries = load_tokens(a.tokens);
  for (const auto& id : a.ids) {
    const auto pos = idx.find(id);
    if (!pos) raise(Errc::invalid_input, "no sequence '" + id + "' in the index");
    queries.push_back(idx.entry(*pos).tokens);
  }
  if (queries.empty()) raise(Errc::invalid_input, "query needs --tokens or --id");

  std::ostringstream buf;
  for (const auto& q : queries) {
    buf << io::retrieval_to_json(run_query(q, idx, cfg, a.k, backend), a.timing) << '\n';
  }
  emit(a.out, buf.str(), out);
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string tokens, out, csv;
  std::size_t K = kDefaultVocabulary;
  std::string backend = "two-stage";
  std::size_t leave_k_out = 1;
  std::size_t top_n = 3;
  std::string format = "table";
};

void eval_cmd(const EvalArgs& a, const EngineFlags& flags, const Common& common, std::ostream& out,
              std::ostream& err) {
  EngineConfig cfg = flags.resolve();
  cfg.threads = common.threads;
  const auto corpus = load_tokens(a.tokens);

  std::vector<Backend> backends;
  if (a.backend == "both") {
    backends = {Backend::two_stage, Backend::brute_force};
  } else {
    backends = {backend_from_string(a.backend)};
  }
  if (a.format != "table" && a.format != "json") raise(Errc::invalid_input, "--format must be 'table' or 'json'");

  std::ostringstream buf, csv;
  for (Backend b : backends) {
    EvalProtocol protocol{a.leave_k_out, a.top_n, b};
    const EvalReport report = evaluate(corpus, a.K, cfg, protocol);
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    if (a.format == "json") {
      buf << io::eval_report_to_json(report) << '\n';
    } else {
      if (b != backends.front()) buf << '\n';
      buf << io::eval_report_to_table(report);
    }
    if (!a.csv.empty()) {
      const std::string rows = io::eval_queries_to_csv(report);
      // Header only once when both back-ends are written.
      csv << (b == backends.front() ? rows : rows.substr(rows.find('\n') + 1));
    }
  }
  emit(a.out, buf.str(), out);
  if (!a.csv.empty()) io::write_file(a.csv, csv.str());
}

// ---- inspect ---------------------------------------------------------------

struct InspectArgs {
  std::string codebook, index, tokens, poses;
};

void inspect(const InspectArgs& a, const Common& common, std::ostream& out) {
  if (a.codebook.empty() && a.index.empty() && a.tokens.empty()) {
    raise(Errc::invalid_input, "inspect needs --codebook, --index or --tokens");
  }
  if (!a.tokens.empty()) {
    io::write_tokens(out, load_tokens(a.tokens));
  }
  if (!a.codebook.empty()) {
    Codebook cb = io::codebook_from_json(io::read_file(a.codebook));
    std::size_t live = 0;
    double total_count = 0.0;
    for (double n : cb.ema_counts()) {
      live += n > cb.epsilon() ? 1 : 0;
      total_count += n;
    }
    std::ostringstream line;
    line << "codebook K=" << cb.size() << " D=" << cb.dim() << " alpha=" << cb.alpha()
         << " epsilon=" << cb.epsilon() << " patch_len=" << cb.meta().featurizer.patch_len
         << " stride=" << cb.meta().featurizer.stride << " joints=" << cb.meta().num_joints << '\n'
         << "  ema live codes " << live << "/" << cb.size() << " ("
         << 100.0 * static_cast<double>(live) / static_cast<double>(cb.size()) << "%), ema mass " << total_count
         << '\n';
    if (!a.poses.empty()) {
      const auto poses = load_poses(a.poses);
      std::vector<PatchBatch> batches(poses.size());
      parallel_for(poses.size(), common.threads, [&](std::size_t i) {
        batches[i] = featurize_sequence(poses[i], cb.meta().featurizer);
      });
      TrainOptions opts;
      opts.warmup = true;  // measure only
      const CodebookHealth h = train_epoch(batches, cb, opts);
      line << "  health usage " << h.usage_pct << "% entropy " << h.assignment_entropy << " nats mse "
           << h.quantisation_mse << '\n';
    }
    out << line.str();
  }
  if (!a.index.empty()) {
    const MotionIndex idx = io::index_from_json(io::read_file(a.index));
    std::size_t periodic = 0, min_len = 0, max_len = 0, total_len = 0;
    std::vector<bool> seen(idx.vocab(), false);
    std::map<std::string, std::size_t> labels;
    for (const auto& e : idx.entries()) {
      const std::size_t n = e.tokens.words.size();
      periodic += e.periodic ? 1 : 0;
      min_len = min_len == 0 ? n : std::min(min_len, n);
      max_len = std::max(max_len, n);
      total_len += n;
      for (Word w : e.tokens.words) seen[w] = true;
      ++labels[e.label.value_or("(none)")];
    }
    const auto covered = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
    std::ostringstream line;
    line << "index K=" << idx.vocab() << " entries=" << idx.size() << " periodic=" << periodic
         << " shortlist=" << shortlist_size(idx.size()) << '\n';
    if (!idx.empty()) {
      line << "  length min " << min_len << " mean "
           << static_cast<double>(total_len) / static_cast<double>(idx.size()) << " max " << max_len << '\n'
           << "  vocabulary coverage " << covered << "/" << idx.vocab() << '\n';
      for (const auto& [label, n] : labels) line << "  label " << label << ": " << n << '\n';
    }
    out << line.str();
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Motion-word tokenisation and two-stage retrieval"};
  app.name("motiondex");
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
    sub->add_option("--threads", common.threads, "Worker threads (default: DRE_THREADS or all cores)");
    sub->add_flag("-v,--verbose", common.verbosity, "Progress on stderr");
  };

  GenSynthArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synth", "Generate a labelled synthetic token or pose corpus");
  add_common(gen_cmd);
  gen_cmd->add_option("--kind", gen.kind, "tokens or poses")->capture_default_str();
  gen_cmd->add_option("-o,--out", gen.out, "Output JSON Lines file (default stdout)");
  gen_cmd->add_option("--classes", gen.classes, "Number of classes");
  gen_cmd->add_option("--per-class", gen.per_class, "Members per class");
  gen_cmd->add_option("--template-len", gen.tokens.template_len, "Token template length")->capture_default_str();
  gen_cmd->add_option("--K", gen.tokens.vocab, "Vocabulary size")->capture_default_str();
  gen_cmd->add_option("--sub", gen.tokens.substitution_rate, "Substitution rate")->capture_default_str();
  gen_cmd->add_option("--ins", gen.tokens.insertion_rate, "Insertion rate")->capture_default_str();
  gen_cmd->add_option("--del", gen.tokens.deletion_rate, "Deletion rate")->capture_default_str();
  gen_cmd->add_option("--jitter", gen.tokens.tempo_jitter, "Tempo jitter rate")->capture_default_str();
  gen_cmd->add_option("--overlap", gen.tokens.overlap, "Class alphabet overlap fraction")->capture_default_str();
  gen_cmd->add_option("--frames", gen.poses.num_frames, "Frames per pose sequence")->capture_default_str();
  gen_cmd->add_option("--joints", gen.poses.num_joints, "Joints per frame")->capture_default_str();
  gen_cmd->add_option("--fps", gen.poses.fps, "Pose frame rate")->capture_default_str();
  gen_cmd->add_option("--noise", gen.poses.noise, "Pose noise (metres)")->capture_default_str();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train-codebook", "Learn an EMA codebook from pose sequences");
  add_common(train_cmd);
  train_cmd->add_option("--poses", train.poses, "Pose JSON Lines file")->required();
  train_cmd->add_option("-o,--out", train.out, "Codebook JSON output")->required();
  train_cmd->add_option("--K", train.K, "Codebook size")->capture_default_str();
  train_cmd->add_option("--alpha", train.alpha, "EMA decay")->capture_default_str();
  train_cmd->add_option("--epsilon", train.epsilon, "Count floor in c_k = m_k / max(n_k, eps)")->capture_default_str();
  train_cmd->add_option("--epochs", train.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--warmup-epochs", train.warmup_epochs, "Leading epochs without codebook updates")
      ->capture_default_str();
  train_cmd->add_option("--batch-size", train.batch_size, "Sequences per batch")->capture_default_str();
  train_cmd->add_option("--patch-len", train.featurizer.patch_len, "Frames per patch")->capture_default_str();
  train_cmd->add_option("--stride", train.featurizer.stride, "Frames between patch starts")->capture_default_str();
  train_cmd->add_flag("--no-scale-norm", train.no_scale_norm, "Keep absolute joint distances");
  train_cmd->add_flag("--no-revive", train.no_revive, "Disable dead-code revival");
  train_cmd->add_option("--reservoir", train.reservoir, "Revival reservoir: last-batch or epoch")
      ->capture_default_str();

  TokenizeArgs tok;
  auto* tok_cmd = app.add_subcommand("tokenize", "Convert pose sequences to motion words");
  add_common(tok_cmd);
  tok_cmd->add_option("--poses", tok.poses, "Pose JSON Lines file")->required();
  tok_cmd->add_option("--codebook", tok.codebook, "Codebook JSON")->required();
  tok_cmd->add_option("-o,--out", tok.out, "Token JSON Lines output (default stdout)");

  BuildIndexArgs bi;
  EngineFlags bi_flags;
  auto* bi_cmd = app.add_subcommand("build-index", "Build the histogram index from token sequences");
  add_common(bi_cmd);
  bi_cmd->add_option("--tokens", bi.tokens, "Token JSON Lines file")->required();
  bi_cmd->add_option("-o,--out", bi.out, "Index JSON output (default stdout)");
  bi_cmd->add_option("--K", bi.K, "Vocabulary size (default: codebook size or 512)");
  bi_cmd->add_option("--codebook", bi.codebook, "Take the vocabulary size from this codebook");
  bi_cmd->add_option("--config", bi_flags.config_path, "Engine config file (JSON)");
  bi_flags.add_periodicity(bi_cmd);

  QueryArgs qa;
  EngineFlags q_flags;
  auto* q_cmd = app.add_subcommand("query", "Retrieve the top-k sequences for each query");
  add_common(q_cmd);
  q_cmd->add_option("--index", qa.index, "Index JSON")->required();
  q_cmd->add_option("--tokens", qa.tokens, "Query token JSON Lines file");
  q_cmd->add_option("--id", qa.ids, "Use an indexed sequence as the query (repeatable)");
  q_cmd->add_option("-k,--top-k", qa.k, "Results per query")->capture_default_str();
  q_cmd->add_option("--backend", qa.backend, "two-stage or brute-force")->capture_default_str();
  q_cmd->add_flag("--exclude-self", qa.exclude_self, "Skip the index entry with the query's id");
  q_cmd->add_flag("--timing", qa.timing, "Include per-stage timings");
  q_cmd->add_flag("--dtw", qa.dtw, "Report raw DTW distance per result (diagnostic)");
  q_cmd->add_option("-o,--out", qa.out, "Output JSON Lines (default stdout)");
  q_flags.add_all(q_cmd);

  EvalArgs ea;
  EngineFlags e_flags;
  auto* e_cmd = app.add_subcommand("eval", "Leave-one-out / leave-K-out retrieval evaluation");
  add_common(e_cmd);
  e_cmd->add_option("--tokens", ea.tokens, "Labelled token JSON Lines file")->required();
  e_cmd->add_option("--K", ea.K, "Vocabulary size")->capture_default_str();
  e_cmd->add_option("--backend", ea.backend, "two-stage, brute-force or both")->capture_default_str();
  e_cmd->add_option("--leave-k-out", ea.leave_k_out, "1 = leave-one-out; K > 1 = K references per class")
      ->capture_default_str();
  e_cmd->add_option("--top-n", ea.top_n, "Candidates inspected per query")->capture_default_str();
  e_cmd->add_option("--format", ea.format, "table or json")->capture_default_str();
  e_cmd->add_option("--csv", ea.csv, "Per-query CSV output");
  e_cmd->add_option("-o,--out", ea.out, "Report output (default stdout)");
  e_flags.add_all(e_cmd);

  InspectArgs ia;
  auto* i_cmd = app.add_subcommand("inspect", "Print codebook health, index statistics or token records");
  add_common(i_cmd);
  i_cmd->add_option("--codebook", ia.codebook, "Codebook JSON");
  i_cmd->add_option("--poses", ia.poses, "Measure codebook health on these poses");
  i_cmd->add_option("--index", ia.index, "Index JSON");
  i_cmd->add_option("--tokens", ia.tokens, "Token JSON Lines (echoed back after validation)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return kValidationError;
  }

  try {
    if (gen_cmd->parsed()) {
      gen_synth(gen, common, out);
    } else if (train_cmd->parsed()) {
      train_codebook(train, common, out, err);
    } else if (tok_cmd->parsed()) {
      tokenize(tok, common, out);
    } else if (bi_cmd->parsed()) {
      build_index_cmd(bi, bi_flags, out, err, common);
    } else if (q_cmd->parsed()) {
      query_cmd(qa, q_flags, common, out);
    } else if (e_cmd->parsed()) {
      eval_cmd(ea, e_flags, common, out, err);
    } else if (i_cmd->parsed()) {
      inspect(ia, common, out);
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == Errc::io_error ? kIoError : kValidationError;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return kValidationError;
  }
  out.flush();
  return kOk;
}

}  // namespace motiondex::cli
