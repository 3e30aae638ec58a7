#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "motiondex/codebook.hpp"
#include "motiondex/engine.hpp"
#include "motiondex/eval.hpp"
#include "motiondex/featurize.hpp"
#include "motiondex/index.hpp"

// File formats. Every reader validates its records and reports malformed
// input as Errc::parse_error (with a 1-based line number for JSON Lines);
// unreadable or unwritable paths raise Errc::io_error.
namespace motiondex::io {

inline constexpr int kCodebookVersion = 1;
inline constexpr int kIndexVersion = 1;

// {"id", "label", "fps", "frames": [[[x, y, z] x V] x T]} per line.
std::vector<PoseSequence> read_poses(std::istream& in);
void write_poses(std::ostream& out, const std::vector<PoseSequence>& poses);

// {"id", "label", "words"} per line.
std::vector<TokenSequence> read_tokens(std::istream& in);
void write_tokens(std::ostream& out, const std::vector<TokenSequence>& tokens);

std::string codebook_to_json(const Codebook& cb);
Codebook codebook_from_json(std::string_view text);

std::string index_to_json(const MotionIndex& idx);
MotionIndex index_from_json(std::string_view text);

// Missing sections fall back to defaults. Weights must sum to one unless
// renormalize is set.
EngineConfig engine_config_from_json(std::string_view text, bool renormalize = false);
std::string engine_config_to_json(const EngineConfig& cfg);

std::string retrieval_to_json(const RetrievalResult& result, bool with_timing);
std::string health_to_json(std::size_t epoch, bool warmup, const CodebookHealth& health);
std::string eval_report_to_json(const EvalReport& report);
std::string eval_report_to_table(const EvalReport& report);
std::string eval_queries_to_csv(const EvalReport& report);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace motiondex::io
