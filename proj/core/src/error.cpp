#include "motiondex/error.hpp"

namespace motiondex {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_input: return "invalid-input";
    case Errc::sequence_too_short: return "sequence-too-short";
    case Errc::degenerate_pose: return "degenerate-pose";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::revival_starved: return "revival-starved";
    case Errc::config_mismatch: return "config-mismatch";
    case Errc::empty_sequence: return "empty-sequence";
    case Errc::vocabulary_overflow: return "vocabulary-overflow";
    case Errc::undefined_variance: return "undefined-variance";
    case Errc::duplicate_id: return "duplicate-id";
    case Errc::empty_protocol: return "empty-protocol";
    case Errc::parse_error: return "parse-error";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

void raise(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace motiondex
