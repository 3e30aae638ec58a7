#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace motiondex {

// Error categories surfaced by the library. The CLI maps io_error to exit
// code 2 and everything else to exit code 1.
enum class Errc {
  invalid_input,
  sequence_too_short,
  degenerate_pose,
  insufficient_data,
  revival_starved,
  config_mismatch,
  empty_sequence,
  vocabulary_overflow,
  undefined_variance,
  duplicate_id,
  empty_protocol,
  parse_error,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

}  // namespace motiondex
