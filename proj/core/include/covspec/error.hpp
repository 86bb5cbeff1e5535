#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace covspec {

/// Failure categories raised by the library. The CLI maps these onto exit
/// codes (see `exit_code_for`).
enum class Errc {
  // probcore
  kInvalidLogits,
  kInvalidDistribution,
  kTooFewTokens,
  kDegenerateDraftProb,
  kEmptyResidual,
  // models
  kInvalidPrefix,
  kInvalidPlant,
  kInvalidVisual,
  // tokensel
  kZeroNormEmbedding,
  kNoKeywords,
  kInvalidK,
  kInvalidM,
  kInvalidRank,
  kInvalidSelection,
  // comm
  kInvalidVocabulary,
  kInvalidChannel,
  kInvalidValue,
  kFrameError,
  kUnknownMessage,
  // transport
  kTransportTimeout,
  kSessionClosed,
  kConfigMismatch,
  kTransportError,
  // engine
  kContextDesync,
  kPreconditionViolation,
  kProtocolFault,
  // harness / cli
  kTooLarge,
  kDegenerateBaseline,
  kConfigError,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace covspec
