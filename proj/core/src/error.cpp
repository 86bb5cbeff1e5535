#include "covspec/error.hpp"

namespace covspec {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kInvalidLogits: return "InvalidLogits";
    case Errc::kInvalidDistribution: return "InvalidDistribution";
    case Errc::kTooFewTokens: return "TooFewTokens";
    case Errc::kDegenerateDraftProb: return "DegenerateDraftProb";
    case Errc::kEmptyResidual: return "EmptyResidual";
    case Errc::kInvalidPrefix: return "InvalidPrefix";
    case Errc::kInvalidPlant: return "InvalidPlant";
    case Errc::kInvalidVisual: return "InvalidVisual";
    case Errc::kZeroNormEmbedding: return "ZeroNormEmbedding";
    case Errc::kNoKeywords: return "NoKeywords";
    case Errc::kInvalidK: return "InvalidK";
    case Errc::kInvalidM: return "InvalidM";
    case Errc::kInvalidRank: return "InvalidRank";
    case Errc::kInvalidSelection: return "InvalidSelection";
    case Errc::kInvalidVocabulary: return "InvalidVocabulary";
    case Errc::kInvalidChannel: return "InvalidChannel";
    case Errc::kInvalidValue: return "InvalidValue";
    case Errc::kFrameError: return "FrameError";
    case Errc::kUnknownMessage: return "UnknownMessage";
    case Errc::kTransportTimeout: return "TransportTimeout";
    case Errc::kSessionClosed: return "SessionClosed";
    case Errc::kConfigMismatch: return "ConfigMismatch";
    case Errc::kTransportError: return "TransportError";
    case Errc::kContextDesync: return "ContextDesync";
    case Errc::kPreconditionViolation: return "PreconditionViolation";
    case Errc::kProtocolFault: return "ProtocolFault";
    case Errc::kTooLarge: return "TooLarge";
    case Errc::kDegenerateBaseline: return "DegenerateBaseline";
    case Errc::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace covspec
