#include "swlocal/errors.hpp"

namespace swlocal {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NegativeProbability: return "NegativeProbability";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::ZeroMarginal: return "ZeroMarginal";
    case Errc::BadShape: return "BadShape";
    case Errc::SourceIsConfusable: return "SourceIsConfusable";
    case Errc::RatesOutsideRegion: return "RatesOutsideRegion";
    case Errc::DegenerateLevel: return "DegenerateLevel";
    case Errc::OverflowingLevel: return "OverflowingLevel";
    case Errc::LevelOutOfRange: return "LevelOutOfRange";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::InstanceTooLarge: return "InstanceTooLarge";
    case Errc::RateNotBelowEntropy: return "RateNotBelowEntropy";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::BadContainer: return "BadContainer";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

int exit_code(Errc code) noexcept {
  switch (code) {
    case Errc::InstanceTooLarge: return 3;
    case Errc::Io:
    case Errc::BadContainer: return 4;
    default: return 2;
  }
}

}  // namespace swlocal
