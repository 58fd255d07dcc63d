#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robust {

enum class Errc {
    InvalidArgument,
    EmptySample,
    HorizonTooLarge,
    ZeroEvidence,
    SingularCovariance,
    DeltaOne,
    WitnessNotFound,
    Unsupported,
    Config,
};

inline std::string_view to_string(Errc code) {
    switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::EmptySample: return "EmptySample";
    case Errc::HorizonTooLarge: return "HorizonTooLarge";
    case Errc::ZeroEvidence: return "ZeroEvidence";
    case Errc::SingularCovariance: return "SingularCovariance";
    case Errc::DeltaOne: return "DeltaOne";
    case Errc::WitnessNotFound: return "WitnessNotFound";
    case Errc::Unsupported: return "Unsupported";
    case Errc::Config: return "Config";
    }
    return "Unknown";
}

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

inline void require(bool cond, Errc code, const std::string& what) {
    if (!cond) throw Error(code, what);
}

} // namespace robust
