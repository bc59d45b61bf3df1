#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace klein {

enum class ErrorKind {
    EllipticInput,
    IdentityInput,
    NotLoxodromic,
    TrivialWord,
    ParseError,
    UncertifiedPair,
    UnsupportedTwistCurve,
    NonLoxodromicBendingAxis,
    ExhaustedReplacements,
    TraceMismatch,
    InvalidInput,
    EllipticImage,
    ZeroCoefficient,
    LengthMismatch,
    Unclassifiable,
    SpectraDisagree,
    BudgetExhausted,
    NumericallyAmbiguous,
    NoLoxodromicCurve,
    InsufficientData,
    TruncationUnsafe,
    ParabolicClassInRange,
};

constexpr std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::EllipticInput: return "EllipticInput";
    case ErrorKind::IdentityInput: return "IdentityInput";
    case ErrorKind::NotLoxodromic: return "NotLoxodromic";
    case ErrorKind::TrivialWord: return "TrivialWord";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UncertifiedPair: return "UncertifiedPair";
    case ErrorKind::UnsupportedTwistCurve: return "UnsupportedTwistCurve";
    case ErrorKind::NonLoxodromicBendingAxis: return "NonLoxodromicBendingAxis";
    case ErrorKind::ExhaustedReplacements: return "ExhaustedReplacements";
    case ErrorKind::TraceMismatch: return "TraceMismatch";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::EllipticImage: return "EllipticImage";
    case ErrorKind::ZeroCoefficient: return "ZeroCoefficient";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::Unclassifiable: return "Unclassifiable";
    case ErrorKind::SpectraDisagree: return "SpectraDisagree";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::NumericallyAmbiguous: return "NumericallyAmbiguous";
    case ErrorKind::NoLoxodromicCurve: return "NoLoxodromicCurve";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::TruncationUnsafe: return "TruncationUnsafe";
    case ErrorKind::ParabolicClassInRange: return "ParabolicClassInRange";
    }
    return "Unknown";
}

// Single exception type for the library; `kind` is the machine-readable
// discriminator and `detail` names the offending object (a generator, a
// curve word, a matrix entry).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string detail = {})
        : std::runtime_error(std::string(to_string(kind)) + (detail.empty() ? "" : ": " + detail)),
          kind_(kind), detail_(std::move(detail))
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

} // namespace klein
