#pragma once

#include <stdexcept>
#include <string>

namespace shapemend {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct UnknownLabel : Error {
    explicit UnknownLabel(int label)
        : Error("unknown label " + std::to_string(label)), label(label) {}
    int label;
};
struct OverlapConflict : Error { using Error::Error; };
struct EmptyMask : Error { using Error::Error; };
struct OutOfBounds : Error { using Error::Error; };

struct UnknownOrgan : Error { using Error::Error; };
struct UnknownStep : Error { using Error::Error; };
struct MissingLiver : Error { using Error::Error; };

struct ConfigError : Error { using Error::Error; };

struct IoError : Error { using Error::Error; };
struct CorruptHeader : Error { using Error::Error; };
struct UnsupportedDatatype : Error { using Error::Error; };
struct ScaledLabelData : Error { using Error::Error; };
struct NonIntegerData : Error { using Error::Error; };
struct LabelOverflow : Error { using Error::Error; };

struct DimsTooSmall : Error { using Error::Error; };
struct RecipeInfeasible : Error { using Error::Error; };

} // namespace shapemend
