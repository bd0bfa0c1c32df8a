#pragma once

#include <stdexcept>
#include <string>

namespace cfs {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotHermitian : Error {
    using Error::Error;
};
struct SignatureViolation : Error {
    using Error::Error;
};
struct RankViolation : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct SingularGram : Error {
    using Error::Error;
};
struct SingularPoint : Error {
    using Error::Error;
};
struct NotProperlyTimelike : Error {
    using Error::Error;
};
struct WrongSpinDimension : Error {
    using Error::Error;
};
struct EmptyMeasure : Error {
    using Error::Error;
};
struct InfeasibleConstraints : Error {
    using Error::Error;
};
struct BadIndexSet : Error {
    using Error::Error;
};
struct LightconeSingular : Error {
    using Error::Error;
};
struct DegenerateDirection : Error {
    using Error::Error;
};
struct NotTimelike : Error {
    using Error::Error;
};
struct NonInvertibleCoincidence : Error {
    using Error::Error;
};
struct ConfigTooLarge : Error {
    using Error::Error;
};
struct BadTimeRange : Error {
    using Error::Error;
};
struct NotNormalized : Error {
    using Error::Error;
};
struct IndexOutOfRegion : Error {
    using Error::Error;
};
struct InfeasibleInitialData : Error {
    using Error::Error;
};
struct NotConverged : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct IoFailure : Error {
    using Error::Error;
};

} // namespace cfs
