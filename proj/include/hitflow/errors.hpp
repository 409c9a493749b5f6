#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hitflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotLoxodromic : Error {
    using Error::Error;
};
struct BadDeterminant : Error {
    using Error::Error;
};
struct UnknownType : Error {
    using Error::Error;
};
struct NotHyperbolic : Error {
    using Error::Error;
};
struct SharedEndpoint : Error {
    using Error::Error;
};
struct ShootingFailed : Error {
    using Error::Error;
};
struct NotHyperbolicSignature : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct HomNotWellDefined : Error {
    using Error::Error;
};
struct UnsupportedCurve : Error {
    using Error::Error;
};
struct RelatorBroken : Error {
    using Error::Error;
};
struct WordNotInSubgroup : Error {
    using Error::Error;
};
struct SharedAxis : Error {
    using Error::Error;
};
struct Unstable : Error {
    using Error::Error;
};
struct ConfigInvalid : Error {
    explicit ConfigInvalid(const std::string& msg, std::vector<std::string> diags = {})
        : Error(msg), diagnostics(std::move(diags)) {}
    std::vector<std::string> diagnostics;
};

}  // namespace hitflow
