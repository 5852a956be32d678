#ifndef NLPCA_ERROR_HPP
#define NLPCA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nlpca {

// Error categories thrown by the library. All derive from Error so callers
// can catch everything with one handler while tests discriminate.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidDataError : Error {
    using Error::Error;
};

struct InsufficientRowsError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct UnknownLevelError : Error {
    using Error::Error;
};

struct UnsupportedSchemaError : Error {
    using Error::Error;
};

struct LoadError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace nlpca

#endif
