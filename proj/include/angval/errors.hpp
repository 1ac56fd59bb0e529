#pragma once

#include <stdexcept>
#include <string>

namespace angval {

// Base class for all library errors. The CLI maps subclasses to exit codes:
// input/parse -> 2, numeric failure -> 3, assumption violation -> 4.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class RankDeficient : public Error {
public:
    using Error::Error;
};

class OracleTooLarge : public Error {
public:
    using Error::Error;
};

class ParamRange : public Error {
public:
    using Error::Error;
};

class EigenFailure : public Error {
public:
    using Error::Error;
};

class ZeroSpectralRadius : public Error {
public:
    using Error::Error;
};

class NotComplexPair : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class EigencondViolated : public Error {
public:
    using Error::Error;
};

class NoNegativeRegion : public Error {
public:
    using Error::Error;
};

class SequenceSingular : public Error {
public:
    SequenceSingular(std::size_t index, const std::string& msg)
        : Error(msg), index(index) {}
    std::size_t index;
};

class SequenceExhausted : public Error {
public:
    using Error::Error;
};

}  // namespace angval
