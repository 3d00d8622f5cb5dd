// error.hpp -- exception types thrown across the hpnn library.

#pragma once

#include <stdexcept>
#include <string>

namespace hpnn {

// Base class for everything the library throws on bad input or bad data.
// The CLI maps these to exit code 2; anything else is a usage bug.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Receptive-field geometry does not tile the input exactly (no padding is
// ever applied), or a layer chain fails to validate.
class GeometryMismatch : public Error {
public:
    using Error::Error;
};

// Tensor/vector arguments whose shapes do not agree.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class TargetOutOfRange : public Error {
public:
    using Error::Error;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

class LabelOutOfRange : public Error {
public:
    using Error::Error;
};

// gradient_check guard: the sweep is quadratic-ish, refuse huge nets.
class TooManyParameters : public Error {
public:
    using Error::Error;
};

// Dataset index CSV problems.
class ParseError : public Error {
public:
    using Error::Error;
};

class UnknownLabel : public Error {
public:
    using Error::Error;
};

class DuplicatePath : public Error {
public:
    using Error::Error;
};

// PGM decoding problems.
class BadMagic : public Error {
public:
    using Error::Error;
};

class UnsupportedMaxval : public Error {
public:
    using Error::Error;
};

class TruncatedPayload : public Error {
public:
    using Error::Error;
};

class EvenFilterSize : public Error {
public:
    using Error::Error;
};

class TooFewSubjects : public Error {
public:
    using Error::Error;
};

class WrongFoldCount : public Error {
public:
    using Error::Error;
};

// Model file container problems.
class BadModelFile : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace hpnn
