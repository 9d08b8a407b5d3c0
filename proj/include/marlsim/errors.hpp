#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace marlsim {

// All simulator failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string field, const std::string& what)
        : Error("line " + std::to_string(line) + (field.empty() ? "" : " [" + field + "]") + ": " + what),
          line_(line),
          field_(std::move(field)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class DuplicateTask : public Error {
public:
    using Error::Error;
};

class UnknownTask : public Error {
public:
    using Error::Error;
};

class StalenessViolation : public Error {
public:
    using Error::Error;
};

class VersionGap : public Error {
public:
    using Error::Error;
};

class TimeTravel : public Error {
public:
    using Error::Error;
};

class Deadlock : public Error {
public:
    using Error::Error;
};

class OverlapError : public Error {
public:
    using Error::Error;
};

class TaskTooLarge : public Error {
public:
    using Error::Error;
};

class IncompleteTrace : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace marlsim
