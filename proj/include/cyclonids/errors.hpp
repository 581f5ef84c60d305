#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cyclonids {

// Base for every error raised by the library. The CLI maps the three
// subclasses onto exit codes 2 (config), 3 (data) and 4 (numeric).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class DataErrorKind {
    file_missing,
    empty_file,
    arity_mismatch,
    unknown_label,
    bad_numeric,
    dimension_mismatch,
    too_few_rows,
    empty_dataset,
    single_class,
    non_finite,
    io_write_failure,
};

class DataError : public Error {
public:
    DataError(DataErrorKind kind, const std::string& message, std::size_t row = 0)
        : Error(message), kind_(kind), row_(row) {}

    DataErrorKind kind() const noexcept { return kind_; }
    // 1-based line number in the source file, 0 when not row-specific.
    std::size_t row() const noexcept { return row_; }

private:
    DataErrorKind kind_;
    std::size_t row_;
};

class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace cyclonids
