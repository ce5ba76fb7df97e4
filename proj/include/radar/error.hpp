#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radar {

/// Base of every error raised by the pipeline.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedDiff : public Error {
public:
    MalformedDiff(std::size_t line_no, const std::string& reason)
        : Error("malformed diff at line " + std::to_string(line_no) + ": " + reason),
          line_no_(line_no), reason_(reason) {}

    std::size_t line_no() const noexcept { return line_no_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_no_;
    std::string reason_;
};

class SchemaError : public Error {
public:
    SchemaError(std::size_t line_no, const std::string& field, const std::string& reason)
        : Error("schema error at line " + std::to_string(line_no) + ", field '" + field + "': " + reason),
          line_no_(line_no), field_(field) {}

    std::size_t line_no() const noexcept { return line_no_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_no_;
    std::string field_;
};

#define RADAR_DEFINE_ERROR(Name)      \
    class Name : public Error {       \
    public:                           \
        using Error::Error;           \
    }

RADAR_DEFINE_ERROR(DuplicatePatchId);
RADAR_DEFINE_ERROR(UnknownFile);
RADAR_DEFINE_ERROR(DimensionMismatch);
RADAR_DEFINE_ERROR(MissingVector);
RADAR_DEFINE_ERROR(DegenerateLabels);
RADAR_DEFINE_ERROR(UnsupportedFamily);
RADAR_DEFINE_ERROR(SchemaMismatch);
RADAR_DEFINE_ERROR(TooFewRows);
RADAR_DEFINE_ERROR(TooFewPeriods);
RADAR_DEFINE_ERROR(SingleClass);
RADAR_DEFINE_ERROR(MisalignedRuns);
RADAR_DEFINE_ERROR(MissingScore);
RADAR_DEFINE_ERROR(IneligiblePatch);
RADAR_DEFINE_ERROR(InvalidArgument);
RADAR_DEFINE_ERROR(IoError);

#undef RADAR_DEFINE_ERROR

} // namespace radar
