#pragma once

#include <stdexcept>
#include <string>

namespace textfeat {

// Broad failure classes. The CLI maps each class to an exit code.
enum class ErrorClass {
    User,       // bad flags, config, or settings
    Data,       // input data violates a schema or contract
    Backend,    // LLM backend or transport failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorClass::User, what) {}
};

struct SettingsError : Error {
    explicit SettingsError(const std::string& what) : Error(ErrorClass::User, what) {}
};

struct ParseError : Error {
    ParseError(const std::string& what, std::size_t location)
        : Error(ErrorClass::Data, what), location_(location) {}
    // Row number for CSV input, byte offset for JSON input.
    std::size_t location() const noexcept { return location_; }

private:
    std::size_t location_;
};

struct SchemaError : Error {
    explicit SchemaError(const std::string& what) : Error(ErrorClass::Data, what) {}
};

struct EncodingError : Error {
    explicit EncodingError(const std::string& what) : Error(ErrorClass::Data, what) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorClass::Data, what) {}
};

struct TemplateError : Error {
    explicit TemplateError(const std::string& what) : Error(ErrorClass::User, what) {}
};

struct StatsError : Error {
    explicit StatsError(const std::string& what) : Error(ErrorClass::Data, what) {}
};

struct AlignmentError : Error {
    explicit AlignmentError(const std::string& what) : Error(ErrorClass::Data, what) {}
};

struct BackendError : Error {
    explicit BackendError(const std::string& what) : Error(ErrorClass::Backend, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorClass::User, what) {}
};

}  // namespace textfeat
