#pragma once

#include <stdexcept>
#include <string>

namespace tsnn {

/// Machine-parseable error categories; the CLI maps them to exit codes and a
/// single-line "error:<category>: message" report.
enum class ErrorCategory { usage, config, io, compute };

inline const char* category_name(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::usage: return "usage";
        case ErrorCategory::config: return "config";
        case ErrorCategory::io: return "io";
        case ErrorCategory::compute: return "compute";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}
    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

inline Error io_error(const std::string& msg) { return Error(ErrorCategory::io, msg); }
inline Error config_error(const std::string& msg) { return Error(ErrorCategory::config, msg); }
inline Error compute_error(const std::string& msg) { return Error(ErrorCategory::compute, msg); }
inline Error usage_error(const std::string& msg) { return Error(ErrorCategory::usage, msg); }

}  // namespace tsnn
