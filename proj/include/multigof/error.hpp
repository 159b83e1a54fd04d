#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mgof {

/// Whether an error came from bad inputs or from a failure at runtime.
/// The CLI maps validation errors to exit status 2 and runtime errors to 1.
enum class ErrorCategory { validation, runtime };

/// Exception carrying a machine-readable code alongside the message.
///
/// Codes in use: invalid_dimension, domain, dimension_mismatch,
/// insufficient_sample, insufficient_replicates, zero_null_entry,
/// zero_variance, dense_path_cap, parse, validation, io.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message,
          ErrorCategory category = ErrorCategory::validation)
        : std::runtime_error(message), code_(std::move(code)), category_(category) {}

    const std::string& code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_; }

private:
    std::string code_;
    ErrorCategory category_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
    throw Error(std::move(code), message);
}

}  // namespace mgof
