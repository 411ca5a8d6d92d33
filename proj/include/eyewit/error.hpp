#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eyewit {

enum class ErrorCode {
    invalid_argument,
    cutoff_overflow,
    invalid_index,
    truncation_failure,
    negative_probability,
    zero_click_probability,
    cutoff_insufficient,
    undefined_ratio,
    singular_denominator,
    domain_error,
    degenerate_cell,
    negative_radicand,
    window_overflow,
    infeasible,
    non_convergence,
    budget_exhausted,
    infeasible_region,
    parse_error,
    validation_error,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// True for failures caused by hitting a configured resource ceiling.
    bool is_resource_exhaustion() const noexcept {
        return code_ == ErrorCode::window_overflow || code_ == ErrorCode::truncation_failure ||
               code_ == ErrorCode::non_convergence || code_ == ErrorCode::budget_exhausted;
    }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string &what) {
    if (!cond) fail(code, what);
}

}  // namespace eyewit
