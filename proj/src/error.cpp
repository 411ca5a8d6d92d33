#include "eyewit/error.hpp"

namespace eyewit {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::cutoff_overflow: return "cutoff_overflow";
    case ErrorCode::invalid_index: return "invalid_index";
    case ErrorCode::truncation_failure: return "truncation_failure";
    case ErrorCode::negative_probability: return "negative_probability";
    case ErrorCode::zero_click_probability: return "zero_click_probability";
    case ErrorCode::cutoff_insufficient: return "cutoff_insufficient";
    case ErrorCode::undefined_ratio: return "undefined_ratio";
    case ErrorCode::singular_denominator: return "singular_denominator";
    case ErrorCode::domain_error: return "domain_error";
    case ErrorCode::degenerate_cell: return "degenerate_cell";
    case ErrorCode::negative_radicand: return "negative_radicand";
    case ErrorCode::window_overflow: return "window_overflow";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::non_convergence: return "non_convergence";
    case ErrorCode::budget_exhausted: return "budget_exhausted";
    case ErrorCode::infeasible_region: return "infeasible_region";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::validation_error: return "validation_error";
    }
    return "unknown";
}

}  // namespace eyewit
