#pragma once

#include <stdexcept>
#include <string>

namespace delreg {

enum class Errc {
    empty_dataset,
    insufficient_rows,
    insufficient_complete_rows,
    empty_pair,
    zero_proportion,
    not_positive_definite,
    singular_design,
    singular_sigma_x,
    singular_covariance,
    invalid_kappa,
    invalid_pattern,
    empty_interval,
    degenerate_ellipse,
    invalid_covariance,
    infeasible_configuration,
    infeasible_covariance,
    parse_error,
    missing_response_column,
    invalid_argument,
};

const char* errc_name(Errc code) noexcept;

/// All library failures throw this; `code()` identifies the condition so
/// callers can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace delreg
