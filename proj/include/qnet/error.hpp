#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnet {

enum class ErrorKind {
    probability_out_of_range,
    nonzero_self_trigger,
    empty_model,
    parse_error,
    invalid_node_index,
    out_of_range,
    invalid_argument,
    dimension_mismatch,
    resource_limit,
    degenerate_subspace,
    fit_diverged,
    f_degenerate,
    a_nonpositive,
    missing_series,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it to an exit code.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

/// 0 success, 1 validation, 2 resource-limit, 3 fit-diverged.
int exit_code_for(ErrorKind kind);

}  // namespace qnet
