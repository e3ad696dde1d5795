#include "qnet/error.hpp"

namespace qnet {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::probability_out_of_range:
            return "probability-out-of-range";
        case ErrorKind::nonzero_self_trigger:
            return "nonzero-self-trigger";
        case ErrorKind::empty_model:
            return "empty-model";
        case ErrorKind::parse_error:
            return "parse-error";
        case ErrorKind::invalid_node_index:
            return "invalid-node-index";
        case ErrorKind::out_of_range:
            return "out-of-range";
        case ErrorKind::invalid_argument:
            return "invalid-argument";
        case ErrorKind::dimension_mismatch:
            return "dimension-mismatch";
        case ErrorKind::resource_limit:
            return "resource-limit";
        case ErrorKind::degenerate_subspace:
            return "degenerate-subspace";
        case ErrorKind::fit_diverged:
            return "fit-diverged";
        case ErrorKind::f_degenerate:
            return "f-degenerate";
        case ErrorKind::a_nonpositive:
            return "a-nonpositive";
        case ErrorKind::missing_series:
            return "missing-series";
    }
    return "unknown";
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::resource_limit:
            return 2;
        case ErrorKind::fit_diverged:
            return 3;
        default:
            return 1;
    }
}

}  // namespace qnet
