#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qnet/error.hpp"

namespace qnet {

/// Upper bound on the number of nodes; configurations are packed in 32 bits.
inline constexpr int kMaxNodes = 30;

/// Joint node state at one time step. Node i (0-based) occupies bit i, so
/// node 1 in 1-based numbering is the least significant bit.
struct Configuration {
    std::uint32_t bits = 0;
    int nodes = 0;

    bool failed(int node) const { return ((bits >> node) & 1u) != 0; }

    /// Most-significant node first: "10" means node 2 failed, node 1 good.
    std::string to_string() const;
    static Configuration parse(std::string_view text);

    bool operator==(const Configuration &) const = default;
};

std::string config_string(std::uint32_t bits, int nodes);

/// One (node, state) requirement; a list of these selects a marginal event.
struct NodeState {
    int node = 0;
    bool failed = false;

    bool operator==(const NodeState &) const = default;
};

/// Requirements for every node of a full configuration.
std::vector<NodeState> full_selection(const Configuration &config);

/// Parses "01", "x1" etc. (most-significant node first, 'x' = any state).
/// The text must have exactly `nodes` positions.
std::vector<NodeState> parse_selection(std::string_view text, int nodes);

/// Network of k nodes with intrinsic failure, recovery and pairwise trigger
/// probabilities. Indices are 0-based in the library; files and printed
/// output number nodes from 1.
struct NetworkModel {
    std::vector<std::string> names;
    std::vector<double> p_fail;
    std::vector<double> p_recover;
    /// p_trigger[m][n]: failed node m triggers good node n in the next step.
    std::vector<std::vector<double>> p_trigger;

    /// k nodes named "1".."k" with all probabilities zero.
    static NetworkModel with_nodes(int k);

    int size() const { return static_cast<int>(p_fail.size()); }

    /// Nodes m with p_trigger[m][node] > 0, ascending.
    std::vector<int> trigger_sources(int node) const;

    bool operator==(const NetworkModel &) const = default;
};

struct ValidationIssue {
    ErrorKind kind;
    std::string field;
    int index = -1;
    std::string message;
};

/// First violated invariant, if any.
std::optional<ValidationIssue> find_violation(const NetworkModel &model);

/// Throws qnet::Error carrying the violation kind.
void validate(const NetworkModel &model);

/// Parses the JSON model format (nodes + optional triggers) and validates it.
NetworkModel load_model(std::string_view text);
NetworkModel load_model_file(const std::filesystem::path &path);
std::string save_model(const NetworkModel &model);

/// Throws invalid_node_index unless 0 <= node < model.size().
void check_node(const NetworkModel &model, int node);

}  // namespace qnet
