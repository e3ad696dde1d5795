#include "qnet/model.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qnet {

namespace {

using nlohmann::json;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

[[noreturn]] void parse_fail(const std::string &what) {
    throw Error(ErrorKind::parse_error, "model file: " + what);
}

void reject_unknown_fields(const json &object, const std::set<std::string> &allowed,
                           const std::string &where) {
    for (const auto &[key, _] : object.items()) {
        if (!allowed.count(key)) {
            parse_fail("unknown field '" + key + "' in " + where);
        }
    }
}

double number_field(const json &object, const char *key, const std::string &where) {
    auto it = object.find(key);
    if (it == object.end()) {
        parse_fail("missing field '" + std::string(key) + "' in " + where);
    }
    if (!it->is_number()) {
        parse_fail("field '" + std::string(key) + "' in " + where + " is not a number");
    }
    return it->get<double>();
}

std::string name_field(const json &object, const char *key, const std::string &where) {
    auto it = object.find(key);
    if (it == object.end() || !it->is_string()) {
        parse_fail("field '" + std::string(key) + "' in " + where + " must be a string");
    }
    return it->get<std::string>();
}

}  // namespace

std::string config_string(std::uint32_t bits, int nodes) {
    std::string out(static_cast<std::size_t>(nodes), '0');
    for (int i = 0; i < nodes; ++i) {
        if ((bits >> i) & 1u) {
            out[static_cast<std::size_t>(nodes - 1 - i)] = '1';
        }
    }
    return out;
}

std::string Configuration::to_string() const { return config_string(bits, nodes); }

Configuration Configuration::parse(std::string_view text) {
    if (text.empty() || text.size() > static_cast<std::size_t>(kMaxNodes)) {
        throw Error(ErrorKind::parse_error, "configuration must have 1.." +
                                                std::to_string(kMaxNodes) + " bits");
    }
    Configuration c;
    c.nodes = static_cast<int>(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[text.size() - 1 - i];
        if (ch == '1') {
            c.bits |= 1u << i;
        } else if (ch != '0') {
            throw Error(ErrorKind::parse_error,
                        "configuration '" + std::string(text) + "' must contain only 0/1");
        }
    }
    return c;
}

std::vector<NodeState> full_selection(const Configuration &config) {
    std::vector<NodeState> out;
    for (int n = 0; n < config.nodes; ++n) {
        out.push_back({n, config.failed(n)});
    }
    return out;
}

std::vector<NodeState> parse_selection(std::string_view text, int nodes) {
    if (text.size() != static_cast<std::size_t>(nodes)) {
        throw Error(ErrorKind::parse_error, "selection '" + std::string(text) + "' must have " +
                                                std::to_string(nodes) + " positions");
    }
    std::vector<NodeState> out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[text.size() - 1 - i];
        const int node = static_cast<int>(i);
        if (ch == '0' || ch == '1') {
            out.push_back({node, ch == '1'});
        } else if (ch != 'x' && ch != 'X') {
            throw Error(ErrorKind::parse_error,
                        "selection '" + std::string(text) + "' must contain only 0/1/x");
        }
    }
    if (out.empty()) {
        throw Error(ErrorKind::parse_error, "selection selects no node");
    }
    return out;
}

NetworkModel NetworkModel::with_nodes(int k) {
    NetworkModel m;
    for (int i = 0; i < k; ++i) {
        m.names.push_back(std::to_string(i + 1));
    }
    m.p_fail.assign(static_cast<std::size_t>(k), 0.0);
    m.p_recover.assign(static_cast<std::size_t>(k), 0.0);
    m.p_trigger.assign(static_cast<std::size_t>(k),
                       std::vector<double>(static_cast<std::size_t>(k), 0.0));
    return m;
}

std::vector<int> NetworkModel::trigger_sources(int node) const {
    std::vector<int> out;
    for (int m = 0; m < size(); ++m) {
        if (p_trigger[m][node] > 0.0) {
            out.push_back(m);
        }
    }
    return out;
}

std::optional<ValidationIssue> find_violation(const NetworkModel &model) {
    const int k = model.size();
    auto issue = [](ErrorKind kind, std::string field, int index, std::string msg) {
        return ValidationIssue{kind, std::move(field), index, std::move(msg)};
    };
    if (k == 0) {
        return issue(ErrorKind::empty_model, "nodes", -1, "model has no nodes");
    }
    if (k > kMaxNodes) {
        return issue(ErrorKind::out_of_range, "nodes", k,
                     "model has more than " + std::to_string(kMaxNodes) + " nodes");
    }
    if (model.p_recover.size() != model.p_fail.size() ||
        model.p_trigger.size() != model.p_fail.size() ||
        (!model.names.empty() && model.names.size() != model.p_fail.size())) {
        return issue(ErrorKind::dimension_mismatch, "nodes", -1,
                     "per-node vectors have inconsistent lengths");
    }
    for (int n = 0; n < k; ++n) {
        if (!is_probability(model.p_fail[n])) {
            return issue(ErrorKind::probability_out_of_range, "p_fail", n + 1,
                         "p_fail of node " + std::to_string(n + 1) + " outside [0,1]");
        }
        if (!is_probability(model.p_recover[n])) {
            return issue(ErrorKind::probability_out_of_range, "p_recover", n + 1,
                         "p_recover of node " + std::to_string(n + 1) + " outside [0,1]");
        }
    }
    for (int m = 0; m < k; ++m) {
        if (model.p_trigger[m].size() != static_cast<std::size_t>(k)) {
            return issue(ErrorKind::dimension_mismatch, "p_trigger", m + 1,
                         "trigger row has wrong length");
        }
        for (int n = 0; n < k; ++n) {
            const double p = model.p_trigger[m][n];
            if (!is_probability(p)) {
                return issue(ErrorKind::probability_out_of_range, "p_trigger", m + 1,
                             "p_trigger " + std::to_string(m + 1) + "->" +
                                 std::to_string(n + 1) + " outside [0,1]");
            }
            if (m == n && p != 0.0) {
                return issue(ErrorKind::nonzero_self_trigger, "p_trigger", m + 1,
                             "node " + std::to_string(m + 1) + " triggers itself");
            }
        }
    }
    return std::nullopt;
}

void validate(const NetworkModel &model) {
    if (auto v = find_violation(model)) {
        throw Error(v->kind, v->message);
    }
}

void check_node(const NetworkModel &model, int node) {
    if (node < 0 || node >= model.size()) {
        throw Error(ErrorKind::invalid_node_index,
                    "node index " + std::to_string(node + 1) + " not in 1.." +
                        std::to_string(model.size()));
    }
}

NetworkModel load_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        parse_fail(e.what());
    }
    if (!doc.is_object()) {
        parse_fail("top level must be an object");
    }
    reject_unknown_fields(doc, {"nodes", "triggers"}, "model");
    auto nodes = doc.find("nodes");
    if (nodes == doc.end() || !nodes->is_array()) {
        parse_fail("'nodes' must be a list");
    }

    NetworkModel model = NetworkModel::with_nodes(static_cast<int>(nodes->size()));
    std::map<std::string, int> index_of;
    for (std::size_t i = 0; i < nodes->size(); ++i) {
        const json &node = (*nodes)[i];
        const std::string where = "node " + std::to_string(i + 1);
        if (!node.is_object()) {
            parse_fail(where + " must be an object");
        }
        reject_unknown_fields(node, {"name", "p_fail", "p_recover"}, where);
        std::string name = name_field(node, "name", where);
        if (!index_of.emplace(name, static_cast<int>(i)).second) {
            parse_fail("duplicate node name '" + name + "'");
        }
        model.names[i] = std::move(name);
        model.p_fail[i] = number_field(node, "p_fail", where);
        model.p_recover[i] = number_field(node, "p_recover", where);
    }

    if (auto triggers = doc.find("triggers"); triggers != doc.end()) {
        if (!triggers->is_array()) {
            parse_fail("'triggers' must be a list");
        }
        std::set<std::pair<int, int>> seen;
        for (std::size_t i = 0; i < triggers->size(); ++i) {
            const json &edge = (*triggers)[i];
            const std::string where = "trigger " + std::to_string(i + 1);
            if (!edge.is_object()) {
                parse_fail(where + " must be an object");
            }
            reject_unknown_fields(edge, {"from", "to", "p"}, where);
            auto lookup = [&](const char *key) {
                std::string name = name_field(edge, key, where);
                auto it = index_of.find(name);
                if (it == index_of.end()) {
                    parse_fail(where + " references unknown node '" + name + "'");
                }
                return it->second;
            };
            const int from = lookup("from");
            const int to = lookup("to");
            if (!seen.emplace(from, to).second) {
                parse_fail(where + " duplicates an earlier edge");
            }
            model.p_trigger[from][to] = number_field(edge, "p", where);
        }
    }

    validate(model);
    return model;
}

NetworkModel load_model_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::parse_error, "cannot open model file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_model(buffer.str());
}

std::string save_model(const NetworkModel &model) {
    validate(model);
    json nodes = json::array();
    for (int n = 0; n < model.size(); ++n) {
        const std::string name =
            model.names.empty() ? std::to_string(n + 1) : model.names[n];
        nodes.push_back({{"name", name},
                         {"p_fail", model.p_fail[n]},
                         {"p_recover", model.p_recover[n]}});
    }
    json triggers = json::array();
    for (int m = 0; m < model.size(); ++m) {
        for (int n = 0; n < model.size(); ++n) {
            if (model.p_trigger[m][n] != 0.0) {
                triggers.push_back({{"from", model.names.empty() ? std::to_string(m + 1)
                                                                 : model.names[m]},
                                    {"to", model.names.empty() ? std::to_string(n + 1)
                                                               : model.names[n]},
                                    {"p", model.p_trigger[m][n]}});
            }
        }
    }
    json doc = {{"nodes", nodes}, {"triggers", triggers}};
    return doc.dump(2) + "\n";
}

}  // namespace qnet
