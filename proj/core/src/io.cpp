#include "ldpe/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ldpe {

namespace {

using nlohmann::json;

json finite_or_string(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

}  // namespace

std::string tree_model_to_json(const TreeModel& model) {
    json j;
    j["d"] = model.d;
    j["edges"] = json::array();
    for (const auto& e : model.edges) j["edges"].push_back({e.first, e.second});
    j["marginal_params"] = model.marginal_params;
    j["couplings"] = model.couplings;
    return j.dump(2) + "\n";
}

TreeModel tree_model_from_json(const std::string& text) {
    TreeModel model;
    try {
        const json j = json::parse(text);
        model.d = j.at("d").get<std::size_t>();
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2)
                throw std::invalid_argument("edge entries must be [i, j] pairs");
            model.edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
        }
        model.marginal_params = j.at("marginal_params").get<std::vector<double>>();
        model.couplings = j.at("couplings").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad tree model document: ") + e.what());
    }
    model.validate();
    return model;
}

void save_tree_model(const TreeModel& model, const std::string& path) {
    write_text_file(path, tree_model_to_json(model));
}

TreeModel load_tree_model(const std::string& path) {
    return tree_model_from_json(read_text_file(path));
}

namespace {

void overlay_config(ExperimentConfig& config, const json& j) {
    for (const auto& [key, value] : j.items()) {
        if (key == "task")
            config.task = value.get<std::string>();
        else if (key == "d")
            config.d = value.get<std::uint32_t>();
        else if (key == "k")
            config.k = value.get<std::uint32_t>();
        else if (key == "epsilon")
            config.epsilon = value.get<double>();
        else if (key == "delta")
            config.delta = value.get<double>();
        else if (key == "alpha")
            config.alpha = value.get<double>();
        else if (key == "b")
            config.b = value.get<std::uint32_t>();
        else if (key == "sample_constant")
            config.sample_constant = value.get<double>();
        else if (key == "users")
            config.users = value.get<std::uint64_t>();
        else if (key == "trials")
            config.trials = value.get<std::uint64_t>();
        else if (key == "seed")
            config.seed = value.get<std::uint64_t>();
        else if (key == "threads")
            config.threads = value.get<std::uint32_t>();
        else if (key == "scalar_dist")
            config.scalar_dist = value.get<std::string>();
        else if (key == "d_grid")
            config.d_grid = value.get<std::vector<std::uint32_t>>();
        else if (key == "budget_grid")
            config.budget_grid = value.get<std::vector<std::uint64_t>>();
        else
            throw std::invalid_argument("unknown config key: " + key);
    }
}

}  // namespace

void apply_config_json(ExperimentConfig& config, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad config document: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config document must be a JSON object");
    try {
        overlay_config(config, j);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad config value: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    apply_config_json(base, read_text_file(path));
    return base;
}

std::string report_to_json(const EstimateReport& report) {
    json j;
    j["value"] = finite_or_string(report.value);
    j["users_consumed"] = report.users_consumed;
    j["max_bits_per_user"] = report.max_bits_per_user;
    j["rounds"] = report.rounds;
    j["seed"] = report.seed;
    j["extras"] = json::object();
    for (const auto& [key, value] : report.extras) j["extras"][key] = finite_or_string(value);
    j["series"] = json::object();
    for (const auto& [key, values] : report.series) {
        json arr = json::array();
        for (double v : values) arr.push_back(finite_or_string(v));
        j["series"][key] = std::move(arr);
    }
    return j.dump(2) + "\n";
}

std::string audit_to_json(const PoolAudit& audit) {
    json j;
    j["users_total"] = audit.users_total;
    j["users_consumed"] = audit.users_consumed;
    j["total_bits"] = audit.total_bits;
    j["max_bits_per_user"] = audit.max_bits_per_user;
    j["rounds"] = audit.rounds;
    j["batches"] = audit.batches;
    return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace ldpe
