#include "equispec/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>

namespace equispec {

using nlohmann::json;

const char* experiment_kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::spectrum: return "spectrum";
        case ExperimentKind::classify: return "classify";
        case ExperimentKind::derivative: return "derivative";
        case ExperimentKind::split: return "split";
        case ExperimentKind::sweep: return "sweep";
        case ExperimentKind::oracle_check: return "oracle-check";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "spectrum") return ExperimentKind::spectrum;
    if (s == "classify") return ExperimentKind::classify;
    if (s == "derivative") return ExperimentKind::derivative;
    if (s == "split") return ExperimentKind::split;
    if (s == "sweep") return ExperimentKind::sweep;
    if (s == "oracle-check") return ExperimentKind::oracle_check;
    fail(ErrorCategory::config_invalid, "unknown experiment kind '" + s + "'");
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
    if (!j.is_object()) fail(ErrorCategory::config_invalid, where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            fail(ErrorCategory::config_invalid, "unknown key '" + it.key() + "' in " + where);
}

double need_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key))
        fail(ErrorCategory::config_invalid, "missing '" + key + "' in " + where);
    if (!j[key].is_number())
        fail(ErrorCategory::config_invalid, "'" + key + "' in " + where + " must be a number");
    return j[key].get<double>();
}

std::vector<FourierMode> parse_modes(const json& j, const std::string& where) {
    if (!j.is_array()) fail(ErrorCategory::config_invalid, where + " must be an array");
    std::vector<FourierMode> modes;
    for (const json& e : j) {
        reject_unknown(e, {"k", "a", "b"}, where + " entry");
        FourierMode m;
        double kf = need_number(e, "k", where);
        m.k = static_cast<int>(kf);
        if (m.k != kf || m.k < 0)
            fail(ErrorCategory::config_invalid, "mode k must be a nonnegative integer");
        m.a = e.contains("a") ? need_number(e, "a", where) : 0.0;
        m.b = e.contains("b") ? need_number(e, "b", where) : 0.0;
        modes.push_back(m);
    }
    return modes;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCategory::config_invalid, std::string("config is not valid JSON: ") + e.what());
    }

    reject_unknown(j, {"group", "domain", "mesh", "solver", "experiment", "seed", "output_dir"},
                   "config");
    ExperimentConfig c;

    if (!j.contains("group")) fail(ErrorCategory::config_invalid, "missing 'group'");
    reject_unknown(j["group"], {"kind", "p"}, "group");
    if (!j["group"].contains("kind") || !j["group"]["kind"].is_string())
        fail(ErrorCategory::config_invalid, "group.kind must be a string");
    c.group_kind = group_kind_from_string(j["group"]["kind"].get<std::string>());
    if (c.group_kind != GroupKind::klein) {
        double p = need_number(j["group"], "p", "group");
        c.group_p = static_cast<int>(p);
        if (c.group_p != p || c.group_p < 2)
            fail(ErrorCategory::config_invalid, "group.p must be an integer >= 2");
    } else {
        c.group_p = 2;
    }

    if (!j.contains("domain")) fail(ErrorCategory::config_invalid, "missing 'domain'");
    reject_unknown(j["domain"], {"r0", "modes"}, "domain");
    c.r0 = need_number(j["domain"], "r0", "domain");
    if (j["domain"].contains("modes")) c.domain_modes = parse_modes(j["domain"]["modes"], "domain.modes");

    if (!j.contains("mesh")) fail(ErrorCategory::config_invalid, "missing 'mesh'");
    reject_unknown(j["mesh"], {"h_target"}, "mesh");
    c.h_target = need_number(j["mesh"], "h_target", "mesh");

    if (j.contains("solver")) {
        reject_unknown(j["solver"], {"num_eigs", "cluster_tol"}, "solver");
        if (j["solver"].contains("num_eigs")) {
            double n = need_number(j["solver"], "num_eigs", "solver");
            c.num_eigs = static_cast<int>(n);
            if (c.num_eigs != n || c.num_eigs < 1)
                fail(ErrorCategory::config_invalid, "solver.num_eigs must be a positive integer");
        }
        if (j["solver"].contains("cluster_tol"))
            c.cluster_tol = need_number(j["solver"], "cluster_tol", "solver");
    }

    if (!j.contains("experiment")) fail(ErrorCategory::config_invalid, "missing 'experiment'");
    const json& ex = j["experiment"];
    if (!ex.is_object() || !ex.contains("kind") || !ex["kind"].is_string())
        fail(ErrorCategory::config_invalid, "experiment.kind must be a string");
    c.kind = experiment_kind_from_string(ex["kind"].get<std::string>());
    switch (c.kind) {
        case ExperimentKind::spectrum:
        case ExperimentKind::classify:
            reject_unknown(ex, {"kind"}, "experiment");
            break;
        case ExperimentKind::derivative: {
            reject_unknown(ex, {"kind", "field", "cluster_index", "second_order", "fd_t", "fd_t2"},
                           "experiment");
            if (!ex.contains("field"))
                fail(ErrorCategory::config_invalid, "derivative experiment needs 'field'");
            reject_unknown(ex["field"], {"modes"}, "experiment.field");
            c.derivative.field_modes = parse_modes(ex["field"]["modes"], "experiment.field.modes");
            if (ex.contains("cluster_index"))
                c.derivative.cluster_index =
                    static_cast<int>(need_number(ex, "cluster_index", "experiment"));
            if (ex.contains("second_order")) {
                if (!ex["second_order"].is_boolean())
                    fail(ErrorCategory::config_invalid, "second_order must be a boolean");
                c.derivative.second_order = ex["second_order"].get<bool>();
            }
            if (ex.contains("fd_t")) c.derivative.fd_t = need_number(ex, "fd_t", "experiment");
            if (ex.contains("fd_t2")) c.derivative.fd_t2 = need_number(ex, "fd_t2", "experiment");
            break;
        }
        case ExperimentKind::split: {
            reject_unknown(ex, {"kind", "cluster_index", "k_max", "t"}, "experiment");
            if (ex.contains("cluster_index"))
                c.split.cluster_index =
                    static_cast<int>(need_number(ex, "cluster_index", "experiment"));
            if (ex.contains("k_max"))
                c.split.k_max = static_cast<int>(need_number(ex, "k_max", "experiment"));
            if (ex.contains("t")) c.split.t = need_number(ex, "t", "experiment");
            break;
        }
        case ExperimentKind::sweep: {
            reject_unknown(ex, {"kind", "cutoff", "trials", "amplitude", "k_max"}, "experiment");
            if (ex.contains("cutoff")) c.sweep.cutoff = need_number(ex, "cutoff", "experiment");
            if (ex.contains("trials"))
                c.sweep.trials = static_cast<int>(need_number(ex, "trials", "experiment"));
            if (ex.contains("amplitude"))
                c.sweep.amplitude = need_number(ex, "amplitude", "experiment");
            if (ex.contains("k_max"))
                c.sweep.k_max = static_cast<int>(need_number(ex, "k_max", "experiment"));
            break;
        }
        case ExperimentKind::oracle_check: {
            reject_unknown(ex, {"kind", "shape", "radius", "lx", "ly", "count", "compare_fem"},
                           "experiment");
            if (ex.contains("shape")) {
                if (!ex["shape"].is_string())
                    fail(ErrorCategory::config_invalid, "shape must be a string");
                c.oracle.shape = ex["shape"].get<std::string>();
                if (c.oracle.shape != "disk" && c.oracle.shape != "rectangle")
                    fail(ErrorCategory::config_invalid, "shape must be 'disk' or 'rectangle'");
            }
            if (ex.contains("radius")) c.oracle.radius = need_number(ex, "radius", "experiment");
            if (ex.contains("lx")) c.oracle.lx = need_number(ex, "lx", "experiment");
            if (ex.contains("ly")) c.oracle.ly = need_number(ex, "ly", "experiment");
            if (ex.contains("count"))
                c.oracle.count = static_cast<int>(need_number(ex, "count", "experiment"));
            if (ex.contains("compare_fem")) {
                if (!ex["compare_fem"].is_boolean())
                    fail(ErrorCategory::config_invalid, "compare_fem must be a boolean");
                c.oracle.compare_fem = ex["compare_fem"].get<bool>();
            }
            break;
        }
    }

    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            fail(ErrorCategory::config_invalid, "seed must be an integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string())
            fail(ErrorCategory::config_invalid, "output_dir must be a string");
        c.output_dir = j["output_dir"].get<std::string>();
    }
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(ErrorCategory::config_invalid, "cannot read config file " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

} // namespace equispec
