#include "ppacdc/config.hpp"

#include <fstream>

namespace ppacdc {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
    }
}

GraphSpec parse_graph(const json& g) {
    check_keys(g, "graph", {"type", "n", "extra_edge_prob", "seed", "path"});
    GraphSpec spec;
    const std::string type = get_or<std::string>(g, "type", "ring");
    if (type == "ring")
        spec.type = GraphSpec::Type::ring;
    else if (type == "random")
        spec.type = GraphSpec::Type::random;
    else if (type == "file")
        spec.type = GraphSpec::Type::file;
    else
        throw ConfigError("graph.type must be ring, random or file");
    spec.n = get_or<int>(g, "n", 5);
    spec.extra_edge_prob = get_or<double>(g, "extra_edge_prob", 0.0);
    spec.seed = get_or<std::uint64_t>(g, "seed", 0);
    spec.path = get_or<std::string>(g, "path", "");
    if (spec.type == GraphSpec::Type::file && spec.path.empty())
        throw ConfigError("graph.type \"file\" needs graph.path");
    return spec;
}

X0Spec parse_x0(const json& x) {
    check_keys(x, "x0", {"uniform", "values"});
    X0Spec spec;
    if (x.contains("values")) {
        spec.values = x.at("values").get<std::vector<double>>();
        if (x.contains("uniform"))
            throw ConfigError("x0: give either values or uniform, not both");
        return spec;
    }
    if (x.contains("uniform")) {
        const auto iv = x.at("uniform").get<std::vector<double>>();
        if (iv.size() != 2) throw ConfigError("x0.uniform must be [lo, hi]");
        spec.uniform_lo = iv[0];
        spec.uniform_hi = iv[1];
    }
    return spec;
}

ProtocolParams parse_protocol(const json& p) {
    check_keys(p, "protocol",
               {"gamma", "alpha", "d_bar", "bits", "delta0", "sigma0", "zoom_in_rule"});
    ProtocolParams params;
    params.gamma = get_or<double>(p, "gamma", params.gamma);
    params.alpha = get_or<double>(p, "alpha", params.alpha);
    params.d_bar = get_or<int>(p, "d_bar", params.d_bar);
    params.bits = get_or<int>(p, "bits", params.bits);
    params.delta0 = get_or<double>(p, "delta0", params.delta0);
    params.sigma0 = get_or<double>(p, "sigma0", params.sigma0);
    const std::string rule = get_or<std::string>(p, "zoom_in_rule", "centered");
    if (rule == "centered")
        params.zoom_in_rule = ZoomInRule::centered;
    else if (rule == "literal")
        params.zoom_in_rule = ZoomInRule::literal;
    else
        throw ConfigError("protocol.zoom_in_rule must be centered or literal");
    return params;
}

SweepOptions parse_sweep(const json& s) {
    check_keys(s, "sweep",
               {"alphas", "bits", "n_seeds", "resample_topology", "resample_edge_prob"});
    SweepOptions opts;
    opts.alphas = get_or<std::vector<double>>(s, "alphas", {});
    opts.bits = get_or<std::vector<int>>(s, "bits", {});
    opts.n_seeds = get_or<int>(s, "n_seeds", 1);
    opts.resample_topology = get_or<bool>(s, "resample_topology", false);
    opts.resample_edge_prob = get_or<double>(s, "resample_edge_prob", 0.25);
    return opts;
}

OutputSpec parse_output(const json& o) {
    check_keys(o, "output", {"trace_csv", "summary_json", "sweep_csv"});
    OutputSpec spec;
    spec.trace_csv = get_or<std::string>(o, "trace_csv", "");
    spec.summary_json = get_or<std::string>(o, "summary_json", "");
    spec.sweep_csv = get_or<std::string>(o, "sweep_csv", "");
    return spec;
}

}  // namespace

Digraph GraphSpec::build() const {
    switch (type) {
        case Type::ring: return Digraph::ring(n);
        case Type::random: return random_strongly_connected(n, extra_edge_prob, seed);
        case Type::file: return load_edge_list_file(path);
    }
    throw ConfigError("unreachable graph type");
}

SimConfig Experiment::to_sim_config() const {
    SimConfig cfg{graph.build()};
    cfg.x0 = x0;
    cfg.protocol = protocol;
    cfg.max_iters = max_iters;
    cfg.conv_tolerance = conv_tolerance;
    cfg.seed = seed;
    cfg.exact_mode = exact_mode;
    cfg.record_trace = record_trace;
    return cfg;
}

Experiment parse_experiment(const json& doc) {
    if (!doc.is_object()) throw ConfigError("experiment file must be a JSON object");
    check_keys(doc, "experiment",
               {"mode", "comment", "graph", "x0", "protocol", "max_iters", "conv_tolerance",
                "seed", "exact_mode", "record_trace", "bits_list", "sweep", "output"});
    Experiment ex;
    ex.mode = get_or<std::string>(doc, "mode", "run");
    if (ex.mode != "run" && ex.mode != "sweep")
        throw ConfigError("mode must be \"run\" or \"sweep\"");
    ex.comment = get_or<std::string>(doc, "comment", "");
    if (doc.contains("graph")) ex.graph = parse_graph(doc.at("graph"));
    if (doc.contains("x0")) ex.x0 = parse_x0(doc.at("x0"));
    if (doc.contains("protocol")) ex.protocol = parse_protocol(doc.at("protocol"));
    ex.max_iters = get_or<int>(doc, "max_iters", ex.max_iters);
    ex.conv_tolerance = get_or<double>(doc, "conv_tolerance", ex.conv_tolerance);
    ex.seed = get_or<std::uint64_t>(doc, "seed", 0);
    ex.exact_mode = get_or<bool>(doc, "exact_mode", false);
    ex.record_trace = get_or<bool>(doc, "record_trace", true);
    ex.bits_list = get_or<std::vector<int>>(doc, "bits_list", {});
    if (doc.contains("sweep")) ex.sweep = parse_sweep(doc.at("sweep"));
    if (doc.contains("output")) ex.output = parse_output(doc.at("output"));

    if (ex.mode == "sweep" && (ex.sweep.alphas.empty() || ex.sweep.bits.empty()))
        throw ConfigError("sweep mode needs sweep.alphas and sweep.bits");
    if (ex.mode == "sweep" && !ex.bits_list.empty())
        throw ConfigError("bits_list is a run-mode field");
    return ex;
}

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    try {
        return json::parse(f);  // exceptions carry line/column positions
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
}

Experiment load_experiment_file(const std::string& path) {
    return parse_experiment(load_json_file(path));
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like dotted.key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // unquoted strings are taken verbatim
    }

    json* node = &doc;
    std::size_t start = 0;
    for (;;) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ConfigError("override has an empty path segment: " + assignment);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (!node->is_object() && !node->is_null())
            throw ConfigError("override path crosses a non-object: " + assignment);
        start = dot + 1;
    }
}

}  // namespace ppacdc
