#include "snse/config.hpp"

#include <json.hpp>

#include <set>
#include <sstream>

namespace snse {

using nlohmann::json;

SdeParams RunConfig::sde_params() const {
    SdeParams p;
    p.lambda = lambda;
    p.sigma = sigma;
    p.alpha = alpha;
    p.epsilon = epsilon;
    p.dt = dt;
    if (noise_kind == "none")
        p.noise_kind = NoiseKind::none;
    else if (noise_kind == "additive")
        p.noise_kind = NoiseKind::additive;
    else if (noise_kind == "multiplicative")
        p.noise_kind = NoiseKind::multiplicative;
    else
        throw ConfigError("unknown noise_kind: " + noise_kind);
    return p;
}

NoiseProfile RunConfig::profile() const {
    if (noise_profile == "gaussian_cutoff") return GaussianCutoff{k0};
    if (noise_profile == "sharp_cutoff") return SharpCutoff{k_max};
    if (noise_profile == "single_mode") return SingleMode{mode};
    if (noise_profile == "custom") return CustomProfile{table};
    throw ConfigError("unknown noise profile: " + noise_profile);
}

DomainKind RunConfig::domain() const {
    if (domain_kind == "l2_ball") return DomainKind::l2_ball;
    if (domain_kind == "h1_ball") return DomainKind::h1_ball;
    if (domain_kind == "htilde_sublevel") return DomainKind::htilde_sublevel;
    throw ConfigError("unknown domain kind: " + domain_kind);
}

namespace {

/// Duplicate-key scan with line numbers. Runs after syntactic validation, so
/// it only needs to handle well-formed JSON.
void reject_duplicate_keys(const std::string& text) {
    struct Level {
        bool is_object;
        std::set<std::string> keys;
    };
    std::vector<Level> stack;
    int line = 1;
    char last_sig = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (c == '"') {
            std::string s;
            ++i;
            while (i < n && text[i] != '"') {
                if (text[i] == '\\' && i + 1 < n) {
                    s += text[i];
                    s += text[i + 1];
                    i += 2;
                } else {
                    if (text[i] == '\n') ++line;
                    s += text[i++];
                }
            }
            ++i;  // closing quote
            // look ahead for ':' to decide whether this string is a key
            std::size_t j = i;
            while (j < n && (text[j] == ' ' || text[j] == '\t' ||
                             text[j] == '\r' || text[j] == '\n'))
                ++j;
            const bool is_key = j < n && text[j] == ':' && !stack.empty() &&
                                stack.back().is_object &&
                                (last_sig == '{' || last_sig == ',');
            if (is_key && !stack.back().keys.insert(s).second) {
                std::ostringstream msg;
                msg << "duplicate key \"" << s << "\" at line " << line;
                throw ConfigError(msg.str());
            }
            last_sig = '"';
            continue;
        }
        if (c == '{')
            stack.push_back({true, {}});
        else if (c == '[')
            stack.push_back({false, {}});
        else if (c == '}' || c == ']')
            stack.pop_back();
        if (!std::isspace(static_cast<unsigned char>(c))) last_sig = c;
        ++i;
    }
}

void check_keys(const json& obj, const std::string& block,
                const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key \"" + it.key() + "\" in " + block);
}

template <typename T>
void get_to(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) obj.at(key).get_to(out);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    reject_duplicate_keys(text);
    if (!j.is_object()) throw ConfigError("config root must be an object");
    check_keys(j, "config",
               {"grid", "noise", "sde", "domain", "experiment", "output"});

    RunConfig c;
    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_keys(g, "grid", {"dim", "points_per_axis", "box_length"});
        get_to(g, "dim", c.dim);
        get_to(g, "points_per_axis", c.points_per_axis);
        get_to(g, "box_length", c.box_length);
    }
    if (j.contains("noise")) {
        const json& nb = j["noise"];
        check_keys(nb, "noise",
                   {"profile", "k0", "k_max", "mode", "table",
                    "real_valued_output"});
        get_to(nb, "profile", c.noise_profile);
        get_to(nb, "k0", c.k0);
        get_to(nb, "k_max", c.k_max);
        get_to(nb, "mode", c.mode);
        get_to(nb, "table", c.table);
        get_to(nb, "real_valued_output", c.real_valued_output);
    }
    if (j.contains("sde")) {
        const json& s = j["sde"];
        check_keys(s, "sde",
                   {"lambda", "sigma", "alpha", "epsilon", "epsilon_list",
                    "dt", "noise_kind"});
        get_to(s, "lambda", c.lambda);
        get_to(s, "sigma", c.sigma);
        get_to(s, "alpha", c.alpha);
        get_to(s, "epsilon", c.epsilon);
        get_to(s, "epsilon_list", c.epsilon_list);
        get_to(s, "dt", c.dt);
        get_to(s, "noise_kind", c.noise_kind);
    }
    if (j.contains("domain")) {
        const json& d = j["domain"];
        check_keys(d, "domain", {"kind", "radius"});
        get_to(d, "kind", c.domain_kind);
        get_to(d, "radius", c.radius);
    }
    if (j.contains("experiment")) {
        const json& e = j["experiment"];
        check_keys(e, "experiment",
                   {"paths", "t_max", "T_list", "seed", "snapshot_stride",
                    "horizon"});
        get_to(e, "paths", c.paths);
        get_to(e, "t_max", c.t_max);
        get_to(e, "T_list", c.T_list);
        get_to(e, "seed", c.seed);
        get_to(e, "snapshot_stride", c.snapshot_stride);
        get_to(e, "horizon", c.horizon);
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        check_keys(o, "output", {"dir"});
        get_to(o, "dir", c.out_dir);
    }

    // semantic constraints, named after the offending key
    if (c.sigma * c.dim >= 2.0)
        throw ConfigError("sigma: sigma*dim must be < 2");
    if (c.dim != 1 && c.dim != 2) throw ConfigError("dim: must be 1 or 2");
    if (c.points_per_axis < 8 ||
        (c.points_per_axis & (c.points_per_axis - 1)) != 0)
        throw ConfigError("points_per_axis: must be a power of two >= 8");
    if (!(c.box_length > 0.0)) throw ConfigError("box_length: must be > 0");
    if (!(c.dt > 0.0)) throw ConfigError("dt: must be > 0");
    if (c.alpha < 0.0) throw ConfigError("alpha: must be >= 0");
    if (c.epsilon < 0.0) throw ConfigError("epsilon: must be >= 0");
    if (c.lambda != 1 && c.lambda != -1 && c.lambda != 0)
        throw ConfigError("lambda: must be +1, -1, or 0");
    if (!(c.radius > 0.0)) throw ConfigError("radius: must be > 0");
    if (c.noise_kind == "multiplicative" && !c.real_valued_output)
        throw ConfigError(
            "real_valued_output: multiplicative noise requires true");
    c.sde_params();  // validates noise_kind
    c.profile();     // validates profile name
    c.domain();      // validates domain kind
    return c;
}

std::string serialize_config(const RunConfig& c) {
    json j;
    j["grid"] = {{"dim", c.dim},
                 {"points_per_axis", c.points_per_axis},
                 {"box_length", c.box_length}};
    j["noise"] = {{"profile", c.noise_profile},
                  {"k0", c.k0},
                  {"k_max", c.k_max},
                  {"mode", c.mode},
                  {"table", c.table},
                  {"real_valued_output", c.real_valued_output}};
    j["sde"] = {{"lambda", c.lambda},       {"sigma", c.sigma},
                {"alpha", c.alpha},         {"epsilon", c.epsilon},
                {"epsilon_list", c.epsilon_list}, {"dt", c.dt},
                {"noise_kind", c.noise_kind}};
    j["domain"] = {{"kind", c.domain_kind}, {"radius", c.radius}};
    j["experiment"] = {{"paths", c.paths},
                       {"t_max", c.t_max},
                       {"T_list", c.T_list},
                       {"seed", c.seed},
                       {"snapshot_stride", c.snapshot_stride},
                       {"horizon", c.horizon}};
    j["output"] = {{"dir", c.out_dir}};
    return j.dump(2);
}

}  // namespace snse
