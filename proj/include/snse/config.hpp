#pragma once

#include "snse/dynamics.hpp"
#include "snse/exit.hpp"
#include "snse/noise.hpp"

#include <string>
#include <vector>

namespace snse {

/// Fully resolved run configuration. Parsed from strict JSON: unknown keys
/// are rejected, duplicate keys are a parse error carrying the line number.
struct RunConfig {
    // grid
    int dim = 1;
    int points_per_axis = 64;
    double box_length = 20.0 * 3.14159265358979323846;

    // noise
    std::string noise_profile = "gaussian_cutoff";  // or sharp_cutoff,
                                                    // single_mode, custom
    double k0 = 2.0;
    double k_max = 0.0;
    int mode = 1;
    std::vector<double> table;
    bool real_valued_output = false;

    // sde
    int lambda = 1;
    double sigma = 1.0;
    double alpha = 0.1;
    double epsilon = 0.05;
    std::vector<double> epsilon_list;
    double dt = 1e-3;
    std::string noise_kind = "additive";  // none | additive | multiplicative

    // domain
    std::string domain_kind = "l2_ball";  // l2_ball | h1_ball | htilde_sublevel
    double radius = 1.0;

    // experiment
    std::size_t paths = 100;
    double t_max = 10.0;
    std::vector<double> T_list = {1.0};
    std::uint64_t seed = 1;
    int snapshot_stride = 0;
    double horizon = 1.0;  // simulate subcommand T

    // output
    std::string out_dir = ".";

    bool operator==(const RunConfig&) const = default;

    SdeParams sde_params() const;
    NoiseProfile profile() const;
    DomainKind domain() const;
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);

}  // namespace snse
