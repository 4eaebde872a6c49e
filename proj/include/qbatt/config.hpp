// config.hpp: flat `key = value` run configuration.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qbatt/circuit.hpp"
#include "qbatt/integrator.hpp"
#include "qbatt/model.hpp"
#include "qbatt/nmqj.hpp"

namespace qbatt {

struct RunConfig {
    SystemParams params;

    double dt = 2e-4;
    double t_max = 1.2;
    int record_stride = 1;
    EvolutionMode mode = EvolutionMode::non_markovian;
    DissipatorKind dissipator = DissipatorKind::dephasing_only;
    Frame frame = Frame::rotating;
    PropagatorKind propagator = PropagatorKind::midpoint;

    int n_max = 2;
    bool renormalize = false;
    NmqjVariant nmqj_variant = NmqjVariant::conserving;
    double clamp_tolerance = 1e-4;

    std::size_t shots = 1000;
    std::uint64_t seed = 1;
    double cycle_dt = 1e-3;
    std::optional<double> t_switch;

    // "bell" or "<charger>,<battery>" with each of up_z, down_z, up_x, down_x, up_y, down_y.
    std::string initial_state = "up_y,down_z";
    std::string scenario;
    std::string output = ".";
    unsigned jobs = 1;

    // Keys given explicitly (file or set()); scenarios only apply their own
    // defaults to the others.
    std::set<std::string> explicit_keys;

    // Throws ValidationError for an unknown key or a malformed value. line > 0
    // is quoted in the message.
    void set(const std::string& key, const std::string& value, int line = 0);
    bool is_set(const std::string& key) const { return explicit_keys.count(key) != 0; }

    // Range checks on every key plus SystemParams::validate.
    void validate() const;

    // Every key with its current value, in a fixed order.
    std::vector<std::pair<std::string, std::string>> resolved() const;

    StateVector4 initial_ket() const;
    EvolutionConfig evolution() const;
    NmqjConfig nmqj() const;
    CircuitConfig circuit() const;
};

const std::vector<std::string>& config_keys();

// Empty text gives all defaults. Errors carry the offending line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// Shortest round-trip decimal form, as written to CSV headers.
std::string format_number(double v);

StateVector4 parse_initial_state(const std::string& spec);

} // namespace qbatt
