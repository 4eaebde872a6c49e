#include "qbatt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "qbatt/error.hpp"

namespace qbatt {

namespace {

std::string where(const std::string& key, int line)
{
    return line > 0 ? "line " + std::to_string(line) + ": '" + key + "'" : "'" + key + "'";
}

double to_double(const std::string& key, const std::string& v, int line)
{
    double out = 0.0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
        throw ValidationError(where(key, line) + " expects a number, got '" + v + "'");
    }
    return out;
}

template <class Int>
Int to_integer(const std::string& key, const std::string& v, int line)
{
    Int out = 0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ValidationError(where(key, line) + " expects a non-negative integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v, int line)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw ValidationError(where(key, line) + " expects true or false, got '" + v + "'");
}

template <class E>
E to_enum(const std::string& key, const std::string& v, int line, const std::map<std::string, E>& names)
{
    const auto it = names.find(v);
    if (it == names.end()) {
        std::string valid;
        for (const auto& [name, value] : names) {
            valid += (valid.empty() ? "" : ", ") + name;
        }
        throw ValidationError(where(key, line) + " must be one of " + valid + ", got '" + v + "'");
    }
    return it->second;
}

template <class E>
std::string enum_name(E value, const std::map<std::string, E>& names)
{
    for (const auto& [name, e] : names) {
        if (e == value) {
            return name;
        }
    }
    return "?";
}

const std::map<std::string, EvolutionMode> kModes{{"non_markovian", EvolutionMode::non_markovian},
                                                  {"markovian_asymptotic", EvolutionMode::markovian_asymptotic},
                                                  {"unitary", EvolutionMode::unitary}};
const std::map<std::string, DissipatorKind> kDissipators{{"dephasing_only", DissipatorKind::dephasing_only},
                                                         {"full_secular", DissipatorKind::full_secular}};
const std::map<std::string, Frame> kFrames{{"rotating", Frame::rotating}, {"co_rotating", Frame::co_rotating}};
const std::map<std::string, PropagatorKind> kPropagators{{"midpoint", PropagatorKind::midpoint},
                                                         {"magnus4", PropagatorKind::magnus4}};
const std::map<std::string, NmqjVariant> kVariants{{"conserving", NmqjVariant::conserving},
                                                   {"literal", NmqjVariant::literal}};

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

Ket2 named_ket(const std::string& name)
{
    static const std::map<std::string, Ket2 (*)()> kets{{"up_z", kets::up_z},     {"down_z", kets::down_z},
                                                        {"up_x", kets::up_x},     {"down_x", kets::down_x},
                                                        {"up_y", kets::up_y},     {"down_y", kets::down_y}};
    const auto it = kets.find(name);
    if (it == kets.end()) {
        throw ValidationError("initial_state: unknown single-qubit state '" + name +
                              "' (use up_z, down_z, up_x, down_x, up_y or down_y)");
    }
    return it->second();
}

} // namespace

std::string format_number(double v) { return to_text(v); }

StateVector4 parse_initial_state(const std::string& spec)
{
    if (spec == "bell") {
        const double a = 1.0 / std::sqrt(2.0);
        // (|up down> + |down up>) / sqrt 2
        return StateVector4(0.0, a, a, 0.0);
    }
    const auto comma = spec.find(',');
    if (comma == std::string::npos) {
        throw ValidationError("initial_state: expected 'bell' or '<charger>,<battery>', got '" + spec + "'");
    }
    return product_state(named_ket(trim(spec.substr(0, comma))), named_ket(trim(spec.substr(comma + 1))));
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{
        "omega_A",      "omega_B",       "omega_L",         "Omega", "g",        "eta2",     "s",
        "p",            "dt",            "t_max",           "record_stride",     "mode",     "dissipator",
        "frame",        "propagator",    "nmax",            "renormalize",       "nmqj_variant",
        "clamp_tolerance", "shots",      "seed",            "cycle_dt",          "t_switch", "initial_state",
        "scenario",     "output",        "jobs"};
    return keys;
}

void RunConfig::set(const std::string& key, const std::string& value, int line)
{
    const auto num = [&] { return to_double(key, value, line); };
    if (key == "omega_A") {
        params.omega_A = num();
    } else if (key == "omega_B") {
        params.omega_B = num();
    } else if (key == "omega_L") {
        params.omega_L = num();
    } else if (key == "Omega") {
        params.Omega = num();
    } else if (key == "g") {
        params.g = num();
    } else if (key == "eta2") {
        params.eta_sq = num();
    } else if (key == "s") {
        params.s = num();
    } else if (key == "p") {
        params.p = num();
    } else if (key == "dt") {
        dt = num();
    } else if (key == "t_max") {
        t_max = num();
    } else if (key == "record_stride") {
        record_stride = to_integer<int>(key, value, line);
    } else if (key == "mode") {
        mode = to_enum(key, value, line, kModes);
    } else if (key == "dissipator") {
        dissipator = to_enum(key, value, line, kDissipators);
    } else if (key == "frame") {
        frame = to_enum(key, value, line, kFrames);
    } else if (key == "propagator") {
        propagator = to_enum(key, value, line, kPropagators);
    } else if (key == "nmax") {
        n_max = to_integer<int>(key, value, line);
    } else if (key == "renormalize") {
        renormalize = to_bool(key, value, line);
    } else if (key == "nmqj_variant") {
        nmqj_variant = to_enum(key, value, line, kVariants);
    } else if (key == "clamp_tolerance") {
        clamp_tolerance = num();
    } else if (key == "shots") {
        shots = to_integer<std::size_t>(key, value, line);
    } else if (key == "seed") {
        seed = to_integer<std::uint64_t>(key, value, line);
    } else if (key == "cycle_dt") {
        cycle_dt = num();
    } else if (key == "t_switch") {
        t_switch = num();
    } else if (key == "initial_state") {
        parse_initial_state(value);
        initial_state = value;
    } else if (key == "scenario") {
        scenario = value;
    } else if (key == "output") {
        output = value;
    } else if (key == "jobs") {
        jobs = to_integer<unsigned>(key, value, line);
    } else {
        throw ValidationError(where(key, line) + " is not a known configuration key");
    }
    explicit_keys.insert(key);
}

void RunConfig::validate() const
{
    params.validate();
    const auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) {
            throw ValidationError(std::string("config: ") + name + " must be > 0");
        }
    };
    positive(dt, "dt");
    positive(t_max, "t_max");
    positive(cycle_dt, "cycle_dt");
    if (record_stride < 1) {
        throw ValidationError("config: record_stride must be >= 1");
    }
    if (n_max < 0 || n_max > kMaxJumpLevel) {
        throw ValidationError("config: nmax must be 0, 1 or 2");
    }
    if (!(clamp_tolerance >= 0.0)) {
        throw ValidationError("config: clamp_tolerance must be >= 0");
    }
    if (shots < 1) {
        throw ValidationError("config: shots must be >= 1");
    }
    if (jobs < 1) {
        throw ValidationError("config: jobs must be >= 1");
    }
    if (t_switch && !(*t_switch >= 0.0)) {
        throw ValidationError("config: t_switch must be >= 0");
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const
{
    return {{"omega_A", format_number(params.omega_A)},
            {"omega_B", format_number(params.omega_B)},
            {"omega_L", format_number(params.omega_L)},
            {"Omega", format_number(params.Omega)},
            {"g", format_number(params.g)},
            {"eta2", format_number(params.eta_sq)},
            {"s", format_number(params.s)},
            {"p", format_number(params.p)},
            {"dt", format_number(dt)},
            {"t_max", format_number(t_max)},
            {"record_stride", std::to_string(record_stride)},
            {"mode", enum_name(mode, kModes)},
            {"dissipator", enum_name(dissipator, kDissipators)},
            {"frame", enum_name(frame, kFrames)},
            {"propagator", enum_name(propagator, kPropagators)},
            {"nmax", std::to_string(n_max)},
            {"renormalize", renormalize ? "true" : "false"},
            {"nmqj_variant", enum_name(nmqj_variant, kVariants)},
            {"clamp_tolerance", format_number(clamp_tolerance)},
            {"shots", std::to_string(shots)},
            {"seed", std::to_string(seed)},
            {"cycle_dt", format_number(cycle_dt)},
            {"t_switch", t_switch ? format_number(*t_switch) : "auto"},
            {"initial_state", initial_state},
            {"scenario", scenario},
            {"output", output},
            {"jobs", std::to_string(jobs)}};
}

StateVector4 RunConfig::initial_ket() const { return parse_initial_state(initial_state); }

EvolutionConfig RunConfig::evolution() const
{
    EvolutionConfig ec;
    ec.dt = dt;
    ec.t_max = t_max;
    ec.mode = mode;
    ec.dissipator = dissipator;
    ec.record_stride = record_stride;
    ec.frame = frame;
    return ec;
}

NmqjConfig RunConfig::nmqj() const
{
    NmqjConfig nc;
    nc.dt = dt;
    nc.t_max = t_max;
    nc.n_max = n_max;
    nc.record_stride = record_stride;
    nc.renormalize = renormalize;
    nc.variant = nmqj_variant;
    nc.propagator = propagator;
    nc.frame = frame;
    nc.clamp_tolerance = clamp_tolerance;
    return nc;
}

CircuitConfig RunConfig::circuit() const
{
    CircuitConfig cc;
    cc.dt = cycle_dt;
    cc.shots = shots;
    cc.seed = seed;
    cc.t_max = t_max;
    cc.record_stride = record_stride;
    cc.propagator = propagator;
    cc.frame = frame;
    cc.jobs = jobs;
    return cc;
}

RunConfig parse_config(std::string_view text)
{
    RunConfig cfg;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const std::string content = trim(line);
        if (content.empty()) {
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected 'key = value', got '" + content +
                                  "'");
        }
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ValidationError("line " + std::to_string(line_no) + ": empty key or value");
        }
        if (cfg.is_set(key)) {
            throw ValidationError(where(key, line_no) + " is given more than once");
        }
        cfg.set(key, value, line_no);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace qbatt
