#include "config.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

#include "relpend/errors.hpp"
#include "relpend/io.hpp"

namespace relpend::cli {

namespace {

using nlohmann::json;

void only_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError("unknown key \"" + key + "\" in " + std::string(where));
    }
}

double real(const json& obj, const char* key, std::string_view where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(std::string(where) + "." + key + " must be a number");
    return v.get<double>();
}

std::size_t count(const json& obj, const char* key, std::string_view where) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(std::string(where) + "." + key + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

int integer(const json& obj, const char* key, std::string_view where) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(std::string(where) + "." + key + " must be an integer");
    return v.get<int>();
}

template <class T, class Read>
void optional_field(const json& obj, const char* key, T& dst, Read read) {
    if (obj.contains(key)) dst = read(obj, key);
}

MomentumInterval interval(const json& v, std::string_view where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError(std::string(where) + " must be [lo, hi]");
    }
    MomentumInterval out{v[0].get<double>(), v[1].get<double>()};
    if (!(out.lo < out.hi)) throw ConfigError(std::string(where) + " needs lo < hi");
    return out;
}

template <class T>
std::vector<T> number_list(const json& v, std::string_view where) {
    if (!v.is_array()) throw ConfigError(std::string(where) + " must be an array");
    std::vector<T> out;
    for (const auto& x : v) {
        if constexpr (std::is_integral_v<T>) {
            if (!x.is_number_integer()) throw ConfigError(std::string(where) + " entries must be integers");
        } else {
            if (!x.is_number()) throw ConfigError(std::string(where) + " entries must be numbers");
        }
        out.push_back(x.get<T>());
    }
    return out;
}

IntegratorConfig parse_integrator(const json& j) {
    constexpr std::string_view w = "integrator";
    only_keys(j, w, {"rtol", "atol", "max_steps", "initial_step"});
    IntegratorConfig c;
    optional_field(j, "rtol", c.rtol, [&](const json& o, const char* k) { return real(o, k, w); });
    optional_field(j, "atol", c.atol, [&](const json& o, const char* k) { return real(o, k, w); });
    optional_field(j, "max_steps", c.max_steps, [&](const json& o, const char* k) { return count(o, k, w); });
    if (j.contains("initial_step")) c.initial_step = real(j, "initial_step", w);
    if (c.initial_step && !(*c.initial_step > 0.0)) throw ConfigError("integrator.initial_step must be positive");
    try {
        c.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

SolverConfig parse_solver(const json& j) {
    constexpr std::string_view w = "solver";
    only_keys(j, w,
              {"grid", "tolerance", "degeneracy_tolerance", "bisection_tolerance", "dedup_tolerance",
               "touch_tolerance", "newton_grid", "newton_max_iterations", "polish_tightening", "margin",
               "index_radius", "index_samples"});
    SolverConfig c;
    auto r = [&](const json& o, const char* k) { return real(o, k, w); };
    auto n = [&](const json& o, const char* k) { return count(o, k, w); };
    optional_field(j, "grid", c.grid, n);
    optional_field(j, "tolerance", c.tolerance, r);
    optional_field(j, "degeneracy_tolerance", c.degeneracy_tolerance, r);
    optional_field(j, "bisection_tolerance", c.bisection_tolerance, r);
    optional_field(j, "dedup_tolerance", c.dedup_tolerance, r);
    optional_field(j, "touch_tolerance", c.touch_tolerance, r);
    optional_field(j, "newton_grid", c.newton_grid, n);
    optional_field(j, "newton_max_iterations", c.newton_max_iterations, n);
    optional_field(j, "polish_tightening", c.polish_tightening, r);
    optional_field(j, "margin", c.margin, r);
    optional_field(j, "index_radius", c.index_radius, r);
    optional_field(j, "index_samples", c.index_samples, n);
    if (c.grid < 2) throw ConfigError("solver.grid must be at least 2");
    if (!(c.tolerance > 0.0 && c.bisection_tolerance > 0.0 && c.dedup_tolerance > 0.0 && c.index_radius > 0.0)) {
        throw ConfigError("solver tolerances and index_radius must be positive");
    }
    if (!(c.margin > 0.0)) throw ConfigError("solver.margin must be positive");
    if (!(c.polish_tightening >= 1.0)) throw ConfigError("solver.polish_tightening must be >= 1");
    if (c.index_samples < 8) throw ConfigError("solver.index_samples must be at least 8");
    return c;
}

SimulateOptions parse_simulate(const json& j) {
    constexpr std::string_view w = "simulate";
    only_keys(j, w, {"q0", "p0", "t0", "t1", "samples"});
    SimulateOptions o;
    auto r = [&](const json& obj, const char* k) { return real(obj, k, w); };
    optional_field(j, "q0", o.start.q, r);
    optional_field(j, "p0", o.start.p, r);
    optional_field(j, "t0", o.t0, r);
    if (j.contains("t1")) o.t1 = real(j, "t1", w);
    optional_field(j, "samples", o.samples, [&](const json& obj, const char* k) { return count(obj, k, w); });
    if (o.samples < 2) throw ConfigError("simulate.samples must be at least 2");
    return o;
}

PoincareGridOptions parse_poincare_grid(const json& j) {
    constexpr std::string_view w = "poincare_grid";
    only_keys(j, w, {"seeds", "grid_q", "grid_p", "region", "iterates"});
    PoincareGridOptions o;
    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        if (!s.is_array()) throw ConfigError("poincare_grid.seeds must be an array of [q, p]");
        for (const auto& pt : s) {
            if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
                throw ConfigError("poincare_grid.seeds entries must be [q, p]");
            }
            o.seeds.push_back({pt[0].get<double>(), pt[1].get<double>()});
        }
    }
    auto n = [&](const json& obj, const char* k) { return count(obj, k, w); };
    optional_field(j, "grid_q", o.grid_q, n);
    optional_field(j, "grid_p", o.grid_p, n);
    optional_field(j, "iterates", o.iterates, n);
    if (j.contains("region")) o.region = interval(j.at("region"), "poincare_grid.region");
    if (o.seeds.empty() && (o.grid_q == 0 || o.grid_p == 0)) throw ConfigError("poincare_grid needs seeds");
    return o;
}

TwistMapOptions parse_twist_map(const json& j) {
    constexpr std::string_view w = "twist_map";
    only_keys(j, w, {"grid", "region", "boundary_grid", "curves"});
    TwistMapOptions o;
    auto n = [&](const json& obj, const char* k) { return count(obj, k, w); };
    optional_field(j, "grid", o.grid, n);
    optional_field(j, "boundary_grid", o.boundary_grid, n);
    if (j.contains("region")) o.region = interval(j.at("region"), "twist_map.region");
    if (j.contains("curves")) {
        const auto& c = j.at("curves");
        if (!c.is_array()) throw ConfigError("twist_map.curves must be an array of paths");
        for (const auto& path : c) {
            if (!path.is_string()) throw ConfigError("twist_map.curves must be an array of paths");
            o.curves.push_back(path.get<std::string>());
        }
    }
    if (o.grid == 0 || o.boundary_grid == 0) throw ConfigError("twist_map grids must be positive");
    return o;
}

AutonomousOptions parse_autonomous(const json& j) {
    constexpr std::string_view w = "autonomous";
    only_keys(j, w, {"libration_levels", "running_levels", "running_span", "turns"});
    AutonomousOptions o;
    auto n = [&](const json& obj, const char* k) { return count(obj, k, w); };
    optional_field(j, "libration_levels", o.libration_levels, n);
    optional_field(j, "running_levels", o.running_levels, n);
    optional_field(j, "running_span", o.running_span, [&](const json& obj, const char* k) { return real(obj, k, w); });
    if (j.contains("turns")) o.turns = integer(j, "turns", w);
    if (!(o.running_span > 0.0)) throw ConfigError("autonomous.running_span must be positive");
    if (o.turns && *o.turns < 1) throw ConfigError("autonomous.turns must be >= 1");
    return o;
}

SweepOptions parse_sweep(const json& j) {
    only_keys(j, "sweep", {"a", "T", "N", "forcing_scale", "twist_grid"});
    SweepOptions o;
    if (j.contains("a")) o.a = number_list<double>(j.at("a"), "sweep.a");
    if (j.contains("T")) o.T = number_list<double>(j.at("T"), "sweep.T");
    if (j.contains("N")) o.N = number_list<int>(j.at("N"), "sweep.N");
    if (j.contains("forcing_scale")) o.forcing_scale = number_list<double>(j.at("forcing_scale"), "sweep.forcing_scale");
    if (j.contains("twist_grid")) o.twist_grid = count(j, "twist_grid", "sweep");
    return o;
}

VerifyOptions parse_verify(const json& j) {
    only_keys(j, "verify", {"assert_twist", "suites"});
    VerifyOptions o;
    if (j.contains("assert_twist")) {
        if (!j.at("assert_twist").is_boolean()) throw ConfigError("verify.assert_twist must be a boolean");
        o.assert_twist = j.at("assert_twist").get<bool>();
    }
    if (j.contains("suites")) {
        const auto& s = j.at("suites");
        if (!s.is_array()) throw ConfigError("verify.suites must be an array of names");
        for (const auto& name : s) {
            if (!name.is_string()) throw ConfigError("verify.suites must be an array of names");
            o.suites.push_back(name.get<std::string>());
        }
    }
    return o;
}

}  // namespace

std::vector<SweepTuple> SweepOptions::tuples(const PendulumParams& base) const {
    const std::vector<double> as = a.empty() ? std::vector<double>{base.a()} : a;
    const std::vector<double> Ts = T.empty() ? std::vector<double>{base.period()} : T;
    const std::vector<int> Ns = N.empty() ? std::vector<int>{base.winding()} : N;
    const std::vector<double> fs = forcing_scale.empty() ? std::vector<double>{1.0} : forcing_scale;
    std::vector<SweepTuple> out;
    for (double av : as)
        for (double Tv : Ts)
            for (int Nv : Ns)
                for (double fv : fs) out.push_back({av, Tv, Nv, fv});
    return out;
}

const PendulumParams& RunConfig::require_params() const {
    if (!params) throw ConfigError("configuration has no \"params\" section");
    return *params;
}

RunConfig parse_config(const nlohmann::json& doc) {
    only_keys(doc, "config",
              {"params", "integrator", "solver", "output", "simulate", "poincare_grid", "twist_map", "autonomous",
               "sweep", "verify"});
    RunConfig c;
    try {
        if (doc.contains("params")) c.params = io::params_from_json(doc.at("params"));
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    if (doc.contains("integrator")) c.integrator = parse_integrator(doc.at("integrator"));
    if (doc.contains("solver")) c.solver = parse_solver(doc.at("solver"));
    if (doc.contains("output")) {
        if (!doc.at("output").is_string()) throw ConfigError("output must be a path string");
        c.output = doc.at("output").get<std::string>();
    }
    if (doc.contains("simulate")) c.simulate = parse_simulate(doc.at("simulate"));
    if (doc.contains("poincare_grid")) c.poincare_grid = parse_poincare_grid(doc.at("poincare_grid"));
    if (doc.contains("twist_map")) c.twist_map = parse_twist_map(doc.at("twist_map"));
    if (doc.contains("autonomous")) c.autonomous = parse_autonomous(doc.at("autonomous"));
    if (doc.contains("sweep")) c.sweep = parse_sweep(doc.at("sweep"));
    if (doc.contains("verify")) c.verify = parse_verify(doc.at("verify"));
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

}  // namespace relpend::cli
