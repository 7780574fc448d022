#include "relpend/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "relpend/errors.hpp"

namespace relpend::io {

namespace {

double number_field(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ParameterError(std::string("\"") + key + "\" must be a number");
    return v.get<double>();
}

std::vector<double> coefficient_list(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    const auto& v = j.at(key);
    if (!v.is_array()) throw ParameterError(std::string("forcing \"") + key + "\" must be an array");
    std::vector<double> out;
    for (const auto& c : v) {
        if (!c.is_number()) throw ParameterError(std::string("forcing \"") + key + "\" entries must be numbers");
        out.push_back(c.get<double>());
    }
    return out;
}

void dump_into(std::string& out, const json& j, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += json(key).dump();
                out += indent < 0 ? ":" : ": ";
                dump_into(out, value, indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& value : j) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                dump_into(out, value, indent, depth + 1);
            }
            newline(depth);
            out += ']';
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            // JSON has no NaN or infinity.
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string dump(const json& j, int indent) {
    std::string out;
    dump_into(out, j, indent, 0);
    return out;
}

std::string format_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "NaN" : (v > 0 ? "Infinity" : "-Infinity");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

PendulumParams params_from_json(const json& j) {
    if (!j.is_object()) throw ParameterError("parameters must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (key != "a" && key != "T" && key != "N" && key != "forcing") {
            throw ParameterError("unknown parameter key \"" + key + "\"");
        }
    }
    for (const char* key : {"a", "T", "N"}) {
        if (!j.contains(key)) throw ParameterError(std::string("missing parameter \"") + key + "\"");
    }
    const auto& n = j.at("N");
    if (!n.is_number_integer()) throw ParameterError("\"N\" must be an integer");

    ForcingSeries forcing;
    if (j.contains("forcing") && !j.at("forcing").is_null()) {
        const auto& f = j.at("forcing");
        if (!f.is_object()) throw ParameterError("\"forcing\" must be an object");
        for (const auto& [key, _] : f.items()) {
            if (key != "cos" && key != "sin") throw ParameterError("unknown forcing key \"" + key + "\"");
        }
        forcing = ForcingSeries(coefficient_list(f, "cos"), coefficient_list(f, "sin"));
    }
    return {number_field(j, "a"), number_field(j, "T"), n.get<int>(), std::move(forcing)};
}

json params_to_json(const PendulumParams& p) {
    json cos = json::array();
    json sin = json::array();
    for (double c : p.forcing().cos_coeffs()) cos.push_back(c);
    for (double s : p.forcing().sin_coeffs()) sin.push_back(s);
    return json{{"a", p.a()}, {"T", p.period()}, {"N", p.winding()}, {"forcing", {{"cos", cos}, {"sin", sin}}}};
}

std::string params_hash(const PendulumParams& p) {
    const std::string canonical = dump(params_to_json(p));
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& rows) {
    os << "t,q,p,x,v,E\n";
    for (const auto& r : rows) {
        os << format_double(r.t) << ',' << format_double(r.q) << ',' << format_double(r.p) << ','
           << format_double(r.x) << ',' << format_double(r.v) << ',' << format_double(r.E) << '\n';
    }
}

std::vector<CylinderState> read_curve_csv(std::istream& is) {
    std::vector<CylinderState> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.find_first_of("qQ") != std::string::npos) continue;
        std::istringstream ss(line);
        std::string qs, ps;
        if (!std::getline(ss, qs, ',') || !std::getline(ss, ps, ',')) {
            throw ParameterError("curve CSV line " + std::to_string(lineno) + " needs two columns q,p");
        }
        try {
            out.push_back({std::stod(qs), std::stod(ps)});
        } catch (const std::exception&) {
            throw ParameterError("curve CSV line " + std::to_string(lineno) + " is not numeric");
        }
    }
    return out;
}

json orbit_to_json(const PeriodicOrbit& o) {
    json j;
    j["q0"] = o.q0;
    j["p0"] = o.p0;
    j["residual"] = o.residual;
    j["index"] = o.index ? json(*o.index) : json(nullptr);
    j["trace"] = o.trace;
    j["class"] = std::string(to_string(o.linear_class));
    j["winding"] = o.winding;
    j["unstable"] = o.unstable;
    return j;
}

json continuum_to_json(const DegenerateContinuum& c) {
    json curve = json::array();
    for (std::size_t i = 0; i < c.curve.theta.size(); ++i) {
        curve.push_back(json::array({c.curve.theta[i], c.curve.phi[i]}));
    }
    return json{{"degenerate", true}, {"max_abs_Phi", c.curve.max_abs_Phi()}, {"curve", curve}};
}

void write_fixed_points_jsonl(std::ostream& os, const FixedPointSet& set) {
    if (const auto* c = std::get_if<DegenerateContinuum>(&set.solutions)) {
        os << dump(continuum_to_json(*c)) << '\n';
        return;
    }
    for (const auto& o : set.orbits()) os << dump(orbit_to_json(o)) << '\n';
}

json twist_report_json(const TwistReport& rep, const PendulumParams& p) {
    return json{{"min_twist", rep.min_twist},
                {"argmin", json::array({rep.argmin_q, rep.argmin_p})},
                {"grid", rep.grid},
                {"region", json::array({rep.region.lo, rep.region.hi})},
                {"params_hash", params_hash(p)}};
}

json boundary_report_json(const BoundaryTwist& rep, const StripBound& bound, const PendulumParams& p) {
    return json{{"min_upper", rep.min_upper},
                {"max_lower", rep.max_lower},
                {"grid", rep.grid},
                {"p_hat", bound.p_hat},
                {"p_tilde", bound.p_tilde},
                {"params_hash", params_hash(p)}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace relpend::io
