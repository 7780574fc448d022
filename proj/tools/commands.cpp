#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include "CLI11.hpp"

#include "relpend/autonomous.hpp"
#include "relpend/errors.hpp"
#include "relpend/io.hpp"
#include "relpend/parallel.hpp"
#include "verify.hpp"

namespace relpend::cli {

namespace {

using io::format_double;

std::string output_path(const RunConfig& cfg, const Overrides& ov, const char* fallback) {
    if (ov.out) return *ov.out;
    if (cfg.output) return *cfg.output;
    return fallback;
}

void warn_free_rotator(const PendulumParams& p, std::ostream& err) {
    if (p.is_free_rotator()) err << "warning: a = 0 is the free rotator, kept only as a closed-form test case\n";
}

/// Returns false (after explaining why) when the co-moving frame does not exist.
bool require_admissible(const PendulumParams& p, std::ostream& err) {
    if (admissible(p)) return true;
    err << "inadmissible: |2 N pi / T| = " << std::abs(drift_speed(p)) << " >= 1; no solution with winding "
        << p.winding() << " can have |x'| < 1\n";
    return false;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

}  // namespace

int cmd_check(const RunConfig& cfg, Streams io) {
    const auto& p = cfg.require_params();
    warn_free_rotator(p, io.err);
    const double K = drift_speed(p);
    if (!admissible(p)) {
        io.out << "inadmissible: |2 N pi / T| = " << format_double(std::abs(K)) << " >= 1\n";
        return exit_code::inadmissible;
    }
    const double threshold = p.twist_threshold();
    io.out << "admissible; ";
    if (p.a() < threshold) {
        io.out << "a < pi^2/T^2 (" << p.a() << " < " << threshold << "): twist regime\n";
    } else if (p.a() == threshold) {
        io.out << "a = pi^2/T^2 (" << p.a() << "): twist not guaranteed (borderline)\n";
    } else {
        io.out << "a > pi^2/T^2 (" << p.a() << " > " << threshold << "): twist not guaranteed\n";
    }
    const StripBound b = strip_bound(p, cfg.solver.margin);
    io.out << "K = " << format_double(K) << "\n";
    io.out << "p_hat = " << format_double(b.p_hat) << "\n";
    io.out << "p_tilde = " << format_double(b.p_tilde) << "\n";
    return exit_code::ok;
}

int cmd_simulate(const RunConfig& cfg, const Overrides& ov, Streams io) {
    const auto& p = cfg.require_params();
    warn_free_rotator(p, io.err);
    const auto& o = cfg.simulate;
    const double t1 = o.t1.value_or(o.t0 + p.period());
    const auto rows = sample_trajectory(p, o.start, o.t0, t1, o.samples, cfg.integrator);
    std::ostringstream csv;
    io::write_trajectory_csv(csv, rows);
    const auto path = output_path(cfg, ov, "trajectory.csv");
    io::write_file_atomic(path, csv.str());
    io.out << "wrote " << rows.size() << " samples to " << path << "\n";
    return exit_code::ok;
}

int cmd_poincare_grid(const RunConfig& cfg, const Overrides& ov, Streams io) {
    const auto& p = cfg.require_params();
    warn_free_rotator(p, io.err);
    if (!require_admissible(p, io.err)) return exit_code::inadmissible;
    const auto& o = cfg.poincare_grid;
    std::vector<CylinderState> seeds = o.seeds;
    if (seeds.empty()) {
        const double pt = strip_bound(p, cfg.solver.margin).p_tilde;
        const MomentumInterval region = o.region.value_or(MomentumInterval{-pt, pt});
        const auto ps = linspace(region.lo, region.hi, o.grid_p);
        for (std::size_t i = 0; i < o.grid_q; ++i) {
            for (double pv : ps) seeds.push_back({kTwoPi * static_cast<double>(i) / static_cast<double>(o.grid_q), pv});
        }
    }
    const auto points = iterate_map(p, seeds, o.iterates, cfg.integrator);
    std::ostringstream csv;
    csv << "seed,iterate,q,p\n";
    for (const auto& pt : points) {
        csv << pt.seed << ',' << pt.iterate << ',' << format_double(pt.q) << ',' << format_double(pt.p) << '\n';
    }
    const auto path = output_path(cfg, ov, "poincare.csv");
    io::write_file_atomic(path, csv.str());
    io.out << "wrote " << points.size() << " points from " << seeds.size() << " seeds to " << path << "\n";
    return exit_code::ok;
}

int cmd_find_periodic(const RunConfig& cfg, const Overrides& ov, Streams io) {
    const auto& p = cfg.require_params();
    warn_free_rotator(p, io.err);
    if (!require_admissible(p, io.err)) return exit_code::inadmissible;
    const auto set = find_fixed_points(p, cfg.integrator, cfg.solver);
    std::ostringstream lines;
    io::write_fixed_points_jsonl(lines, set);
    const auto path = output_path(cfg, ov, "orbits.jsonl");
    io::write_file_atomic(path, lines.str());

    if (set.is_degenerate()) {
        io.out << "continuum of fixed points (max |Phi| = " << format_double(set.max_abs_Phi) << ") written to "
               << path << "\n";
        return exit_code::ok;
    }
    io.out << set.orbits().size() << " orbits written to " << path << "\n";
    if (set.no_twist_fallback) {
        io.err << "note: twist condition failed; orbits come from multi-start Newton and may be incomplete\n";
    }
    if (set.unconverged > 0) {
        io.err << set.unconverged << " candidate zero(s) of Phi did not polish below tolerance "
               << cfg.solver.tolerance << "\n";
        return exit_code::no_convergence;
    }
    return exit_code::ok;
}

int cmd_twist_map(const RunConfig& cfg, const Overrides& ov, Streams io) {
    const auto& p = cfg.require_params();
    warn_free_rotator(p, io.err);
    if (!require_admissible(p, io.err)) return exit_code::inadmissible;
    const auto& o = cfg.twist_map;
    const StripBound bound = strip_bound(p, cfg.solver.margin);
    const MomentumInterval region = o.region.value_or(MomentumInterval{-bound.p_tilde, bound.p_tilde});
    const TwistReport rep = twist_margin(p, region, o.grid, cfg.integrator);
    auto doc = io::twist_report_json(rep, p);
    doc["twist_threshold"] = p.twist_threshold();
    const auto boundary = boundary_twist_check(p, bound, o.boundary_grid, cfg.integrator);
    doc["boundary"] = io::boundary_report_json(boundary, bound, p);
    if (!o.curves.empty()) {
        auto list = io::json::array();
        for (const auto& file : o.curves) {
            std::ifstream in(file);
            if (!in) throw ConfigError("cannot read curve file " + file);
            const auto curve = io::read_curve_csv(in);
            const auto hit = curve_intersection_count(p, curve, cfg.integrator);
            const char* kind = hit.kind == IntersectionKind::invariant      ? "invariant"
                               : hit.kind == IntersectionKind::inconclusive ? "inconclusive"
                                                                            : "crossings";
            list.push_back({{"curve", file}, {"kind", kind}, {"count", hit.count}, {"max_deviation", hit.max_deviation}});
        }
        doc["intersections"] = std::move(list);
    }
    const auto path = output_path(cfg, ov, "twist.json");
    io::write_file_atomic(path, io::dump(doc, 2) + "\n");
    io.out << "min dQ/dp0 = " << format_double(rep.min_twist) << " on a " << o.grid << "x" << o.grid
           << " grid; report written to " << path << "\n";
    return exit_code::ok;
}

int cmd_autonomous(const RunConfig& cfg, const Overrides& ov, Streams io) {
    const auto& p = cfg.require_params();
    warn_free_rotator(p, io.err);
    if (!p.forcing().is_zero()) io.err << "note: forcing is ignored; the autonomous table assumes f = 0\n";
    const auto& o = cfg.autonomous;
    const double a = p.a();
    const int turns = o.turns.value_or(std::max(1, std::abs(p.winding())));
    const double sep = 1.0 + 2.0 * a;

    struct Row {
        double E;
        double value;
    };
    std::vector<Row> rows;
    rows.push_back({1.0, a > 0.0 ? kTwoPi / std::sqrt(a) : std::numeric_limits<double>::infinity()});
    if (a > 0.0) {
        const auto levels = libration_energy_grid(a, o.libration_levels);
        const auto periods = map_indices(
            levels.size(), [&](std::size_t k) { return libration_period(a, levels[k], TurningSide::negative, cfg.integrator); });
        for (std::size_t k = 0; k < levels.size(); ++k) rows.push_back({levels[k], periods[k]});
        rows.push_back({sep, std::numeric_limits<double>::infinity()});
    }
    std::vector<double> running(o.running_levels);
    for (std::size_t k = 0; k < running.size(); ++k) {
        const double s = running.size() == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(running.size() - 1);
        running[k] = sep + o.running_span * std::pow(1e-3, 1.0 - s);
    }
    const auto times = map_indices(running.size(), [&](std::size_t k) { return running_time(a, running[k], turns); });
    for (std::size_t k = 0; k < running.size(); ++k) rows.push_back({running[k], times[k]});

    std::ostringstream csv;
    csv << "E,class,period_or_TN\n";
    for (const auto& r : rows) {
        csv << format_double(r.E) << ',' << to_string(classify_energy(a, r.E)) << ',' << format_double(r.value) << '\n';
    }
    const auto path = output_path(cfg, ov, "autonomous.csv");
    io::write_file_atomic(path, csv.str());
    io.out << "wrote " << rows.size() << " energy levels to " << path << "\n";
    return exit_code::ok;
}

int cmd_sweep(const RunConfig& cfg, const Overrides& ov, Streams io) {
    const auto& base = cfg.require_params();
    auto tuples = cfg.sweep.tuples(base);
    if (tuples.empty()) throw ConfigError("sweep has no tuples");

    std::vector<std::size_t> order(tuples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (ov.seed) std::shuffle(order.begin(), order.end(), std::mt19937_64(*ov.seed));

    struct Row {
        SweepTuple key;
        std::string status;
        std::size_t orbits = 0;
        bool degenerate = false;
        double min_twist = std::numeric_limits<double>::quiet_NaN();
        std::size_t unstable = 0;
        double max_abs_Phi = std::numeric_limits<double>::quiet_NaN();
        bool fallback = false;
        std::size_t unconverged = 0;
    };
    // Tuples run in parallel; the work inside each one stays serial.
    auto rows = map_indices(order.size(), [&](std::size_t k) {
        const SweepTuple t = tuples[order[k]];
        Row row;
        row.key = t;
        try {
            const PendulumParams p(t.a, t.T, t.N, base.forcing().scaled(t.forcing_scale));
            if (!admissible(p)) {
                row.status = "inadmissible";
                return row;
            }
            const auto set = find_fixed_points(p, cfg.integrator, cfg.solver, Execution::serial);
            const double pt = strip_bound(p, cfg.solver.margin).p_tilde;
            row.min_twist = twist_margin(p, {-pt, pt}, cfg.sweep.twist_grid, cfg.integrator, Execution::serial).min_twist;
            row.degenerate = set.is_degenerate();
            row.orbits = set.orbits().size();
            row.max_abs_Phi = set.max_abs_Phi;
            row.fallback = set.no_twist_fallback;
            row.unconverged = set.unconverged;
            for (const auto& o : set.orbits()) row.unstable += o.unstable ? 1 : 0;
            row.status = set.unconverged > 0 ? "unconverged" : "ok";
        } catch (const ParameterError&) {
            row.status = "invalid";
        } catch (const ConvergenceError&) {
            row.status = "unconverged";
        } catch (const IntegrationError&) {
            row.status = "unconverged";
        } catch (const Error&) {
            row.status = "error";
        }
        return row;
    });
    std::sort(rows.begin(), rows.end(), [](const Row& l, const Row& r) { return l.key < r.key; });

    std::ostringstream csv;
    csv << "a,T,N,forcing_scale,status,orbits,degenerate,unstable,min_twist,max_abs_Phi,no_twist_fallback,unconverged\n";
    bool failed = false;
    for (const auto& r : rows) {
        failed = failed || r.status == "unconverged" || r.status == "error";
        csv << format_double(r.key.a) << ',' << format_double(r.key.T) << ',' << r.key.N << ','
            << format_double(r.key.forcing_scale) << ',' << r.status << ',' << r.orbits << ','
            << (r.degenerate ? 1 : 0) << ',' << r.unstable << ',' << format_double(r.min_twist) << ','
            << format_double(r.max_abs_Phi) << ',' << (r.fallback ? 1 : 0) << ',' << r.unconverged << '\n';
    }
    const auto path = output_path(cfg, ov, "sweep.csv");
    io::write_file_atomic(path, csv.str());
    io.out << "wrote " << rows.size() << " sweep rows to " << path << "\n";
    if (failed) {
        io.err << "at least one sweep point failed to converge\n";
        return exit_code::no_convergence;
    }
    return exit_code::ok;
}

int run_cli(int argc, const char* const* argv, Streams io) {
    CLI::App app{"Periodic solutions of the forced relativistic pendulum"};
    app.require_subcommand(1);
    std::string config_path;
    Overrides ov;
    std::string out;
    unsigned long long seed = 0;
    int jobs = 0;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    auto* out_opt = app.add_option("--out", out, "output file (overrides \"output\")");
    auto* seed_opt = app.add_option("--seed", seed, "shuffle sweep evaluation order");
    app.add_option("--jobs", jobs, "maximum OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

    const char* names[] = {"check", "simulate", "poincare-grid", "find-periodic", "twist-map", "autonomous", "sweep", "verify"};
    const char* help[] = {"admissibility, twist regime and strip bound",
                          "trajectory CSV t,q,p,x,v,E",
                          "iterates of the period map from a seed grid",
                          "fixed points of the period map as JSONL",
                          "twist and boundary-twist report",
                          "energy table for f = 0",
                          "orbit counts over a parameter grid",
                          "run the invariant suites"};
    for (std::size_t i = 0; i < std::size(names); ++i) app.add_subcommand(names[i], help[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e_stream;
        const int code = app.exit(e, o, e_stream);
        io.out << o.str();
        io.err << e_stream.str();
        return code == 0 ? exit_code::ok : exit_code::usage;
    }
    if (*out_opt) ov.out = out;
    if (*seed_opt) ov.seed = seed;
    set_max_threads(jobs);

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (cmd == "check") return cmd_check(cfg, io);
        if (cmd == "simulate") return cmd_simulate(cfg, ov, io);
        if (cmd == "poincare-grid") return cmd_poincare_grid(cfg, ov, io);
        if (cmd == "find-periodic") return cmd_find_periodic(cfg, ov, io);
        if (cmd == "twist-map") return cmd_twist_map(cfg, ov, io);
        if (cmd == "autonomous") return cmd_autonomous(cfg, ov, io);
        if (cmd == "sweep") return cmd_sweep(cfg, ov, io);
        return cmd_verify(cfg, io);
    } catch (const ConfigError& e) {
        io.err << "config error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const ParameterError& e) {
        io.err << "parameter error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const DomainError& e) {
        io.err << "domain error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const ConvergenceError& e) {
        io.err << "convergence failure: " << e.what() << "\n";
        return exit_code::no_convergence;
    } catch (const IntegrationError& e) {
        io.err << "integration failure at t = " << e.last_time() << ": " << e.what() << "\n";
        return exit_code::no_convergence;
    } catch (const BoundaryTwistError& e) {
        io.err << "boundary twist failure at q = " << e.offending_q() << ": " << e.what() << "\n";
        return exit_code::no_convergence;
    } catch (const Error& e) {
        io.err << "error: " << e.what() << "\n";
        return exit_code::no_convergence;
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << "\n";
        return exit_code::no_convergence;
    }
}

}  // namespace relpend::cli
