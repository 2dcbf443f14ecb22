#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "reclab/experiments.hpp"
#include "reclab/neutral.hpp"
#include "reclab/recurrence.hpp"
#include "reclab/signal.hpp"
#include "reclab/signal_config.hpp"

namespace reclab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Flags {
    std::string config;
    std::string out;
    std::optional<double> step;
    std::string range;
    std::optional<int> ladder_depth;
    unsigned workers = 1;
    std::string format = "csv";
    std::vector<std::string> inputs;
};

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json load_json_file(const std::string& path) { return parse_json_text(read_file(path), path); }

json load_config(const Flags& f) {
    if (f.config.empty()) return json::object();
    json doc = load_json_file(f.config);
    if (!doc.is_object()) throw ConfigError(f.config + ": config document must be an object");
    return doc;
}

/// Built-in signal names accepted wherever a descriptor is expected.
json named_signal(const std::string& name) {
    if (name == "sin" || name == "cos" || name == "chirp") return {{"generator", name}};
    if (name == "pi_phi") return {{"generator", "aa_step"}, {"branch", "phi"}};
    if (name == "g1") return {{"generator", "aa_step"}, {"branch", "psi1"}};
    if (name == "g2") return {{"generator", "aa_step"}, {"branch", "psi2"}};
    if (name == "lacunary") return {{"generator", "lacunary"}, {"order", 8}};
    throw ConfigError("unknown signal '" + name + "' (use a descriptor, a file, or one of sin, cos, chirp, "
                      "pi_phi, g1, g2, lacunary)");
}

/// A signal argument: inline JSON, a JSON file, or a built-in name.
json signal_argument(const std::string& arg) {
    if (!arg.empty() && arg.front() == '{') return parse_json_text(arg, "signal descriptor");
    if (arg.size() > 5 && arg.ends_with(".json")) return load_json_file(arg);
    return named_signal(arg);
}

json signal_document(const json& v) { return v.is_string() ? signal_argument(v.get<std::string>()) : v; }

fs::path output_dir(const Flags& f) {
    if (!f.out.empty()) return f.out;
    if (const char* env = std::getenv(kOutEnv); env && *env) return env;
    return "reclab_out";
}

Interval parse_range(const std::string& text) {
    Interval r;
    try {
        const auto comma = text.find(',');
        std::size_t used = 0;
        if (comma == std::string::npos) {
            r.hi = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
        } else {
            const std::string lo = text.substr(0, comma), hi = text.substr(comma + 1);
            r.lo = std::stod(lo, &used);
            if (used != lo.size()) throw std::invalid_argument(text);
            r.hi = std::stod(hi, &used);
            if (used != hi.size()) throw std::invalid_argument(text);
        }
    } catch (const std::logic_error&) {
        throw ConfigError("--range expects HI or LO,HI, got '" + text + "'");
    }
    if (!(r.hi > r.lo) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
        throw ConfigError("--range must satisfy LO < HI");
    return r;
}

void validate(const Flags& f) {
    if (f.step && !(*f.step > 0.0 && std::isfinite(*f.step))) throw ConfigError("--step must be positive");
    if (f.ladder_depth && (*f.ladder_depth < 1 || *f.ladder_depth > 8))
        throw ConfigError("--ladder-depth must lie in [1, 8]");
    if (f.workers < 1 || f.workers > 256) throw ConfigError("--workers must lie in [1, 256]");
    if (f.format != "csv" && f.format != "json") throw ConfigError("--format must be csv or json");
    if (!f.range.empty()) parse_range(f.range);
}

/// Splits `doc` into the entries named in `keep` and the remainder.
json take(json& doc, std::initializer_list<const char*> keys) {
    json taken = json::object();
    for (const char* k : keys) {
        if (doc.contains(k)) {
            taken[k] = doc[k];
            doc.erase(k);
        }
    }
    return taken;
}

/// Applies --step and --ladder-depth to the keys present in `params`.
json flag_overrides(const Flags& f, const ojson& defaults) {
    json o = json::object();
    if (f.step && defaults.contains("scan")) o["scan"] = {{"tau_step", *f.step}, {"window_step", *f.step}};
    if (f.ladder_depth && defaults.contains("ladder_depth")) o["ladder_depth"] = *f.ladder_depth;
    return o;
}

/// Config entries first, flags on top.
json combine(json config, const json& flags) {
    config.merge_patch(flags);
    return config;
}

ScanOptions scan_options(const ojson& params, unsigned workers) {
    ScanOptions o;
    o.tau_step = params.at("scan").at("tau_step").get<double>();
    o.workers = workers;
    if (!(o.tau_step > 0.0)) throw ConfigError("scan.tau_step must be positive");
    return o;
}

double window_step(const ojson& params) {
    const double s = params.at("scan").at("window_step").get<double>();
    if (!(s > 0.0)) throw ConfigError("scan.window_step must be positive");
    return s;
}

void emit(const Report& r, const Flags& f, std::ostream& out) {
    const fs::path dir = output_dir(f);
    r.write(dir, f.format == "csv");
    out << "wrote " << (dir / (r.id + ".json")).string() << '\n';
}

// --------------------------------------------------------------- analyze

ojson analyze_defaults() {
    return {{"ladder_depth", 2},
            {"s_cap", 1e6},
            {"gap_fraction", 0.05},
            {"modulus_window", 5},
            {"modulus_deltas", {0.01, 0.1, 0.5}},
            {"net_eps", 0.1},
            {"net_range", {0, 100}},
            {"net_step", 0.01},
            {"ergodic_horizons", {10, 100}},
            {"ergodic_probes", {0, 10}},
            {"ergodic_tol", 1e-2},
            {"scan", {{"tau_step", 0.01}, {"window_step", 0.01}}}};
}

int cmd_analyze(const Flags& f, std::ostream& out) {
    json config = load_config(f);
    json special = take(config, {"signal"});
    if (f.inputs.size() > 1) throw ConfigError("analyze takes one signal");
    if (!f.inputs.empty()) special["signal"] = signal_argument(f.inputs.front());
    if (!special.contains("signal")) throw ConfigError("analyze needs a signal (argument or config 'signal')");
    const json sig_doc = signal_document(special["signal"]);
    const Signal sig = signal_from_json(sig_doc);

    const auto defaults = analyze_defaults();
    json flags = flag_overrides(f, defaults);
    if (!f.range.empty()) flags["s_cap"] = parse_range(f.range).hi;
    const json overrides = combine(config, flags);
    const ojson p = merge_parameters(defaults, overrides, "analyze");

    Report r("analyze");
    r.parameters = p;
    r.parameters["signal"] = ojson::parse(signal_to_json(sig).dump());
    r.provenance = {{"quad_tol", kDefaultQuadTol}, {"overrides", ojson::parse(overrides.dump())}};

    LadderPolicy policy;
    policy.window_step = window_step(p);
    policy.scan = scan_options(p, f.workers);
    policy.s_cap = p.at("s_cap").get<double>();
    policy.gap_fraction = p.at("gap_fraction").get<double>();
    if (!(policy.s_cap > 0.0) || !(policy.gap_fraction > 0.0))
        throw ConfigError("analyze: s_cap and gap_fraction must be positive");
    const int depth = p.at("ladder_depth").get<int>();
    if (depth < 1) throw ConfigError("analyze: ladder_depth must be at least 1");
    const auto ladder = recurrence_ladder(sig, depth, policy);
    auto& lt = r.table("ladder", {"rung", "eps", "window_lo", "window_hi", "range", "members", "max_gap",
                                  "gap_bound", "passed"});
    for (const auto& rung : ladder.rungs)
        lt.add({rung.n, rung.eps, rung.window.lo, rung.window.hi, rung.range, rung.members, num(rung.max_gap),
                rung.gap_bound, rung.passed});
    r.provenance["classification"] = ladder.describe();

    auto& mt = r.table("modulus", {"delta", "modulus"});
    const auto mod = uc_modulus(sig, ProbeWindow::symmetric(p.at("modulus_window").get<double>(), window_step(p)),
                                p.at("modulus_deltas").get<std::vector<double>>());
    for (const auto& e : mod) mt.add({e.delta, e.modulus});

    const auto net_range = p.at("net_range").get<std::vector<double>>();
    const double net_step = p.at("net_step").get<double>();
    if (net_range.size() != 2 || !(net_range[1] > net_range[0]) || !(net_step > 0.0))
        throw ConfigError("analyze: net_range must be [lo, hi] with lo < hi and net_step > 0");
    const auto count = static_cast<std::size_t>((net_range[1] - net_range[0]) / net_step) + 1;
    const double net_eps = p.at("net_eps").get<double>();
    auto& nt = r.table("range_net", {"eps", "t_lo", "t_hi", "step", "net_size"});
    nt.add({net_eps, net_range[0], net_range[1], net_step, range_net(sig, net_range[0], net_step, count, net_eps)});

    const auto erg = ergodic_mean(sig, p.at("ergodic_horizons").get<std::vector<double>>(),
                                  p.at("ergodic_probes").get<std::vector<double>>(),
                                  p.at("ergodic_tol").get<double>());
    auto& et = r.table("ergodic", {"horizon", "deviation"});
    const auto horizons = p.at("ergodic_horizons").get<std::vector<double>>();
    for (std::size_t i = 0; i < horizons.size(); ++i) et.add({horizons[i], erg.deviations[i]});
    auto& em = r.table("ergodic_mean", {"component", "re", "im", "ergodic"});
    for (std::size_t c = 0; c < erg.mean.size(); ++c) em.add({c, erg.mean[c].real(), erg.mean[c].imag(), erg.ergodic});

    out << "classification: " << ladder.describe() << '\n';
    emit(r, f, out);
    return kOk;
}

// ------------------------------------------------------------------ scan

ojson scan_defaults() {
    return {{"eps", 0.1},
            {"window", {-2, 2}},
            {"probes", ojson::array()},
            {"range", {0, 100}},
            {"scan", {{"tau_step", 0.01}, {"window_step", 0.01}}}};
}

int cmd_scan(const Flags& f, std::ostream& out) {
    json config = load_config(f);
    json special = take(config, {"signal"});
    if (f.inputs.size() > 1) throw ConfigError("scan takes one signal");
    if (!f.inputs.empty()) special["signal"] = signal_argument(f.inputs.front());
    if (!special.contains("signal")) throw ConfigError("scan needs a signal (argument or config 'signal')");
    const Signal sig = signal_from_json(signal_document(special["signal"]));

    const auto defaults = scan_defaults();
    json flags = flag_overrides(f, defaults);
    if (!f.range.empty()) {
        const Interval rr = parse_range(f.range);
        flags["range"] = {rr.lo, rr.hi};
    }
    const json overrides = combine(config, flags);
    const ojson p = merge_parameters(defaults, overrides, "scan");
    const auto range = p.at("range").get<std::vector<double>>();
    const auto win = p.at("window").get<std::vector<double>>();
    if (range.size() != 2 || win.size() != 2) throw ConfigError("scan: range and window must be [lo, hi]");
    const double eps = p.at("eps").get<double>();
    const auto probes = p.at("probes").get<std::vector<double>>();
    const auto opt = scan_options(p, f.workers);
    const AlmostPeriodSet set =
        probes.empty() ? almost_period_set(sig, eps, ProbeWindow::interval(win[0], win[1], window_step(p)),
                                           {range[0], range[1]}, opt)
                       : discrete_period_scan(sig, eps, probes, {range[0], range[1]}, opt);

    Report r("scan");
    r.parameters = p;
    r.parameters["signal"] = ojson::parse(signal_to_json(sig).dump());
    r.provenance = {{"refined", set.refined}, {"quad_tol", kDefaultQuadTol},
                    {"overrides", ojson::parse(overrides.dump())}};
    auto& ct = r.table("candidates", {"tau", "sup_dist", "accepted"});
    for (const auto& c : set.candidates) ct.add({c.tau, c.refined_sup, c.accepted});
    auto& st = r.table("summary", {"eps", "range_lo", "range_hi", "step", "members", "max_gap"});
    st.add({set.eps, set.range.lo, set.range.hi, set.step, set.members.size(), num(set.max_gap)});
    out << "members: " << set.members.size() << ", max_gap: " << num(set.max_gap).dump() << '\n';
    emit(r, f, out);
    return kOk;
}

// ----------------------------------------------------------------- solve

ojson solve_defaults() {
    return {{"solver", "green"}, {"horizon", 100}, {"step", 0.01}, {"alpha", 0},
            {"dichotomy_floor", 1e-3}, {"tail_mass", 1e-8}};
}

std::vector<CVector> initial_data(const json& doc, std::size_t block) {
    if (!doc.is_array()) throw ConfigError("solve: 'init' must list y(alpha), y'(alpha), ...");
    std::vector<CVector> init;
    for (const auto& v : doc) {
        // Scalar shorthand: a number or an [re, im] pair per order.
        if (block == 1 && (v.is_number() || (v.is_array() && v.size() == 2 && v[0].is_number())))
            init.push_back({complex_from_json(v)});
        else
            init.push_back(cvector_from_json(v));
    }
    return init;
}

int cmd_solve(const Flags& f, std::ostream& out) {
    json config = load_config(f);
    json special = take(config, {"system", "forcing", "init"});
    if (!f.inputs.empty()) {
        if (f.inputs.size() > 1) throw ConfigError("solve takes one forcing signal");
        special["forcing"] = signal_argument(f.inputs.front());
    }
    if (!special.contains("system")) throw ConfigError("solve needs 'system' in the config");
    const OdeSystem ode = ode_from_json(special["system"]);
    const Signal forcing = special.contains("forcing") ? signal_from_json(signal_document(special["forcing"]))
                                                       : Signal::zero(ode.block);
    if (forcing.dim() != ode.block) throw ConfigError("solve: forcing dimension differs from the system block");

    const auto defaults = solve_defaults();
    json flags = json::object();
    if (f.step) flags["step"] = *f.step;
    if (!f.range.empty()) flags["horizon"] = parse_range(f.range).hi;
    const json overrides = combine(config, flags);
    const ojson p = merge_parameters(defaults, overrides, "solve");
    const std::string solver = p.at("solver").get<std::string>();
    const double horizon = p.at("horizon").get<double>();
    const double step = p.at("step").get<double>();
    if (!(horizon > 0.0) || !(step > 0.0)) throw ConfigError("solve: horizon and step must be positive");

    Report r("solve");
    r.parameters = p;
    r.parameters["system"] = ojson::parse(ode_to_json(ode).dump());
    r.parameters["forcing"] = ojson::parse(signal_to_json(forcing).dump());
    r.provenance = {{"overrides", ojson::parse(overrides.dump())}};

    auto& sp = r.table("spectrum", {"re", "im", "multiplicity", "residual"});
    for (const auto& root : spectrum(ode))
        sp.add({root.value.real(), root.value.imag(), root.multiplicity, root.residual});

    std::optional<Trajectory> traj;
    if (solver == "green") {
        if (special.contains("init")) throw ConfigError("solve: 'init' applies to the ivp solver only");
        GreenOptions g;
        g.step = step;
        g.dichotomy_floor = p.at("dichotomy_floor").get<double>();
        g.tail_mass = p.at("tail_mass").get<double>();
        const auto info = green_kernel_info(ode, g);
        traj.emplace(green_bounded_solve(ode, forcing, horizon, g));
        auto& kt = r.table("kernel", {"min_abs_re", "kernel_scale", "tail", "kernel_l1"});
        kt.add({info.min_abs_re, info.kernel_scale, info.tail, info.kernel_l1});
    } else if (solver == "ivp") {
        if (!special.contains("init")) throw ConfigError("solve: the ivp solver needs 'init'");
        traj.emplace(ivp_halfline_solve(ode, forcing, initial_data(special["init"], ode.block),
                                        p.at("alpha").get<double>(), horizon, step));
    } else {
        throw ConfigError("solve: solver must be green or ivp");
    }

    auto& st = r.table("summary", {"solver", "t_start", "t_end", "samples", "residual", "sup_y", "grows"});
    st.add({traj->solver, traj->t0(), traj->t_end(), traj->count(), traj->error_estimate, traj->sup(0),
            traj->grows(0)});
    r.provenance["trajectory"] = ojson::parse(trajectory_meta(*traj).dump());
    out << "residual ||Ly - f||: " << num(traj->error_estimate).dump() << ", sup |y|: " << num(traj->sup(0)).dump()
        << (traj->grows(0) ? " (growing)" : "") << '\n';
    emit(r, f, out);
    if (f.format == "csv") {
        const fs::path path = output_dir(f) / "solve_trajectory.csv";
        std::ofstream csv(path, std::ios::binary);
        if (!csv) throw ConfigError("cannot write " + path.string());
        write_trajectory_csv(csv, *traj);
        out << "wrote " << path.string() << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Flags& f, std::ostream& out) {
    if (!f.range.empty()) throw ConfigError("verify: set experiment ranges through --config");
    const json config = load_config(f);
    std::vector<std::string> names;
    for (const auto& n : f.inputs) {
        if (n == "all") {
            for (const auto& e : experiment_registry()) names.push_back(e.name);
        } else {
            find_experiment(n);
            names.push_back(n);
        }
    }
    if (names.empty()) throw ConfigError("verify needs experiment names or 'all'");
    for (const auto& [key, value] : config.items()) {
        find_experiment(key);
        if (!value.is_object()) throw ConfigError("verify config: '" + key + "' must map to an object");
    }

    RunContext ctx;
    ctx.workers = f.workers;
    bool all_passed = true;
    for (const auto& name : names) {
        const auto& entry = find_experiment(name);
        const json base = config.contains(name) ? config.at(name) : json::object();
        const Report r = run_experiment(name, combine(base, flag_overrides(f, entry.defaults)), ctx);
        out << r.summary();
        emit(r, f, out);
        all_passed = all_passed && r.passed();
    }
    return all_passed ? kOk : kVerdictFailed;
}

// ---------------------------------------------------------------- report

int cmd_report(const Flags& f, std::ostream& out) {
    if (f.inputs.empty()) throw ConfigError("report needs one or more saved report files");
    bool all_passed = true;
    for (const auto& path : f.inputs) {
        ojson doc;
        try {
            doc = ojson::parse(read_file(path));
        } catch (const ojson::parse_error& e) {
            throw ConfigError(path + ": " + e.what());
        }
        const Report r = Report::from_json(doc);
        out << r.summary();
        emit(r, f, out);
        all_passed = all_passed && r.passed();
    }
    return all_passed ? kOk : kVerdictFailed;
}

void add_common(CLI::App* cmd, Flags& f, const char* inputs_help) {
    cmd->add_option("inputs", f.inputs, inputs_help);
    cmd->add_option("--config", f.config, "JSON config document");
    cmd->add_option("--out", f.out, std::string("output directory (default $") + kOutEnv + " or ./reclab_out)");
    cmd->add_option("--step", f.step, "grid step for scans or solves");
    cmd->add_option("--range", f.range, "HI or LO,HI");
    cmd->add_option("--ladder-depth", f.ladder_depth, "recurrence ladder depth");
    cmd->add_option("--workers", f.workers, "worker threads for scans");
    cmd->add_option("--format", f.format, "csv (JSON report plus CSV tables) or json (JSON only)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"reclab: recurrence analysis of signals and bounded solutions"};
    app.require_subcommand(1);
    Flags f;
    struct Command {
        const char* name;
        const char* help;
        const char* inputs;
        int (*fn)(const Flags&, std::ostream&);
    };
    const Command commands[] = {
        {"analyze", "classify a signal: ladder, uc modulus, range net, ergodic mean", "signal name, descriptor or file",
         cmd_analyze},
        {"scan", "scan the almost-period set of a signal", "signal name, descriptor or file", cmd_scan},
        {"solve", "solve a constant-coefficient ODE system", "forcing signal", cmd_solve},
        {"verify", "run registry experiments and check their verdicts", "experiment names or 'all'", cmd_verify},
        {"report", "re-emit saved reports and their verdict summaries", "report JSON files", cmd_report},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_common(sub, f, c.inputs);
        subs.push_back(sub);
    }

    std::vector<std::string> argv{"reclab"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::vector<const char*> ptrs;
    for (const auto& a : argv) ptrs.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(ptrs.size()), ptrs.data());
    } catch (const CLI::ParseError& e) {
        // Prints help for --help and a diagnostic otherwise.
        return app.exit(e, out, err) == 0 ? kOk : kConfigError;
    }

    try {
        validate(f);
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) return commands[i].fn(f, out);
        return kConfigError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericGuardError& e) {
        err << "numeric guard: " << e.what() << '\n';
        return kNumericGuard;
    } catch (const HypothesisError& e) {
        err << "outside hypotheses: " << e.what() << '\n';
        return kHypothesis;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace reclab::cli
