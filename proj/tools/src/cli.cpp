#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tandemfluid/format.hpp"
#include "tandemfluid/spectral.hpp"
#include "tandemfluid/stability.hpp"

namespace tandemfluid::cli {

namespace {

using nlohmann::ordered_json;

struct Output {
    ordered_json doc;
    std::string csv;
    int code = kOk;
};

// Rounds every floating-point leaf to 12 significant digits.
void round_numbers(ordered_json& j) {
    if (j.is_number_float()) {
        j = round_significant(j.get<double>());
    } else if (j.is_structured()) {
        for (auto& child : j) round_numbers(child);
    }
}

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string row;
    for (const auto& c : cells) {
        if (!row.empty()) row += ',';
        row += c;
    }
    return row + '\n';
}

std::string num(double x) { return format_number(x); }

template <class T>
std::string num_or(const std::optional<T>& x, const char* fallback) {
    return x ? num(*x) : fallback;
}

template <class T>
ordered_json json_or(const std::optional<T>& x, const char* fallback) {
    return x ? ordered_json(*x) : ordered_json(fallback);
}

ordered_json optional_json(const std::optional<double>& x) {
    return x ? ordered_json(*x) : ordered_json(nullptr);
}

ordered_json params_json(const SystemParams& p) {
    return {{"v", p.v},          {"u1", p.u1}, {"u2", p.u2},
            {"lambda", p.lambda}, {"mu", p.mu}, {"theta", p.theta}};
}

ordered_json inflow_json(const InflowSpec& inflow) {
    if (const auto* c = std::get_if<ConstantInflow>(&inflow)) return {{"r", c->r}};
    const auto& m = std::get<ModeResponsiveInflow>(inflow);
    return {{"r1", m.r1}, {"r2", m.r2}};
}

ordered_json certificate_json(const StabilityCertificate& c) {
    return {{"a1", c.a1}, {"a2", c.a2}, {"b1", c.b1}, {"b2", c.b2},
            {"c", c.c},   {"d", c.d},   {"queue_bound", c.queue_bound()}};
}

ordered_json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"std_error", e.std_error}}; }

void require_valid(const RunConfig& cfg) {
    if (auto rep = validate_params(cfg.params); !rep) throw ModelError(rep.violations.front());
}

// Flags shared by every subcommand; unset flags leave the preset/config values alone.
struct Flags {
    std::string preset;
    std::string config;
    std::optional<double> v, u1, u2, lambda, mu, theta, r, r1, r2, horizon, warmup, tol;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replications;
    std::optional<unsigned> threads;
    std::string format = "json";
    std::string out;
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--preset", f.preset, "nominal, paper-split, paper-merge, paper-s1 or paper-s2");
    app->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--v", f.v, "upstream capacity");
    app->add_option("--u1", f.u1, "high downstream capacity");
    app->add_option("--u2", f.u2, "low downstream capacity");
    app->add_option("--lambda", f.lambda, "High -> Low switching rate");
    app->add_option("--mu", f.mu, "Low -> High switching rate");
    app->add_option("--theta", f.theta, "downstream buffer size");
    app->add_option("--r", f.r, "constant inflow");
    app->add_option("--r1", f.r1, "inflow in the High mode");
    app->add_option("--r2", f.r2, "inflow in the Low mode");
    app->add_option("--seed", f.seed, "RNG seed");
    app->add_option("--horizon", f.horizon, "simulated time per replication");
    app->add_option("--warmup", f.warmup, "time excluded from statistics");
    app->add_option("--replications", f.replications, "independent replications");
    app->add_option("--threads", f.threads, "worker threads (0 = automatic)");
    app->add_option("--tol", f.tol, "bisection tolerance");
    app->add_option("--format", f.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--out", f.out, "output file (default stdout)");
}

RunConfig resolve(const Flags& f) {
    RunConfig cfg;
    apply_preset(cfg, f.preset.empty() ? "nominal" : f.preset);
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw ModelError("cannot read config file " + f.config);
        std::stringstream text;
        text << in.rdbuf();
        apply_config_json(cfg, text.str());
    }
    const auto set = [](auto& target, const auto& source) {
        if (source) target = *source;
    };
    set(cfg.params.v, f.v);
    set(cfg.params.u1, f.u1);
    set(cfg.params.u2, f.u2);
    set(cfg.params.lambda, f.lambda);
    set(cfg.params.mu, f.mu);
    set(cfg.params.theta, f.theta);
    if (f.r) {
        cfg.r = f.r;
        cfg.r1.reset();
        cfg.r2.reset();
    }
    if (f.r1) cfg.r1 = f.r1;
    if (f.r2) cfg.r2 = f.r2;
    if (f.r1 && f.r2 && !f.r) cfg.r.reset();
    set(cfg.sim.seed, f.seed);
    set(cfg.sim.horizon, f.horizon);
    set(cfg.sim.warmup, f.warmup);
    set(cfg.sim.replications, f.replications);
    set(cfg.sim.threads, f.threads);
    set(cfg.tol, f.tol);
    cfg.format = f.format;
    cfg.out = f.out;
    return cfg;
}

bool feedback(const RunConfig& cfg) { return !cfg.r && cfg.r1 && cfg.r2; }

// check: necessary and sufficient verdicts with the certificate.
Output cmd_check(const RunConfig& cfg) {
    require_valid(cfg);
    const auto inflow = inflow_of(cfg);
    const bool fb = feedback(cfg);
    const double r1 = fb ? *cfg.r1 : *cfg.r, r2 = fb ? *cfg.r2 : *cfg.r;
    const auto nec = fb ? check_necessary_feedback(r1, r2, cfg.params) : check_necessary(r1, cfg.params);
    const auto cert = check_sufficient_feedback(r1, r2, cfg.params);

    Output o;
    o.doc = {{"command", "check"},
             {"params", params_json(cfg.params)},
             {"inflow", inflow_json(inflow)},
             {"necessary",
              {{"prerequisite_ok", nec.prerequisite_ok},
               {"lhs", nec.lhs},
               {"p_hat", optional_json(nec.p_hat)},
               {"rhs", optional_json(nec.rhs)},
               {"holds", nec.holds}}},
             {"sufficient",
              {{"feasible", cert.has_value()},
               {"certificate", cert ? certificate_json(*cert) : ordered_json(nullptr)}}}};
    o.csv = csv_row({"field", "value"});
    o.csv += csv_row({"necessary_prerequisite_ok", nec.prerequisite_ok ? "true" : "false"});
    o.csv += csv_row({"necessary_lhs", num(nec.lhs)});
    o.csv += csv_row({"necessary_p_hat", num_or(nec.p_hat, "")});
    o.csv += csv_row({"necessary_rhs", num_or(nec.rhs, "")});
    o.csv += csv_row({"necessary_holds", nec.holds ? "true" : "false"});
    o.csv += csv_row({"sufficient_feasible", cert ? "true" : "false"});
    if (cert) {
        o.csv += csv_row({"a1", num(cert->a1)});
        o.csv += csv_row({"a2", num(cert->a2)});
        o.csv += csv_row({"b1", num(cert->b1)});
        o.csv += csv_row({"b2", num(cert->b2)});
        o.csv += csv_row({"c", num(cert->c)});
        o.csv += csv_row({"d", num(cert->d)});
        o.csv += csv_row({"queue_bound", num(cert->queue_bound())});
    }
    return o;
}

Topology topology_of(const RunConfig& cfg) {
    if (cfg.topology == "two-link") return TwoLink{};
    if (cfg.topology == "single-finite") return SingleFinite{};
    if (cfg.topology == "single-infinite") return SingleInfinite{};
    if (cfg.topology == "merge") return Merge{cfg.v1, cfg.v2, cfg.merge_r2};
    if (cfg.topology == "split") return Split{cfg.v1, cfg.v2};
    throw ModelError("unknown topology '" + cfg.topology + "'");
}

Output cmd_simulate(const RunConfig& cfg, const std::string& trajectory) {
    const auto topo = topology_of(cfg);
    const auto inflow = inflow_of(cfg);
    const auto stats = simulate(topo, inflow, cfg.params, cfg.sim);
    if (!trajectory.empty()) {
        std::string rows = trajectory_header(topo);
        (void)simulate_replication(topo, inflow, cfg.params, cfg.sim, 0, trajectory_writer(topo, rows));
        std::ofstream file(trajectory, std::ios::binary);
        if (!file) throw ModelError("cannot write trajectory file " + trajectory);
        file << rows;
    }

    const std::pair<const char*, const Estimate*> fields[] = {
        {"time_avg_total_queue", &stats.time_avg_total_queue},
        {"frac_time_q2_full", &stats.frac_time_q2_full},
        {"frac_time_q1_zero", &stats.frac_time_q1_zero},
        {"frac_time_mode1", &stats.frac_time_mode[0]},
        {"frac_time_mode2", &stats.frac_time_mode[1]},
        {"terminal_q_over_t", &stats.terminal_q_over_t},
        {"mean_throughput", &stats.mean_throughput},
    };
    Output o;
    o.doc = {{"command", "simulate"},
             {"topology", topology_name(topo)},
             {"params", params_json(cfg.params)},
             {"inflow", inflow_json(inflow)},
             {"seed", cfg.sim.seed},
             {"horizon", cfg.sim.horizon},
             {"warmup", cfg.sim.warmup},
             {"replications", cfg.sim.replications}};
    if (std::holds_alternative<Merge>(topo) || std::holds_alternative<Split>(topo)) {
        o.doc["network"] = {{"v1", cfg.v1}, {"v2", cfg.v2}};
        if (std::holds_alternative<Merge>(topo)) o.doc["network"]["merge_r2"] = cfg.merge_r2;
    }
    ordered_json stats_json;
    o.csv = csv_row({"statistic", "mean", "std_error"});
    for (const auto& [name, est] : fields) {
        stats_json[name] = estimate_json(*est);
        o.csv += csv_row({name, num(est->mean), num(est->std_error)});
    }
    o.doc["stats"] = stats_json;
    return o;
}

Output cmd_throughput(const RunConfig& cfg) {
    const auto b = throughput_bounds(cfg.params, cfg.tol);
    Output o;
    o.doc = {{"command", "throughput"},
             {"params", params_json(cfg.params)},
             {"upper", b.upper},
             {"lower", b.lower},
             {"tol", b.tol}};
    o.csv = csv_row({"upper", "lower", "tol"}) + csv_row({num(b.upper), num(b.lower), num(b.tol)});
    return o;
}

Output cmd_sweep(const RunConfig& cfg, const std::string& parameter, const std::vector<double>& values) {
    const auto which = parse_sweep_parameter(parameter);
    if (values.empty()) throw ModelError("sweep needs at least one value");
    const auto rows = sweep(cfg.params, which, values, cfg.tol);
    Output o;
    o.doc = {{"command", "sweep"}, {"parameter", to_string(which)}, {"tol", cfg.tol}};
    o.doc["rows"] = ordered_json::array();
    o.csv = csv_row({"parameter", "value", "upper", "lower"});
    for (const auto& row : rows) {
        o.doc["rows"].push_back({{"value", row.value}, {"upper", row.upper}, {"lower", row.lower}});
        o.csv += csv_row({to_string(row.parameter), num(row.value), num(row.upper), num(row.lower)});
    }
    return o;
}

Output cmd_theta_min(const RunConfig& cfg) {
    if (!cfg.r) throw ModelError("theta-min needs --r");
    const auto t = theta_min(*cfg.r, cfg.params, cfg.tol);
    Output o;
    o.doc = {{"command", "theta-min"},
             {"params", params_json(cfg.params)},
             {"r", *cfg.r},
             {"theta_min", json_or(t, "none-within-cap")},
             {"theta_cap", kThetaCap},
             {"tol", cfg.tol}};
    o.csv = csv_row({"r", "theta_min"}) + csv_row({num(*cfg.r), num_or(t, "none-within-cap")});
    return o;
}

Output cmd_resilience(const RunConfig& cfg, std::vector<double> r_hats, double theta_hat) {
    if (r_hats.empty()) {
        if (cfg.r) {
            r_hats.push_back(*cfg.r);
        } else {
            // Default grid spanning the certified region of the nominal system.
            for (int k = 0; k <= 20; ++k) r_hats.push_back(0.6 + 0.005 * k);
        }
    }
    const auto curve = resilience_curve(r_hats, theta_hat, cfg.params, cfg.tol);
    Output o;
    o.doc = {{"command", "resilience"},
             {"params", params_json(cfg.params)},
             {"theta_hat", theta_hat},
             {"tol", cfg.tol}};
    o.doc["rows"] = ordered_json::array();
    o.csv = csv_row({"r_hat", "theta_hat", "theta_min", "alpha"});
    for (const auto& row : curve) {
        o.doc["rows"].push_back({{"r_hat", row.r_hat},
                                 {"theta_min", json_or(row.theta_min, "none-within-cap")},
                                 {"alpha", json_or(row.alpha, "no-guarantee")}});
        o.csv += csv_row({num(row.r_hat), num(row.theta_hat), num_or(row.theta_min, "none-within-cap"),
                          num_or(row.alpha, "no-guarantee")});
    }
    return o;
}

Output cmd_invariant(const RunConfig& cfg, std::optional<double> f_flag, std::size_t bins) {
    require_valid(cfg);
    const double f = f_flag ? *f_flag : cfg.r ? *cfg.r : throw ModelError("invariant needs --f or --r");
    Output o;
    o.doc = {{"command", "invariant"}, {"params", params_json(cfg.params)}, {"f", f},
             {"stable", bpdq_is_stable(f, cfg.params)}};
    if (!bpdq_is_stable(f, cfg.params)) {
        o.csv = csv_row({"field", "value"}) + csv_row({"stable", "false"});
        o.code = kInfeasible;
        return o;
    }
    const auto m = bpdq_invariant_measure(f, cfg.params);
    // Empirical law from replication 0; the range covers all but 1e-9 of the mass.
    const double x_max = std::max(std::log((m.a1 + m.a2) / m.s / 1e-9) / m.s, 1e-6);
    OccupationMeasure occ(x_max, bins);
    SimConfig sim = cfg.sim;
    const auto stats = simulate_replication(SingleInfinite{}, ConstantInflow{f}, cfg.params, sim, 0,
                                            [&](const Segment& s) {
                                                if (s.t1 <= sim.warmup) return;
                                                const double t0 = std::max(s.t0, sim.warmup);
                                                occ.add(s.start.q[0] + s.flows.dq[0] * (t0 - s.t0),
                                                        s.flows.dq[0], s.t1 - t0);
                                            });
    const double ks = occ.ks_distance([&](double x) { return m.cdf(x); });
    o.doc["measure"] = {{"z1", m.z1},   {"a1", m.a1},
                        {"a2", m.a2},   {"s", m.s},
                        {"total_mass", m.total_mass()}, {"mean", m.mean()}};
    o.doc["empirical"] = {{"horizon", sim.horizon},
                          {"seed", sim.seed},
                          {"atom", occ.atom_at_zero()},
                          {"mean", stats.time_avg_total_queue},
                          {"ks_distance", ks}};
    o.csv = csv_row({"field", "value"});
    for (const auto& [k, v] : {std::pair{"z1", m.z1}, {"a1", m.a1}, {"a2", m.a2}, {"s", m.s},
                               {"total_mass", m.total_mass()}, {"mean", m.mean()},
                               {"empirical_atom", occ.atom_at_zero()},
                               {"empirical_mean", stats.time_avg_total_queue}, {"ks_distance", ks}}) {
        o.csv += csv_row({k, num(v)});
    }
    return o;
}

Output cmd_verify_drift(const RunConfig& cfg, const DriftGrid& grid) {
    require_valid(cfg);
    const auto inflow = inflow_of(cfg);
    const bool fb = feedback(cfg);
    const double r1 = fb ? *cfg.r1 : *cfg.r, r2 = fb ? *cfg.r2 : *cfg.r;
    Output o;
    o.doc = {{"command", "verify-drift"}, {"params", params_json(cfg.params)}, {"inflow", inflow_json(inflow)}};
    const auto cert = check_sufficient_feedback(r1, r2, cfg.params);
    if (!cert) {
        o.doc["certificate"] = nullptr;
        o.csv = csv_row({"field", "value"}) + csv_row({"certificate", "infeasible"});
        o.code = kInfeasible;
        return o;
    }
    const auto rep = verify_drift(*cert, inflow, cfg.params, grid);
    static constexpr const char* regions[] = {"high_q2_empty", "high_q2_positive", "low_q2_below_theta",
                                              "low_q2_full", "q1_empty"};
    ordered_json region_json;
    for (std::size_t k = 0; k < rep.region_max.size(); ++k) region_json[regions[k]] = rep.region_max[k];
    o.doc["certificate"] = certificate_json(*cert);
    o.doc["drift"] = {{"pass", rep.pass},
                      {"max_excess", rep.max_excess},
                      {"worst", {{"mode", mode_index(rep.worst_mode) + 1}, {"q1", rep.worst_q1}, {"q2", rep.worst_q2}}},
                      {"region_max", region_json},
                      {"points", rep.points}};
    o.csv = csv_row({"field", "value"});
    o.csv += csv_row({"pass", rep.pass ? "true" : "false"});
    o.csv += csv_row({"max_excess", num(rep.max_excess)});
    for (std::size_t k = 0; k < rep.region_max.size(); ++k) o.csv += csv_row({regions[k], num(rep.region_max[k])});
    o.csv += csv_row({"points", std::to_string(rep.points)});
    if (!rep.pass) o.code = kInfeasible;
    return o;
}

}  // namespace

void apply_preset(RunConfig& cfg, const std::string& name) {
    cfg.params = SystemParams::nominal();
    if (name == "nominal") return;
    if (name == "paper-s1") {
        cfg.r = 0.625;
    } else if (name == "paper-s2") {
        cfg.r.reset();
        cfg.r1 = 0.75;
        cfg.r2 = 0.5;
    } else if (name == "paper-split") {
        cfg.params.theta = 0.0;
        cfg.topology = "split";
        cfg.r = 1.6;
        cfg.v1 = 2.0;
        cfg.v2 = 1.0;
    } else if (name == "paper-merge") {
        // Total inflow 0.4 < u2 sent mostly to link 1, which exceeds v1 = 0.3.
        cfg.topology = "merge";
        cfg.v1 = 0.3;
        cfg.v2 = 0.5;
        cfg.r = 0.35;
        cfg.merge_r2 = 0.05;
    } else {
        throw ModelError("unknown preset '" + name + "'");
    }
}

void apply_config_json(RunConfig& cfg, const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw ModelError(std::string("malformed config: ") + e.what());
    }
    if (!doc.is_object()) throw ModelError("config must be a JSON object");
    const auto number = [](const ordered_json& v, const std::string& key) {
        if (!v.is_number()) throw ModelError("config key '" + key + "' must be a number");
        return v.get<double>();
    };
    for (const auto& [key, value] : doc.items()) {
        if (key == "v") cfg.params.v = number(value, key);
        else if (key == "u1") cfg.params.u1 = number(value, key);
        else if (key == "u2") cfg.params.u2 = number(value, key);
        else if (key == "lambda") cfg.params.lambda = number(value, key);
        else if (key == "mu") cfg.params.mu = number(value, key);
        else if (key == "theta") cfg.params.theta = number(value, key);
        else if (key == "r") cfg.r = number(value, key);
        else if (key == "r1") cfg.r1 = number(value, key);
        else if (key == "r2") cfg.r2 = number(value, key);
        else if (key == "horizon") cfg.sim.horizon = number(value, key);
        else if (key == "warmup") cfg.sim.warmup = number(value, key);
        else if (key == "tol") cfg.tol = number(value, key);
        else if (key == "v1") cfg.v1 = number(value, key);
        else if (key == "v2") cfg.v2 = number(value, key);
        else if (key == "merge_r2") cfg.merge_r2 = number(value, key);
        else if (key == "seed" || key == "replications") {
            if (!value.is_number_unsigned()) throw ModelError("config key '" + key + "' must be a non-negative integer");
            if (key == "seed") cfg.sim.seed = value.get<std::uint64_t>();
            else cfg.sim.replications = value.get<std::size_t>();
        } else {
            throw ModelError("unknown config key '" + key + "'");
        }
    }
    if (doc.contains("r1") && doc.contains("r2") && !doc.contains("r")) cfg.r.reset();
}

InflowSpec inflow_of(const RunConfig& cfg) {
    InflowSpec inflow;
    if (cfg.r) inflow = ConstantInflow{*cfg.r};
    else if (cfg.r1 && cfg.r2) inflow = ModeResponsiveInflow{*cfg.r1, *cfg.r2};
    else throw ModelError("an inflow is required: --r, or --r1 and --r2");
    if (auto rep = validate_inflow(inflow); !rep) throw ModelError(rep.violations.front());
    return inflow;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stability, throughput and simulation of a two-link fluid queue with spillback",
                 "tandemfluid"};
    app.require_subcommand(1);
    Flags flags;

    auto* check = app.add_subcommand("check", "necessary and sufficient stability verdicts");
    auto* simulate_cmd = app.add_subcommand("simulate", "event-driven Monte Carlo statistics");
    auto* throughput = app.add_subcommand("throughput", "upper and lower throughput bounds");
    auto* sweep_cmd = app.add_subcommand("sweep", "throughput bounds along one parameter");
    auto* theta_cmd = app.add_subcommand("theta-min", "smallest certified buffer size");
    auto* resilience = app.add_subcommand("resilience", "resilience margin alpha");
    auto* invariant = app.add_subcommand("invariant", "infinite-buffer invariant law vs simulation");
    auto* drift = app.add_subcommand("verify-drift", "grid check of the drift inequality");
    for (auto* sub : app.get_subcommands({})) add_common(sub, flags);

    std::optional<std::string> topology;
    std::optional<double> v1, v2, merge_r2;
    std::string trajectory;
    simulate_cmd->add_option("--topology", topology, "two-link, single-finite, single-infinite, merge or split")
        ->check(CLI::IsMember({"two-link", "single-finite", "single-infinite", "merge", "split"}));
    simulate_cmd->add_option("--v1", v1, "capacity of network link 1");
    simulate_cmd->add_option("--v2", v2, "capacity of network link 2");
    simulate_cmd->add_option("--merge-r2", merge_r2, "inflow to merge link 2");
    simulate_cmd->add_option("--trajectory", trajectory, "CSV dump of replication 0");

    std::string parameter;
    std::vector<double> values;
    sweep_cmd->add_option("--parameter", parameter, "delta_u, lambda_mu or theta")->required();
    sweep_cmd->add_option("--values", values, "comma-separated values")->delimiter(',')->required();

    std::vector<double> r_hats;
    double theta_hat = 1.0;
    resilience->add_option("--r-hat", r_hats, "comma-separated inflow estimates")->delimiter(',');
    resilience->add_option("--theta-hat", theta_hat, "estimated buffer size");

    std::optional<double> f_rate;
    std::size_t bins = 4000;
    invariant->add_option("--f", f_rate, "inflow rate of the infinite-buffer link");
    invariant->add_option("--bins", bins, "histogram bins for the KS distance")->check(CLI::PositiveNumber);

    DriftGrid grid;
    drift->add_option("--q1-points", grid.q1_points, "grid points along q1");
    drift->add_option("--q2-points", grid.q2_points, "grid points along q2");
    drift->add_option("--q1-max", grid.q1_max, "q1 range (0 = 20 theta + 10)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    try {
        RunConfig cfg = resolve(flags);
        if (topology) cfg.topology = *topology;
        if (v1) cfg.v1 = *v1;
        if (v2) cfg.v2 = *v2;
        if (merge_r2) cfg.merge_r2 = *merge_r2;

        Output o;
        if (check->parsed()) o = cmd_check(cfg);
        else if (simulate_cmd->parsed()) o = cmd_simulate(cfg, trajectory);
        else if (throughput->parsed()) o = cmd_throughput(cfg);
        else if (sweep_cmd->parsed()) o = cmd_sweep(cfg, parameter, values);
        else if (theta_cmd->parsed()) o = cmd_theta_min(cfg);
        else if (resilience->parsed()) o = cmd_resilience(cfg, r_hats, theta_hat);
        else if (invariant->parsed()) o = cmd_invariant(cfg, f_rate, bins);
        else o = cmd_verify_drift(cfg, grid);

        std::string text;
        if (cfg.format == "csv") {
            text = o.csv;
        } else {
            round_numbers(o.doc);
            text = o.doc.dump(2) + '\n';
        }
        if (cfg.out.empty()) {
            out << text;
        } else {
            std::ofstream file(cfg.out, std::ios::binary);
            if (!file) throw ModelError("cannot write output file " + cfg.out);
            file << text;
        }
        return o.code;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
}

}  // namespace tandemfluid::cli
