#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aic/controller.hpp"
#include "aic/csv.hpp"
#include "aic/dynamics.hpp"
#include "aic/ensemble.hpp"
#include "aic/linear_analysis.hpp"
#include "aic/ode.hpp"
#include "aic/parser.hpp"
#include "aic/ssa.hpp"

namespace aic {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct ScheduleEvent {
    double time = 0.0;
    std::string parameter;
    double value = 0.0;
};

struct SimSettings {
    std::size_t cells = 4000;
    double t_end = 60.0;
    double grid_dt = 0.1;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct BifurcationSettings {
    std::vector<double> k_grid;
    std::vector<double> eta_grid;
    double t_end = 3000.0;
    double tol = 1e-8;
    double grid_dt = 0.5;
    double tail_fraction = 0.25;
    double osc_k = 10.0;   // oscillatory-regime comparison point
    double osc_eta = 100.0;
};

/// A simulation experiment. See README for the JSON key schema.
struct Scenario {
    std::string name;
    std::string network_text;
    std::string network_source; // path as written in the file, for reports
    ControllerKind controller;
    std::map<std::string, Count> initial;
    std::vector<ScheduleEvent> schedule;
    SimSettings sim;
    std::filesystem::path outputs = "out";
    std::optional<std::pair<double, double>> rate_window;
    std::array<double, 4> metabolic_weights{1.0, 1.0, 1.0, 1.0};
    double adaptation_window = 5.0;
    std::optional<BifurcationSettings> bifurcation;

    /// Canonical JSON form; the manifest hash is computed over its dump.
    nlohmann::json canonical() const;
};

struct RunManifest {
    std::string version = kToolkitVersion;
    std::string scenario_hash;
    std::uint64_t master_seed = 0;
    double wall_clock_seconds = 0.0;
    std::vector<std::string> outputs;
};

namespace detail {

/// FNV-1a, 64 bit.
inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + p.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline nlohmann::json controller_json(const ControllerKind& c) {
    if (const auto* a = std::get_if<AntitheticSpec>(&c))
        return {{"type", "antithetic"}, {"mu", a->mu}, {"theta", a->theta}, {"eta", a->eta}, {"k", a->k}};
    if (const auto* h = std::get_if<HillSpec>(&c))
        return {{"type", "hill"}, {"alpha", h->alpha}, {"K", h->K}, {"n", h->n}};
    return {{"type", "none"}};
}

inline ControllerKind controller_from_json(const nlohmann::json& j) {
    const auto type = j.value("type", std::string("none"));
    if (type == "antithetic") {
        AntitheticSpec a{j.at("mu").get<double>(), j.at("theta").get<double>(), j.at("eta").get<double>(),
                         j.at("k").get<double>()};
        a.validate();
        return a;
    }
    if (type == "hill") {
        HillSpec h{j.at("alpha").get<double>(), j.at("K").get<double>(), j.at("n").get<int>()};
        h.validate();
        return h;
    }
    if (type == "none")
        return std::monostate{};
    throw std::invalid_argument("unknown controller type '" + type + "'");
}

inline std::vector<double> grid_from_json(const nlohmann::json& j) {
    // [lo, hi, n] log-spaced, or an explicit list with more than three entries
    auto v = j.get<std::vector<double>>();
    if (v.size() == 3 && v[2] == std::floor(v[2]) && v[2] >= 1.0 && v[0] <= v[1])
        return log_grid(v[0], v[1], static_cast<std::size_t>(v[2]));
    return v;
}

} // namespace detail

inline nlohmann::json Scenario::canonical() const {
    nlohmann::json j;
    j["name"] = name;
    j["network_text"] = network_text;
    j["controller"] = detail::controller_json(controller);
    j["initial"] = initial;
    nlohmann::json sched = nlohmann::json::array();
    for (const auto& e : schedule)
        sched.push_back({{"t", e.time}, {"param", e.parameter}, {"value", e.value}});
    j["schedule"] = sched;
    j["sim"] = {{"cells", sim.cells}, {"t_end", sim.t_end}, {"grid_dt", sim.grid_dt}, {"seed", sim.seed}};
    if (rate_window)
        j["rate_window"] = {rate_window->first, rate_window->second};
    j["metabolic_weights"] = metabolic_weights;
    j["adaptation_window"] = adaptation_window;
    if (bifurcation)
        j["bifurcation"] = {{"k", bifurcation->k_grid},
                            {"eta", bifurcation->eta_grid},
                            {"t_end", bifurcation->t_end},
                            {"tol", bifurcation->tol},
                            {"grid_dt", bifurcation->grid_dt},
                            {"tail_fraction", bifurcation->tail_fraction},
                            {"oscillatory_point", {{"k", bifurcation->osc_k}, {"eta", bifurcation->osc_eta}}}};
    return j;
}

inline void validate_scenario(const Scenario& s) {
    if (!(s.sim.t_end > 0.0) || !(s.sim.grid_dt > 0.0))
        throw std::invalid_argument("scenario needs positive t_end and grid_dt");
    if (s.sim.cells < 2)
        throw std::invalid_argument("scenario needs at least two cells");
    for (std::size_t i = 0; i < s.schedule.size(); ++i) {
        const double t = s.schedule[i].time;
        if (!(t > 0.0) || !(t < s.sim.t_end))
            throw std::invalid_argument("schedule times must lie in (0, t_end)");
        if (i > 0 && !(t > s.schedule[i - 1].time))
            throw std::invalid_argument("schedule times must be strictly increasing");
    }
    if (s.rate_window && !(s.rate_window->first < s.rate_window->second && s.rate_window->second <= s.sim.t_end))
        throw std::invalid_argument("rate_window must be an increasing pair inside [0, t_end]");
    std::visit([](const auto& c) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(c)>, std::monostate>)
            c.validate();
    }, s.controller);
}

/// Parses a scenario; relative network paths resolve against `base_dir`.
inline Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".") {
    Scenario s;
    s.name = j.value("name", std::string("scenario"));
    if (j.contains("network_text")) {
        s.network_text = j.at("network_text").get<std::string>();
        s.network_source = "<inline>";
    } else {
        const auto rel = j.at("network").get<std::string>();
        s.network_source = rel;
        std::filesystem::path p(rel);
        s.network_text = detail::read_file(p.is_absolute() ? p : base_dir / p);
    }
    if (j.contains("controller"))
        s.controller = detail::controller_from_json(j.at("controller"));
    if (j.contains("initial"))
        s.initial = j.at("initial").get<std::map<std::string, Count>>();
    if (j.contains("schedule"))
        for (const auto& e : j.at("schedule"))
            s.schedule.push_back({e.at("t").get<double>(), e.at("param").get<std::string>(), e.at("value").get<double>()});
    if (j.contains("sim")) {
        const auto& sim = j.at("sim");
        s.sim.cells = sim.value("cells", s.sim.cells);
        s.sim.t_end = sim.value("t_end", s.sim.t_end);
        s.sim.grid_dt = sim.value("grid_dt", s.sim.grid_dt);
        s.sim.seed = sim.value("seed", s.sim.seed);
        s.sim.threads = sim.value("threads", s.sim.threads);
    }
    s.outputs = j.value("outputs", std::string("out/") + s.name);
    if (j.contains("rate_window")) {
        auto w = j.at("rate_window").get<std::vector<double>>();
        if (w.size() != 2)
            throw std::invalid_argument("rate_window must have two entries");
        s.rate_window = std::pair{w[0], w[1]};
    }
    if (j.contains("metabolic_weights"))
        s.metabolic_weights = j.at("metabolic_weights").get<std::array<double, 4>>();
    s.adaptation_window = j.value("adaptation_window", s.adaptation_window);
    if (j.contains("bifurcation")) {
        const auto& b = j.at("bifurcation");
        BifurcationSettings bs;
        bs.k_grid = detail::grid_from_json(b.at("k"));
        bs.eta_grid = detail::grid_from_json(b.at("eta"));
        bs.t_end = b.value("t_end", bs.t_end);
        bs.tol = b.value("tol", bs.tol);
        bs.grid_dt = b.value("grid_dt", bs.grid_dt);
        bs.tail_fraction = b.value("tail_fraction", bs.tail_fraction);
        if (b.contains("oscillatory_point")) {
            bs.osc_k = b.at("oscillatory_point").at("k").get<double>();
            bs.osc_eta = b.at("oscillatory_point").at("eta").get<double>();
        }
        s.bifurcation = bs;
    }
    validate_scenario(s);
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    const auto j = nlohmann::json::parse(detail::read_file(path));
    return scenario_from_json(j, path.parent_path());
}

inline std::string scenario_hash(const Scenario& s) { return detail::fnv1a_hex(s.canonical().dump()); }

inline ClosedLoopNetwork build_closed_loop(const Scenario& s) {
    const auto open = parse_network(s.network_text);
    if (const auto* a = std::get_if<AntitheticSpec>(&s.controller))
        return augment_antithetic(open, *a);
    if (const auto* h = std::get_if<HillSpec>(&s.controller))
        return augment_hill(open, *h);
    return open_loop(open);
}

/// The closed loop in force during each schedule segment, starting at t=0.
inline std::vector<std::pair<double, ClosedLoopNetwork>> scenario_segments(const Scenario& s) {
    std::vector<std::pair<double, ClosedLoopNetwork>> segs;
    segs.emplace_back(0.0, build_closed_loop(s));
    for (const auto& e : s.schedule)
        segs.emplace_back(e.time, with_parameter(segs.back().second, e.parameter, e.value));
    return segs;
}

inline State scenario_initial_state(const Scenario& s, const ReactionNetwork& net) {
    auto x = State::zeros(net.num_species());
    for (const auto& [name, count] : s.initial) {
        auto idx = net.species().index_of(name);
        if (!idx)
            throw std::invalid_argument("initial count for unknown species '" + name + "'");
        if (count < 0)
            throw std::invalid_argument("initial counts must be nonnegative");
        x.counts[*idx] = count;
    }
    return x;
}

struct ScenarioRun {
    ClosedLoopNetwork closed; // loop at t=0
    std::vector<Phase> phases;
    State x0;
    EnsembleStats stats;
};

/// Simulates a scenario's ensemble without touching the filesystem.
inline ScenarioRun execute_scenario(const Scenario& s) {
    validate_scenario(s);
    const auto segs = scenario_segments(s);
    ScenarioRun run{segs.front().second, {}, {}, {}};
    for (const auto& [t, cl] : segs)
        run.phases.push_back(Phase{t, cl.net});
    run.x0 = scenario_initial_state(s, run.closed.net);
    EnsembleOptions opts;
    opts.grid = make_grid(s.sim.t_end, s.sim.grid_dt);
    opts.n_paths = s.sim.cells;
    opts.master_seed = s.sim.seed;
    opts.threads = s.sim.threads;
    opts.rate_window = s.rate_window;
    run.stats = simulate_ensemble(run.phases, run.x0, s.sim.t_end, opts);
    return run;
}

namespace detail {

inline std::string write_text(const std::filesystem::path& dir, const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
    out << body;
    return name;
}

inline void write_manifest(const std::filesystem::path& dir, RunManifest& m) {
    m.outputs.push_back("manifest.json");
    nlohmann::json j{{"version", m.version},
                     {"scenario_hash", m.scenario_hash},
                     {"master_seed", m.master_seed},
                     {"wall_clock_seconds", m.wall_clock_seconds},
                     {"outputs", m.outputs}};
    write_text(dir, "manifest.json", j.dump(2) + "\n");
}

inline std::string fmt_pm(double v, double sem) { return fmt_num(v) + " +- " + fmt_num(sem); }

} // namespace detail

/// Runs the scenario and writes ensemble.csv, trajectory.csv (path 0),
/// summary.txt and manifest.json into `out_dir`.
inline RunManifest run_scenario(const Scenario& s, const std::filesystem::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto run = execute_scenario(s);
    std::filesystem::create_directories(out_dir);
    RunManifest m;
    m.scenario_hash = scenario_hash(s);
    m.master_seed = s.sim.seed;

    std::ostringstream csv;
    write_ensemble_csv(csv, run.stats);
    m.outputs.push_back(detail::write_text(out_dir, "ensemble.csv", csv.str()));

    const auto path0 = simulate(run.phases, run.x0, s.sim.t_end, SeedSpec{s.sim.seed, 0});
    std::ostringstream tcsv;
    write_trajectory_csv(tcsv, path0, run.closed.net.species().names());
    m.outputs.push_back(detail::write_text(out_dir, "trajectory.csv", tcsv.str()));

    const auto& st = run.stats;
    std::ostringstream sum;
    sum << "scenario: " << s.name << "\nnetwork: " << s.network_source << "\npaths: " << st.n_paths
        << "\nt_end: " << fmt_num(s.sim.t_end) << "\nseed: " << s.sim.seed << '\n';
    const auto final_closed = scenario_segments(s).back().second;
    if (const auto* a = std::get_if<AntitheticSpec>(&final_closed.controller))
        sum << "set-point mu/theta (final segment): " << fmt_num(a->set_point()) << '\n';
    sum << "means at t_end:\n";
    for (std::size_t i = 0; i < st.species.size(); ++i)
        sum << "  " << st.species[i] << " = " << detail::fmt_pm(st.mean.back()[i], st.sem.back()[i]) << '\n';
    if (run.closed.is_antithetic()) {
        const auto dz = delta_z(st, run.closed.z1(), run.closed.z2());
        const auto cg = covariance_gap(st, run.closed.z1(), run.closed.z2());
        sum << "delta_z(t_end) = " << detail::fmt_pm(dz.value.back(), dz.sem.back()) << '\n';
        sum << "cov(Z1,Z2)(t_end) = " << detail::fmt_pm(cg.value.back(), cg.sem.back()) << '\n';
    }
    if (st.rate_window) {
        sum << "firing rates over [" << fmt_num(st.rate_window->first) << ", " << fmt_num(st.rate_window->second)
            << "]:\n";
        for (std::size_t k = 0; k < st.firing_rate.size(); ++k)
            sum << "  " << (st.reaction_labels[k].empty() ? "R" + std::to_string(k) : st.reaction_labels[k]) << " = "
                << detail::fmt_pm(st.firing_rate[k], st.firing_rate_sem[k]) << '\n';
        if (run.closed.is_antithetic()) {
            const auto base = run.closed.open_reactions;
            double load = 0.0;
            for (std::size_t r = 0; r < 4; ++r)
                load += s.metabolic_weights[r] * st.firing_rate[base + r];
            sum << "metabolic load (event accounting) = " << fmt_num(load) << '\n';
            // formula for the loop in force when the window opens
            const auto segs = scenario_segments(s);
            const ClosedLoopNetwork* active = &segs.front().second;
            for (const auto& [t, cl] : segs)
                if (t <= st.rate_window->first)
                    active = &cl;
            try {
                const auto model = build_linear_model(strip_controller(*active));
                sum << "metabolic load (formula) = "
                    << fmt_num(metabolic_load(std::get<AntitheticSpec>(active->controller), model,
                                              s.metabolic_weights))
                    << '\n';
            } catch (const NonAffineError&) {
            }
        }
    }
    m.outputs.push_back(detail::write_text(out_dir, "summary.txt", sum.str()));
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail::write_manifest(out_dir, m);
    return m;
}

/// Regulated-species adaptation of one controller to a schedule event.
struct ControllerAdaptation {
    std::string controller;
    double pre_mean = 0.0;
    double pre_sem = 0.0;
    double settled_mean = 0.0;
    double settled_sem = 0.0;
    double adaptation_error = 0.0; // |settled - pre| / pre
    // deterministic fixed points before and after the first event (NaN if the ODE does not settle)
    double det_pre = std::numeric_limits<double>::quiet_NaN();
    double det_post = std::numeric_limits<double>::quiet_NaN();
    double det_error = std::numeric_limits<double>::quiet_NaN();
};

struct AdaptationReport {
    double event_time = 0.0;
    double window = 0.0;
    std::vector<ControllerAdaptation> entries;
};

namespace detail {

inline std::pair<double, double> window_mean(const EnsembleStats& st, std::size_t species, double lo, double hi,
                                             bool include_hi) {
    double m = 0.0, s = 0.0;
    std::size_t n = 0;
    for (std::size_t g = 0; g < st.grid.size(); ++g) {
        const double t = st.grid[g];
        if (t >= lo && (t < hi || (include_hi && t <= hi))) {
            m += st.mean[g][species];
            s += st.sem[g][species];
            ++n;
        }
    }
    if (n == 0)
        throw std::invalid_argument("adaptation window contains no grid points");
    // averaged sems bound the sem of the window mean from above
    return {m / static_cast<double>(n), s / static_cast<double>(n)};
}

inline ControllerAdaptation adaptation_of(const Scenario& s) {
    const auto run = execute_scenario(s);
    const auto segs = scenario_segments(s);
    const double t_ev = s.schedule.front().time;
    const std::size_t reg = run.closed.net.regulated();
    ControllerAdaptation a;
    a.controller = run.closed.is_antithetic() ? "antithetic" : run.closed.is_hill() ? "hill" : "none";
    std::tie(a.pre_mean, a.pre_sem) = window_mean(run.stats, reg, t_ev - s.adaptation_window, t_ev, false);
    std::tie(a.settled_mean, a.settled_sem) =
        window_mean(run.stats, reg, s.sim.t_end - s.adaptation_window, s.sim.t_end, true);
    a.adaptation_error = std::abs(a.settled_mean - a.pre_mean) / a.pre_mean;
    try {
        Eigen::VectorXd x0(static_cast<Eigen::Index>(run.x0.size()));
        for (std::size_t i = 0; i < run.x0.size(); ++i)
            x0(static_cast<Eigen::Index>(i)) = static_cast<double>(run.x0[i]);
        const auto pre = deterministic_fixed_point(deterministic_rhs(segs[0].second), x0);
        const auto post = deterministic_fixed_point(deterministic_rhs(segs[1].second), pre);
        a.det_pre = pre(static_cast<Eigen::Index>(reg));
        a.det_post = post(static_cast<Eigen::Index>(reg));
        a.det_error = std::abs(a.det_post - a.det_pre) / a.det_pre;
    } catch (const IntegrationError&) {
    }
    return a;
}

} // namespace detail

/// Pre-stimulus versus settled regulated mean for two controllers exposed to
/// the same open loop and schedule.
inline AdaptationReport compare_controllers(const Scenario& first, const Scenario& second) {
    if (first.schedule.empty())
        throw std::invalid_argument("comparison needs at least one schedule event");
    if (first.schedule.size() != second.schedule.size())
        throw std::invalid_argument("scenarios have mismatched schedules");
    for (std::size_t i = 0; i < first.schedule.size(); ++i) {
        const auto &a = first.schedule[i], &b = second.schedule[i];
        if (a.time != b.time || a.parameter != b.parameter || a.value != b.value)
            throw std::invalid_argument("scenarios have mismatched schedules");
    }
    if (parse_network(first.network_text) != parse_network(second.network_text))
        throw std::invalid_argument("scenarios do not share the open-loop network");
    if (first.sim.t_end != second.sim.t_end)
        throw std::invalid_argument("scenarios have different horizons");
    AdaptationReport rep;
    rep.event_time = first.schedule.front().time;
    rep.window = first.adaptation_window;
    rep.entries.push_back(detail::adaptation_of(first));
    rep.entries.push_back(detail::adaptation_of(second));
    return rep;
}

inline std::string format_adaptation_report(const AdaptationReport& rep) {
    std::ostringstream os;
    os << "event at t = " << fmt_num(rep.event_time) << ", averaging window " << fmt_num(rep.window) << '\n';
    for (const auto& e : rep.entries) {
        os << e.controller << ":\n"
           << "  pre-stimulus mean   " << detail::fmt_pm(e.pre_mean, e.pre_sem) << '\n'
           << "  settled mean        " << detail::fmt_pm(e.settled_mean, e.settled_sem) << '\n'
           << "  adaptation error    " << fmt_num(e.adaptation_error) << '\n'
           << "  deterministic pre/post/error  " << fmt_num(e.det_pre) << " / " << fmt_num(e.det_post) << " / "
           << fmt_num(e.det_error) << '\n';
    }
    return os.str();
}

/// Outcome of the deterministic-versus-stochastic study at one oscillatory point.
struct NoiseStabilization {
    double k = 0.0;
    double eta = 0.0;
    double max_real_eig = 0.0;
    AttractorVerdict deterministic;
    double ssa_mean_regulated = 0.0; // at t_end
    double ssa_sem_regulated = 0.0;
    double set_point = 0.0;
};

struct BifurcationRun {
    BifurcationMap map;
    NoiseStabilization stabilization;
    DenseTrajectory deterministic;
    EnsembleStats stats;
    std::vector<SpectrumPoint> spectrum_deterministic;
    std::vector<SpectrumPoint> spectrum_ssa;
};

inline BifurcationRun execute_bifurcation(const Scenario& s) {
    if (!s.bifurcation)
        throw std::invalid_argument("scenario has no bifurcation section");
    const auto* base = std::get_if<AntitheticSpec>(&s.controller);
    if (base == nullptr)
        throw std::invalid_argument("bifurcation study needs an antithetic controller");
    const auto& b = *s.bifurcation;
    const auto open = parse_network(s.network_text);

    BifurcationConfig cfg{open, base->mu, base->theta, b.k_grid, b.eta_grid, b.t_end, {b.tol, b.grid_dt}, {},
                          std::nullopt, s.sim.threads};
    cfg.attractor.tail_fraction = b.tail_fraction;

    BifurcationRun run;
    run.map = bifurcation_scan(cfg);

    AntitheticSpec osc = *base;
    osc.k = b.osc_k;
    osc.eta = b.osc_eta;
    const auto closed = augment_antithetic(open, osc);
    auto& ns = run.stabilization;
    ns.k = osc.k;
    ns.eta = osc.eta;
    ns.set_point = osc.set_point();
    ns.max_real_eig = hopf_abscissa(closed);
    run.deterministic = integrate(deterministic_rhs(closed),
                                  Eigen::VectorXd::Zero(static_cast<Eigen::Index>(closed.net.num_species())), b.t_end,
                                  cfg.integration);
    AttractorOptions ao = cfg.attractor;
    ao.reference = ns.set_point;
    ns.deterministic = classify_attractor(run.deterministic, closed.net.regulated(), ao);

    Scenario ssa = s;
    ssa.controller = osc;
    ssa.schedule.clear();
    ssa.bifurcation.reset();
    const auto sr = execute_scenario(ssa);
    run.stats = sr.stats;
    ns.ssa_mean_regulated = sr.stats.mean.back()[closed.net.regulated()];
    ns.ssa_sem_regulated = sr.stats.sem.back()[closed.net.regulated()];

    // spectra over the final half of each run
    auto tail = [](const std::vector<double>& t, const std::vector<double>& y) {
        const std::size_t from = t.size() / 2;
        return std::pair{std::vector<double>(t.begin() + static_cast<std::ptrdiff_t>(from), t.end()),
                         std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(from), y.end())};
    };
    {
        auto [t, y] = tail(run.deterministic.times, run.deterministic.component(closed.net.regulated()));
        run.spectrum_deterministic = periodogram(t, y);
    }
    {
        const auto path = simulate(closed.net, sr.x0, s.sim.t_end, SeedSpec{s.sim.seed, 0});
        std::vector<double> t, y;
        for (double g : sr.stats.grid) {
            t.push_back(g);
            y.push_back(static_cast<double>(path.at(g)[closed.net.regulated()]));
        }
        auto [tt, yy] = tail(t, y);
        run.spectrum_ssa = periodogram(tt, yy);
    }
    return run;
}

/// Writes bifurcation.csv, deterministic.csv, ensemble.csv,
/// periodogram_deterministic.csv, periodogram_ssa.csv, summary.txt, manifest.json.
inline RunManifest run_bifurcation(const Scenario& s, const std::filesystem::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto run = execute_bifurcation(s);
    std::filesystem::create_directories(out_dir);
    RunManifest m;
    m.scenario_hash = scenario_hash(s);
    m.master_seed = s.sim.seed;
    const auto closed = augment_antithetic(parse_network(s.network_text),
                                           AntitheticSpec{std::get<AntitheticSpec>(s.controller).mu,
                                                          std::get<AntitheticSpec>(s.controller).theta,
                                                          run.stabilization.eta, run.stabilization.k});
    std::ostringstream os;
    write_bifurcation_csv(os, run.map);
    m.outputs.push_back(detail::write_text(out_dir, "bifurcation.csv", os.str()));
    os.str("");
    write_dense_csv(os, run.deterministic, closed.net.species().names());
    m.outputs.push_back(detail::write_text(out_dir, "deterministic.csv", os.str()));
    os.str("");
    write_ensemble_csv(os, run.stats);
    m.outputs.push_back(detail::write_text(out_dir, "ensemble.csv", os.str()));
    os.str("");
    write_periodogram_csv(os, run.spectrum_deterministic);
    m.outputs.push_back(detail::write_text(out_dir, "periodogram_deterministic.csv", os.str()));
    os.str("");
    write_periodogram_csv(os, run.spectrum_ssa);
    m.outputs.push_back(detail::write_text(out_dir, "periodogram_ssa.csv", os.str()));

    std::size_t decided = 0;
    const double agreement = run.map.oracle_agreement(&decided);
    const auto& ns = run.stabilization;
    os.str("");
    os << "scenario: " << s.name << "\nscan cells: " << run.map.cells.size() << " (decided " << decided
       << ")\nagreement with Jacobian sign oracle: " << fmt_num(agreement)
       << "\nnon-monotone k rows: " << run.map.non_monotone_rows().size() << "\noscillatory point: k = " << fmt_num(ns.k)
       << ", eta = " << fmt_num(ns.eta) << "\n  Jacobian abscissa at equilibrium: " << fmt_num(ns.max_real_eig)
       << "\n  deterministic verdict: " << ns.deterministic.name()
       << ", tail amplitude = " << fmt_num(ns.deterministic.amplitude) << "\n  SSA mean of regulated species at t_end: "
       << detail::fmt_pm(ns.ssa_mean_regulated, ns.ssa_sem_regulated) << " (set-point " << fmt_num(ns.set_point)
       << ")\n";
    m.outputs.push_back(detail::write_text(out_dir, "summary.txt", os.str()));
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail::write_manifest(out_dir, m);
    return m;
}

/// Human-readable analysis report.
inline std::string format_analysis(const AnalysisReport& r, const ReactionNetwork& open, const AntitheticSpec& spec) {
    std::ostringstream os;
    auto yes = [](bool b) { return b ? "yes" : "no"; };
    os << "species: " << open.num_species() << ", reactions: " << open.num_reactions()
       << ", actuated: " << open.species()[open.actuated()] << ", regulated: " << open.species()[open.regulated()]
       << "\nset-point mu/theta: " << fmt_num(spec.set_point()) << "\nSW Metzler: " << yes(r.metzler)
       << "\nspectral abscissa of SW: " << fmt_num(r.spectral_abscissa) << "\nHurwitz stable: " << yes(r.hurwitz)
       << "\nimpulse gain [(SW)^-1]_(l,1): " << (r.impulse_gain ? fmt_num(*r.impulse_gain) : "undefined (SW singular)")
       << "\noutput controllable: " << yes(r.output_controllable) << "\naccessible: " << yes(r.accessible) << '\n';
    if (r.witness) {
        os << "accessibility witness: c = " << fmt_num(r.witness->c) << ", v =";
        for (Eigen::Index i = 0; i < r.witness->v.size(); ++i)
            os << ' ' << fmt_num(r.witness->v(i));
        os << '\n';
    }
    if (r.predicted_mean_X) {
        os << "predicted stationary means:\n";
        for (Eigen::Index i = 0; i < r.predicted_mean_X->size(); ++i)
            os << "  " << open.species()[static_cast<std::size_t>(i)] << " = " << fmt_num((*r.predicted_mean_X)(i))
               << '\n';
        os << "  Z1 = " << fmt_num(*r.predicted_mean_Z1) << "\nmetabolic load: " << fmt_num(*r.metabolic_load) << '\n';
    }
    return os.str();
}

/// Machine-readable analysis report (schema in README).
inline nlohmann::json analysis_json(const AnalysisReport& r, const ReactionNetwork& open, const AntitheticSpec& spec) {
    auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    nlohmann::json j;
    j["species"] = open.species().names();
    j["actuated"] = open.species()[open.actuated()];
    j["regulated"] = open.species()[open.regulated()];
    j["controller"] = detail::controller_json(spec);
    j["set_point"] = spec.set_point();
    j["metzler"] = r.metzler;
    j["spectral_abscissa"] = r.spectral_abscissa;
    j["hurwitz"] = r.hurwitz;
    j["hurwitz_witness"] = r.hurwitz_witness ? nlohmann::json(vec(*r.hurwitz_witness)) : nlohmann::json();
    j["impulse_gain"] = r.impulse_gain ? nlohmann::json(*r.impulse_gain) : nlohmann::json();
    j["output_controllable"] = r.output_controllable;
    j["accessible"] = r.accessible;
    j["min_set_point"] = std::isfinite(r.min_set_point) ? nlohmann::json(r.min_set_point) : nlohmann::json();
    j["witness"] = r.witness ? nlohmann::json{{"c", r.witness->c}, {"v", vec(r.witness->v)}} : nlohmann::json();
    j["predicted_mean_X"] = r.predicted_mean_X ? nlohmann::json(vec(*r.predicted_mean_X)) : nlohmann::json();
    j["predicted_mean_Z1"] = r.predicted_mean_Z1 ? nlohmann::json(*r.predicted_mean_Z1) : nlohmann::json();
    j["metabolic_load"] = r.metabolic_load ? nlohmann::json(*r.metabolic_load) : nlohmann::json();
    return j;
}

/// Process exit status for `analyze`: 0 when all conditions hold.
enum AnalyzeExit : int {
    kAnalyzeOk = 0,
    kAnalyzeUsage = 1,
    kAnalyzeNotHurwitz = 2,
    kAnalyzeNotControllable = 3,
    kAnalyzeNotAccessible = 4,
    kAnalyzeNonAffine = 5,
};

inline int analyze_exit_code(const AnalysisReport& r) {
    if (!r.hurwitz)
        return kAnalyzeNotHurwitz;
    if (!r.output_controllable)
        return kAnalyzeNotControllable;
    if (!r.accessible)
        return kAnalyzeNotAccessible;
    return kAnalyzeOk;
}

} // namespace aic
