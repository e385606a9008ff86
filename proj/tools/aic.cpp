// aic: command-line front end for the closed-loop simulation toolkit.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aic/scenario.hpp"

namespace fs = std::filesystem;
using namespace aic;

namespace {

struct Common {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> cells;
    std::optional<double> t_end;
    std::optional<double> grid_dt;
    std::optional<unsigned> threads;
    std::string out;
};

struct ControllerFlags {
    std::string network;
    std::string type = "antithetic";
    double mu = 3, theta = 1, eta = 50, k = 1;
    double alpha = 8.22, K = 3;
    int n = 1;
};

void add_common(CLI::App* app, Common& c, bool scenario_required) {
    auto* opt = app->add_option("--scenario", c.scenario, "Scenario file (JSON)")->check(CLI::ExistingFile);
    if (scenario_required)
        opt->required();
    app->add_option("--seed", c.seed, "Master seed");
    app->add_option("--cells", c.cells, "Number of simulated cells (paths)");
    app->add_option("--t-end", c.t_end, "Final time");
    app->add_option("--grid-dt", c.grid_dt, "Output grid spacing");
    app->add_option("--threads", c.threads, "Worker threads (0 = hardware concurrency)");
    app->add_option("--out", c.out, "Output directory");
}

void add_controller(CLI::App* app, ControllerFlags& f) {
    app->add_option("--network", f.network, "Reaction network file")->check(CLI::ExistingFile);
    app->add_option("--controller", f.type, "antithetic, hill or none")
        ->check(CLI::IsMember({"antithetic", "hill", "none"}));
    app->add_option("--mu", f.mu);
    app->add_option("--theta", f.theta);
    app->add_option("--eta", f.eta);
    app->add_option("--k", f.k);
    app->add_option("--alpha", f.alpha);
    app->add_option("--K", f.K);
    app->add_option("--n", f.n);
}

void apply_overrides(Scenario& s, const Common& c) {
    if (c.seed)
        s.sim.seed = *c.seed;
    if (c.cells)
        s.sim.cells = *c.cells;
    if (c.t_end)
        s.sim.t_end = *c.t_end;
    if (c.grid_dt)
        s.sim.grid_dt = *c.grid_dt;
    if (c.threads)
        s.sim.threads = *c.threads;
    validate_scenario(s);
}

ControllerKind controller_of(const ControllerFlags& f) {
    if (f.type == "antithetic")
        return AntitheticSpec{f.mu, f.theta, f.eta, f.k};
    if (f.type == "hill")
        return HillSpec{f.alpha, f.K, f.n};
    return std::monostate{};
}

Scenario scenario_of(const Common& c, const ControllerFlags& f) {
    Scenario s;
    if (!c.scenario.empty()) {
        s = load_scenario(c.scenario);
    } else {
        if (f.network.empty())
            throw CLI::ValidationError("either --scenario or --network is required");
        s.name = fs::path(f.network).stem().string();
        s.network_source = f.network;
        s.network_text = detail::read_file(f.network);
        s.controller = controller_of(f);
        s.outputs = fs::path("out") / s.name;
    }
    apply_overrides(s, c);
    return s;
}

fs::path out_dir(const Common& c, const Scenario& s) { return c.out.empty() ? s.outputs : fs::path(c.out); }

void print_manifest(const RunManifest& m, const fs::path& dir) {
    std::cout << "wrote";
    for (const auto& f : m.outputs)
        std::cout << ' ' << (dir / f).string();
    std::cout << "\nscenario hash " << m.scenario_hash << ", seed " << m.master_seed << ", "
              << fmt_num(m.wall_clock_seconds) << " s\n";
}

int cmd_simulate(const Common& c, const ControllerFlags& f) {
    const auto s = scenario_of(c, f);
    const auto dir = out_dir(c, s);
    const auto m = run_scenario(s, dir);
    std::cout << detail::read_file(dir / "summary.txt");
    print_manifest(m, dir);
    return 0;
}

int cmd_analyze(const Common& c, const ControllerFlags& f, const std::string& alphas_csv) {
    std::string text;
    AntitheticSpec spec{f.mu, f.theta, f.eta, f.k};
    if (!c.scenario.empty()) {
        const auto s = load_scenario(c.scenario);
        text = s.network_text;
        if (const auto* a = std::get_if<AntitheticSpec>(&s.controller))
            spec = *a;
    } else if (!f.network.empty()) {
        text = detail::read_file(f.network);
    } else {
        std::cerr << "analyze: either --scenario or --network is required\n";
        return kAnalyzeUsage;
    }
    std::array<double, 4> alphas{1.0, 1.0, 1.0, 1.0};
    if (!alphas_csv.empty()) {
        std::stringstream ss(alphas_csv);
        std::string item;
        std::size_t i = 0;
        while (std::getline(ss, item, ',')) {
            if (i >= 4)
                throw CLI::ValidationError("--alphas takes four comma-separated weights");
            alphas[i++] = std::stod(item);
        }
        if (i != 4)
            throw CLI::ValidationError("--alphas takes four comma-separated weights");
    }

    const auto open = parse_network(text);
    LinearModel model;
    try {
        model = build_linear_model(open);
    } catch (const NonAffineError& e) {
        std::cerr << "analyze: " << e.what()
                  << "\nThe structural conditions only apply to unimolecular networks; use `aic simulate` "
                     "for this network.\n";
        return kAnalyzeNonAffine;
    }
    const auto rep = analyze(model, spec, alphas);
    std::cout << format_analysis(rep, open, spec);
    if (!c.out.empty()) {
        fs::create_directories(c.out);
        std::ofstream(fs::path(c.out) / "analysis.json") << analysis_json(rep, open, spec).dump(2) << '\n';
        std::ofstream(fs::path(c.out) / "analysis.txt") << format_analysis(rep, open, spec);
    }
    const int code = analyze_exit_code(rep);
    if (code == kAnalyzeNotHurwitz)
        std::cerr << "analyze: SW is not Hurwitz stable\n";
    else if (code == kAnalyzeNotControllable)
        std::cerr << "analyze: regulated species is not output controllable from the actuated species\n";
    else if (code == kAnalyzeNotAccessible)
        std::cerr << "analyze: set-point is not accessible\n";
    return code;
}

int cmd_compare(const Common& c, const std::string& versus) {
    auto a = load_scenario(c.scenario);
    auto b = load_scenario(versus);
    apply_overrides(a, c);
    apply_overrides(b, c);
    const auto rep = compare_controllers(a, b);
    const auto text = format_adaptation_report(rep);
    std::cout << text;
    if (!c.out.empty()) {
        fs::create_directories(c.out);
        std::ofstream(fs::path(c.out) / "adaptation.txt") << text;
        std::ofstream csv(fs::path(c.out) / "adaptation.csv");
        csv << "controller,pre_mean,pre_sem,settled_mean,settled_sem,adaptation_error,det_pre,det_post,det_error\n";
        for (const auto& e : rep.entries)
            csv << e.controller << ',' << fmt_num(e.pre_mean) << ',' << fmt_num(e.pre_sem) << ','
                << fmt_num(e.settled_mean) << ',' << fmt_num(e.settled_sem) << ',' << fmt_num(e.adaptation_error) << ','
                << fmt_num(e.det_pre) << ',' << fmt_num(e.det_post) << ',' << fmt_num(e.det_error) << '\n';
    }
    return 0;
}

int cmd_bifurcate(const Common& c) {
    auto s = load_scenario(c.scenario);
    apply_overrides(s, c);
    const auto dir = out_dir(c, s);
    const auto m = run_bifurcation(s, dir);
    std::cout << detail::read_file(dir / "summary.txt");
    print_manifest(m, dir);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic simulation and analysis of antithetic integral feedback"};
    app.set_version_flag("--version", std::string(kToolkitVersion));
    app.require_subcommand(1);

    Common sim_c, ana_c, cmp_c, bif_c;
    ControllerFlags sim_f, ana_f;
    std::string alphas, versus;

    auto* sim = app.add_subcommand("simulate", "Run an SSA ensemble and write CSV + summary");
    add_common(sim, sim_c, false);
    add_controller(sim, sim_f);

    auto* ana = app.add_subcommand("analyze", "Check Hurwitz stability, output controllability, accessibility");
    add_common(ana, ana_c, false);
    add_controller(ana, ana_f);
    ana->add_option("--alphas", alphas, "Metabolic weights a1,a2,a3,a4");

    auto* cmp = app.add_subcommand("compare", "Adaptation of two controllers to the same schedule");
    add_common(cmp, cmp_c, true);
    cmp->add_option("--versus", versus, "Second scenario file")->required()->check(CLI::ExistingFile);

    auto* bif = app.add_subcommand("bifurcate", "Deterministic (k, eta) scan plus one stochastic comparison");
    add_common(bif, bif_c, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kAnalyzeUsage;
    }

    try {
        if (*sim)
            return cmd_simulate(sim_c, sim_f);
        if (*ana)
            return cmd_analyze(ana_c, ana_f, alphas);
        if (*cmp)
            return cmd_compare(cmp_c, versus);
        if (*bif)
            return cmd_bifurcate(bif_c);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
