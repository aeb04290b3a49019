// mtf: command-line front end for the Thomas-Fermi functionals, transforms,
// solver and verification scenarios.
//
//   mtf energy-tf  --input rho.csv
//   mtf energy-mtf --input tau.csv [--path direct|layercake]
//   mtf transform t --input rho.csv [--output tau.csv]
//   mtf solve --Z 1 --N 1 --q 2 [--rho-out rho.csv --tau-out tau.csv]
//   mtf verify all --seed 7 --format text
//
// Exit codes: 0 success / all passed, 1 some check failed, 2 error.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "mtf.hpp"

namespace {

struct Globals {
    double Z = 1.0;
    double q = 2.0;
    std::optional<double> N;
    std::optional<std::size_t> grid_n;
    std::optional<double> r_min, r_max;
    std::string scheme = "log";
    double tol = 1e-12;
    std::uint64_t seed = 7;
    std::string format = "json";
};

mtf::AtomConfig atom(const Globals& g) { return mtf::AtomConfig(g.Z, g.N.value_or(g.Z), g.q); }

mtf::ReportFormat report_format(const Globals& g)
{
    return g.format == "text" ? mtf::ReportFormat::Text : mtf::ReportFormat::Json;
}

void print_energy(const mtf::EnergyBreakdown& e, const Globals& g, const char* path = nullptr)
{
    if (g.format == "text") {
        std::printf("kinetic     %.17g\nattraction  %.17g\nrepulsion   %.17g\ntotal       %.17g\n", e.kinetic,
                    e.attraction, e.repulsion, e.total);
        if (path)
            std::printf("path        %s\n", path);
        return;
    }
    nlohmann::json j{{"kinetic", e.kinetic}, {"attraction", e.attraction}, {"repulsion", e.repulsion}, {"total", e.total}};
    if (path)
        j["path"] = path;
    std::cout << j.dump(2) << '\n';
}

void write_or_print(const mtf::RadialProfile& p, double gamma, const std::string& out)
{
    if (out.empty() || out == "-")
        mtf::write_profile(std::cout, p, gamma);
    else
        mtf::save_profile(out, p, gamma);
}

int run_solve(const Globals& g, const std::string& rho_out, const std::string& tau_out)
{
    const auto cfg = atom(g);
    if (cfg.N() > cfg.Z()) {
        std::cerr << "mtf solve: N > Z has no Thomas-Fermi minimizer with all N electrons bound; the energy "
                     "infimum is attained at mass Z (try 'mtf verify saturation')\n";
        return 2;
    }
    const auto sol = mtf::solve_tf_ode(cfg, g.tol);
    const std::size_t n = g.grid_n.value_or(4096);
    const double b = sol.length_scale();
    mtf::RadialGrid grid = mtf::default_position_grid(sol, n);
    if (g.r_max || g.r_min) {
        const double lo = g.r_min.value_or(1e-9 * b);
        const double hi = g.r_max.value_or(grid.r_max());
        grid = mtf::make_grid(mtf::parse_scheme(g.scheme), n, lo, hi);
    }
    const auto rho = mtf::minimizer_density(sol, cfg, grid);
    const auto tau = mtf::transform_T(rho, cfg);
    if (!rho_out.empty())
        mtf::save_profile(rho_out, rho, cfg.gamma());
    if (!tau_out.empty())
        mtf::save_profile(tau_out, tau, cfg.gamma());
    nlohmann::json j{{"slope0", sol.slope0()},
                     {"x0", sol.neutral() ? nlohmann::json(nullptr) : nlohmann::json(sol.x0())},
                     {"b", b},
                     {"mass", mtf::mass(rho)},
                     {"energy_tf", mtf::energy_tf(rho, cfg).total},
                     {"energy_mtf", mtf::energy_mtf(tau, cfg).total}};
    if (g.format == "text") {
        for (auto it = j.begin(); it != j.end(); ++it)
            std::cout << it.key() << ' ' << it.value().dump() << '\n';
    } else {
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

int run_verify(const Globals& g, const std::string& name)
{
    mtf::ScenarioConfig sc;
    sc.Z = g.Z;
    sc.N = g.N.value_or(g.Z);
    sc.q = g.q;
    sc.seed = g.seed;
    sc.tol = g.tol;
    sc.grid.scheme = mtf::parse_scheme(g.scheme);
    if (g.grid_n)
        sc.grid.n = *g.grid_n;
    if (g.r_min)
        sc.grid.r_min = *g.r_min;
    if (g.r_max)
        sc.grid.r_max = *g.r_max;
    (void)sc.atom(); // validate before running anything

    std::vector<mtf::ScenarioReport> reports;
    if (name == "all") {
        for (const auto& s : mtf::scenario_names())
            reports.push_back(mtf::run_scenario(s, sc));
        std::cout << mtf::emit_reports(reports, report_format(g));
    } else {
        reports.push_back(mtf::run_scenario(name, sc));
        std::cout << mtf::emit_report(reports.back(), report_format(g));
    }
    if (report_format(g) == mtf::ReportFormat::Json)
        std::cout << '\n';
    return mtf::exit_code(reports);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Thomas-Fermi functionals in position and momentum space"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--Z", g.Z, "nuclear charge")->capture_default_str();
    app.add_option("--N", g.N, "electron number (default: Z)");
    app.add_option("--q", g.q, "spin states")->capture_default_str();
    app.add_option("--grid-n", g.grid_n, "grid size");
    app.add_option("--r-min", g.r_min, "first grid node");
    app.add_option("--r-max", g.r_max, "last grid node");
    app.add_option("--scheme", g.scheme, "grid spacing")->check(CLI::IsMember({"log", "linear"}))->capture_default_str();
    app.add_option("--tol", g.tol, "solver tolerance")->capture_default_str();
    app.add_option("--seed", g.seed, "seed for random profiles")->capture_default_str();
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();

    std::string input, output, path = "direct", direction, rho_out, tau_out, scenario;

    auto* etf = app.add_subcommand("energy-tf", "E_TF of a position profile");
    etf->add_option("--input,-i", input, "profile CSV")->required();

    auto* emtf = app.add_subcommand("energy-mtf", "E_mTF of a momentum profile");
    emtf->add_option("--input,-i", input, "profile CSV")->required();
    emtf->add_option("--path", path, "repulsion evaluation")->check(CLI::IsMember({"direct", "layercake"}));

    auto* tr = app.add_subcommand("transform", "apply S (momentum -> position) or T (position -> momentum)");
    tr->add_option("direction", direction, "s or t")->required()->check(CLI::IsMember({"s", "t"}));
    tr->add_option("--input,-i", input, "profile CSV")->required();
    tr->add_option("--output,-o", output, "output CSV (default: stdout)");

    auto* solve = app.add_subcommand("solve", "Thomas-Fermi minimizer and its momentum image");
    solve->add_option("--rho-out", rho_out, "write rho_m here");
    solve->add_option("--tau-out", tau_out, "write T(rho_m) here");

    auto* verify = app.add_subcommand("verify", "run a verification scenario");
    verify->add_option("scenario", scenario, "scenario name or 'all'")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*etf) {
            const auto cfg = atom(g);
            const auto f = mtf::load_profile(input, cfg.gamma());
            print_energy(mtf::energy_tf(f.profile, cfg), g);
        } else if (*emtf) {
            const auto cfg = atom(g);
            const auto f = mtf::load_profile(input, cfg.gamma());
            const auto which = path == "layercake" ? mtf::RepulsionPath::LayerCake : mtf::RepulsionPath::Direct;
            print_energy(mtf::energy_mtf(f.profile, cfg, which), g, mtf::to_string(which));
        } else if (*tr) {
            const auto cfg = atom(g);
            const auto f = mtf::load_profile(input, cfg.gamma());
            const auto out = direction == "t" ? mtf::transform_T(f.profile, cfg) : mtf::transform_S(f.profile, cfg);
            write_or_print(out, cfg.gamma(), output);
        } else if (*solve) {
            return run_solve(g, rho_out, tau_out);
        } else if (*verify) {
            if (scenario != "all") {
                const auto& names = mtf::scenario_names();
                if (std::find(names.begin(), names.end(), scenario) == names.end()) {
                    std::cerr << "mtf verify: unknown scenario '" << scenario << "'\n";
                    return 2;
                }
            }
            return run_verify(g, scenario);
        }
    } catch (const std::exception& e) {
        std::cerr << "mtf: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
