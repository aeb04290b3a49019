#pragma once

// Named verification scenarios and their reports.
//
// Each scenario builds a seeded corpus of profiles, evaluates one family of
// identities or inequalities and returns a list of metrics. A report passes
// when every metric does; exceptions thrown while running a scenario turn the
// report into an errored one instead of a failed one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "mtf/atom_config.hpp"
#include "mtf/minimizer.hpp"
#include "mtf/momentum_functional.hpp"
#include "mtf/position_functional.hpp"
#include "mtf/radial.hpp"
#include "mtf/random_profiles.hpp"
#include "mtf/tf_ode.hpp"
#include "mtf/transforms.hpp"

namespace mtf {

enum class Relation { AtMost, Above, AtLeast };

inline const char* to_string(Relation r)
{
    switch (r) {
    case Relation::AtMost: return "<=";
    case Relation::Above: return ">";
    case Relation::AtLeast: return ">=";
    }
    return "?";
}

struct Metric {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    Relation relation = Relation::AtMost;
    bool ok = false;

    static Metric check(std::string name, double value, double tolerance, Relation rel = Relation::AtMost)
    {
        bool ok = false;
        switch (rel) {
        case Relation::AtMost: ok = value <= tolerance; break;
        case Relation::Above: ok = value > tolerance; break;
        case Relation::AtLeast: ok = value >= tolerance; break;
        }
        return {std::move(name), value, tolerance, rel, ok};
    }

    const char* status() const { return ok ? "pass" : "fail"; }
};

struct GridSpec {
    GridScheme scheme = GridScheme::Log;
    std::size_t n = 4096;
    double r_min = 1e-3;
    double r_max = 10.0;

    RadialGrid make() const { return make_grid(scheme, n, r_min, r_max); }
    GridSpec refined() const
    {
        GridSpec g = *this;
        g.n *= 2;
        return g;
    }
};

struct ScenarioConfig {
    double Z = 1.0, N = 1.0, q = 2.0;
    GridSpec grid;
    std::uint64_t seed = 7;
    double tol = 1e-12;

    AtomConfig atom() const { return AtomConfig(Z, N, q); }
};

struct ScenarioReport {
    std::string scenario;
    bool passed = true;
    bool errored = false;
    std::string error;
    std::vector<Metric> metrics;
    ScenarioConfig config;
    double runtime_s = 0.0;
};

inline const std::vector<std::string>& scenario_names()
{
    static const std::vector<std::string> names{"isometry",        "duality",       "roundtrip",
                                                "rearrangement",   "convexity",     "infimum-equality",
                                                "minimizer-map",   "repulsion-paths", "saturation"};
    return names;
}

namespace detail {

inline double rel_diff(double a, double b)
{
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

struct Corpus {
    std::vector<RadialProfile> position; // decreasing
    std::vector<RadialProfile> momentum; // decreasing
};

inline Corpus decreasing_corpus(const ScenarioConfig& sc, const GridSpec& gs, std::size_t count)
{
    Rng rng(sc.seed);
    const auto grid = gs.make();
    Corpus c;
    for (std::size_t i = 0; i < count; ++i) {
        c.position.push_back(random_step_profile(rng, grid, Space::Position, Ordering::Decreasing));
        c.momentum.push_back(random_step_profile(rng, grid, Space::Momentum, Ordering::Decreasing));
    }
    return c;
}

struct Minimizer {
    TFSolution sol;
    RadialProfile rho;
    RadialProfile tau;
};

inline Minimizer tf_minimizer(const AtomConfig& cfg, std::size_t n, double tol)
{
    auto sol = solve_tf_ode(cfg, tol);
    auto rho = minimizer_density(sol, cfg, default_position_grid(sol, n));
    auto tau = transform_T(rho, cfg);
    return {std::move(sol), std::move(rho), std::move(tau)};
}

inline bool has_minimizer(const AtomConfig& cfg) { return cfg.N() > 0.0 && cfg.N() <= cfg.Z(); }

inline void require_minimizer(const AtomConfig& cfg, const char* who)
{
    if (!has_minimizer(cfg))
        throw DomainError(std::string(who) + ": needs 0 < N <= Z");
}

// Largest relative residual of the term-wise energy identities over the
// corpus (and the TF minimizer when it exists).
inline double duality_residual(const ScenarioConfig& sc, const GridSpec& gs)
{
    const auto cfg = sc.atom();
    const auto corpus = decreasing_corpus(sc, gs, 20);
    double worst = 0.0;
    auto position_side = [&](const RadialProfile& rho) {
        const auto tau = transform_T(rho, cfg);
        worst = std::max({worst, rel_diff(kinetic_m(tau), kinetic_tf(rho, cfg)),
                          rel_diff(attraction_m(tau, cfg), attraction_tf(rho, cfg)),
                          rel_diff(repulsion_m_direct(tau, cfg), repulsion_tf(rho))});
    };
    for (const auto& rho : corpus.position)
        position_side(rho);
    for (const auto& tau : corpus.momentum) {
        const auto rho = transform_S(tau, cfg);
        worst = std::max({worst, rel_diff(kinetic_m(tau), kinetic_tf(rho, cfg)),
                          rel_diff(attraction_m(tau, cfg), attraction_tf(rho, cfg)),
                          rel_diff(repulsion_m_direct(tau, cfg), repulsion_tf(rho))});
    }
    if (has_minimizer(cfg))
        position_side(tf_minimizer(cfg, gs.n, sc.tol).rho);
    return worst;
}

// Residuals at the round-off floor cannot decrease any further.
inline constexpr double refinement_floor = 1e-10;

inline void scenario_isometry(const ScenarioConfig& sc, std::vector<Metric>& out)
{
    const auto cfg = sc.atom();
    const auto corpus = decreasing_corpus(sc, sc.grid, 20);
    double worst_t = 0.0, worst_s = 0.0;
    for (const auto& rho : corpus.position)
        worst_t = std::max(worst_t, rel_diff(mass(transform_T(rho, cfg)), mass(rho)));
    for (const auto& tau : corpus.momentum)
        worst_s = std::max(worst_s, rel_diff(mass(transform_S(tau, cfg)), mass(tau)));
    const auto grid = sc.grid.make();
    const double radius = grid[grid.size() / 2];
    const auto ball_x = ball_profile(grid, Space::Position, radius);
    const auto ball_k = ball_profile(grid, Space::Momentum, radius);
    const double ball = std::max(rel_diff(mass(transform_T(ball_x, cfg)), mass(ball_x)),
                                 rel_diff(mass(transform_S(ball_k, cfg)), mass(ball_k)));
    out.push_back(Metric::check("mass_residual_T", worst_t, 1e-6));
    out.push_back(Metric::check("mass_residual_S", worst_s, 1e-6));
    out.push_back(Metric::check("mass_residual_ball", ball, 1e-12));
    if (has_minimizer(cfg)) {
        const auto m = tf_minimizer(cfg, sc.grid.n, sc.tol);
        out.push_back(Metric::check("mass_residual_T_minimizer", rel_diff(mass(m.tau), mass(m.rho)), 1e-6));
    }
}

inline void scenario_duality(const ScenarioConfig& sc, std::vector<Metric>& out)
{
    const double coarse = duality_residual(sc, sc.grid);
    const double fine = duality_residual(sc, sc.grid.refined());
    out.push_back(Metric::check("max_termwise_residual", coarse, 1e-4));
    out.push_back(Metric::check("max_termwise_residual_refined", fine, std::max(coarse, refinement_floor)));
}

inline void scenario_roundtrip(const ScenarioConfig& sc, std::vector<Metric>& out)
{
    const auto cfg = sc.atom();
    const auto corpus = decreasing_corpus(sc, sc.grid, 20);
    double worst = 0.0;
    for (const auto& p : corpus.position)
        worst = std::max(worst, round_trip_residual(p, cfg));
    for (const auto& p : corpus.momentum)
        worst = std::max(worst, round_trip_residual(p, cfg));
    out.push_back(Metric::check("max_residual_random", worst, 1e-3));

    const auto grid = make_grid(GridScheme::Log, sc.grid.n, 1e-4, 40.0);
    const auto expo =
        RadialProfile::from_function(grid, [](double r) { return std::exp(-r); }, Space::Position);
    out.push_back(Metric::check("residual_exp", round_trip_residual(expo, cfg), 1e-3));
    if (has_minimizer(cfg)) {
        const auto m = tf_minimizer(cfg, sc.grid.n, sc.tol);
        out.push_back(Metric::check("residual_minimizer", round_trip_residual(m.rho, cfg), 1e-3));
    }
}

inline void scenario_rearrangement(const ScenarioConfig& sc, std::vector<Metric>& out)
{
    const auto cfg = sc.atom();
    Rng rng(sc.seed);
    const auto grid = sc.grid.make();
    double energy_gain = -std::numeric_limits<double>::infinity();
    double attraction = 0.0, repulsion = 0.0, masses = 0.0, moment_gain = -std::numeric_limits<double>::infinity();
    double idempotence = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto tau = random_step_profile(rng, grid, Space::Momentum, Ordering::Unordered);
        const auto star = rearrange_decreasing(tau);
        const auto e = energy_mtf(tau, cfg), es = energy_mtf(star, cfg);
        energy_gain = std::max(energy_gain, es.total - e.total);
        attraction = std::max(attraction, rel_diff(es.attraction, e.attraction));
        repulsion = std::max(repulsion, rel_diff(es.repulsion, e.repulsion));
        masses = std::max(masses, rel_diff(mass(star), mass(tau)));
        moment_gain = std::max(moment_gain, (es.kinetic - e.kinetic) / e.kinetic);
        idempotence = std::max(idempotence, l1_distance(rearrange_decreasing(star), star));
    }
    out.push_back(Metric::check("max_energy_increase", energy_gain, 1e-8));
    out.push_back(Metric::check("max_attraction_change", attraction, 1e-6));
    out.push_back(Metric::check("max_repulsion_change", repulsion, 1e-6));
    out.push_back(Metric::check("max_mass_change", masses, 1e-8));
    out.push_back(Metric::check("max_second_moment_increase", moment_gain, 1e-12));
    out.push_back(Metric::check("idempotence_l1", idempotence, 0.0));
}

inline void scenario_convexity(const ScenarioConfig& sc, std::vector<Metric>& out)
{
    const auto cfg = sc.atom();
    Rng rng(sc.seed);
    const auto grid = sc.grid.make();
    double min_gap = std::numeric_limits<double>::infinity();
    double min_rel_gap = std::numeric_limits<double>::infinity();
    auto sigma_of = [&](const RadialProfile& p) { return SubstitutedProfile(grid, {p.values().begin(), p.values().end()}); };
    for (int i = 0; i < 100; ++i) {
        const auto a = random_step_profile(rng, grid, Space::Momentum, Ordering::Unordered);
        const auto b = random_step_profile(rng, grid, Space::Momentum, Ordering::Unordered);
        std::vector<double> mid(grid.size());
        for (std::size_t j = 0; j < mid.size(); ++j)
            mid[j] = 0.5 * (a[j] + b[j]);
        const double ea = energy_s(sigma_of(a), cfg), eb = energy_s(sigma_of(b), cfg);
        const double em = energy_s(SubstitutedProfile(grid, mid), cfg);
        const double gap = 0.5 * (ea + eb) - em;
        min_gap = std::min(min_gap, gap);
        min_rel_gap = std::min(min_rel_gap, gap / std::max({std::abs(ea), std::abs(eb), std::abs(em)}));
    }
    out.push_back(Metric::check("min_midpoint_gap", min_gap, 0.0, Relation::AtLeast));
    out.push_back(Metric::check("min_relative_gap", min_rel_gap, 0.0, Relation::Above));
}

inline void scenario_infimum_equality(const ScenarioConfig& sc, std::vector<Metric>& out)
{
    const auto cfg = sc.atom();
    require_minimizer(cfg, "infimum-equality");
    const auto m = tf_minimizer(cfg, sc.grid.n, sc.tol);
    const double etf = energy_tf(m.rho, cfg).total;
    const double emtf = energy_mtf(m.tau, cfg).total;
    out.push_back(Metric::check("energy_duality_residual", rel_diff(emtf, etf), 1e-4));
    out.push_back(Metric::check("mass_residual_rho", rel_diff(mass(m.rho), cfg.N()), 1e-4));
    out.push_back(Metric::check("mass_residual_tau", rel_diff(mass(m.tau), cfg.N()), 1e-4));
    if (m.sol.neutral())
        out.push_back(Metric::check("closed_form_energy_residual", rel_diff(etf, tf_neutral_energy(m.sol, cfg)), 1e-3));

    // no density of the same mass does better
    Rng rng(sc.seed);
    const auto grid = make_grid(sc.grid.scheme, sc.grid.n, sc.grid.r_min, sc.grid.r_max);
    double min_excess = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 50; ++i) {
        const auto p = random_step_profile(rng, grid, Space::Position, Ordering::Unordered);
        const auto rho = rearrange_decreasing(p).scaled(cfg.N() / mass(p));
        min_excess = std::min(min_excess, energy_tf(rho, cfg).total - etf);
    }
    out.push_back(Metric::check("min_energy_excess_random", min_excess, 0.0, Relation::AtLeast));
}

inline void scenario_minimizer_map(const ScenarioConfig& sc, std::vector<Metric>& out)
{
    const auto cfg = sc.atom();
    require_minimizer(cfg, "minimizer-map");
    const auto m = tf_minimizer(cfg, sc.grid.n, sc.tol);
    const double e_ref = energy_mtf(m.tau, cfg).total;
    const auto direct = direct_minimize_mtf(cfg, default_momentum_grid(cfg, sc.grid.n), 500, sc.tol);
    out.push_back(Metric::check("direct_converged", direct.converged ? 1.0 : 0.0, 1.0, Relation::AtLeast));
    out.push_back(Metric::check("direct_energy_residual", rel_diff(direct.energy, e_ref), 1e-3));
    out.push_back(Metric::check("direct_l1_residual", l1_distance(direct.tau, m.tau) / mass(m.tau), 1e-2));

    // mass-preserving perturbations of T(rho_m) raise the energy
    Rng rng(sc.seed);
    double min_rise = std::numeric_limits<double>::infinity();
    const double n_mass = mass(m.tau);
    for (int i = 0; i < 20; ++i) {
        const auto bump = random_step_profile(rng, m.tau.grid(), Space::Momentum, Ordering::Unordered);
        const double eps = 0.05 * n_mass / mass(bump);
        std::vector<double> v(m.tau.size());
        for (std::size_t j = 0; j < v.size(); ++j)
            v[j] = m.tau[j] + eps * bump[j];
        const RadialProfile raw(m.tau.grid(), std::move(v), Space::Momentum);
        const auto perturbed = rearrange_decreasing(raw).scaled(n_mass / mass(raw));
        min_rise = std::min(min_rise, (energy_mtf(perturbed, cfg).total - e_ref) / std::abs(e_ref));
    }
    out.push_back(Metric::check("min_relative_energy_rise", min_rise, 0.0, Relation::Above));
}

inline void scenario_repulsion_paths(const ScenarioConfig& sc, std::vector<Metric>& out)
{
    const auto cfg = sc.atom();
    Rng rng(sc.seed);
    const auto grid = sc.grid.make();
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto tau = random_step_profile(rng, grid, Space::Momentum,
                                             i % 2 == 0 ? Ordering::Decreasing : Ordering::Unordered);
        worst = std::max(worst, rel_diff(repulsion_m_direct(tau, cfg), repulsion_m_layercake(tau, cfg)));
    }
    out.push_back(Metric::check("max_path_residual", worst, 1e-5));
    const auto ball = ball_profile(grid, Space::Momentum, grid[grid.size() / 2]);
    out.push_back(Metric::check("ball_path_residual",
                                rel_diff(repulsion_m_direct(ball, cfg), repulsion_m_layercake(ball, cfg)), 1e-12));
}

inline void scenario_saturation(const ScenarioConfig& sc, std::vector<Metric>& out)
{
    const AtomConfig cfg(sc.Z, 1.5 * sc.Z, sc.q);
    const auto direct = direct_minimize_mtf(cfg, default_momentum_grid(cfg, sc.grid.n), 500, sc.tol);
    out.push_back(Metric::check("direct_converged", direct.converged ? 1.0 : 0.0, 1.0, Relation::AtLeast));
    out.push_back(Metric::check("mass_minus_Z_relative", std::abs(direct.mass - cfg.Z()) / cfg.Z(), 1e-2));
    bool refused = false;
    try {
        (void)solve_tf_ode(cfg, sc.tol);
    } catch (const std::domain_error&) {
        refused = true;
    }
    out.push_back(Metric::check("tf_solver_refuses_N_above_Z", refused ? 1.0 : 0.0, 1.0, Relation::AtLeast));
}

} // namespace detail

inline ScenarioReport run_scenario(const std::string& name, const ScenarioConfig& sc)
{
    using Fn = void (*)(const ScenarioConfig&, std::vector<Metric>&);
    static const std::vector<std::pair<std::string, Fn>> table{
        {"isometry", detail::scenario_isometry},
        {"duality", detail::scenario_duality},
        {"roundtrip", detail::scenario_roundtrip},
        {"rearrangement", detail::scenario_rearrangement},
        {"convexity", detail::scenario_convexity},
        {"infimum-equality", detail::scenario_infimum_equality},
        {"minimizer-map", detail::scenario_minimizer_map},
        {"repulsion-paths", detail::scenario_repulsion_paths},
        {"saturation", detail::scenario_saturation},
    };
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; });
    if (it == table.end())
        throw std::invalid_argument("unknown scenario '" + name + "'");

    ScenarioReport rep;
    rep.scenario = name;
    rep.config = sc;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        it->second(sc, rep.metrics);
    } catch (const std::exception& e) {
        rep.errored = true;
        rep.error = e.what();
    }
    rep.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.passed = !rep.errored && std::all_of(rep.metrics.begin(), rep.metrics.end(), [](const Metric& m) { return m.ok; });
    return rep;
}

inline ScenarioReport run_scenario(const std::string& name, const AtomConfig& cfg, const GridSpec& grid,
                                   std::uint64_t seed, double tol = 1e-12)
{
    return run_scenario(name, ScenarioConfig{cfg.Z(), cfg.N(), cfg.q(), grid, seed, tol});
}

// ---- serialization ----

inline nlohmann::json to_json(const ScenarioConfig& c)
{
    return {{"Z", c.Z},
            {"N", c.N},
            {"q", c.q},
            {"gamma", AtomConfig(c.Z, c.N, c.q).gamma()},
            {"grid", {{"scheme", to_string(c.grid.scheme)}, {"n", c.grid.n}, {"r_min", c.grid.r_min}, {"r_max", c.grid.r_max}}},
            {"seed", c.seed},
            {"tol", c.tol}};
}

inline GridScheme parse_scheme(const std::string& s)
{
    if (s == "log")
        return GridScheme::Log;
    if (s == "linear")
        return GridScheme::Linear;
    throw std::invalid_argument("unknown grid scheme '" + s + "'");
}

inline nlohmann::json to_json(const ScenarioReport& r)
{
    nlohmann::json metrics = nlohmann::json::array();
    for (const auto& m : r.metrics)
        metrics.push_back({{"name", m.name},
                           {"value", m.value},
                           {"tolerance", m.tolerance},
                           {"relation", to_string(m.relation)},
                           {"status", m.status()}});
    nlohmann::json j{{"scenario", r.scenario},
                     {"passed", r.passed},
                     {"metrics", metrics},
                     {"config", to_json(r.config)},
                     {"runtime_s", r.runtime_s}};
    if (r.errored) {
        j["errored"] = true;
        j["error"] = r.error;
    }
    return j;
}

inline ScenarioReport report_from_json(const nlohmann::json& j)
{
    ScenarioReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.passed = j.at("passed").get<bool>();
    r.runtime_s = j.at("runtime_s").get<double>();
    r.errored = j.value("errored", false);
    r.error = j.value("error", std::string());
    for (const auto& m : j.at("metrics")) {
        const auto rel = m.at("relation").get<std::string>();
        Metric x;
        x.name = m.at("name").get<std::string>();
        x.value = m.at("value").get<double>();
        x.tolerance = m.at("tolerance").get<double>();
        x.relation = rel == "<=" ? Relation::AtMost : rel == ">" ? Relation::Above : Relation::AtLeast;
        x.ok = m.at("status").get<std::string>() == "pass";
        r.metrics.push_back(std::move(x));
    }
    const auto& c = j.at("config");
    r.config.Z = c.at("Z").get<double>();
    r.config.N = c.at("N").get<double>();
    r.config.q = c.at("q").get<double>();
    r.config.seed = c.at("seed").get<std::uint64_t>();
    r.config.tol = c.at("tol").get<double>();
    const auto& g = c.at("grid");
    r.config.grid = {parse_scheme(g.at("scheme").get<std::string>()), g.at("n").get<std::size_t>(),
                     g.at("r_min").get<double>(), g.at("r_max").get<double>()};
    return r;
}

enum class ReportFormat { Json, Text };

inline std::string emit_report(const ScenarioReport& r, ReportFormat format)
{
    if (format == ReportFormat::Json)
        return to_json(r).dump(2);
    std::ostringstream os;
    os << "scenario " << r.scenario << ": " << (r.errored ? "ERROR" : r.passed ? "PASS" : "FAIL") << "  ("
       << std::fixed;
    os.precision(3);
    os << r.runtime_s << " s)\n";
    if (r.errored)
        os << "  error: " << r.error << '\n';
    os.unsetf(std::ios::floatfield);
    for (const auto& m : r.metrics) {
        char line[160];
        std::snprintf(line, sizeof line, "  %-32s %14.6e %2s %12.4e  %s\n", m.name.c_str(), m.value,
                      to_string(m.relation), m.tolerance, m.status());
        os << line;
    }
    return os.str();
}

inline std::string emit_reports(const std::vector<ScenarioReport>& rs, ReportFormat format)
{
    if (format == ReportFormat::Json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rs)
            arr.push_back(to_json(r));
        return arr.dump(2);
    }
    std::string s;
    for (const auto& r : rs)
        s += emit_report(r, format);
    return s;
}

/// 0 when every report passed, 2 when any errored, 1 otherwise.
inline int exit_code(const std::vector<ScenarioReport>& rs)
{
    if (std::any_of(rs.begin(), rs.end(), [](const ScenarioReport& r) { return r.errored; }))
        return 2;
    return std::all_of(rs.begin(), rs.end(), [](const ScenarioReport& r) { return r.passed; }) ? 0 : 1;
}

} // namespace mtf
