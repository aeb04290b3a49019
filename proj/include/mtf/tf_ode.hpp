#pragma once

// Thomas-Fermi screening function by shooting.
//
// The Euler-Lagrange equation of E_TF with rho(r) = gamma^{-3/2} (Z phi(r/b) / r)^{3/2}
// and b = gamma (4 pi)^{-2/3} Z^{-1/3} reduces to the parameter-free problem
//
//   phi'' = phi^{3/2} / sqrt(x),  phi(0) = 1,
//
// with phi -> 0 at infinity (N = Z) or phi(x0) = 0, x0 |phi'(x0)| = 1 - N/Z
// (N < Z). The fraction of Z enclosed within x is
//   E(x) = 1 - phi(x) + x phi'(x) = int_0^x sqrt(t) phi(t)^{3/2} dt,
// which is integrated alongside phi so that no cancellation enters.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "mtf/atom_config.hpp"

namespace mtf {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TFOdeOptions {
    /// The series expansion is used on [0, x_series].
    double x_series = 1e-4;
    /// Neutral solutions are tabulated out to this dimensionless radius.
    double neutral_extent = 1000.0;
    /// A shooting trajectory with no event before this radius is left
    /// unclassified.
    double classify_horizon = 1e6;
    double rel_tol = 1e-12;
    /// Relative disagreement between the two bracketing trajectories beyond
    /// which the neutral tail is re-shot from the last trusted point.
    double trust_tol = 1e-9;
    int samples_per_efold = 128;
};

/// Sampled dimensionless screening function.
class TFSolution {
public:
    struct Sample {
        double x, phi, dphi, enclosed;
    };

    TFSolution(std::vector<Sample> samples, double slope0, double x0, double length_scale, double ratio,
               double x_series)
        : samples_(std::move(samples)), slope0_(slope0), x0_(x0), b_(length_scale), ratio_(ratio),
          x_series_(x_series)
    {
    }

    double slope0() const noexcept { return slope0_; }
    /// Ionic cutoff; +infinity for the neutral atom.
    double x0() const noexcept { return x0_; }
    bool neutral() const noexcept { return std::isinf(x0_); }
    /// b = gamma (4 pi)^{-2/3} Z^{-1/3}.
    double length_scale() const noexcept { return b_; }
    double ratio() const noexcept { return ratio_; }
    /// Largest tabulated x.
    double extent() const noexcept { return samples_.back().x; }
    const std::vector<Sample>& samples() const noexcept { return samples_; }

    double phi(double x) const { return eval(x).phi; }
    double dphi(double x) const { return eval(x).dphi; }
    /// Fraction of Z inside dimensionless radius x.
    double enclosed_fraction(double x) const { return eval(x).enclosed; }

    /// int_a^b sqrt(t) phi(t)^{3/2} dt, accurate also for thin intervals.
    double enclosed_between(double a, double b) const
    {
        if (!(b > a))
            return 0.0;
        if (!neutral())
            b = std::min(b, x0_);
        if (!(b > a))
            return 0.0;
        if (b <= x_series_)
            return series_enclosed(b) - series_enclosed(a);
        if (a < x_series_)
            return series_enclosed(x_series_) - series_enclosed(a) + enclosed_between(x_series_, b);
        if (neutral() && a >= extent())
            return eval(b).enclosed - eval(a).enclosed;
        if (neutral() && b > extent())
            return enclosed_between(a, extent()) + enclosed_between(extent(), b);
        // one 8-point Gauss-Legendre rule per table interval
        double acc = 0.0;
        auto it = std::upper_bound(samples_.begin(), samples_.end(), a,
                                   [](double v, const Sample& s) { return v < s.x; });
        for (double lo = a; lo < b; ++it) {
            const double hi = it != samples_.end() && it->x < b ? it->x : b;
            acc += gauss_enclosed(lo, hi);
            lo = hi;
        }
        return acc;
    }

private:
    double gauss_enclosed(double a, double b) const
    {
        static constexpr double xs[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                         0.9602898564975363};
        static constexpr double ws[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                         0.1012285362903763};
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) {
            for (double sgn : {-1.0, 1.0}) {
                const double t = mid + sgn * half * xs[j];
                const double p = std::max(phi(t), 0.0);
                acc += ws[j] * std::sqrt(t) * p * std::sqrt(p);
            }
        }
        return acc * half;
    }

    Sample series(double x) const
    {
        const double s = slope0_, rx = std::sqrt(x);
        const double x32 = x * rx, x52 = x32 * x, x72 = x52 * x;
        return {x,
                1.0 + s * x + 4.0 / 3.0 * x32 + 0.4 * s * x52 + x * x * x / 3.0 + 3.0 * s * s / 70.0 * x72,
                s + 2.0 * rx + s * x32 + x * x + 0.15 * s * s * x52, series_enclosed(x)};
    }

    double series_enclosed(double x) const
    {
        const double s = slope0_, rx = std::sqrt(x);
        const double x32 = x * rx;
        return 2.0 / 3.0 * x32 + 0.6 * s * x32 * x + 2.0 / 3.0 * x * x * x + 3.0 / 28.0 * s * s * x32 * x * x;
    }

    Sample eval(double x) const
    {
        if (x <= x_series_)
            return series(std::max(x, 0.0));
        if (!neutral() && x >= x0_)
            return {x, 0.0, 0.0, ratio_};
        const auto& last = samples_.back();
        if (x >= last.x) {
            // beyond the table the neutral solution follows phi ~ x^{-3}
            const double f = std::pow(last.x / x, 3.0);
            const double ph = last.phi * f;
            return {x, ph, -3.0 * ph / x, 1.0 - 4.0 * ph};
        }
        auto it = std::upper_bound(samples_.begin(), samples_.end(), x,
                                   [](double v, const Sample& s) { return v < s.x; });
        if (it == samples_.begin())
            return series(x);
        const Sample& hi = *it;
        const Sample& lo = *(it - 1);
        const double h = hi.x - lo.x;
        const double t = (x - lo.x) / h;
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        auto ddphi = [](const Sample& s) {
            const double p = std::max(s.phi, 0.0);
            return p * std::sqrt(p) / std::sqrt(s.x);
        };
        auto denc = [](const Sample& s) {
            const double p = std::max(s.phi, 0.0);
            return std::sqrt(s.x) * p * std::sqrt(p);
        };
        Sample out;
        out.x = x;
        out.phi = h00 * lo.phi + h10 * h * lo.dphi + h01 * hi.phi + h11 * h * hi.dphi;
        out.dphi = h00 * lo.dphi + h10 * h * ddphi(lo) + h01 * hi.dphi + h11 * h * ddphi(hi);
        out.enclosed = h00 * lo.enclosed + h10 * h * denc(lo) + h01 * hi.enclosed + h11 * h * denc(hi);
        return out;
    }

    std::vector<Sample> samples_;
    double slope0_;
    double x0_;
    double b_;
    double ratio_;
    double x_series_;
};

inline double tf_length_scale(const AtomConfig& cfg)
{
    return cfg.gamma() * std::pow(4.0 * std::numbers::pi, -2.0 / 3.0) * std::cbrt(1.0 / cfg.Z());
}

namespace detail {

using OdeState = std::array<double, 3>; // phi, phi', enclosed fraction

struct TFRhs {
    void operator()(const OdeState& y, OdeState& dy, double x) const
    {
        const double p = std::max(y[0], 0.0);
        const double p32 = p * std::sqrt(p);
        const double rx = std::sqrt(x);
        dy[0] = y[1];
        dy[1] = p32 / rx;
        dy[2] = rx * p32;
    }
};

enum class Fate { Extinct, Diverged, Undetermined };

struct Trajectory {
    Fate fate = Fate::Undetermined;
    double x_event = 0.0;     // root of phi for Extinct
    OdeState at_event{};      // state at x_event
    std::vector<TFSolution::Sample> samples;
};

// Integrates from (x_start, y_start) until phi crosses zero, phi' turns
// positive, or x_stop is passed. Samples are recorded at the requested points
// that precede the event.
inline Trajectory shoot(double x_start, OdeState y, double x_stop, const std::vector<double>& sample_x,
                        const TFOdeOptions& opt)
{
    namespace ode = boost::numeric::odeint;
    const double scale = std::max(std::abs(y[0]), 1e-300);
    auto stepper = ode::make_dense_output(opt.rel_tol * 1e-3 * scale, opt.rel_tol,
                                          ode::runge_kutta_dopri5<OdeState>());
    stepper.initialize(y, x_start, 1e-3 * x_start);
    Trajectory tr;
    auto next_sample = std::upper_bound(sample_x.begin(), sample_x.end(), x_start);
    TFRhs rhs;

    auto record_until = [&](double limit) {
        OdeState s;
        while (next_sample != sample_x.end() && *next_sample <= limit) {
            stepper.calc_state(*next_sample, s);
            tr.samples.push_back({*next_sample, s[0], s[1], s[2]});
            ++next_sample;
        }
    };

    for (int steps = 0; steps < 2'000'000; ++steps) {
        const auto [t0, t1] = stepper.do_step(rhs);
        const OdeState& cur = stepper.current_state();
        if (cur[0] <= 0.0) {
            double lo = t0, hi = t1;
            OdeState s;
            for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                stepper.calc_state(mid, s);
                (s[0] > 0.0 ? lo : hi) = mid;
            }
            // linear refinement inside the final bracket
            OdeState slo, shi;
            stepper.calc_state(lo, slo);
            stepper.calc_state(hi, shi);
            const double den = slo[0] - shi[0];
            tr.x_event = den > 0.0 ? lo + (hi - lo) * slo[0] / den : hi;
            stepper.calc_state(tr.x_event, tr.at_event);
            tr.at_event[0] = 0.0;
            record_until(std::nextafter(tr.x_event, 0.0));
            tr.fate = Fate::Extinct;
            return tr;
        }
        if (cur[1] > 0.0) {
            record_until(t0);
            tr.fate = Fate::Diverged;
            tr.x_event = t1;
            return tr;
        }
        if (t1 >= x_stop) {
            record_until(x_stop);
            tr.fate = Fate::Undetermined;
            tr.x_event = t1;
            return tr;
        }
        record_until(t1);
    }
    throw SolverError("TF shooting: step limit exceeded");
}

inline OdeState series_state(double x, double s)
{
    const double rx = std::sqrt(x), x32 = x * rx, x52 = x32 * x, x72 = x52 * x;
    return {1.0 + s * x + 4.0 / 3.0 * x32 + 0.4 * s * x52 + x * x * x / 3.0 + 3.0 * s * s / 70.0 * x72,
            s + 2.0 * rx + s * x32 + x * x + 0.15 * s * s * x52,
            2.0 / 3.0 * x32 + 0.6 * s * x52 + 2.0 / 3.0 * x * x * x + 3.0 / 28.0 * s * s * x72};
}

struct Bracket {
    double extinct;   // parameter whose trajectory hits zero
    double diverged;  // parameter whose trajectory turns upward
    int iterations = 0;
};

// Bisection on the extinction/divergence dichotomy. `make` maps the shooting
// parameter to a trajectory. The bracket invariant (one extinct, one diverged
// end) is checked on entry and kept on every step.
template <class Make>
Bracket bisect_dichotomy(double extinct, double diverged, Make&& make)
{
    if (make(extinct).fate != Fate::Extinct || make(diverged).fate != Fate::Diverged) {
        std::ostringstream os;
        os << "TF shooting: invalid bracket [" << extinct << ", " << diverged << "]";
        throw SolverError(os.str());
    }
    Bracket br{extinct, diverged, 0};
    for (; br.iterations < 200; ++br.iterations) {
        const double mid = 0.5 * (br.extinct + br.diverged);
        if (mid == br.extinct || mid == br.diverged)
            break;
        const Fate f = make(mid).fate;
        if (f == Fate::Extinct)
            br.extinct = mid;
        else if (f == Fate::Diverged)
            br.diverged = mid;
        else
            break;
    }
    return br;
}

inline std::vector<double> sample_points(double x_from, double x_to, int per_efold)
{
    std::vector<double> xs;
    const double span = std::log(x_to / x_from);
    const auto n = static_cast<std::size_t>(std::ceil(span * per_efold));
    xs.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        xs.push_back(x_from * std::exp(span * static_cast<double>(i) / static_cast<double>(n)));
    xs.back() = x_to;
    return xs;
}

struct NeutralResult {
    double slope0;
    Bracket first_bracket;
    std::vector<TFSolution::Sample> samples;
};

inline NeutralResult solve_neutral(const TFOdeOptions& opt)
{
    const auto xs = sample_points(opt.x_series, opt.neutral_extent, opt.samples_per_efold);
    const double xs0 = opt.x_series;
    auto from_slope = [&](double s) { return shoot(xs0, series_state(xs0, s), opt.classify_horizon, {}, opt); };
    const Bracket br = bisect_dichotomy(-2.0, -1.0, from_slope);

    NeutralResult res;
    res.slope0 = 0.5 * (br.extinct + br.diverged);
    res.first_bracket = br;
    const OdeState y0 = series_state(xs0, res.slope0);
    res.samples.push_back({xs0, y0[0], y0[1], y0[2]});

    // Follows the two bracketing trajectories while they agree, keeps their
    // mean, then re-shoots phi' from the last trusted sample.
    auto extend = [&](double x_start, const OdeState& y_lo, const OdeState& y_hi, double x_stop) {
        auto a = shoot(x_start, y_lo, x_stop, xs, opt).samples;
        auto b = shoot(x_start, y_hi, x_stop, xs, opt).samples;
        const std::size_t m = std::min(a.size(), b.size());
        std::size_t kept = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const double mean = 0.5 * (a[i].phi + b[i].phi);
            if (!(mean > 0.0) || std::abs(a[i].phi - b[i].phi) > opt.trust_tol * mean)
                break;
            res.samples.push_back({a[i].x, mean, 0.5 * (a[i].dphi + b[i].dphi), 0.5 * (a[i].enclosed + b[i].enclosed)});
            ++kept;
        }
        return kept;
    };

    const double far = opt.neutral_extent * 2.0;
    extend(xs0, series_state(xs0, br.extinct), series_state(xs0, br.diverged), far);
    for (int stage = 0; stage < 64 && res.samples.back().x < opt.neutral_extent; ++stage) {
        const auto start = res.samples.back();
        const double x_start = start.x;
        auto from_dphi = [&](double p) {
            return shoot(x_start, OdeState{start.phi, p, start.enclosed}, opt.classify_horizon, {}, opt);
        };
        double ext = start.dphi * 1.05, div = start.dphi * 0.95;
        for (int k = 0; k < 20 && from_dphi(ext).fate != Fate::Extinct; ++k)
            ext *= 1.5;
        for (int k = 0; k < 20 && from_dphi(div).fate != Fate::Diverged; ++k)
            div *= 0.5;
        const Bracket sb = bisect_dichotomy(ext, div, from_dphi);
        const std::size_t kept =
            extend(x_start, OdeState{start.phi, sb.extinct, start.enclosed},
                   OdeState{start.phi, sb.diverged, start.enclosed}, far);
        if (kept == 0)
            throw SolverError("TF shooting: neutral tail continuation stalled at x = " + std::to_string(x_start));
    }
    return res;
}

} // namespace detail

/// Solves the dimensionless TF problem for cfg (0 < N <= Z). For N = Z the
/// initial slope is found by bisection on the extinction/divergence dichotomy
/// to full double precision; for N < Z the slope is bisected on the ionic
/// condition x0 |phi'(x0)| = 1 - N/Z until the bracket is narrower than tol.
inline TFSolution solve_tf_ode(const AtomConfig& cfg, double tol = 1e-12, const TFOdeOptions& opt = {})
{
    if (cfg.N() > cfg.Z())
        throw std::domain_error("no TF minimizer beyond neutrality (N > Z)");
    if (!(cfg.N() > 0.0))
        throw std::domain_error("TF solver needs N > 0");
    if (!(tol > 0.0))
        throw std::invalid_argument("TF solver: tol must be positive");

    const double b = tf_length_scale(cfg);
    const double ratio = cfg.N() / cfg.Z();
    auto neutral = detail::solve_neutral(opt);
    if (ratio >= 1.0 - 1e-12)
        return TFSolution(std::move(neutral.samples), neutral.slope0, std::numeric_limits<double>::infinity(), b, 1.0,
                          opt.x_series);

    const double target = 1.0 - ratio;
    const double xs0 = opt.x_series;
    auto ionic = [&](double s) {
        auto tr = detail::shoot(xs0, detail::series_state(xs0, s), opt.classify_horizon, {}, opt);
        if (tr.fate != detail::Fate::Extinct)
            return -target;
        return tr.x_event * std::abs(tr.at_event[1]) - target;
    };
    double steep = -4.0;
    for (int k = 0; k < 60 && ionic(steep) <= 0.0; ++k)
        steep *= 2.0;
    double shallow = neutral.first_bracket.extinct;
    if (!(ionic(steep) > 0.0) || !(ionic(shallow) < 0.0)) {
        std::ostringstream os;
        os << "TF shooting: cannot bracket ionic slope for N/Z = " << ratio << " in [" << steep << ", " << shallow
           << "]";
        throw SolverError(os.str());
    }
    for (int it = 0; it < 200 && shallow - steep > tol * std::abs(shallow); ++it) {
        const double mid = 0.5 * (steep + shallow);
        if (mid == steep || mid == shallow)
            break;
        (ionic(mid) > 0.0 ? steep : shallow) = mid;
    }
    const double slope = 0.5 * (steep + shallow);
    const auto xs = detail::sample_points(xs0, 1e6, opt.samples_per_efold);
    auto tr = detail::shoot(xs0, detail::series_state(xs0, slope), 1e6, xs, opt);
    if (tr.fate != detail::Fate::Extinct)
        throw SolverError("TF shooting: ionic trajectory did not reach phi = 0");
    std::vector<TFSolution::Sample> samples;
    const auto y0 = detail::series_state(xs0, slope);
    samples.push_back({xs0, y0[0], y0[1], y0[2]});
    samples.insert(samples.end(), tr.samples.begin(), tr.samples.end());
    samples.push_back({tr.x_event, 0.0, tr.at_event[1], tr.at_event[2]});
    return TFSolution(std::move(samples), slope, tr.x_event, b, ratio, xs0);
}

} // namespace mtf
