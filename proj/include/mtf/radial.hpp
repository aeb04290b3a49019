#pragma once

// Radial grids, shell quadrature, domain checks and decreasing rearrangement.
//
// A RadialProfile is a step function on spherical shells: the value f_i stored
// at node r_i holds on the shell (r_{i-1}, r_i], and the innermost value holds
// on the ball (0, r_0]. Beyond r_max the profile is zero. All radial integrals
// below are evaluated in closed form per shell, so they are exact for this
// representation up to round-off.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mtf {

inline constexpr double pi = std::numbers::pi;
inline constexpr double four_pi = 4.0 * std::numbers::pi;

class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept
    {
        add(x);
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// (b^p - a^p) / p for 0 <= a < b, without cancellation for thin shells.
inline double shell_power_diff(double a, double b, double p)
{
    if (a <= 0.0)
        return std::pow(b, p) / p;
    return std::pow(a, p) * std::expm1(p * std::log1p((b - a) / a)) / p;
}

/// Volume of the shell a < |x| <= b.
inline double shell_volume(double a, double b) { return four_pi * shell_power_diff(a, b, 3.0); }

enum class GridScheme { Log, Linear, Explicit };
enum class Space { Position, Momentum };

inline const char* to_string(Space s) { return s == Space::Position ? "position" : "momentum"; }
inline const char* to_string(GridScheme s)
{
    switch (s) {
    case GridScheme::Log: return "log";
    case GridScheme::Linear: return "linear";
    default: return "explicit";
    }
}

inline constexpr std::size_t min_grid_nodes = 16;

class RadialGrid {
public:
    explicit RadialGrid(std::vector<double> nodes, GridScheme scheme = GridScheme::Explicit)
        : nodes_(std::move(nodes)), scheme_(scheme)
    {
        if (nodes_.size() < min_grid_nodes)
            throw GridError("radial grid needs at least " + std::to_string(min_grid_nodes) + " nodes, got "
                            + std::to_string(nodes_.size()));
        if (!(nodes_.front() > 0.0))
            throw GridError("radial grid: first node must be positive");
        for (std::size_t i = 1; i < nodes_.size(); ++i) {
            if (!(nodes_[i] > nodes_[i - 1]) || !std::isfinite(nodes_[i]))
                throw GridError("radial grid: nodes must be finite and strictly increasing");
        }
    }

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    double operator[](std::size_t i) const { return nodes_[i]; }
    double r_min() const noexcept { return nodes_.front(); }
    double r_max() const noexcept { return nodes_.back(); }
    GridScheme scheme() const noexcept { return scheme_; }

    /// Inner radius of shell i (0 for the innermost ball).
    double inner(std::size_t i) const { return i == 0 ? 0.0 : nodes_[i - 1]; }

    std::vector<double> shell_volumes() const
    {
        std::vector<double> v(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            v[i] = shell_volume(inner(i), nodes_[i]);
        return v;
    }

    /// 4 pi (b^{3+k} - a^{3+k}) / (3+k) per shell.
    std::vector<double> shell_moments(int k) const
    {
        if (k <= -3)
            throw GridError("radial moment exponent must exceed -3");
        const double p = 3.0 + k;
        std::vector<double> w(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            w[i] = four_pi * shell_power_diff(inner(i), nodes_[i], p);
        return w;
    }

    friend bool operator==(const RadialGrid&, const RadialGrid&) = default;

private:
    std::vector<double> nodes_;
    GridScheme scheme_;
};

/// n nodes from r_min to r_max: geometric progression (Log) or arithmetic (Linear).
inline RadialGrid make_grid(GridScheme scheme, std::size_t n, double r_min, double r_max)
{
    if (n < min_grid_nodes)
        throw GridError("make_grid: n must be at least " + std::to_string(min_grid_nodes));
    if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max))
        throw GridError("make_grid: need 0 < r_min < r_max");
    std::vector<double> x(n);
    const double last = static_cast<double>(n - 1);
    switch (scheme) {
    case GridScheme::Linear:
        for (std::size_t i = 0; i < n; ++i)
            x[i] = r_min + (r_max - r_min) * (static_cast<double>(i) / last);
        break;
    case GridScheme::Log: {
        const double lr = std::log(r_max / r_min);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = r_min * std::exp(lr * (static_cast<double>(i) / last));
        break;
    }
    default: throw GridError("make_grid: scheme must be log or linear");
    }
    x.front() = r_min;
    x.back() = r_max;
    return RadialGrid(std::move(x), scheme);
}

enum class Sampling {
    Node,       ///< f_i = f(r_i)
    ShellMean,  ///< f_i = volume average of f over shell i
};

class RadialProfile {
public:
    RadialProfile(RadialGrid grid, std::vector<double> values, Space space)
        : grid_(std::move(grid)), values_(std::move(values)), space_(space)
    {
        if (values_.size() != grid_.size())
            throw GridError("radial profile: value count does not match grid size");
    }

    static RadialProfile zeros(RadialGrid grid, Space space)
    {
        std::vector<double> v(grid.size(), 0.0);
        return RadialProfile(std::move(grid), std::move(v), space);
    }

    /// Discretize a radial function. ShellMean integrates f r^2 per shell with
    /// 8-point Gauss-Legendre, which preserves the mass of smooth f.
    static RadialProfile from_function(RadialGrid grid, const std::function<double(double)>& f, Space space,
                                       Sampling sampling = Sampling::ShellMean)
    {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (sampling == Sampling::Node) {
                v[i] = f(grid[i]);
                continue;
            }
            const double a = grid.inner(i), b = grid[i];
            v[i] = shell_mean(f, a, b);
        }
        return RadialProfile(std::move(grid), std::move(v), space);
    }

    const RadialGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    Space space() const noexcept { return space_; }

    /// Step-function evaluation: value of the shell containing r, 0 beyond r_max.
    double at(double r) const
    {
        const auto nodes = grid_.nodes();
        if (r > nodes.back())
            return 0.0;
        const auto it = std::lower_bound(nodes.begin(), nodes.end(), r);
        return values_[static_cast<std::size_t>(it - nodes.begin())];
    }

    double max_value() const { return *std::max_element(values_.begin(), values_.end()); }

    RadialProfile scaled(double lambda) const
    {
        std::vector<double> v(values_);
        for (double& x : v)
            x *= lambda;
        return RadialProfile(grid_, std::move(v), space_);
    }

    template <class F>
    RadialProfile mapped(F&& f) const
    {
        std::vector<double> v(values_.size());
        std::transform(values_.begin(), values_.end(), v.begin(), std::forward<F>(f));
        return RadialProfile(grid_, std::move(v), space_);
    }

private:
    static double shell_mean(const std::function<double(double)>& f, double a, double b)
    {
        // Gauss-Legendre nodes/weights on [-1, 1].
        static constexpr double xs[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                         0.9602898564975363};
        static constexpr double ws[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                         0.1012285362903763};
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        CompensatedSum acc;
        for (int j = 0; j < 4; ++j) {
            for (double sgn : {-1.0, 1.0}) {
                const double r = mid + sgn * half * xs[j];
                acc += ws[j] * r * r * f(r);
            }
        }
        return acc.value() * half / shell_power_diff(a, b, 3.0);
    }

    RadialGrid grid_;
    std::vector<double> values_;
    Space space_;
};

/// 4 pi * int_0^{r_max} r^{2+k} f(r) dr for the step profile, k > -3.
inline double integrate_radial(const RadialProfile& p, int k)
{
    const auto w = p.grid().shell_moments(k);
    CompensatedSum acc;
    for (std::size_t i = 0; i < w.size(); ++i)
        acc += w[i] * p[i];
    return acc.value();
}

/// integrate_radial applied to g(f) without materializing g(f).
template <class G>
double integrate_radial_of(const RadialProfile& p, int k, G&& g)
{
    const auto w = p.grid().shell_moments(k);
    CompensatedSum acc;
    for (std::size_t i = 0; i < w.size(); ++i)
        acc += w[i] * g(p[i]);
    return acc.value();
}

/// L1 norm of a nonnegative density.
inline double mass(const RadialProfile& p) { return integrate_radial(p, 0); }

inline bool is_nonincreasing(const RadialProfile& p)
{
    const auto v = p.values();
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1])
            return false;
    return true;
}

inline constexpr double default_tail_tolerance = 1e-10;

struct DomainReport {
    double mass = 0.0;
    /// int xi^2 tau (momentum space) or int rho^{5/3} (position space).
    double second_moment = 0.0;
    bool in_domain = true;
    std::string reason;
};

/// Finite-grid membership check for the density domains. Never throws for bad
/// values; the verdict and reason are reported instead.
inline DomainReport validate_domain(const RadialProfile& p, double tail_tolerance = default_tail_tolerance)
{
    DomainReport rep;
    const auto v = p.values();
    for (double x : v) {
        if (!std::isfinite(x)) {
            rep.in_domain = false;
            rep.reason = "non-finite value";
            return rep;
        }
    }
    const bool negative = std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; });
    rep.mass = mass(p);
    if (p.space() == Space::Momentum)
        rep.second_moment = integrate_radial(p, 2);
    else
        rep.second_moment = integrate_radial_of(p, 0, [](double x) { return std::pow(std::abs(x), 5.0 / 3.0); });
    if (negative) {
        rep.in_domain = false;
        rep.reason = "negative value";
        return rep;
    }
    const double vmax = p.max_value();
    if (vmax > 0.0 && !(v.back() <= tail_tolerance * vmax)) {
        rep.in_domain = false;
        rep.reason = "tail violation";
        return rep;
    }
    if (!std::isfinite(rep.mass) || !std::isfinite(rep.second_moment)) {
        rep.in_domain = false;
        rep.reason = "non-finite integral";
    }
    return rep;
}

/// Throws DomainError unless p passes validate_domain.
inline void require_domain(const RadialProfile& p, const char* who)
{
    const auto rep = validate_domain(p);
    if (!rep.in_domain)
        throw DomainError(std::string(who) + ": profile outside the density domain (" + rep.reason + ")");
}

inline void require_space(const RadialProfile& p, Space s, const char* who)
{
    if (p.space() != s)
        throw DomainError(std::string(who) + ": expected a " + to_string(s) + " profile");
}

/// Radially decreasing profile equimeasurable with p.
///
/// Shells are sorted by value (largest first, stable) and re-stacked on the
/// cumulative volume coordinate v = (4 pi / 3) r^3, so the output shells have
/// the input shell volumes. Nonincreasing input is returned unchanged.
inline RadialProfile rearrange_decreasing(const RadialProfile& p)
{
    if (is_nonincreasing(p))
        return p;
    const auto vol = p.grid().shell_volumes();
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });

    std::vector<double> nodes(p.size()), values(p.size());
    CompensatedSum cum;
    for (std::size_t j = 0; j < order.size(); ++j) {
        cum += vol[order[j]];
        nodes[j] = std::cbrt(cum.value() / (four_pi / 3.0));
        values[j] = p[order[j]];
    }
    nodes.back() = std::max(nodes.back(), p.grid().r_max());
    // cube roots of distinct cumulative volumes stay strictly increasing unless
    // a shell volume underflows relative to the running total
    for (std::size_t j = 1; j < nodes.size(); ++j)
        if (!(nodes[j] > nodes[j - 1]))
            nodes[j] = std::nextafter(nodes[j - 1], HUGE_VAL);
    return RadialProfile(RadialGrid(std::move(nodes)), std::move(values), p.space());
}

/// Exact L1 distance between two step profiles, possibly on different grids.
inline double l1_distance(const RadialProfile& f, const RadialProfile& g)
{
    const auto a = f.grid().nodes();
    const auto b = g.grid().nodes();
    std::vector<double> cuts;
    cuts.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(cuts));
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    CompensatedSum acc;
    std::size_t i = 0, j = 0;
    double lo = 0.0;
    for (double hi : cuts) {
        while (i < a.size() && a[i] < hi)
            ++i;
        while (j < b.size() && b[j] < hi)
            ++j;
        const double fv = i < a.size() ? f[i] : 0.0;
        const double gv = j < b.size() ? g[j] : 0.0;
        acc += std::abs(fv - gv) * shell_volume(lo, hi);
        lo = hi;
    }
    return acc.value();
}

} // namespace mtf
