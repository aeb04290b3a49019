#pragma once

// Seeded random step profiles for property checks.
//
// std::mt19937_64 has a fully specified output sequence; the distributions in
// <random> do not, so the conversions to doubles and indices are done here to
// keep runs reproducible across standard libraries.

#include <algorithm>
#include <cstddef>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "mtf/radial.hpp"

namespace mtf {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform on {0, ..., n - 1}.
    std::size_t index(std::size_t n) { return std::min(static_cast<std::size_t>(uniform() * static_cast<double>(n)), n - 1); }

private:
    std::mt19937_64 eng_;
};

enum class Ordering { Decreasing, Unordered };

struct StepShape {
    std::size_t min_pieces = 3;
    std::size_t max_pieces = 12;
    double min_level = 0.05;
    double max_level = 2.0;
    /// Probability that an unordered piece is empty (an annulus gap).
    double gap_probability = 0.2;
};

/// Piecewise-constant profile on `grid` with random breakpoints and levels and
/// at least one trailing zero node. Decreasing profiles are strictly
/// decreasing across pieces; unordered ones may contain gaps.
inline RadialProfile random_step_profile(Rng& rng, const RadialGrid& grid, Space space, Ordering ordering,
                                         const StepShape& shape = {})
{
    const std::size_t n = grid.size();
    const std::size_t span = shape.max_pieces - shape.min_pieces + 1;
    std::size_t pieces = shape.min_pieces + rng.index(span);
    pieces = std::min(pieces, n / 2);

    // piece k covers nodes [cut[k], cut[k + 1]); the support ends before n - 1
    const std::size_t end = std::max<std::size_t>(pieces + 1, n / 4 + rng.index(n - n / 4 - 1));
    std::vector<std::size_t> cut{0};
    while (cut.size() < pieces) {
        const std::size_t c = 1 + rng.index(end - 1);
        if (std::find(cut.begin(), cut.end(), c) == cut.end())
            cut.push_back(c);
    }
    std::sort(cut.begin(), cut.end());
    cut.push_back(end);

    std::vector<double> level(pieces);
    for (double& l : level)
        l = rng.uniform(shape.min_level, shape.max_level);
    if (ordering == Ordering::Decreasing) {
        std::sort(level.begin(), level.end(), std::greater<>());
        for (std::size_t k = 1; k < pieces; ++k)
            if (!(level[k] < level[k - 1]))
                level[k] = std::nextafter(level[k - 1], 0.0);
    } else {
        for (std::size_t k = 0; k < pieces; ++k)
            if (rng.uniform() < shape.gap_probability)
                level[k] = 0.0;
    }

    std::vector<double> v(n, 0.0);
    for (std::size_t k = 0; k < pieces; ++k)
        for (std::size_t i = cut[k]; i < cut[k + 1]; ++i)
            v[i] = level[k];
    return RadialProfile(grid, std::move(v), space);
}

/// Uniform ball of the given level on all nodes r_i <= radius.
inline RadialProfile ball_profile(const RadialGrid& grid, Space space, double radius, double level = 1.0)
{
    std::vector<double> v(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] <= radius)
            v[i] = level;
    return RadialProfile(grid, std::move(v), space);
}

} // namespace mtf
