#pragma once

// Profile CSV interchange.
//
//   # mtf-profile v1 space=<position|momentum> gamma=<decimal>
//   r,value
//   ...
//
// The header row "r,value" is optional on input. Values are written with 17
// significant digits so that a write/read cycle is lossless.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtf/radial.hpp"

namespace mtf {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProfileFile {
    RadialProfile profile;
    double gamma;
};

inline constexpr const char* profile_magic = "# mtf-profile";
inline constexpr const char* profile_version = "v1";

inline void write_profile(std::ostream& os, const RadialProfile& p, double gamma)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", gamma);
    os << profile_magic << ' ' << profile_version << " space=" << to_string(p.space()) << " gamma=" << buf << '\n';
    os << "r,value\n";
    const auto& g = p.grid();
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,", g[i]);
        os << buf;
        std::snprintf(buf, sizeof buf, "%.17g", p[i]);
        os << buf << '\n';
    }
}

namespace detail {

inline double parse_double(const std::string& s, const std::string& what, std::size_t line)
{
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw FormatError("profile line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
    return v;
}

} // namespace detail

/// Reads a profile. When `expected_gamma` is given, a header gamma that
/// differs by more than 1e-12 relative is rejected.
inline ProfileFile read_profile(std::istream& is, std::optional<double> expected_gamma = std::nullopt)
{
    std::string line;
    if (!std::getline(is, line))
        throw FormatError("profile: empty input");
    std::istringstream head(line);
    std::string hash, tag, version;
    head >> hash >> tag >> version;
    if (hash + " " + tag != profile_magic)
        throw FormatError("profile: missing '# mtf-profile' header");
    if (version != profile_version)
        throw FormatError("profile: unsupported version '" + version + "'");
    std::optional<Space> space;
    std::optional<double> gamma;
    std::string field;
    while (head >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos)
            throw FormatError("profile: malformed header field '" + field + "'");
        const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "space") {
            if (val == "position")
                space = Space::Position;
            else if (val == "momentum")
                space = Space::Momentum;
            else
                throw FormatError("profile: unknown space '" + val + "'");
        } else if (key == "gamma") {
            gamma = detail::parse_double(val, "gamma", 1);
        }
    }
    if (!space || !gamma)
        throw FormatError("profile: header needs space= and gamma=");
    if (!(*gamma > 0.0) || !std::isfinite(*gamma))
        throw FormatError("profile: gamma must be positive");
    if (expected_gamma && std::abs(*gamma - *expected_gamma) > 1e-12 * *expected_gamma) {
        std::ostringstream os;
        os.precision(17);
        os << "profile: gamma mismatch (file " << *gamma << ", configuration " << *expected_gamma << ")";
        throw FormatError(os.str());
    }

    std::vector<double> r, v;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (lineno == 2 && line == "r,value")
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw FormatError("profile line " + std::to_string(lineno) + ": expected 'r,value'");
        r.push_back(detail::parse_double(line.substr(0, comma), "radius", lineno));
        v.push_back(detail::parse_double(line.substr(comma + 1), "value", lineno));
    }
    return {RadialProfile(RadialGrid(std::move(r)), std::move(v), *space), *gamma};
}

inline void save_profile(const std::string& path, const RadialProfile& p, double gamma)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_profile(f, p, gamma);
}

inline ProfileFile load_profile(const std::string& path, std::optional<double> expected_gamma = std::nullopt)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "'");
    return read_profile(f, expected_gamma);
}

} // namespace mtf
