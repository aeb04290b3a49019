#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "mtf/profile_io.hpp"
#include "mtf/random_profiles.hpp"

using namespace mtf;

TEST(ProfileIO, RoundTripIsLossless)
{
    Rng rng(61);
    const auto g = make_grid(GridScheme::Log, 200, 1e-4, 7.0);
    const auto p = random_step_profile(rng, g, Space::Momentum, Ordering::Unordered);
    std::stringstream ss;
    write_profile(ss, p, 1.2345678901234567);
    const auto f = read_profile(ss);
    EXPECT_EQ(f.gamma, 1.2345678901234567);
    EXPECT_EQ(f.profile.space(), Space::Momentum);
    ASSERT_EQ(f.profile.size(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        EXPECT_EQ(f.profile.grid()[i], g[i]);
        EXPECT_EQ(f.profile[i], p[i]);
    }
}

TEST(ProfileIO, HeaderFormat)
{
    const auto g = make_grid(GridScheme::Linear, 16, 1.0, 16.0);
    std::stringstream ss;
    write_profile(ss, RadialProfile::zeros(g, Space::Position), 2.0);
    std::string first;
    std::getline(ss, first);
    EXPECT_EQ(first, "# mtf-profile v1 space=position gamma=2");
}

TEST(ProfileIO, RejectsUnknownVersion)
{
    std::stringstream ss("# mtf-profile v2 space=position gamma=1\nr,value\n1,0\n");
    EXPECT_THROW(read_profile(ss), FormatError);
}

TEST(ProfileIO, RejectsMissingHeaderAndBadRows)
{
    std::stringstream a("r,value\n1,0\n");
    EXPECT_THROW(read_profile(a), FormatError);
    std::stringstream b("# mtf-profile v1 space=position gamma=1\nr,value\n1;0\n");
    EXPECT_THROW(read_profile(b), FormatError);
    std::stringstream c("# mtf-profile v1 space=somewhere gamma=1\n");
    EXPECT_THROW(read_profile(c), FormatError);
    std::stringstream d("# mtf-profile v1 space=position gamma=1\n1,abc\n");
    EXPECT_THROW(read_profile(d), FormatError);
}

TEST(ProfileIO, GammaMismatch)
{
    const auto g = make_grid(GridScheme::Linear, 16, 1.0, 16.0);
    std::stringstream ss;
    write_profile(ss, RadialProfile::zeros(g, Space::Position), 2.0);
    const std::string text = ss.str();
    std::stringstream s1(text);
    EXPECT_THROW(read_profile(s1, 3.0), FormatError);
    std::stringstream s2(text);
    EXPECT_NO_THROW(read_profile(s2, 2.0));
}

TEST(ProfileIO, GridInvariantsEnforced)
{
    std::stringstream ss("# mtf-profile v1 space=position gamma=1\nr,value\n2,0\n1,0\n");
    EXPECT_THROW(read_profile(ss), GridError);
}
