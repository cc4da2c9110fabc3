#include <gtest/gtest.h>

#include <sstream>

#include "tpass/config.hpp"

using namespace tpass;

TEST(Config, ParsesKeysCommentsAndUnits)
{
    std::istringstream in(R"(# comment
P_max = 30 dBm
sigma2 = 2e-12 W   # trailing comment
D_x=60

N = 8
beta_rule = boundary
delta_min_spacing = 0.01
rng_seed = 18446744073709551615
)");
    const auto p = parse_config(in);
    EXPECT_NEAR(p.p_max, 1.0, 1e-15);
    EXPECT_EQ(p.noise_power, 2e-12);
    EXPECT_EQ(p.region_x, 60.0);
    EXPECT_EQ(p.num_pas, 8);
    EXPECT_EQ(p.beta_rule, BetaRule::boundary);
    EXPECT_EQ(p.min_spacing, 0.01);
    EXPECT_EQ(p.seed, 18446744073709551615ull);
}

TEST(Config, UnknownKeyNamesKeyAndLine)
{
    std::istringstream in("D_x = 10\nfoo = 1\n");
    try {
        parse_config(in);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::config_error);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
        EXPECT_NE(msg.find("foo"), std::string::npos) << msg;
    }
}

TEST(Config, MalformedValueNamesKey)
{
    SystemParams p;
    try {
        set_param(p, "N", "eight");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("N"), std::string::npos);
    }
    EXPECT_THROW(set_param(p, "N", "2.5"), Error);
    EXPECT_THROW(set_param(p, "sweep_order", "sideways"), Error);
    EXPECT_THROW(apply_override(p, "D_x"), Error);
}

TEST(Config, RoundTripIsExact)
{
    SystemParams p;
    p.p_max = dbm_to_watt(17.3);
    p.w_wired = 1.0 / 3.0;
    p.sweep_order = SweepOrder::radiation_first;
    p.min_spacing = 0.0125;
    std::istringstream in(to_config_text(p));
    const auto q = parse_config(in);
    EXPECT_EQ(dump_config(p), dump_config(q));
    EXPECT_EQ(q.p_max, p.p_max);
    EXPECT_EQ(q.w_wired, p.w_wired);
}

TEST(Config, AutoSpacing)
{
    SystemParams p;
    p.min_spacing = 1.0;
    set_param(p, "delta_min_spacing", "auto");
    EXPECT_FALSE(p.min_spacing.has_value());
}

TEST(Config, MissingFileIsIoError)
{
    try {
        load_config("/nonexistent/dir/tpass.conf");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::io_error);
    }
}
