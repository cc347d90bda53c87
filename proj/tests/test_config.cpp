#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "hawkes_abc/config.hpp"
#include "hawkes_abc/errors.hpp"

using namespace hawkes_abc;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "mem");
}

}  // namespace

TEST(Config, DefaultsFollowThePriorAndKernel) {
    const ExperimentConfig cfg;
    EXPECT_EQ(cfg.prior, UniformPrior{});
    EXPECT_EQ(cfg.kernel, ProposalKernel{});
    EXPECT_EQ(cfg.pilot_size, 5000u);
    EXPECT_EQ(cfg.effective_burn_in(), cfg.iterations / 5);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ParsesEveryKey) {
    const auto cfg = parse(
        "# comment\n"
        "horizon = 85.5\n"
        "prior.mu=0.1 0.9\n"
        "prior.K=0 0.8\n"
        "prior.beta=0.2, 2.5\n"
        "proposal.sd=0.01 0.02 0.3\n"
        "distortion=linear 0.35 -0.25\n"
        "summaries=alt2\n"
        "ripley.windows=0.5 1 2\n"
        "eps=0.1 0.2\n"
        "pilot.size=2000\n"
        "pilot.band=0.0001 0.005\n"
        "pilot.grid=1 0.5\n"
        "iterations=1000\n"
        "burn_in=100\n"
        "thin=2\n"
        "seed=99\n"
        "chains=3\n"
        "init=0.3 0.3 1\n"
        "fix.mu=0.2\n"
        "truncate=40\n"
        "input=a.txt\n"
        "output=b.csv\n"
        "report=c.txt\n"
        "result.mu.mean=0.3\n"
        "calibration.scale=0.1\n"
        "run.command=abc\n");
    EXPECT_EQ(*cfg.horizon, 85.5);
    EXPECT_EQ(cfg.prior.beta, (Interval{0.2, 2.5}));
    const ProposalKernel kernel{0.01, 0.02, 0.3};
    EXPECT_EQ(cfg.kernel, kernel);
    const Distortion linear = LinearDetection{0.35, -0.25};
    EXPECT_EQ(cfg.distortion, linear);
    EXPECT_EQ(cfg.family, SummaryFamily::Alt2);
    EXPECT_EQ(*cfg.eps, (std::vector<double>{0.1, 0.2}));
    EXPECT_EQ(cfg.scale_grid, (std::vector<double>{1.0, 0.5}));
    EXPECT_EQ(cfg.effective_burn_in(), 100u);
    EXPECT_EQ(cfg.seed, 99u);
    EXPECT_EQ(cfg.chains, 3u);
    EXPECT_EQ(*cfg.fixed.mu, 0.2);
    EXPECT_EQ(cfg.input, "a.txt");
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, EchoRoundTrips) {
    ExperimentConfig cfg;
    cfg.horizon = 1.0 / 3.0;
    cfg.prior.mu = {0.1, 0.7};
    cfg.distortion = GaussianNoise{0.1 + 0.2};
    cfg.eps_scale = std::numeric_limits<double>::infinity();
    cfg.scale_grid = {0.3, 0.2};
    cfg.seed = 18446744073709551615ull;
    cfg.init = HawkesParams{0.2, 0.1, 1.0 / 7.0};
    cfg.fixed.beta = 0.9;
    cfg.burn_in = 7;
    cfg.output = "x.csv";
    const auto back = parse(to_config_text(cfg));
    EXPECT_EQ(to_config_text(back), to_config_text(cfg));
    EXPECT_EQ(*back.horizon, *cfg.horizon);
    EXPECT_EQ(back.distortion, cfg.distortion);
    EXPECT_TRUE(std::isinf(*back.eps_scale));
    EXPECT_EQ(*back.init, *cfg.init);
    EXPECT_EQ(back.seed, cfg.seed);
}

TEST(Config, ErrorsReportLines) {
    try {
        parse("seed=1\nbogus.key=3\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(parse("no equals sign\n"), ParseError);
    EXPECT_THROW(parse("iterations=-5\n"), ParseError);
    EXPECT_THROW(parse("prior.mu=0.1\n"), ParseError);
    EXPECT_THROW(parse("horizon=abc\n"), ParseError);
}

TEST(Config, ValidateCatchesInconsistencies) {
    ExperimentConfig cfg;
    cfg.eps = std::vector<double>{1.0, 1.0};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.family = SummaryFamily::Alt2;
    EXPECT_NO_THROW(cfg.validate());
    cfg = ExperimentConfig{};
    cfg.pilot_size = 10;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.eps_scale = std::numeric_limits<double>::infinity();
    EXPECT_NO_THROW(cfg.validate());
    cfg = ExperimentConfig{};
    cfg.burn_in = cfg.iterations;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.init = HawkesParams{0.95, 0.3, 1.0};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.fixed.K = 0.95;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.band = {0.2, 0.1};
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Config, SeedEnvironmentOverride) {
    ::unsetenv(kSeedEnvVar);
    EXPECT_EQ(default_seed(), kDefaultSeed);
    ::setenv(kSeedEnvVar, "1234", 1);
    EXPECT_EQ(default_seed(), 1234u);
    ::setenv(kSeedEnvVar, "abc", 1);
    EXPECT_THROW(default_seed(), ConfigError);
    ::unsetenv(kSeedEnvVar);
}
