#include <gtest/gtest.h>

#include <cstdlib>
#include <string>

#include "eyewit/config.hpp"
#include "eyewit/error.hpp"

using namespace eyewit;

namespace {

ErrorCode code_of(const std::string &text) {
    try {
        parse_config(text);
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for " << text;
    return ErrorCode::invalid_argument;
}

std::string message_of(const std::string &text) {
    try {
        parse_config(text);
    } catch (const Error &e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, EmptyDocumentGivesPublishedDefaults) {
    for (const char *text : {"", "{}", "  // nothing here\n{ }\n"}) {
        const RunConfig c = parse_config(text);
        EXPECT_EQ(c.eye.theta, 7);
        EXPECT_EQ(c.eye.eta, 0.08);
        EXPECT_EQ(c.prep.eta_c, 0.8);
        EXPECT_EQ(c.prep.eta_d, 0.5);
        EXPECT_EQ(c.prep.t, 0.98);
        EXPECT_EQ(c.prep.beta, Complex(0.08, 0.0));
        EXPECT_EQ(c.alpha, Complex(10.99, 0.0));
        EXPECT_EQ(c.a, 40.0);
        EXPECT_EQ(c.epsilon, 0.01);
        EXPECT_EQ(c.coarse_n, 12500);
    }
}

TEST(Config, OverridingThresholdChangesOnlyThreshold) {
    RunConfig expected = parse_config("");
    expected.eye.theta = 3;
    const RunConfig got = parse_config(R"({"eye": {"theta": 3}})");
    EXPECT_EQ(dump_config(got), dump_config(expected));
    EXPECT_NE(config_hash(got), config_hash(parse_config("")));
}

TEST(Config, ValidationNamesTheField) {
    EXPECT_EQ(code_of(R"({"eye": {"eta": 1.5}})"), ErrorCode::validation_error);
    EXPECT_NE(message_of(R"({"eye": {"eta": 1.5}})").find("eye.eta"), std::string::npos);
    EXPECT_NE(message_of(R"({"statistics": {"coarse_n": 2.5}})").find("statistics.coarse_n"), std::string::npos);
    EXPECT_NE(message_of(R"({"preparation": {"t": "high"}})").find("preparation.t"), std::string::npos);
}

TEST(Config, UnknownFieldsRejected) {
    EXPECT_NE(message_of(R"({"eye": {"theta": 7, "colour": 1}})").find("eye.colour"), std::string::npos);
    EXPECT_NE(message_of(R"({"extras": {}})").find("extras"), std::string::npos);
    EXPECT_EQ(code_of(R"({"optimizer": {"bounds": {"gamma": {"lo": 0, "hi": 1}}}})"), ErrorCode::validation_error);
}

TEST(Config, ParseErrorReportsPosition) {
    EXPECT_EQ(code_of("{\n  \"eye\": {\"theta\": 7,,}\n}"), ErrorCode::parse_error);
    EXPECT_NE(message_of("{\n  \"eye\": {\"theta\": 7,,}\n}").find("line 2"), std::string::npos);
}

TEST(Config, ComplexAmplitudes) {
    const RunConfig c = parse_config(R"({"witness": {"alpha": {"re": 3, "im": -1}}, "preparation": {"beta": 0.1}})");
    EXPECT_EQ(c.alpha, Complex(3.0, -1.0));
    EXPECT_EQ(c.prep.beta, Complex(0.1, 0.0));
}

TEST(Config, DumpRoundTrips) {
    const RunConfig c = parse_config(R"({
        "eye": {"theta": 5, "eta": 0.1},
        "statistics": {"epsilon": 0.1, "strategy": "projected", "scan": {"ps_points": 40}},
        "optimizer": {"objective": "p_stop", "bounds": {"alpha": {"lo": 9, "hi": 12, "points": 4}}},
        "simulation": {"seed": 99}
    })");
    const std::string dump = dump_config(c);
    EXPECT_EQ(dump_config(parse_config(dump)), dump);
    EXPECT_EQ(config_hash(parse_config(dump)), config_hash(c));
    EXPECT_EQ(config_hash(c).size(), 16u);
}

TEST(Config, EnvironmentCeilingCapsRuns) {
    RunConfig c = parse_config("");
    ::setenv(kResourceCeilingEnv, "12345", 1);
    apply_environment(c);
    ::unsetenv(kResourceCeilingEnv);
    EXPECT_EQ(c.limits.max_runs, 12345);
    EXPECT_LE(c.optimizer.max_runs, 12345);

    RunConfig d = parse_config("");
    ::setenv(kResourceCeilingEnv, "lots", 1);
    EXPECT_THROW(apply_environment(d), Error);
    ::unsetenv(kResourceCeilingEnv);
}

TEST(Config, LoadMissingFile) { EXPECT_THROW(load_config("/nonexistent/eyewit.json"), Error); }
