#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "cpir/cli.hpp"

using namespace cpir;
using cpir::json::Json;

namespace {

struct Invocation {
    int code = -1;
    std::string out;
};

// Runs the built binary with stderr discarded.
Invocation shell(const std::string& args) {
    const std::string cmd = std::string(CPIR_CLI_PATH) + " " + args + " 2>/dev/null";
    Invocation r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data_file(const std::string& name) { return std::string(CPIR_SCENARIO_DIR) + "/../tests/data/" + name; }

}  // namespace

TEST(Cli, CatalogHasSevenFixtures) {
    EXPECT_EQ(cli::catalog().size(), 7u);
    const Invocation r = shell("list-examples --format json");
    ASSERT_EQ(r.code, 0);
    const Json j = Json::parse(r.out);
    ASSERT_EQ(j.size(), 7u);
    for (const auto& f : j) EXPECT_TRUE(std::filesystem::exists(f.at("file").get<std::string>()));
}

TEST(Cli, EveryFixtureRuns) {
    for (const auto& f : cli::catalog()) {
        const Invocation r = shell("run " + f.name);
        EXPECT_EQ(r.code, f.name == "parity" ? 2 : 0) << f.name;
        EXPECT_FALSE(r.out.empty()) << f.name;
    }
    EXPECT_EQ(shell("run parity --feasibility-scope markov").code, 0);
}

TEST(Cli, InvalidInputsExitThree) {
    EXPECT_EQ(shell("run " + data_file("empty.json")).code, 3);
    EXPECT_EQ(shell("run no-such-scenario.json").code, 3);
    EXPECT_EQ(shell("run device --format xml").code, 3);
    EXPECT_EQ(shell("run device --task nonsense").code, 3);
    EXPECT_EQ(shell("run device --cause Z").code, 3);
    EXPECT_EQ(shell("frobnicate").code, 3);
}

TEST(Cli, DeviceJsonOutput) {
    const Invocation r = shell("run device --format json");
    ASSERT_EQ(r.code, 0);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j.at("scenario"), "device");
    EXPECT_EQ(j.at("status"), "ok");
    const ExactTable t = json::table_from_json<Rational>(j.at("joint"));
    EXPECT_EQ(t, pir::causal_pir_joint(pir::device_relation(), "X"));
}

TEST(Cli, OutputIsDeterministic) {
    for (const char* name : {"device", "sun-lauderdale-grid", "parity --feasibility-scope markov"}) {
        const Invocation a = shell(std::string("run ") + name + " --format json");
        const Invocation b = shell(std::string("run ") + name + " --format json");
        EXPECT_EQ(a.out, b.out) << name;
    }
}

TEST(Cli, CsvHeader) {
    const Invocation r = shell("run device --format csv");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "X,Y,probability");
}

TEST(Cli, JsonErrorObject) {
    const Invocation r = shell("run " + data_file("empty.json") + " --format json");
    EXPECT_EQ(r.code, 3);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j.at("error").at("code"), "validation_error");
}

TEST(Cli, FloatDistributionRoundTrips) {
    const ProbTable t(FiniteDomain({{"X", {"a", "b", "c"}}}), {0.2, 0.3, 0.5});
    const Json j = json::to_json(t);
    EXPECT_EQ(json::to_json(json::table_from_json<double>(Json::parse(j.dump()))).dump(), j.dump());
}

TEST(Cli, MomentExpansion) {
    const FiniteDomain d({{"X", {"-1", "2"}}, {"Y", {"0", "3"}}});
    EXPECT_EQ(cli::detail::expand_moment(d, "E[X]"), (std::vector<double>{-1, -1, 2, 2}));
    EXPECT_EQ(cli::detail::expand_moment(d, "E[X^2]"), (std::vector<double>{1, 1, 4, 4}));
    EXPECT_EQ(cli::detail::expand_moment(d, "E[ X * Y ]"), (std::vector<double>{0, -3, 0, 6}));
    EXPECT_THROW(cli::detail::expand_moment(d, "E[Z]"), ValidationError);
    EXPECT_THROW(cli::detail::expand_moment(d, "X"), ValidationError);
    const FiniteDomain words({{"W", {"a", "b"}}});
    EXPECT_THROW(cli::detail::expand_moment(words, "E[W]"), ValidationError);
}

TEST(Cli, InProcessRunMatchesBinary) {
    cli::Flags flags;
    flags.format = "json";
    const auto o = cli::run("device", flags);
    EXPECT_EQ(o.exit_code, 0);
    EXPECT_EQ(o.out, shell("run device --format json").out);
}
