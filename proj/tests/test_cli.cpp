#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "est/harness.hpp"

using namespace est;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

Outcome run(const std::string& args) {
    const std::string cmd = std::string("EST_LOG=quiet ") + EST_CLI_PATH + " " + args + " 2>/dev/null";
    Outcome o;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return o;
    char buf[4096];
    while (const auto n = std::fread(buf, 1, sizeof buf, pipe)) o.out.append(buf, n);
    const int status = pclose(pipe);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return o;
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("est_cli_" + name);
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    return lines;
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
    std::ofstream out(p, std::ios::binary);
    for (const auto& l : lines) out << l << '\n';
}

}  // namespace

TEST(Cli, GenIsDeterministicAndParses) {
    const auto a = run("gen --seed 42 --count 3");
    const auto b = run("gen --seed 42 --count 3");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    std::istringstream in(a.out);
    int n = 0;
    for (std::string line; std::getline(in, line); ++n) {
        const auto spec = episode_spec_from_json(Json::parse(line));
        EXPECT_EQ(spec.seed, 42u);
        EXPECT_EQ(spec.episode_index, static_cast<std::uint64_t>(n));
        EXPECT_EQ(spec, generate_episode(42, n, Config{}));
    }
    EXPECT_EQ(n, 3);
}

TEST(Cli, RunReportMatchesLibrary) {
    const auto r = run("run --agent bayes --episodes 50 --seed 7");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, render_report(evaluate("bayes", 7, 50, Config{}), ReportFormat::json));
    const auto csv = run("run --agent bayes --episodes 50 --seed 7 --format csv");
    EXPECT_EQ(csv.out, render_report(evaluate("bayes", 7, 50, Config{}), ReportFormat::csv));
}

TEST(Cli, RunTranscriptsReplayPass) {
    const auto path = temp_path("transcripts.jsonl");
    ASSERT_EQ(run("run --agent search-random --episodes 20 --seed 3 --report - --transcripts " + path.string()).code, 0);
    EXPECT_EQ(read_lines(path).size(), 20u);
    const auto r = run("replay " + path.string());
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "PASS 20 episodes\n");
    std::filesystem::remove(path);
}

TEST(Cli, GoldenTranscriptsReplayPass) {
    const auto r = run(std::string("replay ") + EST_GOLDEN_DIR + "/transcripts_random_seed42_n3.jsonl");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "PASS 3 episodes\n");
}

TEST(Cli, PerturbedRewardFailsAtThatStep) {
    auto lines = read_lines(std::filesystem::path(EST_GOLDEN_DIR) / "transcripts_random_seed42_n3.jsonl");
    ASSERT_EQ(lines.size(), 3u);
    auto j = Json::parse(lines[1]);
    ASSERT_GE(j["steps"].size(), 3u);
    j["steps"][2]["reward"] = j["steps"][2]["reward"].get<double>() + 1e-9;
    lines[1] = j.dump();
    const auto path = temp_path("perturbed.jsonl");
    write_lines(path, lines);
    const auto r = run("replay " + path.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.out.rfind("FAIL episode 1 ", 0), 0u) << r.out;
    EXPECT_NE(r.out.find("step 3"), std::string::npos) << r.out;
    std::filesystem::remove(path);
}

TEST(Cli, ConfigMismatchExitsTwo) {
    const auto cfg = temp_path("config.json");
    std::ofstream(cfg) << R"({"max_steps": 5})";
    const auto r = run(std::string("replay ") + EST_GOLDEN_DIR + "/transcripts_random_seed42_n3.jsonl --config " +
                       cfg.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.out.rfind("CONFIG-MISMATCH", 0), 0u) << r.out;
    std::filesystem::remove(cfg);
}

TEST(Cli, ServeAnswersOverStdio) {
    const auto in = temp_path("serve_in.jsonl");
    write_lines(in, {R"({"cmd":"reset","seed":42,"episode_index":0})", "", R"({"cmd":"close"})"});
    const auto r = run("serve < " + in.string());
    EXPECT_EQ(r.code, 0);
    std::istringstream lines(r.out);
    std::vector<std::string> responses;
    for (std::string l; std::getline(lines, l);) responses.push_back(l);
    ASSERT_EQ(responses.size(), 2u);
    EXPECT_TRUE(Json::parse(responses[0])["ok"].get<bool>());
    EXPECT_EQ(responses[1], R"({"ok":true,"closed":true})");
    std::filesystem::remove(in);
}

TEST(Cli, BadArgumentsFail) {
    EXPECT_NE(run("run --agent ddpg --episodes 1").code, 0);
    EXPECT_NE(run("run --agent random --episodes 1 --report /nonexistent-dir/r.json").code, 0);
    EXPECT_NE(run("frobnicate").code, 0);
}
