// est: command line front end for the Blicket-detection environment.
//
//   est run     evaluate a heuristic agent and write a metrics report
//   est serve   line-delimited JSON protocol on stdin/stdout
//   est replay  re-execute JSONL transcripts and verify rewards/termination
//   est gen     materialize episode specs as JSONL
//
// EST_LOG=quiet|info|debug controls diagnostics on stderr (default info).

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "est/harness.hpp"
#include "est/protocol.hpp"

namespace {

enum class LogLevel { quiet, info, debug };

LogLevel log_level() {
    const char* v = std::getenv("EST_LOG");
    if (!v) return LogLevel::info;
    const std::string s(v);
    if (s == "quiet" || s == "0") return LogLevel::quiet;
    if (s == "debug" || s == "2") return LogLevel::debug;
    return LogLevel::info;
}

template <class... Args>
void log(LogLevel level, const Args&... args) {
    if (log_level() < level) return;
    ((std::cerr << args), ...);
    std::cerr << '\n';
}

est::Config load_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return est::config_from_json(est::Json::parse(in));
}

int cmd_run(const std::string& agent, long episodes, std::uint64_t seed, const std::string& report_path,
            const std::string& format, const std::string& transcripts_path, int workers, const std::string& config_path,
            bool naive_singleton, bool search_prior) {
    const auto config = load_config(config_path);
    est::EvaluateOptions opts;
    opts.workers = workers;
    opts.agent.naive_use_inactive_evidence = !naive_singleton;
    opts.agent.search_cardinality_prior = search_prior;

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<est::EpisodeTranscript> transcripts;
    const auto report = est::evaluate(agent, seed, episodes, config, opts, &transcripts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log(LogLevel::info, "evaluated ", report.agent, " on ", episodes, " episodes in ", secs, " s");

    const auto fmt = format == "csv" ? est::ReportFormat::csv : est::ReportFormat::json;
    if (report_path.empty() || report_path == "-")
        std::cout << est::render_report(report, fmt);
    else
        est::write_report(report, fmt, report_path);
    if (!transcripts_path.empty()) est::write_transcripts(transcripts, transcripts_path);
    return 0;
}

int cmd_replay(const std::string& path, const std::string& config_path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open transcript file: " + path);
    const auto expected = est::config_digest(load_config(config_path));

    std::string line;
    int episode = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = est::Json::parse(line);
        const auto stored = j.at("config_digest").get<std::string>();
        if (stored != expected) {
            std::cout << "CONFIG-MISMATCH episode " << episode << ": transcript digest " << stored
                      << ", replay config digest " << expected << '\n';
            return 2;
        }
        const auto t = est::transcript_from_json(j);
        const auto verdict = est::replay_transcript(t);
        if (!verdict.pass) {
            std::cout << "FAIL episode " << episode << " (seed " << t.spec.seed << ", index " << t.spec.episode_index
                      << ") step " << verdict.divergent_step + 1 << ": " << verdict.message << '\n';
            return 1;
        }
        log(LogLevel::debug, "episode ", episode, " ok");
        ++episode;
    }
    std::cout << "PASS " << episode << " episodes\n";
    return 0;
}

int cmd_gen(std::uint64_t seed, long count, const std::string& out_path, const std::string& config_path) {
    if (count < 1) throw std::runtime_error("--count must be >= 1");
    const auto config = load_config(config_path);
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty() && out_path != "-") {
        file.open(out_path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output file: " + out_path);
        out = &file;
    }
    for (long i = 0; i < count; ++i)
        *out << est::to_json(est::generate_episode(seed, static_cast<std::uint64_t>(i), config)).dump() << '\n';
    if (!*out) throw std::runtime_error("failed writing episode specs");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blicket-detection environment: evaluation, stdio server, replay, episode generation"};
    app.require_subcommand(1);

    std::string agent = "search-naive", report_path, format = "json", transcripts_path, config_path;
    long episodes = 10000;
    std::uint64_t seed = 42;
    int workers = 1;
    bool naive_singleton = false, search_prior = false;

    auto* run = app.add_subcommand("run", "Evaluate a heuristic agent");
    run->add_option("--agent", agent, "random|bayes|naive|search-random|search-naive")
        ->check(CLI::IsMember({"random", "bayes", "naive", "naive-singleton", "search-random", "search-naive"}));
    run->add_option("--episodes", episodes, "Number of episodes")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--report", report_path, "Report output path ('-' for stdout)");
    run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    run->add_option("--transcripts", transcripts_path, "Write per-episode transcripts as JSONL");
    run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--config", config_path, "Environment config JSON");
    run->add_flag("--naive-singleton-only", naive_singleton, "Naive agent ignores inactive multi-object panels");
    run->add_flag("--search-cardinality-prior", search_prior, "Search agents restrict hypotheses to 3..8 Blickets");

    auto* serve = app.add_subcommand("serve", "Serve the stdio JSON protocol");
    serve->add_option("--config", config_path, "Base environment config JSON");

    std::string replay_path;
    auto* replay = app.add_subcommand("replay", "Verify JSONL transcripts by re-execution");
    replay->add_option("transcripts", replay_path, "Transcript JSONL")->required();
    replay->add_option("--config", config_path, "Config the transcripts must have been produced with");

    std::string out_path;
    long count = 1;
    auto* gen = app.add_subcommand("gen", "Write episode specs as JSONL");
    gen->add_option("--seed", seed, "Master seed");
    gen->add_option("--count", count, "Number of episodes")->check(CLI::PositiveNumber);
    gen->add_option("--out", out_path, "Output path ('-' for stdout)");
    gen->add_option("--config", config_path, "Environment config JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_run(agent, episodes, seed, report_path, format, transcripts_path, workers, config_path,
                           naive_singleton, search_prior);
        if (*serve) {
            std::ios::sync_with_stdio(false);
            est::ProtocolServer server(load_config(config_path));
            server.serve(std::cin, std::cout);
            return 0;
        }
        if (*replay) return cmd_replay(replay_path, config_path);
        if (*gen) return cmd_gen(seed, count, out_path, config_path);
    } catch (const std::exception& e) {
        log(LogLevel::quiet, "est: error: ", e.what());
        return 3;
    }
    return 0;
}
