#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "est/agents.hpp"
#include "est/env.hpp"
#include "est/serialize.hpp"

namespace est {

// ─── Episodes ─────────────────────────────────────────────────

/// Runs one full episode of `agent_name` on (master_seed, episode_index).
/// The agent's stream is keyed on the same pair, so the result does not
/// depend on which worker runs it or in what order.
inline EpisodeTranscript run_episode(std::string_view agent_name, std::uint64_t master_seed, std::uint64_t episode_index,
                                     const Config& config, const AgentOptions& opts = {}) {
    Environment env(config);
    env.reset(master_seed, episode_index);
    auto agent = make_agent(agent_name, SeededRng(master_seed, episode_index, Stream::agent), opts);
    agent->begin_episode(env.spec().context);
    while (!env.done()) {
        const auto result = env.step(agent->act());
        if (!result.done) agent->observe(decode_observation(result.observation));
    }
    auto t = env.export_transcript();
    t.agent = std::string(agent->name());
    return t;
}

// ─── Analytics ────────────────────────────────────────────────

struct StepsHistogram {
    std::vector<long> solved_at;  // solved_at[t - 1] = episodes solved on action t
    long unsolved = 0;

    long total() const {
        long s = unsolved;
        for (long c : solved_at) s += c;
        return s;
    }
    friend bool operator==(const StepsHistogram&, const StepsHistogram&) = default;
};

inline StepsHistogram steps_histogram(std::span<const EpisodeTranscript> transcripts, int max_steps) {
    StepsHistogram h;
    h.solved_at.assign(max_steps, 0);
    for (const auto& t : transcripts) {
        if (t.solved)
            ++h.solved_at.at(t.steps_taken() - 1);
        else
            ++h.unsolved;
    }
    return h;
}

struct QuartileSummary {
    int step = 0;  // 1-based action index
    long count = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    friend bool operator==(const QuartileSummary&, const QuartileSummary&) = default;
};

/// Linear-interpolation quantile (R type 7) of sorted data.
inline double quantile_sorted(std::span<const int> sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Per-step five-number summary of executed trial sizes. Steps with no
/// executed trial are omitted.
inline std::vector<QuartileSummary> trial_size_stats(std::span<const EpisodeTranscript> transcripts) {
    std::vector<std::vector<int>> by_step;
    for (const auto& t : transcripts) {
        for (std::size_t k = 0; k < t.steps.size(); ++k) {
            if (!t.steps[k].executed) continue;
            if (by_step.size() <= k) by_step.resize(k + 1);
            by_step[k].push_back(t.steps[k].trial.objects.size());
        }
    }
    std::vector<QuartileSummary> out;
    for (std::size_t k = 0; k < by_step.size(); ++k) {
        auto& sizes = by_step[k];
        if (sizes.empty()) continue;
        std::sort(sizes.begin(), sizes.end());
        out.push_back(QuartileSummary{static_cast<int>(k + 1), static_cast<long>(sizes.size()), double(sizes.front()),
                                      quantile_sorted(sizes, 0.25), quantile_sorted(sizes, 0.5),
                                      quantile_sorted(sizes, 0.75), double(sizes.back())});
    }
    return out;
}

// ─── Report ───────────────────────────────────────────────────

struct Interval {
    double lo = 0, hi = 0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// 95% normal-approximation interval for a proportion, clipped to [0,1].
inline Interval proportion_ci(double p, long n) {
    const double half = 1.959963984540054 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

inline Interval mean_ci(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= n;
    if (xs.size() < 2) return {mean, mean};
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double half = 1.959963984540054 * std::sqrt(ss / (n - 1) / n);
    return {mean - half, mean + half};
}

struct MetricsReport {
    std::string agent;
    Config config;
    std::string config_digest;
    std::uint64_t master_seed = 0;
    long episodes = 0;
    double context_accuracy = 0;
    Interval context_accuracy_ci;
    double context_reward = 0;
    double episode_accuracy = 0;
    Interval episode_accuracy_ci;
    double episode_reward = 0;
    Interval episode_reward_ci;
    double mean_steps = 0;
    StepsHistogram steps_to_solve;
    std::vector<QuartileSummary> trial_sizes;
    std::array<long, 5> query_labels{};

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Assembles the report from transcripts ordered by episode index.
///
/// context_accuracy: the first emitted belief already solves the episode.
/// context_reward:   mean reward of the first step.
inline MetricsReport summarize(std::string agent, std::uint64_t master_seed, const Config& config,
                               std::span<const EpisodeTranscript> transcripts) {
    MetricsReport r;
    r.agent = std::move(agent);
    r.config = config;
    r.config_digest = est::config_digest(config);
    r.master_seed = master_seed;
    r.episodes = static_cast<long>(transcripts.size());
    if (transcripts.empty()) return r;

    long solved = 0, first_solved = 0;
    double first_reward = 0, steps = 0;
    std::vector<double> totals;
    totals.reserve(transcripts.size());
    for (const auto& t : transcripts) {
        solved += t.solved;
        first_solved += t.steps.front().info.solved;
        first_reward += t.steps.front().reward;
        steps += t.steps_taken();
        totals.push_back(t.total_reward);
        for (auto l : t.spec.query_labels) ++r.query_labels[static_cast<int>(l)];
    }
    const double n = static_cast<double>(r.episodes);
    r.context_accuracy = first_solved / n;
    r.context_accuracy_ci = proportion_ci(r.context_accuracy, r.episodes);
    r.context_reward = first_reward / n;
    r.episode_accuracy = solved / n;
    r.episode_accuracy_ci = proportion_ci(r.episode_accuracy, r.episodes);
    double sum = 0;
    for (double x : totals) sum += x;
    r.episode_reward = sum / n;
    r.episode_reward_ci = mean_ci(totals);
    r.mean_steps = steps / n;
    r.steps_to_solve = steps_histogram(transcripts, config.max_steps);
    r.trial_sizes = trial_size_stats(transcripts);
    return r;
}

struct EvaluateOptions {
    int workers = 1;
    AgentOptions agent;
};

/// Runs episodes [0, episode_count) and returns the transcripts in index order.
inline std::vector<EpisodeTranscript> run_episodes(std::string_view agent, std::uint64_t master_seed, long episode_count,
                                                   const Config& config, const EvaluateOptions& opts = {}) {
    if (episode_count < 1) throw ContractError("episode_count must be >= 1");
    std::vector<EpisodeTranscript> transcripts(static_cast<std::size_t>(episode_count));
    const int workers = std::max(1, std::min<int>(opts.workers, static_cast<int>(episode_count)));

    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (long i = next++; i < episode_count; i = next++) {
            try {
                transcripts[i] = run_episode(agent, master_seed, static_cast<std::uint64_t>(i), config, opts.agent);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = episode_count;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return transcripts;
}

inline MetricsReport evaluate(std::string_view agent, std::uint64_t master_seed, long episode_count, const Config& config,
                              const EvaluateOptions& opts = {}, std::vector<EpisodeTranscript>* transcripts_out = nullptr) {
    auto transcripts = run_episodes(agent, master_seed, episode_count, config, opts);
    const std::string name = transcripts.front().agent;
    auto report = summarize(name, master_seed, config, transcripts);
    if (transcripts_out) *transcripts_out = std::move(transcripts);
    return report;
}

// ─── Report I/O ───────────────────────────────────────────────

inline Json to_json(const Interval& i) { return Json::array({i.lo, i.hi}); }

inline Json to_json(const MetricsReport& r) {
    Json hist = Json::object();
    for (std::size_t t = 0; t < r.steps_to_solve.solved_at.size(); ++t)
        hist[std::to_string(t + 1)] = r.steps_to_solve.solved_at[t];
    hist["unsolved"] = r.steps_to_solve.unsolved;

    Json sizes = Json::array();
    for (const auto& q : r.trial_sizes)
        sizes.push_back(Json{{"step", q.step}, {"count", q.count}, {"min", q.min}, {"q1", q.q1},
                             {"median", q.median}, {"q3", q.q3}, {"max", q.max}});

    Json labels = Json::object();
    for (std::size_t k = 0; k < r.query_labels.size(); ++k) labels[kQueryLabelNames[k]] = r.query_labels[k];

    return Json{{"agent", r.agent},
                {"config_digest", r.config_digest},
                {"config", to_json(r.config)},
                {"master_seed", r.master_seed},
                {"episodes", r.episodes},
                {"context_accuracy", r.context_accuracy},
                {"context_accuracy_ci95", to_json(r.context_accuracy_ci)},
                {"context_reward", r.context_reward},
                {"episode_accuracy", r.episode_accuracy},
                {"episode_accuracy_ci95", to_json(r.episode_accuracy_ci)},
                {"episode_reward", r.episode_reward},
                {"episode_reward_ci95", to_json(r.episode_reward_ci)},
                {"mean_steps", r.mean_steps},
                {"steps_to_solve", hist},
                {"trial_sizes", sizes},
                {"query_labels", labels}};
}

inline MetricsReport report_from_json(const Json& j) {
    const auto interval = [](const Json& a) { return Interval{a.at(0).get<double>(), a.at(1).get<double>()}; };
    MetricsReport r;
    r.agent = j.at("agent").get<std::string>();
    r.config_digest = j.at("config_digest").get<std::string>();
    r.config = config_from_json(j.at("config"));
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.episodes = j.at("episodes").get<long>();
    r.context_accuracy = j.at("context_accuracy").get<double>();
    r.context_accuracy_ci = interval(j.at("context_accuracy_ci95"));
    r.context_reward = j.at("context_reward").get<double>();
    r.episode_accuracy = j.at("episode_accuracy").get<double>();
    r.episode_accuracy_ci = interval(j.at("episode_accuracy_ci95"));
    r.episode_reward = j.at("episode_reward").get<double>();
    r.episode_reward_ci = interval(j.at("episode_reward_ci95"));
    r.mean_steps = j.at("mean_steps").get<double>();
    const auto& hist = j.at("steps_to_solve");
    for (int t = 1; hist.contains(std::to_string(t)); ++t) r.steps_to_solve.solved_at.push_back(hist[std::to_string(t)].get<long>());
    r.steps_to_solve.unsolved = hist.at("unsolved").get<long>();
    for (const auto& q : j.at("trial_sizes"))
        r.trial_sizes.push_back(QuartileSummary{q.at("step").get<int>(), q.at("count").get<long>(), q.at("min").get<double>(),
                                                q.at("q1").get<double>(), q.at("median").get<double>(),
                                                q.at("q3").get<double>(), q.at("max").get<double>()});
    const auto& labels = j.at("query_labels");
    for (std::size_t k = 0; k < r.query_labels.size(); ++k) r.query_labels[k] = labels.at(kQueryLabelNames[k]).get<long>();
    return r;
}

/// Flattened (metric, value) rows; the CSV form writes exactly these.
inline std::vector<std::pair<std::string, std::string>> flatten_report(const MetricsReport& r) {
    std::vector<std::pair<std::string, std::string>> rows;
    const auto num = [](auto v) { return Json(v).dump(); };
    rows.emplace_back("agent", r.agent);
    rows.emplace_back("config_digest", r.config_digest);
    rows.emplace_back("master_seed", num(r.master_seed));
    rows.emplace_back("episodes", num(r.episodes));
    rows.emplace_back("context_accuracy", num(r.context_accuracy));
    rows.emplace_back("context_accuracy_ci95_lo", num(r.context_accuracy_ci.lo));
    rows.emplace_back("context_accuracy_ci95_hi", num(r.context_accuracy_ci.hi));
    rows.emplace_back("context_reward", num(r.context_reward));
    rows.emplace_back("episode_accuracy", num(r.episode_accuracy));
    rows.emplace_back("episode_accuracy_ci95_lo", num(r.episode_accuracy_ci.lo));
    rows.emplace_back("episode_accuracy_ci95_hi", num(r.episode_accuracy_ci.hi));
    rows.emplace_back("episode_reward", num(r.episode_reward));
    rows.emplace_back("episode_reward_ci95_lo", num(r.episode_reward_ci.lo));
    rows.emplace_back("episode_reward_ci95_hi", num(r.episode_reward_ci.hi));
    rows.emplace_back("mean_steps", num(r.mean_steps));
    for (std::size_t t = 0; t < r.steps_to_solve.solved_at.size(); ++t)
        rows.emplace_back("steps_to_solve." + std::to_string(t + 1), num(r.steps_to_solve.solved_at[t]));
    rows.emplace_back("steps_to_solve.unsolved", num(r.steps_to_solve.unsolved));
    for (const auto& q : r.trial_sizes) {
        const auto p = "trial_size.step" + std::to_string(q.step) + ".";
        rows.emplace_back(p + "count", num(q.count));
        rows.emplace_back(p + "min", num(q.min));
        rows.emplace_back(p + "q1", num(q.q1));
        rows.emplace_back(p + "median", num(q.median));
        rows.emplace_back(p + "q3", num(q.q3));
        rows.emplace_back(p + "max", num(q.max));
    }
    for (std::size_t k = 0; k < r.query_labels.size(); ++k)
        rows.emplace_back(std::string("query_labels.") + kQueryLabelNames[k], num(r.query_labels[k]));
    return rows;
}

enum class ReportFormat { json, csv };

inline std::string render_report(const MetricsReport& r, ReportFormat format) {
    if (format == ReportFormat::json) return to_json(r).dump(2) + "\n";
    std::string out = "metric,value\n";
    for (const auto& [k, v] : flatten_report(r)) out += k + "," + v + "\n";
    return out;
}

inline void write_report(const MetricsReport& r, ReportFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open report file for writing: " + path.string());
    out << render_report(r, format);
    if (!out) throw std::runtime_error("failed writing report file: " + path.string());
}

inline void write_transcripts(std::span<const EpisodeTranscript> transcripts, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open transcript file for writing: " + path.string());
    for (const auto& t : transcripts) out << to_json(t).dump() << '\n';
    if (!out) throw std::runtime_error("failed writing transcript file: " + path.string());
}

}  // namespace est
