#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "est/core.hpp"
#include "est/oracle.hpp"
#include "est/rng.hpp"
#include "est/sampler.hpp"

namespace est {

enum class EpisodeStatus : std::uint8_t { idle, awaiting_first_action, running, solved, exhausted };

struct StepInfo {
    OracleBelief oracle_belief;
    int feasible_count = 0;
    bool solved = false;

    friend bool operator==(const StepInfo&, const StepInfo&) = default;
};

struct StepResult {
    ObservationVector observation{};
    double reward = 0.0;
    bool done = false;
    StepInfo info;
};

struct StepRecord {
    Action action;
    Panel trial;            // executed panel; empty/off when the step solved without executing
    bool executed = false;
    double reward = 0.0;
    bool done = false;
    StepInfo info;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct EpisodeTranscript {
    EpisodeSpec spec;
    Config config;
    std::string agent;      // informational
    std::vector<StepRecord> steps;
    bool solved = false;
    double total_reward = 0.0;

    int steps_taken() const { return static_cast<int>(steps.size()); }

    friend bool operator==(const EpisodeTranscript&, const EpisodeTranscript&) = default;
};

struct ResetResult {
    std::vector<ObservationVector> observations;
    std::uint64_t episode_id = 0;
};

/// One Blicket-detection episode at a time. Not thread-safe; use one
/// instance per worker.
class Environment {
public:
    explicit Environment(Config config = {}) : config_(std::move(config)) { config_.validate(); }

    const Config& config() const { return config_; }

    ResetResult reset(std::uint64_t master_seed, std::uint64_t episode_index) {
        auto spec = generate_episode(master_seed, episode_index, config_);
        feasible_ = FeasibleSet(spec.context);
        oracle_ = current_oracle();
        trial_rng_.emplace(master_seed, episode_index, Stream::trial);
        step_index_ = 0;
        status_ = EpisodeStatus::awaiting_first_action;

        transcript_ = EpisodeTranscript{};
        transcript_.spec = std::move(spec);
        transcript_.config = config_;

        ResetResult r;
        for (const auto& p : transcript_.spec.context) r.observations.push_back(encode_observation(p));
        r.episode_id = ++episode_counter_;
        return r;
    }

    StepResult step(const Action& action) {
        if (status_ == EpisodeStatus::idle) throw StateError("step called before reset");
        if (done()) throw StateError("step called after the episode finished");
        action.trial.validate();
        action.belief.validate();

        const BlicketAssignment truth = transcript_.spec.ground_truth;
        const ObjectSet chosen = binarize(action.trial);
        status_ = EpisodeStatus::running;

        StepRecord record;
        record.action = action;
        StepResult result;

        if (is_solved(action.belief, truth)) {
            result.reward = config_.solve_bonus;
            result.done = true;
            status_ = EpisodeStatus::solved;
            result.info = StepInfo{oracle_, feasible_.size(), true};
            record.trial = Panel{};
        } else {
            const Panel panel = Panel::run(chosen, truth);
            const OracleBelief before = oracle_;
            feasible_.filter(panel);
            oracle_ = current_oracle();
            ++step_index_;
            const auto& reference = config_.oracle_timing == OracleTiming::post_trial ? oracle_ : before;
            result.reward = step_reward(false, action.belief, reference, config_);
            result.observation = encode_observation(panel);
            result.done = step_index_ >= config_.max_steps;
            if (result.done) status_ = EpisodeStatus::exhausted;
            result.info = StepInfo{oracle_, feasible_.size(), false};
            record.trial = panel;
            record.executed = true;
        }

        record.reward = result.reward;
        record.done = result.done;
        record.info = result.info;
        transcript_.steps.push_back(record);
        transcript_.total_reward += result.reward;
        transcript_.solved = status_ == EpisodeStatus::solved;
        return result;
    }

    bool done() const { return status_ == EpisodeStatus::solved || status_ == EpisodeStatus::exhausted; }
    EpisodeStatus status() const { return status_; }
    int step_index() const { return step_index_; }
    const FeasibleSet& feasible() const { return feasible_; }
    const OracleBelief& oracle() const { return oracle_; }
    const EpisodeSpec& spec() const { return transcript_.spec; }
    const EpisodeTranscript& transcript() const { return transcript_; }

    EpisodeTranscript export_transcript() const {
        if (!done()) throw StateError("transcript requested before the episode finished");
        return transcript_;
    }

private:
    OracleBelief current_oracle() const {
        return oracle_belief(feasible_, config_.oracle_cardinality_prior, config_.blicket_count_range);
    }

    ObjectSet binarize(const TrialVector& trial) {
        ObjectSet s;
        for (int i = 0; i < kNumObjects; ++i) {
            const bool pick = config_.trial_binarization == TrialBinarization::threshold ? trial[i] > 0.5
                                                                                          : trial_rng_->bernoulli(trial[i]);
            if (pick) s.insert(i);
        }
        return s;
    }

    Config config_;
    FeasibleSet feasible_;
    OracleBelief oracle_;
    std::optional<SeededRng> trial_rng_;
    int step_index_ = 0;
    EpisodeStatus status_ = EpisodeStatus::idle;
    EpisodeTranscript transcript_;
    std::uint64_t episode_counter_ = 0;
};

/// Outcome of re-running a transcript's recorded actions.
struct ReplayVerdict {
    bool pass = true;
    int divergent_step = -1;   // 0-based; -1 when passing or diverging before any step
    std::string message;
};

/// Re-executes the recorded actions and compares reward, done flag, and
/// executed panel step by step.
inline ReplayVerdict replay_transcript(const EpisodeTranscript& t) {
    Environment env(t.config);
    env.reset(t.spec.seed, t.spec.episode_index);
    if (!(env.spec() == t.spec)) return {false, -1, "episode spec differs from the regenerated episode"};
    for (int k = 0; k < t.steps_taken(); ++k) {
        const auto& rec = t.steps[k];
        if (env.done()) return {false, k, "episode ended before the recorded step"};
        const auto r = env.step(rec.action);
        if (r.reward != rec.reward) return {false, k, "reward mismatch"};
        if (r.done != rec.done) return {false, k, "termination mismatch"};
        if (env.transcript().steps.back().trial != rec.trial) return {false, k, "executed trial mismatch"};
    }
    if (!env.done()) return {false, t.steps_taken(), "recorded episode ends before termination"};
    return {};
}

}  // namespace est
