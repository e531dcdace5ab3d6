#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "est/core.hpp"
#include "est/oracle.hpp"
#include "est/rng.hpp"

namespace est {

/// Heuristic agent contract: sees the context, then alternates act/observe.
/// All randomness comes from the SeededRng given at construction, so a replay
/// with the same seed and history yields the same actions.
class Agent {
public:
    explicit Agent(SeededRng rng) : rng_(std::move(rng)) {}
    virtual ~Agent() = default;

    virtual std::string_view name() const = 0;

    void begin_episode(std::span<const Panel> context) {
        history_.assign(context.begin(), context.end());
        on_begin();
    }

    /// Called with the executed trial panel after each non-terminal step.
    void observe(const Panel& executed) {
        history_.push_back(executed);
        on_observe(executed);
    }

    virtual Action act() = 0;

    const std::vector<Panel>& history() const { return history_; }

protected:
    virtual void on_begin() {}
    virtual void on_observe(const Panel&) {}

    /// Each object selected independently with probability 1/2, emitted as 0/1.
    TrialVector random_subset_trial() {
        TrialVector t;
        for (int i = 0; i < kNumObjects; ++i) t[i] = rng_.bernoulli(0.5) ? 1.0 : 0.0;
        return t;
    }

    static TrialVector singleton_trial(int object) {
        TrialVector t;
        if (object >= 0) t[object] = 1.0;
        return t;
    }

    SeededRng rng_;
    std::vector<Panel> history_;
};

// ─── Random ───────────────────────────────────────────────────

class RandomAgent final : public Agent {
public:
    using Agent::Agent;
    std::string_view name() const override { return "random"; }

    Action act() override {
        Action a;
        for (int i = 0; i < kNumObjects; ++i) a.trial[i] = rng_.uniform01();
        for (int i = 0; i < kNumObjects; ++i) a.belief[i] = rng_.uniform01();
        return a;
    }
};

// ─── Bayes ────────────────────────────────────────────────────

/// Bernoulli naive Bayes over panels (presence bits -> machine status) with
/// Laplace smoothing on the feature likelihoods and an empirical class prior.
/// belief[i] is P(on | only object i present).
inline BeliefVector bernoulli_naive_bayes_belief(std::span<const Panel> panels, double alpha = 1.0) {
    std::array<int, 2> class_count{};
    std::array<std::array<int, kNumObjects>, 2> feature_count{};
    for (const auto& p : panels) {
        const int c = p.machine_on ? 1 : 0;
        ++class_count[c];
        for (int i = 0; i < kNumObjects; ++i) feature_count[c][i] += p.objects.contains(i);
    }
    const int n = class_count[0] + class_count[1];

    BeliefVector belief = BeliefVector::filled(0.5);
    if (n == 0) return belief;

    std::array<std::array<double, kNumObjects>, 2> log_on{}, log_off{};  // log P(x=1|c), log P(x=0|c)
    for (int c = 0; c < 2; ++c) {
        for (int i = 0; i < kNumObjects; ++i) {
            const double theta = (feature_count[c][i] + alpha) / (class_count[c] + 2.0 * alpha);
            log_on[c][i] = std::log(theta);
            log_off[c][i] = std::log1p(-theta);
        }
    }

    for (int q = 0; q < kNumObjects; ++q) {
        std::array<double, 2> joint{};
        for (int c = 0; c < 2; ++c) {
            if (class_count[c] == 0) {
                joint[c] = -INFINITY;
                continue;
            }
            double s = std::log(static_cast<double>(class_count[c]) / n);
            for (int i = 0; i < kNumObjects; ++i) s += (i == q) ? log_on[c][i] : log_off[c][i];
            joint[c] = s;
        }
        if (joint[1] == -INFINITY)
            belief[q] = 0.0;
        else if (joint[0] == -INFINITY)
            belief[q] = 1.0;
        else
            belief[q] = 1.0 / (1.0 + std::exp(joint[0] - joint[1]));
    }
    return belief;
}

class BayesAgent final : public Agent {
public:
    using Agent::Agent;
    std::string_view name() const override { return "bayes"; }

    Action act() override {
        Action a;
        a.belief = bernoulli_naive_bayes_belief(history_);
        a.trial = random_subset_trial();
        return a;
    }
};

// ─── Naive ────────────────────────────────────────────────────

enum class Knowledge : std::uint8_t { unknown, blicket, non_blicket };

/// One-object-at-a-time tester. Knowledge comes from singleton activated
/// panels and, unless disabled, from every member of an inactive panel.
class NaiveAgent final : public Agent {
public:
    NaiveAgent(SeededRng rng, bool use_inactive_evidence = true)
        : Agent(std::move(rng)), use_inactive_evidence_(use_inactive_evidence) {}

    std::string_view name() const override { return use_inactive_evidence_ ? "naive" : "naive-singleton"; }

    Action act() override {
        std::vector<int> candidates;
        for (int i = 0; i < kNumObjects; ++i)
            if (knowledge_[i] == Knowledge::unknown && !tested_.contains(i)) candidates.push_back(i);

        Action a;
        const int pick = candidates.empty() ? -1 : candidates[rng_.below(candidates.size())];
        a.trial = singleton_trial(pick);
        for (int i = 0; i < kNumObjects; ++i)
            a.belief[i] = knowledge_[i] == Knowledge::blicket ? 1.0 : knowledge_[i] == Knowledge::non_blicket ? 0.0 : 0.5;
        return a;
    }

    const std::array<Knowledge, kNumObjects>& knowledge() const { return knowledge_; }
    ObjectSet tested() const { return tested_; }

protected:
    void on_begin() override {
        knowledge_.fill(Knowledge::unknown);
        tested_ = ObjectSet{};
        for (const auto& p : history_) learn(p);
    }

    void on_observe(const Panel& p) override {
        if (p.objects.size() == 1) tested_.insert(p.objects.members().front());
        learn(p);
    }

private:
    void learn(const Panel& p) {
        if (p.machine_on && p.objects.size() == 1) {
            settle(p.objects.members().front(), Knowledge::blicket);
        } else if (!p.machine_on && (use_inactive_evidence_ || p.objects.size() == 1)) {
            for (int i : p.objects.members()) settle(i, Knowledge::non_blicket);
        }
    }

    void settle(int i, Knowledge k) {
        if (knowledge_[i] == Knowledge::unknown) knowledge_[i] = k;
    }

    bool use_inactive_evidence_;
    std::array<Knowledge, kNumObjects> knowledge_{};
    ObjectSet tested_;
};

// ─── Search-based ─────────────────────────────────────────────

/// Shared state of the two search agents: the feasible set over the history.
class SearchAgentBase : public Agent {
public:
    SearchAgentBase(SeededRng rng, bool use_cardinality_prior)
        : Agent(std::move(rng)), use_cardinality_prior_(use_cardinality_prior) {}

protected:
    void on_begin() override { feasible_ = FeasibleSet(history_); }
    void on_observe(const Panel& p) override { feasible_.filter(p); }

    BeliefVector searched_belief() const { return oracle_belief(feasible_, use_cardinality_prior_); }

    FeasibleSet feasible_;
    bool use_cardinality_prior_;
};

class SearchRandomAgent final : public SearchAgentBase {
public:
    explicit SearchRandomAgent(SeededRng rng, bool use_cardinality_prior = false)
        : SearchAgentBase(std::move(rng), use_cardinality_prior) {}
    std::string_view name() const override { return "search-random"; }

    Action act() override {
        Action a;
        a.belief = searched_belief();
        a.trial = random_subset_trial();
        return a;
    }
};

/// Most uncertain interior object, lowest index on ties; -1 if none.
inline int most_uncertain_object(const BeliefVector& belief) {
    int best = -1;
    double best_distance = INFINITY;
    for (int i = 0; i < kNumObjects; ++i) {
        if (belief[i] <= 0.0 || belief[i] >= 1.0) continue;
        const double d = std::fabs(belief[i] - 0.5);
        if (d < best_distance) {
            best_distance = d;
            best = i;
        }
    }
    return best;
}

class SearchNaiveAgent final : public SearchAgentBase {
public:
    explicit SearchNaiveAgent(SeededRng rng, bool use_cardinality_prior = false)
        : SearchAgentBase(std::move(rng), use_cardinality_prior) {}
    std::string_view name() const override { return "search-naive"; }

    Action act() override {
        Action a;
        a.belief = searched_belief();
        a.trial = singleton_trial(most_uncertain_object(a.belief));
        return a;
    }
};

// ─── Registry ─────────────────────────────────────────────────

inline constexpr std::array<std::string_view, 5> kAgentNames{"random", "bayes", "naive", "search-random",
                                                             "search-naive"};

struct AgentOptions {
    bool naive_use_inactive_evidence = true;
    bool search_cardinality_prior = false;
};

inline std::unique_ptr<Agent> make_agent(std::string_view name, SeededRng rng, const AgentOptions& opts = {}) {
    if (name == "random") return std::make_unique<RandomAgent>(std::move(rng));
    if (name == "bayes") return std::make_unique<BayesAgent>(std::move(rng));
    if (name == "naive") return std::make_unique<NaiveAgent>(std::move(rng), opts.naive_use_inactive_evidence);
    if (name == "naive-singleton") return std::make_unique<NaiveAgent>(std::move(rng), false);
    if (name == "search-random") return std::make_unique<SearchRandomAgent>(std::move(rng), opts.search_cardinality_prior);
    if (name == "search-naive") return std::make_unique<SearchNaiveAgent>(std::move(rng), opts.search_cardinality_prior);
    throw ContractError("unknown agent: " + std::string(name));
}

}  // namespace est
