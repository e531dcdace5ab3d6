#include <gtest/gtest.h>

#include "est/env.hpp"
#include "est/serialize.hpp"
#include "reference_oracles.hpp"

using namespace est;

namespace {

Action action_with(BeliefVector belief, ObjectSet trial = {}) {
    Action a;
    a.belief = belief;
    for (int i : trial.members()) a.trial[i] = 1.0;
    return a;
}

BeliefVector truth_belief(BlicketAssignment truth) {
    BeliefVector b = BeliefVector::filled(0.0);
    for (int i : truth.members()) b[i] = 1.0;
    return b;
}

Action random_action(SeededRng& rng) {
    Action a;
    for (int i = 0; i < 9; ++i) a.trial[i] = rng.uniform01();
    for (int i = 0; i < 9; ++i) a.belief[i] = rng.uniform01();
    return a;
}

}  // namespace

TEST(Reset, DeterministicContext) {
    Environment a, b;
    const auto ra = a.reset(42, 0), rb = b.reset(42, 0);
    EXPECT_EQ(ra.observations, rb.observations);
    ASSERT_EQ(ra.observations.size(), 4u);
    for (const auto& o : ra.observations) EXPECT_EQ(o.size(), 10u);
    EXPECT_EQ(a.status(), EpisodeStatus::awaiting_first_action);
    bool interior = false;
    for (double p : a.oracle().probs) interior |= p > 0.0 && p < 1.0;
    EXPECT_TRUE(interior);
    EXPECT_EQ(a.feasible().observations().size(), 4u);
}

TEST(Reset, FreshEpisodeIds) {
    Environment env;
    const auto first = env.reset(42, 0).episode_id;
    EXPECT_NE(env.reset(42, 0).episode_id, first);
}

TEST(Step, InstantSolve) {
    Environment env;
    env.reset(42, 3);
    const int before = env.feasible().size();
    const auto r = env.step(action_with(truth_belief(env.spec().ground_truth), ObjectSet{0, 1}));
    EXPECT_EQ(r.reward, 20.0);
    EXPECT_TRUE(r.done);
    EXPECT_TRUE(r.info.solved);
    EXPECT_EQ(r.observation, ObservationVector{});
    EXPECT_EQ(env.status(), EpisodeStatus::solved);
    EXPECT_EQ(env.feasible().size(), before);  // proposed trial not executed
    const auto t = env.export_transcript();
    EXPECT_EQ(t.steps.back().reward, 20.0);
    EXPECT_FALSE(t.steps.back().executed);
}

TEST(Step, EmptyTrialTurnsMachineOff) {
    Environment env;
    env.reset(42, 1);
    const auto r = env.step(action_with(BeliefVector::filled(0.5)));
    EXPECT_EQ(r.observation[9], 0);
    EXPECT_FALSE(r.done);
    EXPECT_GE(r.reward, -2.0);
    EXPECT_LE(r.reward, -1.0);
    EXPECT_EQ(env.status(), EpisodeStatus::running);
    EXPECT_EQ(env.step_index(), 1);
}

TEST(Step, TenUnsolvedStepsExhaust) {
    Environment env;
    env.reset(42, 2);
    double total = 0;
    for (int k = 0; k < 10; ++k) {
        ASSERT_FALSE(env.done());
        const auto r = env.step(action_with(BeliefVector::filled(0.5), ObjectSet{k % 9}));
        total += r.reward;
        EXPECT_EQ(r.done, k == 9);
    }
    EXPECT_EQ(env.status(), EpisodeStatus::exhausted);
    EXPECT_GE(total, -20.0);
    EXPECT_LE(total, -10.0);
    EXPECT_THROW(env.step(action_with(BeliefVector::filled(0.5))), StateError);
}

TEST(Step, ErrorPaths) {
    Environment env;
    EXPECT_THROW(env.step(action_with(BeliefVector::filled(0.5))), StateError);
    env.reset(42, 0);
    EXPECT_THROW(env.export_transcript(), StateError);
    Action bad;
    bad.trial.probs[0] = 1.5;
    EXPECT_THROW(env.step(bad), ContractError);
    bad = Action{};
    bad.belief.probs[4] = -0.01;
    EXPECT_THROW(env.step(bad), ContractError);
    EXPECT_EQ(env.status(), EpisodeStatus::awaiting_first_action);
}

TEST(Step, RewardUsesPostTrialOracleByDefault) {
    for (auto timing : {OracleTiming::post_trial, OracleTiming::pre_trial}) {
        Config c;
        c.oracle_timing = timing;
        Environment env(c);
        env.reset(42, 4);
        const auto pre = env.oracle();
        const auto belief = BeliefVector::filled(0.5);
        const auto r = env.step(action_with(belief, ObjectSet{0}));
        const auto& reference = timing == OracleTiming::post_trial ? env.oracle() : pre;
        EXPECT_DOUBLE_EQ(r.reward, -1.0 - belief_divergence(belief, reference));
    }
}

TEST(Step, SampleBinarizationIsSeeded) {
    Config c;
    c.trial_binarization = TrialBinarization::sample;
    auto run = [&] {
        Environment env(c);
        env.reset(7, 7);
        SeededRng rng(1, 1);
        std::vector<Panel> executed;
        while (!env.done()) {
            env.step(random_action(rng));
            executed.push_back(env.transcript().steps.back().trial);
        }
        return executed;
    };
    EXPECT_EQ(run(), run());
}

TEST(EnvProperties, FuzzRewardBoundsAndOracleConsistency) {
    SeededRng rng(2024, 0);
    for (std::uint64_t e = 0; e < 300; ++e) {
        Environment env;
        env.reset(11, e);
        std::vector<est_ref::RefPanel> prefix;
        for (const auto& p : env.spec().context) prefix.push_back({p.objects.members(), p.machine_on});
        double total = 0;
        int steps = 0;
        while (!env.done()) {
            const auto r = env.step(random_action(rng));
            ++steps;
            total += r.reward;
            ASSERT_TRUE(r.reward == 20.0 || (r.reward >= -2.0 && r.reward <= -1.0)) << r.reward;
            const auto& rec = env.transcript().steps.back();
            if (rec.executed) prefix.push_back({rec.trial.objects.members(), rec.trial.machine_on});
            const auto freq = est_ref::membership_frequency(est_ref::enumerate_feasible(prefix));
            for (int i = 0; i < 9; ++i) ASSERT_DOUBLE_EQ(r.info.oracle_belief[i], freq[i]);
        }
        EXPECT_LE(steps, 10);
        EXPECT_GE(total, -20.0);
        EXPECT_LE(total, 20.0);
        EXPECT_TRUE(env.status() == EpisodeStatus::solved || env.status() == EpisodeStatus::exhausted);
    }
}

TEST(Transcript, ReplayAndJsonRoundTrip) {
    Environment env;
    env.reset(42, 5);
    SeededRng rng(3, 3);
    while (!env.done()) env.step(random_action(rng));
    const auto t = env.export_transcript();

    EXPECT_TRUE(replay_transcript(t).pass);

    const auto j = to_json(t);
    const auto back = transcript_from_json(Json::parse(j.dump()));
    EXPECT_EQ(back, t);
    EXPECT_EQ(to_json(back).dump(), j.dump());

    auto perturbed = t;
    perturbed.steps[3].reward += 1e-9;
    const auto v = replay_transcript(perturbed);
    EXPECT_FALSE(v.pass);
    EXPECT_EQ(v.divergent_step, 3);
}

TEST(Transcript, DigestMismatchIsRejected) {
    Environment env;
    env.reset(1, 1);
    while (!env.done()) env.step(action_with(BeliefVector::filled(0.5)));
    auto j = to_json(env.export_transcript());
    j["config_digest"] = "0000000000000000";
    EXPECT_THROW(transcript_from_json(j), ConfigMismatchError);
}
