#include <gtest/gtest.h>

#include <random>

#include "est/core.hpp"
#include "reference_oracles.hpp"

using namespace est;

TEST(Jsd, IdenticalIsZero) { EXPECT_EQ(jsd_bernoulli(0.5, 0.5), 0.0); }

TEST(Jsd, DisjointSupportIsOne) { EXPECT_DOUBLE_EQ(jsd_bernoulli(1.0, 0.0), 1.0); }

TEST(Jsd, HalfVersusZeroMatchesEntropyForm) {
    // H(0.25) - (H(0.5) + H(0)) / 2 = 0.811278... - 0.5
    const double expected = est_ref::jsd_entropy_form(0.5, 0.0);
    EXPECT_NEAR(expected, 0.31128, 1e-5);
    EXPECT_NEAR(jsd_bernoulli(0.5, 0.0), expected, 1e-12);
}

TEST(Jsd, RejectsOutOfRange) {
    EXPECT_THROW(jsd_bernoulli(-0.1, 0.5), std::domain_error);
    EXPECT_THROW(jsd_bernoulli(0.5, 1.5), std::domain_error);
    EXPECT_THROW(jsd_bernoulli(std::nan(""), 0.5), std::domain_error);
}

TEST(Jsd, SymmetricBoundedAndAgreesWithEntropyForm) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20000; ++k) {
        double p = u(gen), q = u(gen);
        if (k % 10 == 0) p = std::round(p);  // exercise the 0 log 0 edges
        const double d = jsd_bernoulli(p, q);
        EXPECT_EQ(d, jsd_bernoulli(q, p));
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
        EXPECT_NEAR(d, est_ref::jsd_entropy_form(p, q), 1e-9);
        EXPECT_EQ(jsd_bernoulli(p, p), 0.0);
    }
}

TEST(BeliefDivergence, Examples) {
    EXPECT_EQ(belief_divergence(BeliefVector::filled(0.5), BeliefVector::filled(0.5)), 0.0);
    EXPECT_DOUBLE_EQ(belief_divergence(BeliefVector::filled(1.0), BeliefVector::filled(0.0)), 1.0);
    BeliefVector b = BeliefVector::filled(0.5);
    b[0] = 1.0;
    b[1] = 0.0;
    EXPECT_EQ(belief_divergence(b, b), 0.0);
}

TEST(BeliefDivergence, EqualsMeanOfCoordinates) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        BeliefVector a, b;
        double sum = 0;
        for (int i = 0; i < kNumObjects; ++i) {
            a[i] = u(gen);
            b[i] = u(gen);
            sum += est_ref::jsd_entropy_form(a[i], b[i]);
        }
        EXPECT_NEAR(belief_divergence(a, b), sum / 9.0, 1e-9);
    }
}

TEST(BeliefDivergence, LengthMismatchIsContractError) {
    EXPECT_THROW(belief_divergence(std::vector<double>(8, 0.5), std::vector<double>(9, 0.5)), ContractError);
}

TEST(Threshold, StrictHalf) {
    BeliefVector b = BeliefVector::filled(0.5);
    b[0] = 0.9;
    b[1] = 0.1;
    b[2] = 0.5000001;
    const auto d = threshold_decisions(b);
    EXPECT_EQ(d[0], Decision::blicket);
    EXPECT_EQ(d[1], Decision::non_blicket);
    EXPECT_EQ(d[2], Decision::blicket);
    for (int i = 3; i < 9; ++i) EXPECT_EQ(d[i], Decision::undecided);
}

TEST(Observation, Encoding) {
    const ObservationVector on02 = encode_observation(Panel{{0, 2}, true});
    EXPECT_EQ(on02, (ObservationVector{1, 0, 1, 0, 0, 0, 0, 0, 0, 1}));
    EXPECT_EQ(encode_observation(Panel{}), ObservationVector{});
}

TEST(Observation, RoundTripIsBijective) {
    std::vector<bool> seen(1024, false);
    for (int bits = 0; bits < 512; ++bits) {
        for (bool on : {false, true}) {
            const Panel p{ObjectSet(static_cast<std::uint16_t>(bits)), on};
            const auto v = encode_observation(p);
            EXPECT_EQ(decode_observation(v), p);
            int code = 0;
            for (int i = 0; i < 10; ++i) code |= v[i] << i;
            EXPECT_FALSE(seen[code]);
            seen[code] = true;
        }
    }
}

TEST(Observation, DecodeRejectsNonBinary) {
    ObservationVector v{};
    v[3] = 2;
    EXPECT_THROW(decode_observation(v), ContractError);
}

TEST(ProbabilityVector, Validation) {
    EXPECT_THROW(BeliefVector::filled(1.5), ContractError);
    EXPECT_THROW(TrialVector::from_range(std::vector<double>(10, 0.5)), ContractError);
    EXPECT_NO_THROW(TrialVector::from_range(std::vector<double>(9, 1.0)));
}

TEST(ObjectSpec, PoolIndexCoversAllCombinations) {
    for (int k = 0; k < kAttributePoolSize; ++k) EXPECT_EQ(ObjectSpec::from_pool_index(k).pool_index(), k);
}

TEST(Config, DefaultsAndValidation) {
    Config c;
    EXPECT_EQ(c.max_steps, 10);
    EXPECT_EQ(c.num_context_panels, 4);
    EXPECT_EQ(c.solve_bonus, 20.0);
    EXPECT_EQ(c.step_penalty, -1.0);
    EXPECT_EQ(c.discount, 0.99);
    EXPECT_NO_THROW(c.validate());
    c.max_steps = 0;
    EXPECT_THROW(c.validate(), ContractError);
    c = Config{};
    c.blicket_count_range = {5, 4};
    EXPECT_THROW(c.validate(), ContractError);
}
