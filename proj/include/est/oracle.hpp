#pragma once

#include <bitset>
#include <span>
#include <vector>

#include "est/core.hpp"

namespace est {

/// The machine lights up iff at least one Blicket is on it.
constexpr bool is_consistent(BlicketAssignment hypothesis, const Panel& panel) {
    return panel.objects.intersects(hypothesis) == panel.machine_on;
}

/// All Blicket assignments (out of the 512 subsets of {0..8}) consistent
/// with every panel observed so far. Bit h is set iff hypothesis h survives.
class FeasibleSet {
public:
    FeasibleSet() { hypotheses_.set(); }

    explicit FeasibleSet(std::span<const Panel> panels) : FeasibleSet() {
        for (const auto& p : panels) filter(p);
    }

    /// Drops every hypothesis the panel contradicts. Throws if none remain;
    /// the set is left untouched in that case.
    FeasibleSet& filter(const Panel& panel) {
        auto next = hypotheses_;
        for (int h = 0; h < kNumHypotheses; ++h)
            if (next[h] && !is_consistent(ObjectSet(static_cast<std::uint16_t>(h)), panel)) next.reset(h);
        if (next.none()) throw InconsistencyError("no Blicket assignment is consistent with the observations");
        hypotheses_ = next;
        observations_.push_back(panel);
        return *this;
    }

    bool contains(BlicketAssignment a) const { return hypotheses_[a.bits()]; }
    int size() const { return static_cast<int>(hypotheses_.count()); }
    const std::bitset<kNumHypotheses>& hypotheses() const { return hypotheses_; }
    const std::vector<Panel>& observations() const { return observations_; }

    std::vector<BlicketAssignment> assignments() const {
        std::vector<BlicketAssignment> out;
        for (int h = 0; h < kNumHypotheses; ++h)
            if (hypotheses_[h]) out.emplace_back(static_cast<std::uint16_t>(h));
        return out;
    }

private:
    std::bitset<kNumHypotheses> hypotheses_;
    std::vector<Panel> observations_;
};

inline FeasibleSet filter(FeasibleSet set, const Panel& panel) {
    set.filter(panel);
    return set;
}

using OracleBelief = BeliefVector;

/// Per-object membership frequency over the feasible set. With the
/// cardinality prior, only hypotheses with 3..8 Blickets are counted.
inline OracleBelief oracle_belief(const FeasibleSet& set, bool use_cardinality_prior = false,
                                  IntRange cardinality = {3, 8}) {
    std::array<int, kNumObjects> counts{};
    int total = 0;
    const auto& bits = set.hypotheses();
    for (int h = 0; h < kNumHypotheses; ++h) {
        if (!bits[h]) continue;
        const ObjectSet a(static_cast<std::uint16_t>(h));
        if (use_cardinality_prior && (a.size() < cardinality.lo || a.size() > cardinality.hi)) continue;
        ++total;
        for (int i = 0; i < kNumObjects; ++i) counts[i] += a.contains(i);
    }
    if (total == 0) throw InconsistencyError("oracle belief requested over an empty feasible set");
    std::array<double, kNumObjects> probs;
    for (int i = 0; i < kNumObjects; ++i) probs[i] = static_cast<double>(counts[i]) / total;
    return OracleBelief(probs);
}

/// True iff the thresholded belief names exactly the true Blickets.
inline bool is_solved(const BeliefVector& belief, BlicketAssignment truth) {
    const auto decisions = threshold_decisions(belief);
    for (int i = 0; i < kNumObjects; ++i) {
        const Decision expected = truth.contains(i) ? Decision::blicket : Decision::non_blicket;
        if (decisions[i] != expected) return false;
    }
    return true;
}

/// +bonus on success; otherwise penalty minus the belief/oracle divergence.
inline double step_reward(bool solved, const BeliefVector& belief, const OracleBelief& oracle, const Config& config) {
    if (solved) return config.solve_bonus;
    return config.step_penalty - belief_divergence(belief, oracle);
}

}  // namespace est
