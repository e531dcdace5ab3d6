#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "est/core.hpp"
#include "est/oracle.hpp"
#include "est/rng.hpp"

namespace est {

/// Rejection budget exhausted for every assignment re-draw.
struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class QueryLabel : std::uint8_t { direct, indirect, screening_off, backward_blocking, undetermined };

inline constexpr std::array<const char*, 5> kQueryLabelNames{"direct", "indirect", "screening-off",
                                                             "backward-blocking", "undetermined"};

struct EpisodeSpec {
    std::uint64_t seed = 0;
    std::uint64_t episode_index = 0;
    std::array<ObjectSpec, kNumObjects> objects{};
    BlicketAssignment ground_truth;
    std::vector<Panel> context;
    std::array<QueryLabel, kNumObjects> query_labels{};

    friend bool operator==(const EpisodeSpec&, const EpisodeSpec&) = default;
};

namespace detail {

/// First k entries of a uniform random permutation of [0, n).
inline std::vector<int> partial_shuffle(SeededRng& rng, int n, int k) {
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

/// Uniform `size`-subset of the objects; same draw sequence as partial_shuffle.
inline ObjectSet random_subset(SeededRng& rng, int size) {
    std::array<int, kNumObjects> pool;
    std::iota(pool.begin(), pool.end(), 0);
    ObjectSet s;
    for (int i = 0; i < size; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(kNumObjects - i)));
        std::swap(pool[i], pool[j]);
        s.insert(pool[i]);
    }
    return s;
}

}  // namespace detail

/// Nine distinct (shape, material, color) triples, uniform without replacement.
inline std::array<ObjectSpec, kNumObjects> sample_objects(SeededRng& rng) {
    std::array<ObjectSpec, kNumObjects> out{};
    const auto picks = detail::partial_shuffle(rng, kAttributePoolSize, kNumObjects);
    for (int i = 0; i < kNumObjects; ++i) out[i] = ObjectSpec::from_pool_index(picks[i]);
    return out;
}

/// n uniform in the configured range, then a uniform n-subset.
inline BlicketAssignment sample_assignment(SeededRng& rng, IntRange count_range = {3, 8}) {
    return detail::random_subset(rng, rng.between(count_range.lo, count_range.hi));
}

/// Majority vote over the panels containing each object; unseen objects are
/// classified as non-Blickets. Ties count as non-Blicket.
inline BlicketAssignment covariation_classify(std::span<const Panel> panels) {
    BlicketAssignment guess;
    for (int i = 0; i < kNumObjects; ++i) {
        int on = 0, off = 0;
        for (const auto& p : panels) {
            if (!p.objects.contains(i)) continue;
            (p.machine_on ? on : off) += 1;
        }
        if (on > off) guess.insert(i);
    }
    return guess;
}

namespace detail {

inline bool has_screening_off_candidate(std::span<const Panel> panels, BlicketAssignment truth) {
    for (int i = 0; i < kNumObjects; ++i) {
        if (truth.contains(i)) continue;
        bool seen = false, only_active = true;
        for (const auto& p : panels) {
            if (!p.objects.contains(i)) continue;
            seen = true;
            if (!p.machine_on || !p.objects.intersects(truth)) only_active = false;
        }
        if (seen && only_active) return true;
    }
    return false;
}

}  // namespace detail

/// Checks the four context constraints: both machine outcomes present, the
/// context leaves some object undetermined, covariation counting gets at least
/// one object wrong, and a screening-off candidate exists.
inline bool context_is_acceptable(std::span<const Panel> panels, BlicketAssignment truth, bool cardinality_prior = false,
                                  IntRange cardinality = {3, 8}) {
    bool any_on = false, any_off = false;
    for (const auto& p : panels) (p.machine_on ? any_on : any_off) = true;
    if (!any_on || !any_off) return false;

    if (covariation_classify(panels) == truth) return false;
    if (!detail::has_screening_off_candidate(panels, truth)) return false;

    const auto belief = oracle_belief(FeasibleSet(panels), cardinality_prior, cardinality);
    for (double p : belief.probs)
        if (p > 0.0 && p < 1.0) return true;
    return false;
}

/// Whether any context can satisfy the constraints for this truth: an
/// inactive panel holds at least `min_panel_size` non-Blickets, and the
/// screening-off candidate is one more non-Blicket outside it.
constexpr bool context_is_possible(BlicketAssignment truth, int min_panel_size) {
    return !truth.empty() && kNumObjects - truth.size() >= std::max(min_panel_size, 1) + 1;
}

/// Rejection-samples a context for `truth`. Returns nullopt when the attempt
/// budget runs out or the constraints are unsatisfiable for this truth.
inline std::optional<std::vector<Panel>> sample_context(SeededRng& rng, BlicketAssignment truth, const Config& config = {}) {
    const auto sizes = config.context_panel_size_range;
    if (!context_is_possible(truth, sizes.lo)) return std::nullopt;

    std::vector<Panel> panels(config.num_context_panels);
    for (int attempt = 0; attempt < config.panel_attempts; ++attempt) {
        for (auto& p : panels) p = Panel::run(detail::random_subset(rng, rng.between(sizes.lo, sizes.hi)), truth);
        if (context_is_acceptable(panels, truth, config.oracle_cardinality_prior, config.blicket_count_range))
            return panels;
    }
    return std::nullopt;
}

/// Per-object query type of a context. Priority when several apply: direct,
/// indirect, backward-blocking, screening-off, undetermined.
inline std::array<QueryLabel, kNumObjects> classify_query_types(std::span<const Panel> context, BlicketAssignment truth) {
    const auto belief = oracle_belief(FeasibleSet(context));
    const auto pinned = [&](int i) { return belief[i] == 0.0 || belief[i] == 1.0; };

    // Objects proven by one panel on its own, and the first panel doing so.
    std::array<int, kNumObjects> first_direct{};
    first_direct.fill(-1);
    for (int k = 0; k < static_cast<int>(context.size()); ++k) {
        const auto& p = context[k];
        for (int i : p.objects.members()) {
            const bool proves = !p.machine_on || p.objects.size() == 1;
            if (proves && first_direct[i] < 0) first_direct[i] = k;
        }
    }

    std::array<QueryLabel, kNumObjects> labels{};
    for (int i = 0; i < kNumObjects; ++i) {
        if (first_direct[i] >= 0) {
            labels[i] = QueryLabel::direct;
            continue;
        }
        if (pinned(i)) {
            labels[i] = QueryLabel::indirect;
            continue;
        }

        bool backward = false;
        for (int a = 0; a < static_cast<int>(context.size()) && !backward; ++a) {
            const auto& p = context[a];
            if (!p.machine_on || p.objects.size() < 2 || !p.objects.contains(i)) continue;
            for (int c : p.objects.members()) {
                if (c == i) continue;
                const int proof = first_direct[c];
                if (proof > a && context[proof].machine_on) backward = true;
            }
        }
        if (backward) {
            labels[i] = QueryLabel::backward_blocking;
            continue;
        }

        bool seen = false, screened = true;
        for (const auto& p : context) {
            if (!p.objects.contains(i)) continue;
            seen = true;
            bool has_proven_blicket = false;
            for (int c : p.objects.members())
                if (c != i && belief[c] == 1.0) has_proven_blicket = true;
            if (!p.machine_on || !has_proven_blicket) screened = false;
        }
        labels[i] = (seen && screened && !truth.contains(i)) ? QueryLabel::screening_off : QueryLabel::undetermined;
    }
    return labels;
}

/// Full episode for (master_seed, episode_index); independent of any other index.
inline EpisodeSpec generate_episode(std::uint64_t master_seed, std::uint64_t episode_index, const Config& config = {}) {
    SeededRng rng(master_seed, episode_index, Stream::episode);
    EpisodeSpec spec;
    spec.seed = master_seed;
    spec.episode_index = episode_index;
    spec.objects = sample_objects(rng);
    for (int attempt = 0; attempt < config.assignment_attempts; ++attempt) {
        const auto truth = sample_assignment(rng, config.blicket_count_range);
        if (auto context = sample_context(rng, truth, config)) {
            spec.ground_truth = truth;
            spec.context = std::move(*context);
            spec.query_labels = classify_query_types(spec.context, truth);
            return spec;
        }
    }
    throw GenerationError("episode generation exhausted its attempt budget (seed " + std::to_string(master_seed) +
                          ", index " + std::to_string(episode_index) + ")");
}

}  // namespace est
