#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace est {

inline constexpr int kNumObjects = 9;
inline constexpr int kObservationSize = kNumObjects + 1;
inline constexpr int kNumHypotheses = 1 << kNumObjects;

// ─── Errors ───────────────────────────────────────────────────

/// Malformed input to an operation (wrong length, out-of-range entry).
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Operation invoked in a state that does not allow it (step after done...).
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Observations that no Blicket assignment can explain.
struct InconsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ─── Object sets ──────────────────────────────────────────────

/// A subset of the objects {0..8}, stored as a bitmask.
class ObjectSet {
public:
    constexpr ObjectSet() = default;
    constexpr explicit ObjectSet(std::uint16_t bits) : bits_(bits & kFull) {}
    constexpr ObjectSet(std::initializer_list<int> members) {
        for (int m : members) insert(m);
    }

    static constexpr ObjectSet all() { return ObjectSet(kFull); }

    constexpr std::uint16_t bits() const { return bits_; }
    constexpr bool contains(int i) const { return (bits_ >> i) & 1u; }
    constexpr int size() const { return std::popcount(bits_); }
    constexpr bool empty() const { return bits_ == 0; }

    constexpr void insert(int i) {
        if (i < 0 || i >= kNumObjects) throw ContractError("object index out of range: " + std::to_string(i));
        bits_ = static_cast<std::uint16_t>(bits_ | (1u << i));
    }
    constexpr void erase(int i) { bits_ = static_cast<std::uint16_t>(bits_ & ~(1u << i)); }

    constexpr bool intersects(ObjectSet other) const { return (bits_ & other.bits_) != 0; }
    constexpr ObjectSet operator&(ObjectSet o) const { return ObjectSet(static_cast<std::uint16_t>(bits_ & o.bits_)); }
    constexpr ObjectSet operator|(ObjectSet o) const { return ObjectSet(static_cast<std::uint16_t>(bits_ | o.bits_)); }
    constexpr ObjectSet complement() const { return ObjectSet(static_cast<std::uint16_t>(~bits_)); }

    std::vector<int> members() const {
        std::vector<int> out;
        for (int i = 0; i < kNumObjects; ++i)
            if (contains(i)) out.push_back(i);
        return out;
    }

    friend constexpr bool operator==(ObjectSet, ObjectSet) = default;

private:
    static constexpr std::uint16_t kFull = (1u << kNumObjects) - 1;
    std::uint16_t bits_ = 0;
};

/// Hidden ground truth or a hypothesis: the set of Blickets.
using BlicketAssignment = ObjectSet;

// ─── Objects ──────────────────────────────────────────────────

enum class Shape : std::uint8_t { cube, sphere, cylinder };
enum class Material : std::uint8_t { metal, rubber };
enum class Color : std::uint8_t { gray, red, blue, green, brown, cyan, purple, yellow };

inline constexpr int kNumShapes = 3;
inline constexpr int kNumMaterials = 2;
inline constexpr int kNumColors = 8;
inline constexpr int kAttributePoolSize = kNumShapes * kNumMaterials * kNumColors;

inline constexpr std::array<const char*, kNumShapes> kShapeNames{"cube", "sphere", "cylinder"};
inline constexpr std::array<const char*, kNumMaterials> kMaterialNames{"metal", "rubber"};
inline constexpr std::array<const char*, kNumColors> kColorNames{
    "gray", "red", "blue", "green", "brown", "cyan", "purple", "yellow"};

struct ObjectSpec {
    Shape shape = Shape::cube;
    Material material = Material::metal;
    Color color = Color::gray;

    /// Position in the 48-entry attribute pool.
    constexpr int pool_index() const {
        return (static_cast<int>(shape) * kNumMaterials + static_cast<int>(material)) * kNumColors +
               static_cast<int>(color);
    }
    static constexpr ObjectSpec from_pool_index(int k) {
        return ObjectSpec{static_cast<Shape>(k / (kNumMaterials * kNumColors)),
                          static_cast<Material>((k / kNumColors) % kNumMaterials),
                          static_cast<Color>(k % kNumColors)};
    }

    friend constexpr bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

// ─── Panels and observations ──────────────────────────────────

/// One experiment: the objects on the machine and whether it lit up.
struct Panel {
    ObjectSet objects;
    bool machine_on = false;

    /// The panel the deterministic disjunctive machine produces for `truth`.
    static constexpr Panel run(ObjectSet objects, BlicketAssignment truth) {
        return Panel{objects, objects.intersects(truth)};
    }

    friend constexpr bool operator==(const Panel&, const Panel&) = default;
};

/// Entries 0..8 are object presence, entry 9 is the machine status.
using ObservationVector = std::array<std::uint8_t, kObservationSize>;

constexpr ObservationVector encode_observation(const Panel& panel) {
    ObservationVector v{};
    for (int i = 0; i < kNumObjects; ++i) v[i] = panel.objects.contains(i) ? 1 : 0;
    v[kNumObjects] = panel.machine_on ? 1 : 0;
    return v;
}

inline Panel decode_observation(const ObservationVector& v) {
    Panel p;
    for (int i = 0; i < kObservationSize; ++i)
        if (v[i] > 1) throw ContractError("observation entries must be 0 or 1");
    for (int i = 0; i < kNumObjects; ++i)
        if (v[i]) p.objects.insert(i);
    p.machine_on = v[kNumObjects] != 0;
    return p;
}

// ─── Probability vectors ──────────────────────────────────────

/// Nine per-object probabilities. The tag keeps beliefs and trials apart.
template <class Tag>
struct ProbabilityVector {
    std::array<double, kNumObjects> probs{};

    ProbabilityVector() = default;
    explicit ProbabilityVector(const std::array<double, kNumObjects>& values) : probs(values) { validate(); }

    static ProbabilityVector filled(double value) {
        std::array<double, kNumObjects> a;
        a.fill(value);
        return ProbabilityVector(a);
    }

    template <class Range>
    static ProbabilityVector from_range(const Range& values) {
        if (std::size(values) != kNumObjects)
            throw ContractError("expected " + std::to_string(kNumObjects) + " probabilities, got " +
                                std::to_string(std::size(values)));
        std::array<double, kNumObjects> a;
        int i = 0;
        for (double v : values) a[i++] = v;
        return ProbabilityVector(a);
    }

    void validate() const {
        for (double p : probs)
            if (!(p >= 0.0 && p <= 1.0)) throw ContractError("probability outside [0,1]: " + std::to_string(p));
    }

    double operator[](int i) const { return probs[i]; }
    double& operator[](int i) { return probs[i]; }

    friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;
};

struct BeliefTag {};
struct TrialTag {};
using BeliefVector = ProbabilityVector<BeliefTag>;
using TrialVector = ProbabilityVector<TrialTag>;

struct Action {
    TrialVector trial;
    BeliefVector belief;

    friend bool operator==(const Action&, const Action&) = default;
};

// ─── Divergence ───────────────────────────────────────────────

namespace detail {
// p * log2(p / m), with 0 log 0 = 0.
inline double kl_term(double p, double m) { return p > 0.0 ? p * std::log2(p / m) : 0.0; }
}  // namespace detail

/// Jensen-Shannon divergence between Bernoulli(p) and Bernoulli(q), base 2.
inline double jsd_bernoulli(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
        throw std::domain_error("jsd_bernoulli: arguments must lie in [0,1]");
    if (p == q) return 0.0;
    const double m1 = 0.5 * (p + q);
    const double m0 = 1.0 - m1;
    const double kl_p = detail::kl_term(p, m1) + detail::kl_term(1.0 - p, m0);
    const double kl_q = detail::kl_term(q, m1) + detail::kl_term(1.0 - q, m0);
    const double d = 0.5 * (kl_p + kl_q);
    return d < 0.0 ? 0.0 : (d > 1.0 ? 1.0 : d);
}

/// Mean per-object JSD; lies in [0,1].
inline double belief_divergence(const BeliefVector& belief, const BeliefVector& oracle) {
    double sum = 0.0;
    for (int i = 0; i < kNumObjects; ++i) sum += jsd_bernoulli(belief[i], oracle[i]);
    return sum / kNumObjects;
}

/// Untyped overload; rejects vectors that are not 9 long.
inline double belief_divergence(const std::vector<double>& belief, const std::vector<double>& oracle) {
    if (belief.size() != kNumObjects || oracle.size() != kNumObjects)
        throw ContractError("belief_divergence: both vectors must have 9 entries");
    return belief_divergence(BeliefVector::from_range(belief), BeliefVector::from_range(oracle));
}

// ─── Thresholding ─────────────────────────────────────────────

enum class Decision : std::uint8_t { non_blicket, blicket, undecided };

inline std::array<Decision, kNumObjects> threshold_decisions(const BeliefVector& belief) {
    std::array<Decision, kNumObjects> out{};
    for (int i = 0; i < kNumObjects; ++i) {
        if (belief[i] > 0.5)
            out[i] = Decision::blicket;
        else if (belief[i] < 0.5)
            out[i] = Decision::non_blicket;
        else
            out[i] = Decision::undecided;
    }
    return out;
}

// ─── Configuration ────────────────────────────────────────────

enum class TrialBinarization : std::uint8_t { threshold, sample };

/// Which oracle the shaping term of an unsolved step compares against.
enum class OracleTiming : std::uint8_t { post_trial, pre_trial };

struct IntRange {
    int lo = 0;
    int hi = 0;
    friend constexpr bool operator==(const IntRange&, const IntRange&) = default;
};

struct Config {
    int num_objects = kNumObjects;
    int num_context_panels = 4;
    int max_steps = 10;
    IntRange blicket_count_range{3, 8};
    IntRange context_panel_size_range{2, 6};
    double solve_bonus = 20.0;
    double step_penalty = -1.0;
    TrialBinarization trial_binarization = TrialBinarization::threshold;
    bool oracle_cardinality_prior = false;
    OracleTiming oracle_timing = OracleTiming::post_trial;
    int panel_attempts = 10000;      // context draws per assignment
    int assignment_attempts = 100;   // assignment re-draws before giving up
    double discount = 0.99;          // informational; consumed by external trainers only

    void validate() const {
        if (num_objects != kNumObjects) throw ContractError("num_objects must be 9");
        if (num_context_panels < 1) throw ContractError("num_context_panels must be >= 1");
        if (max_steps < 1) throw ContractError("max_steps must be >= 1");
        if (blicket_count_range.lo < 0 || blicket_count_range.lo > blicket_count_range.hi ||
            blicket_count_range.hi > kNumObjects)
            throw ContractError("blicket_count_range must be a nonempty range inside [0,9]");
        if (context_panel_size_range.lo < 0 || context_panel_size_range.lo > context_panel_size_range.hi ||
            context_panel_size_range.hi > kNumObjects)
            throw ContractError("context_panel_size_range must be a nonempty range inside [0,9]");
        if (panel_attempts < 1 || assignment_attempts < 1) throw ContractError("attempt budgets must be >= 1");
    }

    friend bool operator==(const Config&, const Config&) = default;
};

}  // namespace est
