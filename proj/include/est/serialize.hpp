#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "est/core.hpp"
#include "est/env.hpp"
#include "est/sampler.hpp"

// JSON forms of the domain types. Field order is fixed (ordered_json) so that
// reports, transcripts, and protocol responses are byte-stable. Doubles are
// written by nlohmann's shortest round-trip formatter, which parses back to
// the identical bit pattern.

namespace est {

using Json = nlohmann::ordered_json;

namespace detail {

template <std::size_t N>
int enum_from_name(const std::array<const char*, N>& names, const std::string& s, const char* what) {
    for (std::size_t i = 0; i < N; ++i)
        if (s == names[i]) return static_cast<int>(i);
    throw ContractError(std::string("unknown ") + what + ": " + s);
}

inline constexpr std::array<const char*, 2> kBinarizationNames{"threshold", "sample"};
inline constexpr std::array<const char*, 2> kOracleTimingNames{"post_trial", "pre_trial"};

}  // namespace detail

// ─── Sets, panels, vectors ────────────────────────────────────

inline Json to_json(ObjectSet s) {
    Json j = Json::array();
    for (int i : s.members()) j.push_back(i);
    return j;
}

inline ObjectSet object_set_from_json(const Json& j) {
    if (!j.is_array()) throw ContractError("object set must be an array of indices");
    ObjectSet s;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw ContractError("object index must be an integer");
        s.insert(v.get<int>());
    }
    return s;
}

inline Json to_json(const Panel& p) { return Json{{"objects", to_json(p.objects)}, {"machine_on", p.machine_on}}; }

inline Panel panel_from_json(const Json& j) {
    return Panel{object_set_from_json(j.at("objects")), j.at("machine_on").get<bool>()};
}

inline Json to_json(const ObservationVector& v) {
    Json j = Json::array();
    for (auto b : v) j.push_back(static_cast<int>(b));
    return j;
}

template <class Tag>
Json to_json(const ProbabilityVector<Tag>& v) {
    Json j = Json::array();
    for (double p : v.probs) j.push_back(p);
    return j;
}

inline std::vector<double> doubles_from_json(const Json& j, std::size_t expected, const char* what) {
    if (!j.is_array() || j.size() != expected)
        throw ContractError(std::string(what) + " must be an array of " + std::to_string(expected) + " numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ContractError(std::string(what) + " entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

template <class Vec>
Vec probability_vector_from_json(const Json& j, const char* what) {
    return Vec::from_range(doubles_from_json(j, kNumObjects, what));
}

inline Json to_json(const Action& a) { return Json{{"trial", to_json(a.trial)}, {"belief", to_json(a.belief)}}; }

inline Action action_from_json(const Json& j) {
    return Action{probability_vector_from_json<TrialVector>(j.at("trial"), "trial"),
                  probability_vector_from_json<BeliefVector>(j.at("belief"), "belief")};
}

/// Wire form of an action: trial[0..8] followed by belief[0..8].
inline Action action_from_flat(const Json& j) {
    const auto v = doubles_from_json(j, 2 * kNumObjects, "action");
    return Action{TrialVector::from_range(std::span(v).first(kNumObjects)),
                  BeliefVector::from_range(std::span(v).last(kNumObjects))};
}

inline Json action_to_flat(const Action& a) {
    Json j = Json::array();
    for (double p : a.trial.probs) j.push_back(p);
    for (double p : a.belief.probs) j.push_back(p);
    return j;
}

// ─── Config ───────────────────────────────────────────────────

inline Json to_json(const Config& c) {
    return Json{{"num_objects", c.num_objects},
                {"num_context_panels", c.num_context_panels},
                {"max_steps", c.max_steps},
                {"blicket_count_range", {c.blicket_count_range.lo, c.blicket_count_range.hi}},
                {"context_panel_size_range", {c.context_panel_size_range.lo, c.context_panel_size_range.hi}},
                {"solve_bonus", c.solve_bonus},
                {"step_penalty", c.step_penalty},
                {"trial_binarization", detail::kBinarizationNames[static_cast<int>(c.trial_binarization)]},
                {"oracle_cardinality_prior", c.oracle_cardinality_prior},
                {"oracle_timing", detail::kOracleTimingNames[static_cast<int>(c.oracle_timing)]},
                {"panel_attempts", c.panel_attempts},
                {"assignment_attempts", c.assignment_attempts},
                {"discount", c.discount}};
}

/// Missing fields keep their defaults; unknown fields are ignored.
inline Config config_from_json(const Json& j, Config c = {}) {
    if (!j.is_object()) throw ContractError("config must be a JSON object");
    const auto range = [](const Json& r) {
        if (!r.is_array() || r.size() != 2) throw ContractError("range must be [lo, hi]");
        return IntRange{r[0].get<int>(), r[1].get<int>()};
    };
    try {
        if (j.contains("num_objects")) c.num_objects = j["num_objects"].get<int>();
        if (j.contains("num_context_panels")) c.num_context_panels = j["num_context_panels"].get<int>();
        if (j.contains("max_steps")) c.max_steps = j["max_steps"].get<int>();
        if (j.contains("blicket_count_range")) c.blicket_count_range = range(j["blicket_count_range"]);
        if (j.contains("context_panel_size_range")) c.context_panel_size_range = range(j["context_panel_size_range"]);
        if (j.contains("solve_bonus")) c.solve_bonus = j["solve_bonus"].get<double>();
        if (j.contains("step_penalty")) c.step_penalty = j["step_penalty"].get<double>();
        if (j.contains("trial_binarization"))
            c.trial_binarization = static_cast<TrialBinarization>(detail::enum_from_name(
                detail::kBinarizationNames, j["trial_binarization"].get<std::string>(), "trial_binarization"));
        if (j.contains("oracle_cardinality_prior")) c.oracle_cardinality_prior = j["oracle_cardinality_prior"].get<bool>();
        if (j.contains("oracle_timing"))
            c.oracle_timing = static_cast<OracleTiming>(detail::enum_from_name(
                detail::kOracleTimingNames, j["oracle_timing"].get<std::string>(), "oracle_timing"));
        if (j.contains("panel_attempts")) c.panel_attempts = j["panel_attempts"].get<int>();
        if (j.contains("assignment_attempts")) c.assignment_attempts = j["assignment_attempts"].get<int>();
        if (j.contains("discount")) c.discount = j["discount"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ContractError(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

/// FNV-1a over the canonical JSON form, as 16 hex digits.
inline std::string config_digest(const Config& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(c).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ─── Episode spec ─────────────────────────────────────────────

inline Json to_json(const ObjectSpec& o) {
    return Json{{"shape", kShapeNames[static_cast<int>(o.shape)]},
                {"material", kMaterialNames[static_cast<int>(o.material)]},
                {"color", kColorNames[static_cast<int>(o.color)]}};
}

inline ObjectSpec object_spec_from_json(const Json& j) {
    return ObjectSpec{static_cast<Shape>(detail::enum_from_name(kShapeNames, j.at("shape").get<std::string>(), "shape")),
                      static_cast<Material>(
                          detail::enum_from_name(kMaterialNames, j.at("material").get<std::string>(), "material")),
                      static_cast<Color>(detail::enum_from_name(kColorNames, j.at("color").get<std::string>(), "color"))};
}

inline Json to_json(const EpisodeSpec& s) {
    Json objects = Json::array(), context = Json::array(), labels = Json::array();
    for (const auto& o : s.objects) objects.push_back(to_json(o));
    for (const auto& p : s.context) context.push_back(to_json(p));
    for (auto l : s.query_labels) labels.push_back(kQueryLabelNames[static_cast<int>(l)]);
    return Json{{"seed", s.seed},
                {"episode_index", s.episode_index},
                {"objects", objects},
                {"ground_truth", to_json(s.ground_truth)},
                {"context", context},
                {"query_labels", labels}};
}

inline EpisodeSpec episode_spec_from_json(const Json& j) {
    EpisodeSpec s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.episode_index = j.at("episode_index").get<std::uint64_t>();
    const auto& objects = j.at("objects");
    if (!objects.is_array() || objects.size() != kNumObjects) throw ContractError("objects must have 9 entries");
    for (int i = 0; i < kNumObjects; ++i) s.objects[i] = object_spec_from_json(objects[i]);
    s.ground_truth = object_set_from_json(j.at("ground_truth"));
    for (const auto& p : j.at("context")) s.context.push_back(panel_from_json(p));
    const auto& labels = j.at("query_labels");
    if (!labels.is_array() || labels.size() != kNumObjects) throw ContractError("query_labels must have 9 entries");
    for (int i = 0; i < kNumObjects; ++i)
        s.query_labels[i] = static_cast<QueryLabel>(
            detail::enum_from_name(kQueryLabelNames, labels[i].get<std::string>(), "query label"));
    return s;
}

// ─── Step info and transcripts ────────────────────────────────

inline Json to_json(const StepInfo& info) {
    return Json{{"oracle_belief", to_json(info.oracle_belief)},
                {"feasible_count", info.feasible_count},
                {"solved", info.solved}};
}

inline StepInfo step_info_from_json(const Json& j) {
    return StepInfo{probability_vector_from_json<BeliefVector>(j.at("oracle_belief"), "oracle_belief"),
                    j.at("feasible_count").get<int>(), j.at("solved").get<bool>()};
}

inline Json to_json(const StepRecord& r) {
    return Json{{"action", to_json(r.action)}, {"trial", to_json(r.trial)}, {"executed", r.executed},
                {"reward", r.reward},          {"done", r.done},            {"info", to_json(r.info)}};
}

inline StepRecord step_record_from_json(const Json& j) {
    StepRecord r;
    r.action = action_from_json(j.at("action"));
    r.trial = panel_from_json(j.at("trial"));
    r.executed = j.at("executed").get<bool>();
    r.reward = j.at("reward").get<double>();
    r.done = j.at("done").get<bool>();
    r.info = step_info_from_json(j.at("info"));
    return r;
}

inline Json to_json(const EpisodeTranscript& t) {
    Json steps = Json::array();
    for (const auto& r : t.steps) steps.push_back(to_json(r));
    return Json{{"config_digest", config_digest(t.config)},
                {"config", to_json(t.config)},
                {"agent", t.agent},
                {"spec", to_json(t.spec)},
                {"steps", steps},
                {"solved", t.solved},
                {"steps_taken", t.steps_taken()},
                {"total_reward", t.total_reward}};
}

/// Raised when a transcript's stored digest does not match its config.
struct ConfigMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline EpisodeTranscript transcript_from_json(const Json& j) {
    EpisodeTranscript t;
    t.config = config_from_json(j.at("config"));
    const auto stored = j.at("config_digest").get<std::string>();
    if (stored != config_digest(t.config))
        throw ConfigMismatchError("transcript config digest " + stored + " does not match its config (" +
                                  config_digest(t.config) + ")");
    t.agent = j.value("agent", "");
    t.spec = episode_spec_from_json(j.at("spec"));
    for (const auto& r : j.at("steps")) t.steps.push_back(step_record_from_json(r));
    t.solved = j.at("solved").get<bool>();
    t.total_reward = j.at("total_reward").get<double>();
    return t;
}

}  // namespace est
