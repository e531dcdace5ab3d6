#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "est/env.hpp"
#include "est/serialize.hpp"

// Line-delimited JSON over stdio. One request object per line, exactly one
// response line per request. See docs/protocol.md for the message reference.

namespace est {

inline constexpr std::string_view kProtocolVersion = "est-stdio/1";

class ProtocolServer {
public:
    explicit ProtocolServer(Config base = {}) : base_(std::move(base)) { base_.validate(); }

    bool closed() const { return closed_; }

    /// Handles one request line and returns the response line (no newline).
    std::string handle_line(std::string_view line) {
        Json request;
        try {
            request = Json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            return error("parse_error", std::string("request is not valid JSON: ") + e.what());
        }
        if (!request.is_object()) return error("parse_error", "request must be a JSON object");
        if (!request.contains("cmd") || !request["cmd"].is_string())
            return error("contract_error", "request needs a string field \"cmd\"");

        const auto cmd = request["cmd"].get<std::string>();
        try {
            if (cmd == "reset") return reset(request);
            if (cmd == "step") return step(request);
            if (cmd == "close") {
                closed_ = true;
                return Json{{"ok", true}, {"closed", true}}.dump();
            }
            return error("unknown_command", "unknown cmd: " + cmd);
        } catch (const StateError& e) {
            return error("state_error", e.what());
        } catch (const ContractError& e) {
            return error("contract_error", e.what());
        } catch (const GenerationError& e) {
            return error("generation_error", e.what());
        } catch (const nlohmann::json::exception& e) {
            return error("contract_error", e.what());
        } catch (const std::exception& e) {
            return error("internal_error", e.what());
        }
    }

    /// Reads requests until "close" or end of input. Blank lines are skipped.
    void serve(std::istream& in, std::ostream& out) {
        std::string line;
        while (!closed_ && std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            out << handle_line(line) << '\n';
            out.flush();
        }
    }

private:
    static std::string error(std::string_view kind, std::string_view message) {
        return Json{{"ok", false}, {"error", {{"kind", kind}, {"message", message}}}}.dump();
    }

    std::string reset(const Json& req) {
        const auto seed = req.value("seed", std::uint64_t{0});
        const auto index = req.value("episode_index", std::uint64_t{0});
        const Config config = req.contains("config") ? config_from_json(req["config"], base_) : base_;
        if (!env_ || !(env_->config() == config)) env_.emplace(config);
        const auto r = env_->reset(seed, index);
        ++counter_;

        Json observations = Json::array();
        for (const auto& o : r.observations) observations.push_back(to_json(o));
        return Json{{"ok", true},
                    {"version", kProtocolVersion},
                    {"episode_id", counter_},
                    {"seed", seed},
                    {"episode_index", index},
                    {"config_digest", config_digest(config)},
                    {"observations", observations}}
            .dump();
    }

    std::string step(const Json& req) {
        if (!env_ || env_->status() == EpisodeStatus::idle) throw StateError("step before reset");
        if (env_->done()) throw StateError("step after the episode finished; send reset");
        if (!req.contains("action")) throw ContractError("step needs an \"action\" array of 18 numbers");
        const auto r = env_->step(action_from_flat(req["action"]));
        return Json{{"ok", true},
                    {"observation", to_json(r.observation)},
                    {"reward", r.reward},
                    {"done", r.done},
                    {"info", to_json(r.info)}}
            .dump();
    }

    Config base_;
    std::optional<Environment> env_;
    std::uint64_t counter_ = 0;
    bool closed_ = false;
};

}  // namespace est
