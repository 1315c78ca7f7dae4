#pragma once

#include "clarith/strategy.hpp"

#include "json.hpp"

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace clarith {

inline constexpr int kProtocolVersion = 1;

struct SessionOptions {
    // Illegal environment moves end the play instead of being refused.
    bool strict = false;
    std::size_t tick_budget = 100000;
    // Resolves PA files named by proofs sent in new-session messages.
    std::string base_dir;
};

// One play between a remote environment and a strategy, driven by
// line-delimited JSON messages. Every message carries "v".
class Session {
public:
    explicit Session(SessionOptions opt = {});

    std::vector<nlohmann::json> handle(const nlohmann::json& msg);
    // Starts a play against s directly, as new-session does.
    std::vector<nlohmann::json> open(Strategy s);
    // Parses a line; malformed input yields an error message.
    std::vector<std::string> handle_line(const std::string& line);

    bool started() const { return agent_ != nullptr; }
    bool over() const { return over_; }
    const Run& run() const { return run_; }
    const Strategy& strategy() const { return strategy_; }

private:
    nlohmann::json state_message() const;
    nlohmann::json verdict_message(const Verdict& v) const;
    void start(const nlohmann::json& msg, std::vector<nlohmann::json>& out);
    void begin(Strategy s, std::vector<nlohmann::json>& out);
    void env_move(const std::string& move, std::vector<nlohmann::json>& out);
    void drive(std::vector<nlohmann::json>& out);
    void finish(std::vector<nlohmann::json>& out);

    SessionOptions opt_;
    Strategy strategy_;
    std::unique_ptr<Agent> agent_;
    GameState initial_, state_;
    Run run_;
    std::size_t ell_ = 0, last_size_ = 0;
    bool over_ = false;
};

nlohmann::json error_message(const std::string& text);
// The formula as a tree; nodes where the environment can move are actionable.
nlohmann::json formula_tree(const GameState& s);

// Thread-per-connection TCP server, one Session per connection.
class Server {
public:
    explicit Server(SessionOptions opt = {});
    ~Server();
    // Binds to 127.0.0.1:port (0 picks a free port) and serves in the
    // background. Returns the bound port.
    unsigned short start(unsigned short port);
    void stop();
    // Blocks until stop() is called from elsewhere.
    void wait();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace clarith
