#include "doctest.h"

#include "clarith/service.hpp"
#include "clarith/text.hpp"

#include <boost/asio.hpp>

#include <fstream>
#include <sstream>
#include <thread>

using namespace clarith;
using nlohmann::json;

namespace {

std::string slurp(const std::string& rel) {
    std::ifstream in(std::string(CLARITH_SOURCE_DIR) + "/" + rel);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json msg(const char* type) { return {{"v", kProtocolVersion}, {"type", type}}; }

json env(const std::string& move) {
    auto m = msg("env-move");
    m["move"] = move;
    return m;
}

json proof_session(const std::string& file) {
    auto m = msg("new-session");
    m["proof"] = slurp("corpus/" + file);
    m["base_dir"] = std::string(CLARITH_SOURCE_DIR) + "/corpus";
    return m;
}

std::vector<std::string> types(const std::vector<json>& ms) {
    std::vector<std::string> out;
    for (auto& m : ms) out.push_back(m["type"]);
    return out;
}

const json* find(const std::vector<json>& ms, const std::string& type) {
    for (auto& m : ms)
        if (m["type"] == type) return &m;
    return nullptr;
}

void collect_actionable(const json& node, std::vector<std::string>& out) {
    if (node["actionable"].get<bool>()) out.push_back(node["prefix"]);
    for (auto& k : node["kids"]) collect_actionable(k, out);
}

}  // namespace

TEST_CASE("every message carries the protocol version") {
    Session s;
    auto r = s.handle(proof_session("onesuc.cla4"));
    for (auto& m : r) CHECK(m["v"] == kProtocolVersion);
    auto bad = s.handle({{"v", 99}, {"type", "state"}});
    CHECK(types(bad) == std::vector<std::string>{"error"});
    CHECK(s.handle_line("not json")[0].find("\"error\"") != std::string::npos);
    Session fresh;
    CHECK(types(fresh.handle(env("1"))) == std::vector<std::string>{"error"});
    CHECK(types(fresh.handle(msg("bogus"))) == std::vector<std::string>{"error"});
}

TEST_CASE("onesuc session") {
    Session s;
    auto r = s.handle(proof_session("onesuc.cla4"));
    CHECK(types(r) == std::vector<std::string>{"new-session", "state"});
    CHECK(r[0]["game"] == "⊓x⊔y(y=x1)");
    auto& st = r[1];
    REQUIRE(st["options"].size() == 1);
    CHECK(st["options"][0]["numeral"] == true);

    auto m = s.handle(env("101"));
    CHECK(types(m) == std::vector<std::string>{"env-move", "machine-move", "state", "verdict"});
    CHECK(m[1]["move"] == "1011");
    CHECK(m[1]["background"] == 3);
    CHECK(m[3]["winner"] == "⊤");
    CHECK(s.over());
    CHECK(format_run(s.run()) == "B:101\nT:1011\n");
    CHECK(types(s.handle(env("1"))) == std::vector<std::string>{"error"});
}

TEST_CASE("zeroness session") {
    Session s;
    s.handle(proof_session("zeroness.cla4"));
    auto m = s.handle(env("0"));
    auto* mm = find(m, "machine-move");
    REQUIRE(mm);
    CHECK((*mm)["move"] == "0");
    auto* v = find(m, "verdict");
    REQUIRE(v);
    CHECK((*v)["winner"] == "⊤");
}

TEST_CASE("illegal moves are refused unless strict") {
    Session lenient;
    lenient.handle(proof_session("onesuc.cla4"));
    auto r = lenient.handle(env("012"));
    CHECK(types(r) == std::vector<std::string>{"error"});
    CHECK(r[0]["text"].get<std::string>().find("illegal move") == 0);
    CHECK(lenient.run().empty());
    CHECK(find(lenient.handle(env("11")), "verdict"));

    SessionOptions opt;
    opt.strict = true;
    Session strict(opt);
    strict.handle(proof_session("onesuc.cla4"));
    auto sr = strict.handle(env("012"));
    CHECK(types(sr) == std::vector<std::string>{"verdict"});
    CHECK(sr[0]["winner"] == "⊤");
    CHECK(strict.over());
}

TEST_CASE("state messages mirror the legal environment moves") {
    Session s;
    auto start = msg("new-session");
    start["sentence"] = "⊓x(x=x) ∧ (0=0 ⊓ 0=1) ∧ ⊔y(y=0)";
    auto r = s.handle(start);
    auto* st = find(r, "state");
    REQUIRE(st);
    std::vector<std::string> actionable;
    collect_actionable((*st)["tree"], actionable);
    std::vector<std::string> options;
    for (auto& o : (*st)["options"]) options.push_back(o["prefix"]);
    std::sort(actionable.begin(), actionable.end());
    std::sort(options.begin(), options.end());
    CHECK(actionable == options);
    CHECK(options == std::vector<std::string>{"0.", "1."});

    auto after = s.handle(env("1.0"));
    auto* st2 = find(after, "state");
    REQUIRE(st2);
    CHECK((*st2)["options"].size() == 1);
    CHECK((*st2)["formula"] == "⊓x(x=x) ∧ 0=0 ∧ ⊔y(y=0)");
    // The silent machine never answers ⊔y; ending the play loses.
    auto end = s.handle(msg("end"));
    REQUIRE(find(end, "verdict"));
    CHECK((*find(end, "verdict"))["winner"] == "⊥");
}

TEST_CASE("a session log replays as a script") {
    auto bundle = make_bundle(slurp("corpus/zeroness.cla4"), std::string(CLARITH_SOURCE_DIR) + "/corpus", "");
    Session s;
    auto start = msg("new-session");
    start["bundle"] = bundle;
    s.handle(start);
    s.handle(env("10110"));
    auto log = format_run(s.run());
    auto recorded = parse_run(log);

    std::vector<std::string> envs;
    for (auto& m : recorded)
        if (m.who == Player::Bot) envs.push_back(m.move);
    ScriptedEnvironment script(envs);
    auto t = play(load_bundle(bundle).strategy, script);
    CHECK(t.run == recorded);
}

TEST_CASE("tcp server") {
    Server server;
    auto port = server.start(0);
    CHECK(port != 0);
    namespace asio = boost::asio;
    using asio::ip::tcp;
    auto client = [&](const std::string& x, std::string& reply) {
        asio::io_context io;
        tcp::socket sock(io);
        sock.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
        asio::streambuf buf;
        auto send = [&](const json& m) { asio::write(sock, asio::buffer(m.dump() + "\n")); };
        auto recv = [&]() {
            asio::read_until(sock, buf, '\n');
            std::istream in(&buf);
            std::string line;
            std::getline(in, line);
            return json::parse(line);
        };
        send(proof_session("onesuc.cla4"));
        CHECK(recv()["type"] == "new-session");
        CHECK(recv()["type"] == "state");
        send(env(x));
        CHECK(recv()["type"] == "env-move");
        auto mm = recv();
        CHECK(mm["type"] == "machine-move");
        reply = mm["move"];
        CHECK(recv()["type"] == "state");
        CHECK(recv()["winner"] == "⊤");
    };
    // Concurrent sessions stay isolated.
    std::vector<std::string> replies(4);
    std::vector<std::thread> threads;
    const char* xs[] = {"0", "1", "101", "1111"};
    for (int i = 0; i < 4; ++i) threads.emplace_back([&, i] { client(xs[i], replies[i]); });
    for (auto& t : threads) t.join();
    CHECK(replies == std::vector<std::string>{"1", "11", "1011", "11111"});
    server.stop();
}
