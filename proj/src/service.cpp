#include "clarith/service.hpp"

#include "clarith/text.hpp"

#include <boost/asio.hpp>

#include <condition_variable>
#include <list>

namespace clarith {

using nlohmann::json;

namespace {

const char* kind_name(FormulaKind k) {
    switch (k) {
        case FormulaKind::Top: return "⊤";
        case FormulaKind::Bot: return "⊥";
        case FormulaKind::Atom: return "atom";
        case FormulaKind::NegAtom: return "¬atom";
        case FormulaKind::And: return "∧";
        case FormulaKind::Or: return "∨";
        case FormulaKind::CAnd: return "⊓";
        case FormulaKind::COr: return "⊔";
        case FormulaKind::All: return "∀";
        case FormulaKind::Ex: return "∃";
        case FormulaKind::CAll: return "⊓x";
        case FormulaKind::CEx: return "⊔x";
    }
    return "?";
}

json message(const char* type) { return json{{"v", kProtocolVersion}, {"type", type}}; }

json tree_rec(const FormulaP& f, OccPath& path, const std::map<OccPath, const MoveSchema*>& schemas) {
    json node{{"kind", kind_name(f->kind)}, {"text", print(f)}};
    std::string p;
    for (std::size_t i = 0; i < path.size(); ++i) p += (i ? "." : "") + std::to_string(path[i]);
    node["path"] = p;
    if (!f->var.empty()) node["var"] = f->var;
    if (auto it = schemas.find(path); it != schemas.end()) {
        const MoveSchema& s = *it->second;
        node["mover"] = player_name(s.who);
        node["actionable"] = s.who == Player::Bot;
        node["prefix"] = s.prefix;
        if (s.numeral())
            node["numeral"] = true;
        else
            node["components"] = s.components;
    } else {
        node["actionable"] = false;
    }
    json kids = json::array();
    for (std::size_t i = 0; i < f->kids.size(); ++i) {
        path.push_back(static_cast<int>(i));
        kids.push_back(tree_rec(f->kids[i], path, schemas));
        path.pop_back();
    }
    node["kids"] = kids;
    return node;
}

}  // namespace

json error_message(const std::string& text) {
    auto m = message("error");
    m["text"] = text;
    return m;
}

json formula_tree(const GameState& s) {
    auto schemas = s.legal_moves();
    std::map<OccPath, const MoveSchema*> at;
    for (auto& m : schemas) at[m.path] = &m;
    OccPath path;
    return tree_rec(s.formula(), path, at);
}

Session::Session(SessionOptions opt) : opt_(std::move(opt)) {}

json Session::state_message() const {
    auto m = message("state");
    m["formula"] = print(state_.formula());
    m["tree"] = formula_tree(state_);
    json options = json::array();
    for (auto& s : state_.legal_moves(Player::Bot)) {
        json o{{"prefix", s.prefix}, {"describe", s.describe()}};
        if (s.numeral())
            o["numeral"] = true;
        else
            o["components"] = s.components;
        options.push_back(o);
    }
    m["options"] = options;
    m["meters"] = {{"background", ell_},
                   {"last_move_size", last_size_},
                   {"certificate", strategy_.certificate.eval(Natural(ell_)).decimal()}};
    m["run"] = format_run(run_);
    m["over"] = over_;
    return m;
}

json Session::verdict_message(const Verdict& v) const {
    auto m = message("verdict");
    m["winner"] = player_name(v.winner);
    if (v.reason == VerdictReason::IllegalMove && v.illegal) {
        m["reason"] = "illegal move " + format_labmove(v.illegal->offender) + ": " + v.illegal->reason;
    } else {
        m["reason"] = "the final position is " + std::string(v.winner == Player::Top ? "true" : "false");
    }
    m["run"] = format_run(run_);
    return m;
}

std::vector<json> Session::handle(const json& msg) {
    std::vector<json> out;
    try {
        if (!msg.is_object()) throw std::runtime_error("messages are JSON objects");
        if (msg.value("v", -1) != kProtocolVersion)
            throw std::runtime_error("unsupported protocol version; this server speaks v" +
                                     std::to_string(kProtocolVersion));
        auto type = msg.value("type", std::string());
        if (type == "new-session") {
            start(msg, out);
        } else if (!started()) {
            throw std::runtime_error("no session yet; send new-session first");
        } else if (type == "env-move") {
            if (!msg.contains("move") || !msg["move"].is_string()) throw std::runtime_error("env-move needs a move");
            env_move(msg["move"].get<std::string>(), out);
        } else if (type == "state") {
            out.push_back(state_message());
        } else if (type == "end") {
            finish(out);
        } else {
            throw std::runtime_error("unknown message type \"" + type + "\"");
        }
    } catch (const std::exception& e) {
        out.push_back(error_message(e.what()));
    }
    return out;
}

std::vector<std::string> Session::handle_line(const std::string& line) {
    std::vector<json> replies;
    try {
        replies = handle(json::parse(line));
    } catch (const json::parse_error& e) {
        replies.push_back(error_message(std::string("malformed message: ") + e.what()));
    }
    std::vector<std::string> out;
    for (auto& r : replies) out.push_back(r.dump());
    return out;
}

void Session::start(const json& msg, std::vector<json>& out) {
    Strategy s;
    if (msg.contains("bundle")) {
        const auto& b = msg["bundle"];
        s = load_bundle(b.is_string() ? b.get<std::string>() : b.dump()).strategy;
    } else if (msg.contains("proof")) {
        auto base = msg.value("base_dir", opt_.base_dir);
        s = extract(parse_cla4(msg["proof"].get<std::string>(), base), msg.value("label", std::string())).strategy;
    } else if (msg.contains("sentence")) {
        // No proof: the machine stays silent.
        s = silent_strategy(parse_formula(msg["sentence"].get<std::string>()));
    } else {
        throw std::runtime_error("new-session needs a bundle, a proof or a sentence");
    }
    begin(std::move(s), out);
}

std::vector<json> Session::open(Strategy s) {
    std::vector<json> out;
    try {
        begin(std::move(s), out);
    } catch (const std::exception& e) {
        out.push_back(error_message(e.what()));
    }
    return out;
}

void Session::begin(Strategy s, std::vector<json>& out) {
    strategy_ = std::move(s);
    agent_ = strategy_.spawn();
    initial_ = state_ = GameState(strategy_.game);
    run_.clear();
    ell_ = last_size_ = 0;
    over_ = false;
    auto ack = message("new-session");
    ack["game"] = print(strategy_.game);
    ack["strategy"] = strategy_.description;
    ack["certificate"] = strategy_.certificate.format();
    out.push_back(ack);
    drive(out);
}

void Session::env_move(const std::string& move, std::vector<json>& out) {
    if (over_) throw std::runtime_error("the play is over");
    LabMove lm{Player::Bot, move};
    auto r = state_.apply(lm);
    if (auto* bad = std::get_if<Illegal>(&r)) {
        if (!opt_.strict) throw std::runtime_error("illegal move " + move + ": " + bad->reason);
        run_.push_back(lm);
        over_ = true;
        out.push_back(verdict_message(adjudicate(initial_, run_)));
        return;
    }
    state_ = std::get<GameState>(r);
    run_.push_back(lm);
    ell_ = std::max(ell_, move.size());
    auto echo = message("env-move");
    echo["move"] = move;
    out.push_back(echo);
    agent_->observe(move);
    drive(out);
}

void Session::drive(std::vector<json>& out) {
    for (std::size_t t = 0; t < opt_.tick_budget && !over_; ++t) {
        for (auto& m : agent_->act()) {
            LabMove lm{Player::Top, m};
            run_.push_back(lm);
            last_size_ = m.size();
            auto mm = message("machine-move");
            mm["move"] = m;
            mm["size"] = m.size();
            mm["background"] = ell_;
            mm["bound"] = strategy_.certificate.eval(Natural(ell_)).decimal();
            out.push_back(mm);
            auto r = state_.apply(lm);
            if (std::holds_alternative<Illegal>(r)) {
                over_ = true;
                out.push_back(verdict_message(adjudicate(initial_, run_)));
                return;
            }
            state_ = std::get<GameState>(r);
        }
        if (agent_->quiescent()) break;
    }
    if (state_.legal_moves().empty()) {
        over_ = true;
        out.push_back(state_message());
        out.push_back(verdict_message(adjudicate(initial_, run_)));
        return;
    }
    out.push_back(state_message());
}

void Session::finish(std::vector<json>& out) {
    if (over_) throw std::runtime_error("the play is over");
    auto v = adjudicate(initial_, run_);
    over_ = true;
    out.push_back(verdict_message(v));
}

// ---------------------------------------------------------------- server

namespace asio = boost::asio;
using asio::ip::tcp;

struct Server::Impl {
    SessionOptions opt;
    asio::io_context io;
    tcp::acceptor acceptor{io};
    std::thread accept_thread;
    std::mutex mu;
    std::condition_variable cv;
    bool stopping = false;
    std::list<std::thread> workers;
    std::list<std::shared_ptr<tcp::socket>> sockets;
    unsigned short port = 0;

    void serve(std::shared_ptr<tcp::socket> sock) {
        Session session(opt);
        asio::streambuf buf;
        boost::system::error_code ec;
        for (;;) {
            asio::read_until(*sock, buf, '\n', ec);
            if (ec) break;
            std::istream in(&buf);
            std::string line;
            std::getline(in, line);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::string reply;
            for (auto& r : session.handle_line(line)) reply += r + "\n";
            asio::write(*sock, asio::buffer(reply), ec);
            if (ec) break;
        }
        sock->close(ec);
    }

    void accept_loop() {
        for (;;) {
            auto sock = std::make_shared<tcp::socket>(io);
            boost::system::error_code ec;
            acceptor.accept(*sock, ec);
            std::lock_guard lock(mu);
            if (stopping) return;
            if (ec) continue;
            sockets.push_back(sock);
            workers.emplace_back([this, sock] { serve(sock); });
        }
    }
};

Server::Server(SessionOptions opt) : impl_(std::make_unique<Impl>()) { impl_->opt = std::move(opt); }

Server::~Server() { stop(); }

unsigned short Server::start(unsigned short port) {
    tcp::endpoint ep(asio::ip::make_address("127.0.0.1"), port);
    impl_->acceptor.open(ep.protocol());
    impl_->acceptor.set_option(tcp::acceptor::reuse_address(true));
    impl_->acceptor.bind(ep);
    impl_->acceptor.listen();
    auto bound = impl_->port = impl_->acceptor.local_endpoint().port();
    impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
    return bound;
}

void Server::stop() {
    if (!impl_) return;
    {
        std::lock_guard lock(impl_->mu);
        if (impl_->stopping) return;
        impl_->stopping = true;
        boost::system::error_code ec;
        for (auto& s : impl_->sockets) s->shutdown(tcp::socket::shutdown_both, ec);
    }
    impl_->cv.notify_all();
    if (impl_->accept_thread.joinable()) {
        // Wake the blocking accept with a connection of our own.
        boost::system::error_code ec;
        tcp::socket poke(impl_->io);
        poke.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), impl_->port), ec);
        impl_->accept_thread.join();
        impl_->acceptor.close(ec);
    }
    for (auto& w : impl_->workers)
        if (w.joinable()) w.join();
}

void Server::wait() {
    std::unique_lock lock(impl_->mu);
    impl_->cv.wait(lock, [this] { return impl_->stopping; });
}

}  // namespace clarith
