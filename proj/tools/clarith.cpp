#include "clarith/cl12.hpp"
#include "clarith/cla4.hpp"
#include "clarith/hpm.hpp"
#include "clarith/service.hpp"
#include "clarith/strategy.hpp"
#include "clarith/text.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace clarith;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string dir_of(const std::string& path) {
    auto p = fs::path(path).parent_path();
    return p.empty() ? "." : p.string();
}

bool has_ext(const std::string& path, const char* ext) { return fs::path(path).extension() == ext; }

Extraction load_target(const std::string& path, const std::string& label) {
    if (has_ext(path, ".json")) return load_bundle(slurp(path));
    if (has_ext(path, ".cla4")) return extract(parse_cla4(slurp(path), dir_of(path)), label);
    throw std::runtime_error(path + ": expected a bundle (.json) or a CLA4 proof (.cla4)");
}

std::vector<std::uint64_t> split_numbers(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(std::stoull(item));
    return out;
}

void print_transcript(const Transcript& t) {
    std::cout << format_run(t.run);
    if (t.adjudicated)
        std::cout << "verdict: " << player_name(t.verdict.winner) << " wins\n";
    else
        std::cout << "verdict: not adjudicated (" << t.adjudication_error << ")\n";
    std::size_t worst = 0;
    for (auto& m : t.meters)
        if (m.who == Player::Top) worst = std::max(worst, m.size);
    std::cout << "certificate: " << (t.certificate_ok ? "respected" : "VIOLATED") << ", largest machine move "
              << worst << "\n";
    if (!t.sessions.empty()) {
        std::cout << "sessions:";
        for (auto& s : t.sessions) std::cout << ' ' << s;
        std::cout << '\n';
    }
    for (auto& n : t.notes) std::cout << "note: " << n << '\n';
}

int cmd_check(const std::string& path, bool no_pa, bool quiet) {
    if (has_ext(path, ".cl12")) {
        auto proof = parse_cl12(slurp(path), dir_of(path));
        auto rep = check_proof(proof);
        std::cout << rep.summary() << '\n';
        if (!quiet)
            for (std::size_t i = 0; i < rep.lines.size(); ++i)
                if (!rep.lines[i].ok) std::cout << "  line " << i + 1 << ": " << rep.lines[i].violation << '\n';
        return rep.ok ? 0 : 1;
    }
    Cla4Options opt;
    opt.allow_pa_trusted = !no_pa;
    auto rep = check_cla4(parse_cla4(slurp(path), dir_of(path)), opt);
    std::cout << rep.summary() << '\n';
    if (!quiet)
        for (auto& n : rep.not_ready) std::cout << "  not ready: " << n << '\n';
    return rep.ok ? 0 : 1;
}

int cmd_search(const std::string& sequent, int depth, std::size_t nodes) {
    SearchBudget b;
    b.depth = depth;
    b.nodes = nodes;
    auto proof = search_cl12(parse_sequent(sequent), b);
    if (!proof) {
        std::cout << "no proof found within the budget\n";
        return 1;
    }
    std::cout << format_cl12(*proof);
    return 0;
}

int cmd_extract(const std::string& path, const std::string& label, const std::string& out) {
    auto text = slurp(path);
    auto bundle = make_bundle(text, dir_of(path), label);
    auto ex = load_bundle(bundle);
    std::string target = out.empty() ? fs::path(path).replace_extension(".bundle.json").string() : out;
    std::ofstream(target) << bundle << '\n';
    std::cout << "line " << ex.label << ": " << print(ex.strategy.game) << '\n';
    std::cout << "bundle written to " << target << '\n';
    std::cout << "certificate:\n" << ex.strategy.certificate.format();
    return 0;
}

int cmd_certify(const std::string& path, const std::string& label, bool show, const std::string& at) {
    auto ex = load_target(path, label);
    if (show) std::cout << ex.strategy.certificate.format();
    std::cout << "certificate size " << ex.strategy.certificate.size() << '\n';
    if (!at.empty())
        for (auto v : split_numbers(at))
            std::cout << "bound(" << v << ") = " << ex.strategy.certificate.eval(Natural(v)).decimal() << '\n';
    return 0;
}

void show_message(const nlohmann::json& m) {
    auto type = m.value("type", "");
    if (type == "new-session") {
        std::cout << "game: " << m["game"].get<std::string>() << '\n';
    } else if (type == "state") {
        std::cout << "position: " << m["formula"].get<std::string>() << '\n';
        for (auto& o : m["options"]) std::cout << "  you may move " << o["describe"].get<std::string>() << '\n';
        auto& me = m["meters"];
        std::cout << "  background " << me["background"].get<std::size_t>() << ", certificate bound "
                  << me["certificate"].get<std::string>() << '\n';
    } else if (type == "machine-move") {
        std::cout << "machine: " << m["move"].get<std::string>() << '\n';
    } else if (type == "verdict") {
        std::cout << "verdict: " << m["winner"].get<std::string>() << " wins (" << m["reason"].get<std::string>()
                  << ")\n";
    } else if (type == "error") {
        std::cout << "error: " << m["text"].get<std::string>() << '\n';
    }
}

int play_interactive(const Extraction& ex, bool strict) {
    SessionOptions opt;
    opt.strict = strict;
    Session session(opt);
    for (auto& m : session.open(ex.strategy)) show_message(m);
    std::cout << "enter moves, or \"end\" to stop moving\n";
    std::string line;
    while (!session.over() && std::getline(std::cin, line)) {
        if (line.empty()) continue;
        nlohmann::json msg{{"v", kProtocolVersion}};
        if (line == "end") {
            msg["type"] = "end";
        } else {
            msg["type"] = "env-move";
            msg["move"] = line;
        }
        for (auto& m : session.handle(msg)) show_message(m);
    }
    if (!session.over())
        for (auto& m : session.handle({{"v", kProtocolVersion}, {"type", "end"}})) show_message(m);
    std::cout << "transcript:\n" << format_run(session.run());
    return 0;
}

int play_script(const Extraction& ex, const std::string& path) {
    auto recorded = parse_run(slurp(path));
    std::vector<std::string> env;
    bool has_machine = false;
    for (auto& m : recorded) {
        if (m.who == Player::Bot)
            env.push_back(m.move);
        else
            has_machine = true;
    }
    ScriptedEnvironment script(env);
    auto t = play(ex.strategy, script);
    print_transcript(t);
    bool same = !has_machine || t.run == recorded;
    if (has_machine) std::cout << "replay: " << (same ? "identical" : "differs") << '\n';
    return same && t.adjudicated && t.verdict.winner == Player::Top ? 0 : 1;
}

int play_random(const Extraction& ex, std::size_t n, std::uint64_t seed, std::size_t max_bits, bool verbose) {
    std::size_t wins = 0, certified = 0, stalled = 0;
    for (std::size_t i = 0; i < n; ++i) {
        RandomEnvironment env(seed + i, max_bits);
        auto t = play(ex.strategy, env);
        if (t.adjudicated && t.verdict.winner == Player::Top) ++wins;
        else if (verbose) print_transcript(t);
        if (t.certificate_ok) ++certified;
        if (t.stalled) ++stalled;
    }
    std::cout << wins << "/" << n << " won by the machine, " << certified << "/" << n
              << " within the certificate";
    if (stalled) std::cout << ", " << stalled << " stalled";
    std::cout << '\n';
    return wins == n && certified == n ? 0 : 1;
}

int cmd_serve(unsigned short port, bool strict, const std::string& base_dir) {
    SessionOptions opt;
    opt.strict = strict;
    opt.base_dir = base_dir;
    static Server* running = nullptr;
    Server server(opt);
    auto bound = server.start(port);
    std::cout << "listening on 127.0.0.1:" << bound << " (protocol v" << kProtocolVersion << ")" << std::endl;
    running = &server;
    std::signal(SIGINT, [](int) {
        if (running) std::thread([] { running->stop(); }).detach();
    });
    server.wait();
    running = nullptr;
    return 0;
}

EnvScript parse_env(const std::string& spec) {
    // cycle:move pairs separated by commas, e.g. 3:101,7:11
    EnvScript env;
    std::stringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw std::runtime_error("expected cycle:move, got " + item);
        env.moves[std::stoull(item.substr(0, colon))].push_back(item.substr(colon + 1));
    }
    return env;
}

int cmd_hpm(const std::string& path, const std::string& env, std::size_t fuel, const std::string& bound,
            const std::string& inputs, bool trace) {
    auto spec = parse_hpm(slurp(path));
    std::optional<ExplicitPolyFn> h;
    if (!bound.empty()) h = polynomial_bound(split_numbers(bound));
    std::vector<Natural> in;
    if (!inputs.empty())
        for (auto v : split_numbers(inputs)) in.emplace_back(v);
    auto r = run_hpm(spec, parse_env(env), fuel, h ? &*h : nullptr, in);
    if (trace)
        for (auto& t : r.trace) std::cout << t << '\n';
    for (auto& m : r.moves) std::cout << m.timestamp << ' ' << (m.machine ? "⊤" : "⊥") << m.move << '\n';
    for (auto& m : r.meters)
        std::cout << "move at cycle " << m.cycle << ": size " << m.size << ", background " << m.background
                  << ", timecost " << m.timecost << ", space " << m.space << (m.within ? "" : ", OVER BOUND") << '\n';
    std::cout << r.cycles << " cycles, " << r.space << " work cells" << (r.fuel_exhausted ? ", fuel exhausted" : "")
              << '\n';
    return r.within_bound ? 0 : 1;
}

int cmd_codec(const std::string& path, std::size_t check, std::uint64_t seed, bool table) {
    auto spec = parse_hpm(slurp(path));
    Codec codec(spec);
    std::cout << "k = " << codec.k() << ", K = " << codec.width() << '\n';
    if (table) {
        for (auto& q : spec.states) std::cout << codec.state_code(q).bits() << "  state " << q << '\n';
        const char* names[] = {"hat", "check", "hat underlined", "check underlined"};
        for (auto& a : spec.tape_symbols())
            for (int v = 0; v < 4; ++v)
                std::cout << codec.symbol_code(a, static_cast<Variant>(v)).bits() << "  " << a << ' ' << names[v]
                          << '\n';
    }
    if (!check) return 0;
    std::mt19937_64 rng(seed);
    std::size_t bad = 0;
    for (auto& c : random_reachable(spec, rng, check)) {
        auto code = codec.encode(c);
        if (!(codec.decode(code) == c) || codec_successor(codec, code) != codec.encode(step(spec, c))) ++bad;
    }
    std::cout << check - bad << "/" << check << " configurations coherent\n";
    return bad ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clarith: CL12 and CLA4 proofs, games, strategies and machines"};
    app.require_subcommand(1);

    std::string path, label, out, sequent, at, script, env, bound, inputs;
    bool no_pa = false, quiet = false, show = false, interactive = false, strict = false, trace = false,
         table = false, verbose = false;
    int depth = 10;
    std::size_t nodes = 20000, random = 0, max_bits = 64, fuel = 1000, check = 0;
    std::uint64_t seed = 1;
    unsigned short port = 7411;

    auto* c_check = app.add_subcommand("check", "check a .cl12 or .cla4 proof");
    c_check->add_option("proof", path, "proof file")->required()->check(CLI::ExistingFile);
    c_check->add_flag("--no-pa-trusted", no_pa, "refuse PA-trusted lines");
    c_check->add_flag("-q,--quiet", quiet, "summary only");

    auto* c_search = app.add_subcommand("search", "search for a CL12 proof of a sequent");
    c_search->add_option("sequent", sequent, "sequent, e.g. \"p ⊓ q ⟹ (p ⊓ q) ∧ (p ⊓ q)\"")->required();
    c_search->add_option("--depth", depth, "depth limit")->envname("CLARITH_DEPTH");
    c_search->add_option("--nodes", nodes, "node limit")->envname("CLARITH_NODES");

    auto* c_extract = app.add_subcommand("extract", "extract a strategy bundle from a CLA4 proof");
    c_extract->add_option("proof", path, ".cla4 file")->required()->check(CLI::ExistingFile);
    c_extract->add_option("--label", label, "line to extract (default: last)");
    c_extract->add_option("-o,--out", out, "bundle file (default: <proof>.bundle.json)");

    auto* c_certify = app.add_subcommand("certify", "inspect the complexity certificate of a strategy");
    c_certify->add_option("target", path, "bundle or .cla4 proof")->required()->check(CLI::ExistingFile);
    c_certify->add_option("--label", label, "line of a .cla4 proof");
    c_certify->add_flag("--show", show, "print the explicit polynomial function");
    c_certify->add_option("--at", at, "comma-separated arguments to evaluate at");

    auto* c_play = app.add_subcommand("play", "play a strategy against an environment");
    c_play->add_option("target", path, "bundle or .cla4 proof")->required()->check(CLI::ExistingFile);
    c_play->add_option("--label", label, "line of a .cla4 proof");
    auto* o_script = c_play->add_option("--script", script, "transcript whose ⊥ moves are replayed");
    auto* o_random = c_play->add_option("--random", random, "number of random environments");
    auto* o_inter = c_play->add_flag("--interactive", interactive, "read environment moves from stdin");
    o_script->excludes(o_random)->excludes(o_inter);
    o_random->excludes(o_inter);
    c_play->add_option("--seed", seed, "first random seed")->envname("CLARITH_SEED");
    c_play->add_option("--max-bits", max_bits, "largest random numeral")->envname("CLARITH_MAX_BITS");
    c_play->add_flag("--strict", strict, "an illegal interactive move loses at once");
    c_play->add_flag("-v,--verbose", verbose, "print lost random plays");

    auto* c_serve = app.add_subcommand("serve", "serve plays over TCP, one JSON message per line");
    c_serve->add_option("--port", port, "port (0 picks one)")->envname("CLARITH_PORT");
    c_serve->add_flag("--strict", strict, "illegal moves lose at once");
    c_serve->add_option("--base-dir", out, "directory for PA files named by proofs");

    auto* c_hpm = app.add_subcommand("hpm", "run a hard-play machine");
    c_hpm->add_option("machine", path, ".hpm file")->required()->check(CLI::ExistingFile);
    c_hpm->add_option("--env", env, "environment moves as cycle:move,...");
    c_hpm->add_option("--fuel", fuel, "cycle limit")->envname("CLARITH_FUEL");
    c_hpm->add_option("--bound", bound, "time bound as polynomial coefficients c0,c1,...");
    c_hpm->add_option("--inputs", inputs, "GHPM inputs, comma-separated");
    c_hpm->add_flag("--trace", trace, "print every cycle");

    auto* c_codec = app.add_subcommand("codec", "configuration codes of a machine");
    c_codec->add_option("machine", path, ".hpm file")->required()->check(CLI::ExistingFile);
    c_codec->add_option("--check", check, "test coherence on this many random configurations");
    c_codec->add_option("--seed", seed, "random seed")->envname("CLARITH_SEED");
    c_codec->add_flag("--table", table, "print the symbol codes");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_check) return cmd_check(path, no_pa, quiet);
        if (*c_search) return cmd_search(sequent, depth, nodes);
        if (*c_extract) return cmd_extract(path, label, out);
        if (*c_certify) return cmd_certify(path, label, show, at);
        if (*c_play) {
            auto ex = load_target(path, label);
            if (!script.empty()) return play_script(ex, script);
            if (interactive) return play_interactive(ex, strict);
            return play_random(ex, random ? random : 100, seed, max_bits, verbose);
        }
        if (*c_serve) return cmd_serve(port, strict, out);
        if (*c_hpm) return cmd_hpm(path, env, fuel, bound, inputs, trace);
        if (*c_codec) return cmd_codec(path, check, seed, table);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
