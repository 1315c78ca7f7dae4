#include "clarith/hpm.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

namespace clarith {

namespace {

std::vector<std::string> code_points(std::string_view s) {
    std::vector<std::string> out;
    for (std::size_t p = 0; p < s.size();) {
        unsigned char c = static_cast<unsigned char>(s[p]);
        std::size_t n = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
        if (p + n > s.size()) throw HpmError("bad UTF-8 in \"" + std::string(s) + "\"");
        out.emplace_back(s.substr(p, n));
        p += n;
    }
    return out;
}

std::vector<std::string> words(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

Dir parse_dir(const std::string& s) {
    if (s == "L") return Dir::Left;
    if (s == "R") return Dir::Right;
    throw HpmError("direction must be L or R, not " + s);
}

const char* dir_name(Dir d) { return d == Dir::Left ? "L" : "R"; }

std::size_t move_head(std::size_t pos, Dir d, bool on_blank) {
    if (d == Dir::Left) return pos == 0 ? 0 : pos - 1;
    return on_blank ? pos : pos + 1;
}

bool is_reserved(const std::string& s) { return s == kBlank || s == kTopSym || s == kBotSym; }

std::vector<std::string> input_tape(const std::vector<Natural>& inputs) {
    std::vector<std::string> t;
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        if (n) t.push_back(",");
        for (char c : inputs[n].bits()) t.emplace_back(1, c);
    }
    t.push_back(kBlank);
    return t;
}

void append_move(std::vector<std::string>& run, const char* label, const std::string& move) {
    run.pop_back();
    run.push_back(label);
    for (auto& s : code_points(move)) run.push_back(s);
    run.push_back(kBlank);
}

}  // namespace

// ---------------------------------------------------------------- spec

bool HpmSpec::is_move_state(const std::string& q) const {
    return std::find(move_states.begin(), move_states.end(), q) != move_states.end();
}

std::vector<std::string> HpmSpec::tape_symbols() const {
    std::vector<std::string> out{kBlank, kTopSym, kBotSym};
    out.insert(out.end(), alphabet.begin(), alphabet.end());
    return out;
}

const Transition* HpmSpec::lookup(const std::string& q, const std::string& w, const std::string& r,
                                  const std::string& i) const {
    // Fewest wildcards first; the work symbol is the last to be generalized.
    static const int order[] = {0b000, 0b010, 0b001, 0b100, 0b011, 0b110, 0b101, 0b111};
    for (int mask : order) {
        auto key = std::make_tuple(q, mask & 0b100 ? "*" : w, mask & 0b010 ? "*" : r, mask & 0b001 ? "*" : i);
        auto it = delta.find(key);
        if (it != delta.end()) return &it->second;
    }
    return nullptr;
}

void HpmSpec::validate() const {
    if (states.empty()) throw HpmError("no states");
    std::set<std::string> qs(states.begin(), states.end());
    if (qs.size() != states.size()) throw HpmError("duplicate state");
    for (auto& q : states)
        if (q.empty() || q == "*" || q == "->") throw HpmError("bad state name " + q);
    for (auto& q : move_states)
        if (!qs.count(q)) throw HpmError("unknown move state " + q);
    if (is_move_state(start())) throw HpmError("the start state is a move state");
    std::set<std::string> syms;
    for (auto& a : alphabet) {
        if (code_points(a).size() != 1 || is_reserved(a) || a == "*" || a == "=")
            throw HpmError("bad alphabet symbol " + a);
        if (!syms.insert(a).second) throw HpmError("duplicate symbol " + a);
    }
    if (!syms.count("0") || !syms.count("1")) throw HpmError("the alphabet must contain 0 and 1");
    if (arity < 0) throw HpmError("negative arity");
    auto tape = tape_symbols();
    std::set<std::string> all(tape.begin(), tape.end());
    for (auto& [key, t] : delta) {
        auto& [q, w, r, in] = key;
        if (!qs.count(q) || !qs.count(t.state)) throw HpmError("transition names an unknown state");
        if (w != "*" && !all.count(w)) throw HpmError("unknown work symbol " + w);
        if (r != "*" && !all.count(r)) throw HpmError("unknown run symbol " + r);
        if (in != "*" && in != "0" && in != "1" && in != "," && in != kBlank)
            throw HpmError("unknown input symbol " + in);
        if (t.write == "=") {
            if (w == kBlank) throw HpmError("transition from " + q + " would write blank");
        } else if (!syms.count(t.write)) {
            throw HpmError("cannot write " + t.write);
        }
    }
}

HpmSpec parse_hpm(std::string_view text) {
    HpmSpec spec;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        auto w = words(line);
        if (w.empty()) continue;
        auto fail = [&](const std::string& m) { throw HpmError("line " + std::to_string(lineno) + ": " + m); };
        if (w[0] == "machine") {
            if (w.size() != 2) fail("machine takes one name");
            spec.name = w[1];
        } else if (w[0] == "states") {
            spec.states.assign(w.begin() + 1, w.end());
        } else if (w[0] == "move") {
            spec.move_states.assign(w.begin() + 1, w.end());
        } else if (w[0] == "alphabet") {
            spec.alphabet.assign(w.begin() + 1, w.end());
        } else if (w[0] == "arity") {
            if (w.size() != 2) fail("arity takes one number");
            spec.arity = std::stoi(w[1]);
        } else {
            auto arrow = std::find(w.begin(), w.end(), "->");
            if (arrow == w.end()) fail("expected a transition row");
            std::size_t l = arrow - w.begin(), r = w.size() - l - 1;
            if ((l != 3 && l != 4) || (r != 4 && r != 5)) fail("malformed transition row");
            Transition t;
            t.state = w[l + 1];
            t.write = w[l + 2];
            t.work = parse_dir(w[l + 3]);
            t.run = parse_dir(w[l + 4]);
            if (r == 5) t.input = parse_dir(w[l + 5]);
            auto key = std::make_tuple(w[0], w[1], w[2], l == 4 ? w[3] : std::string("*"));
            if (spec.delta.count(key)) fail("duplicate transition");
            spec.delta[key] = t;
        }
    }
    spec.validate();
    return spec;
}

std::string format_hpm(const HpmSpec& spec) {
    std::ostringstream out;
    auto list = [&](const char* head, const std::vector<std::string>& xs) {
        out << head;
        for (auto& x : xs) out << ' ' << x;
        out << '\n';
    };
    out << "machine " << (spec.name.empty() ? "unnamed" : spec.name) << '\n';
    list("states", spec.states);
    list("move", spec.move_states);
    list("alphabet", spec.alphabet);
    if (spec.arity) out << "arity " << spec.arity << '\n';
    for (auto& [key, t] : spec.delta) {
        auto& [q, w, r, i] = key;
        out << q << ' ' << w << ' ' << r;
        if (spec.arity) out << ' ' << i;
        out << " -> " << t.state << ' ' << t.write << ' ' << dir_name(t.work) << ' ' << dir_name(t.run);
        if (spec.arity) out << ' ' << dir_name(t.input);
        out << '\n';
    }
    return out.str();
}

Natural machine_code(const HpmSpec& spec) {
    std::string bits = "1";
    for (unsigned char c : format_hpm(spec))
        for (int b = 7; b >= 0; --b) bits.push_back(((c >> b) & 1) ? '1' : '0');
    return Natural::from_bits(bits);
}

// ---------------------------------------------------------------- simulation

Configuration initial_configuration(const HpmSpec& spec, const std::vector<Natural>& inputs) {
    if (inputs.size() != static_cast<std::size_t>(spec.arity))
        throw HpmError("machine takes " + std::to_string(spec.arity) + " inputs");
    Configuration c;
    c.state = spec.start();
    c.work = {kBlank};
    c.run = {kBlank};
    c.input = input_tape(inputs);
    return c;
}

std::string run_string(const Configuration& c) {
    std::string s;
    for (std::size_t p = 0; p + 1 < c.run.size(); ++p) s += c.run[p];
    return s;
}

std::string pending_move(const Configuration& c) {
    std::string s;
    for (std::size_t p = 0; p < c.i; ++p) s += c.work[p];
    return s;
}

Configuration step(const HpmSpec& spec, const Configuration& c, const std::vector<std::string>& env_moves) {
    Configuration n = c;
    const auto& b = c.work[c.i];
    const auto& r = c.run[c.j];
    const auto& in = c.input[c.k];
    if (const Transition* t = spec.lookup(c.state, b, r, in)) {
        std::string e = t->write == "=" ? b : t->write;
        if (is_reserved(e)) throw HpmError("state " + c.state + " would write " + e);
        n.state = t->state;
        n.work[c.i] = e;
        if (c.i + 1 == c.work.size()) n.work.push_back(kBlank);
        // The written cell is never blank, so a right move always succeeds.
        n.i = move_head(c.i, t->work, false);
        n.j = move_head(c.j, t->run, r == kBlank);
        n.k = move_head(c.k, t->input, in == kBlank);
    }
    if (spec.is_move_state(c.state)) append_move(n.run, kTopSym, pending_move(c));
    for (auto& m : env_moves) {
        for (auto& s : code_points(m))
            if (is_reserved(s) || std::find(spec.alphabet.begin(), spec.alphabet.end(), s) == spec.alphabet.end())
                throw HpmError("environment move \"" + m + "\" uses a symbol outside the alphabet");
        append_move(n.run, kBotSym, m);
    }
    return n;
}

HpmRun run_hpm(const HpmSpec& spec, const EnvScript& env, std::size_t fuel, const ExplicitPolyFn* h,
               const std::vector<Natural>& inputs) {
    HpmRun out;
    Configuration c = initial_configuration(spec, inputs);
    std::size_t last_move_cycle = 0, background = 0, visited = 1;
    bool any_move = false;
    std::size_t last_scripted = env.moves.empty() ? 0 : env.moves.rbegin()->first;
    std::size_t cycle = 0;
    for (; cycle < fuel; ++cycle) {
        static const std::vector<std::string> none;
        auto it = env.moves.find(cycle);
        const auto& em = it == env.moves.end() ? none : it->second;
        for (auto& m : em) background = std::max(background, code_points(m).size());
        bool moving = spec.is_move_state(c.state);
        std::string delta;
        if (moving) {
            auto alpha = pending_move(c);
            HpmMeter m;
            m.cycle = cycle;
            m.size = code_points(alpha).size();
            m.background = background;
            m.timecost = any_move ? cycle - last_move_cycle : cycle;
            m.space = visited;
            if (h) {
                auto bound = h->eval(Natural(background));
                m.within = Natural(m.size) <= bound && Natural(m.timecost) <= bound;
                out.within_bound = out.within_bound && m.within;
            }
            out.meters.push_back(m);
            out.moves.push_back({true, alpha, cycle});
            delta += std::string(kTopSym) + alpha;
        }
        for (auto& m : em) {
            out.moves.push_back({false, m, cycle});
            delta += std::string(kBotSym) + m;
        }
        if (moving || !em.empty()) {
            any_move = true;
            last_move_cycle = cycle;
        }
        auto next = step(spec, c, em);
        visited = std::max(visited, next.i + 1);
        std::ostringstream tr;
        tr << cycle << ' ' << c.state << ' ' << c.i << ' ' << c.j << ' ' << c.k;
        if (!delta.empty()) tr << " +" << delta;
        out.trace.push_back(tr.str());
        bool fixed = next == c && !moving;
        c = std::move(next);
        if (fixed && cycle >= last_scripted) {
            ++cycle;
            break;
        }
    }
    out.fuel_exhausted = cycle >= fuel;
    out.cycles = cycle;
    out.space = visited;
    out.last = std::move(c);
    return out;
}

// ---------------------------------------------------------------- codec

Codec::Codec(const HpmSpec& spec) : spec_(spec) {
    spec_.validate();
    if (spec_.arity != 0) throw HpmError("configuration codes cover machines without inputs");
    for (auto& q : spec_.states) table_.push_back({true, q, Variant::Hat});
    for (auto& a : spec_.tape_symbols())
        for (auto v : {Variant::Hat, Variant::Check, Variant::HatUnder, Variant::CheckUnder})
            table_.push_back({false, a, v});
    // Codes are 1 followed by 𝔎−1 bits, so 2^(𝔎−1) ≥ |table| is enough.
    std::size_t need = std::bit_width(table_.size() - 1) + 1;
    while ((std::size_t(1) << k_) < need) ++k_;
    width_ = std::size_t(1) << k_;
    if (width_ > 62) throw HpmError("too many symbols");
    for (std::size_t n = 0; n < table_.size(); ++n) index_[block_code(table_[n]).bits()] = n;
}

std::size_t Codec::index_of(const Block& b) const {
    for (std::size_t n = 0; n < table_.size(); ++n)
        if (table_[n].is_state == b.is_state && table_[n].name == b.name &&
            (b.is_state || table_[n].variant == b.variant))
            return n;
    throw HpmError("no symbol " + b.name);
}

Natural Codec::block_code(const Block& b) const {
    return Natural::pow2(width_ - 1) + Natural(index_of(b));
}

Natural Codec::state_code(const std::string& q) const { return block_code({true, q, Variant::Hat}); }

Natural Codec::symbol_code(const std::string& a, Variant v) const { return block_code({false, a, v}); }

Natural Codec::sequence_code(const std::vector<std::string>& syms, Variant v) const {
    Natural out;
    for (auto& s : syms) out = concat(out, symbol_code(s, v));
    return out;
}

Natural Codec::encode(const Configuration& c) const {
    Natural out = state_code(c.state);
    for (std::size_t p = 0; p < c.work.size(); ++p)
        out = concat(out, symbol_code(c.work[p], p == c.i ? Variant::HatUnder : Variant::Hat));
    for (std::size_t p = 0; p < c.run.size(); ++p)
        out = concat(out, symbol_code(c.run[p], p == c.j ? Variant::CheckUnder : Variant::Check));
    return out;
}

std::optional<std::vector<Codec::Block>> Codec::blocks(const Natural& code) const {
    auto bits = code.bits();
    if (code.is_zero()) return std::vector<Block>{};
    if (bits.size() % width_) return std::nullopt;
    std::vector<Block> out;
    for (std::size_t p = 0; p < bits.size(); p += width_) {
        auto it = index_.find(bits.substr(p, width_));
        if (it == index_.end()) return std::nullopt;
        out.push_back(table_[it->second]);
    }
    return out;
}

namespace {

bool hat(Variant v) { return v == Variant::Hat || v == Variant::HatUnder; }
bool under(Variant v) { return v == Variant::HatUnder || v == Variant::CheckUnder; }

struct Layout {
    std::vector<Codec::Block> bl;
    std::size_t work_begin = 1, run_begin = 0;  // block indices
    std::size_t i = 0, j = 0;
};

std::optional<std::string> layout_of(const Codec& codec, const Natural& code, Layout& L) {
    auto bl = codec.blocks(code);
    if (!bl) return "not a sequence of symbol codes";
    L.bl = std::move(*bl);
    auto& b = L.bl;
    if (b.empty() || !b[0].is_state) return "does not begin with a state";
    std::size_t p = 1;
    int unders = 0;
    while (p < b.size() && !b[p].is_state && hat(b[p].variant)) {
        if (under(b[p].variant)) ++unders, L.i = p - 1;
        ++p;
    }
    if (p == 1) return "empty work tape";
    if (unders != 1) return "work tape has " + std::to_string(unders) + " scanned cells";
    if (b[p - 1].name != kBlank) return "work tape does not end with blank";
    for (std::size_t q = 1; q + 1 < p; ++q)
        if (b[q].name == kBlank) return "blank inside the work tape";
    L.run_begin = p;
    unders = 0;
    while (p < b.size() && !b[p].is_state && !hat(b[p].variant)) {
        if (under(b[p].variant)) ++unders, L.j = p - L.run_begin;
        ++p;
    }
    if (p != b.size()) return "symbol out of place at block " + std::to_string(p);
    if (p == L.run_begin) return "empty run tape";
    if (unders != 1) return "run tape has " + std::to_string(unders) + " scanned cells";
    if (b[p - 1].name != kBlank) return "run tape does not end with blank";
    for (std::size_t q = L.run_begin; q + 1 < p; ++q)
        if (b[q].name == kBlank) return "blank inside the run tape";
    return std::nullopt;
}

}  // namespace

std::optional<std::string> Codec::config_violation(const Natural& code) const {
    Layout L;
    return layout_of(*this, code, L);
}

Configuration Codec::decode(const Natural& code) const {
    Layout L;
    if (auto v = layout_of(*this, code, L)) throw HpmError("not a configuration code: " + *v);
    Configuration c;
    c.state = L.bl[0].name;
    for (std::size_t p = 1; p < L.run_begin; ++p) c.work.push_back(L.bl[p].name);
    for (std::size_t p = L.run_begin; p < L.bl.size(); ++p) c.run.push_back(L.bl[p].name);
    c.i = L.i;
    c.j = L.j;
    c.input = {kBlank};
    return c;
}

Natural Codec::successor(const Natural& code) const {
    Layout L;
    if (auto v = layout_of(*this, code, L)) throw HpmError("not a configuration code: " + *v);
    const std::size_t W = width_;
    const std::size_t total = code.size() / W;
    auto block = [&](std::size_t n) { return code.substring(n * W, W); };
    auto segment = [&](std::size_t from, std::size_t to) {
        return from >= to ? Natural(0) : code.substring(from * W, (to - from) * W);
    };
    const std::string& a = L.bl[0].name;
    const std::size_t wi = 1 + L.i, rj = L.run_begin + L.j;
    const std::string& b = L.bl[wi].name;
    const std::string& c = L.bl[rj].name;
    const std::size_t m_at = L.run_begin - 1;

    Natural head = block(0), work = segment(1, L.run_begin), run = segment(L.run_begin, total);
    std::size_t new_i = L.i, new_j = L.j;
    bool grow = false;
    if (const Transition* t = spec_.lookup(a, b, c, kBlank)) {
        std::string e = t->write == "=" ? b : t->write;
        if (is_reserved(e)) throw HpmError("state " + a + " would write " + e);
        // ⌜d⌝∘[x] with the state block replaced.
        head = state_code(t->state);
        grow = wi == m_at;
        new_i = move_head(L.i, t->work, false);
        new_j = move_head(L.j, t->run, c == kBlank);
        // Rewrite the scanned work cell, then shift the work underline.
        std::size_t cells = L.run_begin - 1 + (grow ? 1 : 0);
        Natural w;
        for (std::size_t p = 0; p < cells; ++p) {
            std::string sym = p == L.i ? e : p < L.run_begin - 1 ? L.bl[1 + p].name : std::string(kBlank);
            w = concat(w, symbol_code(sym, p == new_i ? Variant::HatUnder : Variant::Hat));
        }
        work = w;
    }
    if (spec_.is_move_state(a)) {
        // ⊤-prefixed ℕ-translation of the work cells before the head, inserted
        // ahead of the closing blank of the run tape.
        Natural hats = segment(1, wi);
        Natural checks = symbol_code(kTopSym, Variant::Check);
        auto hb = blocks(hats);
        for (auto& s : *hb) checks = concat(checks, symbol_code(s.name, Variant::Check));
        std::size_t n = total - L.run_begin - 1;
        Natural body = segment(L.run_begin, L.run_begin + n);
        run = concat(concat(body, checks), symbol_code(kBlank, Variant::Check));
    }
    if (new_j != L.j || spec_.is_move_state(a)) {
        auto rb = blocks(run);
        Natural r;
        for (std::size_t p = 0; p < rb->size(); ++p)
            r = concat(r, symbol_code((*rb)[p].name, p == new_j ? Variant::CheckUnder : Variant::Check));
        run = r;
    }
    return concat(concat(head, work), run);
}

Natural concat_codes(const Natural& x, const Natural& y) { return concat(x, y); }

Natural codec_successor(const Codec& codec, const Natural& code) { return codec.successor(code); }

// ---------------------------------------------------------------- predicates

namespace {

std::optional<std::vector<std::string>> plain_sequence(const Codec& c, const Natural& x, Variant v) {
    auto bl = c.blocks(x);
    if (!bl) return std::nullopt;
    std::vector<std::string> out;
    for (auto& b : *bl) {
        if (b.is_state || b.variant != v) return std::nullopt;
        out.push_back(b.name);
    }
    return out;
}

std::optional<Layout> layout(const Codec& c, const Natural& x) {
    Layout L;
    if (layout_of(c, x, L)) return std::nullopt;
    return L;
}

}  // namespace

bool pred_N(const Codec& c, const Natural& x, const Natural& y) {
    auto seq = plain_sequence(c, x, Variant::Hat);
    if (!seq) return true;
    return y == c.sequence_code(*seq, Variant::Check);
}

bool pred_C(const Codec& c, const Natural& x) { return !c.config_violation(x).has_value(); }

bool pred_I(const Codec& c, const Natural& x, const Natural& y) {
    auto L = layout(c, x);
    return L && Natural(L->i) == y;
}

bool pred_J(const Codec& c, const Natural& x, const Natural& y) {
    auto L = layout(c, x);
    return L && Natural(L->j) == y;
}

bool pred_M(const Codec& c, const Natural& x, const Natural& y) {
    auto L = layout(c, x);
    return L && Natural(L->run_begin - 2) == y;
}

bool pred_E(const Codec& c, const Natural& x, const Natural& y) {
    std::vector<std::string> syms;
    for (char b : x.is_zero() ? std::string() : x.bits()) syms.emplace_back(1, b);
    return y == c.sequence_code(syms, Variant::Check);
}

bool pred_D(const Codec& c, const Natural& x, const Natural& y) {
    auto seq = plain_sequence(c, x, Variant::Hat);
    if (!seq) return false;
    std::string bits;
    for (auto& s : *seq) {
        if (s != "0" && s != "1") return false;
        bits += s;
    }
    if (bits.empty()) return y.is_zero();
    if (bits[0] != '1') return false;
    return y == Natural::from_bits(bits);
}

bool pred_S(const Codec& c, const Natural& x, const Natural& y) {
    return pred_C(c, x) && c.successor(x) == y;
}

Tri pred_A(const Codec& c, const Natural& z, const Natural& x, const Natural& y, std::size_t fuel) {
    if (!pred_C(c, z)) return Tri::False;
    if (y > Natural(fuel)) return Tri::Unknown;
    Natural cur = z;
    for (std::size_t s = 0;; ++s) {
        if (c.spec().is_move_state(c.decode(cur).state)) return Tri::False;
        if (Natural(s) == y) return cur == x ? Tri::True : Tri::False;
        cur = c.successor(cur);
    }
}

Tri pred_A1(const Codec& c, const Natural& z, const Natural& y, std::size_t fuel) {
    if (!pred_C(c, z)) return Tri::False;
    if (y > Natural(fuel)) return Tri::Unknown;
    Natural cur = z;
    for (std::size_t s = 0;; ++s) {
        if (c.spec().is_move_state(c.decode(cur).state)) return Tri::False;
        if (Natural(s) == y) return Tri::True;
        cur = c.successor(cur);
    }
}

Tri pred_B(const Codec& c, const Natural& z, const Natural& x, std::size_t fuel) {
    if (!pred_C(c, z)) return Tri::False;
    Natural cur = z;
    for (std::size_t s = 0; s <= fuel; ++s) {
        if (c.spec().is_move_state(c.decode(cur).state)) return cur == x ? Tri::True : Tri::False;
        cur = c.successor(cur);
    }
    return Tri::Unknown;
}

std::vector<Configuration> random_reachable(const HpmSpec& spec, std::mt19937_64& rng, std::size_t count,
                                            std::size_t max_cycles) {
    std::vector<Configuration> out;
    std::uniform_int_distribution<std::size_t> cycles(0, max_cycles), len(1, 6),
        sym(0, spec.alphabet.size() - 1);
    std::bernoulli_distribution moves(0.15);
    while (out.size() < count) {
        auto c = initial_configuration(spec);
        std::size_t n = cycles(rng);
        for (std::size_t t = 0; t < n; ++t) {
            std::vector<std::string> em;
            if (moves(rng)) {
                std::string m;
                for (std::size_t l = len(rng); l > 0; --l) m += spec.alphabet[sym(rng)];
                em.push_back(m);
            }
            c = step(spec, c, em);
        }
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace clarith
