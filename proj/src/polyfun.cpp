#include "clarith/polyfun.hpp"

#include <sstream>
#include <unordered_map>

namespace clarith {

int GraphTerm::push(Node n) {
    auto check = [&](int i) {
        if (i < 0 || i >= static_cast<int>(nodes_.size())) throw PolyfunError("graph-term: bad argument id");
    };
    switch (n.op) {
        case Op::Zero:
        case Op::Var: break;
        case Op::Succ:
        case Op::Call: check(n.a); break;
        case Op::Add:
        case Op::Mul:
            check(n.a);
            check(n.b);
            break;
    }
    if (n.op == Op::Call && n.fn.empty()) throw PolyfunError("graph-term: placeholder without a name");
    auto key = std::make_tuple(static_cast<int>(n.op), n.a, n.b, n.fn);
    if (share_) {
        auto it = index_.find(key);
        if (it != index_.end()) {
            root_ = it->second;
            return it->second;
        }
    }
    nodes_.push_back(std::move(n));
    int id = static_cast<int>(nodes_.size()) - 1;
    if (share_) index_.emplace(key, id);
    root_ = id;
    return id;
}

int GraphTerm::zero() { return push({Op::Zero, -1, -1, {}}); }
int GraphTerm::y() { return push({Op::Var, -1, -1, {}}); }
int GraphTerm::succ(int a) { return push({Op::Succ, a, -1, {}}); }
int GraphTerm::add(int a, int b) { return push({Op::Add, a, b, {}}); }
int GraphTerm::mul(int a, int b) { return push({Op::Mul, a, b, {}}); }
int GraphTerm::call(const std::string& f, int a) { return push({Op::Call, a, -1, f}); }

int GraphTerm::constant(std::uint64_t k) {
    int acc = zero();
    if (k == 0) return acc;
    int top = 63;
    while (!((k >> top) & 1)) --top;
    acc = succ(acc);
    for (int i = top - 1; i >= 0; --i) {
        acc = add(acc, acc);
        if ((k >> i) & 1) acc = succ(acc);
    }
    return acc;
}

void GraphTerm::set_root(int r) {
    if (r < 0 || r >= static_cast<int>(nodes_.size())) throw PolyfunError("graph-term: bad root");
    root_ = r;
}

std::set<std::string> GraphTerm::placeholders() const {
    std::set<std::string> out;
    for (auto& n : nodes_)
        if (n.op == Op::Call) out.insert(n.fn);
    return out;
}

GraphTerm GraphTerm::rename(const std::map<std::string, std::string>& m) const {
    GraphTerm out = *this;
    out.index_.clear();
    for (std::size_t i = 0; i < out.nodes_.size(); ++i) {
        auto& n = out.nodes_[i];
        if (n.op == Op::Call) {
            auto it = m.find(n.fn);
            if (it != m.end()) n.fn = it->second;
        }
        if (out.share_) out.index_.emplace(std::make_tuple(static_cast<int>(n.op), n.a, n.b, n.fn), static_cast<int>(i));
    }
    return out;
}

std::string GraphTerm::format() const {
    std::ostringstream os;
    os << "root " << root_ << "\n";
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        auto& n = nodes_[i];
        os << i << ": ";
        switch (n.op) {
            case Op::Zero: os << "0"; break;
            case Op::Var: os << "y"; break;
            case Op::Succ: os << "succ(" << n.a << ")"; break;
            case Op::Add: os << "add(" << n.a << "," << n.b << ")"; break;
            case Op::Mul: os << "mul(" << n.a << "," << n.b << ")"; break;
            case Op::Call: os << "call " << n.fn << "(" << n.a << ")"; break;
        }
        os << "\n";
    }
    return os.str();
}

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<int> int_args(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            out.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw PolyfunError("graph-term: bad argument '" + part + "'");
        }
    }
    return out;
}

}  // namespace

GraphTerm GraphTerm::parse(std::string_view text) {
    GraphTerm t(false);
    int root = -1;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        auto line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("root ", 0) == 0) {
            root = std::stoi(line.substr(5));
            continue;
        }
        auto colon = line.find(':');
        if (colon == std::string::npos) throw PolyfunError("graph-term: expected 'id: op' in '" + line + "'");
        if (std::stoi(line.substr(0, colon)) != static_cast<int>(t.size()))
            throw PolyfunError("graph-term: node ids must be consecutive from 0");
        auto body = trim(line.substr(colon + 1));
        if (body == "0") {
            t.zero();
            continue;
        }
        if (body == "y") {
            t.y();
            continue;
        }
        auto open = body.find('(');
        if (open == std::string::npos || body.back() != ')') throw PolyfunError("graph-term: bad node '" + body + "'");
        auto head = trim(body.substr(0, open));
        auto args = int_args(body.substr(open + 1, body.size() - open - 2));
        auto need = [&](std::size_t k) {
            if (args.size() != k) throw PolyfunError("graph-term: arity mismatch in '" + body + "'");
        };
        if (head == "succ") {
            need(1);
            t.succ(args[0]);
        } else if (head == "add") {
            need(2);
            t.add(args[0], args[1]);
        } else if (head == "mul") {
            need(2);
            t.mul(args[0], args[1]);
        } else if (head.rfind("call ", 0) == 0) {
            need(1);
            t.call(trim(head.substr(5)), args[0]);
        } else {
            throw PolyfunError("graph-term: unknown operation '" + head + "'");
        }
    }
    if (t.size() == 0) throw PolyfunError("graph-term: no nodes");
    t.set_root(root < 0 ? static_cast<int>(t.size()) - 1 : root);
    return t;
}

Natural eval_graph(const GraphTerm& t, const Natural& y, const std::map<std::string, UnaryFn>& bindings) {
    using Op = GraphTerm::Op;
    auto& ns = t.nodes();
    if (t.root() < 0) throw PolyfunError("graph-term: empty");
    std::vector<char> live(ns.size(), 0);
    live[t.root()] = 1;
    for (int i = t.root(); i >= 0; --i) {
        if (!live[i]) continue;
        if (ns[i].a >= 0) live[ns[i].a] = 1;
        if (ns[i].b >= 0) live[ns[i].b] = 1;
    }
    std::vector<Natural> val(ns.size());
    for (int i = 0; i <= t.root(); ++i) {
        if (!live[i]) continue;
        auto& n = ns[i];
        switch (n.op) {
            case Op::Zero: val[i] = Natural(0); break;
            case Op::Var: val[i] = y; break;
            case Op::Succ: val[i] = val[n.a].succ(); break;
            case Op::Add: val[i] = val[n.a] + val[n.b]; break;
            case Op::Mul: val[i] = val[n.a] * val[n.b]; break;
            case Op::Call: {
                auto it = bindings.find(n.fn);
                if (it == bindings.end()) throw PolyfunError("unbound placeholder " + n.fn);
                val[i] = it->second(val[n.a]);
                break;
            }
        }
    }
    return val[t.root()];
}

ExplicitPolyFn::ExplicitPolyFn(std::vector<Def> defs) : defs_(std::move(defs)) {
    if (defs_.empty()) throw PolyfunError("explicit function: no definitions");
    std::set<std::string> earlier;
    for (auto& d : defs_) {
        if (d.name.empty()) throw PolyfunError("explicit function: unnamed definition");
        for (auto& p : d.term.placeholders())
            if (!earlier.count(p))
                throw PolyfunError("explicit function: " + d.name + " depends on " + p +
                                   ", which is not defined before it");
        if (!earlier.insert(d.name).second) throw PolyfunError("explicit function: " + d.name + " defined twice");
    }
}

ExplicitPolyFn ExplicitPolyFn::of(const GraphTerm& t) { return ExplicitPolyFn({{"f1", t}}); }

std::size_t ExplicitPolyFn::size() const {
    std::size_t n = 0;
    for (auto& d : defs_) n += d.term.size();
    return n;
}

Natural ExplicitPolyFn::eval(const Natural& y) const {
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < defs_.size(); ++i) index[defs_[i].name] = static_cast<int>(i);
    std::vector<std::unordered_map<Natural, Natural>> memo(defs_.size());
    std::function<Natural(int, const Natural&)> at = [&](int i, const Natural& x) -> Natural {
        auto it = memo[i].find(x);
        if (it != memo[i].end()) return it->second;
        std::map<std::string, UnaryFn> bind;
        for (auto& p : defs_[i].term.placeholders()) {
            int j = index.at(p);
            bind[p] = [&at, j](const Natural& v) { return at(j, v); };
        }
        auto v = eval_graph(defs_[i].term, x, bind);
        memo[i].emplace(x, v);
        return v;
    };
    return at(static_cast<int>(defs_.size()) - 1, y);
}

Natural eval_explicit(const ExplicitPolyFn& f, const Natural& y) { return f.eval(y); }

std::string ExplicitPolyFn::format() const {
    std::ostringstream os;
    for (auto& d : defs_) os << "def " << d.name << "\n" << d.term.format();
    return os.str();
}

ExplicitPolyFn ExplicitPolyFn::parse(std::string_view text) {
    std::vector<Def> defs;
    std::string name, body;
    auto flush = [&] {
        if (!name.empty()) defs.push_back({name, GraphTerm::parse(body)});
        body.clear();
    };
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        auto line = trim(raw);
        if (line.rfind("def ", 0) == 0) {
            flush();
            name = trim(line.substr(4));
            continue;
        }
        if (!line.empty() && line[0] != '#' && name.empty())
            throw PolyfunError("explicit function: node before the first 'def'");
        body += line + "\n";
    }
    flush();
    return ExplicitPolyFn(std::move(defs));
}

std::string PolyFnBuilder::import(const ExplicitPolyFn& f) {
    std::map<std::string, std::string> local;
    for (auto& d : f.defs()) {
        auto fresh = "f" + std::to_string(++counter_);
        defs_.push_back({fresh, d.term.rename(local)});
        local[d.name] = fresh;
    }
    return local.at(f.name());
}

std::string PolyFnBuilder::define(const GraphTerm& t) {
    auto fresh = "f" + std::to_string(++counter_);
    defs_.push_back({fresh, t});
    return fresh;
}

ExplicitPolyFn PolyFnBuilder::build() const { return ExplicitPolyFn(defs_); }

ExplicitPolyFn compose(const GraphTerm& tau, const std::vector<std::string>& names,
                       const std::vector<ExplicitPolyFn>& gs) {
    if (names.size() != gs.size()) throw PolyfunError("compose: one function per placeholder is needed");
    std::set<std::string> known(names.begin(), names.end());
    for (auto& p : tau.placeholders())
        if (!known.count(p)) throw PolyfunError("compose: placeholder " + p + " is not supplied");
    PolyFnBuilder b;
    std::map<std::string, std::string> outer;
    for (std::size_t i = 0; i < gs.size(); ++i) outer[names[i]] = b.import(gs[i]);
    b.define(tau.rename(outer));
    return b.build();
}

ExplicitPolyFn sum_bounds(const ExplicitPolyFn& a, const ExplicitPolyFn& b) {
    GraphTerm t;
    int y = t.y();
    t.add(t.call("a", y), t.call("b", y));
    return compose(t, {"a", "b"}, {a, b});
}

ExplicitPolyFn scale_bounds(const ExplicitPolyFn& a, std::uint64_t k) {
    GraphTerm t;
    int y = t.y();
    int v = t.call("a", y);
    t.mul(t.constant(k), v);
    return compose(t, {"a"}, {a});
}

ExplicitPolyFn apply_bounds(const ExplicitPolyFn& outer, const ExplicitPolyFn& inner) {
    GraphTerm t;
    t.call("o", t.call("i", t.y()));
    return compose(t, {"o", "i"}, {outer, inner});
}

ExplicitPolyFn polynomial_bound(const std::vector<std::uint64_t>& c) {
    GraphTerm t;
    if (c.empty()) {
        t.zero();
        return ExplicitPolyFn::of(t);
    }
    int y = t.y();
    int acc = t.constant(c.back());
    for (std::size_t i = c.size() - 1; i-- > 0;) {
        acc = t.mul(acc, y);
        if (c[i]) acc = t.add(acc, t.constant(c[i]));
    }
    t.set_root(acc);
    return ExplicitPolyFn::of(t);
}

}  // namespace clarith
