#pragma once

#include "clarith/natural.hpp"

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace clarith {

struct PolyfunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A unary polynomial graph-term, possibly with unary placeholder letters.
// Nodes are stored in topological order: arguments always precede their
// parent. With sharing on, the builder merges identical-content nodes.
class GraphTerm {
public:
    enum class Op { Zero, Var, Succ, Add, Mul, Call };
    struct Node {
        Op op = Op::Zero;
        int a = -1, b = -1;
        std::string fn;  // Call
    };

    explicit GraphTerm(bool share = true) : share_(share) {}

    int zero();
    int y();
    int succ(int a);
    int add(int a, int b);
    int mul(int a, int b);
    int call(const std::string& f, int a);
    // The numeral k built from 0, ′ and + (O(log k) nodes).
    int constant(std::uint64_t k);

    void set_root(int r);
    int root() const { return root_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    std::set<std::string> placeholders() const;

    // The same term with placeholder letters renamed; unmapped names stay.
    GraphTerm rename(const std::map<std::string, std::string>& m) const;

    std::string format() const;
    static GraphTerm parse(std::string_view text);

private:
    int push(Node n);
    bool share_;
    std::vector<Node> nodes_;
    std::map<std::tuple<int, int, int, std::string>, int> index_;
    int root_ = -1;
};

using UnaryFn = std::function<Natural(const Natural&)>;

// Each node is evaluated once.
Natural eval_graph(const GraphTerm& t, const Natural& y, const std::map<std::string, UnaryFn>& bindings = {});

// ⟨(f1,τ1),…,(fk,τk)⟩ where τi depends only on f1…f(i−1); the whole
// sequence denotes fk.
class ExplicitPolyFn {
public:
    struct Def {
        std::string name;
        GraphTerm term;
    };

    ExplicitPolyFn() = default;
    explicit ExplicitPolyFn(std::vector<Def> defs);  // throws on a dependency violation
    static ExplicitPolyFn of(const GraphTerm& t);

    const std::vector<Def>& defs() const { return defs_; }
    const std::string& name() const { return defs_.back().name; }
    std::size_t size() const;  // total node count
    Natural eval(const Natural& y) const;

    std::string format() const;
    static ExplicitPolyFn parse(std::string_view text);

private:
    std::vector<Def> defs_;
};

Natural eval_explicit(const ExplicitPolyFn& f, const Natural& y);

// Assembles an explicit function definition by definition. Imported
// functions keep their own definitions once; later terms refer to them by
// the returned names.
class PolyFnBuilder {
public:
    std::string import(const ExplicitPolyFn& f);
    std::string define(const GraphTerm& t);
    // The function denoted by the last definition.
    ExplicitPolyFn build() const;

private:
    std::vector<ExplicitPolyFn::Def> defs_;
    int counter_ = 0;
};

// τ(g1,…,gn): the definitions of the gi are concatenated (renumbered f1,f2,…)
// and τ is appended with names[i] standing for gi. Nothing is expanded.
ExplicitPolyFn compose(const GraphTerm& tau, const std::vector<std::string>& names,
                       const std::vector<ExplicitPolyFn>& gs);

// y ↦ a(y)+b(y). Size is exactly size(a)+size(b)+4.
ExplicitPolyFn sum_bounds(const ExplicitPolyFn& a, const ExplicitPolyFn& b);
// y ↦ k·a(y).
ExplicitPolyFn scale_bounds(const ExplicitPolyFn& a, std::uint64_t k);
// y ↦ outer(inner(y)).
ExplicitPolyFn apply_bounds(const ExplicitPolyFn& outer, const ExplicitPolyFn& inner);
// y ↦ c0 + c1·y + c2·y² + …
ExplicitPolyFn polynomial_bound(const std::vector<std::uint64_t>& coefficients);

}  // namespace clarith
