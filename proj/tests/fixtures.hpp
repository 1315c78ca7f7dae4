#pragma once

#include "clarith/polyfun.hpp"

#include <string>
#include <vector>

namespace fixtures {

// y⁸ as a chain of three squarings.
inline clarith::GraphTerm eighth_power_dag() {
    clarith::GraphTerm t;
    int y = t.y();
    int a = t.mul(y, y);
    int b = t.mul(a, a);
    t.mul(b, b);
    return t;
}

// y⁸ as a tree of seven multiplications over eight leaves.
inline clarith::GraphTerm eighth_power_tree() {
    clarith::GraphTerm t(false);
    std::vector<int> level;
    for (int i = 0; i < 8; ++i) level.push_back(t.y());
    while (level.size() > 1) {
        std::vector<int> next;
        for (std::size_t i = 0; i < level.size(); i += 2) next.push_back(t.mul(level[i], level[i + 1]));
        level = next;
    }
    return t;
}

// f2(f1(y) + f2(y)).
inline clarith::GraphTerm two_placeholder_functional(const std::string& f1 = "f1", const std::string& f2 = "f2") {
    clarith::GraphTerm t;
    int y = t.y();
    int s = t.add(t.call(f1, y), t.call(f2, y));
    t.call(f2, s);
    return t;
}

// ⟨y⁸ (dag), y⁸ (tree), f2(f1(y)+f2(y))⟩, which denotes (y⁸+y⁸)⁸.
inline clarith::ExplicitPolyFn nested_eighth_powers() {
    return clarith::ExplicitPolyFn(
        {{"f1", eighth_power_dag()}, {"f2", eighth_power_tree()}, {"f3", two_placeholder_functional()}});
}

}  // namespace fixtures
