#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>

namespace clarith {

// Natural numbers identified with their binary numerals. The empty numeral
// is spelled "0" and has length 0.
class Natural {
public:
    using Rep = boost::multiprecision::cpp_int;

    Natural() = default;
    Natural(std::uint64_t v) : v_(v) {}
    explicit Natural(Rep v);

    // Accepts only canonical numerals: "0" or 1(0|1)*.
    static Natural from_bits(std::string_view bits);
    static bool is_numeral(std::string_view s);
    static Natural from_decimal(std::string_view s);
    static Natural pow2(std::size_t k);
    // Uniform over [0, 2^bits).
    static Natural random_bits(std::mt19937_64& rng, std::size_t bits);

    std::string bits() const;
    std::string decimal() const;

    // |x|: the length of the binary numeral, with |0| = 0.
    std::size_t size() const;
    bool is_zero() const { return v_.is_zero(); }
    // Bit #i counted from the left, starting at 0. Out of range gives false.
    bool bit_from_left(std::size_t i) const;
    bool bit_from_right(std::size_t i) const;
    // The substring of length len starting at bit #pos (from the left).
    Natural substring(std::size_t pos, std::size_t len) const;

    const Rep& rep() const { return v_; }
    std::uint64_t to_u64() const;
    bool fits_u64() const;

    Natural operator+(const Natural& o) const { return Natural(Rep(v_ + o.v_)); }
    Natural operator*(const Natural& o) const { return Natural(Rep(v_ * o.v_)); }
    // Truncated subtraction.
    Natural operator-(const Natural& o) const;
    Natural operator<<(std::size_t k) const { return Natural(Rep(v_ << k)); }
    Natural operator>>(std::size_t k) const { return Natural(Rep(v_ >> k)); }
    Natural& operator+=(const Natural& o) { v_ += o.v_; return *this; }
    Natural succ() const { return Natural(Rep(v_ + 1)); }

    bool operator==(const Natural& o) const { return v_ == o.v_; }
    std::strong_ordering operator<=>(const Natural& o) const;

    std::size_t hash() const;

private:
    Rep v_;
};

// x∘y = x·2^|y| + y, the code of a concatenation.
Natural concat(const Natural& x, const Natural& y);

}  // namespace clarith

template <>
struct std::hash<clarith::Natural> {
    std::size_t operator()(const clarith::Natural& n) const { return n.hash(); }
};
