#include "clarith/natural.hpp"

#include <stdexcept>

namespace clarith {

Natural::Natural(Rep v) : v_(std::move(v)) {
    if (v_ < 0) throw std::invalid_argument("negative natural");
}

bool Natural::is_numeral(std::string_view s) {
    if (s.empty()) return false;
    if (s == "0") return true;
    if (s[0] != '1') return false;
    for (char c : s)
        if (c != '0' && c != '1') return false;
    return true;
}

Natural Natural::from_bits(std::string_view bits) {
    if (!is_numeral(bits)) throw std::invalid_argument("not a binary numeral: " + std::string(bits));
    Rep v = 0;
    for (char c : bits) {
        v <<= 1;
        if (c == '1') v |= 1;
    }
    return Natural(std::move(v));
}

Natural Natural::from_decimal(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty decimal");
    for (char c : s)
        if (c < '0' || c > '9') throw std::invalid_argument("not a decimal: " + std::string(s));
    return Natural(Rep(std::string(s)));
}

Natural Natural::pow2(std::size_t k) {
    Rep v = 1;
    v <<= k;
    return Natural(std::move(v));
}

Natural Natural::random_bits(std::mt19937_64& rng, std::size_t bits) {
    Rep v = 0;
    std::size_t done = 0;
    while (done < bits) {
        std::size_t take = std::min<std::size_t>(64, bits - done);
        std::uint64_t chunk = rng();
        if (take < 64) chunk &= (std::uint64_t(1) << take) - 1;
        v <<= take;
        v |= chunk;
        done += take;
    }
    return Natural(std::move(v));
}

std::string Natural::bits() const {
    if (v_.is_zero()) return "0";
    std::size_t n = size();
    std::string out(n, '0');
    for (std::size_t i = 0; i < n; ++i)
        if (boost::multiprecision::bit_test(v_, n - 1 - i)) out[i] = '1';
    return out;
}

std::string Natural::decimal() const { return v_.str(); }

std::size_t Natural::size() const {
    if (v_.is_zero()) return 0;
    return boost::multiprecision::msb(v_) + 1;
}

bool Natural::bit_from_left(std::size_t i) const {
    std::size_t n = size();
    if (i >= n) return false;
    return boost::multiprecision::bit_test(v_, n - 1 - i);
}

bool Natural::bit_from_right(std::size_t i) const {
    if (i >= size()) return false;
    return boost::multiprecision::bit_test(v_, i);
}

Natural Natural::substring(std::size_t pos, std::size_t len) const {
    std::size_t n = size();
    if (pos >= n || len == 0) return Natural();
    std::size_t end = std::min(n, pos + len);
    Rep v = v_ >> (n - end);
    Rep mask = 1;
    mask <<= (end - pos);
    mask -= 1;
    return Natural(Rep(v & mask));
}

std::uint64_t Natural::to_u64() const {
    if (!fits_u64()) throw std::overflow_error("natural exceeds 64 bits");
    return v_.convert_to<std::uint64_t>();
}

bool Natural::fits_u64() const { return size() <= 64; }

Natural Natural::operator-(const Natural& o) const {
    if (v_ <= o.v_) return Natural();
    return Natural(Rep(v_ - o.v_));
}

std::strong_ordering Natural::operator<=>(const Natural& o) const {
    int c = v_.compare(o.v_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::size_t Natural::hash() const {
    std::size_t h = 1469598103934665603ull;
    std::size_t n = size();
    for (std::size_t i = 0; i < n; i += 64) {
        Rep chunk = (v_ >> i) & Rep(~std::uint64_t(0));
        h ^= chunk.convert_to<std::uint64_t>();
        h *= 1099511628211ull;
    }
    return h ^ n;
}

Natural concat(const Natural& x, const Natural& y) { return (x << y.size()) + y; }

}  // namespace clarith
