#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace twufp {

// Exact arithmetic everywhere: capacities/demands are arbitrary-precision
// integers, weights and augmentation factors are exact rationals.
using Int = boost::multiprecision::cpp_int;
using Ratio = boost::rational<Int>;

// Edges are indexed 1..m. Reduction instances reach tens of millions of
// edges, so indices are 64-bit and capacities are never expanded per edge.
using EdgeIndex = std::int64_t;

// Thrown by exhaustive components when an input exceeds their declared
// limits; they refuse rather than run unbounded.
struct LimitsExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Int int_pow(Int base, long exp) {
    if (exp < 0) throw std::invalid_argument("int_pow: negative exponent");
    Int r = 1;
    while (exp > 0) {
        if (exp & 1) r *= base;
        base *= base;
        exp >>= 1;
    }
    return r;
}

inline Ratio ratio_pow(const Ratio& base, long exp) {
    if (exp < 0) return Ratio(1) / ratio_pow(base, -exp);
    return Ratio(int_pow(base.numerator(), exp), int_pow(base.denominator(), exp));
}

inline std::string to_string(const Int& v) { return v.str(); }

inline std::string to_string(const Ratio& r) {
    if (r.denominator() == 1) return r.numerator().str();
    return r.numerator().str() + "/" + r.denominator().str();
}

// Parses "a" or "a/b" with optional sign, exact.
inline Ratio parse_ratio(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Ratio(Int(text));
        Int num(text.substr(0, slash));
        Int den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Ratio(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational: '" + text + "'");
    }
}

// The preprocessing lemmas assume 1/eps is a positive integer.
inline long inv_eps(const Ratio& eps) {
    if (eps.numerator() <= 0 || eps.numerator() != 1)
        throw std::invalid_argument("epsilon must be the reciprocal of a positive integer, got " +
                                    to_string(eps));
    if (eps.denominator() > 1'000'000)
        throw std::invalid_argument("1/eps out of supported range");
    return static_cast<long>(eps.denominator());
}

// Largest q >= 0 with base^q <= x; requires base > 1 and x >= 1.
inline long floor_log_power(const Ratio& base, const Ratio& x) {
    if (base <= Ratio(1)) throw std::invalid_argument("floor_log_power: base must exceed 1");
    if (x < Ratio(1)) throw std::invalid_argument("floor_log_power: x must be >= 1");
    long q = 0;
    Ratio p = base;
    while (p <= x) {
        ++q;
        p *= base;
    }
    return q;
}

// Least q >= 0 with base^q >= x; requires base > 1 and x >= 1.
inline long ceil_log_power(const Ratio& base, const Ratio& x) {
    if (base <= Ratio(1)) throw std::invalid_argument("ceil_log_power: base must exceed 1");
    if (x < Ratio(1)) throw std::invalid_argument("ceil_log_power: x must be >= 1");
    long q = 0;
    Ratio p(1);
    while (p < x) {
        ++q;
        p *= base;
    }
    return q;
}

// A task: demand d(i), profit w(i), processing time p(i) and an inclusive
// time window [window_lo, window_hi]. Artificial tasks are the rounded
// placeholders the recursion introduces; they carry no profit in final
// solutions and are exempt from the left-constrained condition.
struct Task {
    std::string id;
    Int demand;
    Ratio weight;
    EdgeIndex length = 1;
    EdgeIndex window_lo = 1;
    EdgeIndex window_hi = 1;
    bool artificial = false;

    EdgeIndex window_size() const { return window_hi - window_lo + 1; }
    bool operator==(const Task&) const = default;
};

// A capacity reservation for same-type tasks: path pb(b), height h(b),
// per-task demand d(b) and per-task weight w(b).
struct Box {
    EdgeIndex path_lo = 1;
    EdgeIndex path_hi = 1;
    Int height;
    Int demand;
    Ratio weight;

    bool operator==(const Box&) const = default;
};

// A box together with the guessed number n_b of tasks it must receive.
struct BoxedGuess {
    Box box;
    long count = 0;

    bool operator==(const BoxedGuess&) const = default;
};

// Selected tasks with one start edge each; the induced path of a task with
// start s is [s, s + p(i) - 1].
struct Schedule {
    std::map<std::string, EdgeIndex> placements;

    bool operator==(const Schedule&) const = default;
};

struct Placement {
    Task task;
    EdgeIndex start = 1;

    EdgeIndex end() const { return start + task.length - 1; }
};

}  // namespace twufp
