#ifndef MM_RATIONAL_HPP
#define MM_RATIONAL_HPP

#include <gmpxx.h>

#include <string>

#include "errors.hpp"

namespace mm {

// Exact rational scalar. mpq_class keeps gcd(num,den)=1 and den>0 as long as
// values are built through its canonical constructors and operators; the
// helpers below are the only places where raw num/den pairs enter.
using Rat = mpq_class;

inline Rat rat(long n, long d = 1) {
    if (d == 0) throw ZeroDivisor("rational with zero denominator");
    Rat r(n, d);
    r.canonicalize();
    return r;
}

inline Rat rat_from_string(const std::string& s) {
    try {
        Rat r(s);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw ParseError("bad rational literal: " + s);
    }
}

inline bool is_zero(const Rat& r) { return sgn(r) == 0; }
inline bool is_one(const Rat& r) { return r == 1; }

inline Rat inv(const Rat& r) {
    if (is_zero(r)) throw ZeroInput("inverse of zero rational");
    return Rat(1) / r;
}

inline std::string to_string(const Rat& r) { return r.get_str(); }

// rough size in limbs, used to pick small pivots during elimination
inline size_t entry_weight(const Rat& r) {
    return mpz_size(r.get_num_mpz_t()) + mpz_size(r.get_den_mpz_t());
}

// Total order used for deterministic canonical sorting.
inline int cmp3(const Rat& a, const Rat& b) { return cmp(a, b); }

} // namespace mm

#endif
