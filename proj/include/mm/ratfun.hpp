#ifndef MM_RATFUN_HPP
#define MM_RATFUN_HPP

#include "matrix.hpp"

namespace mm {

// Rational function in one variable over a number field, kept with coprime
// numerator/denominator and monic denominator. Forms a field, so it can be
// used as the scalar type of the generic polynomial and matrix code (that is
// how traces along a cover are computed).
class RF {
public:
    RF() : num_{}, den_{FE(1)} {}
    RF(long n) : num_{}, den_{FE(1)} {
        if (n != 0) num_ = {FE(n)};
    }
    RF(const FE& c) : num_{}, den_{FE(1)} {
        if (!is_zero(c)) num_ = {c};
    }
    RF(PolyV<FE> num, PolyV<FE> den) : num_(std::move(num)), den_(std::move(den)) {
        normalize();
    }
    static RF from_poly(PolyV<FE> p) { return RF(std::move(p), {FE(1)}); }
    // Precondition: num and den already coprime with den monic; skips the gcd.
    static RF reduced(PolyV<FE> num, PolyV<FE> den) {
        RF r;
        r.num_ = std::move(num);
        r.den_ = std::move(den);
        p_norm(r.num_);
        if (r.num_.empty()) r.den_ = {FE(1)};
        return r;
    }
    static RF var() { return RF({FE(0), FE(1)}, {FE(1)}); }

    const PolyV<FE>& num() const { return num_; }
    const PolyV<FE>& den() const { return den_; }
    bool is_polynomial() const { return p_deg(den_) == 0; }

    friend bool is_zero(const RF& r) { return r.num_.empty(); }
    friend bool is_one(const RF& r) {
        return p_deg(r.num_) == 0 && p_deg(r.den_) == 0 && is_one(r.num_[0]) && is_one(r.den_[0]);
    }

    friend RF operator+(const RF& a, const RF& b) {
        return RF(p_add(p_mul(a.num_, b.den_), p_mul(b.num_, a.den_)), p_mul(a.den_, b.den_));
    }
    friend RF operator-(const RF& a, const RF& b) {
        return RF(p_sub(p_mul(a.num_, b.den_), p_mul(b.num_, a.den_)), p_mul(a.den_, b.den_));
    }
    friend RF operator-(const RF& a) { return RF(p_neg(a.num_), a.den_); }
    friend RF operator*(const RF& a, const RF& b) {
        return RF(p_mul(a.num_, b.num_), p_mul(a.den_, b.den_));
    }
    friend RF inv(const RF& a) {
        if (is_zero(a)) throw ZeroInput("inverse of zero rational function");
        return RF(a.den_, a.num_);
    }
    friend RF operator/(const RF& a, const RF& b) { return a * inv(b); }
    friend bool operator==(const RF& a, const RF& b) {
        return p_eq(a.num_, b.num_) && p_eq(a.den_, b.den_);
    }
    friend bool operator!=(const RF& a, const RF& b) { return !(a == b); }

    RF deriv() const {
        return RF(p_sub(p_mul(p_deriv(num_), den_), p_mul(num_, p_deriv(den_))),
                  p_mul(den_, den_));
    }

    // Substitute another rational function for the variable.
    RF compose(const RF& inner) const {
        RF n(0), d(0);
        // Horner over the inner value for numerator and denominator separately.
        for (size_t i = num_.size(); i-- > 0;) n = n * inner + RF(num_[i]);
        for (size_t i = den_.size(); i-- > 0;) d = d * inner + RF(den_[i]);
        return n / d;
    }

    // r(1/s) as a rational function in s.
    RF subst_inverse() const {
        PolyV<FE> rn(num_.rbegin(), num_.rend());
        PolyV<FE> rd(den_.rbegin(), den_.rend());
        int dn = p_deg(num_), dd = p_deg(den_);
        if (dn < 0) return RF(0);
        PolyV<FE> n = rn, d = rd;
        if (dd > dn)
            n = p_mul(n, p_pow(PolyV<FE>{FE(0), FE(1)}, static_cast<unsigned>(dd - dn)));
        else if (dn > dd)
            d = p_mul(d, p_pow(PolyV<FE>{FE(0), FE(1)}, static_cast<unsigned>(dn - dd)));
        return RF(std::move(n), std::move(d));
    }

    FE eval(const FE& x) const {
        FE d = p_eval(den_, x);
        if (is_zero(d)) throw ZeroDivisor("evaluation at a pole");
        return p_eval(num_, x) / d;
    }

    // Order of vanishing at a finite squarefree place (negative = pole order).
    int ord_at(const PolyV<FE>& p) const {
        auto mult = [&](PolyV<FE> a) {
            int m = 0;
            if (a.empty()) return 0;
            while (true) {
                auto [q, r] = p_divmod(a, p);
                if (!p_is_zero(r)) break;
                ++m;
                a = q;
            }
            return m;
        };
        if (is_zero(*this)) return 0;
        return mult(num_) - mult(den_);
    }

    // Order at infinity: deg den - deg num (of dt-free function values).
    int ord_at_infinity() const {
        if (is_zero(*this)) return 0;
        return p_deg(den_) - p_deg(num_);
    }

private:
    void normalize() {
        p_norm(den_);
        if (p_is_zero(den_)) throw ZeroDivisor("rational function with zero denominator");
        p_norm(num_);
        if (num_.empty()) {
            den_ = {FE(1)};
            return;
        }
        PolyV<FE> g = p_gcd(num_, den_);
        if (p_deg(g) > 0) {
            num_ = p_quo(num_, g);
            den_ = p_quo(den_, g);
        }
        FE lead_inv = inv(den_.back());
        num_ = p_smul(lead_inv, num_);
        den_ = p_smul(lead_inv, den_);
    }

    PolyV<FE> num_, den_;
};

} // namespace mm

#endif
