#ifndef MM_NUMBERFIELD_HPP
#define MM_NUMBERFIELD_HPP

#include <memory>
#include <string>
#include <vector>

#include "poly.hpp"

namespace mm {

class NumberField;
using NFPtr = std::shared_ptr<const NumberField>;

// A number field k = Q[x]/(m) given by a monic squarefree m over Q.
// Irreducibility is deliberately not verified: all arithmetic is gcd-based,
// and a reducible m surfaces lazily as ZeroDivisor during some inversion.
class NumberField {
public:
    static NFPtr create(PolyV<Rat> minpoly, std::string symbol = "g") {
        if (p_deg(minpoly) < 1) throw NotMonic("minimal polynomial must have degree >= 1");
        if (!is_one(minpoly.back())) throw NotMonic("minimal polynomial must be monic");
        if (!p_is_squarefree(minpoly))
            throw NotSquarefree("gcd(m, m') is not constant");
        return NFPtr(new NumberField(std::move(minpoly), std::move(symbol)));
    }

    static NFPtr rationals() {
        static NFPtr q = create(PolyV<Rat>{Rat(0), Rat(1)}, "x");
        return q;
    }

    int deg() const { return p_deg(minpoly_); }
    const PolyV<Rat>& minpoly() const { return minpoly_; }
    const std::string& symbol() const { return symbol_; }
    bool is_rationals() const { return deg() == 1; }

    bool same_field(const NumberField& o) const {
        return this == &o || p_eq(minpoly_, o.minpoly_);
    }

    // Reduce a coefficient vector of any length modulo the minimal polynomial
    // and pad to length deg().
    std::vector<Rat> reduce(PolyV<Rat> v) const {
        p_norm(v);
        if (p_deg(v) >= deg()) v = p_rem(v, minpoly_);
        v.resize(deg(), Rat(0));
        return v;
    }

private:
    NumberField(PolyV<Rat> m, std::string s) : minpoly_(std::move(m)), symbol_(std::move(s)) {
        if (deg() == 1) {
            // Normalize x - c handles so the generator is the rational c itself;
            // arithmetic then never needs the relation.
        }
    }
    PolyV<Rat> minpoly_;
    std::string symbol_;
};

// Element of a number field in the power basis of the generator. A null field
// pointer marks a plain rational constant, which promotes on contact with any
// field element; this lets generic polynomial/matrix code create 0 and 1
// without a field handle.
class FE {
public:
    FE() : c_{Rat(0)} {}
    FE(long n) : c_{Rat(n)} {}
    FE(const Rat& r) : c_{r} {}
    FE(NFPtr k, std::vector<Rat> coeffs) : k_(std::move(k)), c_(std::move(coeffs)) {
        if (static_cast<int>(c_.size()) != k_->deg())
            throw InternalInconsistency("coefficient vector length != field degree");
    }

    static FE gen(const NFPtr& k) {
        std::vector<Rat> c(k->deg(), Rat(0));
        if (k->deg() == 1) {
            // k = Q[x]/(x - c): the generator is the rational root.
            c[0] = -k->minpoly()[0];
        } else {
            c[1] = Rat(1);
        }
        return FE(k, std::move(c));
    }

    const NFPtr& field() const { return k_; }
    bool has_field() const { return static_cast<bool>(k_); }

    // Coordinates in the power basis of a field of degree d.
    std::vector<Rat> coords(int d) const {
        std::vector<Rat> v = c_;
        v.resize(static_cast<size_t>(d), Rat(0));
        return v;
    }
    const std::vector<Rat>& raw() const { return c_; }

    bool is_rational_value() const {
        for (size_t i = 1; i < c_.size(); ++i)
            if (sgn(c_[i]) != 0) return false;
        return true;
    }
    const Rat& rational_value() const {
        if (!is_rational_value()) throw InternalInconsistency("not a rational value");
        return c_[0];
    }

    FE promote(const NFPtr& k) const {
        if (!k_) {
            std::vector<Rat> v(k->deg(), Rat(0));
            v[0] = c_[0];
            return FE(k, std::move(v));
        }
        if (!k_->same_field(*k)) throw MismatchedDivisor("elements of different number fields");
        return FE(k, c_);
    }

    friend FE operator+(const FE& a, const FE& b) {
        // rational constants are the common case in the linear algebra; skip
        // the alignment machinery for them
        if (!a.k_ && !b.k_) return FE(Rat(a.c_[0] + b.c_[0]));
        if (!a.k_ || !b.k_) {
            FE r(a.k_ ? a : b);
            r.c_[0] += (a.k_ ? b : a).c_[0];
            return r;
        }
        auto [x, y, k] = align(a, b);
        return make(k, p_add(x, y));
    }
    friend FE operator-(const FE& a, const FE& b) {
        if (!a.k_ && !b.k_) return FE(Rat(a.c_[0] - b.c_[0]));
        auto [x, y, k] = align(a, b);
        return make(k, p_sub(x, y));
    }
    friend FE operator*(const FE& a, const FE& b) {
        if (!a.k_ && !b.k_) return FE(Rat(a.c_[0] * b.c_[0]));
        if (!a.k_ || !b.k_) {
            const Rat& s = (a.k_ ? b : a).c_[0];
            FE r(a.k_ ? a : b);
            for (auto& c : r.c_) c *= s;
            return r;
        }
        auto [x, y, k] = align(a, b);
        PolyV<Rat> prod = p_mul(x, y);
        if (k) return FE(k, k->reduce(std::move(prod)));
        return make(k, std::move(prod));
    }
    friend FE operator-(const FE& a) {
        FE r(a);
        for (auto& c : r.c_) c = -c;
        return r;
    }
    friend bool operator==(const FE& a, const FE& b) {
        if (!a.k_ && !b.k_) return cmp(a.c_[0], b.c_[0]) == 0;
        auto [x, y, k] = align(a, b);
        return p_eq(x, y);
    }
    friend bool operator!=(const FE& a, const FE& b) { return !(a == b); }

    friend bool is_zero(const FE& a) {
        for (const auto& c : a.c_)
            if (sgn(c) != 0) return false;
        return true;
    }
    friend bool is_one(const FE& a) {
        if (sgn(a.c_[0] - 1) != 0) return false;
        for (size_t i = 1; i < a.c_.size(); ++i)
            if (sgn(a.c_[i]) != 0) return false;
        return true;
    }

    friend FE inv(const FE& a) {
        if (is_zero(a)) throw ZeroInput("inverse of zero field element");
        if (!a.k_ || a.k_->deg() == 1 || a.is_rational_value()) {
            FE r(inv(rational_of(a)));
            return a.k_ ? r.promote(a.k_) : r;
        }
        PolyV<Rat> rep = a.c_;
        p_norm(rep);
        auto [g, u, v] = p_xgcd(rep, a.k_->minpoly());
        if (p_deg(g) != 0)
            throw ZeroDivisor("minimal polynomial is reducible; nontrivial factor found");
        (void)v;
        return FE(a.k_, a.k_->reduce(std::move(u)));
    }
    friend FE operator/(const FE& a, const FE& b) { return a * inv(b); }

    // Deterministic total order (field-degree padded lexicographic); used only
    // for canonical sorting, it has no algebraic meaning.
    friend int cmp3(const FE& a, const FE& b) {
        auto [x, y, k] = align(a, b);
        size_t n = std::max(x.size(), y.size());
        x.resize(n, Rat(0));
        y.resize(n, Rat(0));
        for (size_t i = n; i-- > 0;) {
            int c = cmp(x[i], y[i]);
            if (c != 0) return c;
        }
        return 0;
    }

    std::string str() const {
        if (!k_ || is_rational_value()) {
            return is_rational_value() ? rational_of(*this).get_str() : str_poly();
        }
        return str_poly();
    }

private:
    static FE make(const NFPtr& k, PolyV<Rat> v) {
        if (!k) {
            Rat c0 = v.empty() ? Rat(0) : v[0];
            return FE(c0);
        }
        v.resize(static_cast<size_t>(k->deg()), Rat(0));
        return FE(k, std::move(v));
    }

    static Rat rational_of(const FE& a) {
        if (a.k_ && a.k_->deg() == 1 && !a.is_rational_value())
            throw InternalInconsistency("degree-1 element not rational");
        return a.c_[0];
    }

    static std::tuple<PolyV<Rat>, PolyV<Rat>, NFPtr> align(const FE& a, const FE& b) {
        NFPtr k;
        if (a.k_ && b.k_) {
            if (!a.k_->same_field(*b.k_))
                throw MismatchedDivisor("elements of different number fields");
            k = a.k_;
        } else {
            k = a.k_ ? a.k_ : b.k_;
        }
        auto lift = [&](const FE& e) -> PolyV<Rat> {
            PolyV<Rat> v;
            if (!e.k_ && k) {
                v.assign(static_cast<size_t>(k->deg()), Rat(0));
                v[0] = e.c_[0];
            } else {
                v = e.c_;
            }
            return v;
        };
        return {lift(a), lift(b), k};
    }

    std::string str_poly() const {
        const std::string sym = k_ ? k_->symbol() : "g";
        std::string out;
        bool first = true;
        for (size_t i = 0; i < c_.size(); ++i) {
            if (sgn(c_[i]) == 0) continue;
            std::string term = c_[i].get_str();
            if (i >= 1) {
                term = (c_[i] == 1 ? "" : (c_[i] == -1 ? "-" : term + "*")) + sym;
                if (i > 1) term += "^" + std::to_string(i);
            }
            if (!first && term[0] != '-') out += "+";
            out += term;
            first = false;
        }
        return first ? "0" : out;
    }

    NFPtr k_;
    std::vector<Rat> c_;
};

inline size_t entry_weight(const FE& a) {
    size_t w = 0;
    for (const Rat& c : a.raw()) w += entry_weight(c);
    return w;
}

inline NFPtr nf_create(PolyV<Rat> minpoly, std::string symbol = "g") {
    return NumberField::create(std::move(minpoly), std::move(symbol));
}

inline FE nf_inv(const NFPtr& k, const FE& a) { return inv(a.promote(k)); }

} // namespace mm

#endif
