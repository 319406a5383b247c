#ifndef MM_PARSE_HPP
#define MM_PARSE_HPP

#include <optional>
#include <sstream>
#include <string>

#include "projline.hpp"

// Text formats used by the command line and by config files.
//
//   fields:    "-2,0,1" lists the minimal polynomial lowest degree first
//              (x^2 - 2 here); a single entry means the rational field.
//   divisors:  "3*(t) + 1*(t^2-2) + 2*inf@0" with an optional component
//              suffix @i (default 0); "0" or "" is the empty divisor.
//   maps:      "(t^2)/(1)", numerator and denominator in parentheses.
//
// Polynomial entries are expressions in t with rational coefficients and the
// field generator g; all errors carry the offending position.

namespace mm {

namespace detail {

struct Cursor {
    const std::string& s;
    size_t pos = 0;

    void skip() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool done() {
        skip();
        return pos >= s.size();
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("position " + std::to_string(pos) + ": " + what);
    }
};

inline Rat parse_rat(Cursor& c) {
    c.skip();
    size_t start = c.pos;
    if (c.pos < c.s.size() && (c.s[c.pos] == '+' || c.s[c.pos] == '-')) ++c.pos;
    size_t digits = c.pos;
    while (c.pos < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.pos]))) ++c.pos;
    if (c.pos == digits) c.fail("expected a number");
    if (c.pos < c.s.size() && c.s[c.pos] == '/') {
        ++c.pos;
        size_t den = c.pos;
        while (c.pos < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.pos]))) ++c.pos;
        if (c.pos == den) c.fail("expected a denominator");
    }
    Rat r(c.s.substr(start, c.pos - start));
    r.canonicalize();
    return r;
}

// expr := term (('+'|'-') term)*, term := factor ('*' factor)*,
// factor := atom ('^' uint)?, atom := number | 't' | 'g' | '(' expr ')' | '-' factor
inline PolyV<FE> parse_poly_expr(Cursor& c, const NFPtr& k);

inline PolyV<FE> parse_poly_factor(Cursor& c, const NFPtr& k) {
    PolyV<FE> a;
    char ch = c.peek();
    if (ch == '(') {
        c.eat('(');
        a = parse_poly_expr(c, k);
        if (!c.eat(')')) c.fail("expected ')'");
    } else if (ch == 't') {
        ++c.pos;
        a = {FE(0), FE(Rat(1)).promote(k)};
    } else if (ch == 'g') {
        ++c.pos;
        if (k->deg() < 2) c.fail("'g' needs a nontrivial field");
        a = {FE::gen(k)};
    } else if (ch == '-') {
        c.eat('-');
        return p_neg(parse_poly_factor(c, k));
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
        a = {FE(parse_rat(c)).promote(k)};
        p_norm(a);
    } else {
        c.fail("expected a polynomial atom");
    }
    if (c.peek() == '^') {
        c.eat('^');
        c.skip();
        size_t start = c.pos;
        while (c.pos < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.pos]))) ++c.pos;
        if (c.pos == start) c.fail("expected an exponent");
        a = p_pow(a, static_cast<unsigned>(std::stoul(c.s.substr(start, c.pos - start))));
    }
    return a;
}

inline PolyV<FE> parse_poly_term(Cursor& c, const NFPtr& k) {
    PolyV<FE> a = parse_poly_factor(c, k);
    while (c.peek() == '*') {
        c.eat('*');
        a = p_mul(a, parse_poly_factor(c, k));
    }
    return a;
}

inline PolyV<FE> parse_poly_expr(Cursor& c, const NFPtr& k) {
    PolyV<FE> a = parse_poly_term(c, k);
    for (;;) {
        char ch = c.peek();
        if (ch == '+') {
            c.eat('+');
            a = p_add(a, parse_poly_term(c, k));
        } else if (ch == '-') {
            c.eat('-');
            a = p_sub(a, parse_poly_term(c, k));
        } else {
            return a;
        }
    }
}

inline int parse_uint(Cursor& c) {
    c.skip();
    size_t start = c.pos;
    while (c.pos < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.pos]))) ++c.pos;
    if (c.pos == start) c.fail("expected an integer");
    return std::stoi(c.s.substr(start, c.pos - start));
}

} // namespace detail

inline NFPtr parse_field(const std::string& spec, const std::string& gen_name = "g") {
    detail::Cursor c{spec};
    std::vector<Rat> coeffs;
    if (!c.done()) {
        coeffs.push_back(detail::parse_rat(c));
        while (c.eat(',')) coeffs.push_back(detail::parse_rat(c));
    }
    if (!c.done()) c.fail("trailing input after the field coefficients");
    if (coeffs.empty()) c.fail("empty field specification");
    if (coeffs.size() == 1) return nf_create({Rat(0), Rat(1)}, gen_name);
    return nf_create(coeffs, gen_name);
}

// One divisor term: [mult '*'] ( '(' poly ')' | 'inf' ) ['@' component]
inline Divisor parse_divisor(const std::string& text, const NFPtr& k) {
    detail::Cursor c{text};
    std::vector<std::pair<Place, int>> terms;
    if (c.done()) return Divisor();
    if (c.peek() == '0') {
        ++c.pos;
        if (!c.done()) c.fail("trailing input after the zero divisor");
        return Divisor();
    }
    for (;;) {
        int mult = 1;
        c.skip();
        if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
            mult = detail::parse_uint(c);
            if (!c.eat('*')) c.fail("expected '*' after the multiplicity");
        }
        size_t at = c.pos;
        Place p;
        c.skip();
        if (c.s.compare(c.pos, 3, "inf") == 0) {
            c.pos += 3;
            p = Place::infinity();
        } else if (c.eat('(')) {
            PolyV<FE> q = detail::parse_poly_expr(c, k);
            if (!c.eat(')')) c.fail("expected ')'");
            if (p_deg(q) < 1) {
                c.pos = at;
                c.fail("place polynomial must be nonconstant");
            }
            if (!is_one(q.back())) {
                c.pos = at;
                c.fail("place polynomial is not monic");
            }
            if (!p_is_squarefree(q)) {
                c.pos = at;
                c.fail("place polynomial is not squarefree");
            }
            p = Place::finite(std::move(q));
        } else {
            c.fail("expected '(' or 'inf'");
        }
        if (c.eat('@')) p.component = detail::parse_uint(c);
        terms.emplace_back(p, mult);
        if (c.done()) break;
        if (!c.eat('+')) c.fail("expected '+' between divisor terms");
    }
    return Divisor(std::move(terms));
}

// "(num)/(den)" with an optional component annotation "@src->dst"
inline RationalMap parse_map(const std::string& text, const NFPtr& k) {
    detail::Cursor c{text};
    if (!c.eat('(')) c.fail("expected '(' starting the numerator");
    PolyV<FE> num = detail::parse_poly_expr(c, k);
    if (!c.eat(')')) c.fail("expected ')'");
    if (!c.eat('/')) c.fail("expected '/'");
    if (!c.eat('(')) c.fail("expected '(' starting the denominator");
    PolyV<FE> den = detail::parse_poly_expr(c, k);
    if (!c.eat(')')) c.fail("expected ')'");
    int src = 0, dst = 0;
    if (c.eat('@')) {
        src = detail::parse_uint(c);
        if (!(c.eat('-') && c.eat('>'))) c.fail("expected '->'");
        dst = detail::parse_uint(c);
    }
    if (!c.done()) c.fail("trailing input after the map");
    if (p_is_zero(den)) c.fail("zero denominator");
    return RationalMap(RF(std::move(num), std::move(den)), src, dst);
}

// Inverses of the parsers, used by reports and error witnesses.

inline std::string format_poly(const PolyV<FE>& q) {
    if (q.empty()) return "0";
    std::ostringstream o;
    bool first = true;
    for (size_t i = q.size(); i-- > 0;) {
        if (is_zero(q[i])) continue;
        std::string cs = q[i].str();
        if (!first) {
            if (cs.size() && cs[0] == '-' && cs.find_first_of("+-", 1) == std::string::npos) {
                o << " - ";
                cs = cs.substr(1);
            } else {
                o << " + ";
            }
        }
        bool unit = (cs == "1");
        bool need_paren = cs.find_first_of("+-", 1) != std::string::npos;
        if (i == 0) {
            o << (need_paren ? "(" + cs + ")" : cs);
        } else {
            if (!unit) o << (need_paren ? "(" + cs + ")" : cs) << "*";
            o << "t";
            if (i > 1) o << "^" << i;
        }
        first = false;
    }
    return first ? "0" : o.str();
}

inline std::string format_divisor(const Divisor& d) {
    if (d.empty()) return "0";
    std::ostringstream o;
    bool first = true;
    for (const auto& [p, m] : d.terms()) {
        if (!first) o << " + ";
        o << m << "*";
        if (p.infinite)
            o << "inf";
        else
            o << "(" << format_poly(p.poly) << ")";
        if (p.component != 0) o << "@" << p.component;
        first = false;
    }
    return o.str();
}

inline std::string format_map(const RationalMap& f) {
    return "(" + format_poly(f.f.num()) + ")/(" + format_poly(f.f.den()) + ")";
}

inline std::string format_triple(const ModulusTriple& T) {
    return "Y = " + format_divisor(T.Y) + "; Z = " + format_divisor(T.Z);
}

} // namespace mm

#endif
