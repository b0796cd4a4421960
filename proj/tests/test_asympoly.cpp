#include "hoexp/asympoly.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"

using namespace hoexp::algebra;

namespace {

EtaPoly ep(int num, int den = 1) { return EtaPoly(Rational(num, den)); }

EtaPoly mono(EtaMonomial m, int num, int den = 1) { return EtaPoly(m, Rational(num, den)); }

}  // namespace

TEST_SUITE("asympoly") {

TEST_CASE("rational rendering round-trips") {
    for (const char* s : {"0", "1", "-1", "3/4", "-22/7", "123456789123456789/2"}) {
        CHECK(to_string(parse_rational(s)) == s);
    }
    CHECK(parse_rational("4/6") == Rational(2, 3));
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
}

TEST_CASE("monomial ordering is graded") {
    auto e2 = EtaMonomial::eta(2);
    auto e3 = EtaMonomial::eta(3);
    CHECK(EtaMonomial{} < e2);
    CHECK(e2 < e3);
    CHECK(e3 < e2 * e2);           // degree 1 before degree 2
    CHECK((e2 * e3).degree() == 2);
    CHECK((e3 * e3).str() == "eta3^2");
    CHECK((e2 * EtaMonomial::w()).str() == "eta2*W");
    CHECK(EtaMonomial{}.str() == "1");
}

TEST_CASE("coefficient ring identities") {
    EtaPoly a = ep(1, 2) + mono(EtaMonomial::eta(3), 2);
    EtaPoly b = mono(EtaMonomial::eta(2), -1, 3) + ep(5);
    EtaPoly c = mono(EtaMonomial::eta(4) * EtaMonomial::eta(3), 7, 4);
    CHECK((a + b) * c == a * c + b * c);
    CHECK(a - a == EtaPoly{});
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * ep(1) == a);
    CHECK((a * Rational(0)).is_zero());
    CHECK((a + (-a)).is_zero());
}

TEST_CASE("W expansion") {
    EtaPoly w = mono(EtaMonomial::w(), 1);
    EtaPoly expanded = w.expand_w();
    EtaPoly expect = ep(1) - mono(EtaMonomial::eta(2), 1) + mono(EtaMonomial::eta(4), 1, 3) +
                     mono(EtaMonomial::eta(3) * EtaMonomial::eta(3), 1, 4);
    CHECK(expanded == expect);
    CHECK(!expanded.has_w());
    CHECK((w * w).expand_w() == expect * expect);
    // Mixed: eta3 * W expands with the eta3 factor kept.
    EtaPoly mixed = mono(EtaMonomial::eta(3) * EtaMonomial::w(), 1, 48);
    CHECK(mixed.expand_w() == expect * mono(EtaMonomial::eta(3), 1, 48));
}

TEST_CASE("numeric evaluation agrees with the expanded form") {
    MomentValues m;
    m.eta2 = 1.8;
    m.eta3 = 0.4;
    m.eta4 = 2.9;
    m.w = 1.0 - m.eta2 + m.eta4 / 3.0 + m.eta3 * m.eta3 / 4.0;
    EtaPoly p = mono(EtaMonomial::eta(3) * EtaMonomial::w(), -5, 8) + ep(2, 7) +
                mono(EtaMonomial::eta(2) * EtaMonomial::eta(2), 3);
    CHECK(p.evaluate(m) == doctest::Approx(p.expand_w().evaluate(m)).epsilon(1e-14));
}

TEST_CASE("eta-poly rendering") {
    EtaPoly p = mono(EtaMonomial::eta(2), -1, 8) + ep(1, 2) +
                mono(EtaMonomial::eta(3) * EtaMonomial::eta(3), 5, 72);
    CHECK(p.str() == "1/2 - 1/8*eta2 + 5/72*eta3^2");
    CHECK(EtaPoly{}.str() == "0");
    CHECK((-ep(3, 4)).str() == "-3/4");
}

TEST_CASE("add_term merges and validates") {
    AsymPoly p;
    p.add_term(1, 2, 0, ep(1, 3));
    p.add_term(1, 2, 0, ep(2, 3));
    CHECK(p.coefficient(1, 2) == ep(1));
    p.add_term(1, 2, 0, ep(-1));
    CHECK(p.is_zero());

    CHECK_THROWS_AS(p.add_term(4, 0, 0, ep(1)), std::invalid_argument);
    CHECK_THROWS_AS(p.add_term(0, 3, 2, ep(1)), std::invalid_argument);
    AsymPoly q(VarSet::z);
    CHECK_THROWS_AS(q.add_term(0, 1, 1, ep(1)), std::invalid_argument);
}

TEST_CASE("symmetric substitution maps Zu to -Z") {
    AsymPoly p;
    p.add_term(0, 1, 0, ep(1));
    p.add_term(0, 0, 1, ep(1));
    CHECK(p.substitute_symmetric().is_zero());  // Zv + Zu -> Z - Z

    AsymPoly q;
    q.add_term(2, 2, 1, mono(EtaMonomial::eta(3), 1, 6));
    auto s = q.substitute_symmetric();
    CHECK(s.vars() == VarSet::z);
    CHECK(s.coefficient(2, 3) == mono(EtaMonomial::eta(3), -1, 6));
}

TEST_CASE("renaming Zv to Zu") {
    AsymPoly p;
    p.add_term(1, 3, 0, ep(2));
    auto r = p.renamed_to_u();
    CHECK(r.coefficient(1, 0, 3) == ep(2));
    p.add_term(0, 0, 1, ep(1));
    CHECK_THROWS_AS(p.renamed_to_u(), std::invalid_argument);
}

TEST_CASE("evaluation applies the n^(-k/2) ladder") {
    AsymPoly p;
    p.add_term(0, 1, 0, ep(1));
    p.add_term(1, 2, 0, mono(EtaMonomial::eta(3), 1, 2));
    p.add_term(3, 0, 2, ep(-1, 4));
    MomentValues m;
    m.eta3 = 0.6;
    const double zv = 1.3, zu = -0.7, n = 50.0;
    double expect = zv + std::pow(n, -0.5) * 0.5 * 0.6 * zv * zv +
                    std::pow(n, -1.5) * (-0.25) * zu * zu;
    CHECK(p.evaluate(m, zv, zu, n) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("rendering round-trips through the parser") {
    AsymPoly p;
    p.add_term(0, 1, 0, ep(1));
    p.add_term(1, 2, 0, mono(EtaMonomial::eta(3), 1, 12));
    p.add_term(2, 3, 0, ep(-1, 8) + mono(EtaMonomial::eta(2), 1, 6) +
                            mono(EtaMonomial::eta(3) * EtaMonomial::eta(3), -1, 72));
    p.add_term(3, 2, 2, mono(EtaMonomial::eta(3) * EtaMonomial::w(), -1, 48));
    p.add_term(3, 0, 0, mono(EtaMonomial::w(), 1, 8));
    auto q = AsymPoly::parse(p.str());
    CHECK(q == p);
    CHECK(q.str() == p.str());

    AsymPoly z(VarSet::z);
    z.add_term(2, 4, 0, mono(EtaMonomial::eta(3) * EtaMonomial::w(), 1, 48));
    z.add_term(2, 2, 0, mono(EtaMonomial::eta(3) * EtaMonomial::w(), -1, 12));
    z.add_term(0, 0, 0, ep(1, 2));
    CHECK(AsymPoly::parse(z.str()) == z);

    CHECK_THROWS_AS(AsymPoly::parse("poly vars=Q trunc=o(n^-3/2) {\n}"),
                    std::invalid_argument);
    CHECK_THROWS_AS(AsymPoly::parse("poly vars=Z trunc=o(n^-3/2) {\n  [n^-9] Z: 1\n}"),
                    std::invalid_argument);
}

TEST_CASE("factor check recognizes an exact W-factored stratum") {
    // Stratum 2 of the candidate: (eta3/48) * W * (Z^4 - 4 Z^2), fully expanded.
    EtaPoly scale = mono(EtaMonomial::eta(3), 1, 48).expand_w() *
                    mono(EtaMonomial::w(), 1).expand_w();
    AsymPoly candidate(VarSet::z);
    candidate.add_term(2, 4, 0, scale);
    candidate.add_term(2, 2, 0, scale * Rational(-4));
    candidate.add_term(1, 1, 0, ep(9));  // unrelated stratum, ignored by the check

    AsymPoly pattern(VarSet::z);
    EtaPoly w48 = mono(EtaMonomial::eta(3) * EtaMonomial::w(), 1, 48);
    pattern.add_term(2, 4, 0, w48);
    pattern.add_term(2, 2, 0, w48 * Rational(-4));

    auto ok = factor_check(candidate, 2, pattern);
    CHECK(ok.matches);
    CHECK(ok.residual.is_zero());

    AsymPoly off = candidate;
    off.add_term(2, 2, 0, ep(1, 1000));
    auto bad = factor_check(off, 2, pattern);
    CHECK(!bad.matches);
    CHECK(bad.residual.coefficient(2, 2) == ep(1, 1000));

    AsymPoly two_var;
    two_var.add_term(2, 1, 1, ep(1));
    CHECK_THROWS_AS(factor_check(two_var, 2, pattern), std::invalid_argument);
}

}  // TEST_SUITE
