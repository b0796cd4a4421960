#pragma once

// Exact-rational graded ring for truncated asymptotic expansions.
//
// An AsymPoly is a sum over strata n^{-k/2}, k = 0..3, of polynomials in the
// formal quantile variables Zv = Phi^{-1}(v), Zu = Phi^{-1}(u) (or a single Z
// after the symmetric substitution v = 1-alpha/2, u = alpha/2). Every
// coefficient is an exact-rational linear combination of monomials in the
// score functionals eta2..eta6 and the symbol W = 1 - eta2 + eta4/3 + eta3^2/4.
// All arithmetic is exact; floats enter only in evaluate().

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace hoexp::algebra {

using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Rational& r);          // "p" or "p/q"
Rational parse_rational(std::string_view text);

// Numeric substitutions for the formal symbols.
struct MomentValues {
    double eta2 = 0, eta3 = 0, eta4 = 0, eta5 = 0, eta6 = 0, w = 0;
};

class EtaMonomial {
  public:
    static constexpr int kSymbols = 6;  // eta2, eta3, eta4, eta5, eta6, W

    EtaMonomial() = default;  // the constant monomial
    static EtaMonomial eta(int k);  // k in 2..6
    static EtaMonomial w();

    int exponent(int symbol) const { return exp_[static_cast<std::size_t>(symbol)]; }
    int degree() const;
    bool is_constant() const { return degree() == 0; }
    int w_exponent() const { return exp_[5]; }

    EtaMonomial operator*(const EtaMonomial& o) const;
    // Graded lexicographic: by total degree, then by exponent vector.
    std::strong_ordering operator<=>(const EtaMonomial& o) const;
    bool operator==(const EtaMonomial& o) const = default;

    double evaluate(const MomentValues& m) const;
    std::string str() const;  // "eta3^2*W"; "1" for the constant

  private:
    std::array<std::uint8_t, kSymbols> exp_{};
};

// Exact-rational linear combination of EtaMonomials (the coefficient ring).
class EtaPoly {
  public:
    EtaPoly() = default;
    EtaPoly(Rational c);  // NOLINT: implicit constant lift
    EtaPoly(int c) : EtaPoly(Rational(c)) {}
    EtaPoly(EtaMonomial m, Rational c);

    bool is_zero() const { return terms_.empty(); }
    const std::map<EtaMonomial, Rational>& terms() const { return terms_; }

    EtaPoly& operator+=(const EtaPoly& o);
    EtaPoly& operator-=(const EtaPoly& o);
    EtaPoly operator+(const EtaPoly& o) const;
    EtaPoly operator-(const EtaPoly& o) const;
    EtaPoly operator-() const;
    EtaPoly operator*(const EtaPoly& o) const;
    EtaPoly operator*(const Rational& r) const;
    bool operator==(const EtaPoly& o) const = default;

    // Substitute W = 1 - eta2 + eta4/3 + eta3^2/4 (to any power).
    EtaPoly expand_w() const;
    bool has_w() const;

    double evaluate(const MomentValues& m) const;
    std::string str() const;  // deterministic; "0" when empty

  private:
    std::map<EtaMonomial, Rational> terms_;  // canonical: no zero coefficients
};

enum class VarSet { zv_zu, z };

struct TermKey {
    int order;  // stratum k for n^{-k/2}
    int pow_v;  // Zv (or Z) exponent
    int pow_u;  // Zu exponent; always 0 for VarSet::z
    std::strong_ordering operator<=>(const TermKey& o) const {
        if (auto c = order <=> o.order; c != 0) return c;
        if (auto c = o.pow_v <=> pow_v; c != 0) return c;  // descending
        return o.pow_u <=> pow_u;                          // descending
    }
    bool operator==(const TermKey& o) const = default;
};

class AsymPoly {
  public:
    static constexpr int kMaxOrder = 3;  // truncation marker: + o(n^{-3/2})
    static constexpr int kMaxPower = 4;

    explicit AsymPoly(VarSet vars = VarSet::zv_zu) : vars_(vars) {}

    VarSet vars() const { return vars_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<TermKey, EtaPoly>& terms() const { return terms_; }

    // Adds c * Zv^pow_v * Zu^pow_u at stratum `order`; validates the bounds.
    AsymPoly& add_term(int order, int pow_v, int pow_u, EtaPoly c);
    EtaPoly coefficient(int order, int pow_v, int pow_u = 0) const;

    AsymPoly operator+(const AsymPoly& o) const;
    AsymPoly operator-(const AsymPoly& o) const;
    AsymPoly operator-() const;
    AsymPoly scaled(const Rational& r) const;
    AsymPoly scaled(const EtaPoly& c) const;
    bool operator==(const AsymPoly& o) const = default;

    AsymPoly stratum(int order) const;
    AsymPoly expand_w() const;
    bool has_w() const;

    // Zv^a * Zu^b -> (-1)^b * Z^(a+b). On a z-variable input this is the
    // identity; on a Zu-free input it renames Zv to Z.
    AsymPoly substitute_symmetric() const;

    // Rename Zv^a -> Zu^a; input must be Zu-free (e.g. the G-expansion, which
    // is a polynomial in Zv only).
    AsymPoly renamed_to_u() const;

    // Numeric value: sum over strata of n^{-k/2} * coeff(m) * zv^a * zu^b.
    // For VarSet::z, zv supplies the value of Z and zu is ignored.
    double evaluate(const MomentValues& m, double zv, double zu, double n) const;

    std::string str() const;
    static AsymPoly parse(std::string_view text);

  private:
    VarSet vars_;
    std::map<TermKey, EtaPoly> terms_;  // canonical: no zero coefficients
};

struct FactorCheckResult {
    bool matches = false;
    AsymPoly residual;  // eta-expanded, empty when matches
};

// Exact test that the order-k stratum of p equals the order-k stratum of
// `pattern` once W is expanded on both sides. Requires the tested stratum to
// be single-variable.
FactorCheckResult factor_check(const AsymPoly& p, int order, const AsymPoly& pattern);

}  // namespace hoexp::algebra
