#include "hoexp/asympoly.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hoexp::algebra {

namespace {

const char* kSymbolNames[EtaMonomial::kSymbols] = {"eta2", "eta3", "eta4", "eta5", "eta6", "W"};

double pow_int(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

std::string order_label(int order) {
    switch (order) {
        case 0: return "n^0";
        case 1: return "n^-1/2";
        case 2: return "n^-1";
        case 3: return "n^-3/2";
        default: throw std::invalid_argument("bad stratum order");
    }
}

int parse_order_label(std::string_view s) {
    if (s == "n^0") return 0;
    if (s == "n^-1/2") return 1;
    if (s == "n^-1") return 2;
    if (s == "n^-3/2") return 3;
    throw std::invalid_argument("bad stratum label: " + std::string(s));
}

// The eta-expansion of the symbol W.
const EtaPoly& w_definition() {
    static const EtaPoly def = EtaPoly(Rational(1)) - EtaPoly(EtaMonomial::eta(2), Rational(1)) +
                               EtaPoly(EtaMonomial::eta(4), Rational(1, 3)) +
                               EtaPoly(EtaMonomial::eta(3) * EtaMonomial::eta(3), Rational(1, 4));
    return def;
}

}  // namespace

std::string to_string(const Rational& r) {
    const auto num = boost::multiprecision::numerator(r);
    const auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

Rational parse_rational(std::string_view text) {
    auto slash = text.find('/');
    using boost::multiprecision::cpp_int;
    try {
        if (slash == std::string_view::npos) {
            return Rational(cpp_int(std::string(text)));
        }
        cpp_int num{std::string(text.substr(0, slash))};
        cpp_int den{std::string(text.substr(slash + 1))};
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational: " + std::string(text));
    }
}

// ---------------------------------------------------------------------------
// EtaMonomial

EtaMonomial EtaMonomial::eta(int k) {
    if (k < 2 || k > 6) throw std::invalid_argument("eta index must be 2..6");
    EtaMonomial m;
    m.exp_[static_cast<std::size_t>(k - 2)] = 1;
    return m;
}

EtaMonomial EtaMonomial::w() {
    EtaMonomial m;
    m.exp_[5] = 1;
    return m;
}

int EtaMonomial::degree() const {
    int d = 0;
    for (auto e : exp_) d += e;
    return d;
}

EtaMonomial EtaMonomial::operator*(const EtaMonomial& o) const {
    EtaMonomial m;
    for (std::size_t i = 0; i < kSymbols; ++i) {
        m.exp_[i] = static_cast<std::uint8_t>(exp_[i] + o.exp_[i]);
    }
    return m;
}

std::strong_ordering EtaMonomial::operator<=>(const EtaMonomial& o) const {
    if (auto c = degree() <=> o.degree(); c != 0) return c;
    for (std::size_t i = 0; i < kSymbols; ++i) {
        // Higher power of an earlier symbol sorts first, so eta2 < eta3.
        if (auto c = o.exp_[i] <=> exp_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

double EtaMonomial::evaluate(const MomentValues& m) const {
    const double vals[kSymbols] = {m.eta2, m.eta3, m.eta4, m.eta5, m.eta6, m.w};
    double r = 1.0;
    for (std::size_t i = 0; i < kSymbols; ++i) r *= pow_int(vals[i], exp_[i]);
    return r;
}

std::string EtaMonomial::str() const {
    if (is_constant()) return "1";
    std::string s;
    for (std::size_t i = 0; i < kSymbols; ++i) {
        if (exp_[i] == 0) continue;
        if (!s.empty()) s += '*';
        s += kSymbolNames[i];
        if (exp_[i] > 1) s += "^" + std::to_string(int(exp_[i]));
    }
    return s;
}

// ---------------------------------------------------------------------------
// EtaPoly

EtaPoly::EtaPoly(Rational c) {
    if (c != 0) terms_.emplace(EtaMonomial{}, std::move(c));
}

EtaPoly::EtaPoly(EtaMonomial m, Rational c) {
    if (c != 0) terms_.emplace(m, std::move(c));
}

EtaPoly& EtaPoly::operator+=(const EtaPoly& o) {
    for (const auto& [m, c] : o.terms_) {
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }
    return *this;
}

EtaPoly& EtaPoly::operator-=(const EtaPoly& o) { return *this += -o; }

EtaPoly EtaPoly::operator+(const EtaPoly& o) const {
    EtaPoly r = *this;
    r += o;
    return r;
}

EtaPoly EtaPoly::operator-(const EtaPoly& o) const {
    EtaPoly r = *this;
    r -= o;
    return r;
}

EtaPoly EtaPoly::operator-() const {
    EtaPoly r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

EtaPoly EtaPoly::operator*(const EtaPoly& o) const {
    EtaPoly r;
    for (const auto& [m1, c1] : terms_) {
        for (const auto& [m2, c2] : o.terms_) {
            EtaPoly term(m1 * m2, c1 * c2);
            r += term;
        }
    }
    return r;
}

EtaPoly EtaPoly::operator*(const Rational& s) const {
    EtaPoly r;
    if (s == 0) return r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * s);
    return r;
}

bool EtaPoly::has_w() const {
    for (const auto& [m, c] : terms_) {
        if (m.w_exponent() > 0) return true;
    }
    return false;
}

EtaPoly EtaPoly::expand_w() const {
    EtaPoly r;
    for (const auto& [m, c] : terms_) {
        int k = m.w_exponent();
        if (k == 0) {
            r += EtaPoly(m, c);
            continue;
        }
        EtaMonomial stripped;
        for (int j = 2; j <= 6; ++j) {
            for (int e = 0; e < m.exponent(j - 2); ++e) stripped = stripped * EtaMonomial::eta(j);
        }
        EtaPoly expanded(stripped, c);
        for (int i = 0; i < k; ++i) expanded = expanded * w_definition();
        r += expanded;
    }
    return r;
}

double EtaPoly::evaluate(const MomentValues& m) const {
    double v = 0.0;
    for (const auto& [mono, c] : terms_) {
        v += c.convert_to<double>() * mono.evaluate(m);
    }
    return v;
}

std::string EtaPoly::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        Rational a = c;
        if (first) {
            if (a < 0) {
                s += '-';
                a = -a;
            }
            first = false;
        } else {
            s += (a < 0) ? " - " : " + ";
            if (a < 0) a = -a;
        }
        s += to_string(a);
        if (!m.is_constant()) s += "*" + m.str();
    }
    return s;
}

// ---------------------------------------------------------------------------
// AsymPoly

AsymPoly& AsymPoly::add_term(int order, int pow_v, int pow_u, EtaPoly c) {
    if (order < 0 || order > kMaxOrder) throw std::invalid_argument("stratum order out of range");
    if (pow_v < 0 || pow_u < 0 || pow_v + pow_u > kMaxPower) {
        throw std::invalid_argument("quantile-variable power out of range");
    }
    if (vars_ == VarSet::z && pow_u != 0) {
        throw std::invalid_argument("Zu power on a single-variable polynomial");
    }
    if (c.is_zero()) return *this;
    TermKey key{order, pow_v, pow_u};
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(key, std::move(c));
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
    return *this;
}

EtaPoly AsymPoly::coefficient(int order, int pow_v, int pow_u) const {
    auto it = terms_.find(TermKey{order, pow_v, pow_u});
    return it == terms_.end() ? EtaPoly{} : it->second;
}

AsymPoly AsymPoly::operator+(const AsymPoly& o) const {
    if (vars_ != o.vars_) throw std::invalid_argument("variable-set mismatch");
    AsymPoly r = *this;
    for (const auto& [k, c] : o.terms_) r.add_term(k.order, k.pow_v, k.pow_u, c);
    return r;
}

AsymPoly AsymPoly::operator-(const AsymPoly& o) const { return *this + (-o); }

AsymPoly AsymPoly::operator-() const {
    AsymPoly r(vars_);
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
    return r;
}

AsymPoly AsymPoly::scaled(const Rational& s) const {
    AsymPoly r(vars_);
    if (s == 0) return r;
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, c * s);
    return r;
}

AsymPoly AsymPoly::scaled(const EtaPoly& s) const {
    AsymPoly r(vars_);
    for (const auto& [k, c] : terms_) {
        EtaPoly prod = c * s;
        if (!prod.is_zero()) r.terms_.emplace(k, std::move(prod));
    }
    return r;
}

AsymPoly AsymPoly::stratum(int order) const {
    AsymPoly r(vars_);
    for (const auto& [k, c] : terms_) {
        if (k.order == order) r.terms_.emplace(k, c);
    }
    return r;
}

bool AsymPoly::has_w() const {
    for (const auto& [k, c] : terms_) {
        if (c.has_w()) return true;
    }
    return false;
}

AsymPoly AsymPoly::expand_w() const {
    AsymPoly r(vars_);
    for (const auto& [k, c] : terms_) r.add_term(k.order, k.pow_v, k.pow_u, c.expand_w());
    return r;
}

AsymPoly AsymPoly::substitute_symmetric() const {
    AsymPoly r(VarSet::z);
    for (const auto& [k, c] : terms_) {
        EtaPoly signed_c = (k.pow_u % 2 == 1) ? -c : c;
        r.add_term(k.order, k.pow_v + k.pow_u, 0, std::move(signed_c));
    }
    return r;
}

AsymPoly AsymPoly::renamed_to_u() const {
    if (vars_ != VarSet::zv_zu) throw std::invalid_argument("renamed_to_u needs Zv,Zu variables");
    AsymPoly r(VarSet::zv_zu);
    for (const auto& [k, c] : terms_) {
        if (k.pow_u != 0) throw std::invalid_argument("renamed_to_u input must be Zu-free");
        r.add_term(k.order, 0, k.pow_v, c);
    }
    return r;
}

double AsymPoly::evaluate(const MomentValues& m, double zv, double zu, double n) const {
    double total = 0.0;
    for (const auto& [k, c] : terms_) {
        double scale = std::pow(n, -0.5 * k.order);
        total += scale * c.evaluate(m) * pow_int(zv, k.pow_v) * pow_int(zu, k.pow_u);
    }
    return total;
}

std::string AsymPoly::str() const {
    std::ostringstream os;
    os << "poly vars=" << (vars_ == VarSet::zv_zu ? "Zv,Zu" : "Z") << " trunc=o(n^-3/2) {\n";
    for (const auto& [k, c] : terms_) {
        os << "  [" << order_label(k.order) << "] ";
        std::string zmon;
        const char* vname = (vars_ == VarSet::zv_zu) ? "Zv" : "Z";
        if (k.pow_v > 0) {
            zmon += vname;
            if (k.pow_v > 1) zmon += "^" + std::to_string(k.pow_v);
        }
        if (k.pow_u > 0) {
            if (!zmon.empty()) zmon += '*';
            zmon += "Zu";
            if (k.pow_u > 1) zmon += "^" + std::to_string(k.pow_u);
        }
        if (zmon.empty()) zmon = "1";
        os << zmon << ": " << c.str() << "\n";
    }
    os << "}";
    return os.str();
}

// ---------------------------------------------------------------------------
// Parser for the canonical rendering.

namespace {

class Cursor {
  public:
    explicit Cursor(std::string_view s) : s_(s) {}
    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }
    bool eat_word(std::string_view w) {
        skip_ws();
        if (s_.substr(pos_, w.size()) == w) {
            pos_ += w.size();
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool done() {
        skip_ws();
        return pos_ >= s_.size();
    }
    std::string_view take_while(bool (*pred)(char)) {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && pred(s_[pos_])) ++pos_;
        return s_.substr(start, pos_ - start);
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("AsymPoly parse error at offset " + std::to_string(pos_) +
                                    ": " + msg);
    }

  private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

Rational parse_unsigned_rational(Cursor& cur) {
    auto num = cur.take_while(is_digit);
    if (num.empty()) cur.fail("expected a rational coefficient");
    std::string text(num);
    if (cur.eat('/')) {
        auto den = cur.take_while(is_digit);
        if (den.empty()) cur.fail("expected denominator");
        text += "/" + std::string(den);
    }
    return parse_rational(text);
}

int parse_power_suffix(Cursor& cur) {
    if (!cur.eat('^')) return 1;
    auto digits = cur.take_while(is_digit);
    if (digits.empty()) cur.fail("expected exponent");
    return std::stoi(std::string(digits));
}

EtaPoly parse_eta_poly(Cursor& cur) {
    EtaPoly poly;
    bool first = true;
    while (true) {
        bool negative = false;
        if (first) {
            if (cur.eat('-')) negative = true;
        } else {
            if (cur.eat('+')) {
                negative = false;
            } else if (cur.eat('-')) {
                negative = true;
            } else {
                break;
            }
        }
        Rational c = parse_unsigned_rational(cur);
        if (negative) c = -c;
        EtaMonomial mono;
        while (cur.eat('*')) {
            auto name = cur.take_while(is_ident);
            bool matched = false;
            for (int i = 0; i < EtaMonomial::kSymbols; ++i) {
                if (name == kSymbolNames[i]) {
                    int p = parse_power_suffix(cur);
                    EtaMonomial f = (i < 5) ? EtaMonomial::eta(i + 2) : EtaMonomial::w();
                    for (int j = 0; j < p; ++j) mono = mono * f;
                    matched = true;
                    break;
                }
            }
            if (!matched) cur.fail("unknown symbol: " + std::string(name));
        }
        poly += EtaPoly(mono, c);
        first = false;
    }
    return poly;
}

}  // namespace

AsymPoly AsymPoly::parse(std::string_view text) {
    // Split into lines; the grammar is line-oriented.
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    std::size_t li = 0;
    auto next_nonempty = [&]() -> std::string_view {
        while (li < lines.size()) {
            Cursor probe(lines[li]);
            if (!probe.done()) return lines[li++];
            ++li;
        }
        throw std::invalid_argument("AsymPoly parse error: unexpected end of input");
    };

    Cursor header(next_nonempty());
    if (!header.eat_word("poly")) header.fail("expected 'poly'");
    if (!header.eat_word("vars=")) header.fail("expected 'vars='");
    VarSet vars;
    if (header.eat_word("Zv,Zu")) {
        vars = VarSet::zv_zu;
    } else if (header.eat_word("Z")) {
        vars = VarSet::z;
    } else {
        header.fail("expected 'Zv,Zu' or 'Z'");
    }
    if (!header.eat_word("trunc=o(n^-3/2)")) header.fail("expected truncation marker");
    header.expect('{');

    AsymPoly poly(vars);
    while (true) {
        std::string_view line = next_nonempty();
        Cursor cur(line);
        if (cur.eat('}')) break;
        cur.expect('[');
        auto label = cur.take_while([](char c) { return c != ']'; });
        cur.expect(']');
        int order = parse_order_label(label);
        int pow_v = 0, pow_u = 0;
        if (cur.eat('1')) {
            // constant z-monomial
        } else {
            while (true) {
                if (cur.eat_word("Zv") || (vars == VarSet::z && cur.eat_word("Z"))) {
                    pow_v += parse_power_suffix(cur);
                } else if (cur.eat_word("Zu")) {
                    pow_u += parse_power_suffix(cur);
                } else {
                    cur.fail("expected quantile-variable monomial");
                }
                if (!cur.eat('*')) break;
            }
        }
        cur.expect(':');
        EtaPoly coeff = parse_eta_poly(cur);
        if (!cur.done()) cur.fail("trailing characters");
        poly.add_term(order, pow_v, pow_u, std::move(coeff));
    }
    return poly;
}

// ---------------------------------------------------------------------------

FactorCheckResult factor_check(const AsymPoly& p, int order, const AsymPoly& pattern) {
    auto single_variable = [order](const AsymPoly& q) {
        if (q.vars() == VarSet::z) return true;
        for (const auto& [k, c] : q.terms()) {
            if (k.order == order && k.pow_u != 0) return false;
        }
        return true;
    };
    if (!single_variable(p) || !single_variable(pattern)) {
        throw std::invalid_argument("factor_check requires single-variable strata");
    }
    AsymPoly lhs = p.stratum(order).substitute_symmetric().expand_w();
    AsymPoly rhs = pattern.stratum(order).substitute_symmetric().expand_w();
    AsymPoly residual = lhs - rhs;
    return {residual.is_zero(), residual};
}

}  // namespace hoexp::algebra
