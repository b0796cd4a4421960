#include "hoexp/moments.hpp"

#include <array>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>

#include "hoexp/errors.hpp"

namespace hoexp::moments {

namespace {

using density::ExpectationResult;
using density::LocationDensity;

FunctionalValue as_functional(const ExpectationResult& r, const char* what) {
    if (!std::isfinite(r.value)) {
        throw NumericError(std::string(what) + " came out non-finite");
    }
    return {r.value, r.error};
}

// Runs the expectations concurrently; any exception is rethrown once.
std::vector<FunctionalValue> expect_all(
    const LocationDensity& d, const std::vector<std::function<double(double)>>& integrands,
    const std::vector<const char*>& labels) {
    std::vector<FunctionalValue> out(integrands.size());
    std::exception_ptr failure = nullptr;
    const int count = static_cast<int>(integrands.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        try {
            auto idx = static_cast<std::size_t>(i);
            out[idx] = as_functional(d.expectation(integrands[idx]), labels[idx]);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

FunctionalValue fisher_checked(const LocationDensity& d, double fisher_tol) {
    auto fisher = as_functional(d.expectation([&](double y) {
        double s = d.psi(1, y);
        return s * s;
    }),
                                "E psi_1^2");
    if (std::fabs(fisher.value - 1.0) > fisher_tol) {
        std::ostringstream msg;
        msg << "density is not normalized: Fisher information " << fisher.value
            << " differs from 1 by more than " << fisher_tol;
        throw NumericError(msg.str());
    }
    return fisher;
}

}  // namespace

algebra::MomentValues ScoreMoments::values() const {
    return {eta2.value, eta3.value, eta4.value, eta5.value, eta6.value, w.value};
}

double compute_w(double eta2, double eta3, double eta4) {
    return 1.0 - eta2 + eta4 / 3.0 + eta3 * eta3 / 4.0;
}

ScoreMoments compute_moments(const LocationDensity& d, double fisher_tol) {
    ScoreMoments m;
    m.fisher = fisher_checked(d, fisher_tol);

    auto pw = [&d](int i, int k) {
        return [&d, i, k](double y) {
            double s = d.psi(i, y);
            double v = s;
            for (int j = 1; j < k; ++j) v *= s;
            return v;
        };
    };
    auto r = expect_all(d,
                        {pw(2, 2), pw(1, 3), pw(1, 4), pw(1, 5),
                         [&d](double y) { return d.psi(2, y) * d.psi(3, y); }},
                        {"eta2", "eta3", "eta4", "eta5", "eta6"});
    m.eta2 = r[0];
    m.eta3 = r[1];
    m.eta4 = r[2];
    m.eta5 = r[3];
    m.eta6 = r[4];

    m.w.value = compute_w(m.eta2.value, m.eta3.value, m.eta4.value);
    m.w.error = m.eta2.error + m.eta4.error / 3.0 +
                (std::fabs(m.eta3.value) / 2.0 + m.eta3.error / 4.0) * m.eta3.error;
    return m;
}

IdentityReport verify_identity(const LocationDensity& d) {
    fisher_checked(d, 1e-6);
    auto r = expect_all(d,
                        {[&d](double y) {
                             double s = d.psi(1, y);
                             return s * s * d.psi(2, y);
                         },
                         [&d](double y) {
                             double s = d.psi(1, y);
                             return s * s * s * s;
                         }},
                        {"E psi_1^2 psi_2", "E psi_1^4"});
    IdentityReport rep;
    rep.lhs = r[0].value;
    rep.rhs = (2.0 / 3.0) * r[1].value;
    rep.error = r[0].error + (2.0 / 3.0) * r[1].error;
    rep.tolerance = 1e-6 + rep.error;
    rep.pass = std::fabs(rep.lhs - rep.rhs) <= rep.tolerance;
    return rep;
}

CauchySchwarzReport verify_cauchy_schwarz(const LocationDensity& d) {
    auto fisher = fisher_checked(d, 1e-6);
    auto psi1p = [&d](double y) {
        double s = d.psi(1, y);
        return d.psi(2, y) - s * s;
    };
    auto r = expect_all(d,
                        {[&d](double y) {
                             double s = d.psi(1, y);
                             return s * s * s;
                         },
                         psi1p,
                         [psi1p](double y) {
                             double v = psi1p(y);
                             return v * v;
                         },
                         [&d](double y) {
                             double s = d.psi(2, y);
                             return s * s;
                         },
                         [&d](double y) {
                             double s = d.psi(1, y);
                             return s * s * s * s;
                         }},
                        {"eta3", "E psi_1'", "E psi_1'^2", "eta2", "eta4"});
    const FunctionalValue &eta3 = r[0], &mean1p = r[1], &sq1p = r[2], &eta2 = r[3], &eta4 = r[4];

    CauchySchwarzReport rep;
    rep.mean_psi1p = mean1p.value;
    rep.var_psi1p = sq1p.value - mean1p.value * mean1p.value;
    rep.lhs = eta3.value * eta3.value;
    rep.rhs = 4.0 * fisher.value * rep.var_psi1p;

    double var_err = sq1p.error + 2.0 * std::fabs(mean1p.value) * mean1p.error;
    double rhs_err = 4.0 * (fisher.error * std::fabs(rep.var_psi1p) +
                            fisher.value * var_err);
    double lhs_err = 2.0 * std::fabs(eta3.value) * eta3.error;
    rep.margin = rep.rhs - rep.lhs;

    rep.w.value = compute_w(eta2.value, eta3.value, eta4.value);
    rep.w.error = eta2.error + eta4.error / 3.0 +
                  (std::fabs(eta3.value) / 2.0 + eta3.error / 4.0) * eta3.error;

    rep.tolerance = 1e-7 + lhs_err + rhs_err;
    rep.inequality_pass = rep.margin >= -rep.tolerance;
    rep.w_pass = rep.w.value <= 1e-7 + rep.w.error;
    return rep;
}

namespace {

nlohmann::json functional_json(const FunctionalValue& f, double tolerance, bool pass) {
    return {{"value", f.value}, {"error", f.error}, {"tolerance", tolerance}, {"pass", pass}};
}

}  // namespace

nlohmann::json to_json(const ScoreMoments& m) {
    nlohmann::json j;
    j["fisher"] = functional_json(m.fisher, 1e-6, std::fabs(m.fisher.value - 1.0) <= 1e-6);
    j["eta2"] = functional_json(m.eta2, m.eta2.error, m.eta2.value >= -m.eta2.error);
    j["eta3"] = functional_json(m.eta3, m.eta3.error, std::isfinite(m.eta3.value));
    double jensen_tol = 1e-6 + m.eta4.error;
    bool jensen = m.eta4.value >= m.fisher.value * m.fisher.value - jensen_tol;
    j["eta4"] = functional_json(m.eta4, jensen_tol, jensen);
    j["eta5"] = functional_json(m.eta5, m.eta5.error, std::isfinite(m.eta5.value));
    j["eta6"] = functional_json(m.eta6, m.eta6.error, std::isfinite(m.eta6.value));
    double w_tol = 1e-7 + m.w.error;
    j["W"] = functional_json(m.w, w_tol, m.w.value <= w_tol);
    return j;
}

nlohmann::json to_json(const IdentityReport& r) {
    return {{"lhs", r.lhs},
            {"rhs", r.rhs},
            {"difference", r.lhs - r.rhs},
            {"error", r.error},
            {"tolerance", r.tolerance},
            {"pass", r.pass}};
}

nlohmann::json to_json(const CauchySchwarzReport& r) {
    return {{"lhs", r.lhs},
            {"rhs", r.rhs},
            {"margin", r.margin},
            {"mean_psi1_prime", r.mean_psi1p},
            {"var_psi1_prime", r.var_psi1p},
            {"W", functional_json(r.w, 1e-7 + r.w.error, r.w_pass)},
            {"tolerance", r.tolerance},
            {"inequality_pass", r.inequality_pass},
            {"pass", r.inequality_pass && r.w_pass}};
}

}  // namespace hoexp::moments
