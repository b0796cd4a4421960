#include "hoexp/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/owens_t.hpp>

#include "hoexp/errors.hpp"
#include "hoexp/normal.hpp"
#include "hoexp/quadrature.hpp"

namespace hoexp::density {

namespace {

constexpr double kPsiFloor = 1e-300;

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

void check_order(int i) {
    if (i < 1 || i > 3) throw NumericError("derivative order must be 1, 2 or 3");
}

// ---------------------------------------------------------------------------

class GaussianFamily final : public Family {
  public:
    GaussianFamily(double mean, double sigma) : mean_(mean), sigma_(sigma) {
        if (!(sigma > 0) || !std::isfinite(mean)) throw ConfigError("gaussian: sigma must be > 0");
    }
    std::string name() const override { return "gaussian(" + fmt(mean_) + "," + fmt(sigma_) + ")"; }
    double pdf(double x) const override { return normal_pdf((x - mean_) / sigma_) / sigma_; }
    double psi(int i, double x) const override {
        check_order(i);
        double u = (x - mean_) / sigma_;
        switch (i) {
            case 1: return -u / sigma_;
            case 2: return (u * u - 1.0) / (sigma_ * sigma_);
            default: return (3.0 * u - u * u * u) / (sigma_ * sigma_ * sigma_);
        }
    }
    double cdf(double x) const override { return normal_cdf((x - mean_) / sigma_); }
    std::optional<double> quantile_closed(double p) const override {
        return mean_ + sigma_ * inv_normal_cdf(p);
    }
    std::pair<double, double> support_hint(double tail_cut) const override {
        double r = std::sqrt(-2.0 * std::log(tail_cut)) + 1.0;
        return {mean_ - r * sigma_, mean_ + r * sigma_};
    }

  private:
    double mean_, sigma_;
};

class LogisticFamily final : public Family {
  public:
    LogisticFamily(double location, double scale) : loc_(location), s_(scale) {
        if (!(scale > 0) || !std::isfinite(location)) {
            throw ConfigError("logistic: scale must be > 0");
        }
    }
    std::string name() const override { return "logistic(" + fmt(loc_) + "," + fmt(s_) + ")"; }
    double pdf(double x) const override {
        double t = std::fabs(x - loc_) / s_;
        double e = std::exp(-t);
        double denom = 1.0 + e;
        return e / (s_ * denom * denom);
    }
    double psi(int i, double x) const override {
        check_order(i);
        double F = cdf(x);
        double q = 1.0 - 2.0 * F;
        switch (i) {
            case 1: return q / s_;
            case 2: return (1.0 - 6.0 * F + 6.0 * F * F) / (s_ * s_);
            default: return q * (q * q - 8.0 * F * (1.0 - F)) / (s_ * s_ * s_);
        }
    }
    double cdf(double x) const override {
        double t = (x - loc_) / s_;
        if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
        double e = std::exp(t);
        return e / (1.0 + e);
    }
    std::optional<double> quantile_closed(double p) const override {
        return loc_ + s_ * (std::log(p) - std::log1p(-p));
    }
    std::pair<double, double> support_hint(double tail_cut) const override {
        double r = std::log(4.0 / tail_cut) + 2.0;
        return {loc_ - r * s_, loc_ + r * s_};
    }

  private:
    double loc_, s_;
};

class StudentTFamily final : public Family {
  public:
    StudentTFamily(double nu, double center, double sigma)
        : nu_(nu), c_(center), sigma_(sigma), dist_(nu) {
        if (!(sigma > 0) || !std::isfinite(center)) throw ConfigError("student-t: sigma must be > 0");
        if (!(nu > 4.0)) {
            throw ConfigError("student-t: nu must exceed 4 so the score moments used by the "
                              "expansions are regular (got nu=" + fmt(nu) + ")");
        }
    }
    std::string name() const override {
        return "student-t(" + fmt(nu_) + "," + fmt(c_) + "," + fmt(sigma_) + ")";
    }
    double pdf(double x) const override {
        return boost::math::pdf(dist_, (x - c_) / sigma_) / sigma_;
    }
    double psi(int i, double x) const override {
        check_order(i);
        double u = (x - c_) / sigma_;
        double d = nu_ + u * u;
        switch (i) {
            case 1: return -(nu_ + 1.0) * u / (sigma_ * d);
            case 2:
                return (nu_ + 1.0) * ((nu_ + 2.0) * u * u - nu_) /
                       (sigma_ * sigma_ * d * d);
            default:
                return u * (nu_ + 1.0) * (nu_ + 3.0) * (3.0 * nu_ - (nu_ + 2.0) * u * u) /
                       (sigma_ * sigma_ * sigma_ * d * d * d);
        }
    }
    double cdf(double x) const override { return boost::math::cdf(dist_, (x - c_) / sigma_); }
    std::optional<double> quantile_closed(double p) const override {
        return c_ + sigma_ * boost::math::quantile(dist_, p);
    }
    std::pair<double, double> support_hint(double tail_cut) const override {
        double r = std::sqrt(nu_ * (std::pow(tail_cut, -2.0 / (nu_ + 1.0)) - 1.0)) * 1.1 + 1.0;
        return {c_ - r * sigma_, c_ + r * sigma_};
    }

  private:
    double nu_, c_, sigma_;
    boost::math::students_t_distribution<double> dist_;
};

class SkewNormalFamily final : public Family {
  public:
    SkewNormalFamily(double lambda, double location, double sigma)
        : lambda_(lambda), loc_(location), sigma_(sigma) {
        if (!(sigma > 0) || !std::isfinite(lambda) || !std::isfinite(location)) {
            throw ConfigError("skew-normal: sigma must be > 0 and parameters finite");
        }
    }
    std::string name() const override {
        return "skew-normal(" + fmt(lambda_) + "," + fmt(loc_) + "," + fmt(sigma_) + ")";
    }
    double pdf(double x) const override {
        double u = (x - loc_) / sigma_;
        return 2.0 * normal_pdf(u) * normal_cdf(lambda_ * u) / sigma_;
    }
    double psi(int i, double x) const override {
        check_order(i);
        double u = (x - loc_) / sigma_;
        double v = lambda_ * u;
        double r = normal_pdf_over_cdf(v);
        double l1 = -u + lambda_ * r;
        if (i == 1) return l1 / sigma_;
        double rp = -(v * r + r * r);
        double l2 = -1.0 + lambda_ * lambda_ * rp;
        if (i == 2) return (l2 + l1 * l1) / (sigma_ * sigma_);
        double rpp = r * ((v + 2.0 * r) * (v + r) - 1.0);
        double l3 = lambda_ * lambda_ * lambda_ * rpp;
        return (l3 + 3.0 * l1 * l2 + l1 * l1 * l1) / (sigma_ * sigma_ * sigma_);
    }
    double cdf(double x) const override {
        double u = (x - loc_) / sigma_;
        return normal_cdf(u) - 2.0 * boost::math::owens_t(u, lambda_);
    }
    std::pair<double, double> support_hint(double tail_cut) const override {
        // pdf <= 2 phi(u) and pdf(0) = phi(0), so pdf/max <= 2 exp(-u^2/2).
        double r = std::sqrt(-2.0 * std::log(tail_cut / 2.0)) + 1.0;
        return {loc_ - r * sigma_, loc_ + r * sigma_};
    }

  private:
    double lambda_, loc_, sigma_;
};

class MixtureFamily final : public Family {
  public:
    explicit MixtureFamily(std::vector<std::pair<std::shared_ptr<const Family>, double>> comps)
        : comps_(std::move(comps)) {
        if (comps_.size() < 2) throw ConfigError("mixture: needs at least two components");
        double total = 0.0;
        for (const auto& [fam, w] : comps_) {
            if (!fam) throw ConfigError("mixture: null component");
            if (!(w > 0)) throw ConfigError("mixture: weights must be positive");
            total += w;
        }
        if (std::fabs(total - 1.0) > 1e-9) {
            throw ConfigError("mixture: weights must sum to 1 (got " + fmt(total) + ")");
        }
    }
    std::string name() const override {
        std::string s = "mixture(";
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            if (i) s += "+";
            s += fmt(comps_[i].second) + "*" + comps_[i].first->name();
        }
        return s + ")";
    }
    double pdf(double x) const override {
        double v = 0.0;
        for (const auto& [fam, w] : comps_) v += w * fam->pdf(x);
        return v;
    }
    double psi(int i, double x) const override {
        check_order(i);
        // g^(i) = sum_j w_j psi_i,j * g_j, exactly (no finite differences).
        double num = 0.0, den = 0.0;
        for (const auto& [fam, w] : comps_) {
            double p = fam->pdf(x);
            den += w * p;
            if (p > 0.0) num += w * fam->psi(i, x) * p;
        }
        return num / den;
    }
    double cdf(double x) const override {
        double v = 0.0;
        for (const auto& [fam, w] : comps_) v += w * fam->cdf(x);
        return v;
    }
    std::pair<double, double> support_hint(double tail_cut) const override {
        // Conservative: each component's own hint, widened by the weight
        // (a weight-w component clears w*tail_cut at its own cut level).
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& [fam, w] : comps_) {
            auto [a, b] = fam->support_hint(tail_cut * std::min(1.0, w));
            lo = std::min(lo, a);
            hi = std::max(hi, b);
        }
        return {lo, hi};
    }

  private:
    std::vector<std::pair<std::shared_ptr<const Family>, double>> comps_;
};

class FdFamily final : public Family {
  public:
    explicit FdFamily(std::shared_ptr<const Family> base) : base_(std::move(base)) {
        if (!base_) throw ConfigError("fd fallback: null base density");
    }
    std::string name() const override { return base_->name() + "+fd"; }
    double pdf(double x) const override { return base_->pdf(x); }
    double psi(int i, double x) const override {
        check_order(i);
        double g = base_->pdf(x);
        if (g < kPsiFloor) throw NumericError("fd psi: density underflow at x=" + fmt(x));
        auto f = [this](double t) { return base_->pdf(t); };
        const double eps = std::numeric_limits<double>::epsilon();
        double scale = 1.0 + std::fabs(x);
        if (i == 1) {
            double h = std::cbrt(eps) * scale;
            return (f(x + h) - f(x - h)) / (2.0 * h) / g;
        }
        if (i == 2) {
            double h = std::pow(eps, 0.25) * scale;
            return (f(x + h) - 2.0 * g + f(x - h)) / (h * h) / g;
        }
        double h = std::pow(eps, 0.2) * scale;
        return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) /
               (2.0 * h * h * h) / g;
    }
    double cdf(double x) const override { return base_->cdf(x); }
    std::optional<double> quantile_closed(double p) const override {
        return base_->quantile_closed(p);
    }
    std::pair<double, double> support_hint(double tail_cut) const override {
        return base_->support_hint(tail_cut);
    }
    bool closed_form_derivatives() const override { return false; }

  private:
    std::shared_ptr<const Family> base_;
};

}  // namespace

std::shared_ptr<const Family> make_gaussian(double mean, double sigma) {
    return std::make_shared<GaussianFamily>(mean, sigma);
}
std::shared_ptr<const Family> make_logistic(double location, double scale) {
    return std::make_shared<LogisticFamily>(location, scale);
}
std::shared_ptr<const Family> make_student_t(double nu, double center, double sigma) {
    return std::make_shared<StudentTFamily>(nu, center, sigma);
}
std::shared_ptr<const Family> make_skew_normal(double lambda, double location, double sigma) {
    return std::make_shared<SkewNormalFamily>(lambda, location, sigma);
}
std::shared_ptr<const Family> make_mixture(
    std::vector<std::pair<std::shared_ptr<const Family>, double>> components) {
    return std::make_shared<MixtureFamily>(std::move(components));
}
std::shared_ptr<const Family> make_fd_fallback(std::shared_ptr<const Family> base) {
    return std::make_shared<FdFamily>(std::move(base));
}

// ---------------------------------------------------------------------------

LocationDensity::LocationDensity(std::shared_ptr<const Family> family, double rate,
                                 QuadSettings quad)
    : family_(std::move(family)), rate_(rate), quad_(quad) {
    if (!family_) throw ConfigError("null density family");
    if (!(rate_ > 0) || !std::isfinite(rate_)) throw ConfigError("density rate must be > 0");
    name_ = family_->name();
    if (rate_ != 1.0) name_ += "@rate=" + fmt(rate_);

    // Locate the working support in family coordinates: the outermost points
    // where g reaches tail_cut * max g, found by grid scan plus bisection.
    auto [a, b] = family_->support_hint(quad_.tail_cut);
    const int kGrid = 4096;
    double gmax = 0.0, xmax = a;
    for (int i = 0; i <= kGrid; ++i) {
        double x = a + (b - a) * i / kGrid;
        double g = family_->pdf(x);
        if (g > gmax) {
            gmax = g;
            xmax = x;
        }
    }
    if (!(gmax > 0) || !std::isfinite(gmax)) {
        throw NumericError("density has no positive maximum on its support hint");
    }
    const double thr = quad_.tail_cut * gmax;
    auto bisect_edge = [&](double outside, double inside) {
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (outside + inside);
            if (mid == outside || mid == inside) break;
            if (family_->pdf(mid) < thr) {
                outside = mid;
            } else {
                inside = mid;
            }
        }
        return outside;
    };
    double xlo = (family_->pdf(a) < thr) ? bisect_edge(a, xmax) : a;
    double xhi = (family_->pdf(b) < thr) ? bisect_edge(b, xmax) : b;
    support_ = {xlo / rate_, xhi / rate_};

    // Tail mass estimate: f(edge)/|psi_1(edge)| per side (exact for
    // exponential tails, right order for polynomial tails); invariant under
    // the rate transform.
    double est = 0.0;
    for (double edge : {xlo, xhi}) {
        double g = family_->pdf(edge);
        if (g <= 0) continue;
        double slope = std::fabs(family_->psi(1, edge));
        est += g / std::max(slope, 1e-6);
    }
    tail_estimate_ = est;
}

bool LocationDensity::reduced_accuracy() const { return !family_->closed_form_derivatives(); }

double LocationDensity::pdf(double y) const { return rate_ * family_->pdf(rate_ * y); }

double LocationDensity::pdf_derivative(int i, double y) const {
    check_order(i);
    double x = rate_ * y;
    double g = family_->pdf(x);
    double scale = rate_ * rate_;
    for (int k = 1; k < i; ++k) scale *= rate_;
    return scale * family_->psi(i, x) * g;
}

double LocationDensity::psi(int i, double y) const {
    check_order(i);
    if (pdf(y) < kPsiFloor) {
        throw NumericError("psi: density below support threshold at y=" + fmt(y));
    }
    double scale = rate_;
    for (int k = 1; k < i; ++k) scale *= rate_;
    return scale * family_->psi(i, rate_ * y);
}

double LocationDensity::cdf(double y) const { return family_->cdf(rate_ * y); }

double LocationDensity::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw NumericError("quantile level must lie in (0,1)");
    if (auto q = family_->quantile_closed(p)) return *q / rate_;
    double lo = support_.first, hi = support_.second;
    // cdf is monotone; the working support brackets every quantile reachable
    // above the tail-cut mass.
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ExpectationResult LocationDensity::expectation(const std::function<double(double)>& fn) const {
    QuadratureOptions opts;
    opts.abs_tol = quad_.abs_tol;
    opts.max_panels = quad_.max_panels;
    opts.initial_panels = 64;
    auto r = integrate([&](double y) { return fn(y) * pdf(y); }, support_.first, support_.second,
                       opts);
    return {r.value, r.error + tail_estimate_};
}

double LocationDensity::fisher_information() const {
    auto r = expectation([this](double y) {
        double s = psi(1, y);
        return s * s;
    });
    if (!std::isfinite(r.value) || r.value < 0) {
        throw NumericError("Fisher information came out non-finite or negative");
    }
    return r.value;
}

bool LocationDensity::is_normalized(double tol) const {
    return std::fabs(fisher_information() - 1.0) <= tol;
}

LocationDensity LocationDensity::normalized() const {
    double info = fisher_information();
    if (!(info > 0) || !std::isfinite(info)) {
        throw NumericError("cannot normalize: Fisher information " + fmt(info));
    }
    if (std::fabs(info - 1.0) <= 1e-9) return *this;
    return LocationDensity(family_, rate_ / std::sqrt(info), quad_);
}

double LocationDensity::sample_one(Xoshiro256ss& rng) const { return quantile(rng.uniform01()); }

std::vector<double> LocationDensity::sample(int n, std::uint64_t seed) const {
    if (n < 1) throw ConfigError("sample: n must be >= 1");
    auto g = make_stream(seed, 0);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& y : out) y = sample_one(g);
    return out;
}

}  // namespace hoexp::density
