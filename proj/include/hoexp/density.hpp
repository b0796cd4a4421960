#pragma once

// Location densities: pdf and derivatives to order 3, score functions
// psi_i = f^(i)/f, Fisher information, normalization to unit Fisher
// information, expectation by adaptive quadrature over a truncated working
// support, and inverse-CDF sampling.
//
// A LocationDensity is an immutable (family, rate) pair representing
// h(y) = r * g(r * y): all evaluators are pure and safe to share across
// threads. Sampling takes a caller-owned generator.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hoexp/rng.hpp"

namespace hoexp::density {

struct QuadSettings {
    double abs_tol = 1e-10;
    int max_panels = 1 << 16;
    double tail_cut = 1e-16;  // working support ends where f < tail_cut * max f
};

// Family core g: an un-normalized location density with closed-form score
// functions. Implementations must be immutable after construction.
class Family {
  public:
    virtual ~Family() = default;
    virtual std::string name() const = 0;
    virtual double pdf(double x) const = 0;
    // psi_i = g^(i)/g for i in {1,2,3}; finite wherever pdf(x) > 0.
    virtual double psi(int i, double x) const = 0;
    virtual double cdf(double x) const = 0;
    // Closed-form inverse CDF where the family has one.
    virtual std::optional<double> quantile_closed(double p) const { (void)p; return {}; }
    // Interval outside of which pdf < tail_cut * max pdf is guaranteed.
    virtual std::pair<double, double> support_hint(double tail_cut) const = 0;
    virtual bool closed_form_derivatives() const { return true; }
};

std::shared_ptr<const Family> make_gaussian(double mean, double sigma);
std::shared_ptr<const Family> make_logistic(double location, double scale);
std::shared_ptr<const Family> make_student_t(double nu, double center, double sigma);
std::shared_ptr<const Family> make_skew_normal(double lambda, double location, double sigma);
std::shared_ptr<const Family> make_mixture(
    std::vector<std::pair<std::shared_ptr<const Family>, double>> components);
// Central finite differences on the pdf of `base`; reduced accuracy, flagged.
std::shared_ptr<const Family> make_fd_fallback(std::shared_ptr<const Family> base);

struct ExpectationResult {
    double value = 0.0;
    double error = 0.0;  // quadrature error plus tail-truncation estimate
};

class LocationDensity {
  public:
    explicit LocationDensity(std::shared_ptr<const Family> family, double rate = 1.0,
                             QuadSettings quad = {});

    const std::string& name() const { return name_; }
    double rate() const { return rate_; }
    const QuadSettings& quad() const { return quad_; }
    bool reduced_accuracy() const;  // finite-difference derivatives in use

    double pdf(double y) const;
    double pdf_derivative(int i, double y) const;  // h^(i), i in {1,2,3}
    // psi_i = h^(i)/h; throws NumericError when pdf(y) < 1e-300.
    double psi(int i, double y) const;
    double cdf(double y) const;
    double quantile(double p) const;  // closed form or monotone root-finding
    std::pair<double, double> support() const { return support_; }

    ExpectationResult expectation(const std::function<double(double)>& fn) const;
    double fisher_information() const;  // E psi_1^2 by quadrature
    bool is_normalized(double tol = 1e-6) const;
    LocationDensity normalized() const;  // rate adjusted so Fisher info = 1

    // One inverse-CDF draw; the generator is caller-owned (one per thread).
    double sample_one(Xoshiro256ss& rng) const;
    std::vector<double> sample(int n, std::uint64_t seed) const;

  private:
    std::shared_ptr<const Family> family_;
    double rate_;
    QuadSettings quad_;
    std::string name_;
    std::pair<double, double> support_;  // truncated, in y-coordinates
    double tail_estimate_;               // bound added to every quadrature error
};

}  // namespace hoexp::density
