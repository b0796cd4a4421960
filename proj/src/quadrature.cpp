#include "hoexp/quadrature.hpp"

#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "hoexp/errors.hpp"

namespace hoexp {

namespace {

// 15-point Kronrod extension of 7-point Gauss, nodes in [0,1] half-range.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Segment {
    double a, b;
    double value;
    double error;
    int index;  // creation order, deterministic tie-break
};

struct SegmentLess {
    bool operator()(const Segment& x, const Segment& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.index > y.index;
    }
};

Segment evaluate_panel(const std::function<double(double)>& f, double a, double b, int index) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    if (!std::isfinite(fc)) {
        std::ostringstream os;
        os << "non-finite integrand at x=" << c;
        throw QuadratureError(os.str());
    }
    double result_gauss = kWg[3] * fc;
    double result_kronrod = kWgk[7] * fc;
    for (int j = 0; j < 7; ++j) {
        double dx = h * kXgk[j];
        double f1 = f(c - dx);
        double f2 = f(c + dx);
        if (!std::isfinite(f1) || !std::isfinite(f2)) {
            std::ostringstream os;
            os << "non-finite integrand at x=" << (std::isfinite(f1) ? c + dx : c - dx);
            throw QuadratureError(os.str());
        }
        result_kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) {
            result_gauss += kWg[j / 2] * (f1 + f2);
        }
    }
    double value = result_kronrod * h;
    double err = std::abs((result_kronrod - result_gauss) * h);
    // Round-off floor so converged panels do not dominate the refinement queue.
    err = std::max(err, 50.0 * 2.220446049250313e-16 * std::abs(value));
    return {a, b, value, err, index};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
    if (!(b > a)) {
        if (a == b) return {0.0, 0.0, 0};
        QuadratureResult r = integrate(f, b, a, opts);
        return {-r.value, r.error, r.panels};
    }
    std::priority_queue<Segment, std::vector<Segment>, SegmentLess> heap;
    int next_index = 0;
    int panels = 0;
    const int init = std::max(1, opts.initial_panels);
    for (int i = 0; i < init; ++i) {
        double sa = a + (b - a) * i / init;
        double sb = a + (b - a) * (i + 1) / init;
        heap.push(evaluate_panel(f, sa, sb, next_index++));
        ++panels;
    }

    auto totals = [&heap]() {
        // Copy-drain is O(n log n) but n stays small; only used on exit paths.
        auto copy = heap;
        double v = 0.0, e = 0.0;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            copy.pop();
        }
        return std::pair{v, e};
    };

    double total_error = 0.0;
    {
        auto [v, e] = totals();
        (void)v;
        total_error = e;
    }
    while (total_error > opts.abs_tol && panels < opts.max_panels) {
        Segment worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {
            // Interval at floating-point resolution; cannot refine further.
            heap.push(worst);
            break;
        }
        Segment left = evaluate_panel(f, worst.a, mid, next_index++);
        Segment right = evaluate_panel(f, mid, worst.b, next_index++);
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }

    auto [value, error] = totals();
    if (opts.strict && error > opts.abs_tol && panels >= opts.max_panels) {
        std::ostringstream os;
        os << "quadrature did not converge: error " << error << " > tol " << opts.abs_tol
           << " after " << panels << " panels";
        throw QuadratureError(os.str());
    }
    return {value, error, panels};
}

}  // namespace hoexp
