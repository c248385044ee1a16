#include "occam/numerics.hpp"

#include "occam/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <queue>
#include <vector>

namespace occam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Gauss-Kronrod 7/15 abscissae on [-1, 1] (positive half, descending) and
// weights. Odd indices of the Kronrod nodes are the Gauss nodes.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo;
    double hi;
    double log_kronrod;
    double log_error;
};

struct ByError {
    bool operator()(const Panel& a, const Panel& b) const { return a.log_error < b.log_error; }
};

double lse_raw(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs) {
        m = std::max(m, x);
    }
    if (m == kNegInf) {
        return kNegInf;
    }
    double s = 0.0;
    for (double x : xs) {
        s += std::exp(x - m);
    }
    return m + std::log(s);
}

Panel evaluate_panel(const LogIntegrand& f, double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);

    std::array<double, 15> kronrod_terms{};
    std::array<double, 7> gauss_terms{};
    std::size_t k = 0;
    std::size_t g = 0;
    for (std::size_t j = 0; j < kKronrodNodes.size(); ++j) {
        const double lw_k = std::log(kKronrodWeights[j]);
        const bool is_gauss = (j % 2 == 1);
        const double lw_g = is_gauss ? std::log(kGaussWeights[j / 2]) : 0.0;
        if (j + 1 == kKronrodNodes.size()) {
            const double fc = f(mid).log();
            kronrod_terms[k++] = lw_k + fc;
            gauss_terms[g++] = lw_g + fc;
            continue;
        }
        const double dx = half * kKronrodNodes[j];
        const double fl = f(mid - dx).log();
        const double fr = f(mid + dx).log();
        kronrod_terms[k++] = lw_k + fl;
        kronrod_terms[k++] = lw_k + fr;
        if (is_gauss) {
            gauss_terms[g++] = lw_g + fl;
            gauss_terms[g++] = lw_g + fr;
        }
    }

    const double log_half = std::log(half);
    const double log_k = log_half + lse_raw(kronrod_terms);
    const double log_g = log_half + lse_raw(gauss_terms);

    double log_err = kNegInf;
    const double m = std::max(log_k, log_g);
    if (m != kNegInf) {
        const double diff = std::abs(std::exp(log_k - m) - std::exp(log_g - m));
        log_err = diff > 0.0 ? m + std::log(diff) : kNegInf;
    }
    // Rounding floor: no panel is trusted beyond ~50 ulp of its own value.
    if (log_k != kNegInf) {
        log_err = std::max(log_err, log_k + std::log(50.0 * std::numeric_limits<double>::epsilon()));
    }
    return Panel{lo, hi, log_k, log_err};
}

}  // namespace

LogValue LogValue::from_log(double log_value) {
    if (std::isnan(log_value) || log_value == std::numeric_limits<double>::infinity()) {
        throw DomainError("LogValue: log value must not be NaN or +inf");
    }
    return LogValue(log_value, Unchecked{});
}

LogValue LogValue::from_linear(double x) {
    if (std::isnan(x) || x < 0.0 || std::isinf(x)) {
        throw DomainError("LogValue: linear value must be finite and nonnegative");
    }
    return LogValue(x == 0.0 ? kNegInf : std::log(x), Unchecked{});
}

double LogValue::log10() const noexcept { return log_ / std::numbers::ln10; }

double LogValue::linear() const noexcept { return std::exp(log_); }

LogValue operator*(LogValue a, LogValue b) {
    return LogValue::from_log(a.log_ + b.log_);
}

LogValue operator/(LogValue a, LogValue b) {
    if (b.is_zero()) {
        throw DomainError("LogValue: division by zero");
    }
    return LogValue::from_log(a.log_ - b.log_);
}

LogValue log_gaussian_density(double x, double mean, double variance) {
    if (!std::isfinite(x) || !std::isfinite(mean) || !std::isfinite(variance)) {
        throw DomainError("log_gaussian_density: non-finite input");
    }
    if (variance <= 0.0) {
        throw DomainError("log_gaussian_density: variance must be positive");
    }
    const double r = x - mean;
    return LogValue::from_log(-0.5 * std::log(2.0 * std::numbers::pi * variance) -
                              r * r / (2.0 * variance));
}

LogValue log_sum_exp(std::span<const LogValue> terms) {
    if (terms.empty()) {
        throw UsageError("log_sum_exp: empty term list");
    }
    double m = kNegInf;
    for (const LogValue& t : terms) {
        m = std::max(m, t.log());
    }
    if (m == kNegInf) {
        return LogValue::zero();
    }
    double s = 0.0;
    for (const LogValue& t : terms) {
        s += std::exp(t.log() - m);
    }
    return LogValue::from_log(m + std::log(s));
}

LogValue integrate_log_1d(const LogIntegrand& log_integrand, double center, double scale,
                          double rel_tol, const QuadratureOptions& options) {
    if (!std::isfinite(center) || !std::isfinite(scale) || scale <= 0.0) {
        throw DomainError("integrate_log_1d: center must be finite and scale positive");
    }
    if (!(rel_tol > 0.0 && rel_tol <= 0.1)) {
        throw DomainError("integrate_log_1d: rel_tol must lie in (0, 0.1]");
    }
    if (options.initial_panels == 0 || options.max_panels < options.initial_panels) {
        throw UsageError("integrate_log_1d: invalid panel budget");
    }

    const double lo = center - options.half_width_in_scales * scale;
    const double width = 2.0 * options.half_width_in_scales * scale;
    const auto n0 = options.initial_panels;

    std::priority_queue<Panel, std::vector<Panel>, ByError> queue;
    std::vector<Panel> initial;
    initial.reserve(n0);
    for (std::size_t i = 0; i < n0; ++i) {
        const double a = lo + width * static_cast<double>(i) / static_cast<double>(n0);
        const double b = (i + 1 == n0) ? lo + width
                                       : lo + width * static_cast<double>(i + 1) / static_cast<double>(n0);
        initial.push_back(evaluate_panel(log_integrand, a, b));
    }

    // Running linear sums are kept relative to a fixed reference so that
    // popping and re-adding panels is O(log n).
    double ref = kNegInf;
    for (const Panel& p : initial) {
        ref = std::max(ref, p.log_kronrod);
    }
    if (ref == kNegInf) {
        return LogValue::zero();
    }
    double sum = 0.0;
    double err = 0.0;
    for (const Panel& p : initial) {
        sum += std::exp(p.log_kronrod - ref);
        err += std::exp(p.log_error - ref);
        queue.push(p);
    }

    auto exact_totals = [&](double& log_sum, double& log_err) {
        std::vector<double> ks;
        std::vector<double> es;
        ks.reserve(queue.size());
        es.reserve(queue.size());
        auto copy = queue;
        while (!copy.empty()) {
            ks.push_back(copy.top().log_kronrod);
            es.push_back(copy.top().log_error);
            copy.pop();
        }
        log_sum = lse_raw(ks);
        log_err = lse_raw(es);
    };

    const double log_tol = std::log(rel_tol);
    std::size_t since_resync = 0;
    for (;;) {
        if (err <= rel_tol * sum || since_resync >= 256 || queue.size() >= options.max_panels) {
            double log_sum = 0.0;
            double log_err = 0.0;
            exact_totals(log_sum, log_err);
            if (log_err - log_sum <= log_tol) {
                return LogValue::from_log(log_sum);
            }
            if (queue.size() >= options.max_panels) {
                throw ConvergenceError("integrate_log_1d: panel budget exhausted", log_sum,
                                       std::exp(log_err - log_sum));
            }
            sum = std::exp(log_sum - ref);
            err = std::exp(log_err - ref);
            since_resync = 0;
        }

        const Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const Panel left = evaluate_panel(log_integrand, worst.lo, mid);
        const Panel right = evaluate_panel(log_integrand, mid, worst.hi);
        sum += std::exp(left.log_kronrod - ref) + std::exp(right.log_kronrod - ref) -
               std::exp(worst.log_kronrod - ref);
        err += std::exp(left.log_error - ref) + std::exp(right.log_error - ref) -
               std::exp(worst.log_error - ref);
        sum = std::max(sum, 0.0);
        err = std::max(err, 0.0);
        queue.push(left);
        queue.push(right);
        ++since_resync;
    }
}

PeakEstimate locate_log_peak(const LogIntegrand& log_integrand, double guess, double step) {
    if (!std::isfinite(guess) || !std::isfinite(step) || step <= 0.0) {
        throw DomainError("locate_log_peak: guess must be finite and step positive");
    }
    double x = guess;
    double h = step;
    double scale = step;
    for (int iter = 0; iter < 60; ++iter) {
        const double f0 = log_integrand(x).log();
        const double fp = log_integrand(x + h).log();
        const double fm = log_integrand(x - h).log();
        if (!std::isfinite(f0) || !std::isfinite(fp) || !std::isfinite(fm)) {
            h *= 0.5;
            continue;
        }
        const double curvature = (fp - 2.0 * f0 + fm) / (h * h);
        if (!(curvature < 0.0)) {
            throw DomainError("locate_log_peak: integrand is not locally concave");
        }
        const double slope = (fp - fm) / (2.0 * h);
        const double delta = -slope / curvature;
        scale = 1.0 / std::sqrt(-curvature);
        x += delta;
        h = scale;
        if (iter >= 1 && std::abs(delta) <= 1e-10 * scale) {
            break;
        }
    }
    return PeakEstimate{x, scale};
}

std::string render_linear(LogValue value, int significant_digits) {
    if (value.is_zero()) {
        return "0";
    }
    const int digits = std::clamp(significant_digits, 1, 17);
    const double l10 = value.log10();
    char buf[64];
    if (std::abs(l10) <= 15.0) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, value.linear());
        return buf;
    }
    double exponent = std::floor(l10);
    double mantissa = std::pow(10.0, l10 - exponent);
    std::snprintf(buf, sizeof buf, "%.*f", digits - 1, mantissa);
    if (std::string(buf).rfind("10", 0) == 0) {
        exponent += 1.0;
        mantissa /= 10.0;
        std::snprintf(buf, sizeof buf, "%.*f", digits - 1, mantissa);
    }
    std::string m(buf);
    if (m.find('.') != std::string::npos) {
        while (m.back() == '0') {
            m.pop_back();
        }
        if (m.back() == '.') {
            m.pop_back();
        }
    }
    return m + "e" + std::to_string(static_cast<long long>(exponent));
}

}  // namespace occam
