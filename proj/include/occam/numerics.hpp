#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>

namespace occam {

/// Natural logarithm of a nonnegative, finite quantity. Negative infinity
/// encodes zero; NaN and +inf are rejected at construction.
class LogValue {
public:
    constexpr LogValue() noexcept : log_(-std::numeric_limits<double>::infinity()) {}

    /// Wraps a value that is already a natural log.
    static LogValue from_log(double log_value);
    /// Takes the log of a linear-domain value x >= 0.
    static LogValue from_linear(double x);
    static constexpr LogValue zero() noexcept { return LogValue(); }
    static constexpr LogValue one() noexcept { return LogValue(0.0, Unchecked{}); }

    constexpr double log() const noexcept { return log_; }
    /// log10 of the quantity (bans when the quantity is a Bayes factor).
    double log10() const noexcept;
    /// exp(log()); underflows to 0 or overflows to +inf outside double range.
    double linear() const noexcept;
    constexpr bool is_zero() const noexcept { return log_ == -std::numeric_limits<double>::infinity(); }

    friend LogValue operator*(LogValue a, LogValue b);
    friend LogValue operator/(LogValue a, LogValue b);
    friend constexpr bool operator==(LogValue a, LogValue b) noexcept { return a.log_ == b.log_; }
    friend constexpr auto operator<=>(LogValue a, LogValue b) noexcept { return a.log_ <=> b.log_; }

private:
    struct Unchecked {};
    constexpr LogValue(double v, Unchecked) noexcept : log_(v) {}

    double log_;
};

/// log N(x | mean, variance). Throws DomainError for non-finite input or
/// variance <= 0.
LogValue log_gaussian_density(double x, double mean, double variance);

/// log(sum_i exp(terms_i)) with a max shift. Throws UsageError when empty.
LogValue log_sum_exp(std::span<const LogValue> terms);

struct QuadratureOptions {
    /// Half-width of the integration window in units of `scale`.
    double half_width_in_scales = 12.0;
    /// Panels the window is split into before adaptive refinement.
    std::size_t initial_panels = 8;
    /// Refinement stops with ConvergenceError once this many panels exist.
    std::size_t max_panels = 4096;
};

using LogIntegrand = std::function<LogValue(double)>;

/// Integral over the real line of exp(log_integrand(x)), returned in log
/// domain. Globally adaptive Gauss-Kronrod (7/15) over
/// [center - 12 scale, center + 12 scale]; panel sums are accumulated with
/// log_sum_exp so integrands far below double range are fine.
///
/// rel_tol is the target relative error of the linear-domain integral and
/// must lie in (0, 0.1]. Throws ConvergenceError (carrying the best estimate)
/// when the panel budget is exhausted first.
LogValue integrate_log_1d(const LogIntegrand& log_integrand, double center, double scale,
                          double rel_tol = 1e-9, const QuadratureOptions& options = {});

/// Location and width of the peak of a log-concave integrand.
struct PeakEstimate {
    double center;
    /// 1 / sqrt(-curvature) at the peak: the standard deviation for a
    /// Gaussian-shaped integrand.
    double scale;
};

/// Finds the peak of a log integrand by repeated three-point parabola fits,
/// starting from `guess` with probe spacing `step`. Exact (up to rounding) for
/// Gaussian products, whose log is quadratic. Throws DomainError if the
/// integrand is not locally concave.
PeakEstimate locate_log_peak(const LogIntegrand& log_integrand, double guess, double step);

/// Decimal rendering of a log-domain quantity with `significant_digits`
/// significant digits. Values with |log10| > 15 are rendered as
/// "<mantissa>e<exponent>" straight from the log, without exponentiating.
std::string render_linear(LogValue value, int significant_digits = 6);

}  // namespace occam
