#include "occam/errors.hpp"
#include "occam/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

using namespace occam;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(LogValue, RejectsNanAndPositiveInfinity) {
    EXPECT_THROW(LogValue::from_log(std::nan("")), DomainError);
    EXPECT_THROW(LogValue::from_log(kInf), DomainError);
    EXPECT_THROW(LogValue::from_linear(-1.0), DomainError);
    EXPECT_THROW(LogValue::from_linear(kInf), DomainError);
    EXPECT_THROW(LogValue::from_linear(std::nan("")), DomainError);
}

TEST(LogValue, ZeroIsNegativeInfinity) {
    EXPECT_TRUE(LogValue::from_linear(0.0).is_zero());
    EXPECT_TRUE(LogValue::from_log(-kInf).is_zero());
    EXPECT_EQ(LogValue::zero().linear(), 0.0);
    EXPECT_EQ(LogValue::one().log(), 0.0);
    EXPECT_EQ(LogValue{}, LogValue::zero());
}

TEST(LogValue, ArithmeticAndOrdering) {
    const auto a = LogValue::from_linear(6.0);
    const auto b = LogValue::from_linear(3.0);
    EXPECT_NEAR((a * b).linear(), 18.0, 1e-12);
    EXPECT_NEAR((a / b).linear(), 2.0, 1e-12);
    EXPECT_TRUE((a * LogValue::zero()).is_zero());
    EXPECT_THROW(a / LogValue::zero(), DomainError);
    EXPECT_LT(b, a);
    EXPECT_NEAR(LogValue::from_linear(1000.0).log10(), 3.0, 1e-14);
}

TEST(LogGaussianDensity, StandardNormalAtZero) {
    EXPECT_NEAR(log_gaussian_density(0.0, 0.0, 1.0).log(), -0.5 * std::log(2.0 * std::numbers::pi), 1e-15);
}

TEST(LogGaussianDensity, OffsetValue) {
    // log N(0.5 | 0, 2) computed with mpmath.
    EXPECT_NEAR(log_gaussian_density(0.5, 0.0, 2.0).log(), -1.3280121234846454, 1e-14);
    EXPECT_NEAR(log_gaussian_density(0.5, 0.0, 2.0).linear(), 0.26500353, 1e-8);
}

TEST(LogGaussianDensity, RejectsBadVariance) {
    EXPECT_THROW(log_gaussian_density(0.0, 0.0, 0.0), DomainError);
    EXPECT_THROW(log_gaussian_density(0.0, 0.0, -1.0), DomainError);
    EXPECT_THROW(log_gaussian_density(kInf, 0.0, 1.0), DomainError);
}

TEST(LogSumExp, HandlesHugeMagnitudes) {
    std::vector<LogValue> terms = {LogValue::from_log(-1000.0), LogValue::from_log(-1000.0)};
    EXPECT_NEAR(log_sum_exp(terms).log(), -1000.0 + std::log(2.0), 1e-12);
    terms = {LogValue::from_log(800.0), LogValue::from_log(0.0)};
    EXPECT_NEAR(log_sum_exp(terms).log(), 800.0, 1e-12);
}

TEST(LogSumExp, AllZeroAndEmpty) {
    std::vector<LogValue> zeros(3, LogValue::zero());
    EXPECT_TRUE(log_sum_exp(zeros).is_zero());
    EXPECT_THROW(log_sum_exp(std::span<const LogValue>{}), UsageError);
}

TEST(LogSumExp, MatchesDirectSumInSafeRange) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<LogValue> terms;
        double direct = 0.0;
        for (int i = 0; i < 7; ++i) {
            const double l = u(rng);
            terms.push_back(LogValue::from_log(l));
            direct += std::exp(l);
        }
        EXPECT_NEAR(log_sum_exp(terms).log(), std::log(direct), 1e-13);
    }
}

TEST(Quadrature, GaussianNormalizesAcrossMeansAndScales) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mean_dist(-1e3, 1e3);
    std::uniform_real_distribution<double> log_sd_dist(std::log(1e-3), std::log(1e3));
    for (int trial = 0; trial < 60; ++trial) {
        const double m = mean_dist(rng);
        const double s = std::exp(log_sd_dist(rng));
        const auto f = [&](double x) { return log_gaussian_density(x, m, s * s); };
        EXPECT_NEAR(integrate_log_1d(f, m, s, 1e-10).log(), 0.0, 1e-9) << "mean " << m << " sd " << s;
    }
}

TEST(Quadrature, FarBelowDoubleRange) {
    // exp(-5000) * N(x | 1, 1) integrates to exp(-5000).
    const auto f = [](double x) { return LogValue::from_log(-5000.0) * log_gaussian_density(x, 1.0, 1.0); };
    EXPECT_NEAR(integrate_log_1d(f, 1.0, 1.0).log(), -5000.0, 1e-9);
}

TEST(Quadrature, OffCenterWindowStillConverges) {
    // The window is centred one sd away from the peak.
    const auto f = [](double x) { return log_gaussian_density(x, 2.0, 4.0); };
    EXPECT_NEAR(integrate_log_1d(f, 0.0, 2.0, 1e-10).log(), 0.0, 1e-9);
}

TEST(Quadrature, ScaleInvariance) {
    // Integral of exp(-x^2/2) is sqrt(2 pi); substituting x = k u scales it by 1/k.
    for (double k : {1e-3, 0.1, 1.0, 7.5, 1e3}) {
        const auto f = [k](double u) { return LogValue::from_log(-0.5 * (k * u) * (k * u)); };
        EXPECT_NEAR(integrate_log_1d(f, 0.0, 1.0 / k).log(), 0.5 * std::log(2.0 * std::numbers::pi) - std::log(k),
                    1e-9);
    }
}

TEST(Quadrature, NonGaussianIntegrand) {
    // Integral of exp(-|x|) over [-12, 12] (the window) is 2 (1 - e^-12).
    const auto f = [](double x) { return LogValue::from_log(-std::abs(x)); };
    EXPECT_NEAR(integrate_log_1d(f, 0.0, 1.0, 1e-10).linear(), 2.0 * (1.0 - std::exp(-12.0)), 1e-9);
}

TEST(Quadrature, ZeroIntegrand) {
    const auto f = [](double) { return LogValue::zero(); };
    EXPECT_TRUE(integrate_log_1d(f, 0.0, 1.0).is_zero());
}

TEST(Quadrature, RejectsInvalidArguments) {
    const auto f = [](double x) { return log_gaussian_density(x, 0.0, 1.0); };
    EXPECT_THROW(integrate_log_1d(f, 0.0, 0.0), DomainError);
    EXPECT_THROW(integrate_log_1d(f, kInf, 1.0), DomainError);
    EXPECT_THROW(integrate_log_1d(f, 0.0, 1.0, 0.0), DomainError);
    EXPECT_THROW(integrate_log_1d(f, 0.0, 1.0, 0.5), DomainError);
}

TEST(Quadrature, ConvergenceErrorCarriesBestEstimate) {
    // A tolerance below the rounding floor can never be met.
    const auto f = [](double x) { return log_gaussian_density(x, 0.0, 1.0); };
    QuadratureOptions opts;
    opts.max_panels = 64;
    try {
        integrate_log_1d(f, 0.0, 1.0, 1e-20, opts);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_NEAR(e.best_log_estimate(), 0.0, 1e-9);
        EXPECT_GT(e.achieved_rel_tol(), 1e-20);
    }
}

TEST(LocateLogPeak, ExactForGaussianProducts) {
    // N(x | 3, 4) * N(x | -1, 1): peak at (3/4 - 1) / (1/4 + 1) = -0.2, sd sqrt(0.8).
    const auto f = [](double x) { return log_gaussian_density(x, 3.0, 4.0) * log_gaussian_density(x, -1.0, 1.0); };
    const auto peak = locate_log_peak(f, 10.0, 1.0);
    EXPECT_NEAR(peak.center, -0.2, 1e-9);
    EXPECT_NEAR(peak.scale, std::sqrt(0.8), 1e-6);
}

TEST(LocateLogPeak, RejectsConvexIntegrand) {
    const auto f = [](double x) { return LogValue::from_log(x * x); };
    EXPECT_THROW(locate_log_peak(f, 0.0, 1.0), DomainError);
}

TEST(RenderLinear, OrdinaryAndExtremeMagnitudes) {
    EXPECT_EQ(render_linear(LogValue::from_linear(0.00197974), 3), "0.00198");
    EXPECT_EQ(render_linear(LogValue::zero()), "0");
    EXPECT_EQ(render_linear(LogValue::from_log(41.15559024020702), 6), "7.47559e17");
    EXPECT_EQ(render_linear(LogValue::from_log(-5000.0 * std::numbers::ln10), 3), "1e-5000");
    EXPECT_EQ(render_linear(LogValue::from_log(-41.381518060003194), 3), "1.07e-18");
}
