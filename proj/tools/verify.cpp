#include "verify.hpp"

#include "occam/errors.hpp"
#include "occam/evidence.hpp"
#include "occam/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace occam::cli {

namespace {

class Draws {
public:
    explicit Draws(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    std::size_t count(std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(unit() * static_cast<double>(hi - lo + 1));
    }
    double normal() {
        const double u1 = unit();
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * 3.141592653589793 * u2);
    }

private:
    std::mt19937_64 engine_;
};

std::vector<double> random_pattern(Draws& draws, std::size_t n) {
    std::vector<double> g(n);
    for (;;) {
        double gg = 0.0;
        for (double& x : g) {
            x = draws.uniform(-1.0, 1.0);
            gg += x * x;
        }
        if (gg > 1e-3) {
            return g;
        }
    }
}

// Integrates and falls back to the best estimate when the requested
// tolerance is out of reach; the comparison against rel_tol decides.
double integrate_or_best(const LogIntegrand& f, double rel_tol) {
    const PeakEstimate peak = locate_log_peak(f, 0.0, 1.0);
    const double quad_tol = std::min(0.1, rel_tol / 10.0);
    try {
        return integrate_log_1d(f, peak.center, peak.scale, quad_tol).log();
    } catch (const ConvergenceError& e) {
        return e.best_log_estimate();
    }
}

std::string join(const std::vector<double>& xs) {
    std::ostringstream os;
    os.precision(17);
    os << "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        os << (i ? "," : "") << xs[i];
    }
    os << "]";
    return os.str();
}

void record(VerifyCheck& check, double deviation, double rel_tol, const std::string& params) {
    ++check.instances;
    if (std::isnan(deviation)) {
        deviation = std::numeric_limits<double>::infinity();
    }
    check.max_deviation = std::max(check.max_deviation, deviation);
    if (!(deviation <= rel_tol)) {
        std::ostringstream os;
        os.precision(6);
        os << params << " deviation=" << deviation;
        check.failures.push_back(os.str());
    }
}

}  // namespace

bool VerifyResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.failures.empty(); });
}

VerifyResult run_verification(const VerifyOptions& options) {
    VerifyResult result{options.rel_tol, options.seed, {}};
    Draws draws(options.seed);

    VerifyCheck identity{"bayes_factor_compact_vs_general", 0, 0.0, {}};
    for (std::size_t k = 0; k < options.identity_instances; ++k) {
        const std::size_t n = draws.count(1, 16);
        const auto g = random_pattern(draws, n);
        const double sigma = draws.log_uniform(1e-2, 1e2);
        const double tau = draws.log_uniform(1e-2, 1e2);
        std::vector<double> y(n);
        const double amplitude = tau * draws.normal();
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = amplitude * g[i] + sigma * draws.normal();
        }
        const auto data = SignalDataset::make(y);
        const double compact = log_bayes_factor_signal(data, g, sigma, tau).log();
        const double general = log_bayes_factor_signal_general(data, g, sigma, tau).log();
        const double deviation = std::abs(compact - general) / std::max(1.0, std::abs(compact));
        std::ostringstream params;
        params.precision(17);
        params << "n=" << n << " sigma=" << sigma << " tau=" << tau;
        record(identity, deviation, options.rel_tol, params.str());
    }
    result.checks.push_back(std::move(identity));

    VerifyCheck signal{"signal_evidence_vs_quadrature", 0, 0.0, {}};
    for (std::size_t k = 0; k < options.signal_instances; ++k) {
        const std::size_t n = draws.count(1, 16);
        const auto g = random_pattern(draws, n);
        const double sigma = draws.log_uniform(1e-2, 1e2);
        const double tau = draws.log_uniform(1e-2, 1e2);
        const double prior_mean = draws.uniform(-1.0, 1.0) * tau;
        const double amplitude = prior_mean + tau * draws.normal();
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = amplitude * g[i] + sigma * draws.normal();
        }
        const auto data = SignalDataset::make(y);
        const double analytic = log_evidence_signal(data, g, sigma, GaussianPrior{prior_mean, tau}).log();
        const LogIntegrand joint = [&](double a) {
            double total = log_gaussian_density(a, prior_mean, tau * tau).log();
            for (std::size_t i = 0; i < n; ++i) {
                total += log_gaussian_density(y[i], a * g[i], sigma * sigma).log();
            }
            return LogValue::from_log(total);
        };
        const double oracle = integrate_or_best(joint, options.rel_tol);
        std::ostringstream params;
        params.precision(17);
        params << "g=" << join(g) << " y=" << join(y) << " sigma=" << sigma << " prior=N(" << prior_mean << ","
               << tau << "^2)";
        record(signal, std::abs(analytic - oracle), options.rel_tol, params.str());
    }
    result.checks.push_back(std::move(signal));

    // p(y | w) = int p(y|t) p(w|t) p(t) dt / int p(w|t) p(t) dt, two
    // quadratures that never touch the conjugate update.
    VerifyCheck location{"constrained_location_evidence_vs_quadrature", 0, 0.0, {}};
    for (std::size_t k = 0; k < options.location_instances; ++k) {
        const double sigma = draws.log_uniform(1e-2, 1e2);
        const double tau = draws.log_uniform(1e-2, 1e2);
        const double prior_mean = draws.uniform(-1.0, 1.0) * tau;
        const std::size_t n_constraints = draws.count(0, 2);
        std::vector<AuxiliaryConstraint> constraints;
        const double theta = prior_mean + tau * draws.normal();
        for (std::size_t c = 0; c < n_constraints; ++c) {
            const double sd = draws.log_uniform(1e-2, 1e2);
            constraints.push_back({theta + sd * draws.normal(), sd});
        }
        const double y = theta + sigma * draws.normal();
        const auto model = CompositeModel::make("M", 1.0, LocationLikelihood{sigma},
                                                GaussianPrior{prior_mean, tau}, constraints);
        const double analytic = log_evidence(model, y).log_value.log();

        const auto constraint_terms = [&](double t) {
            double total = log_gaussian_density(t, prior_mean, tau * tau).log();
            for (const auto& c : constraints) {
                total += log_gaussian_density(c.observed, t, c.noise_sd * c.noise_sd).log();
            }
            return total;
        };
        const LogIntegrand with_y = [&](double t) {
            return LogValue::from_log(constraint_terms(t) + log_gaussian_density(y, t, sigma * sigma).log());
        };
        const LogIntegrand without_y = [&](double t) { return LogValue::from_log(constraint_terms(t)); };
        const double oracle = integrate_or_best(with_y, options.rel_tol) -
                              integrate_or_best(without_y, options.rel_tol);
        std::ostringstream params;
        params.precision(17);
        params << "y=" << y << " sigma=" << sigma << " prior=N(" << prior_mean << "," << tau
               << "^2) constraints=" << constraints.size();
        record(location, std::abs(analytic - oracle), options.rel_tol, params.str());
    }
    result.checks.push_back(std::move(location));
    return result;
}

}  // namespace occam::cli
