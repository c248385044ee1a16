#include "occam/case_studies.hpp"

#include "occam/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace occam {

namespace {

constexpr double kArcsecPerRadian = 648000.0 / std::numbers::pi;

void require_positive(double x, const char* name) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw DomainError(std::string(name) + " must be positive and finite");
    }
}

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(name) + " must be finite");
    }
}

double unit_interval(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace

double gr_precession_arcsec_per_century(const OrbitSpec& orbit) {
    require_positive(orbit.semi_major_axis_m, "semi-major axis");
    require_positive(orbit.orbital_period_days, "orbital period");
    require_positive(orbit.central_mass_kg, "central mass");
    if (!(orbit.eccentricity >= 0.0 && orbit.eccentricity < 1.0)) {
        throw DomainError("eccentricity must lie in [0, 1)");
    }
    const double c2 = kSpeedOfLight * kSpeedOfLight;
    const double per_orbit = 6.0 * std::numbers::pi * kGravitationalConstant * orbit.central_mass_kg /
                             (orbit.semi_major_axis_m * (1.0 - orbit.eccentricity * orbit.eccentricity) * c2);
    const double orbits_per_century = kDaysPerJulianCentury / orbit.orbital_period_days;
    return per_orbit * orbits_per_century * kArcsecPerRadian;
}

const ReportValue& CaseReport::value(const std::string& label) const {
    for (const ReportValue& v : values) {
        if (v.label == label) {
            return v;
        }
    }
    throw UsageError("report '" + name + "' has no value '" + label + "'");
}

std::vector<CompositeModel> mercury_models(const MercuryParams& p) {
    return {
        CompositeModel::make("H2", 1.0, LocationLikelihood{p.sigma}, GaussianPrior::make(0.0, p.tau),
                             {AuxiliaryConstraint{p.w, p.sigma2}}),
        CompositeModel::make("H3", 1.0,
                             PointPredictionLikelihood{gr_precession_arcsec_per_century(kMercuryOrbit), p.sigma}),
    };
}

CaseReport run_mercury_case(const MercuryParams& p) {
    require_finite(p.y, "y");
    require_finite(p.w, "w");
    require_positive(p.sigma, "sigma");
    require_positive(p.tau, "tau");
    require_positive(p.sigma2, "sigma2");

    const auto models = mercury_models(p);
    const CompositeModel& vulcan = models[0];
    const CompositeModel& relativity = models[1];
    const double mu_gr = std::get<PointPredictionLikelihood>(relativity.likelihood()).predicted_mean;
    const double var = p.sigma * p.sigma;

    const GaussianPrior prior = *vulcan.parameter_prior();
    const GaussianPrior constrained = effective_prior(vulcan);
    const LogValue unconstrained_evidence = log_evidence_location(p.y, prior, p.sigma);

    const Observation y = p.y;
    std::vector<LogEvidence> evidences = {log_evidence(vulcan, y), log_evidence(relativity, y)};
    const LogValue ideal_h3 = log_gaussian_density(p.y, p.y, var);
    const WeightOfEvidence b32 = weight_of_evidence(evidences[1], evidences[0]);

    CaseReport report;
    report.name = "mercury";
    report.values = {
        {"predictive_sd_prior", std::sqrt(var + prior.variance()), "arcsec/century",
         "sd of y under H2 before the constraint", ValueDomain::Linear},
        {"p_y_given_h2", unconstrained_evidence.log(), "density",
         "p(y | H2) before the constraint", ValueDomain::Log},
        {"tau_post", constrained.sd, "arcsec/century", "prior sd of theta after conditioning on w",
         ValueDomain::Linear},
        {"theta_mean_post", constrained.mean, "arcsec/century", "prior mean of theta after conditioning on w",
         ValueDomain::Linear},
        {"predictive_sd_post", std::sqrt(var + constrained.variance()), "arcsec/century",
         "sd of y under H2 after the constraint", ValueDomain::Linear},
        {"p_y_given_h2_w", evidences[0].log_value.log(), "density", "p(y | H2, w)", ValueDomain::Log},
        {"mu_gr", mu_gr, "arcsec/century", "GR perihelion advance of the built-in Mercury orbit",
         ValueDomain::Linear},
        {"p_y_given_h3", evidences[1].log_value.log(), "density", "p(y | H3) at mu = mu_gr", ValueDomain::Log},
        {"p_y_given_h3_ideal", ideal_h3.log(), "density", "p(y | H3) with mu set equal to y",
         ValueDomain::Log},
        {"log_b32", b32.nats, "nats", "ln p(y | H3) - ln p(y | H2, w)", ValueDomain::Linear},
        {"log_b32_ideal", ideal_h3.log() - evidences[0].log_value.log(), "nats",
         "as log_b32 with mu set equal to y", ValueDomain::Linear},
    };
    report.evidence = {{"H2", evidences[0].log_value}, {"H3", evidences[1].log_value}};
    report.bayes_factors = {{"H3", "H2", b32}};
    report.posterior = model_posterior(models, evidences);
    return report;
}

std::vector<double> neptune_demo_pattern() { return {1.0, 1.0, 1.0, 1.0}; }

SignalDataset generate_uranus_residuals(std::span<const double> pattern, double amplitude, double noise_sd,
                                        std::uint64_t seed) {
    if (pattern.empty()) {
        throw UsageError("generate_uranus_residuals: empty pattern");
    }
    require_finite(amplitude, "amplitude");
    if (!std::isfinite(noise_sd) || noise_sd < 0.0) {
        throw DomainError("noise sd must be finite and nonnegative");
    }
    std::mt19937_64 engine(seed);
    std::vector<double> y(pattern.size());
    std::array<double, 2> pair{};
    std::size_t used = pair.size();
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (used == pair.size()) {
            const double u1 = unit_interval(engine);
            const double u2 = unit_interval(engine);
            const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
            pair = {radius * std::cos(2.0 * std::numbers::pi * u2), radius * std::sin(2.0 * std::numbers::pi * u2)};
            used = 0;
        }
        y[i] = amplitude * pattern[i] + noise_sd * pair[used++];
    }
    return SignalDataset::make(std::move(y));
}

CaseReport run_neptune_case(std::span<const double> pattern, const SignalDataset& data, double sigma, double tau,
                            double quadrature_rel_tol) {
    const SignalStatistics s = signal_statistics(data, pattern, sigma, tau);
    const LogValue compact = log_bayes_factor_signal(data, pattern, sigma, tau);
    const LogValue general = log_bayes_factor_signal_general(data, pattern, sigma, tau);

    const std::vector<double> g(pattern.begin(), pattern.end());
    const std::vector<CompositeModel> models = {
        CompositeModel::make("H0", 1.0, NullLikelihood{sigma}),
        CompositeModel::make("H1", 1.0, LinearSignalLikelihood{g, sigma}, GaussianPrior::make(0.0, tau)),
    };
    const std::vector<LogEvidence> evidences = {log_evidence(models[0], data), log_evidence(models[1], data)};

    double quadrature = 0.0;
    std::string quadrature_note = "degenerate prior: H1 coincides with H0";
    if (tau > 0.0) {
        const double var = sigma * sigma;
        const auto y = data.residuals();
        const LogIntegrand joint = [&](double amplitude) {
            double total = log_gaussian_density(amplitude, 0.0, tau * tau).log();
            for (std::size_t i = 0; i < y.size(); ++i) {
                total += log_gaussian_density(y[i], amplitude * g[i], var).log();
            }
            return LogValue::from_log(total);
        };
        const PeakEstimate peak = locate_log_peak(joint, 0.0, tau);
        quadrature = (integrate_log_1d(joint, peak.center, peak.scale, quadrature_rel_tol) /
                      evidences[0].log_value)
                         .log();
        quadrature_note = "log of the numerically integrated p(y | A) p(A) over p(y | H0)";
    }

    CaseReport report;
    report.name = "neptune";
    report.values = {
        {"n", static_cast<double>(data.size()), "epochs", "number of residuals", ValueDomain::Linear},
        {"lambda", s.lambda, "", "tau^2 g'g / sigma^2", ValueDomain::Linear},
        {"z_squared", s.z_squared, "", "(g'y)^2 / (sigma^2 g'g)", ValueDomain::Linear},
        {"c", s.c, "1/amplitude^2", "g'g / sigma^2 + 1 / tau^2", ValueDomain::Linear},
        {"d", s.d, "1/amplitude", "g'y / sigma^2", ValueDomain::Linear},
        {"log_b10_compact", compact.log(), "nats", "-1/2 ln(1 + lambda) + 1/2 lambda/(1 + lambda) z^2",
         ValueDomain::Linear},
        {"log_b10_general", general.log(), "nats", "-1/2 ln(tau^2 c) + d^2 / (2c)", ValueDomain::Linear},
        {"log_b10_quadrature", quadrature, "nats", quadrature_note, ValueDomain::Linear},
    };
    report.evidence = {{"H0", evidences[0].log_value}, {"H1", evidences[1].log_value}};
    report.bayes_factors = {{"H1", "H0", weight_of_evidence(evidences[1], evidences[0])}};
    report.posterior = model_posterior(models, evidences);
    return report;
}

}  // namespace occam
