#pragma once

#include "occam/evidence.hpp"
#include "occam/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace occam {

/// Newtonian gravitational constant, m^3 kg^-1 s^-2 (CODATA 2018).
inline constexpr double kGravitationalConstant = 6.67430e-11;
/// Speed of light in vacuum, m/s.
inline constexpr double kSpeedOfLight = 2.99792458e8;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kDaysPerJulianCentury = 36525.0;

struct OrbitSpec {
    double semi_major_axis_m;
    double eccentricity;
    double orbital_period_days;
    double central_mass_kg;
};

/// Mercury around the Sun.
inline constexpr OrbitSpec kMercuryOrbit{5.7909e10, 0.205630, 87.9691, 1.98892e30};

/// Relativistic perihelion advance 6 pi G M / (a (1 - e^2) c^2) per orbit,
/// accumulated over a Julian century and expressed in arcseconds.
/// Throws DomainError for an invalid orbit (e outside [0, 1), nonpositive a,
/// period or mass).
double gr_precession_arcsec_per_century(const OrbitSpec& orbit);

enum class ValueDomain {
    Linear,  ///< value is the quantity itself
    Log,     ///< value is the natural log of the quantity
};

struct ReportValue {
    std::string label;
    double value;
    std::string units;
    std::string note;
    ValueDomain domain = ValueDomain::Linear;
};

struct EvidenceRow {
    std::string model_id;
    LogValue log_evidence;
};

struct CaseReport {
    std::string name;
    std::vector<ReportValue> values;
    std::vector<EvidenceRow> evidence;
    std::vector<BayesFactorRow> bayes_factors;
    ModelPosterior posterior;

    /// Throws UsageError for an unknown label.
    const ReportValue& value(const std::string& label) const;
};

struct MercuryParams {
    double y = 43.0;       ///< observed anomalous precession, arcsec/century
    double sigma = 0.5;    ///< measurement sd of y
    double tau = 20.0;     ///< prior sd of the Vulcan-induced precession
    double w = 0.0;        ///< summary of the null searches for Vulcan
    double sigma2 = 5.0;   ///< sd of w
};

/// Newton-plus-Vulcan ("H2", constrained by w) and general relativity ("H3",
/// predicting the GR precession of kMercuryOrbit), at equal prior weight.
std::vector<CompositeModel> mercury_models(const MercuryParams& params = {});

/// Throws DomainError unless sigma, tau, sigma2 are positive and y, w finite.
CaseReport run_mercury_case(const MercuryParams& params = {});

/// Pattern and amplitude of the built-in Neptune demonstration.
inline constexpr double kNeptuneDemoAmplitude = 2.0;
std::vector<double> neptune_demo_pattern();

/// y_i = amplitude * pattern_i + eps_i with eps_i ~ N(0, noise_sd^2).
///
/// Noise comes from std::mt19937_64 seeded with `seed` (the engine's output
/// sequence is fixed by the C++ standard) through Box-Muller: each pair of
/// draws u1, u2 = (next() >> 11) * 2^-53 yields
/// sqrt(-2 ln(1 - u1)) * {cos, sin}(2 pi u2), used in that order.
SignalDataset generate_uranus_residuals(std::span<const double> pattern, double amplitude, double noise_sd,
                                        std::uint64_t seed);

/// H0 (noise only) against H1 (signal with N(0, tau^2) amplitude), with the
/// Bayes factor evaluated in compact form, general form and by quadrature.
CaseReport run_neptune_case(std::span<const double> pattern, const SignalDataset& data, double sigma,
                            double tau, double quadrature_rel_tol = 1e-9);

}  // namespace occam
