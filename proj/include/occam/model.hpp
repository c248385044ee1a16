#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace occam {

/// N(mean, sd^2) prior on a scalar parameter. sd == 0 is a point mass.
struct GaussianPrior {
    double mean = 0.0;
    double sd = 0.0;

    /// Throws DomainError unless mean is finite and sd is finite and >= 0.
    static GaussianPrior make(double mean, double sd);
    double variance() const noexcept { return sd * sd; }
    bool is_point_mass() const noexcept { return sd == 0.0; }

    friend bool operator==(const GaussianPrior&, const GaussianPrior&) = default;
};

/// Noise only: every residual is N(0, noise_sd^2).
struct NullLikelihood {
    double noise_sd = 1.0;
    friend bool operator==(const NullLikelihood&, const NullLikelihood&) = default;
};

/// y_i = A * pattern_i + eps_i, eps_i ~ N(0, noise_sd^2); A is the free parameter.
struct LinearSignalLikelihood {
    std::vector<double> signal_pattern;
    double noise_sd = 1.0;
    friend bool operator==(const LinearSignalLikelihood&, const LinearSignalLikelihood&) = default;
};

/// Scalar y ~ N(theta, noise_sd^2); theta is the free parameter.
struct LocationLikelihood {
    double noise_sd = 1.0;
    friend bool operator==(const LocationLikelihood&, const LocationLikelihood&) = default;
};

/// Scalar y ~ N(predicted_mean, noise_sd^2) with no free parameter.
struct PointPredictionLikelihood {
    double predicted_mean = 0.0;
    double noise_sd = 1.0;
    friend bool operator==(const PointPredictionLikelihood&, const PointPredictionLikelihood&) = default;
};

using Likelihood =
    std::variant<NullLikelihood, LinearSignalLikelihood, LocationLikelihood, PointPredictionLikelihood>;

/// Independent evidence w ~ N(theta, noise_sd^2) about a model's parameter.
struct AuxiliaryConstraint {
    double observed = 0.0;
    double noise_sd = 1.0;
    friend bool operator==(const AuxiliaryConstraint&, const AuxiliaryConstraint&) = default;
};

/// Whether a likelihood form consumes a residual vector or a scalar.
enum class DataShape { Vector, Scalar };

DataShape data_shape(const Likelihood& likelihood) noexcept;
bool has_free_parameter(const Likelihood& likelihood) noexcept;
double noise_sd(const Likelihood& likelihood) noexcept;

/// Core theory plus auxiliaries, evaluated as one probabilistic model.
/// Immutable once built; `make` enforces the structural rules:
///  - Null and PointPrediction carry neither a parameter prior nor constraints;
///  - LinearSignal and Location require a parameter prior;
///  - every noise sd is positive and finite, prior_weight is positive and finite;
///  - a signal pattern is nonempty with nonzero norm.
class CompositeModel {
public:
    static CompositeModel make(std::string id, double prior_weight, Likelihood likelihood,
                               std::optional<GaussianPrior> parameter_prior = std::nullopt,
                               std::vector<AuxiliaryConstraint> constraints = {});

    const std::string& id() const noexcept { return id_; }
    double prior_weight() const noexcept { return prior_weight_; }
    const Likelihood& likelihood() const noexcept { return likelihood_; }
    const std::optional<GaussianPrior>& parameter_prior() const noexcept { return parameter_prior_; }
    const std::vector<AuxiliaryConstraint>& constraints() const noexcept { return constraints_; }

    /// Same model with a different parameter prior and no constraints; used
    /// when chaining posteriors across data batches.
    CompositeModel with_prior(const GaussianPrior& prior) const;

    friend bool operator==(const CompositeModel&, const CompositeModel&) = default;

private:
    CompositeModel() = default;

    std::string id_;
    double prior_weight_ = 1.0;
    Likelihood likelihood_;
    std::optional<GaussianPrior> parameter_prior_;
    std::vector<AuxiliaryConstraint> constraints_;
};

/// Conjugate update of a Gaussian prior by one constraint observation.
/// Throws UnsupportedOperation for a point-mass prior.
GaussianPrior apply_constraint(const GaussianPrior& prior, const AuxiliaryConstraint& constraint);

/// Parameter prior after folding every constraint in declaration order.
/// Throws UsageError when the model has no parameter prior.
GaussianPrior effective_prior(const CompositeModel& model);

}  // namespace occam
