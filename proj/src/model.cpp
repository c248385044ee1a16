#include "occam/model.hpp"

#include "occam/errors.hpp"

#include <cmath>
#include <numeric>

namespace occam {

namespace {

void require_positive_sd(double sd, const std::string& what) {
    if (!std::isfinite(sd) || sd <= 0.0) {
        throw DomainError(what + ": noise_sd must be positive and finite");
    }
}

}  // namespace

GaussianPrior GaussianPrior::make(double mean, double sd) {
    if (!std::isfinite(mean) || !std::isfinite(sd) || sd < 0.0) {
        throw DomainError("GaussianPrior: mean must be finite and sd finite and nonnegative");
    }
    return GaussianPrior{mean, sd};
}

DataShape data_shape(const Likelihood& likelihood) noexcept {
    if (std::holds_alternative<NullLikelihood>(likelihood) ||
        std::holds_alternative<LinearSignalLikelihood>(likelihood)) {
        return DataShape::Vector;
    }
    return DataShape::Scalar;
}

bool has_free_parameter(const Likelihood& likelihood) noexcept {
    return std::holds_alternative<LinearSignalLikelihood>(likelihood) ||
           std::holds_alternative<LocationLikelihood>(likelihood);
}

double noise_sd(const Likelihood& likelihood) noexcept {
    return std::visit([](const auto& l) { return l.noise_sd; }, likelihood);
}

CompositeModel CompositeModel::make(std::string id, double prior_weight, Likelihood likelihood,
                                    std::optional<GaussianPrior> parameter_prior,
                                    std::vector<AuxiliaryConstraint> constraints) {
    const std::string where = "model '" + id + "'";
    if (id.empty()) {
        throw UsageError("model id must not be empty");
    }
    if (!std::isfinite(prior_weight) || prior_weight <= 0.0) {
        throw DomainError(where + ": prior weight must be positive and finite");
    }
    require_positive_sd(noise_sd(likelihood), where);

    if (const auto* signal = std::get_if<LinearSignalLikelihood>(&likelihood)) {
        if (signal->signal_pattern.empty()) {
            throw UsageError(where + ": signal pattern is empty");
        }
        double norm2 = 0.0;
        for (double g : signal->signal_pattern) {
            if (!std::isfinite(g)) {
                throw DomainError(where + ": signal pattern has a non-finite entry");
            }
            norm2 += g * g;
        }
        if (norm2 <= 0.0) {
            throw UsageError(where + ": signal pattern is all zeros");
        }
    }
    if (const auto* point = std::get_if<PointPredictionLikelihood>(&likelihood)) {
        if (!std::isfinite(point->predicted_mean)) {
            throw DomainError(where + ": predicted mean must be finite");
        }
    }

    if (has_free_parameter(likelihood)) {
        if (!parameter_prior) {
            throw UsageError(where + ": this likelihood requires a parameter prior");
        }
        GaussianPrior::make(parameter_prior->mean, parameter_prior->sd);
    } else {
        if (parameter_prior) {
            throw UsageError(where + ": this likelihood has no free parameter; prior not allowed");
        }
        if (!constraints.empty()) {
            throw UsageError(where + ": constraints need a parameter prior");
        }
    }
    for (const AuxiliaryConstraint& c : constraints) {
        if (!std::isfinite(c.observed)) {
            throw DomainError(where + ": constraint observation must be finite");
        }
        require_positive_sd(c.noise_sd, where + " constraint");
    }

    CompositeModel m;
    m.id_ = std::move(id);
    m.prior_weight_ = prior_weight;
    m.likelihood_ = std::move(likelihood);
    m.parameter_prior_ = parameter_prior;
    m.constraints_ = std::move(constraints);
    return m;
}

CompositeModel CompositeModel::with_prior(const GaussianPrior& prior) const {
    return make(id_, prior_weight_, likelihood_, prior, {});
}

GaussianPrior apply_constraint(const GaussianPrior& prior, const AuxiliaryConstraint& constraint) {
    if (prior.is_point_mass()) {
        throw UnsupportedOperation("apply_constraint: a point-mass prior cannot be updated");
    }
    if (!std::isfinite(constraint.noise_sd) || constraint.noise_sd <= 0.0) {
        throw DomainError("apply_constraint: constraint noise_sd must be positive and finite");
    }
    const double prior_precision = 1.0 / prior.variance();
    const double obs_precision = 1.0 / (constraint.noise_sd * constraint.noise_sd);
    const double precision = prior_precision + obs_precision;
    const double mean = (prior.mean * prior_precision + constraint.observed * obs_precision) / precision;
    return GaussianPrior{mean, 1.0 / std::sqrt(precision)};
}

GaussianPrior effective_prior(const CompositeModel& model) {
    if (!model.parameter_prior()) {
        throw UsageError("effective_prior: model '" + model.id() + "' has no parameter prior");
    }
    return std::accumulate(model.constraints().begin(), model.constraints().end(),
                           *model.parameter_prior(), apply_constraint);
}

}  // namespace occam
