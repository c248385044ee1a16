#pragma once

#include "occam/model.hpp"
#include "occam/numerics.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace occam {

/// Residuals y_i, one per epoch, aligned index-for-index with any signal
/// pattern they are evaluated against.
class SignalDataset {
public:
    /// Throws UsageError when empty and DomainError on a non-finite entry.
    static SignalDataset make(std::vector<double> residuals);

    std::span<const double> residuals() const noexcept { return residuals_; }
    std::size_t size() const noexcept { return residuals_.size(); }

    friend bool operator==(const SignalDataset&, const SignalDataset&) = default;

private:
    std::vector<double> residuals_;
};

/// What a model is evaluated on: a residual vector (Null, LinearSignal) or a
/// single scalar measurement (Location, PointPrediction).
using Observation = std::variant<SignalDataset, double>;

DataShape data_shape(const Observation& observation) noexcept;

/// Content hash of the data an evidence was computed on. Concatenating vector
/// batches gives the same fingerprint as the joined vector.
struct DataFingerprint {
    std::uint64_t value = 0;
    friend bool operator==(DataFingerprint, DataFingerprint) = default;
};

DataFingerprint fingerprint(std::span<const Observation> observations);
DataFingerprint fingerprint(const Observation& observation);

/// Derived quantities of the linear-signal evidence for a zero-mean prior.
struct SignalStatistics {
    double lambda;     ///< tau^2 g'g / sigma^2
    double z_squared;  ///< (g'y)^2 / (sigma^2 g'g)
    double c;          ///< g'g / sigma^2 + 1 / tau^2; +inf when tau == 0
    double d;          ///< g'y / sigma^2
};

/// Log marginal likelihood of one dataset under one model.
struct LogEvidence {
    std::string model_id;
    LogValue log_value;
    DataFingerprint data;
};

/// Normalized posterior over a model space, in declaration order.
class ModelPosterior {
public:
    struct Entry {
        std::string model_id;
        double probability;
    };

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const std::vector<LogValue>& log_posteriors() const noexcept { return log_posteriors_; }
    std::size_t size() const noexcept { return entries_.size(); }
    /// Index of the maximum-posterior model; ties go to the earlier model.
    std::size_t argmax() const noexcept;
    /// Throws UsageError for an unknown id.
    double probability(const std::string& model_id) const;

private:
    friend ModelPosterior make_posterior(std::vector<std::string> ids, std::vector<double> log_unnormalized);

    std::vector<Entry> entries_;
    std::vector<LogValue> log_posteriors_;
};

/// Builds a posterior from per-model log(prior weight * evidence) terms.
ModelPosterior make_posterior(std::vector<std::string> ids, std::vector<double> log_unnormalized);

LogValue log_evidence_null(const SignalDataset& data, double noise_sd);

SignalStatistics signal_statistics(const SignalDataset& data, std::span<const double> pattern,
                                   double noise_sd, double prior_sd);

/// log B10 in the compact (lambda, z^2) form for a zero-mean N(0, tau^2)
/// amplitude prior.
LogValue log_bayes_factor_signal(const SignalDataset& data, std::span<const double> pattern,
                                 double noise_sd, double prior_sd);

/// The same Bayes factor via -1/2 ln(tau^2 c) + d^2 / (2c). Kept separate so
/// the two algebraic routes can be checked against each other.
LogValue log_bayes_factor_signal_general(const SignalDataset& data, std::span<const double> pattern,
                                         double noise_sd, double prior_sd);

/// log p(y | H1) for a zero-mean prior with sd `prior_sd`. Equal to
/// log_evidence_null + log_bayes_factor_signal, evaluated without the
/// cancellation between those two terms.
LogValue log_evidence_signal(const SignalDataset& data, std::span<const double> pattern,
                             double noise_sd, double prior_sd);

/// log p(y | H1) for an arbitrary Gaussian amplitude prior. A prior mean m is
/// handled by evaluating the zero-mean formula on y - m g.
LogValue log_evidence_signal(const SignalDataset& data, std::span<const double> pattern,
                             double noise_sd, const GaussianPrior& prior);

/// log N(y | prior.mean, noise_sd^2 + prior.sd^2); sd == 0 is allowed.
LogValue log_evidence_location(double y, const GaussianPrior& prior, double noise_sd);

/// Dispatches on the model's likelihood form. Constraints are folded into
/// the parameter prior first. Throws UsageError on a data shape mismatch or
/// a pattern/residual length mismatch.
LogEvidence log_evidence(const CompositeModel& model, const Observation& data);

/// Posterior of the model's free parameter after seeing `data`, starting
/// from `prior`; `pattern_offset` selects the slice of a signal pattern that
/// the residuals align with. Point-mass priors are returned unchanged.
GaussianPrior parameter_posterior(const CompositeModel& model, const GaussianPrior& prior,
                                  const Observation& data, std::size_t pattern_offset = 0);

/// log p(D_a | M) - log p(D_b | M'). Throws UsageError when the two evidences
/// were computed on different data.
double log_bayes_factor(const LogEvidence& a, const LogEvidence& b);

struct WeightOfEvidence {
    double nats;
    double bans;         ///< log10 units
    std::string linear;  ///< Bayes factor rendered from the log value
};

WeightOfEvidence weight_of_evidence(const LogEvidence& a, const LogEvidence& b);

/// Weight of evidence for `numerator` over `denominator`.
struct BayesFactorRow {
    std::string numerator;
    std::string denominator;
    WeightOfEvidence weight;
};

/// p(M_i | D) proportional to prior_weight_i * p(D | M_i). Evidences must be
/// aligned with models by id and share one data fingerprint.
ModelPosterior model_posterior(std::span<const CompositeModel> models, std::span<const LogEvidence> evidences);

/// Posterior after each prefix of `batches`. Parameterized models carry their
/// conjugate parameter posterior forward, so element t equals the posterior
/// on batches 1..t concatenated. For signal models the batch lengths must
/// add up to the pattern length.
std::vector<ModelPosterior> sequential_posterior(std::span<const CompositeModel> models,
                                                 std::span<const Observation> batches);

struct ModelElimination {
    std::string model_id;
    /// First step from which the posterior stays below epsilon to the end.
    std::optional<std::size_t> eliminated_at;
};

struct EliminationReport {
    double epsilon;
    std::vector<ModelElimination> models;
    /// Steps where the maximum-posterior model differs from the previous step.
    std::vector<std::size_t> crisis_steps;
};

constexpr double kDefaultEliminationEpsilon = 1e-6;

/// Labels models whose posterior collapsed below epsilon. The trajectory is
/// not modified. Throws UsageError on an empty or inconsistent trajectory or
/// epsilon outside (0, 1).
EliminationReport elimination_report(std::span<const ModelPosterior> trajectory,
                                     double epsilon = kDefaultEliminationEpsilon);

}  // namespace occam
