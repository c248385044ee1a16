#include "occam/evidence.hpp"

#include "occam/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace occam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Fnv1a {
public:
    void byte(std::uint8_t b) {
        state_ ^= b;
        state_ *= 0x100000001b3ULL;
    }
    void real(double x) {
        if (x == 0.0) {
            x = 0.0;  // -0.0 and 0.0 hash alike
        }
        const auto bits = std::bit_cast<std::uint64_t>(x);
        for (int i = 0; i < 8; ++i) {
            byte(static_cast<std::uint8_t>(bits >> (8 * i)));
        }
    }
    std::uint64_t value() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

struct Projections {
    double gg = 0.0;
    double gy = 0.0;
};

Projections project(std::span<const double> y, std::span<const double> g) {
    Projections p;
    for (std::size_t i = 0; i < y.size(); ++i) {
        p.gg += g[i] * g[i];
        p.gy += g[i] * y[i];
    }
    return p;
}

void check_signal_inputs(const SignalDataset& data, std::span<const double> pattern, double noise_sd,
                         double prior_sd) {
    if (pattern.size() != data.size()) {
        throw UsageError("signal pattern length " + std::to_string(pattern.size()) +
                         " does not match " + std::to_string(data.size()) + " residuals");
    }
    if (std::all_of(pattern.begin(), pattern.end(), [](double g) { return g == 0.0; })) {
        throw UsageError("signal pattern is all zeros");
    }
    if (!std::isfinite(noise_sd) || noise_sd <= 0.0) {
        throw DomainError("noise_sd must be positive and finite");
    }
    if (!std::isfinite(prior_sd) || prior_sd < 0.0) {
        throw DomainError("prior sd must be finite and nonnegative");
    }
}

SignalDataset shifted(const SignalDataset& data, std::span<const double> pattern, double mean) {
    if (mean == 0.0) {
        return data;
    }
    std::vector<double> r(data.residuals().begin(), data.residuals().end());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] -= mean * pattern[i];
    }
    return SignalDataset::make(std::move(r));
}

std::span<const double> pattern_slice(const LinearSignalLikelihood& signal, std::size_t offset,
                                      std::size_t length) {
    if (offset + length > signal.signal_pattern.size()) {
        throw UsageError("residuals extend past the end of the signal pattern");
    }
    return std::span<const double>(signal.signal_pattern).subspan(offset, length);
}

void check_shape(const CompositeModel& model, const Observation& data) {
    if (data_shape(model.likelihood()) != data_shape(data)) {
        throw UsageError("model '" + model.id() + "' expects " +
                         (data_shape(model.likelihood()) == DataShape::Vector ? "a residual vector"
                                                                              : "a scalar observation"));
    }
}

// log p(data | model) with the parameter prior replaced by `prior` and the
// signal pattern read from `offset`.
LogValue conditional_log_evidence(const CompositeModel& model, const std::optional<GaussianPrior>& prior,
                                  const Observation& data, std::size_t offset) {
    check_shape(model, data);
    return std::visit(
        [&](const auto& lk) -> LogValue {
            using T = std::decay_t<decltype(lk)>;
            if constexpr (std::is_same_v<T, NullLikelihood>) {
                return log_evidence_null(std::get<SignalDataset>(data), lk.noise_sd);
            } else if constexpr (std::is_same_v<T, LinearSignalLikelihood>) {
                const auto& y = std::get<SignalDataset>(data);
                return log_evidence_signal(y, pattern_slice(lk, offset, y.size()), lk.noise_sd, *prior);
            } else if constexpr (std::is_same_v<T, LocationLikelihood>) {
                return log_evidence_location(std::get<double>(data), *prior, lk.noise_sd);
            } else {
                return log_gaussian_density(std::get<double>(data), lk.predicted_mean,
                                            lk.noise_sd * lk.noise_sd);
            }
        },
        model.likelihood());
}

std::optional<GaussianPrior> starting_prior(const CompositeModel& model) {
    if (!model.parameter_prior()) {
        return std::nullopt;
    }
    return effective_prior(model);
}

}  // namespace

SignalDataset SignalDataset::make(std::vector<double> residuals) {
    if (residuals.empty()) {
        throw UsageError("SignalDataset: no residuals");
    }
    for (double y : residuals) {
        if (!std::isfinite(y)) {
            throw DomainError("SignalDataset: non-finite residual");
        }
    }
    SignalDataset d;
    d.residuals_ = std::move(residuals);
    return d;
}

DataShape data_shape(const Observation& observation) noexcept {
    return std::holds_alternative<SignalDataset>(observation) ? DataShape::Vector : DataShape::Scalar;
}

DataFingerprint fingerprint(std::span<const Observation> observations) {
    Fnv1a h;
    for (const Observation& obs : observations) {
        if (const auto* v = std::get_if<SignalDataset>(&obs)) {
            for (double y : v->residuals()) {
                h.byte('v');
                h.real(y);
            }
        } else {
            h.byte('s');
            h.real(std::get<double>(obs));
        }
    }
    return DataFingerprint{h.value()};
}

DataFingerprint fingerprint(const Observation& observation) {
    return fingerprint(std::span<const Observation>(&observation, 1));
}

std::size_t ModelPosterior::argmax() const noexcept {
    std::size_t best = 0;
    for (std::size_t i = 1; i < log_posteriors_.size(); ++i) {
        if (log_posteriors_[i] > log_posteriors_[best]) {
            best = i;
        }
    }
    return best;
}

double ModelPosterior::probability(const std::string& model_id) const {
    for (const Entry& e : entries_) {
        if (e.model_id == model_id) {
            return e.probability;
        }
    }
    throw UsageError("no model '" + model_id + "' in posterior");
}

ModelPosterior make_posterior(std::vector<std::string> ids, std::vector<double> log_unnormalized) {
    if (ids.empty() || ids.size() != log_unnormalized.size()) {
        throw UsageError("posterior needs at least one model and one term per model");
    }
    std::set<std::string> seen;
    for (const std::string& id : ids) {
        if (!seen.insert(id).second) {
            throw UsageError("duplicate model id '" + id + "'");
        }
    }
    std::vector<LogValue> terms;
    terms.reserve(log_unnormalized.size());
    for (double t : log_unnormalized) {
        terms.push_back(LogValue::from_log(t));
    }
    const LogValue norm = log_sum_exp(terms);
    if (norm.is_zero()) {
        throw DomainError("posterior undefined: every model assigns zero probability to the data");
    }
    ModelPosterior p;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const LogValue lp = terms[i] / norm;
        p.log_posteriors_.push_back(lp);
        p.entries_.push_back({std::move(ids[i]), lp.linear()});
    }
    return p;
}

LogValue log_evidence_null(const SignalDataset& data, double noise_sd) {
    if (!std::isfinite(noise_sd) || noise_sd <= 0.0) {
        throw DomainError("log_evidence_null: noise_sd must be positive and finite");
    }
    const double var = noise_sd * noise_sd;
    double yy = 0.0;
    for (double y : data.residuals()) {
        yy += y * y;
    }
    const double n = static_cast<double>(data.size());
    return LogValue::from_log(-0.5 * n * std::log(2.0 * std::numbers::pi * var) - yy / (2.0 * var));
}

SignalStatistics signal_statistics(const SignalDataset& data, std::span<const double> pattern,
                                   double noise_sd, double prior_sd) {
    check_signal_inputs(data, pattern, noise_sd, prior_sd);
    const Projections p = project(data.residuals(), pattern);
    const double var = noise_sd * noise_sd;
    const double tau2 = prior_sd * prior_sd;
    SignalStatistics s{};
    s.lambda = tau2 * p.gg / var;
    s.z_squared = p.gy * p.gy / (var * p.gg);
    s.c = prior_sd == 0.0 ? kInf : p.gg / var + 1.0 / tau2;
    s.d = p.gy / var;
    return s;
}

LogValue log_bayes_factor_signal(const SignalDataset& data, std::span<const double> pattern,
                                 double noise_sd, double prior_sd) {
    const SignalStatistics s = signal_statistics(data, pattern, noise_sd, prior_sd);
    const LogValue compact =
        LogValue::from_log(-0.5 * std::log1p(s.lambda) + 0.5 * (s.lambda / (1.0 + s.lambda)) * s.z_squared);
#ifndef NDEBUG
    const LogValue general = log_bayes_factor_signal_general(data, pattern, noise_sd, prior_sd);
    if (std::abs(compact.log() - general.log()) > 1e-9 * std::max(1.0, std::abs(compact.log()))) {
        throw std::logic_error("log_bayes_factor_signal: compact and general forms disagree");
    }
#endif
    return compact;
}

LogValue log_bayes_factor_signal_general(const SignalDataset& data, std::span<const double> pattern,
                                         double noise_sd, double prior_sd) {
    const SignalStatistics s = signal_statistics(data, pattern, noise_sd, prior_sd);
    if (prior_sd == 0.0) {
        return LogValue::one();
    }
    const double tau2_c = prior_sd * prior_sd * s.c;
    return LogValue::from_log(-0.5 * std::log(tau2_c) + s.d * s.d / (2.0 * s.c));
}

LogValue log_evidence_signal(const SignalDataset& data, std::span<const double> pattern, double noise_sd,
                             double prior_sd) {
    if (prior_sd == 0.0) {
        check_signal_inputs(data, pattern, noise_sd, prior_sd);
        return log_evidence_null(data, noise_sd);
    }
    // Same value as log_evidence_null + log B10, but -y'y/2s^2 + d^2/2c is
    // rewritten as -rss/2s^2 - z^2/(2(1+lambda)) with rss the residual sum of
    // squares about the least-squares amplitude, which does not cancel when
    // y'y/s^2 is large.
    const SignalStatistics s = signal_statistics(data, pattern, noise_sd, prior_sd);
    const Projections p = project(data.residuals(), pattern);
    const double fit = p.gy / p.gg;
    double rss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = data.residuals()[i] - fit * pattern[i];
        rss += r * r;
    }
    const double var = noise_sd * noise_sd;
    const double n = static_cast<double>(data.size());
    return LogValue::from_log(-0.5 * n * std::log(2.0 * std::numbers::pi * var) - 0.5 * std::log1p(s.lambda) -
                              rss / (2.0 * var) - s.z_squared / (2.0 * (1.0 + s.lambda)));
}

LogValue log_evidence_signal(const SignalDataset& data, std::span<const double> pattern, double noise_sd,
                             const GaussianPrior& prior) {
    check_signal_inputs(data, pattern, noise_sd, prior.sd);
    return log_evidence_signal(shifted(data, pattern, prior.mean), pattern, noise_sd, prior.sd);
}

LogValue log_evidence_location(double y, const GaussianPrior& prior, double noise_sd) {
    if (!std::isfinite(noise_sd) || noise_sd <= 0.0) {
        throw DomainError("log_evidence_location: noise_sd must be positive and finite");
    }
    return log_gaussian_density(y, prior.mean, noise_sd * noise_sd + prior.variance());
}

LogEvidence log_evidence(const CompositeModel& model, const Observation& data) {
    if (const auto* signal = std::get_if<LinearSignalLikelihood>(&model.likelihood())) {
        if (const auto* y = std::get_if<SignalDataset>(&data); y && y->size() != signal->signal_pattern.size()) {
            throw UsageError("model '" + model.id() + "': pattern length " +
                             std::to_string(signal->signal_pattern.size()) + " does not match " +
                             std::to_string(y->size()) + " residuals");
        }
    }
    return LogEvidence{model.id(), conditional_log_evidence(model, starting_prior(model), data, 0),
                       fingerprint(data)};
}

GaussianPrior parameter_posterior(const CompositeModel& model, const GaussianPrior& prior,
                                  const Observation& data, std::size_t pattern_offset) {
    check_shape(model, data);
    if (prior.is_point_mass()) {
        return prior;
    }
    if (const auto* signal = std::get_if<LinearSignalLikelihood>(&model.likelihood())) {
        const auto& y = std::get<SignalDataset>(data);
        const Projections p = project(y.residuals(), pattern_slice(*signal, pattern_offset, y.size()));
        const double var = signal->noise_sd * signal->noise_sd;
        const double precision = 1.0 / prior.variance() + p.gg / var;
        const double mean = (prior.mean / prior.variance() + p.gy / var) / precision;
        return GaussianPrior{mean, 1.0 / std::sqrt(precision)};
    }
    if (const auto* location = std::get_if<LocationLikelihood>(&model.likelihood())) {
        return apply_constraint(prior, AuxiliaryConstraint{std::get<double>(data), location->noise_sd});
    }
    throw UsageError("model '" + model.id() + "' has no free parameter");
}

double log_bayes_factor(const LogEvidence& a, const LogEvidence& b) {
    if (a.data != b.data) {
        throw UsageError("Bayes factor of '" + a.model_id + "' and '" + b.model_id +
                         "' compares evidences computed on different data");
    }
    if (a.log_value.is_zero() && b.log_value.is_zero()) {
        throw DomainError("Bayes factor undefined: both evidences are zero");
    }
    return a.log_value.log() - b.log_value.log();
}

WeightOfEvidence weight_of_evidence(const LogEvidence& a, const LogEvidence& b) {
    const double nats = log_bayes_factor(a, b);
    const std::string linear = nats == kInf ? "inf" : render_linear(LogValue::from_log(nats));
    return WeightOfEvidence{nats, nats / std::numbers::ln10, linear};
}

ModelPosterior model_posterior(std::span<const CompositeModel> models, std::span<const LogEvidence> evidences) {
    if (models.empty()) {
        throw UsageError("model_posterior: no models");
    }
    if (models.size() != evidences.size()) {
        throw UsageError("model_posterior: one evidence per model required");
    }
    std::vector<std::string> ids;
    std::vector<double> terms;
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (models[i].id() != evidences[i].model_id) {
            throw UsageError("model_posterior: evidence '" + evidences[i].model_id +
                             "' is not aligned with model '" + models[i].id() + "'");
        }
        if (evidences[i].data != evidences[0].data) {
            throw UsageError("model_posterior: evidences were computed on different data");
        }
        ids.push_back(models[i].id());
        terms.push_back(std::log(models[i].prior_weight()) + evidences[i].log_value.log());
    }
    return make_posterior(std::move(ids), std::move(terms));
}

std::vector<ModelPosterior> sequential_posterior(std::span<const CompositeModel> models,
                                                 std::span<const Observation> batches) {
    if (batches.empty()) {
        throw UsageError("sequential_posterior: no batches");
    }
    if (models.empty()) {
        throw UsageError("sequential_posterior: no models");
    }

    struct State {
        std::optional<GaussianPrior> prior;
        double log_evidence = 0.0;
        std::size_t offset = 0;
    };
    std::vector<State> states;
    std::vector<std::string> ids;
    for (const CompositeModel& m : models) {
        states.push_back({starting_prior(m), 0.0, 0});
        ids.push_back(m.id());
    }

    std::vector<ModelPosterior> trajectory;
    trajectory.reserve(batches.size());
    for (const Observation& batch : batches) {
        std::vector<double> terms;
        for (std::size_t i = 0; i < models.size(); ++i) {
            const CompositeModel& model = models[i];
            State& st = states[i];
            st.log_evidence += conditional_log_evidence(model, st.prior, batch, st.offset).log();
            if (st.prior) {
                st.prior = parameter_posterior(model, *st.prior, batch, st.offset);
            }
            if (const auto* y = std::get_if<SignalDataset>(&batch)) {
                st.offset += y->size();
            }
            terms.push_back(std::log(model.prior_weight()) + st.log_evidence);
        }
        trajectory.push_back(make_posterior(ids, std::move(terms)));
    }

    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto* signal = std::get_if<LinearSignalLikelihood>(&models[i].likelihood());
        if (signal && states[i].offset != signal->signal_pattern.size()) {
            throw UsageError("sequential_posterior: batches cover " + std::to_string(states[i].offset) +
                             " epochs but model '" + models[i].id() + "' has a pattern of length " +
                             std::to_string(signal->signal_pattern.size()));
        }
    }
    return trajectory;
}

EliminationReport elimination_report(std::span<const ModelPosterior> trajectory, double epsilon) {
    if (trajectory.empty()) {
        throw UsageError("elimination_report: empty trajectory");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw UsageError("elimination_report: epsilon must lie in (0, 1)");
    }
    const auto& first = trajectory.front().entries();
    for (const ModelPosterior& step : trajectory) {
        if (step.size() != first.size()) {
            throw UsageError("elimination_report: steps have different model counts");
        }
        for (std::size_t i = 0; i < first.size(); ++i) {
            if (step.entries()[i].model_id != first[i].model_id) {
                throw UsageError("elimination_report: steps list models in different orders");
            }
        }
    }

    const double log_eps = std::log(epsilon);
    EliminationReport report{epsilon, {}, {}};
    for (std::size_t i = 0; i < first.size(); ++i) {
        std::optional<std::size_t> below_since;
        for (std::size_t t = 0; t < trajectory.size(); ++t) {
            if (trajectory[t].log_posteriors()[i].log() < log_eps) {
                if (!below_since) {
                    below_since = t;
                }
            } else {
                below_since.reset();
            }
        }
        report.models.push_back({first[i].model_id, below_since});
    }
    for (std::size_t t = 1; t < trajectory.size(); ++t) {
        if (trajectory[t].argmax() != trajectory[t - 1].argmax()) {
            report.crisis_steps.push_back(t);
        }
    }
    return report;
}

}  // namespace occam
