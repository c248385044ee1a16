#include "occam/errors.hpp"
#include "occam/evidence.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace occam;

namespace {

std::vector<Observation> split(const std::vector<double>& y, const std::vector<std::size_t>& cuts) {
    std::vector<Observation> batches;
    std::size_t start = 0;
    for (std::size_t cut : cuts) {
        batches.emplace_back(SignalDataset::make(std::vector<double>(y.begin() + static_cast<long>(start),
                                                                     y.begin() + static_cast<long>(cut))));
        start = cut;
    }
    batches.emplace_back(
        SignalDataset::make(std::vector<double>(y.begin() + static_cast<long>(start), y.end())));
    return batches;
}

}  // namespace

TEST(ChainRule, JointEqualsSumOfConditionals) {
    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<std::size_t> len(2, 24);
    std::uniform_real_distribution<double> scale(0.2, 5.0);
    std::uniform_real_distribution<double> mean(-1.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = len(rng);
        const auto g = support::random_vector(rng, n, -2.0, 2.0);
        const auto y = support::random_vector(rng, n, -4.0, 4.0);
        const double sigma = scale(rng);
        const auto prior = GaussianPrior::make(mean(rng), scale(rng));
        const std::size_t k = std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);

        const auto model = CompositeModel::make("H1", 1.0, LinearSignalLikelihood{g, sigma}, prior);
        const double joint = log_evidence(model, Observation{SignalDataset::make(y)}).log_value.log();

        // First batch against the leading slice, second against the rest
        // under the updated amplitude prior.
        const std::vector<double> y1(y.begin(), y.begin() + static_cast<long>(k));
        const std::vector<double> y2(y.begin() + static_cast<long>(k), y.end());
        const std::vector<double> g1(g.begin(), g.begin() + static_cast<long>(k));
        const std::vector<double> g2(g.begin() + static_cast<long>(k), g.end());
        const auto first = CompositeModel::make("H1", 1.0, LinearSignalLikelihood{g1, sigma}, prior);
        const double l1 = log_evidence(first, Observation{SignalDataset::make(y1)}).log_value.log();
        const auto updated = parameter_posterior(model, prior, Observation{SignalDataset::make(y1)}, 0);
        const auto second = CompositeModel::make("H1", 1.0, LinearSignalLikelihood{g2, sigma}, updated);
        const double l2 = log_evidence(second, Observation{SignalDataset::make(y2)}).log_value.log();
        EXPECT_NEAR(joint, l1 + l2, 1e-10);
    }
}

TEST(SequentialPosterior, FinalStepMatchesOneShot) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 12;
        const auto g = support::random_vector(rng, n, -2.0, 2.0);
        const auto y = support::random_vector(rng, n, -3.0, 3.0);
        const std::vector<CompositeModel> models = {
            CompositeModel::make("H0", 2.0, NullLikelihood{1.0}),
            CompositeModel::make("H1", 1.0, LinearSignalLikelihood{g, 1.0}, GaussianPrior::make(0.5, 1.5)),
        };
        const auto batches = split(y, {3, 4, 9});
        const auto trajectory = sequential_posterior(models, batches);
        ASSERT_EQ(trajectory.size(), 4u);

        const Observation all{SignalDataset::make(y)};
        const std::vector<LogEvidence> ev = {log_evidence(models[0], all), log_evidence(models[1], all)};
        const auto one_shot = model_posterior(models, ev);
        for (std::size_t i = 0; i < 2; ++i) {
            EXPECT_NEAR(trajectory.back().log_posteriors()[i].log(), one_shot.log_posteriors()[i].log(), 1e-10);
        }
    }
}

TEST(SequentialPosterior, PatternLengthMustBeCovered) {
    const std::vector<CompositeModel> models = {
        CompositeModel::make("H1", 1.0, LinearSignalLikelihood{{1.0, 1.0, 1.0}, 1.0}, GaussianPrior::make(0.0, 1.0)),
    };
    const std::vector<Observation> short_batches = {SignalDataset::make({1.0}), SignalDataset::make({1.0})};
    EXPECT_THROW(sequential_posterior(models, short_batches), UsageError);
    const std::vector<Observation> long_batches = {SignalDataset::make({1.0, 1.0}), SignalDataset::make({1.0, 1.0})};
    EXPECT_THROW(sequential_posterior(models, long_batches), UsageError);
    EXPECT_THROW(sequential_posterior(models, std::span<const Observation>{}), UsageError);
}

TEST(SequentialPosterior, ScalarBatchesForLocationModel) {
    // Two scalar measurements of theta: chaining must equal the closed form
    // y1 ~ N(m, s^2 + t^2), y2 | y1 ~ N(m1, s^2 + t1^2).
    const auto prior = GaussianPrior::make(0.0, 2.0);
    const std::vector<CompositeModel> models = {
        CompositeModel::make("loc", 1.0, LocationLikelihood{1.0}, prior),
        CompositeModel::make("pt", 1.0, PointPredictionLikelihood{0.0, 1.0}),
    };
    const std::vector<Observation> batches = {1.0, 1.5};
    const auto trajectory = sequential_posterior(models, batches);

    const double t1sq = 1.0 / (1.0 / 4.0 + 1.0);
    const double m1 = t1sq * 1.0;
    const double loc = log_gaussian_density(1.0, 0.0, 5.0).log() + log_gaussian_density(1.5, m1, 1.0 + t1sq).log();
    const double pt = log_gaussian_density(1.0, 0.0, 1.0).log() + log_gaussian_density(1.5, 0.0, 1.0).log();
    const double expected = 1.0 / (1.0 + std::exp(pt - loc));
    EXPECT_NEAR(trajectory.back().probability("loc"), expected, 1e-12);
}

TEST(SequentialPosterior, NullResultsErodeTheSignalModel) {
    // Each batch is orthogonal to its slice of the pattern (g'y = 0), so every
    // step adds Occam penalty and no fit.
    const std::vector<double> g(16, 1.0);
    const std::vector<CompositeModel> models = {
        CompositeModel::make("H0", 1.0, NullLikelihood{1.0}),
        CompositeModel::make("H1", 1.0, LinearSignalLikelihood{g, 1.0}, GaussianPrior::make(0.0, 10.0)),
    };
    std::vector<Observation> batches;
    for (int i = 0; i < 8; ++i) {
        batches.emplace_back(SignalDataset::make({0.7, -0.7}));
    }
    const auto trajectory = sequential_posterior(models, batches);
    double previous = 0.5;
    for (const auto& step : trajectory) {
        EXPECT_LT(step.probability("H1"), previous);
        previous = step.probability("H1");
    }
}

TEST(EliminationReport, CollapseAndCrisis) {
    // Posterior of model B rises then collapses; C never recovers after step 1.
    const std::vector<std::string> ids = {"A", "B", "C"};
    const std::vector<ModelPosterior> trajectory = {
        make_posterior(ids, {std::log(0.6), std::log(0.3), std::log(0.1)}),
        make_posterior(ids, {std::log(0.2), std::log(0.8), std::log(1e-9)}),
        make_posterior(ids, {std::log(0.9), std::log(1e-8), std::log(1e-12)}),
        make_posterior(ids, {std::log(1.0), std::log(1e-10), std::log(1e-12)}),
    };
    const auto report = elimination_report(trajectory);
    EXPECT_EQ(report.epsilon, kDefaultEliminationEpsilon);
    ASSERT_EQ(report.models.size(), 3u);
    EXPECT_FALSE(report.models[0].eliminated_at.has_value());
    EXPECT_EQ(report.models[1].eliminated_at, std::optional<std::size_t>(2));
    EXPECT_EQ(report.models[2].eliminated_at, std::optional<std::size_t>(1));
    EXPECT_EQ(report.crisis_steps, (std::vector<std::size_t>{1, 2}));
}

TEST(EliminationReport, RecoveryClearsElimination) {
    const std::vector<std::string> ids = {"A", "B"};
    const std::vector<ModelPosterior> trajectory = {
        make_posterior(ids, {0.0, -30.0}),
        make_posterior(ids, {0.0, 0.0}),
    };
    const auto report = elimination_report(trajectory);
    EXPECT_FALSE(report.models[1].eliminated_at.has_value());
    // A tie keeps the earlier model as argmax, so no crisis.
    EXPECT_TRUE(report.crisis_steps.empty());
}

TEST(EliminationReport, Validation) {
    const std::vector<ModelPosterior> trajectory = {make_posterior({"A", "B"}, {0.0, 0.0})};
    EXPECT_THROW(elimination_report(trajectory, 0.0), UsageError);
    EXPECT_THROW(elimination_report(trajectory, 1.0), UsageError);
    EXPECT_THROW(elimination_report(std::span<const ModelPosterior>{}), UsageError);
    const std::vector<ModelPosterior> reordered = {make_posterior({"A", "B"}, {0.0, 0.0}),
                                                   make_posterior({"B", "A"}, {0.0, 0.0})};
    EXPECT_THROW(elimination_report(reordered), UsageError);
}
