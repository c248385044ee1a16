#include "occam/errors.hpp"
#include "occam/model.hpp"
#include "occam/numerics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace occam;

TEST(GaussianPrior, Validation) {
    EXPECT_NO_THROW(GaussianPrior::make(0.0, 0.0));
    EXPECT_TRUE(GaussianPrior::make(1.0, 0.0).is_point_mass());
    EXPECT_THROW(GaussianPrior::make(0.0, -1.0), DomainError);
    EXPECT_THROW(GaussianPrior::make(std::nan(""), 1.0), DomainError);
    EXPECT_THROW(GaussianPrior::make(0.0, std::numeric_limits<double>::infinity()), DomainError);
}

TEST(ApplyConstraint, VulcanSearchesShrinkThePrior) {
    const auto post = apply_constraint(GaussianPrior::make(0.0, 20.0), AuxiliaryConstraint{0.0, 5.0});
    EXPECT_NEAR(post.sd, 4.850712500726659, 1e-12);
    EXPECT_NEAR(post.mean, 0.0, 1e-15);
}

TEST(ApplyConstraint, MatchesNumericalMoments) {
    // N(1, 1) prior times N(w = 3 | theta, 1) is N(2, 1/2).
    const auto post = apply_constraint(GaussianPrior::make(1.0, 1.0), AuxiliaryConstraint{3.0, 1.0});
    EXPECT_NEAR(post.mean, 2.0, 1e-14);
    EXPECT_NEAR(post.sd, std::sqrt(0.5), 1e-14);

    const auto density = [](double t) {
        return std::exp(log_gaussian_density(t, 1.0, 1.0).log() + log_gaussian_density(3.0, t, 1.0).log());
    };
    const auto m = support::simpson_moments(density, -10.0, 14.0);
    EXPECT_NEAR(post.mean, m.mean, 1e-9);
    EXPECT_NEAR(post.sd, m.sd, 1e-9);
}

TEST(ApplyConstraint, RandomizedAgainstNumericalMoments) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> mean(-5.0, 5.0);
    std::uniform_real_distribution<double> sd(0.2, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto prior = GaussianPrior::make(mean(rng), sd(rng));
        const AuxiliaryConstraint c{mean(rng), sd(rng)};
        const auto post = apply_constraint(prior, c);
        const auto density = [&](double t) {
            return std::exp(log_gaussian_density(t, prior.mean, prior.variance()).log() +
                            log_gaussian_density(c.observed, t, c.noise_sd * c.noise_sd).log());
        };
        const double lo = std::min(prior.mean, c.observed) - 40.0;
        const double hi = std::max(prior.mean, c.observed) + 40.0;
        const auto m = support::simpson_moments(density, lo, hi);
        EXPECT_NEAR(post.mean, m.mean, 1e-7);
        EXPECT_NEAR(post.sd, m.sd, 1e-7);
    }
}

TEST(ApplyConstraint, PointMassIsUnsupported) {
    EXPECT_THROW(apply_constraint(GaussianPrior::make(0.0, 0.0), AuxiliaryConstraint{0.0, 1.0}), UnsupportedOperation);
}

TEST(EffectivePrior, TwoConstraints) {
    const auto model = CompositeModel::make("H2", 1.0, LocationLikelihood{0.5}, GaussianPrior::make(0.0, 20.0),
                                            {AuxiliaryConstraint{0.0, 5.0}, AuxiliaryConstraint{0.0, 5.0}});
    EXPECT_NEAR(effective_prior(model).sd, 3.481553119113957, 1e-12);
}

TEST(EffectivePrior, OrderIndependent) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> obs(-10.0, 10.0);
    std::uniform_real_distribution<double> sd(0.1, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<AuxiliaryConstraint> cs;
        for (int i = 0; i < 4; ++i) {
            cs.push_back({obs(rng), sd(rng)});
        }
        const auto prior = GaussianPrior::make(obs(rng), sd(rng));
        const auto forward = effective_prior(CompositeModel::make("m", 1.0, LocationLikelihood{1.0}, prior, cs));
        std::reverse(cs.begin(), cs.end());
        std::swap(cs[0], cs[2]);
        const auto shuffled = effective_prior(CompositeModel::make("m", 1.0, LocationLikelihood{1.0}, prior, cs));
        EXPECT_NEAR(forward.mean, shuffled.mean, 1e-12 * (1.0 + std::abs(forward.mean)));
        EXPECT_NEAR(forward.sd, shuffled.sd, 1e-12 * forward.sd);
    }
}

TEST(EffectivePrior, RequiresPrior) {
    const auto model = CompositeModel::make("H3", 1.0, PointPredictionLikelihood{43.0, 0.5});
    EXPECT_THROW(effective_prior(model), UsageError);
}

TEST(CompositeModel, StructuralRules) {
    const auto prior = GaussianPrior::make(0.0, 1.0);
    EXPECT_THROW(CompositeModel::make("p", 1.0, PointPredictionLikelihood{43.0, 0.5}, prior), UsageError);
    EXPECT_THROW(CompositeModel::make("n", 1.0, NullLikelihood{1.0}, std::nullopt, {AuxiliaryConstraint{0.0, 1.0}}),
                 UsageError);
    EXPECT_THROW(CompositeModel::make("l", 1.0, LocationLikelihood{1.0}), UsageError);
    EXPECT_THROW(CompositeModel::make("s", 1.0, LinearSignalLikelihood{{1.0}, 1.0}), UsageError);
    EXPECT_THROW(CompositeModel::make("s", 1.0, LinearSignalLikelihood{{}, 1.0}, prior), UsageError);
    EXPECT_THROW(CompositeModel::make("s", 1.0, LinearSignalLikelihood{{0.0, 0.0}, 1.0}, prior), UsageError);
    EXPECT_THROW(CompositeModel::make("n", 0.0, NullLikelihood{1.0}), DomainError);
    EXPECT_THROW(CompositeModel::make("n", 1.0, NullLikelihood{0.0}), DomainError);
    EXPECT_THROW(CompositeModel::make("l", 1.0, LocationLikelihood{1.0}, prior, {AuxiliaryConstraint{0.0, -1.0}}),
                 DomainError);
}

TEST(CompositeModel, ConstraintOnPointMassPriorCannotBeFolded) {
    const auto model = CompositeModel::make("l", 1.0, LocationLikelihood{1.0}, GaussianPrior::make(0.0, 0.0),
                                            {AuxiliaryConstraint{0.0, 1.0}});
    EXPECT_THROW(effective_prior(model), UnsupportedOperation);
}

TEST(CompositeModel, WithPriorDropsConstraints) {
    const auto model = CompositeModel::make("H2", 2.0, LocationLikelihood{0.5}, GaussianPrior::make(0.0, 20.0),
                                            {AuxiliaryConstraint{0.0, 5.0}});
    const auto next = model.with_prior(GaussianPrior::make(1.0, 2.0));
    EXPECT_EQ(next.id(), "H2");
    EXPECT_EQ(next.prior_weight(), 2.0);
    EXPECT_TRUE(next.constraints().empty());
    EXPECT_EQ(next.parameter_prior()->mean, 1.0);
}

TEST(Likelihood, ShapesAndParameters) {
    EXPECT_EQ(data_shape(Likelihood{NullLikelihood{}}), DataShape::Vector);
    EXPECT_EQ(data_shape(Likelihood{LinearSignalLikelihood{}}), DataShape::Vector);
    EXPECT_EQ(data_shape(Likelihood{LocationLikelihood{}}), DataShape::Scalar);
    EXPECT_EQ(data_shape(Likelihood{PointPredictionLikelihood{}}), DataShape::Scalar);
    EXPECT_TRUE(has_free_parameter(Likelihood{LocationLikelihood{}}));
    EXPECT_FALSE(has_free_parameter(Likelihood{NullLikelihood{}}));
    EXPECT_EQ(noise_sd(Likelihood{PointPredictionLikelihood{1.0, 0.25}}), 0.25);
}
