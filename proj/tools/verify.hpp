#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace occam::cli {

struct VerifyOptions {
    double rel_tol = 1e-8;
    std::uint64_t seed = 20240611;
    std::size_t identity_instances = 10000;
    std::size_t signal_instances = 100;
    std::size_t location_instances = 100;
};

struct VerifyCheck {
    std::string name;
    std::size_t instances = 0;
    double max_deviation = 0.0;
    /// Parameters of every instance whose deviation exceeded rel_tol.
    std::vector<std::string> failures;
};

struct VerifyResult {
    double rel_tol;
    std::uint64_t seed;
    std::vector<VerifyCheck> checks;

    bool passed() const;
};

/// Randomized equivalence checks between analytic evidences and independent
/// routes: compact vs general Bayes-factor form, and analytic evidence vs
/// adaptive quadrature for signal and constrained-location models. The
/// deviation of an instance is |ln(analytic) - ln(oracle)|, i.e. the relative
/// error in the linear domain to first order.
VerifyResult run_verification(const VerifyOptions& options);

}  // namespace occam::cli
