#pragma once

#include <stdexcept>
#include <string>

namespace occam {

/// Input outside the mathematical domain of an operation (non-finite values,
/// nonpositive variances, eccentricity >= 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller violated an operation's contract (empty lists, length mismatch,
/// duplicate or misaligned ids, wrong data shape for a model).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation is not defined for the given value, e.g. conditioning a
/// point-mass prior on a constraint.
class UnsupportedOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Adaptive quadrature ran out of panels before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_log_estimate, double achieved_rel_tol)
        : std::runtime_error(what),
          best_log_estimate_(best_log_estimate),
          achieved_rel_tol_(achieved_rel_tol) {}

    /// Natural log of the best integral estimate reached.
    double best_log_estimate() const noexcept { return best_log_estimate_; }
    /// Estimated relative error of that estimate (linear domain).
    double achieved_rel_tol() const noexcept { return achieved_rel_tol_; }

private:
    double best_log_estimate_;
    double achieved_rel_tol_;
};

}  // namespace occam
