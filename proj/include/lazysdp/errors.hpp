#pragma once

#include <stdexcept>
#include <string>

namespace lazysdp {

// Base class for all numerical failures raised by the solver stack.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// A matrix required to be positive definite had lambda_min <= 0.
struct NotPositiveDefinite : NumericError {
    double lambda_min;
    explicit NotPositiveDefinite(double lmin, const std::string& where)
        : NumericError(where + ": matrix is not positive definite (lambda_min = " +
                       std::to_string(lmin) + ")"),
          lambda_min(lmin) {}
};

// Inner system of a low-rank inverse update is numerically singular.
struct SingularUpdate : NumericError {
    double condition_estimate;
    explicit SingularUpdate(double cond, const std::string& where)
        : NumericError(where + ": inner update system is numerically singular (cond ~ " +
                       std::to_string(cond) + ")"),
          condition_estimate(cond) {}
};

// The eigen-iteration failed to converge.
struct EigenFailure : NumericError {
    explicit EigenFailure(const std::string& msg) : NumericError(msg) {}
};

// Constraint Gram matrix is singular: the stacked constraints are rank deficient.
struct RankDeficient : NumericError {
    explicit RankDeficient(const std::string& msg) : NumericError(msg) {}
};

// The modified problem of the initializer cannot be built with a PD initial slack.
struct InfeasibleInitialization : NumericError {
    double lambda_min;
    explicit InfeasibleInitialization(double lmin)
        : NumericError("initializer: I - C*delta/L is not positive definite (lambda_min = " +
                       std::to_string(lmin) + "); decrease delta or increase L"),
          lambda_min(lmin) {}
};

// An interior point step produced a slack matrix outside the PSD cone.
struct StepOutOfCone : NumericError {
    explicit StepOutOfCone(double lmin)
        : NumericError("barrier step left the cone: new exact slack has lambda_min = " +
                       std::to_string(lmin)),
          lambda_min(lmin) {}
    double lambda_min;
};

// The iteration budget ran out before the duality gap target was met.
struct NotConverged : std::runtime_error {
    double gap;
    double gap_target;
    NotConverged(double g, double target)
        : std::runtime_error("solve did not converge: duality gap " + std::to_string(g) +
                             " > target " + std::to_string(target)),
          gap(g), gap_target(target) {}
};

// SDPA input could not be parsed; carries the 1-based line number.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_no, const std::string& msg)
        : std::runtime_error("parse error at line " + std::to_string(line_no) + ": " + msg),
          line(line_no) {}
};

}  // namespace lazysdp
