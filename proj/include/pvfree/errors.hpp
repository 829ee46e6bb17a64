#pragma once

#include <stdexcept>
#include <string>

namespace pvfree {

/// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Coincident auxiliary masses (m1 = m2).
class degenerate_scheme_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// No scheme reproduces the requested cutoff at the given mass ratio.
class infeasible_cutoff_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Iterative procedure exhausted its budget.
class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature result not within tolerance; carries the achieved estimate.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, double value, double error_estimate)
        : std::runtime_error(what), value_(value), error_estimate_(error_estimate) {}

    double value() const noexcept { return value_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double value_;
    double error_estimate_;
};

/// Integrand produced a non-finite value.
class evaluation_error : public std::runtime_error {
public:
    evaluation_error(const std::string& what, double abscissa)
        : std::runtime_error(what), abscissa_(abscissa) {}

    double abscissa() const noexcept { return abscissa_; }

private:
    double abscissa_;
};

/// Matsubara sum failed to converge to the oracle target.
class oracle_accuracy_error : public std::runtime_error {
public:
    oracle_accuracy_error(const std::string& what, double partial_sum, double tail_estimate)
        : std::runtime_error(what), partial_sum_(partial_sum), tail_estimate_(tail_estimate) {}

    double partial_sum() const noexcept { return partial_sum_; }
    double tail_estimate() const noexcept { return tail_estimate_; }

private:
    double partial_sum_;
    double tail_estimate_;
};

class unsupported_version_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class malformed_payload_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class invalid_data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation requires a Coulomb-gauge projected spectral field.
class gauge_precondition_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace pvfree
