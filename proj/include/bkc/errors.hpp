#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bkc {

// Base for failures that come out of the numerics rather than bad input.
// Precondition violations throw std::invalid_argument / std::domain_error.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct singular_matrix_error : numerical_error {
    double condition;
    singular_matrix_error(const std::string& what, double cond)
        : numerical_error(what), condition(cond) {}
};

struct not_hurwitz_error : numerical_error {
    std::complex<double> eigenvalue;
    not_hurwitz_error(const std::string& what, std::complex<double> s)
        : numerical_error(what), eigenvalue(s) {}
};

struct convergence_error : numerical_error {
    using numerical_error::numerical_error;
};

// Curve passes through the reference point, or the spec sits on a phase boundary.
struct phase_boundary_error : numerical_error {
    using numerical_error::numerical_error;
};

struct sampling_error : numerical_error {
    using numerical_error::numerical_error;
};

// |y| = 1: the two local eigenvectors coalesce.
struct coalescent_error : numerical_error {
    using numerical_error::numerical_error;
};

struct band_tracking_error : numerical_error {
    using numerical_error::numerical_error;
};

struct not_settled_error : numerical_error {
    using numerical_error::numerical_error;
};

struct commensurate_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct infeasible_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace bkc
