#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace weakkam {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown on invalid inputs (dimension mismatches, precondition violations).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a computation fails numerically (divergence, residual
/// beyond tolerance, iteration caps).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A finite state space, optionally realized as a grid on the circle.
/// `coords`, when non-empty, holds strictly increasing points of [0,1).
struct FiniteSpace {
    int n = 0;
    std::vector<double> coords;
    std::vector<std::string> labels;

    bool is_circle() const { return !coords.empty(); }

    void validate() const {
        if (n < 1) throw DomainError("FiniteSpace: n must be >= 1");
        if (!coords.empty()) {
            if (static_cast<int>(coords.size()) != n)
                throw DomainError("FiniteSpace: coords length mismatch");
            for (int i = 0; i < n; ++i) {
                if (!(coords[i] >= 0.0 && coords[i] < 1.0))
                    throw DomainError("FiniteSpace: coords must lie in [0,1)");
                if (i > 0 && !(coords[i] > coords[i - 1]))
                    throw DomainError("FiniteSpace: coords must be strictly increasing");
            }
        }
        if (!labels.empty() && static_cast<int>(labels.size()) != n)
            throw DomainError("FiniteSpace: labels length mismatch");
    }
};

inline FiniteSpace make_space(int n) {
    FiniteSpace s;
    s.n = n;
    s.validate();
    return s;
}

inline FiniteSpace make_circle_grid(int grid_n) {
    FiniteSpace s;
    s.n = grid_n;
    s.coords.resize(grid_n);
    for (int i = 0; i < grid_n; ++i) s.coords[i] = static_cast<double>(i) / grid_n;
    s.validate();
    return s;
}

/// Representative of t modulo 1 in (-1/2, 1/2].
inline double lift_min_modulus(double t) {
    double d = t - std::floor(t);  // in [0,1)
    if (d > 0.5) d -= 1.0;
    return d;
}

}  // namespace weakkam
