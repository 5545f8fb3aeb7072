#pragma once

#include "weakkam/types.hpp"

#include <functional>
#include <memory>

namespace weakkam {

/// Cost kernel c(x,y) on a finite space. Entries are finite or +inf
/// (inf encodes an absent transition; addition saturates). Every row and
/// every column carries at least one finite entry.
///
/// Circle-grid kernels may additionally record, per pair, the real lifted
/// displacement realized by the minimizing lift; chains and rotation
/// numbers read it back instead of re-solving the lift ambiguity.
class CostKernel {
public:
    CostKernel(FiniteSpace space, Matrix entries, bool periodic = false)
        : space_(std::move(space)), entries_(std::move(entries)), periodic_(periodic) {
        validate();
    }

    const FiniteSpace& space() const { return space_; }
    int size() const { return space_.n; }
    bool periodic() const { return periodic_; }
    const Matrix& entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

    bool has_displacement() const { return displacement_.has_value(); }
    const Matrix& displacement() const {
        if (!displacement_) throw DomainError("CostKernel: no displacement data");
        return *displacement_;
    }

    bool has_callable() const { return static_cast<bool>(fn_); }
    double callable(int i, int j) const {
        if (!fn_) throw DomainError("CostKernel: no callable storage");
        return fn_(i, j);
    }

    /// Max absolute value over finite entries.
    double norm_inf() const {
        double m = 0.0;
        for (int j = 0; j < entries_.cols(); ++j)
            for (int i = 0; i < entries_.rows(); ++i)
                if (std::isfinite(entries_(i, j))) m = std::max(m, std::abs(entries_(i, j)));
        return m;
    }

    CostKernel with_displacement(Matrix d) const {
        CostKernel k = *this;
        if (d.rows() != size() || d.cols() != size())
            throw DomainError("CostKernel: displacement dimension mismatch");
        k.displacement_ = std::move(d);
        return k;
    }
    CostKernel with_callable(std::function<double(int, int)> fn) const {
        CostKernel k = *this;
        k.fn_ = std::move(fn);
        return k;
    }

private:
    void validate() const;

    FiniteSpace space_;
    Matrix entries_;
    bool periodic_ = false;
    std::optional<Matrix> displacement_;
    std::function<double(int, int)> fn_;
};

CostKernel build_dense_cost(int n, const Matrix& entries);

/// Discretize a continuous cost f(x,y) on the circle grid i/grid_n. With a
/// window w, entries with circular index distance > w are set to +inf and
/// each row's minimizer must land strictly inside the window.
CostKernel build_circle_cost(int grid_n, const std::function<double(double, double)>& f,
                             std::optional<int> window = std::nullopt);

/// Parameters of a discretized time-1 Lagrangian action on the circle,
/// for L(x,v) = v^2/2 - V(x) corrected by a cohomology class c.
struct ActionDiscretization {
    int grid_n = 0;
    int steps_m = 1;
    std::function<double(double)> potential;
    double cohomology_c = 0.0;
};

/// Builds the time-1 action kernel as the steps_m-fold min-plus product of
/// the one-step cost
///   c_tau(x,y) = tau * [ (d/tau)^2/2 - V((x+y)/2) ] - c*d,  tau = 1/steps_m,
/// with d the minimal-modulus lift of y-x and the midpoint taken along that
/// lift. The composed kernel records total lifted displacements along
/// minimizing sub-chains.
CostKernel build_action_cost(const ActionDiscretization& a, long budget = 64L * 1024 * 1024);

/// Min-plus matrix product with backpointer-composed displacement data:
/// result(i,j) = min_k a(i,k) + b(k,j), ties to the smallest k.
CostKernel minplus_compose(const CostKernel& a, const CostKernel& b);

}  // namespace weakkam
