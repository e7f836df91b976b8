#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "weylforge/linalg.hpp"
#include "weylforge/system.hpp"

namespace weylforge {

struct PropagationSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    int method_order = 8;  // only the 8(5,3) Dormand-Prince pair is provided
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& msg, double t_reached)
        : std::runtime_error(msg), t_reached_(t_reached) {}
    double t_reached() const { return t_reached_; }

private:
    double t_reached_;
};

using Generator = std::function<Mat(double)>;

namespace dop853 {

struct Step {
    Mat y;
    double err = 0.0;  // scaled error norm, accept when <= 1
};

// One step of y' = A(t) y from t to t + h.
Step step(const Generator& A, double t, const Mat& y, double h, double rtol, double atol);

}  // namespace dop853

// Solution of a linear matrix ODE stored as accepted-step checkpoints on both
// sides of a reference point; evaluation takes one step from the nearest
// checkpoint. Immutable once built.
class Trajectory {
public:
    Trajectory(Generator A, double t_ref, Mat y_ref, double lo, double hi, const PropagationSettings& settings);

    Mat operator()(double t) const;
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double t_ref() const { return t_ref_; }
    std::size_t checkpoint_count() const { return fwd_t_.size() + bwd_t_.size(); }

private:
    Generator A_;
    double t_ref_;
    double lo_;
    double hi_;
    double rtol_;
    double atol_;
    std::vector<double> fwd_t_, bwd_t_;
    std::vector<Mat> fwd_y_, bwd_y_;
};

struct SolutionHandle {
    cd lambda{};
    int column_count = 0;
    std::function<Mat(double)> evaluator;
    Mat init_at_a;
    double lo = 0.0;
    double hi = 0.0;

    Mat operator()(double t) const { return evaluator(t); }
};

// Columns of traj(t) * coeff.
SolutionHandle make_handle(std::shared_ptr<const Trajectory> traj, Mat coeff, cd lambda);

// Fundamental matrix Y(t) with Y(t_ref) = y_ref on [lo, hi].
std::shared_ptr<const Trajectory> fundamental(const SymmetricSystem& sys, cd lambda, double t_ref, const Mat& y_ref,
                                              double lo, double hi, const PropagationSettings& settings = {});

Mat propagate(const SymmetricSystem& sys, cd lambda, double t0, double t1, const Mat& Y0,
              const PropagationSettings& settings = {});

// Jy' - By = lambda Delta y + Delta f with y(a) = y_a, on [a, t_end]
// (t_end defaults to b, which must then be finite).
SolutionHandle solve_inhomogeneous(const SymmetricSystem& sys, cd lambda, const std::function<Vec(double)>& f,
                                   const Vec& y_a, const PropagationSettings& settings = {},
                                   double t_end = std::numeric_limits<double>::quiet_NaN());

// Adaptive composite Gauss-Legendre quadrature with bisection.
Mat integrate_matrix(const std::function<Mat(double)>& g, double alpha, double beta, double tol);

// ∫_alpha^beta Y(t)* Delta(t) Z(t) dt
Mat weighted_gram(const SymmetricSystem& sys, const SolutionHandle& Y, const SolutionHandle& Z, double alpha,
                  double beta, double quad_tol = 1e-12);

enum class Membership { in, out, undecided };
std::string to_string(Membership m);

std::vector<double> default_beta_schedule(double a);

std::vector<Membership> l2_membership(const SymmetricSystem& sys, const SolutionHandle& Y,
                                      const std::vector<double>& beta_schedule);

}  // namespace weylforge
