#include "weylforge/ode.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace weylforge {

namespace {

constexpr long kMaxSteps = 2'000'000;

template <class OnAccept>
Mat integrate(const Generator& A, double t0, double t1, Mat y, const PropagationSettings& s, OnAccept on_accept) {
    if (s.method_order != 8) throw std::invalid_argument("unsupported method_order (only 8 is available)");
    if (t1 == t0) return y;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    double h = std::min({span, s.max_step, 0.1 / (1.0 + A(t0).cwiseAbs().maxCoeff())});
    double t = t0;
    for (long n = 0; n < kMaxSteps; ++n) {
        const double remaining = std::abs(t1 - t);
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
            throw NonConvergenceError("step size underflow", t);
        auto st = dop853::step(A, t, y, dir * h, s.rel_tol, s.abs_tol);
        if (!std::isfinite(st.err)) {
            h *= 0.2;
            continue;
        }
        if (st.err <= 1.0) {
            t = last ? t1 : t + dir * h;
            y = std::move(st.y);
            on_accept(t, y);
            if (last) return y;
            const double fac = st.err == 0.0 ? 6.0 : std::clamp(0.9 * std::pow(st.err, -1.0 / 8.0), 0.333, 6.0);
            h = std::min(h * fac, s.max_step);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(st.err, -1.0 / 8.0));
        }
    }
    throw NonConvergenceError("step budget exhausted", t);
}

}  // namespace

Trajectory::Trajectory(Generator A, double t_ref, Mat y_ref, double lo, double hi, const PropagationSettings& settings)
    : A_(std::move(A)), t_ref_(t_ref), lo_(lo), hi_(hi), rtol_(settings.rel_tol), atol_(settings.abs_tol) {
    if (!(lo <= t_ref && t_ref <= hi)) throw std::invalid_argument("trajectory reference point outside range");
    fwd_t_.push_back(t_ref);
    fwd_y_.push_back(y_ref);
    integrate(A_, t_ref, hi, y_ref, settings, [this](double t, const Mat& y) {
        fwd_t_.push_back(t);
        fwd_y_.push_back(y);
    });
    bwd_t_.push_back(t_ref);
    bwd_y_.push_back(y_ref);
    integrate(A_, t_ref, lo, y_ref, settings, [this](double t, const Mat& y) {
        bwd_t_.push_back(t);
        bwd_y_.push_back(y);
    });
}

Mat Trajectory::operator()(double t) const {
    if (t < lo_ - 1e-12 * (1.0 + std::abs(lo_)) || t > hi_ + 1e-12 * (1.0 + std::abs(hi_)))
        throw std::out_of_range("trajectory evaluated outside [" + std::to_string(lo_) + ", " +
                                std::to_string(hi_) + "]");
    if (t >= t_ref_) {
        auto it = std::upper_bound(fwd_t_.begin(), fwd_t_.end(), t);
        const std::size_t k = static_cast<std::size_t>(it - fwd_t_.begin()) - 1;
        const double h = t - fwd_t_[k];
        if (h == 0.0) return fwd_y_[k];
        return dop853::step(A_, fwd_t_[k], fwd_y_[k], h, rtol_, atol_).y;
    }
    // bwd_t_ is decreasing
    auto it = std::upper_bound(bwd_t_.begin(), bwd_t_.end(), t, [](double v, double e) { return v > e; });
    const std::size_t k = static_cast<std::size_t>(it - bwd_t_.begin()) - 1;
    const double h = t - bwd_t_[k];
    if (h == 0.0) return bwd_y_[k];
    return dop853::step(A_, bwd_t_[k], bwd_y_[k], h, rtol_, atol_).y;
}

SolutionHandle make_handle(std::shared_ptr<const Trajectory> traj, Mat coeff, cd lambda) {
    SolutionHandle h;
    h.lambda = lambda;
    h.column_count = static_cast<int>(coeff.cols());
    h.lo = traj->lo();
    h.hi = traj->hi();
    h.init_at_a = (*traj)(traj->lo()) * coeff;
    h.evaluator = [traj = std::move(traj), coeff = std::move(coeff)](double t) -> Mat { return (*traj)(t) * coeff; };
    return h;
}

std::shared_ptr<const Trajectory> fundamental(const SymmetricSystem& sys, cd lambda, double t_ref, const Mat& y_ref,
                                              double lo, double hi, const PropagationSettings& settings) {
    // the trajectory may outlive the caller's system, so it holds a copy
    Generator A = [sys, lambda](double t) { return sys.generator(t, lambda); };
    return std::make_shared<const Trajectory>(std::move(A), t_ref, y_ref, lo, hi, settings);
}

Mat propagate(const SymmetricSystem& sys, cd lambda, double t0, double t1, const Mat& Y0,
              const PropagationSettings& settings) {
    if (t0 == t1) return Y0;
    Generator A = [&sys, lambda](double t) { return sys.generator(t, lambda); };
    return integrate(A, t0, t1, Y0, settings, [](double, const Mat&) {});
}

SolutionHandle solve_inhomogeneous(const SymmetricSystem& sys, cd lambda, const std::function<Vec(double)>& f,
                                   const Vec& y_a, const PropagationSettings& settings, double t_end) {
    if (std::isnan(t_end)) t_end = sys.b;
    if (!std::isfinite(t_end)) throw std::invalid_argument("solve_inhomogeneous: finite end point required");
    const int n = sys.dim();
    if (y_a.size() != n) throw std::invalid_argument("solve_inhomogeneous: dimension mismatch");
    Generator A = [sys, lambda, f, n](double t) {
        Mat g = Mat::Zero(n + 1, n + 1);
        g.topLeftCorner(n, n) = sys.generator(t, lambda);
        g.topRightCorner(n, 1) = -sys.J.matrix * (sys.coeffs.Delta(t) * f(t));
        return g;
    };
    Mat z0(n + 1, 1);
    z0.topRows(n) = y_a;
    z0(n, 0) = 1.0;
    auto traj = std::make_shared<const Trajectory>(std::move(A), sys.a, z0, sys.a, t_end, settings);
    SolutionHandle h;
    h.lambda = lambda;
    h.column_count = 1;
    h.lo = sys.a;
    h.hi = t_end;
    h.init_at_a = y_a;
    h.evaluator = [traj, n](double t) -> Mat { return (*traj)(t).topRows(n); };
    return h;
}

namespace {

using GL = boost::math::quadrature::gauss<double, 20>;

Mat gl_panel(const std::function<Mat(double)>& g, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double r = 0.5 * (hi - lo);
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    Mat acc;
    for (std::size_t i = 0; i < x.size(); ++i) {
        // even node count: abscissae are strictly positive
        Mat term = w[i] * (g(c + r * x[i]) + g(c - r * x[i]));
        if (i == 0) acc = term;
        else acc += term;
    }
    return r * acc;
}

Mat adapt(const std::function<Mat(double)>& g, double lo, double hi, const Mat& whole, double tol, double scale,
          int depth) {
    const double mid = 0.5 * (lo + hi);
    Mat left = gl_panel(g, lo, mid);
    Mat right = gl_panel(g, mid, hi);
    Mat both = left + right;
    const double diff = (both - whole).cwiseAbs().maxCoeff();
    if (diff <= tol * scale || depth >= 40) return both;
    return adapt(g, lo, mid, left, 0.5 * tol, scale, depth + 1) + adapt(g, mid, hi, right, 0.5 * tol, scale, depth + 1);
}

}  // namespace

Mat integrate_matrix(const std::function<Mat(double)>& g, double alpha, double beta, double tol) {
    if (beta == alpha) {
        Mat z = g(alpha);
        return Mat::Zero(z.rows(), z.cols());
    }
    const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(beta - alpha) / 2.0)));
    const double h = (beta - alpha) / panels;
    std::vector<Mat> coarse;
    double scale = 1.0;
    for (int k = 0; k < panels; ++k) {
        coarse.push_back(gl_panel(g, alpha + k * h, alpha + (k + 1) * h));
        scale = std::max(scale, coarse.back().cwiseAbs().maxCoeff());
    }
    Mat total;
    for (int k = 0; k < panels; ++k) {
        const double lo = alpha + k * h;
        const double hi = k + 1 == panels ? beta : alpha + (k + 1) * h;
        Mat piece = adapt(g, lo, hi, coarse[static_cast<std::size_t>(k)], tol / panels, scale, 0);
        if (k == 0) total = piece;
        else total += piece;
    }
    return total;
}

Mat weighted_gram(const SymmetricSystem& sys, const SolutionHandle& Y, const SolutionHandle& Z, double alpha,
                  double beta, double quad_tol) {
    auto g = [&](double t) -> Mat { return Y(t).adjoint() * sys.coeffs.Delta(t) * Z(t); };
    return integrate_matrix(g, alpha, beta, quad_tol);
}

std::string to_string(Membership m) {
    switch (m) {
        case Membership::in: return "in";
        case Membership::out: return "out";
        default: return "undecided";
    }
}

std::vector<double> default_beta_schedule(double a) {
    std::vector<double> s;
    for (int k = 0; k <= 12; ++k) s.push_back(a + 5.0 * std::ldexp(1.0, k));
    return s;
}

std::vector<Membership> l2_membership(const SymmetricSystem& sys, const SolutionHandle& Y,
                                      const std::vector<double>& beta_schedule) {
    const int m = Y.column_count;
    if (sys.b_regular) return std::vector<Membership>(static_cast<std::size_t>(m), Membership::in);
    if (beta_schedule.size() < 3) throw std::invalid_argument("schedule too short");
    std::vector<Membership> verdict(static_cast<std::size_t>(m), Membership::undecided);
    for (int j = 0; j < m; ++j) {
        auto col = [&](double t) -> Mat { return Y(t).col(j); };
        auto g = [&](double t) -> Mat { return col(t).adjoint() * sys.coeffs.Delta(t) * col(t); };
        double total = 0.0;
        double first = -1.0;
        double prev_end = sys.a;
        int small_run = 0;
        for (double beta : beta_schedule) {
            if (beta > Y.hi) break;
            double inc = 0.0;
            try {
                inc = integrate_matrix(g, prev_end, beta, 1e-13 * (1.0 + total))(0, 0).real();
            } catch (const std::exception&) {
                break;
            }
            if (!std::isfinite(inc)) {
                verdict[static_cast<std::size_t>(j)] = Membership::out;
                break;
            }
            prev_end = beta;
            const double before = total;
            total += inc;
            if (first < 0.0) {
                first = total;
                continue;
            }
            if (first > 0.0 && total > 1e8 * first) {
                verdict[static_cast<std::size_t>(j)] = Membership::out;
                break;
            }
            small_run = inc < 1e-10 * (1.0 + before) ? small_run + 1 : 0;
            if (small_run >= 3) {
                verdict[static_cast<std::size_t>(j)] = Membership::in;
                break;
            }
        }
    }
    return verdict;
}

}  // namespace weylforge
