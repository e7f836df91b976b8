#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "weylforge/linalg.hpp"

namespace weylforge {

struct SpaceLayout {
    int nu_plus = 0;
    int nu_hat = 0;

    int dim_h0() const { return nu_plus + nu_hat; }  // dim H0 = dim H + dim Ĥ
    int dim() const { return 2 * nu_plus + nu_hat; }  // dim of the full space
    bool hamiltonian() const { return nu_hat == 0; }
};

struct SignatureOperator {
    Mat matrix;
};

// J = [[0,0,-I],[0,iI,0],[I,0,0]] in H ⊕ Ĥ ⊕ H.
SignatureOperator build_signature(const SpaceLayout& layout);

enum class Representation { constant, polynomial, tabulated, builtin };

class CoefficientField {
public:
    using Fn = std::function<Mat(double)>;

    static CoefficientField constant(Mat b, Mat delta);
    // B(t) = sum_k b[k] t^k, likewise Delta.
    static CoefficientField polynomial(std::vector<Mat> b, std::vector<Mat> delta);
    // Piecewise-cubic Hermite interpolation through (t_k, B_k, Delta_k).
    static CoefficientField tabulated(std::vector<double> t, std::vector<Mat> b, std::vector<Mat> delta);
    static CoefficientField builtin(std::string name, Fn b, Fn delta);

    Mat B(double t) const { return b_(t); }
    Mat Delta(double t) const { return delta_(t); }
    Representation representation() const { return rep_; }
    const std::string& name() const { return name_; }

private:
    Representation rep_ = Representation::constant;
    std::string name_;
    Fn b_;
    Fn delta_;
};

struct SymmetricSystem {
    SpaceLayout layout;
    SignatureOperator J;
    CoefficientField coeffs;
    double a = 0.0;
    double b = std::numeric_limits<double>::infinity();
    bool b_regular = false;
    Mat X_a;
    std::optional<Mat> X_b;

    int dim() const { return layout.dim(); }
    // A(t) in y' = A(t) y, i.e. -J (B(t) + lambda Delta(t)).
    Mat generator(double t, cd lambda) const;
};

// Checks dimensions and X*JX = J for the endpoint matrices; throws
// std::invalid_argument on failure.
SymmetricSystem make_system(SpaceLayout layout, CoefficientField coeffs, double a, double b, bool b_regular,
                            Mat X_a, std::optional<Mat> X_b = std::nullopt);

struct Violation {
    std::string what;
    double t = 0.0;
    double residual = 0.0;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;
};

ValidationReport validate_system(const SymmetricSystem& sys, const std::vector<double>& t_samples);

struct DefinitenessReport {
    bool definite = false;
    struct Sample {
        cd lambda;
        double sigma_min = 0.0;
        double sigma_max = 0.0;
        bool definite = false;
    };
    std::vector<Sample> samples;
};

DefinitenessReport check_definiteness(const SymmetricSystem& sys, const std::vector<cd>& lambda_samples,
                                      const std::vector<double>& t_grid);
DefinitenessReport check_definiteness(const SymmetricSystem& sys, const std::vector<double>& t_grid);

struct TraceA {
    Mat gamma_0a;
    Mat gamma_hat_a;
    Mat gamma_1a;
};

TraceA trace_a(const SymmetricSystem& sys, const Mat& y_at_a);

}  // namespace weylforge
