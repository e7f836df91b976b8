#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "weylforge/linalg.hpp"

namespace weylforge {

enum class HalfPlane { upper, lower, both };

// τ(λ) = {(C0(λ), C1(λ)); K}, read as the relation {(h0, h1) : C0 h0 + C1 h1 = 0}.
class OperatorPair {
public:
    using Fn = std::function<Mat(cd)>;

    static OperatorPair constant(Mat c0, Mat c1, HalfPlane hp = HalfPlane::both);
    static OperatorPair holomorphic(Fn c0, Fn c1, int dim_h0, int dim_h1, int dim_k, HalfPlane hp);

    Mat C0(cd lambda) const { return constant_ ? c0_const_ : c0_(lambda); }
    Mat C1(cd lambda) const { return constant_ ? c1_const_ : c1_(lambda); }
    HalfPlane half_plane() const { return hp_; }
    int dim_h0() const { return dim_h0_; }
    int dim_h1() const { return dim_h1_; }
    int dim_k() const { return dim_k_; }
    bool is_constant() const { return constant_; }

private:
    HalfPlane hp_ = HalfPlane::both;
    int dim_h0_ = 0, dim_h1_ = 0, dim_k_ = 0;
    bool constant_ = true;
    Mat c0_const_, c1_const_;
    Fn c0_, c1_;
};

struct SelfAdjointParameter {
    Mat B;
    Mat cosB;
    Mat sinB;
};

SelfAdjointParameter selfadjoint_from_B(const Mat& B);

// Orthoprojector data for H0 = H1 ⊕ H2, with H1 given by coordinate indices.
struct SplitData {
    int dim_h0 = 0;
    std::vector<int> h1_index;  // coordinates of H0 forming H1, in order
    std::vector<int> h2_index;  // the complement
    Mat embed1() const;         // H1 -> H0
    Mat P2() const;             // orthoprojector onto H2 inside H0
    static SplitData equal(int n);
    static SplitData leading(int dim_h0, int dim_h1);  // H1 = first coordinates
};

struct BoundaryParameterCollection {
    int alpha = 1;
    OperatorPair tau_plus;
    std::optional<OperatorPair> tau_minus;  // defaults to the adjoint counterpart
    SplitData split;
};

enum class PairClass { R0, R, none };
std::string to_string(PairClass c);

struct PairReport {
    PairClass verdict = PairClass::none;
    bool ok = false;
    std::vector<std::string> failures;
    double sign_residual = 0.0;      // most negative eigenvalue seen (as a positive number)
    double symmetry_residual = 0.0;
    double invertibility_margin = 0.0;  // min singular value of C0 -/+ i C1 restricted to H1; informational
};

PairReport validate_pair(const OperatorPair& pair, const std::vector<cd>& lambda_samples);

PairReport validate_collection(const BoundaryParameterCollection& coll, const std::vector<cd>& lambda_samples);

SelfAdjointParameter normalize_selfadjoint(const OperatorPair& pair);

// Relation subspace of (C0 : C1) as the column span of a kernel basis.
Mat relation_subspace(const Mat& c0, const Mat& c1);

OperatorPair adjoint_counterpart(const OperatorPair& tau_plus, int alpha, const SplitData& split);

// Both pairs describe the same relation at lambda.
double pair_distance(const OperatorPair& p, const OperatorPair& q, cd lambda);

}  // namespace weylforge
