#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weylforge/linalg.hpp"
#include "weylforge/pairs.hpp"
#include "weylforge/system.hpp"

namespace weylforge {

// `abstract` carries a prescribed inertia with boundary data given directly
// in (Γ0b, Γ̂b, Γ1b) coordinates; used to exercise every case algebraically.
enum class EndpointKind { regular, limit_point, abstract };

struct EndpointBForm {
    EndpointKind kind = EndpointKind::limit_point;
    std::optional<Mat> form_matrix;  // X_b* J X_b for a regular endpoint
    int nu_b_plus = 0;
    int nu_b_minus = 0;
};

EndpointBForm boundary_form_regular(const SymmetricSystem& sys);
// Regular form when b is regular, otherwise the limit-point form.
EndpointBForm boundary_form(const SymmetricSystem& sys);
EndpointBForm abstract_form(int nu_b_plus, int nu_b_minus);

enum class CaseTag { case1, case1_equal, case2, case3, hamiltonian, minimal };
std::string to_string(CaseTag tag);

struct CaseClass {
    int base = 1;  // 1, 2 or 3
    CaseTag tag = CaseTag::case1;
};

CaseClass classify_case(const SpaceLayout& layout, const EndpointBForm& form);

// Boundary maps at b as row selections of the b-data vector.
struct BoundaryMapB {
    EndpointKind kind = EndpointKind::limit_point;
    int dim_hb = 0;      // dim 𝓗_b
    int dim_hat_b = 0;   // dim 𝓗̂_b
    int sign = 1;        // sign(ν_b+ - ν_b-), +1 when equal
    int data_dim = 0;    // length of the b-data vector
    Mat gamma_0b, gamma_hat_b, gamma_1b;
};

BoundaryMapB build_boundary_map(const EndpointBForm& form, const SpaceLayout& layout);

// Boundary data of solutions: (X_a y(a); b-data). b-data is X_b y(b) for a
// regular endpoint and empty for a limit-point endpoint.
Mat boundary_data(const SymmetricSystem& sys, const BoundaryMapB& bmap, const Mat& y_a, const Mat& y_b);

struct DecomposingTriplet {
    CaseClass cls;
    int alpha = 1;
    SpaceLayout layout;
    BoundaryMapB bmap;
    int dim_H0 = 0;  // 𝓗0
    int dim_H1 = 0;  // 𝓗1
    std::vector<int> h1_index;
    std::vector<int> h2_index;
    Mat gamma0;  // 𝓗0 x data
    Mat gamma1;  // 𝓗1 x data
    int data_dim = 0;

    int dim_a() const { return layout.dim_h0(); }              // leading H0 block of 𝓗0
    int tau_dim0() const { return dim_H0 - layout.dim_h0(); }  // space C0 acts on
    int tau_dim1() const { return bmap.dim_hb; }               // space C1 acts on (𝓗_b)
    SplitData split() const;        // 𝓗0 = 𝓗1 ⊕ 𝓗2
    SplitData tau_split() const;    // split of the space C0 acts on
    bool equal_spaces() const { return h2_index.empty(); }
};

DecomposingTriplet build_triplet(const SymmetricSystem& sys, const BoundaryMapB& bmap, const CaseClass& cls);
DecomposingTriplet build_triplet(const SymmetricSystem& sys);
// Triplet for a given layout and an abstract endpoint form (no ODE needed).
DecomposingTriplet build_triplet(const SpaceLayout& layout, const EndpointBForm& form);

std::pair<int, int> deficiency_indices(const SpaceLayout& layout, const EndpointBForm& form);

// [f,g]_b - (J f(a), g(a)) expressed on boundary data (columns of f, g).
Mat lagrange_form(const DecomposingTriplet& T, const Mat& f, const Mat& g);

// (Γ1 f, Γ0 g) - (Γ0 f, Γ1 g) + iα (P2 Γ0 f, P2 Γ0 g)
Mat triplet_form(const DecomposingTriplet& T, const Mat& f, const Mat& g);

}  // namespace weylforge
