#pragma once

#include <random>

#include "weylforge/linalg.hpp"

namespace testing {

using weylforge::cd;
using weylforge::Mat;

inline Mat random_matrix(std::mt19937& rng, int r, int c) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cd(n(rng), n(rng));
    return m;
}

inline Mat random_hermitian(std::mt19937& rng, int n) {
    const Mat a = random_matrix(rng, n, n);
    return 0.5 * (a + a.adjoint());
}

}  // namespace testing
