// Copyright 2026 The qmetro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <random>

#include "qmetro/qmetro.hpp"

namespace qmetro::testing {

inline CMatrix random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    return (a + a.adjoint()) / 2.0;
}

inline CMatrix random_complex(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = cplx(g(rng), g(rng));
    return a;
}

/// Haar-random pure state: normalized complex Gaussian vector.
inline Probe haar_probe(std::mt19937_64& rng, int n) {
    return Probe::normalized(CVector(random_complex(rng, n, 1).col(0)));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// exp(-i c A) by plain Taylor series with argument halving; test-only oracle
/// independent of the eigendecomposition route.
inline CMatrix expm_taylor_oracle(const CMatrix& a, double c) {
    int squarings = 0;
    double scale = c * a.norm();
    while (std::abs(scale) > 0.25) {
        scale /= 2;
        ++squarings;
    }
    const CMatrix x = (-kI * (c / std::pow(2.0, squarings))) * a;
    CMatrix sum = CMatrix::Identity(a.rows(), a.cols());
    CMatrix term = sum;
    for (int k = 1; k < 40; ++k) {
        term = term * x / static_cast<double>(k);
        sum += term;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

inline double rel_diff(const CMatrix& a, const CMatrix& b) {
    const double scale = std::max(a.norm(), b.norm());
    return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline double rel_diff(const RMatrix& a, const RMatrix& b) {
    const double scale = std::max(a.norm(), b.norm());
    return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

}  // namespace qmetro::testing
