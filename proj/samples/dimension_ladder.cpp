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

// Prints det Q, R and Delta of the three-parameter model for N = 2..8 with
// the extremal-superposition probe, showing the singular / maximally
// incompatible / tunable regimes as the probe dimension grows.

#include <cstdio>
#include <numbers>

#include "qmetro/qmetro.hpp"

int main() {
    const auto point = qmetro::ModelPoint::three_param(1.0, 0.4, 0.3, 5.0);
    const double alpha = std::numbers::pi / 6;
    std::printf("%3s %14s %10s %10s\n", "N", "det Q", "R", "Delta");
    for (int n = 2; n <= 8; ++n) {
        const auto rep = qmetro::build_spin_rep(n);
        const auto report = qmetro::analyze(rep, point, qmetro::make_probe({n, alpha, 0.0}));
        if (report.singular)
            std::printf("%3d %14.6e %10s %10s\n", n, report.det_q, "singular", "-");
        else
            std::printf("%3d %14.6e %10.6f %10.6f\n", n, report.det_q, report.r_ai, report.delta);
    }
    return 0;
}
