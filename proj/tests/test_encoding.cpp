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


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"

namespace qmetro {
namespace {

using testing::rel_diff;
using testing::uniform;

double route_distance(const GeneratorSet& a, const GeneratorSet& b) {
    // spectral norm, relative to the larger operator (absolute for tiny ones)
    double worst = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
        Eigen::JacobiSVD<CMatrix> da(CMatrix(a.op(l) - b.op(l)));
        Eigen::JacobiSVD<CMatrix> sa(a.op(l)), sb(b.op(l));
        const double scale = std::max({1e-3, sa.singularValues()(0), sb.singularValues()(0)});
        worst = std::max(worst, da.singularValues()(0) / scale);
    }
    return worst;
}

TEST(ModelPoint, ValidatesAndOrdersParameters) {
    EXPECT_THROW(ModelPoint::two_param(1, 0, 0.0), Error);
    EXPECT_THROW(ModelPoint::two_param(NAN, 0, 1), Error);
    const ModelPoint p = ModelPoint::three_param(1, 2, 3, 4);
    EXPECT_EQ(p.kind(), ModelKind::ThreeParam);
    EXPECT_EQ(p.parameters(), (std::vector<double>{1, 2, 3}));
    const ModelPoint q = p.with_parameters({5, 6, 7});
    EXPECT_EQ(*q.phi, 7);
    EXPECT_EQ(q.t, 4);
    EXPECT_THROW(p.with_parameters({1, 2}), Error);
    EXPECT_EQ(parameter_labels(ModelKind::TwoParam), (std::vector<std::string>{"B", "theta"}));
}

TEST(Frame2p, OriginValues) {
    const Frame2p f = direction_vectors_2p(ModelPoint::two_param(0.0, 0.0, 1.0));
    EXPECT_LT((f.n1.vec() - Eigen::Vector3d(0, 0, -1)).norm(), 1e-15);
    EXPECT_LT((f.n2.vec() - Eigen::Vector3d(0, 1, 0)).norm(), 1e-15);
}

TEST(Frame2p, OrthonormalAndCrossProduct) {
    std::mt19937_64 rng(30);
    for (int k = 0; k < 100; ++k) {
        const Frame2p f = direction_vectors_2p(
            ModelPoint::two_param(uniform(rng, -3, 3), uniform(rng, -7, 7), uniform(rng, 0.1, 10)));
        EXPECT_NEAR(f.n_theta.dot(f.n1), 0.0, 1e-15);
        EXPECT_NEAR(f.n_theta.dot(f.n_theta_prime), 0.0, 1e-15);
        EXPECT_LT((f.n2.vec() - f.n_theta.vec().cross(f.n1.vec())).norm(), 1e-12);
    }
}

TEST(Frame2p, RejectsThreeParameterPoint) {
    EXPECT_THROW(direction_vectors_2p(ModelPoint::three_param(1, 1, 1, 1)), Error);
}

TEST(Frame3p, ReducesToTwoParameterAtZeroAzimuth) {
    const ModelPoint p3 = ModelPoint::three_param(1.2, 0.8, 0.0, 5);
    const ModelPoint p2 = ModelPoint::two_param(1.2, 0.8, 5);
    EXPECT_LT((direction_vectors_3p(p3).n_theta.vec() - direction_vectors_2p(p2).n_theta.vec()).norm(), 1e-15);
    EXPECT_LT((direction_vectors_3p(p3).n1.vec() - direction_vectors_2p(p2).n1.vec()).norm(), 1e-15);
}

TEST(Frame3p, ZeroRotationValue) {
    const double phi = 0.9;
    const Frame3p f = direction_vectors_3p(ModelPoint::three_param(0.0, 0.4, phi, 3));
    EXPECT_LT((f.n2.vec() - Eigen::Vector3d(std::sin(phi), -std::cos(phi), 0)).norm(), 1e-15);
}

TEST(Frame3p, OrthonormalRightHandedFrame) {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 100; ++k) {
        const Frame3p f = direction_vectors_3p(ModelPoint::three_param(
            uniform(rng, -3, 3), uniform(rng, -7, 7), uniform(rng, -7, 7), uniform(rng, 0.1, 10)));
        EXPECT_NEAR(f.n_theta.dot(f.n1), 0.0, 1e-12);
        EXPECT_NEAR(f.n_theta.dot(f.n2), 0.0, 1e-12);
        EXPECT_NEAR(f.n1.dot(f.n2), 0.0, 1e-12);
        // (n_theta, n2, n1) is right-handed: n1 = n_theta x n2
        EXPECT_LT((f.n1.vec() - f.n_theta.vec().cross(f.n2.vec())).norm(), 1e-12);
    }
}

TEST(Hamiltonian, Basics) {
    const SpinRep rep = build_spin_rep(2);
    EXPECT_EQ(max_abs(hamiltonian(rep, ModelPoint::two_param(0, 0.3, 1)).matrix()), 0.0);
    EXPECT_LT(max_abs(CMatrix(hamiltonian(rep, ModelPoint::two_param(1.7, 0, 1)).matrix() - 1.7 * rep.jx())), 1e-15);
    const SpinRep rep5 = build_spin_rep(5);
    const HermEig e = herm_eig(hamiltonian(rep5, ModelPoint::three_param(0.7, 0.3, 1.1, 2)));
    for (int k = 0; k < 5; ++k) EXPECT_NEAR(e.values(k), 0.7 * (k - 2.0), 1e-13);
}

TEST(ClosedGenerators2p, VanishAtFullPeriod) {
    const GeneratorSet g = closed_generators_2p(build_spin_rep(3), ModelPoint::two_param(2 * std::numbers::pi / 4, 0.3, 4));
    EXPECT_LT(max_abs(g.op(1)), 1e-15);
}

TEST(ClosedGenerators2p, QubitThetaSpectrum) {
    const ModelPoint p = ModelPoint::two_param(0.9, 0.4, 3);
    const HermEig e = herm_eig(closed_generators_2p(build_spin_rep(2), p).items[1].op);
    const double sh = std::abs(std::sin(0.9 * 3 / 2));
    EXPECT_NEAR(e.values(0), -sh, 1e-14);
    EXPECT_NEAR(e.values(1), sh, 1e-14);
}

TEST(ClosedGenerators2p, MatchNumericAtReferencePoint) {
    const SpinRep rep = build_spin_rep(3);
    const ModelPoint p = ModelPoint::two_param(1.0, 0.7, 5.0);
    EXPECT_LT(route_distance(closed_generators_2p(rep, p), numeric_generators(rep, p)), 1e-6);
}

TEST(ClosedGenerators2p, CommutatorIdentity) {
    std::mt19937_64 rng(32);
    for (int n = 2; n <= 6; ++n) {
        const SpinRep rep = build_spin_rep(n);
        const ModelPoint p = ModelPoint::two_param(uniform(rng, -2, 2), uniform(rng, 0, 6), uniform(rng, 1, 8));
        const GeneratorSet g = closed_generators_2p(rep, p);
        const CMatrix comm = g.op(0) * g.op(1) - g.op(1) * g.op(0);
        const CMatrix expected =
            -2.0 * kI * p.t * std::sin(p.B * p.t / 2) * j_direction(rep, direction_vectors_2p(p).n2).matrix();
        EXPECT_LT(max_abs(CMatrix(comm - expected)), 1e-9);
    }
}

TEST(ClosedGenerators3p, ReduceToTwoParameterAtZeroAzimuth) {
    const SpinRep rep = build_spin_rep(4);
    const GeneratorSet g3 = closed_generators_3p(rep, ModelPoint::three_param(1.1, 0.5, 0.0, 5));
    const GeneratorSet g2 = closed_generators_2p(rep, ModelPoint::two_param(1.1, 0.5, 5));
    EXPECT_LT(max_abs(CMatrix(g3.op(0) - g2.op(0))), 1e-15);
    EXPECT_LT(max_abs(CMatrix(g3.op(1) - g2.op(1))), 1e-15);
}

TEST(ClosedGenerators3p, MatchNumericAtReferencePoint) {
    const SpinRep rep = build_spin_rep(4);
    const ModelPoint p = ModelPoint::three_param(1.3, 0.4, 1.1, 5.0);
    const GeneratorSet closed = closed_generators_3p(rep, p);
    const GeneratorSet numeric = numeric_generators(rep, p);
    EXPECT_LT(route_distance(closed, numeric), 1e-6);
    EXPECT_EQ(closed.label(2), "phi");
}

TEST(ClosedGenerators3p, AzimuthGeneratorCarriesCosTheta) {
    // at theta = pi/2 the field is along z and phi does not enter H at all
    const SpinRep rep = build_spin_rep(3);
    const GeneratorSet g = closed_generators_3p(rep, ModelPoint::three_param(1.0, std::numbers::pi / 2, 0.4, 2.0));
    EXPECT_LT(max_abs(g.op(2)), 1e-15);
}

TEST(ClosedGenerators3p, VanishAtFullPeriod) {
    const GeneratorSet g = closed_generators_3p(build_spin_rep(3), ModelPoint::three_param(std::numbers::pi, 0.3, 0.2, 2));
    EXPECT_LT(max_abs(g.op(1)), 1e-15);
    EXPECT_LT(max_abs(g.op(2)), 1e-15);
}

TEST(NumericGenerators, ZeroFieldHasNoAngularGenerator) {
    const GeneratorSet g = numeric_generators(build_spin_rep(3), ModelPoint::two_param(0.0, 0.5, 5));
    EXPECT_LT(max_abs(g.op(1)), 1e-9);
}

TEST(NumericGenerators, SecondOrderConvergence) {
    const SpinRep rep = build_spin_rep(3);
    const ModelPoint p = ModelPoint::two_param(1.0, 0.7, 5.0);
    const GeneratorSet closed = closed_generators_2p(rep, p);
    const double e1 = generator_distance(closed, numeric_generators(rep, p, 1e-2));
    const double e2 = generator_distance(closed, numeric_generators(rep, p, 5e-3));
    EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(NumericGenerators, ReportsHermitizationResidual) {
    const GeneratorSet g = numeric_generators(build_spin_rep(4), ModelPoint::two_param(1.0, 0.7, 5.0));
    EXPECT_GT(g.hermitization_residual, 0.0);
    EXPECT_LT(g.hermitization_residual, 1e-6);
}

TEST(NumericGenerators, HugeStepIsUnstable) {
    try {
        numeric_generators(build_spin_rep(3), ModelPoint::two_param(1.0, 0.7, 5.0), 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::StepInstability);
    }
    EXPECT_THROW(numeric_generators(build_spin_rep(3), ModelPoint::two_param(1, 0.7, 5), 0.0), Error);
}

TEST(SeriesGenerators, ShortTimeLeadingOrder) {
    const SpinRep rep = build_spin_rep(4);
    const ModelPoint p = ModelPoint::two_param(1.3, 0.6, 0.01);
    const GeneratorSet g = series_generators(rep, p);
    const std::vector<CMatrix> dh = hamiltonian_derivatives(rep, p);
    for (std::size_t l = 0; l < 2; ++l)
        EXPECT_LT(rel_diff(g.op(l), CMatrix(-p.t * dh[l])), 1e-2);
}

TEST(SeriesGenerators, MatchClosedQubitTightly) {
    const SpinRep rep = build_spin_rep(2);
    const ModelPoint p = ModelPoint::two_param(2.0, 1.0, 3.0);
    EXPECT_LT(route_distance(series_generators(rep, p), closed_generators_2p(rep, p)), 1e-10);
}

TEST(SeriesGenerators, MatchNumericThreeParameter) {
    const SpinRep rep = build_spin_rep(5);
    const ModelPoint p = ModelPoint::three_param(0.8, 1.2, -0.6, 6.0);
    EXPECT_LT(route_distance(series_generators(rep, p), numeric_generators(rep, p)), 1e-6);
}

TEST(SeriesGenerators, StableForLongTimesAndLargeSpin) {
    const SpinRep rep = build_spin_rep(8);
    const ModelPoint p = ModelPoint::three_param(1.9, 0.3, 2.0, 25.0);
    EXPECT_LT(route_distance(series_generators(rep, p), closed_generators_3p(rep, p)), 1e-9);
}

TEST(SeriesGenerators, RejectsNonPositiveTolerance) {
    EXPECT_THROW(series_generators(build_spin_rep(2), ModelPoint::two_param(1, 1, 1), 0.0), Error);
}

TEST(Generators, RoutesAgreeAcrossDimensions) {
    std::mt19937_64 rng(33);
    for (int n = 2; n <= 8; ++n) {
        const SpinRep rep = build_spin_rep(n);
        for (int k = 0; k < 3; ++k) {
            const ModelPoint p2 = ModelPoint::two_param(uniform(rng, 0.1, 2), uniform(rng, 0, 6.2), uniform(rng, 1, 10));
            const ModelPoint p3 = ModelPoint::three_param(uniform(rng, 0.1, 2), uniform(rng, 0, 6.2),
                                                          uniform(rng, 0, 6.2), uniform(rng, 1, 10));
            for (const ModelPoint& p : {p2, p3}) {
                const GeneratorSet c = generators(rep, p, GeneratorRoute::Closed);
                const GeneratorSet s = generators(rep, p, GeneratorRoute::Series);
                const GeneratorSet f = generators(rep, p, GeneratorRoute::Numeric);
                EXPECT_LT(route_distance(c, s), 1e-6) << "N=" << n;
                EXPECT_LT(route_distance(c, f), 1e-6) << "N=" << n;
                EXPECT_LT(route_distance(s, f), 1e-6) << "N=" << n;
            }
        }
    }
}

TEST(Generators, FieldGeneratorIsScaledHamiltonian) {
    // the finite-difference route carries O(h^2 t^3 s^3) truncation at h = 1e-5
    std::mt19937_64 rng(34);
    const SpinRep rep = build_spin_rep(4);
    for (int k = 0; k < 5; ++k) {
        const ModelPoint p = ModelPoint::three_param(uniform(rng, 0.2, 2), uniform(rng, 0, 6), uniform(rng, 0, 6), 4.0);
        const CMatrix expected = -p.t / p.B * hamiltonian(rep, p).matrix();
        EXPECT_LT(max_abs(CMatrix(generators(rep, p, GeneratorRoute::Closed).op(0) - expected)), 1e-9);
        EXPECT_LT(max_abs(CMatrix(generators(rep, p, GeneratorRoute::Series).op(0) - expected)), 1e-9);
        EXPECT_LT(max_abs(CMatrix(generators(rep, p, GeneratorRoute::Numeric).op(0) - expected)),
                  1e-6 * max_abs(expected));
    }
}

}  // namespace
}  // namespace qmetro
