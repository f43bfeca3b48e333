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

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "qmetro/encoding.hpp"
#include "qmetro/linalg_spin.hpp"
#include "qmetro/metrology.hpp"

/// Closed-form results for the su(2) two- and three-parameter models:
/// extremal-superposition probes, qubit and qudit QFIM/Uhlmann elements,
/// the three-parameter Uhlmann matrix and the dimension-scaling figure Gamma.
namespace qmetro {

/// cos(alpha)|+s> + e^{i phi_rel} sin(alpha)|-s> over the extreme Jz eigenvectors.
struct ProbeSpec {
    int N = 2;
    double alpha = 0.0;
    double phi_rel = 0.0;
};

inline Probe make_probe(const ProbeSpec& spec) {
    require(spec.N >= 2, ErrorKind::InvalidDimension, "probe needs N >= 2");
    CVector v = CVector::Zero(spec.N);
    v(0) = std::cos(spec.alpha);
    v(spec.N - 1) += std::exp(kI * spec.phi_rel) * std::sin(spec.alpha);
    return Probe::normalized(v);
}

/// Qubit Bloch vector, |r0| <= 1.
class BlochVec {
public:
    BlochVec(double x, double y, double z) : r_(x, y, z) {
        require(r_.norm() <= 1.0 + 1e-12, ErrorKind::InvalidArgument, "Bloch vector norm exceeds 1");
    }

    const Eigen::Vector3d& vec() const { return r_; }
    bool pure(double tol = 1e-12) const { return std::abs(r_.norm() - 1.0) <= tol; }

private:
    Eigen::Vector3d r_;
};

/// r_i = <sigma_i> = 2 <J_i> for a qubit probe.
inline BlochVec bloch_vector(const Probe& probe) {
    require(probe.dim() == 2, ErrorKind::InvalidDimension, "Bloch vector needs a qubit probe");
    const SpinRep rep = build_spin_rep(2);
    return BlochVec(2.0 * probe.expect(rep.jx()).real(), 2.0 * probe.expect(rep.jy()).real(),
                    2.0 * probe.expect(rep.jz()).real());
}

/// Pure qubit state with Bloch vector r (|r| = 1).
inline Probe qubit_probe(const BlochVec& r) {
    require(r.pure(1e-10), ErrorKind::InvalidArgument, "qubit_probe needs a pure Bloch vector");
    const double polar = std::acos(std::clamp(r.vec().z(), -1.0, 1.0));
    const double azimuth = std::atan2(r.vec().y(), r.vec().x());
    CVector v(2);
    v << std::cos(polar / 2), std::exp(kI * azimuth) * std::sin(polar / 2);
    return Probe::normalized(v);
}

struct Qubit2pClosed {
    RMatrix q;  // ordering (B, theta)
    double d_theta_B = 0.0;
    std::optional<double> r;
    bool singular = false;
};

/// Qubit two-parameter model in Bloch form. For |r0| = 1 the AI measure is
/// identically 1 wherever the QFIM is regular.
inline Qubit2pClosed qubit2p_closed(const BlochVec& r0, const ModelPoint& point, double tol = 1e-12) {
    const Frame2p f = direction_vectors_2p(point);
    const Eigen::Vector3d& r = r0.vec();
    const double a = f.n_theta.vec().dot(r);
    const double b = f.n1.vec().dot(r);
    const double c = f.n2.vec().dot(r);
    const double t = point.t;
    const double sh = std::sin(point.B * t / 2);

    Qubit2pClosed out;
    out.q.resize(2, 2);
    out.q(0, 0) = t * t * (1.0 - a * a);
    out.q(1, 1) = 4.0 * sh * sh * (1.0 - b * b);
    out.q(0, 1) = out.q(1, 0) = 2.0 * t * sh * a * b;
    out.d_theta_B = 2.0 * t * sh * c;

    const double denom = 1.0 - b * b - a * a;
    out.singular = denom <= tol || !sym_inverse(out.q);
    if (!out.singular) out.r = std::sqrt(c * c / denom);
    return out;
}

struct Qudit2pClosed {
    RMatrix q;  // ordering (B, theta)
    double d_theta_B = 0.0;
};

/// Two-parameter model with the extremal-superposition probe for N > 3.
inline Qudit2pClosed qudit2p_closed(const ProbeSpec& spec, const ModelPoint& point) {
    require_kind(point, ModelKind::TwoParam);
    require(spec.N > 3, ErrorKind::UnsupportedClosedForm,
            "qudit closed form needs N > 3; use the generator route for N = " + std::to_string(spec.N));
    const double m = spec.N - 1.0;
    const double t = point.t;
    const double ct = std::cos(point.theta), st = std::sin(point.theta);
    const double ch = std::cos(point.B * t / 2), sh = std::sin(point.B * t / 2);
    const double s2a = std::sin(2 * spec.alpha);

    Qudit2pClosed out;
    out.q.resize(2, 2);
    out.q(0, 0) = m * t * t * (ct * ct + m * s2a * s2a * st * st);
    // 4 (N-1) sin^4 {1 + cot^2 [...]} expanded so it stays finite at sin = 0
    out.q(1, 1) = 4.0 * m * (sh * sh * sh * sh + sh * sh * ch * ch * (m * ct * ct * s2a * s2a + st * st));
    out.q(0, 1) = out.q(1, 0) =
        m * t / 4.0 * (spec.N - 3.0 - m * std::cos(4 * spec.alpha)) * std::sin(point.B * t) * std::sin(2 * point.theta);
    out.d_theta_B = -2.0 * t * m * std::cos(2 * spec.alpha) * ct * sh * sh;
    return out;
}

/// Uhlmann matrix of the three-parameter model, ordering (B, theta, phi):
///   D_{B,theta}   =  4 t sin(Bt/2) <J_{n2}>
///   D_{B,phi}     = -4 t sin(Bt/2) cos(theta) <J_{n1}>
///   D_{theta,phi} = -8 sin^2(Bt/2) cos(theta) <J_{n_theta}>
inline UhlmannMatrix threeparam_uhlmann_closed(const SpinRep& rep, const Probe& probe, const ModelPoint& point) {
    const Frame3p f = direction_vectors_3p(point);
    require(probe.dim() == rep.dim(), ErrorKind::DimensionMismatch, "probe dimension mismatch");
    const double t = point.t;
    const double sh = std::sin(point.B * t / 2);
    const double ct = std::cos(point.theta);
    auto mean = [&](const UnitVec3& n) { return probe.expect(j_direction(rep, n).matrix()).real(); };

    RMatrix d = RMatrix::Zero(3, 3);
    d(0, 1) = 4.0 * t * sh * mean(f.n2);
    d(0, 2) = -4.0 * t * sh * ct * mean(f.n1);
    d(1, 2) = -8.0 * sh * sh * ct * mean(f.n_theta);
    d(1, 0) = -d(0, 1);
    d(2, 0) = -d(0, 2);
    d(2, 1) = -d(1, 2);
    return {d, parameter_labels(ModelKind::ThreeParam)};
}

/// R = |cos 2 alpha| for the three-parameter model with N >= 4.
inline double ai_threeparam_probe(int n, double alpha) {
    require(n >= 4, ErrorKind::OutOfRegime, "|cos 2 alpha| holds only for N >= 4");
    return std::abs(std::cos(2 * alpha));
}

/// Gamma = Tr[Q_N Q_M^-1]; nullopt when Q_M is singular.
inline std::optional<double> gamma_scaling(const RMatrix& q_n, const RMatrix& q_m, double rel_tol = 1e-10) {
    require(q_n.rows() == q_m.rows() && q_n.cols() == q_m.cols(), ErrorKind::DimensionMismatch,
            "Gamma needs matrices of equal size");
    const auto inv = sym_inverse(q_m, rel_tol);
    if (!inv) return std::nullopt;
    return (q_n * *inv).trace();
}

/// Generic pipeline: generators by the given route, then the full report.
inline IncompatReport analyze(const SpinRep& rep, const ModelPoint& point, const Probe& probe, const RMatrix& w,
                              double rel_tol = 1e-10, GeneratorRoute route = GeneratorRoute::Closed) {
    return incompat_report(generators(rep, point, route), probe, w, rel_tol);
}

inline IncompatReport analyze(const SpinRep& rep, const ModelPoint& point, const Probe& probe,
                              double rel_tol = 1e-10) {
    const int d = parameter_count(point.kind());
    return analyze(rep, point, probe, RMatrix::Identity(d, d), rel_tol);
}

inline QfimMatrix model_qfim(const SpinRep& rep, const ModelPoint& point, const Probe& probe) {
    return qfim_from_generators(closed_generators(rep, point), probe);
}

}  // namespace qmetro
