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

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qmetro/linalg_spin.hpp"

/// Parametric su(2) Hamiltonians H = B n(theta[, phi]) . J and the generator
/// operators H_l = i (d_l U^dagger) U of U = exp(-i t H), computed three
/// ways: closed form, truncated commutator series, and finite differences.
namespace qmetro {

enum class ModelKind { TwoParam, ThreeParam };

inline int parameter_count(ModelKind kind) { return kind == ModelKind::TwoParam ? 2 : 3; }

inline std::vector<std::string> parameter_labels(ModelKind kind) {
    if (kind == ModelKind::TwoParam) return {"B", "theta"};
    return {"B", "theta", "phi"};
}

/// Parameter values (B, theta[, phi]) and the evolution time t > 0.
struct ModelPoint {
    double B = 0.0;
    double theta = 0.0;
    std::optional<double> phi;
    double t = 1.0;

    static ModelPoint two_param(double b, double theta, double t) {
        ModelPoint p{b, theta, std::nullopt, t};
        p.validate();
        return p;
    }

    static ModelPoint three_param(double b, double theta, double phi, double t) {
        ModelPoint p{b, theta, phi, t};
        p.validate();
        return p;
    }

    ModelKind kind() const { return phi ? ModelKind::ThreeParam : ModelKind::TwoParam; }

    void validate() const {
        require(t > 0.0 && std::isfinite(t), ErrorKind::InvalidArgument, "evolution time must be > 0");
        require(std::isfinite(B) && std::isfinite(theta) && (!phi || std::isfinite(*phi)),
                ErrorKind::InvalidArgument, "model parameters must be finite");
    }

    /// Parameters in the fixed order (B, theta[, phi]).
    std::vector<double> parameters() const {
        std::vector<double> v{B, theta};
        if (phi) v.push_back(*phi);
        return v;
    }

    ModelPoint with_parameters(const std::vector<double>& v) const {
        require(static_cast<int>(v.size()) == parameter_count(kind()), ErrorKind::DimensionMismatch,
                "parameter vector size does not match the model");
        ModelPoint p = *this;
        p.B = v[0];
        p.theta = v[1];
        if (phi) p.phi = v[2];
        return p;
    }
};

struct Generator {
    std::string label;
    HermitianMatrix op;
};

/// One generator per parameter, ordered (B, theta[, phi]).
struct GeneratorSet {
    std::vector<Generator> items;
    /// Largest anti-Hermitian part removed when the set was Hermitized
    /// (zero for closed forms).
    double hermitization_residual = 0.0;

    std::size_t size() const { return items.size(); }
    const CMatrix& op(std::size_t l) const { return items.at(l).op.matrix(); }
    const std::string& label(std::size_t l) const { return items.at(l).label; }
};

/// Frame of the two-parameter model.
struct Frame2p {
    UnitVec3 n_theta;
    UnitVec3 n_theta_prime;
    UnitVec3 n1;
    UnitVec3 n2;
};

/// Frame of the three-parameter model.
struct Frame3p {
    UnitVec3 n_theta;
    UnitVec3 n1;
    UnitVec3 n2;
};

inline void require_kind(const ModelPoint& point, ModelKind kind) {
    require(point.kind() == kind, ErrorKind::InvalidArgument,
            kind == ModelKind::TwoParam ? "expected a two-parameter point" : "expected a three-parameter point");
}

inline Frame2p direction_vectors_2p(const ModelPoint& point) {
    require_kind(point, ModelKind::TwoParam);
    const double ct = std::cos(point.theta), st = std::sin(point.theta);
    const double ch = std::cos(point.B * point.t / 2), sh = std::sin(point.B * point.t / 2);
    return Frame2p{
        UnitVec3(ct, 0.0, st),
        UnitVec3(-st, 0.0, ct),
        UnitVec3(ch * st, -sh, -ch * ct),
        UnitVec3(sh * st, ch, -sh * ct),
    };
}

inline Frame3p direction_vectors_3p(const ModelPoint& point) {
    require_kind(point, ModelKind::ThreeParam);
    const double ct = std::cos(point.theta), st = std::sin(point.theta);
    const double cp = std::cos(*point.phi), sp = std::sin(*point.phi);
    const double ch = std::cos(point.B * point.t / 2), sh = std::sin(point.B * point.t / 2);
    return Frame3p{
        UnitVec3(ct * cp, ct * sp, st),
        UnitVec3(sh * sp + ch * st * cp, -sh * cp + ch * st * sp, -ch * ct),
        UnitVec3(ch * sp - sh * st * cp, -ch * cp - sh * st * sp, sh * ct),
    };
}

/// Field direction n_theta (two-parameter) or n_theta^(3) (three-parameter).
inline UnitVec3 field_direction(const ModelPoint& point) {
    const double ct = std::cos(point.theta), st = std::sin(point.theta);
    if (!point.phi) return UnitVec3(ct, 0.0, st);
    return UnitVec3(ct * std::cos(*point.phi), ct * std::sin(*point.phi), st);
}

inline HermitianMatrix hamiltonian(const SpinRep& rep, const ModelPoint& point) {
    point.validate();
    return HermitianMatrix(CMatrix(point.B * j_direction(rep, field_direction(point)).matrix()));
}

/// d H / d lambda_l for each parameter, same ordering as the generators.
inline std::vector<CMatrix> hamiltonian_derivatives(const SpinRep& rep, const ModelPoint& point) {
    const double ct = std::cos(point.theta), st = std::sin(point.theta);
    std::vector<CMatrix> out;
    out.push_back(j_direction(rep, field_direction(point)).matrix());
    if (!point.phi) {
        out.push_back(point.B * j_linear(rep, Eigen::Vector3d(-st, 0.0, ct)));
        return out;
    }
    const double cp = std::cos(*point.phi), sp = std::sin(*point.phi);
    out.push_back(point.B * j_linear(rep, Eigen::Vector3d(-st * cp, -st * sp, ct)));
    out.push_back(point.B * ct * j_linear(rep, Eigen::Vector3d(-sp, cp, 0.0)));
    return out;
}

inline GeneratorSet closed_generators_2p(const SpinRep& rep, const ModelPoint& point) {
    const Frame2p f = direction_vectors_2p(point);
    const double sh = std::sin(point.B * point.t / 2);
    GeneratorSet g;
    g.items.push_back({"B", HermitianMatrix(CMatrix(-point.t * j_direction(rep, f.n_theta).matrix()))});
    g.items.push_back({"theta", HermitianMatrix(CMatrix(2.0 * sh * j_direction(rep, f.n1).matrix()))});
    return g;
}

/// The phi generator carries the cos(theta) from d_phi H = B cos(theta) J_{n_phi'}.
inline GeneratorSet closed_generators_3p(const SpinRep& rep, const ModelPoint& point) {
    const Frame3p f = direction_vectors_3p(point);
    const double sh = std::sin(point.B * point.t / 2);
    GeneratorSet g;
    g.items.push_back({"B", HermitianMatrix(CMatrix(-point.t * j_direction(rep, f.n_theta).matrix()))});
    g.items.push_back({"theta", HermitianMatrix(CMatrix(2.0 * sh * j_direction(rep, f.n1).matrix()))});
    g.items.push_back(
        {"phi", HermitianMatrix(CMatrix(2.0 * sh * std::cos(point.theta) * j_direction(rep, f.n2).matrix()))});
    return g;
}

inline GeneratorSet closed_generators(const SpinRep& rep, const ModelPoint& point) {
    return point.kind() == ModelKind::TwoParam ? closed_generators_2p(rep, point) : closed_generators_3p(rep, point);
}

inline CMatrix encoding_unitary(const SpinRep& rep, const ModelPoint& point) {
    return expm_i(hamiltonian(rep, point), point.t);
}

/// Central finite differences of U^dagger with h_l = step * max(1, |lambda_l|).
inline GeneratorSet numeric_generators(const SpinRep& rep, const ModelPoint& point, double step = 1e-5) {
    require(step > 0.0, ErrorKind::InvalidArgument, "finite-difference step must be > 0");
    const std::vector<double> lambda = point.parameters();
    const std::vector<std::string> labels = parameter_labels(point.kind());
    const CMatrix u = encoding_unitary(rep, point);
    GeneratorSet g;
    for (std::size_t l = 0; l < lambda.size(); ++l) {
        const double h = step * std::max(1.0, std::abs(lambda[l]));
        std::vector<double> up = lambda, dn = lambda;
        up[l] += h;
        dn[l] -= h;
        const CMatrix dudag = (encoding_unitary(rep, point.with_parameters(up)).adjoint() -
                               encoding_unitary(rep, point.with_parameters(dn)).adjoint()) /
                              (2.0 * h);
        const CMatrix raw = kI * dudag * u;
        const double residual = max_abs(CMatrix(raw - raw.adjoint())) / 2.0 / std::max(1.0, max_abs(raw));
        require(residual <= 1e-4, ErrorKind::StepInstability,
                "hermitization residual " + std::to_string(residual) + " for parameter " + labels[l]);
        g.hermitization_residual = std::max(g.hermitization_residual, residual);
        g.items.push_back({labels[l], HermitianMatrix::hermitize(raw)});
    }
    return g;
}

namespace detail {

/// exp(-i tau H) by Taylor series; only used for short slices.
inline CMatrix taylor_unitary(const CMatrix& h, double tau, double tol) {
    const Eigen::Index n = h.rows();
    CMatrix sum = CMatrix::Identity(n, n);
    CMatrix term = CMatrix::Identity(n, n);
    for (int k = 1; k <= 200; ++k) {
        term = (-kI * tau / static_cast<double>(k)) * (h * term);
        sum += term;
        if (term.norm() < tol) return sum;
    }
    throw Error(ErrorKind::NonConvergence, "Taylor series for the slice unitary did not converge");
}

}  // namespace detail

/// H_l = i sum_n f_n ad_H^n (d_l H), f_n = (i t)^(n+1) / (n+1)!.
///
/// The series is summed on a slice tau = t / 2^k short enough that
/// tau * ||ad_H|| <= 1/2, then doubled k times with
/// H_l(2 tau) = H_l(tau) + U(tau)^dagger H_l(tau) U(tau).
/// Each slice series stops once a term's Frobenius norm drops below tol.
inline GeneratorSet series_generators(const SpinRep& rep, const ModelPoint& point, double tol = 1e-14) {
    require(tol > 0.0, ErrorKind::InvalidArgument, "series tolerance must be > 0");
    const CMatrix h = hamiltonian(rep, point).matrix();
    const std::vector<CMatrix> dh = hamiltonian_derivatives(rep, point);
    const std::vector<std::string> labels = parameter_labels(point.kind());

    const double ad_norm = 2.0 * std::abs(point.B) * rep.spin();
    int doublings = 0;
    double tau = point.t;
    while (tau * ad_norm > 0.5) {
        tau /= 2.0;
        ++doublings;
    }
    CMatrix u = detail::taylor_unitary(h, tau, tol);

    std::vector<CMatrix> gens;
    for (std::size_t l = 0; l < dh.size(); ++l) {
        CMatrix term = -tau * dh[l];  // i f_0 d_l H
        CMatrix sum = term;
        bool converged = term.norm() < tol;
        for (int n = 1; n <= 200 && !converged; ++n) {
            term = (kI * tau / static_cast<double>(n + 1)) * (h * term - term * h);
            sum += term;
            converged = term.norm() < tol;
        }
        require(converged, ErrorKind::NonConvergence, "generator series did not converge for " + labels[l]);
        gens.push_back(std::move(sum));
    }
    for (int k = 0; k < doublings; ++k) {
        for (CMatrix& g : gens) g = g + u.adjoint() * g * u;
        u = u * u;
    }

    GeneratorSet out;
    for (std::size_t l = 0; l < gens.size(); ++l) {
        const double residual = max_abs(CMatrix(gens[l] - gens[l].adjoint())) / 2.0 / std::max(1.0, max_abs(gens[l]));
        out.hermitization_residual = std::max(out.hermitization_residual, residual);
        out.items.push_back({labels[l], HermitianMatrix::hermitize(gens[l])});
    }
    return out;
}

enum class GeneratorRoute { Closed, Series, Numeric };

inline GeneratorSet generators(const SpinRep& rep, const ModelPoint& point, GeneratorRoute route) {
    switch (route) {
        case GeneratorRoute::Closed: return closed_generators(rep, point);
        case GeneratorRoute::Series: return series_generators(rep, point);
        case GeneratorRoute::Numeric: return numeric_generators(rep, point);
    }
    return closed_generators(rep, point);
}

}  // namespace qmetro
