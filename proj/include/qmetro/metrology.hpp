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
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmetro/encoding.hpp"
#include "qmetro/linalg_spin.hpp"

/// Estimation-theory core: quantum Fisher information and Uhlmann matrices,
/// SLDs, classical Fisher information, the asymptotic-incompatibility
/// measure R and the pure-state Holevo bound.
namespace qmetro {

/// Normalized pure state (norm checked to 1e-12).
class Probe {
public:
    explicit Probe(CVector amplitudes) : psi_(std::move(amplitudes)) {
        require(psi_.size() > 0, ErrorKind::InvalidDimension, "probe must be non-empty");
        require(std::abs(psi_.norm() - 1.0) <= 1e-12, ErrorKind::InvalidArgument,
                "probe norm deviates from 1 by " + std::to_string(psi_.norm() - 1.0));
    }

    static Probe normalized(const CVector& v) {
        const double n = v.norm();
        require(n > 0.0, ErrorKind::InvalidArgument, "cannot normalize the zero vector");
        return Probe(CVector(v / n));
    }

    const CVector& amplitudes() const { return psi_; }
    Eigen::Index dim() const { return psi_.size(); }

    cplx expect(const CMatrix& op) const { return psi_.dot(op * psi_); }

    CMatrix density() const { return psi_ * psi_.adjoint(); }

private:
    CVector psi_;
};

struct QfimMatrix {
    RMatrix values;
    std::vector<std::string> labels;
};

struct UhlmannMatrix {
    RMatrix values;
    std::vector<std::string> labels;
};

namespace detail {

inline std::vector<std::string> labels_of(const GeneratorSet& gens) {
    std::vector<std::string> out;
    for (const auto& g : gens.items) out.push_back(g.label);
    return out;
}

inline void require_probe_dim(const GeneratorSet& gens, const Probe& probe) {
    for (const auto& g : gens.items)
        require(g.op.dim() == probe.dim(), ErrorKind::DimensionMismatch,
                "generator " + g.label + " does not act on the probe space");
}

}  // namespace detail

/// Q_ll' = 2 <{H_l, H_l'}> - 4 <H_l><H_l'>
inline QfimMatrix qfim_from_generators(const GeneratorSet& gens, const Probe& probe) {
    detail::require_probe_dim(gens, probe);
    const auto d = static_cast<Eigen::Index>(gens.size());
    std::vector<CVector> h_psi;
    std::vector<double> mean;
    for (const auto& g : gens.items) {
        h_psi.push_back(g.op.matrix() * probe.amplitudes());
        mean.push_back(probe.amplitudes().dot(h_psi.back()).real());
    }
    RMatrix q(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i; j < d; ++j) {
            // <{A,B}> = 2 Re <A psi | B psi> for Hermitian A, B
            const double anti = 2.0 * h_psi[i].dot(h_psi[j]).real();
            q(i, j) = q(j, i) = 2.0 * anti - 4.0 * mean[i] * mean[j];
        }
    return {q, detail::labels_of(gens)};
}

/// D_ll' = -2i <[H_l, H_l']>
inline UhlmannMatrix uhlmann_from_generators(const GeneratorSet& gens, const Probe& probe) {
    detail::require_probe_dim(gens, probe);
    const auto d = static_cast<Eigen::Index>(gens.size());
    RMatrix dm = RMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const CMatrix& a = gens.op(i);
            const CMatrix& b = gens.op(j);
            const cplx value = -2.0 * kI * probe.expect(CMatrix(a * b - b * a));
            require(std::abs(value.imag()) <= 1e-9 * std::max(1.0, std::abs(value.real())),
                    ErrorKind::NumericConsistency,
                    "Uhlmann entry has imaginary residual " + std::to_string(value.imag()));
            dm(i, j) = value.real();
            dm(j, i) = -value.real();
        }
    return {dm, detail::labels_of(gens)};
}

/// Maps a parameter vector to a (normalized) state vector.
using StateFamily = std::function<CVector(const std::vector<double>&)>;

/// Q and D from finite-difference state derivatives:
/// Q_jk + i D_jk = 4 (<d_j psi|d_k psi> - <d_j psi|psi><psi|d_k psi>).
inline std::pair<QfimMatrix, UhlmannMatrix> qfim_from_state_derivatives(const StateFamily& family,
                                                                        const std::vector<double>& point,
                                                                        std::vector<std::string> labels = {},
                                                                        double step = 1e-5) {
    require(step > 0.0, ErrorKind::InvalidArgument, "finite-difference step must be > 0");
    const auto d = static_cast<Eigen::Index>(point.size());
    if (labels.empty())
        for (Eigen::Index j = 0; j < d; ++j) labels.push_back("lambda" + std::to_string(j));
    require(static_cast<Eigen::Index>(labels.size()) == d, ErrorKind::DimensionMismatch, "label count mismatch");

    auto checked = [&](const std::vector<double>& lam) {
        CVector v = family(lam);
        require(std::abs(v.norm() - 1.0) <= 1e-6, ErrorKind::StepInstability,
                "state family norm drift " + std::to_string(v.norm() - 1.0));
        return v;
    };
    const CVector psi = checked(point);
    std::vector<CVector> dpsi;
    for (Eigen::Index j = 0; j < d; ++j) {
        const double h = step * std::max(1.0, std::abs(point[j]));
        std::vector<double> up = point, dn = point;
        up[j] += h;
        dn[j] -= h;
        dpsi.push_back((checked(up) - checked(dn)) / (2.0 * h));
    }
    RMatrix q(d, d), dm(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k) {
            const cplx bracket = dpsi[j].dot(dpsi[k]) - dpsi[j].dot(psi) * psi.dot(dpsi[k]);
            q(j, k) = 4.0 * bracket.real();
            dm(j, k) = 4.0 * bracket.imag();
        }
    q = (q + q.transpose()) / 2.0;
    dm = (dm - dm.transpose()) / 2.0;
    return {QfimMatrix{q, labels}, UhlmannMatrix{dm, labels}};
}

/// |psi(lambda)> = U(lambda) |psi0> for the su(2) encoding at fixed t.
inline StateFamily evolved_state_family(const SpinRep& rep, const ModelPoint& base, const Probe& probe) {
    return [rep, base, probe](const std::vector<double>& lambda) -> CVector {
        return encoding_unitary(rep, base.with_parameters(lambda)) * probe.amplitudes();
    };
}

/// Solves 2 drho = {L, rho} in the eigenbasis of rho; entries with
/// p_j + p_k <= 1e-12 (outside the joint support) are set to zero.
inline HermitianMatrix sld_solve(const CMatrix& rho, const CMatrix& drho) {
    require(rho.rows() == drho.rows() && rho.cols() == drho.cols(), ErrorKind::DimensionMismatch,
            "rho and drho differ in shape");
    const cplx tr = rho.trace();
    require(std::abs(tr - 1.0) <= 1e-10, ErrorKind::InvalidTrace, "trace(rho) = " + std::to_string(tr.real()));
    const HermEig e = herm_eig(HermitianMatrix(rho));
    const CMatrix x = e.vectors.adjoint() * HermitianMatrix(drho).matrix() * e.vectors;
    const Eigen::Index n = rho.rows();
    CMatrix l = CMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const double denom = e.values(j) + e.values(k);
            if (denom > 1e-12) l(j, k) = 2.0 * x(j, k) / denom;
        }
    return HermitianMatrix::hermitize(e.vectors * l * e.vectors.adjoint());
}

/// p_i = Tr(rho Pi_i)
inline RVector born_probabilities(const CMatrix& rho, const std::vector<CMatrix>& povm) {
    require(!povm.empty(), ErrorKind::PovmIncomplete, "empty POVM");
    const Eigen::Index n = rho.rows();
    CMatrix total = CMatrix::Zero(n, n);
    for (const CMatrix& e : povm) {
        require(e.rows() == n && e.cols() == n, ErrorKind::DimensionMismatch, "POVM element shape mismatch");
        const HermEig eig = herm_eig(HermitianMatrix(e, 1e-10));
        require(eig.values.minCoeff() >= -1e-10, ErrorKind::InvalidArgument, "POVM element is not PSD");
        total += e;
    }
    const double residual = max_abs(CMatrix(total - CMatrix::Identity(n, n)));
    require(residual <= 1e-10, ErrorKind::PovmIncomplete, "POVM completeness residual " + std::to_string(residual));
    RVector p(static_cast<Eigen::Index>(povm.size()));
    for (std::size_t i = 0; i < povm.size(); ++i) p(static_cast<Eigen::Index>(i)) = (rho * povm[i]).trace().real();
    return p;
}

/// F_jk = sum_i d_j p_i d_k p_i / p_i; grads is d x n with grads(j, i) = d_j p_i.
/// Outcomes with p_i < 1e-14 are skipped.
inline RMatrix classical_fim(const RVector& probs, const RMatrix& grads) {
    require(grads.cols() == probs.size(), ErrorKind::DimensionMismatch, "gradient columns must match outcomes");
    require(probs.size() == 0 || probs.minCoeff() >= -1e-12, ErrorKind::InvalidArgument, "negative probability");
    require(std::abs(probs.sum() - 1.0) <= 1e-10, ErrorKind::InvalidArgument, "probabilities do not sum to 1");
    for (Eigen::Index j = 0; j < grads.rows(); ++j) {
        const double row_sum = grads.row(j).sum();
        require(std::abs(row_sum) <= 1e-10 * std::max(1.0, grads.row(j).cwiseAbs().sum()),
                ErrorKind::GradientNormalization,
                "gradient row " + std::to_string(j) + " sums to " + std::to_string(row_sum));
    }
    const Eigen::Index d = grads.rows();
    RMatrix f = RMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (probs(i) < 1e-14) continue;
        f += grads.col(i) * grads.col(i).transpose() / probs(i);
    }
    return f;
}

inline void require_same_shape(const RMatrix& q, const RMatrix& d) {
    require(q.rows() == q.cols() && d.rows() == d.cols() && q.rows() == d.rows(), ErrorKind::DimensionMismatch,
            "Q and D must be square matrices of the same size");
}

/// R = max |eig(i Q^-1 D)|, nullopt when Q is singular at rel_tol.
/// A one-parameter model has R = 0.
inline std::optional<double> ai_measure(const RMatrix& q, const RMatrix& d, double rel_tol = 1e-10) {
    require_same_shape(q, d);
    const auto qinv = sym_inverse(q, rel_tol);
    if (!qinv) return std::nullopt;
    if (q.rows() < 2) return 0.0;
    return spectral_absmax(CMatrix(kI * (*qinv * d).cast<cplx>()));
}

/// R = sqrt(det D / det Q) for two parameters.
inline std::optional<double> ai_two_param(const RMatrix& q, const RMatrix& d) {
    require_same_shape(q, d);
    require(q.rows() == 2, ErrorKind::DimensionMismatch, "ai_two_param needs 2x2 matrices");
    const double det_q = q.determinant();
    if (!(det_q > 0.0)) return std::nullopt;
    return std::sqrt(std::max(0.0, d.determinant()) / det_q);
}

/// Principal square root of a symmetric positive-definite matrix.
inline RMatrix spd_sqrt(const RMatrix& w) {
    require_symmetric(w, 1e-12, "weight matrix");
    Eigen::SelfAdjointEigenSolver<RMatrix> es(RMatrix((w + w.transpose()) / 2.0));
    require(es.eigenvalues().size() == 0 || es.eigenvalues().minCoeff() > 0.0, ErrorKind::InvalidArgument,
            "weight matrix must be positive definite");
    return es.operatorSqrt();
}

struct HolevoBounds {
    double c_sld = 0.0;
    double c_h = 0.0;
    double delta = 0.0;
};

/// Pure-state Holevo bound:
///   C_SLD = tr(W Q^-1),  C_H = C_SLD + || sqrt(W) Q^-1 D Q^-1 sqrt(W) ||_1,
///   delta = (C_H - C_SLD) / C_SLD.
inline std::optional<HolevoBounds> holevo_pure(const RMatrix& q, const RMatrix& d, const RMatrix& w,
                                               double rel_tol = 1e-10) {
    require_same_shape(q, d);
    require(w.rows() == q.rows() && w.cols() == q.cols(), ErrorKind::DimensionMismatch, "weight matrix shape");
    const auto qinv = sym_inverse(q, rel_tol);
    if (!qinv) return std::nullopt;
    const RMatrix sw = spd_sqrt(w);
    HolevoBounds b;
    b.c_sld = (w * *qinv).trace();
    b.c_h = b.c_sld + trace_norm(RMatrix(sw * *qinv * d * *qinv * sw));
    b.delta = (b.c_h - b.c_sld) / b.c_sld;
    return b;
}

inline std::optional<HolevoBounds> holevo_pure(const RMatrix& q, const RMatrix& d, double rel_tol = 1e-10) {
    return holevo_pure(q, d, RMatrix::Identity(q.rows(), q.cols()), rel_tol);
}

/// Principal sub-blocks of Q and D on a nonempty proper parameter subset.
inline std::pair<QfimMatrix, UhlmannMatrix> submodel(const QfimMatrix& q, const UhlmannMatrix& d,
                                                    const std::vector<int>& indices) {
    require_same_shape(q.values, d.values);
    const auto full = static_cast<std::size_t>(q.values.rows());
    require(!indices.empty() && indices.size() < full, ErrorKind::InvalidArgument,
            "submodel needs a nonempty proper subset of the parameters");
    std::vector<int> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), ErrorKind::InvalidArgument,
            "duplicate parameter index");
    const auto k = static_cast<Eigen::Index>(indices.size());
    QfimMatrix qs{RMatrix(k, k), {}};
    UhlmannMatrix ds{RMatrix(k, k), {}};
    for (Eigen::Index a = 0; a < k; ++a) {
        const int ia = indices[a];
        require(ia >= 0 && static_cast<std::size_t>(ia) < full, ErrorKind::InvalidArgument, "index out of range");
        if (static_cast<std::size_t>(ia) < q.labels.size()) qs.labels.push_back(q.labels[ia]);
        for (Eigen::Index b = 0; b < k; ++b) {
            qs.values(a, b) = q.values(ia, indices[b]);
            ds.values(a, b) = d.values(ia, indices[b]);
        }
    }
    ds.labels = qs.labels;
    return {qs, ds};
}

/// Everything computed for one (model, probe, point).
struct IncompatReport {
    QfimMatrix qfim;
    UhlmannMatrix uhlmann;
    RMatrix weight;
    double det_q = 0.0;
    bool singular = false;
    // Meaningful only when !singular.
    double c_sld = 0.0;
    double c_h = 0.0;
    double delta = 0.0;
    double r_ai = 0.0;
};

inline IncompatReport incompat_report(QfimMatrix q, UhlmannMatrix d, const RMatrix& w, double rel_tol = 1e-10) {
    IncompatReport r;
    r.det_q = q.values.determinant();
    r.weight = w;
    const auto ai = ai_measure(q.values, d.values, rel_tol);
    const auto hb = holevo_pure(q.values, d.values, w, rel_tol);
    r.singular = !ai || !hb;
    if (!r.singular) {
        r.r_ai = *ai;
        r.c_sld = hb->c_sld;
        r.c_h = hb->c_h;
        r.delta = hb->delta;
    }
    r.qfim = std::move(q);
    r.uhlmann = std::move(d);
    return r;
}

inline IncompatReport incompat_report(const GeneratorSet& gens, const Probe& probe, const RMatrix& w,
                                      double rel_tol = 1e-10) {
    return incompat_report(qfim_from_generators(gens, probe), uhlmann_from_generators(gens, probe), w, rel_tol);
}

}  // namespace qmetro
