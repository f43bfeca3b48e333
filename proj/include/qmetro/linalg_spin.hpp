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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "qmetro/error.hpp"

/// Dense kernels shared by every other module: su(2) irreducible
/// representations, Hermitian eigendecomposition, the unitary exp(-i c A),
/// spectral and trace norms, and a conditioning-aware symmetric inverse.
namespace qmetro {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Largest absolute entry; cheap scale for relative tolerances.
template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Real 3-vector of unit Euclidean norm (checked to 1e-12).
class UnitVec3 {
public:
    UnitVec3(double x, double y, double z) : v_(x, y, z) {
        require(std::abs(v_.norm() - 1.0) <= 1e-12, ErrorKind::InvalidArgument,
                "UnitVec3 norm deviates from 1 by " + std::to_string(v_.norm() - 1.0));
    }

    static UnitVec3 normalized(double x, double y, double z) {
        Eigen::Vector3d v(x, y, z);
        double n = v.norm();
        require(n > 0.0, ErrorKind::InvalidArgument, "cannot normalize the zero vector");
        v /= n;
        return UnitVec3(v.x(), v.y(), v.z());
    }

    double x() const { return v_.x(); }
    double y() const { return v_.y(); }
    double z() const { return v_.z(); }
    const Eigen::Vector3d& vec() const { return v_; }

    double dot(const UnitVec3& o) const { return v_.dot(o.v_); }
    Eigen::Vector3d cross(const UnitVec3& o) const { return v_.cross(o.v_); }

private:
    Eigen::Vector3d v_;
};

/// Complex square matrix with A = A^dagger, checked on construction.
class HermitianMatrix {
public:
    explicit HermitianMatrix(CMatrix a, double rel_tol = 1e-12) : a_(std::move(a)) {
        require(a_.rows() == a_.cols(), ErrorKind::DimensionMismatch, "matrix is not square");
        double residual = max_abs(CMatrix(a_ - a_.adjoint()));
        require(residual <= rel_tol * std::max(1.0, max_abs(a_)), ErrorKind::NotHermitian,
                "hermiticity residual " + std::to_string(residual));
    }

    /// (A + A^dagger) / 2, no check.
    static HermitianMatrix hermitize(const CMatrix& a) {
        return HermitianMatrix(CMatrix((a + a.adjoint()) / 2.0));
    }

    static HermitianMatrix zero(Eigen::Index n) { return HermitianMatrix(CMatrix::Zero(n, n)); }

    const CMatrix& matrix() const { return a_; }
    Eigen::Index dim() const { return a_.rows(); }

private:
    CMatrix a_;
};

/// The spin-s irreducible representation of su(2) in dimension N = 2s + 1.
/// Basis order is Jz-descending: index k carries m = s - k.
class SpinRep {
public:
    int dim() const { return n_; }
    double spin() const { return (n_ - 1) / 2.0; }
    const CMatrix& jx() const { return jx_; }
    const CMatrix& jy() const { return jy_; }
    const CMatrix& jz() const { return jz_; }

    friend SpinRep build_spin_rep(int n);

private:
    int n_ = 0;
    CMatrix jx_, jy_, jz_;
};

inline SpinRep build_spin_rep(int n) {
    require(n >= 2, ErrorKind::InvalidDimension, "spin representation needs N >= 2, got " + std::to_string(n));
    const double s = (n - 1) / 2.0;
    CMatrix jplus = CMatrix::Zero(n, n);
    CMatrix jz = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double m = s - k;
        jz(k, k) = m;
        // J+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>, and |m+1> sits at index k-1.
        if (k > 0) jplus(k - 1, k) = std::sqrt(s * (s + 1) - m * (m + 1));
    }
    const CMatrix jminus = jplus.adjoint();
    SpinRep rep;
    rep.n_ = n;
    rep.jx_ = (jplus + jminus) / 2.0;
    rep.jy_ = (jplus - jminus) / (2.0 * kI);
    rep.jz_ = jz;
    return rep;
}

/// n . J
inline HermitianMatrix j_direction(const SpinRep& rep, const UnitVec3& n) {
    return HermitianMatrix(CMatrix(n.x() * rep.jx() + n.y() * rep.jy() + n.z() * rep.jz()));
}

/// n . J for an arbitrary real 3-vector (no unit-norm requirement).
inline CMatrix j_linear(const SpinRep& rep, const Eigen::Vector3d& n) {
    return n.x() * rep.jx() + n.y() * rep.jy() + n.z() * rep.jz();
}

struct HermEig {
    RVector values;   // ascending
    CMatrix vectors;  // columns are eigenvectors
};

inline HermEig herm_eig(const HermitianMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix());
    require(es.info() == Eigen::Success, ErrorKind::NumericConsistency, "Hermitian eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

inline HermEig herm_eig(const CMatrix& a) { return herm_eig(HermitianMatrix(a)); }

/// exp(-i c A) through the eigendecomposition of A.
inline CMatrix expm_i(const HermitianMatrix& a, double c) {
    const HermEig e = herm_eig(a);
    CVector phases(e.values.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::exp(-kI * (c * e.values(k)));
    return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

/// Largest |eigenvalue| of a matrix whose spectrum is real up to 1e-8 relative.
template <class Derived>
double spectral_absmax(const Eigen::MatrixBase<Derived>& a) {
    require(a.rows() == a.cols(), ErrorKind::DimensionMismatch, "spectral_absmax needs a square matrix");
    if (a.size() == 0) return 0.0;
    const CMatrix m = a.template cast<cplx>();
    Eigen::ComplexEigenSolver<CMatrix> es(m, /*computeEigenvectors=*/false);
    require(es.info() == Eigen::Success, ErrorKind::NumericConsistency, "eigensolver failed");
    const Eigen::VectorXcd& ev = es.eigenvalues();
    const double absmax = ev.cwiseAbs().maxCoeff();
    const double imag = ev.imag().cwiseAbs().maxCoeff();
    require(imag <= 1e-8 * std::max(1.0, absmax), ErrorKind::SpectrumNotReal,
            "eigenvalue imaginary part " + std::to_string(imag));
    return absmax;
}

/// Sum of singular values.
template <class Derived>
double trace_norm(const Eigen::MatrixBase<Derived>& a) {
    if (a.size() == 0) return 0.0;
    if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
        Eigen::JacobiSVD<CMatrix> svd{CMatrix(a)};
        return svd.singularValues().sum();
    } else {
        Eigen::JacobiSVD<RMatrix> svd{RMatrix(a)};
        return svd.singularValues().sum();
    }
}

/// Count of singular values above rel_tol times the largest one.
template <class Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& a, double rel_tol = 1e-10) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(a.eval());
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > rel_tol * sv(0)) ++rank;
    return rank;
}

inline void require_symmetric(const RMatrix& q, double rel_tol, const char* what) {
    require(q.rows() == q.cols(), ErrorKind::DimensionMismatch, std::string(what) + " is not square");
    const double residual = max_abs(RMatrix(q - q.transpose()));
    require(residual <= rel_tol * max_abs(q), ErrorKind::NotSymmetric,
            std::string(what) + " asymmetry " + std::to_string(residual));
}

/// Inverse of a symmetric positive-definite matrix, or nullopt when
/// lambda_min / lambda_max < rel_tol (never a pseudo-inverse).
inline std::optional<RMatrix> sym_inverse(const RMatrix& q, double rel_tol = 1e-10) {
    require_symmetric(q, 1e-10, "sym_inverse input");
    if (q.size() == 0) return RMatrix(0, 0);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(RMatrix((q + q.transpose()) / 2.0));
    require(es.info() == Eigen::Success, ErrorKind::NumericConsistency, "symmetric eigensolver failed");
    const RVector& ev = es.eigenvalues();
    const double lmax = ev.maxCoeff();
    if (!(lmax > 0.0) || ev.minCoeff() / lmax < rel_tol) return std::nullopt;
    return RMatrix(es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose());
}

}  // namespace qmetro
