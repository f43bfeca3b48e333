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
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "qmetro/encoding.hpp"
#include "qmetro/linalg_spin.hpp"
#include "qmetro/metrology.hpp"
#include "qmetro/su2_models.hpp"

/// Experiment drivers behind the command-line tool: T(theta, B) grid scans,
/// dimension-scaling tables, the Fisher-information rank experiment and the
/// single-point metrics report, with their CSV/JSON serializations.
namespace qmetro {

/// Shortest round-trip decimal form ("%.17g").
inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;
    int count = 2;

    double at(int k) const { return count == 1 ? lo : lo + (hi - lo) * k / (count - 1); }
};

// ---------------------------------------------------------------------------
// T(theta, B) scans

struct ScanConfig {
    ModelKind kind = ModelKind::TwoParam;
    ProbeSpec probe{2, std::numbers::pi / 4, 0.0};
    double t = 5.0;
    double phi = 0.0;  // model azimuth, three-parameter only
    Range theta{0.0, 2 * std::numbers::pi, 101};
    std::optional<Range> b_range;  // defaults to one period [0, 2 pi / t]
    int b_count = 101;             // used with the default B range
    RMatrix weight;                // empty means identity
    double rel_tol = 1e-10;
    unsigned threads = 1;

    Range b() const { return b_range ? *b_range : Range{0.0, 2 * std::numbers::pi / t, b_count}; }

    void validate() const {
        require(probe.N >= 2, ErrorKind::InvalidDimension, "scan needs N >= 2");
        require(t > 0.0, ErrorKind::InvalidArgument, "scan needs t > 0");
        const Range br = b();
        require(theta.count >= 2 && br.count >= 2, ErrorKind::InvalidArgument, "grid counts must be >= 2");
        require(theta.hi > theta.lo && br.hi > br.lo, ErrorKind::InvalidArgument, "grid ranges must be nonempty");
        require(rel_tol > 0.0, ErrorKind::InvalidArgument, "singularity tolerance must be > 0");
        const int d = parameter_count(kind);
        require(weight.size() == 0 || (weight.rows() == d && weight.cols() == d), ErrorKind::DimensionMismatch,
                "weight matrix must be d x d");
    }
};

struct ScanCell {
    double theta = 0.0;
    double B = 0.0;
    double det_q = 0.0;
    bool singular = false;
    double r = 0.0;
    double delta = 0.0;
    double c_sld = 0.0;
    double c_h = 0.0;

    double T() const { return r - delta; }
};

/// Row-major cells: theta outer, B inner.
struct ScanTable {
    int n_theta = 0;
    int n_b = 0;
    std::vector<ScanCell> cells;

    /// Regular cells breaking 0 <= Delta <= R <= 1 (+tol) or C_H >= C_SLD.
    int invariant_violations(double tol = 1e-9) const {
        int bad = 0;
        for (const ScanCell& c : cells) {
            if (c.singular) continue;
            const bool ok = c.delta >= -tol && c.delta <= c.r + tol && c.r <= 1.0 + tol && c.c_h >= c.c_sld - tol;
            if (!ok) ++bad;
        }
        return bad;
    }
};

inline ScanCell scan_cell(const SpinRep& rep, const Probe& probe, const ScanConfig& cfg, const RMatrix& w,
                          double theta, double b) {
    const ModelPoint point = cfg.kind == ModelKind::TwoParam ? ModelPoint::two_param(b, theta, cfg.t)
                                                             : ModelPoint::three_param(b, theta, cfg.phi, cfg.t);
    const IncompatReport rep_ = incompat_report(closed_generators(rep, point), probe, w, cfg.rel_tol);
    ScanCell c;
    c.theta = theta;
    c.B = b;
    c.det_q = rep_.det_q;
    c.singular = rep_.singular;
    if (!c.singular) {
        c.r = rep_.r_ai;
        c.delta = rep_.delta;
        c.c_sld = rep_.c_sld;
        c.c_h = rep_.c_h;
    }
    return c;
}

/// Evaluates R, Delta and T = R - Delta on the (theta, B) grid. Cells are
/// independent; with threads > 1 they are computed in strided slices and
/// gathered in row-major order, so the output does not depend on threads.
inline ScanTable scan_T(const ScanConfig& cfg) {
    cfg.validate();
    const SpinRep rep = build_spin_rep(cfg.probe.N);
    const Probe probe = make_probe(cfg.probe);
    const int d = parameter_count(cfg.kind);
    const RMatrix w = cfg.weight.size() ? cfg.weight : RMatrix::Identity(d, d);
    spd_sqrt(w);  // validates W up front

    const Range br = cfg.b();
    ScanTable table;
    table.n_theta = cfg.theta.count;
    table.n_b = br.count;
    const std::size_t total = static_cast<std::size_t>(table.n_theta) * table.n_b;
    table.cells.resize(total);

    const unsigned threads = std::max(1u, cfg.threads);
    std::vector<std::exception_ptr> failures(threads);
    auto work = [&](unsigned first) {
        try {
            for (std::size_t i = first; i < total; i += threads) {
                const int it = static_cast<int>(i / table.n_b);
                const int ib = static_cast<int>(i % table.n_b);
                table.cells[i] = scan_cell(rep, probe, cfg, w, cfg.theta.at(it), br.at(ib));
            }
        } catch (...) {
            failures[first] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back(work, k);
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    return table;
}

inline void write_scan_csv(const ScanTable& table, std::ostream& os) {
    os << "theta,B,R,Delta,T,det_q,singular\n";
    for (const ScanCell& c : table.cells) {
        os << format_number(c.theta) << ',' << format_number(c.B) << ',';
        if (c.singular)
            os << ",,,";
        else
            os << format_number(c.r) << ',' << format_number(c.delta) << ',' << format_number(c.T()) << ',';
        os << format_number(c.det_q) << ',' << (c.singular ? 1 : 0) << '\n';
    }
}

/// Fractions of regular cells with T < threshold in each grid; nullopt when a
/// grid has no regular cells.
inline std::pair<std::optional<double>, std::optional<double>> shrinkage_stat(const ScanTable& g1,
                                                                             const ScanTable& g2,
                                                                             double threshold = 0.05) {
    require(g1.n_theta == g2.n_theta && g1.n_b == g2.n_b && g1.cells.size() == g2.cells.size(),
            ErrorKind::DimensionMismatch, "shrinkage_stat needs grids of the same shape");
    auto fraction = [threshold](const ScanTable& g) -> std::optional<double> {
        int regular = 0, small = 0;
        for (const ScanCell& c : g.cells) {
            if (c.singular) continue;
            ++regular;
            if (c.T() < threshold) ++small;
        }
        if (regular == 0) return std::nullopt;
        return static_cast<double>(small) / regular;
    };
    return {fraction(g1), fraction(g2)};
}

// ---------------------------------------------------------------------------
// Dimension scaling

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument, "slope fit needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    require(sxx > 0.0, ErrorKind::InvalidArgument, "slope fit needs distinct abscissae");
    return sxy / sxx;
}

struct ScalingRow {
    double alpha = 0.0;
    int N = 0;
    std::optional<double> gamma;
};

struct ScalingSlope {
    double alpha = 0.0;
    std::optional<double> slope;
};

struct ScalingTable {
    ModelKind kind = ModelKind::TwoParam;
    int baseline_N = 2;
    std::vector<ScalingRow> rows;
    std::vector<ScalingSlope> slopes;
};

/// Baseline dimension of Gamma[Q^(N), Q^(M)]: the qubit for two parameters,
/// N = 4 for three parameters (the three-parameter qubit QFIM is singular).
inline int scaling_baseline(ModelKind kind) { return kind == ModelKind::TwoParam ? 2 : 4; }

/// Abscissa of the log-log fit: log(N - 1) for two parameters, log N for three.
inline double scaling_abscissa(ModelKind kind, int n) {
    return std::log(kind == ModelKind::TwoParam ? n - 1.0 : static_cast<double>(n));
}

/// Gamma[Q^(N), Q^(baseline)] for each (alpha, N) with the extremal-superposition
/// probe of the same alpha, plus the log-log slope per alpha.
inline ScalingTable scaling_table(ModelKind kind, const std::vector<double>& alphas, const std::vector<int>& dims,
                                  const ModelPoint& point, double phi_rel = 0.0, double rel_tol = 1e-10) {
    require_kind(point, kind);
    require(!alphas.empty() && !dims.empty(), ErrorKind::InvalidArgument, "scaling needs alphas and dimensions");
    for (int n : dims) require(n >= 4, ErrorKind::InvalidArgument, "scaling dimensions must be >= 4");
    ScalingTable table;
    table.kind = kind;
    table.baseline_N = scaling_baseline(kind);
    const SpinRep base_rep = build_spin_rep(table.baseline_N);
    for (double alpha : alphas) {
        const RMatrix q_base =
            model_qfim(base_rep, point, make_probe({table.baseline_N, alpha, phi_rel})).values;
        std::vector<double> xs, ys;
        for (int n : dims) {
            const SpinRep rep = build_spin_rep(n);
            const RMatrix q_n = model_qfim(rep, point, make_probe({n, alpha, phi_rel})).values;
            ScalingRow row{alpha, n, gamma_scaling(q_n, q_base, rel_tol)};
            if (row.gamma && *row.gamma > 0.0) {
                xs.push_back(scaling_abscissa(kind, n));
                ys.push_back(std::log(*row.gamma));
            }
            table.rows.push_back(row);
        }
        ScalingSlope s{alpha, std::nullopt};
        if (xs.size() >= 2 && xs.size() == dims.size()) s.slope = fit_slope(xs, ys);
        table.slopes.push_back(s);
    }
    return table;
}

inline void write_scaling_csv(const ScalingTable& table, std::ostream& os) {
    os << "alpha,N,Gamma,slope\n";
    for (const ScalingRow& row : table.rows) {
        std::optional<double> slope;
        for (const ScalingSlope& s : table.slopes)
            if (s.alpha == row.alpha) slope = s.slope;
        os << format_number(row.alpha) << ',' << row.N << ',' << (row.gamma ? format_number(*row.gamma) : "") << ','
           << (slope ? format_number(*slope) : "") << '\n';
    }
}

// ---------------------------------------------------------------------------
// Fisher-information rank experiment

struct RankExperimentConfig {
    int d = 2;       // parameters
    int n = 2;       // outcomes
    int trials = 1000;
    std::uint64_t seed = 0;
    std::vector<double> lambda;  // evaluation point, zeros when empty

    void validate() const {
        require(d >= 1, ErrorKind::InvalidArgument, "rank experiment needs d >= 1");
        require(n >= 2, ErrorKind::InvalidArgument, "rank experiment needs n >= 2");
        require(trials >= 1, ErrorKind::InvalidArgument, "rank experiment needs trials >= 1");
        require(lambda.empty() || static_cast<int>(lambda.size()) == d, ErrorKind::DimensionMismatch,
                "lambda must have d entries");
    }
};

/// Softmax-affine family p_i(lambda) ∝ exp(a_i + sum_j b_ij lambda_j) at one point.
struct SoftmaxFamily {
    RVector probs;  // n
    RMatrix grads;  // d x n, grads(j, i) = d_j p_i
};

/// Trial `trial` draws a, b from its own engine seeded by (seed, d, n, trial),
/// so any trial can be regenerated independently of the others.
inline SoftmaxFamily sample_softmax_family(const RankExperimentConfig& cfg, int trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(cfg.d), static_cast<std::uint32_t>(cfg.n),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    RVector a(cfg.n);
    RMatrix b(cfg.n, cfg.d);
    for (int i = 0; i < cfg.n; ++i) a(i) = normal(rng);
    for (int i = 0; i < cfg.n; ++i)
        for (int j = 0; j < cfg.d; ++j) b(i, j) = normal(rng);

    RVector z = a;
    for (int j = 0; j < cfg.d && !cfg.lambda.empty(); ++j) z += b.col(j) * cfg.lambda[j];
    z.array() -= z.maxCoeff();
    SoftmaxFamily fam;
    fam.probs = z.array().exp();
    fam.probs /= fam.probs.sum();
    // d_j p_i = p_i (b_ij - sum_k p_k b_kj)
    fam.grads.resize(cfg.d, cfg.n);
    for (int j = 0; j < cfg.d; ++j) {
        const double mean_b = fam.probs.dot(b.col(j));
        for (int i = 0; i < cfg.n; ++i) fam.grads(j, i) = fam.probs(i) * (b(i, j) - mean_b);
    }
    return fam;
}

/// F = eta . d~ with eta_ik = d_i p_k / p_k - d_i p_n / p_n (k < n) and
/// d~_kj = d_j p_k, obtained by eliminating the last outcome.
struct CauchyBinetFactors {
    RMatrix eta;      // d x (n-1)
    RMatrix d_tilde;  // (n-1) x d
};

inline CauchyBinetFactors cauchy_binet_factors(const SoftmaxFamily& fam) {
    const Eigen::Index d = fam.grads.rows();
    const Eigen::Index n = fam.grads.cols();
    CauchyBinetFactors out{RMatrix(d, n - 1), RMatrix(n - 1, d)};
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
            out.eta(i, k) = fam.grads(i, k) / fam.probs(k) - fam.grads(i, n - 1) / fam.probs(n - 1);
            out.d_tilde(k, i) = fam.grads(i, k);
        }
    return out;
}

namespace detail {

inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace detail

/// det(eta . d~) as the Cauchy-Binet sum over d-subsets of the n-1 columns;
/// zero when n - 1 < d.
inline double cauchy_binet_det(const CauchyBinetFactors& f) {
    const int d = static_cast<int>(f.eta.rows());
    const int m = static_cast<int>(f.eta.cols());
    if (m < d) return 0.0;
    double sum = 0.0;
    detail::for_each_subset(m, d, [&](const std::vector<int>& s) {
        RMatrix es(d, d), ds(d, d);
        for (int a = 0; a < d; ++a) {
            es.col(a) = f.eta.col(s[a]);
            ds.row(a) = f.d_tilde.row(s[a]);
        }
        sum += es.determinant() * ds.determinant();
    });
    return sum;
}

struct RankReport {
    int d = 0;
    int n = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    int rank_bound = 0;             // min(d, n - 1)
    int max_rank = 0;
    int rank_violations = 0;        // trials with rank(F) > min(d, n - 1)
    int singular_trials = 0;        // rank(F) < d
    int full_rank_trials = 0;
    double max_factor_residual = 0.0;  // max ||F - eta d~|| / ||F||
    double max_det_residual = 0.0;     // max |det F - CB sum| / ||F||^d

    double full_rank_fraction() const { return static_cast<double>(full_rank_trials) / trials; }
    double singular_fraction() const { return static_cast<double>(singular_trials) / trials; }
};

inline RankReport fim_rank_experiment(const RankExperimentConfig& cfg) {
    cfg.validate();
    RankReport rep;
    rep.d = cfg.d;
    rep.n = cfg.n;
    rep.trials = cfg.trials;
    rep.seed = cfg.seed;
    rep.rank_bound = std::min(cfg.d, cfg.n - 1);
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const SoftmaxFamily fam = sample_softmax_family(cfg, trial);
        const RMatrix f = classical_fim(fam.probs, fam.grads);
        const int rank = numerical_rank(f, 1e-10);
        rep.max_rank = std::max(rep.max_rank, rank);
        if (rank > rep.rank_bound) ++rep.rank_violations;
        if (rank < cfg.d)
            ++rep.singular_trials;
        else
            ++rep.full_rank_trials;

        const CauchyBinetFactors cb = cauchy_binet_factors(fam);
        const double scale = std::max(f.norm(), 1e-300);
        rep.max_factor_residual = std::max(rep.max_factor_residual, (f - cb.eta * cb.d_tilde).norm() / scale);
        const double det_scale = std::pow(scale, cfg.d);
        rep.max_det_residual =
            std::max(rep.max_det_residual, std::abs(f.determinant() - cauchy_binet_det(cb)) / det_scale);
    }
    return rep;
}

inline nlohmann::json to_json(const RankReport& r) {
    return {
        {"d", r.d},
        {"n", r.n},
        {"trials", r.trials},
        {"seed", r.seed},
        {"rank_bound", r.rank_bound},
        {"max_rank", r.max_rank},
        {"rank_violations", r.rank_violations},
        {"singular_trials", r.singular_trials},
        {"full_rank_trials", r.full_rank_trials},
        {"full_rank_fraction", r.full_rank_fraction()},
        {"max_factor_residual", r.max_factor_residual},
        {"max_det_residual", r.max_det_residual},
    };
}

// ---------------------------------------------------------------------------
// Single-point metrics

/// Relative Frobenius distance between two generator sets (max over parameters).
inline double generator_distance(const GeneratorSet& a, const GeneratorSet& b) {
    require(a.size() == b.size(), ErrorKind::DimensionMismatch, "generator sets differ in size");
    double worst = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
        const double scale = std::max(a.op(l).norm(), b.op(l).norm());
        const double diff = (a.op(l) - b.op(l)).norm();
        if (scale > 0.0) worst = std::max(worst, diff / scale);
    }
    return worst;
}

inline nlohmann::json matrix_json(const RMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

/// Full report for one (model, probe, point). Deterministic for fixed inputs;
/// singular models keep Q, D and det_q and null the bound fields.
inline nlohmann::json metrics_report(const ProbeSpec& spec, const ModelPoint& point, const RMatrix& weight = {},
                                     double rel_tol = 1e-10) {
    const SpinRep rep = build_spin_rep(spec.N);
    const Probe probe = make_probe(spec);
    const int d = parameter_count(point.kind());
    const RMatrix w = weight.size() ? weight : RMatrix::Identity(d, d);

    const GeneratorSet closed = closed_generators(rep, point);
    const GeneratorSet series = series_generators(rep, point);
    const GeneratorSet numeric = numeric_generators(rep, point);
    const IncompatReport r = incompat_report(closed, probe, w, rel_tol);

    nlohmann::json j;
    j["model"] = point.kind() == ModelKind::TwoParam ? "two" : "three";
    j["dim"] = spec.N;
    j["alpha"] = spec.alpha;
    j["phi_rel"] = spec.phi_rel;
    j["point"] = {{"B", point.B}, {"theta", point.theta}, {"t", point.t}};
    if (point.phi) j["point"]["phi"] = *point.phi;
    j["labels"] = r.qfim.labels;
    j["W"] = matrix_json(w);
    j["Q"] = matrix_json(r.qfim.values);
    j["D"] = matrix_json(r.uhlmann.values);
    j["det_q"] = r.det_q;
    j["singular"] = r.singular;
    if (r.singular) {
        for (const char* key : {"c_sld", "c_h", "delta", "r_ai"}) j[key] = nullptr;
    } else {
        j["c_sld"] = r.c_sld;
        j["c_h"] = r.c_h;
        j["delta"] = r.delta;
        j["r_ai"] = r.r_ai;
    }
    j["generator_route_residuals"] = {
        {"closed_vs_series", generator_distance(closed, series)},
        {"closed_vs_numeric", generator_distance(closed, numeric)},
        {"series_vs_numeric", generator_distance(series, numeric)},
        {"numeric_hermitization", numeric.hermitization_residual},
    };
    return j;
}

}  // namespace qmetro
