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

// qmetro: command-line front end.
//
//   qmetro scan     --model two --dim 2 --alpha 0.785398 --time 5 --grid 101x101 --out qubit_t5.csv
//   qmetro metrics  --model three --dim 6 --alpha 1.047198 --B 1 --theta 0.5 --varphi 0.3 --time 5
//   qmetro scaling  --model two --alphas 0.785398,0.523599 --dims 4,5,6,7,8,9,10,11,12
//   qmetro fim-rank --params 2 --outcomes 3 --trials 1000 --seed 7
//
// Exit status: 0 success, 2 usage error, 1 numeric-consistency failure.

#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qmetro/qmetro.hpp"

namespace {

constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string model = "two";
    int dim = 2;
    double alpha = std::numbers::pi / 4;
    double phi = 0.0;  // relative phase of the probe
    double time = 5.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string grid = "101x101";
    double tol = 1e-10;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--model", o.model, "Encoding model")->check(CLI::IsMember({"two", "three"}));
    cmd->add_option("--dim", o.dim, "Probe dimension N = 2s + 1");
    cmd->add_option("--alpha", o.alpha, "Probe superposition angle alpha");
    cmd->add_option("--phi", o.phi, "Probe relative phase");
    cmd->add_option("--time", o.time, "Evolution time t");
    cmd->add_option("--seed", o.seed, "RNG seed (only fim-rank draws random numbers)");
    cmd->add_option("--out", o.out, "Output path (stdout when omitted)");
    cmd->add_option("--grid", o.grid, "Grid size THETAxB for scan");
    cmd->add_option("--tol", o.tol, "Relative singularity tolerance");
}

qmetro::ModelKind parse_model(const std::string& m) {
    return m == "three" ? qmetro::ModelKind::ThreeParam : qmetro::ModelKind::TwoParam;
}

std::pair<int, int> parse_grid(const std::string& g) {
    std::string s = g;
    // accept 101x101, 101X101 and the UTF-8 multiplication sign
    for (const std::string sep : {"\xc3\x97", "X"}) {
        for (auto pos = s.find(sep); pos != std::string::npos; pos = s.find(sep)) s.replace(pos, sep.size(), "x");
    }
    const auto x = s.find('x');
    if (x == std::string::npos) throw qmetro::Error(qmetro::ErrorKind::InvalidArgument, "grid must look like 101x101");
    try {
        std::size_t used_a = 0, used_b = 0;
        const std::string a = s.substr(0, x), b = s.substr(x + 1);
        const int na = std::stoi(a, &used_a), nb = std::stoi(b, &used_b);
        if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument("trailing characters");
        return {na, nb};
    } catch (const std::exception&) {
        throw qmetro::Error(qmetro::ErrorKind::InvalidArgument, "grid must look like 101x101");
    }
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw qmetro::Error(qmetro::ErrorKind::Io, "cannot open " + path + " for writing");
    f << content;
    if (!f) throw qmetro::Error(qmetro::ErrorKind::Io, "write to " + path + " failed");
}

qmetro::ModelPoint make_point(qmetro::ModelKind kind, double b, double theta, double varphi, double t) {
    return kind == qmetro::ModelKind::TwoParam ? qmetro::ModelPoint::two_param(b, theta, t)
                                               : qmetro::ModelPoint::three_param(b, theta, varphi, t);
}

qmetro::RMatrix weight_from(const std::vector<double>& diag, int d) {
    if (diag.empty()) return qmetro::RMatrix::Identity(d, d);
    qmetro::require(static_cast<int>(diag.size()) == d, qmetro::ErrorKind::DimensionMismatch,
                    "--weights needs one entry per parameter");
    qmetro::RMatrix w = qmetro::RMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) w(i, i) = diag[i];
    return w;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Precision bounds and incompatibility for su(2) multi-parameter estimation"};
    app.require_subcommand(1);

    CommonOptions scan_o, metrics_o, scaling_o, rank_o;
    double b = 1.0, theta = std::numbers::pi / 4, varphi = 0.0;
    unsigned threads = 1;
    std::vector<double> weights, alphas;
    std::vector<int> dims;
    std::optional<int> params, outcomes;
    int trials = 1000;

    auto* scan = app.add_subcommand("scan", "T(theta, B) = R - Delta over one period in B (CSV)");
    add_common(scan, scan_o);
    scan->add_option("--varphi", varphi, "Model azimuth phi (three-parameter)");
    scan->add_option("--threads", threads, "Worker threads; output is identical for any count");
    scan->add_option("--weights", weights, "Diagonal of the weight matrix W")->delimiter(',');

    auto* metrics = app.add_subcommand("metrics", "Q, D, bounds, Delta and R at one point (JSON)");
    add_common(metrics, metrics_o);
    metrics->add_option("--B", b, "Field strength B");
    metrics->add_option("--theta", theta, "Polar angle theta");
    metrics->add_option("--varphi", varphi, "Model azimuth phi (three-parameter)");
    metrics->add_option("--weights", weights, "Diagonal of the weight matrix W")->delimiter(',');

    auto* scaling = app.add_subcommand("scaling", "Gamma[Q^(N), Q^(baseline)] table with log-log slopes (CSV)");
    add_common(scaling, scaling_o);
    scaling->add_option("--alphas", alphas, "Probe angles (defaults to --alpha)")->delimiter(',');
    scaling->add_option("--dims", dims, "Dimensions N >= 4 (default 4..12)")->delimiter(',');
    scaling->add_option("--B", b, "Field strength B");
    scaling->add_option("--theta", theta, "Polar angle theta");
    scaling->add_option("--varphi", varphi, "Model azimuth phi (three-parameter)");

    auto* rank = app.add_subcommand("fim-rank", "Classical FIM rank Monte Carlo over softmax families (JSON)");
    add_common(rank, rank_o);
    rank->add_option("--params", params, "Parameter count d (default: 2 for --model two, 3 for three)");
    rank->add_option("--outcomes", outcomes, "Outcome count n (default: --dim)");
    rank->add_option("--trials", trials, "Number of sampled families");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*scan) {
            qmetro::ScanConfig cfg;
            cfg.kind = parse_model(scan_o.model);
            cfg.probe = {scan_o.dim, scan_o.alpha, scan_o.phi};
            cfg.t = scan_o.time;
            cfg.phi = varphi;
            const auto [nt, nb] = parse_grid(scan_o.grid);
            cfg.theta = {0.0, 2 * std::numbers::pi, nt};
            cfg.b_count = nb;
            cfg.rel_tol = scan_o.tol;
            cfg.threads = threads;
            cfg.weight = weight_from(weights, qmetro::parameter_count(cfg.kind));
            const qmetro::ScanTable table = qmetro::scan_T(cfg);
            std::ostringstream os;
            qmetro::write_scan_csv(table, os);
            emit(scan_o.out, os.str());
            if (const int bad = table.invariant_violations(); bad > 0) {
                std::cerr << "qmetro: " << bad << " regular cells violate 0 <= Delta <= R <= 1\n";
                return kExitNumeric;
            }
        } else if (*metrics) {
            const auto kind = parse_model(metrics_o.model);
            const auto point = make_point(kind, b, theta, varphi, metrics_o.time);
            const auto report = qmetro::metrics_report({metrics_o.dim, metrics_o.alpha, metrics_o.phi}, point,
                                                       weight_from(weights, qmetro::parameter_count(kind)),
                                                       metrics_o.tol);
            emit(metrics_o.out, report.dump(2) + "\n");
        } else if (*scaling) {
            const auto kind = parse_model(scaling_o.model);
            if (alphas.empty()) alphas.push_back(scaling_o.alpha);
            if (dims.empty())
                for (int n = 4; n <= 12; ++n) dims.push_back(n);
            const auto table = qmetro::scaling_table(kind, alphas, dims,
                                                     make_point(kind, b, theta, varphi, scaling_o.time),
                                                     scaling_o.phi, scaling_o.tol);
            std::ostringstream os;
            qmetro::write_scaling_csv(table, os);
            emit(scaling_o.out, os.str());
        } else if (*rank) {
            qmetro::RankExperimentConfig cfg;
            cfg.d = params.value_or(qmetro::parameter_count(parse_model(rank_o.model)));
            cfg.n = outcomes.value_or(rank_o.dim);
            cfg.trials = trials;
            cfg.seed = rank_o.seed;
            const auto report = qmetro::fim_rank_experiment(cfg);
            emit(rank_o.out, qmetro::to_json(report).dump(2) + "\n");
            if (report.rank_violations > 0) return kExitNumeric;
        }
    } catch (const qmetro::Error& e) {
        std::cerr << "qmetro: " << e.what() << "\n";
        return qmetro::is_usage_error(e.kind()) ? kExitUsage : kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "qmetro: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
