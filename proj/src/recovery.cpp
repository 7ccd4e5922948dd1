#include "sarcs/recovery.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sarcs {

void SparseProfile::add(const GridCoord& coord, cdouble value) {
    (void)grid_.flat_index(coord);
    for (const auto& e : entries_) {
        if (e.coord == coord) throw std::invalid_argument("duplicate coordinate in sparse profile");
    }
    entries_.push_back({coord, value});
}

std::vector<SparseEntry> SparseProfile::sparse() const {
    std::vector<SparseEntry> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back({grid_.flat_index(e.coord), e.value});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    return out;
}

std::vector<cdouble> SparseProfile::dense() const {
    std::vector<cdouble> out(grid_.size());
    for (const auto& e : entries_) out[grid_.flat_index(e.coord)] = e.value;
    return out;
}

Scene SparseProfile::to_scene() const {
    Scene scene;
    for (const auto& e : entries_) {
        if (e.value != cdouble{}) scene.targets.push_back(target_at(grid_, e.coord, e.value));
    }
    return scene;
}

double noiseless_threshold(std::span<const cdouble> y) {
    double s = 0.0;
    for (const auto& v : y) s += std::norm(v);
    return 1e-6 * std::sqrt(s);
}

std::string to_string(HaltReason reason) {
    switch (reason) {
        case HaltReason::residual_below_threshold: return "residual_below_threshold";
        case HaltReason::max_iterations: return "max_iterations";
        case HaltReason::stalled: return "stalled";
    }
    return "unknown";
}

namespace {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

double norm2(std::span<const cdouble> v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

struct LeastSquaresFit {
    std::vector<std::size_t> support;  // columns kept, ascending
    std::vector<cdouble> coefficients;
    std::vector<std::size_t> dropped;
};

/// Least squares of y on the restricted columns `support` (ascending). Columns
/// the pivoted QR finds linearly dependent are removed and the fit repeated on
/// the independent remainder.
LeastSquaresFit least_squares(const SensingOperator& op, std::span<const cdouble> y,
                              const std::vector<std::size_t>& support) {
    LeastSquaresFit fit;
    if (support.empty()) return fit;
    const auto rows = static_cast<Eigen::Index>(op.rows());
    Matrix a(rows, static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) {
        const auto col = op.column(support[j]);
        for (Eigen::Index i = 0; i < rows; ++i) a(i, static_cast<Eigen::Index>(j)) = col[static_cast<std::size_t>(i)];
    }
    Vector rhs(rows);
    for (Eigen::Index i = 0; i < rows; ++i) rhs(i) = y[static_cast<std::size_t>(i)];

    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    const auto rank = qr.rank();
    if (rank < a.cols()) {
        std::vector<Eigen::Index> keep;
        for (Eigen::Index j = 0; j < rank; ++j) keep.push_back(qr.colsPermutation().indices()(j));
        std::sort(keep.begin(), keep.end());
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (!std::binary_search(keep.begin(), keep.end(), j)) fit.dropped.push_back(support[static_cast<std::size_t>(j)]);
        }
        Matrix reduced(rows, static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) reduced.col(static_cast<Eigen::Index>(j)) = a.col(keep[j]);
        const Vector sol = reduced.colPivHouseholderQr().solve(rhs);
        for (std::size_t j = 0; j < keep.size(); ++j) {
            fit.support.push_back(support[static_cast<std::size_t>(keep[j])]);
            fit.coefficients.push_back(sol(static_cast<Eigen::Index>(j)));
        }
        return fit;
    }
    const Vector sol = qr.solve(rhs);
    fit.support = support;
    for (Eigen::Index j = 0; j < sol.size(); ++j) fit.coefficients.push_back(sol(j));
    return fit;
}

/// Indices of the `count` largest scores (ties: lowest index), ascending.
std::vector<std::size_t> largest(const std::vector<double>& score, const std::vector<std::size_t>& candidates,
                                 std::size_t count) {
    std::vector<std::size_t> idx = candidates;
    auto better = [&score](std::size_t a, std::size_t b) {
        return score[a] > score[b] || (score[a] == score[b] && a < b);
    };
    if (idx.size() > count) {
        std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(), better);
        idx.resize(count);
    }
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<cdouble> residual_of(const SensingOperator& op, std::span<const cdouble> y,
                                 const std::vector<SparseEntry>& estimate) {
    auto r = op.forward(std::span<const SparseEntry>(estimate));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
    return r;
}

}  // namespace

RecoveryResult cosamp(const SensingOperator& op, std::span<const cdouble> y, const RecoveryConfig& cfg) {
    if (y.size() != op.rows()) throw std::invalid_argument("measurement vector length differs from operator rows");
    if (cfg.sparsity < 1) throw std::invalid_argument("sparsity must be at least 1");
    if (cfg.max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
    if (!(cfg.residual_threshold >= 0.0)) throw std::invalid_argument("residual threshold must be nonnegative");

    const auto& norms = op.column_norms();
    std::vector<std::size_t> visible;
    for (std::size_t g = 0; g < norms.size(); ++g) {
        if (norms[g] > 0.0) visible.push_back(g);
    }
    if (cfg.sparsity > visible.size()) {
        throw std::invalid_argument("sparsity " + std::to_string(cfg.sparsity) + " exceeds the " +
                                    std::to_string(visible.size()) + " columns visible to the selection");
    }
    const std::size_t k = cfg.sparsity;

    RecoveryResult result{SparseProfile(op.grid()), {}};
    auto& diag = result.diagnostics;

    std::vector<SparseEntry> estimate;  // current pruned iterate
    std::vector<cdouble> residual(y.begin(), y.end());
    double residual_norm = norm2(residual);

    std::vector<SparseEntry> best = estimate;
    double best_norm = residual_norm;

    if (residual_norm < cfg.residual_threshold || residual_norm == 0.0) {
        diag.halt = HaltReason::residual_below_threshold;
        diag.final_residual_norm = residual_norm;
        return result;
    }

    std::vector<double> score(norms.size(), 0.0);
    double previous = residual_norm;
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        // Signal proxy with per-column normalization.
        const auto proxy = op.adjoint(residual);
        for (auto g : visible) score[g] = std::abs(proxy[g]) / norms[g];
        auto merged = largest(score, visible, 2 * k);
        for (const auto& e : estimate) merged.push_back(e.index);
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

        auto fit = least_squares(op, y, merged);
        diag.dropped_columns.insert(diag.dropped_columns.end(), fit.dropped.begin(), fit.dropped.end());

        // Prune to the k strongest in the normalized basis.
        std::vector<double> weight(norms.size(), 0.0);
        std::vector<std::size_t> fitted;
        for (std::size_t j = 0; j < fit.support.size(); ++j) {
            weight[fit.support[j]] = std::abs(fit.coefficients[j]) * norms[fit.support[j]];
            fitted.push_back(fit.support[j]);
        }
        const auto kept = largest(weight, fitted, k);
        estimate.clear();
        for (auto g : kept) {
            const auto pos = std::lower_bound(fit.support.begin(), fit.support.end(), g) - fit.support.begin();
            estimate.push_back({g, fit.coefficients[static_cast<std::size_t>(pos)]});
        }

        residual = residual_of(op, y, estimate);
        residual_norm = norm2(residual);
        IterationRecord rec{it, residual_norm, {}};
        for (const auto& e : estimate) rec.support.push_back(e.index);
        diag.iterations.push_back(std::move(rec));

        if (residual_norm < best_norm) {
            best = estimate;
            best_norm = residual_norm;
            diag.best_iteration = it;
        }
        if (residual_norm < cfg.residual_threshold) {
            diag.halt = HaltReason::residual_below_threshold;
            break;
        }
        if (it == cfg.max_iterations) {
            diag.halt = HaltReason::max_iterations;
            break;
        }
        if ((previous - residual_norm) / previous < cfg.stall_tolerance) {
            diag.halt = HaltReason::stalled;
            break;
        }
        previous = residual_norm;
    }

    // Closing least-squares fit on the best support.
    std::vector<std::size_t> support;
    for (const auto& e : best) support.push_back(e.index);
    auto fit = least_squares(op, y, support);
    diag.dropped_columns.insert(diag.dropped_columns.end(), fit.dropped.begin(), fit.dropped.end());
    std::vector<SparseEntry> final_estimate;
    for (std::size_t j = 0; j < fit.support.size(); ++j) {
        final_estimate.push_back({fit.support[j], fit.coefficients[j]});
    }
    const double refit_norm = norm2(residual_of(op, y, final_estimate));
    if (refit_norm > best_norm) {
        final_estimate = best;  // rounding only; LS cannot lose to a subset fit
    }
    diag.final_residual_norm = std::min(refit_norm, best_norm);
    std::sort(diag.dropped_columns.begin(), diag.dropped_columns.end());
    diag.dropped_columns.erase(std::unique(diag.dropped_columns.begin(), diag.dropped_columns.end()),
                               diag.dropped_columns.end());

    for (const auto& e : final_estimate) {
        if (e.value != cdouble{}) result.profile.add(op.grid().unflatten(e.index), e.value);
    }
    return result;
}

RecoveryResult cosamp_auto(const SensingOperator& op, std::span<const cdouble> y, RecoveryConfig cfg,
                           std::size_t max_sparsity) {
    if (max_sparsity < 1) throw std::invalid_argument("max_sparsity must be at least 1");
    for (std::size_t k = 1;; ++k) {
        cfg.sparsity = k;
        auto result = cosamp(op, y, cfg);
        if (result.diagnostics.final_residual_norm < cfg.residual_threshold || k >= max_sparsity) {
            return result;
        }
    }
}

double relative_error(const SparseProfile& estimate, const SparseProfile& truth) {
    const auto& a = estimate.grid().spec();
    const auto& b = truth.grid().spec();
    if (a.nx != b.nx || a.ny != b.ny || a.nvx != b.nvx || a.nvy != b.nvy) {
        throw std::invalid_argument("profiles live on different grids");
    }
    std::map<std::size_t, cdouble> diff;
    double truth_energy = 0.0;
    for (const auto& e : truth.sparse()) {
        diff[e.index] -= e.value;
        truth_energy += std::norm(e.value);
    }
    if (truth_energy == 0.0) throw std::invalid_argument("relative error undefined for a zero truth profile");
    for (const auto& e : estimate.sparse()) diff[e.index] += e.value;
    double err = 0.0;
    for (const auto& [idx, d] : diff) err += std::norm(d);
    return std::sqrt(err / truth_energy);
}

void write_truth_csv(const SparseProfile& profile, std::ostream& out) {
    out << "flat_index,n1,n2,p,q,re,im\n";
    out << std::setprecision(17);
    for (const auto& e : profile.sparse()) {
        const auto c = profile.grid().unflatten(e.index);
        out << e.index << ',' << c.n1 << ',' << c.n2 << ',' << c.p << ',' << c.q << ',' << e.value.real() << ','
            << e.value.imag() << '\n';
    }
}

void write_profile_csv(const SparseProfile& profile, std::ostream& out) {
    out << "flat_index,n1,n2,p,q,x,y,vx,vy,re,im,abs\n";
    out << std::setprecision(17);
    for (const auto& e : profile.sparse()) {
        const auto c = profile.grid().unflatten(e.index);
        const auto pt = profile.grid().to_physical(c);
        out << e.index << ',' << c.n1 << ',' << c.n2 << ',' << c.p << ',' << c.q << ',' << pt.x << ',' << pt.y << ','
            << pt.vx << ',' << pt.vy << ',' << e.value.real() << ',' << e.value.imag() << ',' << std::abs(e.value)
            << '\n';
    }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

SparseProfile read_profile_csv(std::istream& in, const ExtendedGrid& grid) {
    std::string line;
    while (std::getline(in, line) && (line.empty() || line[0] == '#')) {
    }
    const auto header = split_csv(line);
    auto column = [&header](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw std::runtime_error("profile CSV lacks column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_n1 = column("n1"), c_n2 = column("n2"), c_p = column("p"), c_q = column("q");
    const std::size_t c_re = column("re"), c_im = column("im");
    SparseProfile profile(grid);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split_csv(line);
        try {
            GridCoord c{std::stoul(cells.at(c_n1)), std::stoul(cells.at(c_n2)), std::stoul(cells.at(c_p)),
                        std::stoul(cells.at(c_q))};
            profile.add(c, {std::stod(cells.at(c_re)), std::stod(cells.at(c_im))});
        } catch (const std::exception& ex) {
            throw std::runtime_error("profile CSV line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return profile;
}

SparseProfile load_profile_csv(const std::filesystem::path& path, const ExtendedGrid& grid) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_profile_csv(in, grid);
}

void write_diagnostics_csv(const RecoveryDiagnostics& diag, std::ostream& out) {
    out << "iteration,residual_norm,support_size\n";
    out << std::setprecision(17);
    for (const auto& rec : diag.iterations) {
        out << rec.iteration << ',' << rec.residual_norm << ',' << rec.support.size() << '\n';
    }
    out << "# halt_reason=" << to_string(diag.halt) << '\n';
    out << "# best_iteration=" << diag.best_iteration << '\n';
    out << "# final_residual_norm=" << diag.final_residual_norm << '\n';
}

}  // namespace sarcs
