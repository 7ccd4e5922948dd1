#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sarcs/dictionary.hpp"
#include "sarcs/radar_model.hpp"

namespace sarcs {

struct ProfileEntry {
    GridCoord coord;
    cdouble value;
};

/// Sparse reflectivity profile over an extended grid; the dense embedding is
/// the column-stacked vector a of the linear model b = Phi a.
class SparseProfile {
public:
    explicit SparseProfile(ExtendedGrid grid) : grid_(std::move(grid)) {}

    const ExtendedGrid& grid() const { return grid_; }
    const std::vector<ProfileEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Appends an entry. Throws std::invalid_argument on a duplicate and
    /// std::out_of_range outside the grid.
    void add(const GridCoord& coord, cdouble value);
    /// Entries sorted by flat index.
    std::vector<SparseEntry> sparse() const;
    std::vector<cdouble> dense() const;
    /// Physical scene of the nonzero entries (reflectivity = coefficient).
    Scene to_scene() const;

private:
    ExtendedGrid grid_;
    std::vector<ProfileEntry> entries_;
};

struct RecoveryConfig {
    std::size_t sparsity = 1;         // k
    double residual_threshold = 0.0;  // epsilon, same units as ||y||
    std::size_t max_iterations = 50;
    double stall_tolerance = 1e-6;    // minimum relative residual improvement
};

/// Default threshold for noiseless data: 1e-6 ||y||.
double noiseless_threshold(std::span<const cdouble> y);

enum class HaltReason { residual_below_threshold, max_iterations, stalled };
std::string to_string(HaltReason reason);

struct IterationRecord {
    std::size_t iteration;
    double residual_norm;
    std::vector<std::size_t> support;  // flat indices, ascending
};

struct RecoveryDiagnostics {
    std::vector<IterationRecord> iterations;
    HaltReason halt = HaltReason::max_iterations;
    std::size_t best_iteration = 0;       // 0: the empty initial estimate
    double final_residual_norm = 0.0;     // after the closing least-squares fit
    std::vector<std::size_t> dropped_columns;  // rank-deficient columns removed from LS fits
};

struct RecoveryResult {
    SparseProfile profile;
    RecoveryDiagnostics diagnostics;
};

/// Compressive sampling matching pursuit over a restricted dictionary.
///
/// Identification uses correlations normalized by the restricted column norms;
/// columns with zero norm are never selected. The best pruned iterate (lowest
/// residual) is refit by least squares on its support and returned with
/// coefficients in reflectivity units. Throws std::invalid_argument if k is
/// zero or exceeds the number of visible columns.
RecoveryResult cosamp(const SensingOperator& op, std::span<const cdouble> y, const RecoveryConfig& cfg);

/// Runs cosamp with k = 1, 2, ... up to max_sparsity and stops at the first k
/// whose residual falls below cfg.residual_threshold.
RecoveryResult cosamp_auto(const SensingOperator& op, std::span<const cdouble> y, RecoveryConfig cfg,
                           std::size_t max_sparsity);

/// ||estimate - truth||_2 / ||truth||_2 over the dense grid. Throws
/// std::invalid_argument for a zero truth or mismatched grids.
double relative_error(const SparseProfile& estimate, const SparseProfile& truth);

/// CSV: flat_index,n1,n2,p,q,re,im
void write_truth_csv(const SparseProfile& profile, std::ostream& out);
/// CSV: flat_index,n1,n2,p,q,x,y,vx,vy,re,im,abs
void write_profile_csv(const SparseProfile& profile, std::ostream& out);
/// Reads either CSV layout above (columns located by header name).
SparseProfile read_profile_csv(std::istream& in, const ExtendedGrid& grid);
SparseProfile load_profile_csv(const std::filesystem::path& path, const ExtendedGrid& grid);

/// CSV: iteration,residual_norm,support_size with a "# halt_reason=" footer.
void write_diagnostics_csv(const RecoveryDiagnostics& diag, std::ostream& out);

}  // namespace sarcs
