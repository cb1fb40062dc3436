#pragma once

#include "ndasnr/estimators.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ndasnr {

/// One (SNR, N) point of a Monte Carlo experiment.
struct CellConfig {
    double gamma_db = 0.0;
    std::size_t n = 64;
    std::size_t trials = 100000;
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
    std::uint64_t master_seed = 1;
    double prior_q = 0.5;
    int ml_iters = 10;
    /// Absolute scale mu^2 + sigma^2 of the generated blocks.
    double m2_scale = 1.0;

    /// Throws std::invalid_argument for trials == 0, n == 0, an empty method set,
    /// a duplicated method, ml_iters < 0 or prior_q outside [0, 1].
    void validate() const;
};

struct MethodResult {
    Method method;
    double nmse;
    double nb;
    double mean_gamma_hat;
    double clamp_rate;
};

struct CellResult {
    CellConfig config;
    std::vector<MethodResult> methods;
    double ncrlb_nda;  ///< NDA bound on the SNR at (gamma, n)
    double ncrlb_da;   ///< DA bound on the SNR at (gamma, n)
};

struct ErrorMetrics {
    double nmse;
    double nb;
};

/// Normalized MSE and normalized bias of a set of SNR estimates, in the linear domain.
/// Throws std::invalid_argument for gamma_true <= 0 or no estimates.
ErrorMetrics metrics(std::span<const double> estimates, double gamma_true);

/// Seed of trial `trial` in the cell (gamma_db, n).
std::uint64_t trial_seed(std::uint64_t master_seed, double gamma_db, std::size_t n, std::uint64_t trial) noexcept;

/// An estimator failed inside a cell; reports the first failing trial.
class CellError : public std::runtime_error {
public:
    CellError(std::size_t trial, const std::string& what)
        : std::runtime_error("trial " + std::to_string(trial) + ": " + what), trial_(trial) {}
    std::size_t trial() const noexcept { return trial_; }

private:
    std::size_t trial_;
};

/// Runs every requested estimator on the same blocks, trial by trial.
/// workers == 0 picks the hardware concurrency. The result does not depend on
/// the worker count: per-trial estimates are stored by index and reduced in order.
CellResult run_cell(const CellConfig& config, unsigned workers = 0);

struct CellFailure {
    std::size_t cell_index;
    CellConfig config;
    std::string message;
};

struct SweepReport {
    std::vector<CellResult> cells;
    std::vector<CellFailure> failures;

    bool ok() const noexcept { return failures.empty(); }
};

/// Runs each cell in order; a failing cell is recorded and the rest still run.
SweepReport run_sweep(std::span<const CellConfig> configs, unsigned workers = 0);

/// Exact header of the sweep CSV.
inline constexpr const char* kSweepCsvHeader =
    "snr_db,n,trials,method,nmse,nb,mean_gamma_hat,clamp_rate,ncrlb_nda,ncrlb_da";

/// One data row of the sweep CSV.
struct SweepRow {
    double snr_db;
    std::size_t n;
    std::size_t trials;
    Method method;
    double nmse;
    double nb;
    double mean_gamma_hat;
    double clamp_rate;
    double ncrlb_nda;
    double ncrlb_da;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

std::vector<SweepRow> to_rows(const SweepReport& report);

/// Writes optional "# ..." comment lines, the header and one row per (cell, method).
/// Numbers use shortest round-trip formatting.
void write_sweep_csv(std::ostream& out, const SweepReport& report, std::span<const std::string> comments = {});

/// Parses a sweep CSV written by write_sweep_csv. Throws std::runtime_error on malformed input.
std::vector<SweepRow> read_sweep_csv(std::istream& in);

}  // namespace ndasnr
