#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delreg/advisor.hpp"
#include "delreg/dataset.hpp"
#include "delreg/model.hpp"

namespace delreg {

/// One of the five data-generating settings of the simulation study.
/// 1: trivariate normal. 2: multivariate t5 scaled to the same covariance.
/// 3: bivariate Bernoulli predictors, normal errors. 4: bivariate Poisson
/// predictors (common shock), normal errors. 5: trivariate Poisson.
struct SimSetting {
    int id = 1;
    long n = 1000;
    PatternSpec masks;
    int replicates_inner = 2000;
    int replicates_outer = 20;
    std::optional<CovarianceModel> custom_model;  // normal sampling from this model when set

    static SimSetting make(int id, long n, PatternSpec masks, int inner, int outer);

    /// Setting-1-style multivariate normal draws from an arbitrary model
    /// (used by the parameter-sweep tables).
    static SimSetting normal(CovarianceModel model, long n, PatternSpec masks, int inner,
                             int outer);

    /// Implied population covariance model (kappa set where known: 0 for the
    /// normal, 2 for t5; 0 by convention otherwise).
    CovarianceModel model() const;
};

/// Per-method Monte Carlo summary of the target-coefficient estimates.
struct MethodStats {
    double var_hat = 0.0;     // mean over outer repeats of the per-repeat variance
    double sd_of_var = 0.0;   // sd of the per-repeat variances
    double mean_beta = 0.0;
};

struct MCResult {
    MethodStats cc;
    MethodStats ac;
    double kappa_hat = 0.0;  // marginal-method kappa from the pooled replicate cells
    std::uint64_t seed = 0;
    long failed_fits = 0;
};

/// Deterministic child seed for (replicate, purpose) substreams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Draw n i.i.d. rows for the setting (complete data; columns V, X, U with
/// the response last).
Dataset sample(const SimSetting& setting, std::uint64_t seed);

/// MCAR masking. General patterns mask each column independently with its
/// marginal proportion; patterns (a)/(b) draw one row permutation and observe
/// exact floor(n q) nested blocks.
Dataset apply_mcar(const Dataset& data, const PatternSpec& pattern, std::uint64_t seed);

/// Inner loop: replicates_inner draws + fits per method; per-outer-repeat
/// variance of beta_hat for the first predictor; outer loop yields the spread
/// of those variances. Identical (seed, setting) gives identical results.
MCResult run_mc(const SimSetting& setting, std::uint64_t seed);

enum class TableId { t4, s1, s2, s3, fig3 };

TableId table_id_from_string(const std::string& name);
const char* table_name(TableId id) noexcept;

struct ReportTable {
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Reproduce one of the study report tables. `inner <= 0` skips the
/// Monte Carlo columns (theory only). Variances are reported in raw units;
/// consumers may rescale.
ReportTable reproduce_table(TableId id, std::uint64_t seed, int inner = 2000, int outer = 20);

}  // namespace delreg
