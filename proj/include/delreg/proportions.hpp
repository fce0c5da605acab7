#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <unordered_map>
#include <vector>

namespace delreg {

class Dataset;

/// Observation proportions q_j, q_jk, q_jkm, q_jkmn over column subsets plus
/// the complete-row proportion q~. Indices are deduplicated and sorted before
/// lookup, so q(j,k) == q(k,j) and q(j,j) == q(j) by construction.
class ProportionSet {
public:
    /// Proportion for the distinct column set of `idx` (1 to 4 indices).
    double q(std::span<const int> idx) const;
    double q(std::initializer_list<int> idx) const;

    double q_complete() const { return q_complete_; }
    int columns() const { return columns_; }

    /// True when some column pair is never jointly observed. Downstream
    /// consumers that divide by pair proportions reject such sets.
    bool has_zero_pair() const { return has_zero_pair_; }

    /// Exact counts from a dataset's mask.
    static ProportionSet from_dataset(const Dataset& data);

    /// Columns masked independently with marginal proportions `col_q`;
    /// subset proportions are the products.
    static ProportionSet independent(const std::vector<double>& col_q);

    /// Nested block patterns over predictors 0..columns-2 (response last,
    /// fully observed). Pattern (a): rows observing predictors 1..p-1 are a
    /// subset of those observing predictor 0 (q1 > q_rest). Pattern (b): the
    /// reverse nesting (q1 < q_rest).
    static ProportionSet pattern_a(double q1, double q_rest, int columns);
    static ProportionSet pattern_b(double q1, double q_rest, int columns);

    ProportionSet permuted(const std::vector<int>& new_to_old) const;

private:
    ProportionSet() = default;

    static std::uint64_t key(std::span<const int> idx);

    int columns_ = 0;
    double q_complete_ = 1.0;
    bool has_zero_pair_ = false;
    std::unordered_map<std::uint64_t, double> table_;
};

/// Exact observation proportions of `data`.
ProportionSet observation_proportions(const Dataset& data);

}  // namespace delreg
