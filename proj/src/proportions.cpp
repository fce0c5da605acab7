#include "delreg/proportions.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "delreg/dataset.hpp"
#include "delreg/errors.hpp"

namespace delreg {

std::uint64_t ProportionSet::key(std::span<const int> idx) {
    std::array<int, 4> s{};
    int m = 0;
    for (int v : idx) {
        bool dup = false;
        for (int i = 0; i < m; ++i) dup |= (s[i] == v);
        if (!dup) {
            if (m == 4) return ~std::uint64_t{0};
            s[m++] = v;
        }
    }
    std::sort(s.begin(), s.begin() + m);
    std::uint64_t k = static_cast<std::uint64_t>(m);
    for (int i = 0; i < m; ++i)
        k = (k << 15) | static_cast<std::uint64_t>(s[i] + 1);
    return k;
}

double ProportionSet::q(std::span<const int> idx) const {
    if (idx.empty()) return 1.0;
    for (int v : idx)
        if (v < 0 || v >= columns_) fail(Errc::invalid_argument, "column index out of range");
    auto it = table_.find(key(idx));
    if (it == table_.end()) fail(Errc::invalid_argument, "proportion asks for more than 4 distinct columns");
    return it->second;
}

double ProportionSet::q(std::initializer_list<int> idx) const {
    return q(std::span<const int>(idx.begin(), idx.size()));
}

namespace {

template <typename Fn>
void for_each_subset(int columns, Fn&& fn) {
    std::array<int, 4> s{};
    for (int a = 0; a < columns; ++a) {
        s[0] = a;
        fn(std::span<const int>(s.data(), 1));
        for (int b = a + 1; b < columns; ++b) {
            s[1] = b;
            fn(std::span<const int>(s.data(), 2));
            for (int c = b + 1; c < columns; ++c) {
                s[2] = c;
                fn(std::span<const int>(s.data(), 3));
                for (int d = c + 1; d < columns; ++d) {
                    s[3] = d;
                    fn(std::span<const int>(s.data(), 4));
                }
            }
        }
    }
}

}  // namespace

ProportionSet ProportionSet::from_dataset(const Dataset& data) {
    const long n = data.rows();
    if (n == 0) fail(Errc::empty_dataset, "no rows");
    const int cols = data.cols();

    // one bitmask of observed columns per row
    std::vector<std::uint64_t> obs;
    bool wide = cols > 64;
    if (!wide) {
        obs.resize(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) {
            std::uint64_t b = 0;
            for (int j = 0; j < cols; ++j)
                if (data.observed(i, j)) b |= (std::uint64_t{1} << j);
            obs[static_cast<std::size_t>(i)] = b;
        }
    }

    ProportionSet out;
    out.columns_ = cols;
    for_each_subset(cols, [&](std::span<const int> s) {
        long count = 0;
        if (!wide) {
            std::uint64_t want = 0;
            for (int j : s) want |= (std::uint64_t{1} << j);
            for (long i = 0; i < n; ++i)
                if ((obs[static_cast<std::size_t>(i)] & want) == want) ++count;
        } else {
            for (long i = 0; i < n; ++i) {
                bool all = true;
                for (int j : s) all &= data.observed(i, j);
                if (all) ++count;
            }
        }
        double p = static_cast<double>(count) / static_cast<double>(n);
        out.table_[key(s)] = p;
        if (s.size() == 2 && p == 0.0) out.has_zero_pair_ = true;
    });
    out.q_complete_ = static_cast<double>(data.complete_rows()) / static_cast<double>(n);
    return out;
}

ProportionSet ProportionSet::independent(const std::vector<double>& col_q) {
    const int cols = static_cast<int>(col_q.size());
    if (cols < 2) fail(Errc::invalid_argument, "need at least two columns");
    for (double v : col_q)
        if (!(v >= 0.0 && v <= 1.0)) fail(Errc::invalid_argument, "proportion outside [0,1]");
    ProportionSet out;
    out.columns_ = cols;
    double all = 1.0;
    for (double v : col_q) all *= v;
    out.q_complete_ = all;
    for_each_subset(cols, [&](std::span<const int> s) {
        double p = 1.0;
        for (int j : s) p *= col_q[static_cast<std::size_t>(j)];
        out.table_[key(s)] = p;
        if (s.size() == 2 && p == 0.0) out.has_zero_pair_ = true;
    });
    return out;
}

ProportionSet ProportionSet::pattern_a(double q1, double q_rest, int columns) {
    if (columns < 3)
        fail(Errc::invalid_argument, "pattern (a) needs at least two predictors");
    if (!(q1 > 0.0 && q1 <= 1.0) || !(q_rest > 0.0 && q_rest <= 1.0))
        fail(Errc::invalid_pattern, "proportions must lie in (0,1]");
    if (q1 < q_rest) fail(Errc::invalid_pattern, "pattern (a) needs q1 >= q_rest");
    ProportionSet out;
    out.columns_ = columns;
    out.q_complete_ = q_rest;
    const int resp = columns - 1;
    for_each_subset(columns, [&](std::span<const int> s) {
        bool has_first = false, has_rest = false;
        for (int j : s) {
            if (j == resp) continue;
            if (j == 0) has_first = true;
            else has_rest = true;
        }
        double p = has_rest ? q_rest : (has_first ? q1 : 1.0);
        out.table_[key(s)] = p;
    });
    return out;
}

ProportionSet ProportionSet::pattern_b(double q1, double q_rest, int columns) {
    if (columns < 3)
        fail(Errc::invalid_argument, "pattern (b) needs at least two predictors");
    if (!(q1 > 0.0 && q1 <= 1.0) || !(q_rest > 0.0 && q_rest <= 1.0))
        fail(Errc::invalid_pattern, "proportions must lie in (0,1]");
    if (q1 > q_rest) fail(Errc::invalid_pattern, "pattern (b) needs q1 <= q_rest");
    ProportionSet out;
    out.columns_ = columns;
    out.q_complete_ = q1;
    const int resp = columns - 1;
    for_each_subset(columns, [&](std::span<const int> s) {
        bool has_first = false, has_rest = false;
        for (int j : s) {
            if (j == resp) continue;
            if (j == 0) has_first = true;
            else has_rest = true;
        }
        double p = has_first ? q1 : (has_rest ? q_rest : 1.0);
        out.table_[key(s)] = p;
    });
    return out;
}

ProportionSet ProportionSet::permuted(const std::vector<int>& new_to_old) const {
    if (static_cast<int>(new_to_old.size()) != columns_)
        fail(Errc::invalid_argument, "permutation size mismatch");
    ProportionSet out;
    out.columns_ = columns_;
    out.q_complete_ = q_complete_;
    out.has_zero_pair_ = has_zero_pair_;
    for_each_subset(columns_, [&](std::span<const int> s) {
        std::array<int, 4> old{};
        for (std::size_t i = 0; i < s.size(); ++i)
            old[i] = new_to_old[static_cast<std::size_t>(s[i])];
        out.table_[key(s)] = q(std::span<const int>(old.data(), s.size()));
    });
    return out;
}

ProportionSet observation_proportions(const Dataset& data) {
    return ProportionSet::from_dataset(data);
}

}  // namespace delreg
