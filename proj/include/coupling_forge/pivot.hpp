#pragma once

// Pivot predicate, the one-column pivot-mass formula with its exact
// class-sum oracle, and the search for a tilt x that drives every column's
// pivot mass under a target.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "coupling_forge/processes.hpp"
#include "coupling_forge/row_classes.hpp"
#include "coupling_forge/structures.hpp"

namespace coupling_forge {

/// sum_i (a_i - z_i)^+ in exact integer arithmetic.
template <typename Int>
long long pivot_excess(std::span<const Int> row, std::span<const int> column) {
    if (row.size() != column.size())
        throw std::invalid_argument("pivot_excess: row/column length mismatch");
    long long excess = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        const long long d = static_cast<long long>(column[i]) - static_cast<long long>(row[i]);
        if (d > 0) excess += d;
    }
    return excess;
}

/// A (row, column) cell is a pivot when the column needs strictly more than
/// one unit the row cannot supply.
template <typename Int>
bool is_pivot(std::span<const Int> row, std::span<const int> column) {
    return pivot_excess(row, column) > 1;
}

inline bool is_pivot(const std::vector<int>& row, const ColumnLabel& column) {
    return is_pivot(std::span<const int>(row), std::span<const int>(column.a));
}

/// One-column pivot mass via the inclusion-exclusion formula:
///   1 - sum_j [C_j>0] P(Z_j >= C_j - 1) prod_{i != j} P(Z_i >= C_i)
///     + (#{i : C_i > 0} - 1) prod_i P(Z_i >= C_i).
/// A value drifting beyond [0,1] by more than 1e-12 indicates a broken CDF
/// and is reported instead of clamped.
inline double pivot_mass_closed_form(const ProcessFamily& fam, const ColumnLabel& column) {
    const int n = fam.n();
    if (static_cast<int>(column.a.size()) != n)
        throw std::invalid_argument("pivot_mass_closed_form: label length mismatch");

    std::vector<double> ge_c(n);  // P(Z_i >= C_i)
    int positive = 0;
    for (int i = 1; i <= n; ++i) {
        ge_c[i - 1] = 1.0 - fam.cdf(i, column.a[i - 1] - 1);
        if (column.a[i - 1] > 0) ++positive;
    }
    std::vector<double> prefix(n + 1, 1.0), suffix(n + 1, 1.0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * ge_c[i];
    for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] * ge_c[i];

    double sum = 0.0;
    for (int j = 1; j <= n; ++j) {
        if (column.a[j - 1] == 0) continue;
        const double ge_cm1 = 1.0 - fam.cdf(j, column.a[j - 1] - 2);  // P(Z_j >= C_j - 1)
        sum += ge_cm1 * prefix[j - 1] * suffix[j];
    }
    double pm = 1.0 - sum + (positive - 1) * prefix[n];

    if (pm < 0.0 || pm > 1.0) {
        if (pm < -1e-12 || pm > 1.0 + 1e-12)
            throw std::runtime_error("pivot_mass_closed_form: value outside [0,1] beyond 1e-12");
        pm = std::clamp(pm, 0.0, 1.0);
    }
    return pm;
}

/// Exact class-sum oracle for the same quantity: total mass of the row
/// classes that are pivots for the column.
inline double pivot_mass_oracle(const ProcessFamily& fam, const ColumnLabel& column,
                                const RowClassSet& classes) {
    if (static_cast<int>(column.a.size()) != fam.n())
        throw std::invalid_argument("pivot_mass_oracle: label length mismatch");
    double mass = 0.0;
    std::vector<int> v;
    for (std::size_t idx = 0; idx < classes.size(); ++idx) {
        classes.decode(idx, v);
        if (is_pivot(std::span<const int>(v), std::span<const int>(column.a)))
            mass += classes.mass(idx);
    }
    return mass;
}

inline double pivot_mass_oracle(const ProcessFamily& fam, const ColumnLabel& column,
                                std::size_t max_classes = 10'000'000) {
    const RowClassSet classes(fam, max_classes);
    return pivot_mass_oracle(fam, column, classes);
}

/// Upper bound on the pivot mass of a set of columns: min over the set of
/// the one-column masses. Exactly 0 as soon as the pure-n-part label e_n is
/// in the set.
inline double pivot_mass_subset_bound(const ProcessFamily& fam,
                                      std::span<const ColumnLabel> labels) {
    if (labels.empty())
        throw std::invalid_argument("pivot_mass_subset_bound: empty label set");
    double best = 1.0;
    for (const ColumnLabel& lab : labels) {
        if (lab.is_unit_vector_en()) return 0.0;
        best = std::min(best, pivot_mass_closed_form(fam, lab));
    }
    return best;
}

struct PivotMassReport {
    double x = 0.0;
    double max_mass = 0.0;
    std::vector<std::pair<ColumnLabel, double>> per_column;
};

inline PivotMassReport pivot_mass_report(const ProcessFamily& fam,
                                         const std::vector<ColumnLabel>& labels) {
    PivotMassReport rep;
    rep.x = fam.x();
    for (const ColumnLabel& lab : labels) {
        const double pm = pivot_mass_closed_form(fam, lab);
        rep.max_mass = std::max(rep.max_mass, pm);
        rep.per_column.emplace_back(lab, pm);
    }
    return rep;
}

inline PivotMassReport pivot_mass_report(const ProcessFamily& fam) {
    return pivot_mass_report(fam, enumerate_column_labels(fam.spec()));
}

struct ThresholdProbe {
    double x = 0.0;
    double max_mass = 0.0;
};

struct ThresholdResult {
    double x = 0.0;        // accepted tilt: max pivot mass < target here
    double max_mass = 0.0;  // the mass achieved at x
    double target = 0.0;
    std::vector<ThresholdProbe> probes;  // every x actually evaluated
};

class ThresholdSearchError : public std::runtime_error {
  public:
    ThresholdSearchError(double best_x, double best_mass)
        : std::runtime_error("find_threshold_x: search exhausted without reaching target"),
          best_x(best_x),
          best_mass(best_mass) {}
    double best_x;
    double best_mass;
};

/// Finds x with max-over-columns pivot mass below target. Assemblies and
/// selections double x upward from 1; multisets push x toward 1 from 0.5.
/// The winning bracket is then bisected to three significant digits. No
/// monotonicity in x is assumed beyond the probed points.
inline ThresholdResult find_threshold_x(const StructureSpec& spec, double target) {
    if (!(target > 0.0 && target <= 1.0))
        throw std::invalid_argument("find_threshold_x: target must be in (0,1]");
    const std::vector<ColumnLabel> labels = enumerate_column_labels(spec);
    if (labels.empty()) throw std::domain_error("find_threshold_x: empty structure");

    ThresholdResult result;
    result.target = target;
    auto max_mass_at = [&](double x) {
        const ProcessFamily fam(spec, x);
        double mm = 0.0;
        for (const ColumnLabel& lab : labels)
            mm = std::max(mm, pivot_mass_closed_form(fam, lab));
        result.probes.push_back({x, mm});
        return mm;
    };

    const bool toward_one = spec.kind == Kind::multiset;
    double lo = 0.0, hi = 0.0, hi_mass = 0.0;
    bool found = false;
    double best_x = 0.0, best_mass = 2.0;
    for (int t = 0;; ++t) {
        const double x = toward_one ? 1.0 - std::ldexp(1.0, -(t + 1)) : std::ldexp(1.0, t);
        if (toward_one ? (1.0 - x < 1e-9) : (x > 1e6)) break;
        const double mm = max_mass_at(x);
        if (mm < best_mass) {
            best_mass = mm;
            best_x = x;
        }
        if (mm < target) {
            if (t == 0) {
                // First probe already qualifies; report the smallest probed x.
                result.x = x;
                result.max_mass = mm;
                return result;
            }
            hi = x;
            hi_mass = mm;
            found = true;
            break;
        }
        lo = x;
    }
    if (!found) throw ThresholdSearchError(best_x, best_mass);

    // Narrow [lo, hi] keeping hi on the qualifying side.
    while (hi - lo > 1e-3 * hi) {
        const double mid = 0.5 * (lo + hi);
        const double mm = max_mass_at(mid);
        if (mm < target) {
            hi = mid;
            hi_mass = mm;
        } else {
            lo = mid;
        }
    }
    result.x = hi;
    result.max_mass = hi_mass;
    return result;
}

/// Default target: 1/k_n, the uniform single-column mass.
inline ThresholdResult find_threshold_x(const StructureSpec& spec) {
    const BigInt kn = count_structures(spec);
    if (kn == 0) throw std::domain_error("find_threshold_x: empty structure");
    return find_threshold_x(spec, ratio_as_double(BigInt(1), kn));
}

}  // namespace coupling_forge
