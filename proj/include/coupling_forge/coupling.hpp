#pragma once

// Explicit coupling construction. The joint table over (row class, column
// label) is a transportation problem: rows supply their class mass, columns
// demand multiplicity/k_n, and pivot cells are forbidden. A max-flow solve
// either fills every column (the coupling) or exposes a minimum cut whose
// sink-side column set violates the marginal-compatibility inequality.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "coupling_forge/maxflow.hpp"
#include "coupling_forge/pivot.hpp"
#include "coupling_forge/processes.hpp"
#include "coupling_forge/row_classes.hpp"
#include "coupling_forge/structures.hpp"

namespace coupling_forge {

struct CouplingEntry {
    std::size_t class_index = 0;
    int label_index = 0;
    double mass = 0.0;
};

struct CouplingTable {
    StructureSpec spec;
    double x = 0.0;
    std::vector<ColumnLabel> labels;     // lexicographic enumeration order
    std::vector<CouplingEntry> entries;  // sorted by (label_index, class_index)
    double flow_value = 0.0;
    bool verified = false;
};

/// A column set L whose demand exceeds the mass of all rows allowed to
/// serve it: nu_L > mu_reachable. Both numbers are recomputed from the
/// pivot predicate and the class masses, independent of the flow solver.
struct CutCertificate {
    StructureSpec spec;
    double x = 0.0;
    std::vector<ColumnLabel> labels;
    double nu_L = 0.0;
    double mu_reachable = 0.0;
    double flow_value = 0.0;

    double gap() const { return nu_L - mu_reachable; }
};

using CouplingOutcome = std::variant<CouplingTable, CutCertificate>;

struct CouplingLimits {
    std::size_t max_classes = 10'000'000;
    std::size_t max_pairs = 30'000'000;  // class x label cells in the network
};

inline constexpr double kFlowFeasibilityTol = 1e-9;

inline CouplingOutcome construct_coupling(const ProcessFamily& fam,
                                          const CouplingLimits& limits = {}) {
    const StructureSpec& spec = fam.spec();
    const RowClassSet classes(fam, limits.max_classes);
    std::vector<ColumnLabel> labels = enumerate_column_labels(spec);
    if (labels.empty()) throw std::domain_error("construct_coupling: empty structure");
    const BigInt kn = count_structures(spec);

    const std::size_t num_classes = classes.size();
    const std::size_t num_labels = labels.size();
    if (num_classes > limits.max_pairs / num_labels)
        throw SizeLimitError(
            "class-label cell count exceeds limit; use a smaller n or raise the limit",
            num_classes * num_labels, limits.max_pairs);

    // Nodes: source, classes, labels, sink.
    const int source = 0;
    const int sink = static_cast<int>(num_classes + num_labels) + 1;
    const auto class_node = [](std::size_t c) { return static_cast<int>(c) + 1; };
    const auto label_node = [&](std::size_t j) {
        return static_cast<int>(num_classes + j) + 1;
    };

    DinicFlow graph(num_classes + num_labels + 2);
    for (std::size_t c = 0; c < num_classes; ++c)
        if (classes.mass(c) > 0.0) graph.add_edge(source, class_node(c), classes.mass(c));

    int first_pair_edge = -1;
    {
        std::vector<int> v;
        for (std::size_t c = 0; c < num_classes; ++c) {
            if (classes.mass(c) <= 0.0) continue;
            classes.decode(c, v);
            for (std::size_t j = 0; j < num_labels; ++j) {
                if (is_pivot(std::span<const int>(v), std::span<const int>(labels[j].a)))
                    continue;
                const int id =
                    graph.add_edge(class_node(c), label_node(j), DinicFlow::kInfinity);
                if (first_pair_edge < 0) first_pair_edge = id;
            }
        }
    }

    std::vector<double> demand(num_labels);
    for (std::size_t j = 0; j < num_labels; ++j) {
        demand[j] = ratio_as_double(labels[j].multiplicity, kn);
        graph.add_edge(label_node(j), sink, demand[j]);
    }

    const double flow = graph.max_flow(source, sink);

    if (flow < 1.0 - kFlowFeasibilityTol) {
        const std::vector<char> reach = graph.source_side();
        CutCertificate cert;
        cert.spec = spec;
        cert.x = fam.x();
        cert.flow_value = flow;
        std::vector<char> in_cut(num_labels, 0);
        BigInt nu_num = 0;
        for (std::size_t j = 0; j < num_labels; ++j) {
            if (reach[label_node(j)]) continue;
            in_cut[j] = 1;
            nu_num += labels[j].multiplicity;
            cert.labels.push_back(labels[j]);
        }
        cert.nu_L = ratio_as_double(nu_num, kn);
        // Mass of every class compatible with at least one column in L,
        // straight from the predicate.
        std::vector<int> v;
        for (std::size_t c = 0; c < num_classes; ++c) {
            if (classes.mass(c) <= 0.0) continue;
            classes.decode(c, v);
            for (std::size_t j = 0; j < num_labels; ++j) {
                if (!in_cut[j]) continue;
                if (!is_pivot(std::span<const int>(v), std::span<const int>(labels[j].a))) {
                    cert.mu_reachable += classes.mass(c);
                    break;
                }
            }
        }
        return cert;
    }

    CouplingTable table;
    table.spec = spec;
    table.x = fam.x();
    table.labels = std::move(labels);
    table.flow_value = flow;

    // Replay the deterministic edge-insertion order to read the pair flows
    // back without storing per-edge bookkeeping.
    {
        std::vector<int> v;
        int id = first_pair_edge;
        for (std::size_t c = 0; c < num_classes && id >= 0; ++c) {
            if (classes.mass(c) <= 0.0) continue;
            classes.decode(c, v);
            for (std::size_t j = 0; j < num_labels; ++j) {
                if (is_pivot(std::span<const int>(v),
                             std::span<const int>(table.labels[j].a)))
                    continue;
                const double f = graph.flow_on(id);
                if (f > 0.0)
                    table.entries.push_back({c, static_cast<int>(j), f});
                id += 2;
            }
        }
    }

    // The solve can leave up to kFlowFeasibilityTol of demand unmet; scale
    // the deficient columns up over their existing (non-pivot) entries.
    {
        std::vector<double> colsum(num_labels, 0.0);
        for (const CouplingEntry& e : table.entries) colsum[e.label_index] += e.mass;
        std::vector<double> scale(num_labels, 1.0);
        bool any = false;
        for (std::size_t j = 0; j < num_labels; ++j) {
            if (colsum[j] < demand[j] && colsum[j] > 0.0) {
                scale[j] = demand[j] / colsum[j];
                any = true;
            }
        }
        if (any)
            for (CouplingEntry& e : table.entries) e.mass *= scale[e.label_index];
    }

    std::sort(table.entries.begin(), table.entries.end(),
              [](const CouplingEntry& a, const CouplingEntry& b) {
                  if (a.label_index != b.label_index) return a.label_index < b.label_index;
                  return a.class_index < b.class_index;
              });
    return table;
}

struct VerificationReport {
    bool passed = false;
    double tol = 0.0;
    std::size_t pivot_violations = 0;
    std::string first_violation;  // named (class, label) pair or other failure
    double max_row_residual = 0.0;
    double max_col_residual = 0.0;
    double total_mass = 0.0;
    double total_mass_error = 0.0;
};

/// Checks zero-on-pivot, both marginals, and total mass. Failures are
/// reported, not thrown. A passing table is marked usable for sampling.
inline VerificationReport verify_coupling(CouplingTable& table, const ProcessFamily& fam,
                                          double tol = 1e-8,
                                          std::size_t max_classes = 10'000'000) {
    if (!(tol > 0.0)) throw std::invalid_argument("verify_coupling: tol must be positive");
    if (!(table.spec == fam.spec()) || table.x != fam.x())
        throw std::invalid_argument("verify_coupling: table was not produced for this family");

    VerificationReport rep;
    rep.tol = tol;
    const RowClassSet classes(fam, max_classes);
    const BigInt kn = count_structures(table.spec);

    std::vector<double> rowsum(classes.size(), 0.0);
    std::vector<double> colsum(table.labels.size(), 0.0);
    std::vector<int> v;
    bool structurally_ok = true;
    for (const CouplingEntry& e : table.entries) {
        if (e.class_index >= classes.size() ||
            e.label_index >= static_cast<int>(table.labels.size()) || e.label_index < 0 ||
            e.mass < 0.0 || !std::isfinite(e.mass)) {
            structurally_ok = false;
            if (rep.first_violation.empty())
                rep.first_violation = "malformed entry (bad index or negative mass)";
            continue;
        }
        if (e.mass == 0.0) continue;
        classes.decode(e.class_index, v);
        if (is_pivot(std::span<const int>(v), std::span<const int>(table.labels[e.label_index].a))) {
            ++rep.pivot_violations;
            if (rep.first_violation.empty())
                rep.first_violation = "mass on pivot: class " + label_to_string(v) +
                                      " x label " +
                                      label_to_string(table.labels[e.label_index].a);
        }
        rowsum[e.class_index] += e.mass;
        colsum[e.label_index] += e.mass;
        rep.total_mass += e.mass;
    }

    for (std::size_t c = 0; c < classes.size(); ++c)
        rep.max_row_residual =
            std::max(rep.max_row_residual, std::fabs(rowsum[c] - classes.mass(c)));
    for (std::size_t j = 0; j < table.labels.size(); ++j) {
        const double nu = ratio_as_double(table.labels[j].multiplicity, kn);
        rep.max_col_residual = std::max(rep.max_col_residual, std::fabs(colsum[j] - nu));
    }
    rep.total_mass_error = std::fabs(rep.total_mass - 1.0);

    rep.passed = structurally_ok && rep.pivot_violations == 0 &&
                 rep.max_row_residual <= tol && rep.max_col_residual <= tol &&
                 rep.total_mass_error <= tol;
    table.verified = rep.passed;
    return rep;
}

/// Draws (row, column) pairs from a verified table. The sampled class is
/// expanded to a concrete row: below-cap coordinates are exact, at-cap
/// coordinates draw from the conditional tail of Z_i.
class CoupledSampler {
  public:
    struct Sample {
        std::vector<long long> z;
        int label_index = 0;
    };

    CoupledSampler(const CouplingTable& table, const ProcessFamily& fam, std::uint64_t seed)
        : table_(table), fam_(fam), classes_(fam, 10'000'000), rng_(seed) {
        if (!table.verified)
            throw std::logic_error("CoupledSampler: table has not passed verification");
        if (!(table.spec == fam.spec()) || table.x != fam.x())
            throw std::invalid_argument("CoupledSampler: table/family mismatch");
        cum_.reserve(table.entries.size());
        double acc = 0.0;
        for (const CouplingEntry& e : table.entries) {
            acc += e.mass;
            cum_.push_back(acc);
        }
        if (cum_.empty() || acc <= 0.0)
            throw std::logic_error("CoupledSampler: table carries no mass");
        total_ = acc;

        const int n = fam.n();
        tails_.resize(n);
        for (int i = 1; i <= n; ++i) {
            TailSampler& ts = tails_[i - 1];
            ts.cap = classes_.caps()[i - 1];
            ts.tail_mass = fam.tail(i, ts.cap);
            ts.pmf_at_cap = fam.pmf(i, ts.cap);
            const BigInt& mi = fam.spec().m[i - 1];
            ts.m = to_double(mi);
            if (mi == 0) {
                ts.method = TailSampler::Method::degenerate;
                continue;
            }
            switch (fam.spec().kind) {
                case Kind::assembly:
                    ts.mean = fam.lambda(i);
                    ts.method = ts.mean <= kWalkMeanLimit ? TailSampler::Method::walk
                                                          : TailSampler::Method::reject_poisson;
                    break;
                case Kind::multiset: {
                    const double p = fam.success_prob(i);
                    const double q = fam.failure_prob(i);
                    ts.p = p;
                    ts.odds = p / q;
                    ts.mean = ts.m * ts.odds;
                    if (mi == 1)
                        ts.method = TailSampler::Method::geometric;
                    else
                        ts.method = ts.mean <= kWalkMeanLimit
                                        ? TailSampler::Method::walk
                                        : TailSampler::Method::reject_nb;
                    break;
                }
                case Kind::selection: {
                    const double p = fam.success_prob(i);
                    ts.p = p;
                    ts.odds = p / fam.failure_prob(i);
                    ts.mean = ts.m * p;
                    ts.method = ts.mean <= kWalkMeanLimit ? TailSampler::Method::walk
                                                          : TailSampler::Method::reject_binomial;
                    break;
                }
            }
        }
    }

    Sample next() {
        const double u = uniform() * total_;
        const std::size_t pos =
            std::upper_bound(cum_.begin(), cum_.end(), u) - cum_.begin();
        const CouplingEntry& e = table_.entries[std::min(pos, cum_.size() - 1)];

        Sample s;
        s.label_index = e.label_index;
        std::vector<int> v;
        classes_.decode(e.class_index, v);
        s.z.resize(v.size());
        for (int i = 1; i <= static_cast<int>(v.size()); ++i) {
            const TailSampler& ts = tails_[i - 1];
            s.z[i - 1] = v[i - 1] < ts.cap ? v[i - 1] : sample_tail(i, ts);
        }

        const long long excess =
            pivot_excess(std::span<const long long>(s.z),
                         std::span<const int>(table_.labels[e.label_index].a));
        if (excess > 1)
            throw std::logic_error("CoupledSampler: emitted pair violates the coupling bound");
        return s;
    }

  private:
    static constexpr double kWalkMeanLimit = 512.0;
    static constexpr double kTailTruncation = 1e-15;

    struct TailSampler {
        enum class Method { degenerate, walk, geometric, reject_poisson, reject_nb, reject_binomial };
        Method method = Method::degenerate;
        int cap = 0;
        double tail_mass = 0.0;
        double pmf_at_cap = 0.0;
        double mean = 0.0;
        double m = 0.0;
        double p = 0.0;
        double odds = 0.0;
    };

    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    double pmf_ratio(const TailSampler& ts, long long k) const {
        // P(Z = k+1) / P(Z = k)
        switch (fam_.spec().kind) {
            case Kind::assembly: return ts.mean / static_cast<double>(k + 1);
            case Kind::multiset: return ts.p * (ts.m + k) / static_cast<double>(k + 1);
            case Kind::selection: return ts.odds * (ts.m - k) / static_cast<double>(k + 1);
        }
        return 0.0;
    }

    long long sample_tail(int i, const TailSampler& ts) {
        switch (ts.method) {
            case TailSampler::Method::degenerate:
                return ts.cap;
            case TailSampler::Method::geometric: {
                // Memoryless: Z | Z >= cap is cap plus a fresh geometric.
                const double u = 1.0 - uniform();  // in (0, 1]
                return ts.cap + static_cast<long long>(std::log(u) / std::log(ts.p));
            }
            case TailSampler::Method::walk: {
                const double u = uniform();
                double target = u * ts.tail_mass;
                double remaining = ts.tail_mass;
                long long k = ts.cap;
                double pk = ts.pmf_at_cap;
                for (;;) {
                    if (target <= pk) return k;
                    target -= pk;
                    remaining -= pk;
                    if (remaining < kTailTruncation) return k;
                    pk *= pmf_ratio(ts, k);
                    ++k;
                    // CDF-vs-PMF rounding can leave a phantom sliver of
                    // "remaining" after the support is exhausted.
                    if (pk <= 1e-300) return k - 1;
                }
            }
            case TailSampler::Method::reject_poisson: {
                std::poisson_distribution<long long> dist(ts.mean);
                for (int tries = 0; tries < kMaxRejects; ++tries) {
                    const long long z = dist(rng_);
                    if (z >= ts.cap) return z;
                }
                break;
            }
            case TailSampler::Method::reject_nb: {
                std::gamma_distribution<double> gamma(ts.m, ts.odds);
                for (int tries = 0; tries < kMaxRejects; ++tries) {
                    std::poisson_distribution<long long> dist(gamma(rng_));
                    const long long z = dist(rng_);
                    if (z >= ts.cap) return z;
                }
                break;
            }
            case TailSampler::Method::reject_binomial: {
                if (ts.m >= 9.2e18)
                    throw std::runtime_error("sample_tail: m too large for binomial sampling");
                std::binomial_distribution<long long> dist(static_cast<long long>(ts.m), ts.p);
                for (int tries = 0; tries < kMaxRejects; ++tries) {
                    const long long z = dist(rng_);
                    if (z >= ts.cap) return z;
                }
                break;
            }
        }
        throw std::runtime_error("sample_tail: rejection sampling failed to hit the tail (" +
                                 std::to_string(i) + ")");
    }

    static constexpr int kMaxRejects = 100000;

    const CouplingTable& table_;
    const ProcessFamily& fam_;
    RowClassSet classes_;
    std::vector<double> cum_;
    double total_ = 0.0;
    std::vector<TailSampler> tails_;
    std::mt19937_64 rng_;
};

/// One-shot convenience wrapper; use CoupledSampler for streams.
inline std::pair<std::vector<long long>, ColumnLabel> sample_coupled_pair(
    const CouplingTable& table, const ProcessFamily& fam, std::uint64_t seed) {
    CoupledSampler sampler(table, fam, seed);
    CoupledSampler::Sample s = sampler.next();
    return {std::move(s.z), table.labels[s.label_index]};
}

struct StrassenWitness {
    bool satisfied = false;
    double max_mass = 0.0;   // max pivot mass over labels other than e_n
    double threshold = 0.0;  // 1/k_n
    bool en_present = false;
    std::optional<ColumnLabel> attaining;
};

/// Sufficient feasibility test: every single-column pivot mass (except
/// e_n's, which is 0) below 1/k_n forces the marginal-compatibility
/// inequality for all column subsets. A false result is inconclusive;
/// construct_coupling is the decisive check.
inline StrassenWitness strassen_check(const ProcessFamily& fam) {
    StrassenWitness w;
    const BigInt kn = count_structures(fam.spec());
    if (kn == 0) throw std::domain_error("strassen_check: empty structure");
    w.threshold = ratio_as_double(BigInt(1), kn);
    for (const ColumnLabel& lab : enumerate_column_labels(fam.spec())) {
        if (lab.is_unit_vector_en()) {
            w.en_present = true;
            continue;
        }
        const double pm = pivot_mass_closed_form(fam, lab);
        if (pm >= w.max_mass) {
            w.max_mass = pm;
            w.attaining = lab;
        }
    }
    w.satisfied = w.en_present && w.max_mass < w.threshold;
    return w;
}

}  // namespace coupling_forge
