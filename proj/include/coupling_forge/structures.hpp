#pragma once

// Combinatorial families (assemblies, multisets, selections): exact object
// counts, component-vector enumeration, and per-vector multiplicities.

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coupling_forge/bigint.hpp"

namespace coupling_forge {

enum class Kind { assembly, multiset, selection };

inline std::string_view kind_name(Kind k) {
    switch (k) {
        case Kind::assembly: return "assembly";
        case Kind::multiset: return "multiset";
        case Kind::selection: return "selection";
    }
    throw std::logic_error("kind_name: bad enum value");
}

inline Kind kind_from_name(std::string_view s) {
    if (s == "assembly") return Kind::assembly;
    if (s == "multiset") return Kind::multiset;
    if (s == "selection") return Kind::selection;
    throw std::invalid_argument("unknown structure kind: " + std::string(s));
}

/// A combinatorial family over [n]: the kind, the per-size object counts
/// m_1..m_n, and the total size n.
struct StructureSpec {
    Kind kind = Kind::assembly;
    int n = 0;
    std::vector<BigInt> m;  // m[i-1] = m_i, exactly n entries

    /// Built-in families. Name is one of: permutations, set_partitions,
    /// integer_partitions, distinct_partitions.
    static StructureSpec preset(std::string_view name, int n) {
        StructureSpec s;
        s.n = n;
        s.m.resize(n > 0 ? n : 0);
        if (name == "permutations") {
            s.kind = Kind::assembly;
            for (int i = 1; i <= n; ++i) s.m[i - 1] = factorial(i - 1);
        } else if (name == "set_partitions") {
            s.kind = Kind::assembly;
            std::fill(s.m.begin(), s.m.end(), 1);
        } else if (name == "integer_partitions") {
            s.kind = Kind::multiset;
            std::fill(s.m.begin(), s.m.end(), 1);
        } else if (name == "distinct_partitions") {
            s.kind = Kind::selection;
            std::fill(s.m.begin(), s.m.end(), 1);
        } else {
            throw std::invalid_argument("unknown preset: " + std::string(name));
        }
        s.validate();
        return s;
    }

    void validate() const {
        if (n < 0) throw std::invalid_argument("StructureSpec: n must be nonnegative");
        if (static_cast<int>(m.size()) < n)
            throw std::invalid_argument("StructureSpec: weight sequence shorter than n");
        for (const BigInt& mi : m)
            if (mi < 0) throw std::invalid_argument("StructureSpec: m_i must be nonnegative");
    }

    bool operator==(const StructureSpec& o) const {
        return kind == o.kind && n == o.n &&
               std::equal(m.begin(), m.begin() + n, o.m.begin(), o.m.begin() + o.n);
    }
};

/// One component vector (a_1,...,a_n) with sum i*a_i = n, together with the
/// exact number of objects in the family realizing it.
struct ColumnLabel {
    std::vector<int> a;
    BigInt multiplicity;

    bool is_unit_vector_en() const {
        if (a.empty() || a.back() != 1) return false;
        for (std::size_t i = 0; i + 1 < a.size(); ++i)
            if (a[i] != 0) return false;
        return true;
    }
};

inline std::string label_to_string(std::span<const int> a) {
    std::string s = "(";
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(a[i]);
    }
    s += ')';
    return s;
}

/// Exact number of objects of total size n in the family (k_n). n = 0 is
/// allowed and gives 1.
inline BigInt count_structures(const StructureSpec& spec) {
    spec.validate();
    const int n = spec.n;
    if (n == 0) return 1;

    if (spec.kind == Kind::assembly) {
        // k_t = sum_{i<=t} C(t-1, i-1) m_i k_{t-i}
        std::vector<BigInt> k(n + 1);
        k[0] = 1;
        for (int t = 1; t <= n; ++t) {
            BigInt acc = 0;
            for (int i = 1; i <= t; ++i)
                acc += binomial(BigInt(t - 1), static_cast<unsigned>(i - 1)) * spec.m[i - 1] *
                       k[t - i];
            k[t] = acc;
        }
        return k[n];
    }

    // Ordinary generating function, one part size at a time.
    std::vector<BigInt> coeff(n + 1);
    coeff[0] = 1;
    for (int i = 1; i <= n; ++i) {
        const BigInt& mi = spec.m[i - 1];
        if (mi == 0) continue;
        std::vector<BigInt> next(n + 1);
        for (int s = 0; s <= n; ++s) {
            if (coeff[s] == 0) continue;
            for (int j = 0; s + i * j <= n; ++j) {
                const BigInt ways = spec.kind == Kind::multiset
                                        ? binomial(mi + j - 1, static_cast<unsigned>(j))
                                        : binomial(mi, static_cast<unsigned>(j));
                if (ways != 0) next[s + i * j] += coeff[s] * ways;
            }
        }
        coeff = std::move(next);
    }
    return coeff[n];
}

/// Number of objects whose component vector equals a. Requires sum i*a_i = n.
inline BigInt column_multiplicity(const StructureSpec& spec, std::span<const int> a) {
    spec.validate();
    if (static_cast<int>(a.size()) != spec.n)
        throw std::invalid_argument("column_multiplicity: vector length must equal n");
    long long weighted = 0;
    for (int i = 1; i <= spec.n; ++i) {
        if (a[i - 1] < 0) throw std::invalid_argument("column_multiplicity: negative entry");
        weighted += static_cast<long long>(i) * a[i - 1];
    }
    if (weighted != spec.n)
        throw std::invalid_argument("column_multiplicity: sum of i*a_i must equal n");

    if (spec.kind == Kind::assembly) {
        // n! * prod_i m_i^{a_i} / ((i!)^{a_i} a_i!), always integral.
        BigInt num = factorial(static_cast<unsigned>(spec.n));
        BigInt den = 1;
        for (int i = 1; i <= spec.n; ++i) {
            const unsigned ai = static_cast<unsigned>(a[i - 1]);
            if (ai == 0) continue;
            num *= ipow(spec.m[i - 1], ai);
            den *= ipow(factorial(static_cast<unsigned>(i)), ai) * factorial(ai);
        }
        if (num == 0) return 0;
        BigInt q, r;
        boost::multiprecision::divide_qr(num, den, q, r);
        if (r != 0) throw std::logic_error("column_multiplicity: assembly count not integral");
        return q;
    }

    BigInt prod = 1;
    for (int i = 1; i <= spec.n; ++i) {
        const unsigned ai = static_cast<unsigned>(a[i - 1]);
        if (ai == 0) continue;
        prod *= spec.kind == Kind::multiset ? binomial(spec.m[i - 1] + ai - 1, ai)
                                            : binomial(spec.m[i - 1], ai);
        if (prod == 0) return 0;
    }
    return prod;
}

/// All component vectors with positive multiplicity, lexicographically
/// increasing on (a_1,...,a_n).
inline std::vector<ColumnLabel> enumerate_column_labels(const StructureSpec& spec) {
    spec.validate();
    if (spec.n < 1) throw std::invalid_argument("enumerate_column_labels: n must be >= 1");
    std::vector<ColumnLabel> out;
    std::vector<int> a(spec.n, 0);

    auto recurse = [&](auto&& self, int i, int remaining) -> void {
        if (remaining == 0) {
            std::fill(a.begin() + (i - 1), a.end(), 0);
            BigInt mult = column_multiplicity(spec, a);
            if (mult > 0) out.push_back({a, std::move(mult)});
            return;
        }
        if (i > spec.n || i > remaining) return;
        for (int c = 0; c * i <= remaining; ++c) {
            a[i - 1] = c;
            self(self, i + 1, remaining - c * i);
        }
        a[i - 1] = 0;
    };
    recurse(recurse, 1, spec.n);
    return out;
}

/// Law of the component vector of a uniform object: multiplicity / k_n.
inline std::vector<std::pair<ColumnLabel, double>> component_distribution(
    const StructureSpec& spec) {
    const BigInt kn = count_structures(spec);
    if (kn == 0) throw std::domain_error("component_distribution: empty support");
    std::vector<std::pair<ColumnLabel, double>> out;
    for (ColumnLabel& lab : enumerate_column_labels(spec)) {
        const double p = ratio_as_double(lab.multiplicity, kn);
        out.emplace_back(std::move(lab), p);
    }
    return out;
}

}  // namespace coupling_forge
