#pragma once

// Brute-force oracles used by the tests only. Each one recomputes a library
// quantity by direct enumeration so the two routes stay independent.

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "coupling_forge/bigint.hpp"

namespace test_oracles {

using coupling_forge::BigInt;

/// Component tally over all n! permutations: maps the cycle-count vector
/// (a_1..a_n) to the number of permutations realizing it.
inline std::map<std::vector<int>, long long> permutation_type_tally(int n) {
    std::map<std::vector<int>, long long> tally;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::vector<int> type(n, 0);
        std::vector<char> seen(n, 0);
        for (int s = 0; s < n; ++s) {
            if (seen[s]) continue;
            int len = 0;
            for (int v = s; !seen[v]; v = perm[v]) {
                seen[v] = 1;
                ++len;
            }
            ++type[len - 1];
        }
        ++tally[type];
    } while (std::next_permutation(perm.begin(), perm.end()));
    return tally;
}

/// Component tally over all set partitions of [n], enumerated as restricted
/// growth strings: maps the block-size-count vector to its frequency.
inline std::map<std::vector<int>, long long> set_partition_type_tally(int n) {
    std::map<std::vector<int>, long long> tally;
    std::vector<int> rgs(n, 0);
    auto recurse = [&](auto&& self, int pos, int max_used) -> void {
        if (pos == n) {
            std::vector<int> block_size(max_used + 1, 0);
            for (int i = 0; i < n; ++i) ++block_size[rgs[i]];
            std::vector<int> type(n, 0);
            for (int b = 0; b <= max_used; ++b) ++type[block_size[b] - 1];
            ++tally[type];
            return;
        }
        for (int b = 0; b <= max_used + 1 && b < n; ++b) {
            rgs[pos] = b;
            self(self, pos + 1, std::max(max_used, b));
        }
    };
    recurse(recurse, 1, 0);  // element 0 always starts block 0
    return tally;
}

/// All integer partitions of n as part-count vectors (a_1..a_n); distinct
/// restricts every part to appear at most once.
inline std::vector<std::vector<int>> partition_count_vectors(int n, bool distinct) {
    std::vector<std::vector<int>> out;
    std::vector<int> counts(n, 0);
    auto recurse = [&](auto&& self, int largest, int remaining) -> void {
        if (remaining == 0) {
            out.push_back(counts);
            return;
        }
        for (int part = std::min(largest, remaining); part >= 1; --part) {
            const int max_copies = distinct ? 1 : remaining / part;
            for (int c = 1; c <= max_copies; ++c) {
                counts[part - 1] = c;
                self(self, part - 1, remaining - c * part);
                counts[part - 1] = 0;
            }
        }
    };
    recurse(recurse, n, n);
    return out;
}

/// Bell numbers through the shift recurrence B_{t+1} = sum_k C(t,k) B_k.
inline BigInt bell_number(int n) {
    std::vector<BigInt> bell{1};  // B_0
    for (int t = 0; t < n; ++t) {
        BigInt next = 0;
        BigInt c = 1;  // C(t, k), updated multiplicatively
        for (int k = 0; k <= t; ++k) {
            next += c * bell[k];
            c = c * (t - k) / (k + 1);
        }
        bell.push_back(next);
    }
    return bell[n];
}

}  // namespace test_oracles
