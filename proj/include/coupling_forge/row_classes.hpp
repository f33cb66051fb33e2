#pragma once

// Exact finite reduction of the infinite row space: rows are capped
// coordinatewise at cap_i = floor(n/i). A capped value v_i = cap_i stands
// for the whole tail {Z_i >= cap_i}. No column vector can exceed the caps,
// so the pivot predicate is constant on each class and the reduction is
// lossless for feasibility questions.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "coupling_forge/processes.hpp"

namespace coupling_forge {

class SizeLimitError : public std::runtime_error {
  public:
    SizeLimitError(std::string msg, std::size_t requested, std::size_t limit)
        : std::runtime_error(std::move(msg)), requested(requested), limit(limit) {}
    std::size_t requested;
    std::size_t limit;
};

/// One capped row vector with its exact probability mass.
struct RowClass {
    std::vector<int> v;
    std::uint64_t at_cap_mask = 0;  // bit i-1 set means v_i = cap_i, i.e. Z_i >= cap_i
    double mass = 0.0;
};

class RowClassSet {
  public:
    RowClassSet(const ProcessFamily& fam, std::size_t max_classes) {
        n_ = fam.n();
        if (n_ > 63) throw SizeLimitError("row classes: n too large for cap masks", n_, 63);
        caps_.resize(n_);
        std::size_t count = 1;
        for (int i = 1; i <= n_; ++i) {
            caps_[i - 1] = n_ / i;
            const std::size_t width = static_cast<std::size_t>(caps_[i - 1]) + 1;
            if (count > max_classes / width)
                throw SizeLimitError(
                    "row class count exceeds limit; use a smaller n or raise the limit",
                    count * width, max_classes);
            count *= width;
        }

        stride_.assign(n_, 1);
        for (int i = n_ - 1; i >= 1; --i)
            stride_[i - 1] = stride_[i] * (static_cast<std::size_t>(caps_[i]) + 1);

        // factor_[i-1][k] = P(Z_i = k) below the cap, P(Z_i >= cap_i) at it.
        factor_.resize(n_);
        for (int i = 1; i <= n_; ++i) {
            factor_[i - 1].resize(caps_[i - 1] + 1);
            for (int k = 0; k < caps_[i - 1]; ++k) factor_[i - 1][k] = fam.pmf(i, k);
            factor_[i - 1][caps_[i - 1]] = 1.0 - fam.cdf(i, caps_[i - 1] - 1);
        }

        mass_.resize(count);
        std::vector<int> v(n_, 0);
        fill_masses(v, 1, 1.0, 0);
    }

    int n() const { return n_; }
    const std::vector<int>& caps() const { return caps_; }
    std::size_t size() const { return mass_.size(); }
    double mass(std::size_t idx) const { return mass_[idx]; }

    /// Class vectors are ordered lexicographically; idx 0 is the all-zero row.
    void decode(std::size_t idx, std::vector<int>& v) const {
        v.resize(n_);
        for (int i = 1; i <= n_; ++i) {
            v[i - 1] = static_cast<int>(idx / stride_[i - 1]);
            idx %= stride_[i - 1];
        }
    }

    std::size_t index_of(std::span<const int> v) const {
        if (static_cast<int>(v.size()) != n_)
            throw std::invalid_argument("row class vector has wrong length");
        std::size_t idx = 0;
        for (int i = 1; i <= n_; ++i) {
            if (v[i - 1] < 0 || v[i - 1] > caps_[i - 1])
                throw std::invalid_argument("row class vector entry outside caps");
            idx += static_cast<std::size_t>(v[i - 1]) * stride_[i - 1];
        }
        return idx;
    }

    RowClass at(std::size_t idx) const {
        RowClass rc;
        decode(idx, rc.v);
        rc.mass = mass_[idx];
        for (int i = 1; i <= n_; ++i)
            if (rc.v[i - 1] == caps_[i - 1]) rc.at_cap_mask |= std::uint64_t{1} << (i - 1);
        return rc;
    }

    double total_mass() const {
        double t = 0.0;
        for (double m : mass_) t += m;
        return t;
    }

  private:
    void fill_masses(std::vector<int>& v, int i, double prod, std::size_t base) {
        if (i > n_) {
            mass_[base] = prod;
            return;
        }
        for (int k = 0; k <= caps_[i - 1]; ++k) {
            v[i - 1] = k;
            fill_masses(v, i + 1, prod * factor_[i - 1][k], base + k * stride_[i - 1]);
        }
    }

    int n_ = 0;
    std::vector<int> caps_;
    std::vector<std::size_t> stride_;
    std::vector<std::vector<double>> factor_;
    std::vector<double> mass_;
};

inline RowClassSet build_row_classes(const ProcessFamily& fam,
                                     std::size_t max_classes = 10'000'000) {
    return RowClassSet(fam, max_classes);
}

}  // namespace coupling_forge
