#pragma once

// Independent per-size processes (Z_i)_{i<=n} for each structure kind:
// Poisson for assemblies, negative binomial for multisets, binomial for
// selections. PMFs are evaluated in log space; CDFs go through the
// incomplete gamma/beta kernels so the two routes stay independent.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "coupling_forge/bigint.hpp"
#include "coupling_forge/special_functions.hpp"
#include "coupling_forge/structures.hpp"

namespace coupling_forge {

class ProcessFamily {
  public:
    ProcessFamily(StructureSpec spec, double x) : spec_(std::move(spec)), x_(x) {
        spec_.validate();
        if (spec_.n < 1) throw std::invalid_argument("ProcessFamily: n must be >= 1");
        if (!std::isfinite(x)) throw std::invalid_argument("ProcessFamily: x must be finite");
        switch (spec_.kind) {
            case Kind::assembly:
                if (!(x > 0.0))
                    throw std::invalid_argument(
                        "ProcessFamily: assemblies require x in (0, inf)");
                break;
            case Kind::multiset:
                if (!(x > 0.0 && x < 1.0))
                    throw std::invalid_argument(
                        "ProcessFamily: multisets require x in (0, 1)");
                break;
            case Kind::selection:
                if (!(x > 0.0))
                    throw std::invalid_argument(
                        "ProcessFamily: selections require x in (0, inf)");
                break;
        }
        params_.resize(spec_.n);
        const double log_x = std::log(x);
        for (int i = 1; i <= spec_.n; ++i) {
            IndexParams& ip = params_[i - 1];
            const BigInt& mi = spec_.m[i - 1];
            ip.m_zero = mi == 0;
            if (ip.m_zero) continue;
            ip.m_dbl = to_double(mi);
            const double t = i * log_x;
            switch (spec_.kind) {
                case Kind::assembly:
                    ip.log_lambda = log_big(mi) + t - std::lgamma(i + 1.0);
                    ip.lambda = std::exp(ip.log_lambda);
                    break;
                case Kind::multiset:
                    ip.log_p = t;  // p = x^i < 1
                    ip.p = std::exp(t);
                    ip.q = -std::expm1(t);
                    ip.log_q = std::log(ip.q);
                    break;
                case Kind::selection:
                    // p = x^i / (1 + x^i)
                    if (t <= 0.0) {
                        ip.log_p = t - std::log1p(std::exp(t));
                        ip.log_q = -std::log1p(std::exp(t));
                    } else {
                        ip.log_p = -std::log1p(std::exp(-t));
                        ip.log_q = -t - std::log1p(std::exp(-t));
                    }
                    ip.p = std::exp(ip.log_p);
                    ip.q = std::exp(ip.log_q);
                    break;
            }
        }
    }

    const StructureSpec& spec() const { return spec_; }
    double x() const { return x_; }
    int n() const { return spec_.n; }

    /// Poisson mean m_i x^i / i! (assemblies only).
    double lambda(int i) const {
        require_index(i);
        if (spec_.kind != Kind::assembly)
            throw std::logic_error("lambda: only defined for assemblies");
        return params_[i - 1].m_zero ? 0.0 : params_[i - 1].lambda;
    }

    /// Per-trial success probability: x^i for multisets, x^i/(1+x^i) for
    /// selections.
    double success_prob(int i) const {
        require_index(i);
        if (spec_.kind == Kind::assembly)
            throw std::logic_error("success_prob: not defined for assemblies");
        return params_[i - 1].m_zero ? 0.0 : params_[i - 1].p;
    }

    /// Complement of success_prob, computed without cancellation.
    double failure_prob(int i) const {
        require_index(i);
        if (spec_.kind == Kind::assembly)
            throw std::logic_error("failure_prob: not defined for assemblies");
        return params_[i - 1].m_zero ? 1.0 : params_[i - 1].q;
    }

    /// P(Z_i = k).
    double pmf(int i, long long k) const {
        require_index(i);
        if (k < 0) return 0.0;
        const IndexParams& ip = params_[i - 1];
        const BigInt& mi = spec_.m[i - 1];
        if (ip.m_zero) return k == 0 ? 1.0 : 0.0;
        switch (spec_.kind) {
            case Kind::assembly:
                return std::exp(k * ip.log_lambda - ip.lambda - std::lgamma(k + 1.0));
            case Kind::multiset: {
                double logc = -std::lgamma(k + 1.0);
                for (long long j = 0; j < k; ++j) logc += log_big(mi + j);
                return std::exp(logc + k * ip.log_p + ip.m_dbl * ip.log_q);
            }
            case Kind::selection: {
                if (mi < k) return 0.0;
                double logc = -std::lgamma(k + 1.0);
                for (long long j = 0; j < k; ++j) logc += log_big(mi - j);
                return std::exp(logc + k * ip.log_p + (ip.m_dbl - k) * ip.log_q);
            }
        }
        throw std::logic_error("pmf: bad kind");
    }

    /// P(Z_i <= k); zero for k < 0.
    double cdf(int i, long long k) const {
        require_index(i);
        if (k < 0) return 0.0;
        const IndexParams& ip = params_[i - 1];
        const BigInt& mi = spec_.m[i - 1];
        if (ip.m_zero) return 1.0;
        switch (spec_.kind) {
            case Kind::assembly:
                if (!(ip.lambda < std::numeric_limits<double>::infinity())) return 0.0;
                return gamma_q(k + 1.0, ip.lambda);
            case Kind::multiset:
                if (!std::isfinite(ip.m_dbl)) return 0.0;
                return 1.0 - beta_i(ip.p, k + 1.0, ip.m_dbl);
            case Kind::selection:
                if (mi <= k) return 1.0;
                if (!std::isfinite(ip.m_dbl)) return 0.0;
                return beta_i(ip.q, ip.m_dbl - k, k + 1.0);
        }
        throw std::logic_error("cdf: bad kind");
    }

    /// P(Z_i >= k).
    double tail(int i, long long k) const { return 1.0 - cdf(i, k - 1); }

  private:
    struct IndexParams {
        bool m_zero = true;
        double m_dbl = 0.0;
        double lambda = 0.0, log_lambda = 0.0;  // assembly
        double p = 0.0, q = 0.0;                // success prob / complement
        double log_p = 0.0, log_q = 0.0;
    };

    void require_index(int i) const {
        if (i < 1 || i > spec_.n)
            throw std::invalid_argument("process index out of range: " + std::to_string(i));
    }

    StructureSpec spec_;
    double x_;
    std::vector<IndexParams> params_;
};

/// P(sum_i i*Z_i = n), by convolution over partial sums 0..n. Partial sums
/// above n can never come back down, so truncation at n is exact.
inline double weighted_sum_pmf(const ProcessFamily& fam) {
    const int n = fam.n();
    std::vector<double> acc(n + 1, 0.0);
    acc[0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        std::vector<double> next(n + 1, 0.0);
        const int kmax = n / i;
        std::vector<double> pmf_i(kmax + 1);
        for (int k = 0; k <= kmax; ++k) pmf_i[k] = fam.pmf(i, k);
        for (int s = 0; s <= n; ++s) {
            if (acc[s] == 0.0) continue;
            for (int k = 0; s + i * k <= n; ++k) next[s + i * k] += acc[s] * pmf_i[k];
        }
        acc = std::move(next);
    }
    return acc[n];
}

struct ConditioningReport {
    bool passed = false;
    double tol = 0.0;
    double max_residual = 0.0;
    std::vector<int> worst_label;
    // One residual per column label, in enumeration order.
    std::vector<std::pair<std::vector<int>, double>> residuals;
};

/// Checks that the uniform component law equals the independent law
/// conditioned on the weighted sum hitting n, label by label.
inline ConditioningReport verify_conditioning(const ProcessFamily& fam, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("verify_conditioning: tol must be positive");
    ConditioningReport rep;
    rep.tol = tol;
    const BigInt kn = count_structures(fam.spec());
    if (kn == 0) throw std::domain_error("verify_conditioning: empty support");
    const double denom = weighted_sum_pmf(fam);
    for (const ColumnLabel& lab : enumerate_column_labels(fam.spec())) {
        const double lhs = ratio_as_double(lab.multiplicity, kn);
        double prod = 1.0;
        for (int i = 1; i <= fam.n(); ++i) prod *= fam.pmf(i, lab.a[i - 1]);
        const double residual = std::fabs(lhs - prod / denom);
        if (residual > rep.max_residual) {
            rep.max_residual = residual;
            rep.worst_label = lab.a;
        }
        rep.residuals.emplace_back(lab.a, residual);
    }
    rep.passed = rep.max_residual <= tol;
    return rep;
}

}  // namespace coupling_forge
