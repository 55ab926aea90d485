#include "steinlab/stein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace steinlab {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

struct WeightedMoments {
    double mean = 0.0;
    double stderr_ = 0.0;
    double total_weight = 0.0;
};

// Weighted mean with a plain normal-approximation standard error.  For
// probability-weighted (enumeration) input the stderr is meaningless and the
// caller switches to exact comparison instead.
template <typename Fn>
WeightedMoments weighted_mean(std::span<const PairSample> samples, Fn&& value) {
    WeightedMoments out;
    double sw = 0.0, swx = 0.0;
    for (const auto& s : samples) {
        sw += s.weight;
        swx += s.weight * value(s);
    }
    out.total_weight = sw;
    out.mean = swx / sw;
    double swd2 = 0.0;
    for (const auto& s : samples) {
        const double d = value(s) - out.mean;
        swd2 += s.weight * d * d;
    }
    const double var = swd2 / sw;
    out.stderr_ = std::sqrt(var / static_cast<double>(samples.size()));
    return out;
}

bool all_unit_weights(std::span<const PairSample> samples) {
    return std::all_of(samples.begin(), samples.end(),
                       [](const PairSample& s) { return s.weight == 1.0; });
}

}  // namespace

double PsiBoundSpec::psi(double x) const {
    const double a = std::fabs(x);
    switch (kind) {
        case Kind::linear:
            return B * a + C;
        case Kind::power:
            return B * std::pow(a, alpha) + C;
        case Kind::custom: {
            if (a <= table.front().first) return table.front().second;
            if (a >= table.back().first) return table.back().second;
            auto it = std::lower_bound(table.begin(), table.end(), a,
                                       [](const auto& p, double v) { return p.first < v; });
            const auto [x1, v1] = *it;
            const auto [x0, v0] = *(it - 1);
            return v0 + (v1 - v0) * (a - x0) / (x1 - x0);
        }
    }
    return 0.0;
}

double gaussian_tail_bound(double t, double B, double C, TailSide side) {
    if (t < 0.0 || B < 0.0 || C < 0.0)
        throw std::domain_error("gaussian_tail_bound: t, B, C must be >= 0");
    if (t == 0.0) return 1.0;
    const double denom = (side == TailSide::upper) ? 2.0 * C + 2.0 * B * t : 2.0 * C;
    if (denom == 0.0) return 0.0;
    return std::exp(-t * t / denom);
}

double psi_tail_bound(double t, const PsiBoundSpec& spec) {
    spec.validate();
    if (t < 0.0) throw std::domain_error("psi_tail_bound: t must be >= 0");
    if (t == 0.0) return spec.prefactor;
    const double p = spec.psi(t);
    if (p == 0.0) return 0.0;
    const double k = spec.once_differentiable ? 4.0 : 2.0;
    return spec.prefactor * std::exp(-t * t / (k * p));
}

double variance_identity_residual(std::span<const PairSample> samples) {
    if (samples.size() < 2) throw std::domain_error("variance_identity_residual: need >= 2 samples");
    const auto mean_f = weighted_mean(samples, [](const PairSample& s) { return s.f_x; });
    const auto mean_f2 = weighted_mean(samples, [](const PairSample& s) { return s.f_x * s.f_x; });
    const double var = mean_f2.mean - mean_f.mean * mean_f.mean;
    const auto rhs = weighted_mean(
        samples, [](const PairSample& s) { return 0.5 * (s.f_x - s.f_x_prime) * s.big_f; });
    return std::fabs(var - rhs.mean);
}

BdgReport bdg_moment_check(std::span<const PairSample> samples, int k) {
    if (k < 1) throw std::domain_error("bdg_moment_check: k must be >= 1");
    if (samples.empty()) throw std::domain_error("bdg_moment_check: empty sample");
    BdgReport rep;
    const auto lhs = weighted_mean(samples, [k](const PairSample& s) {
        return std::pow(s.f_x * s.f_x, k);
    });
    const double factor = std::pow(2.0 * k - 1.0, k);
    const auto rhs = weighted_mean(samples, [k, factor](const PairSample& s) {
        return factor * std::pow(s.delta_x, k);
    });
    rep.lhs = lhs.mean;
    rep.rhs = rhs.mean;
    rep.exact = !all_unit_weights(samples);
    if (rep.exact) {
        rep.holds_within_ci = rep.lhs <= rep.rhs + 1e-12 * std::max(1.0, std::fabs(rep.rhs));
    } else {
        rep.lhs_stderr = lhs.stderr_;
        rep.rhs_stderr = rhs.stderr_;
        rep.holds_within_ci = rep.lhs <= rep.rhs + kZ99 * (lhs.stderr_ + rhs.stderr_);
    }
    return rep;
}

DominanceReport pointwise_dominance_check(std::span<const PairSample> samples,
                                          const PsiBoundSpec& spec, double tol) {
    spec.validate();
    DominanceReport rep;
    for (const auto& s : samples) {
        const double excess = s.delta_x - spec.psi(s.f_x);
        if (excess > rep.max_excess) rep.max_excess = excess;
        if (excess > tol) ++rep.violations;
    }
    return rep;
}

double log_sum_exp(std::span<const double> xs) {
    if (xs.empty()) throw std::domain_error("log_sum_exp: empty input");
    const double mx = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(mx)) return mx;
    double acc = 0.0;
    for (const double x : xs) acc += std::exp(x - mx);
    return mx + std::log(acc);
}

LsePerturbationReport logsumexp_perturbation_check(std::span<const double> x,
                                                   std::span<const double> y) {
    if (x.size() != y.size() || x.empty())
        throw std::domain_error("logsumexp_perturbation_check: length mismatch");
    LsePerturbationReport rep;
    double max_abs_diff = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        max_abs_diff = std::max(max_abs_diff, std::fabs(x[i] - y[i]));

    const double lx = log_sum_exp(x);
    const double ly = log_sum_exp(y);
    rep.lse_gap = std::fabs(lx - ly);
    rep.lse_bound = max_abs_diff;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double gap = std::fabs(std::exp(x[i] - lx) - std::exp(y[i] - ly));
        rep.softmax_gap = std::max(rep.softmax_gap, gap);
    }
    rep.softmax_bound = 2.0 * max_abs_diff;
    const double slack = 1e-12;
    rep.holds = rep.softmax_gap <= rep.softmax_bound + slack &&
                rep.lse_gap <= rep.lse_bound + slack;
    return rep;
}

}  // namespace steinlab
