#pragma once

#include <cstddef>
#include <span>

#include "steinlab/pair_sample.hpp"

namespace steinlab {

enum class TailSide { upper, lower };

// Exchangeable-pair Gaussian tail under Delta(X) <= B f(X) + C:
//   upper: exp(-t^2 / (2C + 2Bt)),  lower: exp(-t^2 / (2C)).
// C = 0 degenerates to 0 for t > 0 (and 1 at t = 0).
double gaussian_tail_bound(double t, double B, double C, TailSide side);

// prefactor * exp(-t^2 / (k psi(t))), k = 2 for twice-differentiable psi
// (linear/power kinds), k = 4 when spec.once_differentiable.  Returned raw;
// values above 1 are meaningful as formula output, clamp separately.
double psi_tail_bound(double t, const PsiBoundSpec& spec);

inline double clamp_probability(double p) { return p > 1.0 ? 1.0 : (p < 0.0 ? 0.0 : p); }

// | var(f) - 1/2 E((f(X)-f(X')) F(X,X')) | over a weighted pair sample.
// With enumeration weights this is an exact residual.
double variance_identity_residual(std::span<const PairSample> samples);

struct BdgReport {
    double lhs = 0.0;         // E f^{2k}
    double rhs = 0.0;         // (2k-1)^k E Delta^k
    double lhs_stderr = 0.0;
    double rhs_stderr = 0.0;
    bool exact = false;       // enumeration weights supplied
    bool holds_within_ci = false;
};

// Moment inequality E(f^{2k}) <= (2k-1)^k E(Delta^k).  Monte Carlo input is
// judged with two-sided 99% normal bands on each moment; exact input at
// absolute tolerance 1e-12.
BdgReport bdg_moment_check(std::span<const PairSample> samples, int k);

struct DominanceReport {
    std::size_t violations = 0;
    double max_excess = 0.0;  // largest delta_x - psi(f_x), counting only positives
};

DominanceReport pointwise_dominance_check(std::span<const PairSample> samples,
                                          const PsiBoundSpec& spec, double tol = 1e-12);

struct LsePerturbationReport {
    double softmax_gap = 0.0;
    double softmax_bound = 0.0;  // 2 max|x_i - y_i|
    double lse_gap = 0.0;
    double lse_bound = 0.0;      // max|x_i - y_i|
    bool holds = false;
};

// max_i |softmax(x)_i - softmax(y)_i| <= 2 max_i |x_i - y_i| and
// |LSE(x) - LSE(y)| <= max_i |x_i - y_i|.
LsePerturbationReport logsumexp_perturbation_check(std::span<const double> x,
                                                   std::span<const double> y);

double log_sum_exp(std::span<const double> xs);

}  // namespace steinlab
