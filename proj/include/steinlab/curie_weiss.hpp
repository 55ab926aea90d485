#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "steinlab/pair_sample.hpp"
#include "steinlab/rng.hpp"
#include "steinlab/table.hpp"

namespace steinlab::cw {

// Mean-field spin model with Hamiltonian (beta/n) sum_{i<j} s_i s_j + h sum s_i.
// Everything the exchangeable pair needs is measurable through the total spin
// S = sum s_i: with k = (n+S)/2 up-spins,
//   f(S)     = S/n - (1/n)[ k tanh(b(S-1)/n + h) + (n-k) tanh(b(S+1)/n + h) ]
//   Delta(S) = (1/n)[ k p_down |f(S)-f(S-2)| + (n-k) p_up |f(S)-f(S+2)| ]
// (one heat-bath flip moves S by -+2), so f and Delta cost O(1).

double f_from_total_spin(std::int64_t n, double beta, double h, std::int64_t S);
double delta_from_total_spin(std::int64_t n, double beta, double h, std::int64_t S);

// direct O(n) evaluation of m - (1/n) sum_i tanh(beta m_i + h)
double f_statistic(std::span<const std::int8_t> spins, double beta, double h);

// 3(1-beta) m^2 + beta^3 m^4; requires beta in [0,1]
double subcritical_functional(double m, double beta);

class State {
public:
    State(std::int64_t n, double beta, double h);

    static State all_plus(std::int64_t n, double beta, double h);
    static State random(std::int64_t n, double beta, double h, Philox4x32& rng);

    std::int64_t n() const { return n_; }
    std::int64_t total_spin() const { return total_; }
    double magnetization() const { return static_cast<double>(total_) / static_cast<double>(n_); }
    int spin(std::int64_t i) const { return spins_[static_cast<std::size_t>(i)]; }
    std::span<const std::int8_t> spins() const { return spins_; }
    double beta() const { return beta_; }
    double h() const { return h_; }

    // One heat-bath update at a uniform site; fills an exchangeable-pair record.
    PairSample step(Philox4x32& rng, bool with_delta = true);

    void sweep(Philox4x32& rng);  // n single-site updates, no bookkeeping

    double f() const { return f_from_total_spin(n_, beta_, h_, total_); }
    double delta() const { return delta_from_total_spin(n_, beta_, h_, total_); }

private:
    std::int64_t n_;
    double beta_, h_;
    std::vector<std::int8_t> spins_;
    std::int64_t total_;
};

struct CriticalTailResult {
    TailTable table;          // P(n^{1/4} |m| >= t) against 2 exp(-c t^4)
    double fitted_c = 0.0;
    bool insufficient_samples = false;  // some positive-t grid point saw < 10 hits
};

// Chain experiment at the critical temperature (beta = 1, h = 0).
CriticalTailResult critical_tail_experiment(std::int64_t n, std::uint64_t samples,
                                            std::uint64_t burnin_sweeps,
                                            std::uint64_t thin_sweeps,
                                            std::span<const double> t_grid,
                                            Philox4x32& rng);

// --- exact helpers at enumerable sizes (n <= ~16) ---

// all (config, transition) pairs weighted by mu(x) K(x,x')
std::vector<PairSample> enumerate_pair_samples(std::int64_t n, double beta, double h);
// max |mu(x)K(x,y) - mu(y)K(y,x)| over all single-flip pairs
double detailed_balance_residual(std::int64_t n, double beta, double h);
// exact stationary mean of f (should vanish)
double stationary_mean_f(std::int64_t n, double beta, double h);

}  // namespace steinlab::cw
