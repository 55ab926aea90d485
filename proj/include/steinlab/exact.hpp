#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "steinlab/ising.hpp"
#include "steinlab/subgraph.hpp"

namespace steinlab::oracle {

// Law of a scalar statistic over a finite state space, plus the log
// partition function of the underlying Gibbs measure.
struct ScalarDistribution {
    std::vector<double> values;  // ascending
    std::vector<double> probs;
    double log_z = 0.0;

    double prob_sum() const;
    double mean() const;
    double mean_abs() const;
    double variance() const;
    double tail_prob_geq(double threshold) const;  // P(value >= threshold)
    double expectation(const std::function<double(double)>& fn) const;
};

// Exact magnetization law of the mean-field spin model: the Hamiltonian is
// S-measurable, so P(S = n-2k) ∝ C(n,k) exp(beta (S^2 - n)/(2n) + h S).
// O(n) time and memory, valid to n ~ 10^6.
ScalarDistribution exact_cw_distribution(std::int64_t n, double beta, double h);

// Joint counts over (statistic, edge count) for all 2^C(n,2) graphs.  The
// table is parameter-free; every (beta, h) reweighting is a sum over cells.
struct JointCountTable {
    int n = 0;
    std::int64_t pairs = 0;
    int max_stat = 0;
    // count[s][e]: graphs with statistic s and e edges
    std::vector<std::vector<std::uint64_t>> count;
};

// triangle statistic; Gray-code enumeration, cached per n (n <= 7)
const JointCountTable& ergm_count_table(int n);
// copies-of-F statistic (small n only)
JointCountTable ergm_count_table_general(int n, const ergm::SubgraphSpec& spec);

struct ErgmDistribution {
    int n = 0;
    double log_z = 0.0;
    // triple (statistic, edges, probability)
    struct Cell {
        int stat;
        int edges;
        double prob;
    };
    std::vector<Cell> cells;

    double prob_sum() const;
    double tail_prob_stat_geq(double threshold) const;
    double mean_edges() const;
};

// H = beta T / n + h E
ErgmDistribution enumerate_ergm(int n, double beta, double h);
// H = beta N / (n-2)_{v_F-2} + h E
ErgmDistribution enumerate_ergm_general(int n, const ergm::SubgraphSpec& spec, double beta,
                                        double h);
double exact_ergm_log_z(int n, double beta, double h);

// P(T >= threshold) under G(n, p)
double exact_triangle_tail(int n, double p, double threshold);

// Full enumeration of the torus Ising measure; log_z and the magnetization
// law walk configurations in O(1) per config (Gray code), expectation costs
// one functional evaluation per configuration.
class IsingEnumeration {
public:
    IsingEnumeration(const ising::TorusLattice& lat, double beta, double h);

    double log_z() const { return log_z_; }
    ScalarDistribution magnetization_law() const;
    double expectation(
        const std::function<double(std::span<const std::int8_t>)>& fn) const;
    double detailed_balance_residual() const;
    double stationary_mean_f() const;

private:
    template <typename Visit>
    void walk(Visit&& visit) const;  // visit(spins, hamiltonian)

    const ising::TorusLattice* lat_;
    double beta_, h_;
    double log_z_ = 0.0;
    double max_h_ = 0.0;
};

// d = 1 ring with side >= 3: log tr(T^n) via transfer-matrix eigenvalues
double ising_transfer_matrix_log_z(std::int64_t side, double beta, double h);

// direct evaluation of the Ising exchangeable-pair f from a raw spin vector
double ising_f_direct(const ising::TorusLattice& lat, std::span<const std::int8_t> spins,
                      double beta, double h);

double log_binomial(std::int64_t n, std::int64_t k);

}  // namespace steinlab::oracle
