#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "steinlab/pair_sample.hpp"
#include "steinlab/rng.hpp"

namespace steinlab::ergm {

// Simple graph on n vertices: per-vertex adjacency bitsets plus a maintained
// matrix of common-neighbor (wedge) counts, edge count and triangle count.
// Memory is O(n^2); practical ceiling n ~ 10^4.
class Graph {
public:
    explicit Graph(int n);

    static Graph complete(int n);
    static Graph random(int n, double p, Philox4x32& rng);

    int n() const { return n_; }
    std::int64_t edge_count() const { return edges_; }
    std::int64_t triangle_count() const { return triangles_; }
    std::int64_t pair_count() const {
        return static_cast<std::int64_t>(n_) * (n_ - 1) / 2;
    }

    bool has_edge(int i, int j) const;
    // toggles maintain E, T and the wedge matrix; no-op when already equal
    void set_edge(int i, int j, bool v);

    int common_neighbors(int i, int j) const {
        return c_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
                  static_cast<std::size_t>(j)];
    }
    int degree(int i) const;

    // L_ij = common neighbors / n, in [0, (n-2)/n]; i != j
    double wedge_stat(int i, int j) const;

    std::int64_t triangle_count_recompute() const;       // bitset intersection oracle
    std::vector<std::uint16_t> wedge_counts_recompute() const;

    template <typename Fn>
    void for_each_neighbor(int v, Fn&& fn) const {
        const std::uint64_t* row = adj_.data() + static_cast<std::size_t>(v) * words_;
        for (int w = 0; w < words_; ++w) {
            std::uint64_t bits = row[w];
            while (bits) {
                const int b = std::countr_zero(bits);
                bits &= bits - 1;
                fn(w * 64 + b);
            }
        }
    }

private:
    int n_;
    int words_;
    std::int64_t edges_ = 0;
    std::int64_t triangles_ = 0;
    std::vector<std::uint64_t> adj_;
    std::vector<std::uint16_t> c_;  // common-neighbor counts, symmetric
};

int pair_index_row(std::int64_t idx, int n);  // idx in [0, C(n,2)) -> (i, j), i < j
int pair_index_col(std::int64_t idx, int n);

enum class Functional { edge_count, triangle };

// Single-edge heat-bath chain for H(x) = beta T(x)/n + h E(x):
//   P(X_ij = 1 | rest) = phi(L_ij) = e^{beta L_ij + h} / (1 + e^{beta L_ij + h}).
class Sampler {
public:
    Sampler(Graph g, double beta, double h, bool track_f = true);

    const Graph& graph() const { return g_; }
    double beta() const { return beta_; }
    double h() const { return h_; }

    double phi_of_count(int c) const { return phi_table_[static_cast<std::size_t>(c)]; }

    // One heat-bath update at a uniform unordered pair.  The PairSample is
    // populated for the requested functional:
    //   edge_count: F = C(n,2)(X_ij - X'_ij),        f = E - sum phi(L)
    //   triangle:   F = C(n,2) L_ij (X_ij - X'_ij),  f = 3T/n - sum phi(L) L
    // Delta is an O(n^4) exact sum, intended for enumerable sizes only.
    PairSample step(Philox4x32& rng, Functional func = Functional::edge_count,
                    bool with_delta = false);

    void sweep(Philox4x32& rng);  // C(n,2) updates, no PairSample bookkeeping

    double f(Functional func) const;            // maintained sums (track_f mode)
    double f_from_scratch(Functional func) const;
    double delta(Functional func) const;        // n <= 16
    void set_edge(int i, int j, bool v);        // keeps maintained sums in sync
    void resync_sums();

private:
    Graph g_;
    double beta_, h_;
    bool track_f_;
    std::vector<double> phi_table_;   // phi(c/n)
    std::vector<double> phi_l_table_; // phi(c/n) * (c/n)
    double sum_phi_ = 0.0, sum_phi_l_ = 0.0;
};

// Exact 4-outcome conditional law of the pair (X_ik, X_jk) given the rest;
// entries indexed [x*2 + y].  Includes the beta/n cross terms.
std::array<double, 4> pair_conditional_law(const Graph& g, int i, int j, int k,
                                           double beta, double h);

struct PairBoundReport {
    double joint_expectation = 0.0;  // E(X'_ik X'_jk | X)
    double product = 0.0;            // phi(L_ik) phi(L_jk)
    double gap = 0.0;
    double bound = 0.0;              // 2 beta / n
    bool holds = false;
};

PairBoundReport pair_resample_bound_check(const Graph& g, int i, int j, int k,
                                          double beta, double h);

// g = L_ij - (1/n) sum_{k not in {i,j}} phi(L_ik) phi(L_jk)
double meanfield_residual_g(const Graph& g, int i, int j, double beta, double h);

// Functional of the two-edge resampling chain behind the wedge concentration
// bound: f = L_ij - (1/n) sum_k E(X'_ik X'_jk | X); satisfies |f - g| <= 2 beta/n
// and per-transition |f - f'| <= 4(1+beta)/n.
double wedge_pair_functional(const Graph& g, int i, int j, double beta, double h);

struct WedgePairStep {
    double f_before = 0.0;
    double f_after = 0.0;
    int k = -1;
};

WedgePairStep wedge_pair_step(Graph& g, int i, int j, double beta, double h, Philox4x32& rng);

// --- exact helpers at enumerable sizes (triangle Hamiltonian) ---
std::vector<PairSample> enumerate_pair_samples(int n, double beta, double h, Functional func);
double detailed_balance_residual(int n, double beta, double h);
double stationary_mean_f(int n, double beta, double h, Functional func);

}  // namespace steinlab::ergm
