#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "steinlab/ergm.hpp"
#include "steinlab/pair_sample.hpp"
#include "steinlab/rng.hpp"

namespace steinlab::ergm {

// Fixed pattern graph F: simple, connected, vertices 0..v-1.  The
// automorphism count is recomputed by brute force at construction (v <= 8)
// and normalizes labeled-copy counts.
struct SubgraphSpec {
    std::vector<std::pair<int, int>> edges;
    int v = 0;
    int e = 0;
    std::int64_t aut = 1;

    static SubgraphSpec from_edges(std::vector<std::pair<int, int>> pattern_edges);

    static SubgraphSpec triangle() { return from_edges({{0, 1}, {1, 2}, {0, 2}}); }
    static SubgraphSpec two_star() { return from_edges({{0, 1}, {1, 2}}); }
    static SubgraphSpec k4() {
        return from_edges({{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    }

    bool has_pattern_edge(int a, int b) const;
};

std::int64_t falling_factorial(std::int64_t n, int m);

// injective maps [v] -> [n] carrying every pattern edge to an edge
std::int64_t injective_embedding_count(const Graph& g, const SubgraphSpec& spec);

// copies of F in g: embeddings / aut
std::int64_t subgraph_count(const Graph& g, const SubgraphSpec& spec);

// discrete derivative of the copy count at edge {i,j}, i.e. the number of
// copies of F that would use {i,j}, regardless of its current value
std::int64_t subgraph_count_delta(const Graph& g, const SubgraphSpec& spec, int i, int j);

// L_ij = (N(x^1) - N(x^0)) / (n-2)_{v-2}
double general_L(const Graph& g, const SubgraphSpec& spec, int i, int j);

// Single-edge heat-bath chain for H(x) = beta N(x)/(n-2)_{v-2} + h E(x):
//   P(X_ij = 1 | rest) = phi(general_L(i,j)).
class GeneralSampler {
public:
    GeneralSampler(Graph g, SubgraphSpec spec, double beta, double h);

    const Graph& graph() const { return g_; }
    const SubgraphSpec& pattern() const { return spec_; }

    double conditional_p1(int i, int j) const;  // phi(L_ij)
    PairSample step(Philox4x32& rng);           // edge-count functional
    double f() const;                           // E - sum phi(L_kl), O(n^2) embeddings

private:
    Graph g_;
    SubgraphSpec spec_;
    double beta_, h_;
};

double general_detailed_balance_residual(int n, const SubgraphSpec& spec, double beta, double h);
double general_stationary_mean_f(int n, const SubgraphSpec& spec, double beta, double h);

}  // namespace steinlab::ergm
