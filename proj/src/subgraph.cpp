#include "steinlab/subgraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace steinlab::ergm {

namespace {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool connected(int v, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> comp(static_cast<std::size_t>(v));
    std::iota(comp.begin(), comp.end(), 0);
    const auto find = [&](int a) {
        while (comp[static_cast<std::size_t>(a)] != a) a = comp[static_cast<std::size_t>(a)];
        return a;
    };
    for (const auto& [a, b] : edges) comp[static_cast<std::size_t>(find(a))] = find(b);
    for (int i = 1; i < v; ++i)
        if (find(i) != find(0)) return false;
    return true;
}

std::int64_t count_automorphisms(int v, const SubgraphSpec& spec) {
    std::vector<int> perm(static_cast<std::size_t>(v));
    std::iota(perm.begin(), perm.end(), 0);
    std::int64_t count = 0;
    do {
        bool ok = true;
        for (const auto& [a, b] : spec.edges) {
            if (!spec.has_pattern_edge(perm[static_cast<std::size_t>(a)],
                                       perm[static_cast<std::size_t>(b)])) {
                ok = false;
                break;
            }
        }
        if (ok) ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return count;
}

// DFS over pattern vertices in a fixed order, mapping them injectively onto
// graph vertices while every already-decided pattern edge is present.
struct EmbeddingCounter {
    const Graph* g;
    const SubgraphSpec* spec;
    std::vector<int> assign;       // pattern vertex -> graph vertex or -1
    std::vector<bool> used;        // graph vertex occupied
    std::vector<std::vector<int>> earlier_nbrs;  // pattern nbrs with smaller order idx
    std::vector<int> order;

    EmbeddingCounter(const Graph& graph, const SubgraphSpec& s, std::vector<int> fixed_order)
        : g(&graph), spec(&s), assign(static_cast<std::size_t>(s.v), -1),
          used(static_cast<std::size_t>(graph.n()), false), order(std::move(fixed_order)) {
        std::vector<int> pos(static_cast<std::size_t>(s.v), -1);
        for (std::size_t idx = 0; idx < order.size(); ++idx)
            pos[static_cast<std::size_t>(order[idx])] = static_cast<int>(idx);
        earlier_nbrs.resize(static_cast<std::size_t>(s.v));
        for (const auto& [a, b] : s.edges) {
            if (pos[static_cast<std::size_t>(a)] < pos[static_cast<std::size_t>(b)])
                earlier_nbrs[static_cast<std::size_t>(b)].push_back(a);
            else
                earlier_nbrs[static_cast<std::size_t>(a)].push_back(b);
        }
    }

    std::int64_t run(std::size_t depth) {
        if (depth == order.size()) return 1;
        const int pv = order[depth];
        std::int64_t total = 0;
        const auto& req = earlier_nbrs[static_cast<std::size_t>(pv)];
        if (!req.empty()) {
            // candidates: graph neighbors of the first already-placed pattern nbr
            const int anchor = assign[static_cast<std::size_t>(req[0])];
            std::vector<int> cands;
            g->for_each_neighbor(anchor, [&](int u) { cands.push_back(u); });
            for (const int u : cands) {
                if (used[static_cast<std::size_t>(u)]) continue;
                bool ok = true;
                for (std::size_t r = 1; r < req.size(); ++r) {
                    if (!g->has_edge(assign[static_cast<std::size_t>(req[r])], u)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                used[static_cast<std::size_t>(u)] = true;
                assign[static_cast<std::size_t>(pv)] = u;
                total += run(depth + 1);
                used[static_cast<std::size_t>(u)] = false;
                assign[static_cast<std::size_t>(pv)] = -1;
            }
        } else {
            for (int u = 0; u < g->n(); ++u) {
                if (used[static_cast<std::size_t>(u)]) continue;
                used[static_cast<std::size_t>(u)] = true;
                assign[static_cast<std::size_t>(pv)] = u;
                total += run(depth + 1);
                used[static_cast<std::size_t>(u)] = false;
                assign[static_cast<std::size_t>(pv)] = -1;
            }
        }
        return total;
    }
};

}  // namespace

bool SubgraphSpec::has_pattern_edge(int a, int b) const {
    for (const auto& [x, y] : edges)
        if ((x == a && y == b) || (x == b && y == a)) return true;
    return false;
}

SubgraphSpec SubgraphSpec::from_edges(std::vector<std::pair<int, int>> pattern_edges) {
    SubgraphSpec s;
    s.edges = std::move(pattern_edges);
    if (s.edges.size() < 2) throw std::domain_error("SubgraphSpec: need e_F >= 2");
    int maxv = -1;
    for (auto& [a, b] : s.edges) {
        if (a == b) throw std::domain_error("SubgraphSpec: self-loop");
        if (a > b) std::swap(a, b);
        if (a < 0) throw std::domain_error("SubgraphSpec: negative vertex");
        maxv = std::max(maxv, b);
    }
    for (std::size_t i = 0; i < s.edges.size(); ++i)
        for (std::size_t j = i + 1; j < s.edges.size(); ++j)
            if (s.edges[i] == s.edges[j]) throw std::domain_error("SubgraphSpec: duplicate edge");
    s.v = maxv + 1;
    s.e = static_cast<int>(s.edges.size());
    if (s.v < 3) throw std::domain_error("SubgraphSpec: need v_F >= 3");
    if (s.v > 8) throw std::domain_error("SubgraphSpec: v_F > 8 unsupported");
    if (!connected(s.v, s.edges)) throw std::domain_error("SubgraphSpec: pattern not connected");
    s.aut = count_automorphisms(s.v, s);
    return s;
}

std::int64_t falling_factorial(std::int64_t n, int m) {
    std::int64_t r = 1;
    for (int j = 0; j < m; ++j) r *= n - j;
    return r;
}

std::int64_t injective_embedding_count(const Graph& g, const SubgraphSpec& spec) {
    if (spec.v > g.n()) throw std::domain_error("injective_embedding_count: v_F > n");
    std::vector<int> order(static_cast<std::size_t>(spec.v));
    std::iota(order.begin(), order.end(), 0);
    EmbeddingCounter ec(g, spec, order);
    return ec.run(0);
}

std::int64_t subgraph_count(const Graph& g, const SubgraphSpec& spec) {
    const std::int64_t emb = injective_embedding_count(g, spec);
    if (emb % spec.aut != 0)
        throw std::logic_error("subgraph_count: embeddings not divisible by |Aut|");
    return emb / spec.aut;
}

std::int64_t subgraph_count_delta(const Graph& g, const SubgraphSpec& spec, int i, int j) {
    if (i == j) throw std::domain_error("subgraph_count_delta: i == j");
    if (spec.v > g.n()) throw std::domain_error("subgraph_count_delta: v_F > n");
    // anchor each pattern edge (a,b) onto {i,j} in both orientations and count
    // injective extensions with every *other* pattern edge present
    std::int64_t total = 0;
    for (const auto& [a, b] : spec.edges) {
        for (int orient = 0; orient < 2; ++orient) {
            const int va = orient ? b : a;
            const int vb = orient ? a : b;
            std::vector<int> order;
            order.reserve(static_cast<std::size_t>(spec.v));
            for (int p = 0; p < spec.v; ++p)
                if (p != va && p != vb) order.push_back(p);

            // reduced pattern: drop the anchored edge itself
            SubgraphSpec reduced = spec;
            reduced.edges.erase(
                std::find_if(reduced.edges.begin(), reduced.edges.end(), [&](const auto& pe) {
                    return (pe.first == std::min(a, b) && pe.second == std::max(a, b));
                }));
            // va, vb sit outside `order` (position -1), so every edge touching
            // them lands in a free vertex's earlier-neighbor list automatically
            EmbeddingCounter ec(g, reduced, order);
            ec.assign[static_cast<std::size_t>(va)] = i;
            ec.assign[static_cast<std::size_t>(vb)] = j;
            ec.used[static_cast<std::size_t>(i)] = true;
            ec.used[static_cast<std::size_t>(j)] = true;
            total += ec.run(0);
        }
    }
    if (total % spec.aut != 0)
        throw std::logic_error("subgraph_count_delta: count not divisible by |Aut|");
    return total / spec.aut;
}

double general_L(const Graph& g, const SubgraphSpec& spec, int i, int j) {
    return static_cast<double>(subgraph_count_delta(g, spec, i, j)) /
           static_cast<double>(falling_factorial(g.n() - 2, spec.v - 2));
}

GeneralSampler::GeneralSampler(Graph g, SubgraphSpec spec, double beta, double h)
    : g_(std::move(g)), spec_(std::move(spec)), beta_(beta), h_(h) {
    if (spec_.v > g_.n()) throw std::domain_error("GeneralSampler: v_F > n");
}

double GeneralSampler::conditional_p1(int i, int j) const {
    return logistic(beta_ * general_L(g_, spec_, i, j) + h_);
}

double GeneralSampler::f() const {
    double acc = 0.0;
    for (int i = 0; i < g_.n(); ++i)
        for (int j = i + 1; j < g_.n(); ++j)
            acc += logistic(beta_ * general_L(g_, spec_, i, j) + h_);
    return static_cast<double>(g_.edge_count()) - acc;
}

PairSample GeneralSampler::step(Philox4x32& rng) {
    PairSample ps;
    ps.f_x = f();
    const std::int64_t idx =
        static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(g_.pair_count())));
    const int i = pair_index_row(idx, g_.n());
    const int j = pair_index_col(idx, g_.n());
    const bool old_value = g_.has_edge(i, j);
    const bool new_value = rng.bernoulli(conditional_p1(i, j));
    ps.big_f = static_cast<double>(g_.pair_count()) *
               (static_cast<double>(old_value) - static_cast<double>(new_value));
    g_.set_edge(i, j, new_value);
    ps.f_x_prime = f();
    return ps;
}

namespace {

template <typename Visit>
void for_each_graph(int n, Visit&& visit) {
    const std::int64_t M = static_cast<std::int64_t>(n) * (n - 1) / 2;
    if (M > 24) throw std::domain_error("general enumeration: n too large");
    for (std::uint64_t mask = 0; mask < (1ULL << M); ++mask) {
        Graph g(n);
        for (std::int64_t b = 0; b < M; ++b)
            if (mask >> b & 1ULL)
                g.set_edge(pair_index_row(b, n), pair_index_col(b, n), true);
        visit(g);
    }
}

double log_mu_general(const Graph& g, const SubgraphSpec& spec, double beta, double h) {
    return beta * static_cast<double>(subgraph_count(g, spec)) /
               static_cast<double>(falling_factorial(g.n() - 2, spec.v - 2)) +
           h * static_cast<double>(g.edge_count());
}

}  // namespace

double general_detailed_balance_residual(int n, const SubgraphSpec& spec, double beta, double h) {
    std::vector<double> logw;
    for_each_graph(n, [&](const Graph& g) { logw.push_back(log_mu_general(g, spec, beta, h)); });
    double mx = logw[0];
    for (const double v : logw) mx = std::max(mx, v);
    double z = 0.0;
    for (const double v : logw) z += std::exp(v - mx);

    const std::int64_t M = static_cast<std::int64_t>(n) * (n - 1) / 2;
    double worst = 0.0;
    for_each_graph(n, [&](const Graph& g) {
        const double mu_x = std::exp(log_mu_general(g, spec, beta, h) - mx) / z;
        Graph work = g;
        for (std::int64_t idx = 0; idx < M; ++idx) {
            const int i = pair_index_row(idx, n);
            const int j = pair_index_col(idx, n);
            const bool x = work.has_edge(i, j);
            const double p1 = logistic(beta * general_L(work, spec, i, j) + h);
            work.set_edge(i, j, !x);
            const double mu_y = std::exp(log_mu_general(work, spec, beta, h) - mx) / z;
            work.set_edge(i, j, x);
            const double k_xy = (x ? 1.0 - p1 : p1) / static_cast<double>(M);
            const double k_yx = (x ? p1 : 1.0 - p1) / static_cast<double>(M);
            worst = std::max(worst, std::fabs(mu_x * k_xy - mu_y * k_yx));
        }
    });
    return worst;
}

double general_stationary_mean_f(int n, const SubgraphSpec& spec, double beta, double h) {
    std::vector<double> logw, fs;
    for_each_graph(n, [&](const Graph& g) {
        logw.push_back(log_mu_general(g, spec, beta, h));
        GeneralSampler s(g, spec, beta, h);
        fs.push_back(s.f());
    });
    double mx = logw[0];
    for (const double v : logw) mx = std::max(mx, v);
    double z = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < logw.size(); ++i) {
        const double w = std::exp(logw[i] - mx);
        z += w;
        acc += w * fs[i];
    }
    return acc / z;
}

}  // namespace steinlab::ergm
