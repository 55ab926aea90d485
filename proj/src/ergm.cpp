#include "steinlab/ergm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace steinlab::ergm {

namespace {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Graph::Graph(int n) : n_(n), words_((n + 63) / 64) {
    if (n < 2) throw std::domain_error("Graph: need n >= 2");
    adj_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(words_), 0);
    c_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0);
}

Graph Graph::complete(int n) {
    Graph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.set_edge(i, j, true);
    return g;
}

Graph Graph::random(int n, double p, Philox4x32& rng) {
    Graph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.bernoulli(p)) g.set_edge(i, j, true);
    return g;
}

bool Graph::has_edge(int i, int j) const {
    return (adj_[static_cast<std::size_t>(i) * words_ + static_cast<std::size_t>(j / 64)] >>
            (j % 64)) & 1ULL;
}

int Graph::degree(int i) const {
    int deg = 0;
    const std::uint64_t* row = adj_.data() + static_cast<std::size_t>(i) * words_;
    for (int w = 0; w < words_; ++w) deg += std::popcount(row[w]);
    return deg;
}

void Graph::set_edge(int i, int j, bool v) {
    if (i == j) throw std::domain_error("set_edge: i == j");
    if (has_edge(i, j) == v) return;
    const int delta = v ? 1 : -1;
    const auto bump = [&](int a, int b) {
        c_[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)] =
            static_cast<std::uint16_t>(c_[static_cast<std::size_t>(a) * n_ +
                                          static_cast<std::size_t>(b)] + delta);
        c_[static_cast<std::size_t>(b) * n_ + static_cast<std::size_t>(a)] =
            static_cast<std::uint16_t>(c_[static_cast<std::size_t>(b) * n_ +
                                          static_cast<std::size_t>(a)] + delta);
    };
    if (v) {
        // update wedges while the sets still exclude the new edge
        for_each_neighbor(j, [&](int k) { if (k != i) bump(i, k); });
        for_each_neighbor(i, [&](int k) { if (k != j) bump(j, k); });
        triangles_ += common_neighbors(i, j);
        edges_ += 1;
        adj_[static_cast<std::size_t>(i) * words_ + static_cast<std::size_t>(j / 64)] |=
            1ULL << (j % 64);
        adj_[static_cast<std::size_t>(j) * words_ + static_cast<std::size_t>(i / 64)] |=
            1ULL << (i % 64);
    } else {
        adj_[static_cast<std::size_t>(i) * words_ + static_cast<std::size_t>(j / 64)] &=
            ~(1ULL << (j % 64));
        adj_[static_cast<std::size_t>(j) * words_ + static_cast<std::size_t>(i / 64)] &=
            ~(1ULL << (i % 64));
        edges_ -= 1;
        triangles_ -= common_neighbors(i, j);
        for_each_neighbor(j, [&](int k) { if (k != i) bump(i, k); });
        for_each_neighbor(i, [&](int k) { if (k != j) bump(j, k); });
    }
}

double Graph::wedge_stat(int i, int j) const {
    if (i == j) throw std::domain_error("wedge_stat: i == j");
    return static_cast<double>(common_neighbors(i, j)) / static_cast<double>(n_);
}

std::int64_t Graph::triangle_count_recompute() const {
    std::int64_t t = 0;
    for (int i = 0; i < n_; ++i) {
        const std::uint64_t* ri = adj_.data() + static_cast<std::size_t>(i) * words_;
        for (int j = i + 1; j < n_; ++j) {
            if (!has_edge(i, j)) continue;
            const std::uint64_t* rj = adj_.data() + static_cast<std::size_t>(j) * words_;
            // common neighbors k > j close a triangle counted once at (i, j)
            for (int w = j / 64; w < words_; ++w) {
                std::uint64_t bits = ri[w] & rj[w];
                if (w == j / 64) bits &= ~((2ULL << (j % 64)) - 1ULL);
                t += std::popcount(bits);
            }
        }
    }
    return t;
}

std::vector<std::uint16_t> Graph::wedge_counts_recompute() const {
    std::vector<std::uint16_t> out(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0);
    for (int i = 0; i < n_; ++i) {
        const std::uint64_t* ri = adj_.data() + static_cast<std::size_t>(i) * words_;
        for (int j = 0; j < n_; ++j) {
            if (j == i) continue;
            const std::uint64_t* rj = adj_.data() + static_cast<std::size_t>(j) * words_;
            int cnt = 0;
            for (int w = 0; w < words_; ++w) cnt += std::popcount(ri[w] & rj[w]);
            out[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)] =
                static_cast<std::uint16_t>(cnt);
        }
    }
    return out;
}

int pair_index_row(std::int64_t idx, int n) {
    const std::int64_t M = static_cast<std::int64_t>(n) * (n - 1) / 2;
    const std::int64_t rem = M - 1 - idx;
    auto r = static_cast<std::int64_t>((std::sqrt(8.0 * static_cast<double>(rem) + 1.0) - 1.0) / 2.0);
    while ((r + 1) * (r + 2) / 2 <= rem) ++r;
    while (r * (r + 1) / 2 > rem) --r;
    return n - 2 - static_cast<int>(r);
}

int pair_index_col(std::int64_t idx, int n) {
    const std::int64_t M = static_cast<std::int64_t>(n) * (n - 1) / 2;
    const std::int64_t rem = M - 1 - idx;
    auto r = static_cast<std::int64_t>((std::sqrt(8.0 * static_cast<double>(rem) + 1.0) - 1.0) / 2.0);
    while ((r + 1) * (r + 2) / 2 <= rem) ++r;
    while (r * (r + 1) / 2 > rem) --r;
    return n - 1 - static_cast<int>(rem - r * (r + 1) / 2);
}

Sampler::Sampler(Graph g, double beta, double h, bool track_f)
    : g_(std::move(g)), beta_(beta), h_(h), track_f_(track_f) {
    const int n = g_.n();
    phi_table_.resize(static_cast<std::size_t>(n) - 1);
    phi_l_table_.resize(static_cast<std::size_t>(n) - 1);
    for (int c = 0; c <= n - 2; ++c) {
        const double L = static_cast<double>(c) / static_cast<double>(n);
        phi_table_[static_cast<std::size_t>(c)] = logistic(beta_ * L + h_);
        phi_l_table_[static_cast<std::size_t>(c)] = phi_table_[static_cast<std::size_t>(c)] * L;
    }
    resync_sums();
}

void Sampler::resync_sums() {
    sum_phi_ = 0.0;
    sum_phi_l_ = 0.0;
    const int n = g_.n();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const int c = g_.common_neighbors(i, j);
            sum_phi_ += phi_table_[static_cast<std::size_t>(c)];
            sum_phi_l_ += phi_l_table_[static_cast<std::size_t>(c)];
        }
}

double Sampler::f(Functional func) const {
    if (!track_f_) return f_from_scratch(func);
    if (func == Functional::edge_count)
        return static_cast<double>(g_.edge_count()) - sum_phi_;
    return 3.0 * static_cast<double>(g_.triangle_count()) / static_cast<double>(g_.n()) -
           sum_phi_l_;
}

double Sampler::f_from_scratch(Functional func) const {
    const int n = g_.n();
    double sp = 0.0, spl = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const int c = g_.common_neighbors(i, j);
            sp += phi_table_[static_cast<std::size_t>(c)];
            spl += phi_l_table_[static_cast<std::size_t>(c)];
        }
    if (func == Functional::edge_count) return static_cast<double>(g_.edge_count()) - sp;
    return 3.0 * static_cast<double>(g_.triangle_count()) / static_cast<double>(n) - spl;
}

void Sampler::set_edge(int i, int j, bool v) {
    if (g_.has_edge(i, j) == v) return;
    if (track_f_) {
        const int delta = v ? 1 : -1;
        const auto adjust = [&](int a, int b) {
            const int c = g_.common_neighbors(a, b);
            sum_phi_ += phi_table_[static_cast<std::size_t>(c + delta)] -
                        phi_table_[static_cast<std::size_t>(c)];
            sum_phi_l_ += phi_l_table_[static_cast<std::size_t>(c + delta)] -
                          phi_l_table_[static_cast<std::size_t>(c)];
        };
        g_.for_each_neighbor(j, [&](int k) { if (k != i) adjust(i, k); });
        g_.for_each_neighbor(i, [&](int k) { if (k != j) adjust(j, k); });
    }
    g_.set_edge(i, j, v);
}

PairSample Sampler::step(Philox4x32& rng, Functional func, bool with_delta) {
    PairSample ps;
    ps.f_x = f(func);
    if (with_delta) ps.delta_x = delta(func);
    const std::int64_t idx = static_cast<std::int64_t>(
        rng.below(static_cast<std::uint64_t>(g_.pair_count())));
    const int i = pair_index_row(idx, g_.n());
    const int j = pair_index_col(idx, g_.n());
    const int c = g_.common_neighbors(i, j);
    const bool old_value = g_.has_edge(i, j);
    const bool new_value = rng.bernoulli(phi_table_[static_cast<std::size_t>(c)]);
    const double big_f_scale =
        (func == Functional::edge_count)
            ? static_cast<double>(g_.pair_count())
            : static_cast<double>(g_.pair_count()) * static_cast<double>(c) /
                  static_cast<double>(g_.n());
    ps.big_f = big_f_scale * (static_cast<double>(old_value) - static_cast<double>(new_value));
    set_edge(i, j, new_value);
    ps.f_x_prime = f(func);
    return ps;
}

void Sampler::sweep(Philox4x32& rng) {
    const std::int64_t M = g_.pair_count();
    for (std::int64_t s = 0; s < M; ++s) {
        const std::int64_t idx = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(M)));
        const int i = pair_index_row(idx, g_.n());
        const int j = pair_index_col(idx, g_.n());
        const int c = g_.common_neighbors(i, j);
        set_edge(i, j, rng.bernoulli(phi_table_[static_cast<std::size_t>(c)]));
    }
}

double Sampler::delta(Functional func) const {
    const int n = g_.n();
    if (n > 16) throw std::domain_error("Sampler::delta: exact sum restricted to n <= 16");
    const double f0 = f_from_scratch(func);
    double acc = 0.0;
    Graph work = g_;
    Sampler scratch(work, beta_, h_);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const bool x = scratch.g_.has_edge(i, j);
            const int c = scratch.g_.common_neighbors(i, j);
            const double phi = phi_table_[static_cast<std::size_t>(c)];
            const double p_flip = x ? 1.0 - phi : phi;
            const double big_f_scale =
                (func == Functional::edge_count)
                    ? static_cast<double>(g_.pair_count())
                    : static_cast<double>(g_.pair_count()) * static_cast<double>(c) /
                          static_cast<double>(n);
            scratch.set_edge(i, j, !x);
            const double f1 = scratch.f_from_scratch(func);
            scratch.set_edge(i, j, x);
            // only the flip outcome contributes: (1/M) * p_flip * |f0-f1| * |F| * 1/2,
            // and |F| = big_f_scale; the 1/M cancels against the M in F.
            acc += 0.5 * p_flip * std::fabs(f0 - f1) * big_f_scale /
                   static_cast<double>(g_.pair_count());
        }
    return acc;
}

std::array<double, 4> pair_conditional_law(const Graph& g, int i, int j, int k,
                                           double beta, double h) {
    if (i == j || j == k || i == k)
        throw std::domain_error("pair_conditional_law: indices must be distinct");
    const double n = static_cast<double>(g.n());
    const double L_ik = g.wedge_stat(i, k);
    const double L_jk = g.wedge_stat(j, k);
    const double x_ij = g.has_edge(i, j) ? 1.0 : 0.0;
    const double x_ik = g.has_edge(i, k) ? 1.0 : 0.0;
    const double x_jk = g.has_edge(j, k) ? 1.0 : 0.0;
    std::array<double, 4> w{};
    for (int x = 0; x <= 1; ++x)
        for (int y = 0; y <= 1; ++y) {
            const double expo = beta * x * L_ik + beta * y * L_jk + h * (x + y) -
                                beta / n * x * x_ij * x_jk - beta / n * y * x_ij * x_ik +
                                beta / n * x * y * x_ij;
            w[static_cast<std::size_t>(x * 2 + y)] = std::exp(expo);
        }
    const double z = w[0] + w[1] + w[2] + w[3];
    for (auto& v : w) v /= z;
    return w;
}

PairBoundReport pair_resample_bound_check(const Graph& g, int i, int j, int k,
                                          double beta, double h) {
    const auto law = pair_conditional_law(g, i, j, k, beta, h);
    PairBoundReport rep;
    rep.joint_expectation = law[3];
    rep.product = logistic(beta * g.wedge_stat(i, k) + h) *
                  logistic(beta * g.wedge_stat(j, k) + h);
    rep.gap = std::fabs(rep.joint_expectation - rep.product);
    rep.bound = 2.0 * beta / static_cast<double>(g.n());
    rep.holds = rep.gap <= rep.bound + 1e-12;
    return rep;
}

double meanfield_residual_g(const Graph& g, int i, int j, double beta, double h) {
    if (i == j) throw std::domain_error("meanfield_residual_g: i == j");
    const int n = g.n();
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        acc += logistic(beta * g.wedge_stat(i, k) + h) *
               logistic(beta * g.wedge_stat(j, k) + h);
    }
    return g.wedge_stat(i, j) - acc / static_cast<double>(n);
}

double wedge_pair_functional(const Graph& g, int i, int j, double beta, double h) {
    const int n = g.n();
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        acc += pair_conditional_law(g, i, j, k, beta, h)[3];
    }
    return g.wedge_stat(i, j) - acc / static_cast<double>(n);
}

WedgePairStep wedge_pair_step(Graph& g, int i, int j, double beta, double h, Philox4x32& rng) {
    WedgePairStep out;
    out.f_before = wedge_pair_functional(g, i, j, beta, h);
    const int n = g.n();
    int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 2)));
    if (k >= std::min(i, j)) ++k;
    if (k >= std::max(i, j)) ++k;
    out.k = k;
    const auto law = pair_conditional_law(g, i, j, k, beta, h);
    double u = rng.uniform();
    int outcome = 0;
    for (; outcome < 3; ++outcome) {
        if (u < law[static_cast<std::size_t>(outcome)]) break;
        u -= law[static_cast<std::size_t>(outcome)];
    }
    g.set_edge(i, k, (outcome & 2) != 0);
    g.set_edge(j, k, (outcome & 1) != 0);
    out.f_after = wedge_pair_functional(g, i, j, beta, h);
    return out;
}

// ---- exact enumeration (triangle Hamiltonian) ----

namespace {

template <typename Visit>
void for_each_graph(int n, Visit&& visit) {
    const std::int64_t M = static_cast<std::int64_t>(n) * (n - 1) / 2;
    if (M > 24) throw std::domain_error("ergm enumeration: n too large");
    for (std::uint64_t mask = 0; mask < (1ULL << M); ++mask) {
        Graph g(n);
        for (std::int64_t b = 0; b < M; ++b)
            if (mask >> b & 1ULL)
                g.set_edge(pair_index_row(b, n), pair_index_col(b, n), true);
        visit(mask, g);
    }
}

double log_mu_unnorm(const Graph& g, double beta, double h) {
    return beta * static_cast<double>(g.triangle_count()) / static_cast<double>(g.n()) +
           h * static_cast<double>(g.edge_count());
}

}  // namespace

std::vector<PairSample> enumerate_pair_samples(int n, double beta, double h, Functional func) {
    std::vector<double> logw;
    for_each_graph(n, [&](std::uint64_t, const Graph& g) {
        logw.push_back(log_mu_unnorm(g, beta, h));
    });
    double mx = logw[0];
    for (const double v : logw) mx = std::max(mx, v);
    double z = 0.0;
    for (const double v : logw) z += std::exp(v - mx);

    const std::int64_t M = static_cast<std::int64_t>(n) * (n - 1) / 2;
    std::vector<PairSample> out;
    for_each_graph(n, [&](std::uint64_t mask, const Graph& g) {
        const double mu = std::exp(log_mu_unnorm(g, beta, h) - mx) / z;
        Sampler s(g, beta, h);
        const double f0 = s.f_from_scratch(func);
        const double d0 = s.delta(func);
        for (std::int64_t idx = 0; idx < M; ++idx) {
            const int i = pair_index_row(idx, n);
            const int j = pair_index_col(idx, n);
            const int c = s.graph().common_neighbors(i, j);
            const double phi = s.phi_of_count(c);
            const bool x = s.graph().has_edge(i, j);
            const double big_f_scale =
                (func == Functional::edge_count)
                    ? static_cast<double>(M)
                    : static_cast<double>(M) * static_cast<double>(c) / static_cast<double>(n);
            for (const bool v : {false, true}) {
                PairSample ps;
                ps.weight = mu / static_cast<double>(M) * (v ? phi : 1.0 - phi);
                ps.f_x = f0;
                if (v == x) {
                    ps.f_x_prime = f0;
                } else {
                    s.set_edge(i, j, v);
                    ps.f_x_prime = s.f_from_scratch(func);
                    s.set_edge(i, j, x);
                }
                ps.big_f = big_f_scale * (static_cast<double>(x) - static_cast<double>(v));
                ps.delta_x = d0;
                ps.x_id = mask;
                out.push_back(ps);
            }
        }
    });
    return out;
}

double detailed_balance_residual(int n, double beta, double h) {
    std::vector<double> logw;
    for_each_graph(n, [&](std::uint64_t, const Graph& g) {
        logw.push_back(log_mu_unnorm(g, beta, h));
    });
    double mx = logw[0];
    for (const double v : logw) mx = std::max(mx, v);
    double z = 0.0;
    for (const double v : logw) z += std::exp(v - mx);

    const std::int64_t M = static_cast<std::int64_t>(n) * (n - 1) / 2;
    double worst = 0.0;
    for_each_graph(n, [&](std::uint64_t, const Graph& g) {
        const double mu_x = std::exp(log_mu_unnorm(g, beta, h) - mx) / z;
        Graph work = g;
        for (std::int64_t idx = 0; idx < M; ++idx) {
            const int i = pair_index_row(idx, n);
            const int j = pair_index_col(idx, n);
            const bool x = work.has_edge(i, j);
            const int c = work.common_neighbors(i, j);
            const double phi = logistic(beta * static_cast<double>(c) / n + h);
            work.set_edge(i, j, !x);
            const double mu_y = std::exp(log_mu_unnorm(work, beta, h) - mx) / z;
            work.set_edge(i, j, x);
            // K(x->y) resamples to the flipped value; K(y->x) back again
            const double k_xy = (x ? 1.0 - phi : phi) / static_cast<double>(M);
            const double k_yx = (x ? phi : 1.0 - phi) / static_cast<double>(M);
            worst = std::max(worst, std::fabs(mu_x * k_xy - mu_y * k_yx));
        }
    });
    return worst;
}

double stationary_mean_f(int n, double beta, double h, Functional func) {
    std::vector<double> logw, fs;
    for_each_graph(n, [&](std::uint64_t, const Graph& g) {
        logw.push_back(log_mu_unnorm(g, beta, h));
        Sampler s(g, beta, h);
        fs.push_back(s.f_from_scratch(func));
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
