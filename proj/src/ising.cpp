#include "steinlab/ising.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace steinlab::ising {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int j = 0; j < k; ++j) r = r * static_cast<double>(n - j) / static_cast<double>(j + 1);
    return r;
}

struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

// Krawtchouk value: sum over k-subsets S of [nn] of (-1)^{|S ∩ W|} for |W| = w
double krawtchouk(int k, int w, int nn) {
    KahanSum acc;
    for (int j = 0; j <= k; ++j) {
        if (j > w || k - j > nn - w) continue;
        const double term = binom(w, j) * binom(nn - w, k - j);
        acc.add((j % 2 == 0) ? term : -term);
    }
    return acc.s;
}

}  // namespace

TorusLattice TorusLattice::make(int d, std::int64_t side) {
    if (d < 1) throw std::domain_error("TorusLattice: d must be >= 1");
    if (side < 2) throw std::domain_error("TorusLattice: side must be >= 2");
    TorusLattice lat;
    lat.d = d;
    lat.side = side;
    lat.num_sites = 1;
    for (int i = 0; i < d; ++i) {
        if (lat.num_sites > (1LL << 40) / side)
            throw std::domain_error("TorusLattice: too many sites");
        lat.num_sites *= side;
    }
    lat.collapsed = (side == 2);
    lat.neighbors_per_site = lat.collapsed ? d : 2 * d;
    lat.neighbors.resize(static_cast<std::size_t>(lat.num_sites) *
                         static_cast<std::size_t>(lat.neighbors_per_site));

    std::vector<std::int64_t> stride(static_cast<std::size_t>(d));
    stride[0] = 1;
    for (int i = 1; i < d; ++i) stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i - 1)] * side;

    std::vector<std::int64_t> coord(static_cast<std::size_t>(d), 0);
    for (std::int64_t x = 0; x < lat.num_sites; ++x) {
        auto* row = lat.neighbors.data() + x * lat.neighbors_per_site;
        int pos = 0;
        for (int axis = 0; axis < d; ++axis) {
            const std::int64_t c = coord[static_cast<std::size_t>(axis)];
            const std::int64_t st = stride[static_cast<std::size_t>(axis)];
            const std::int64_t up = x + ((c + 1 == side) ? -(side - 1) * st : st);
            const std::int64_t down = x + ((c == 0) ? (side - 1) * st : -st);
            row[pos++] = static_cast<std::int32_t>(up);
            if (!lat.collapsed) row[pos++] = static_cast<std::int32_t>(down);
        }
        for (int axis = 0; axis < d; ++axis) {
            if (++coord[static_cast<std::size_t>(axis)] < side) break;
            coord[static_cast<std::size_t>(axis)] = 0;
        }
    }
    return lat;
}

double theta0_closed_form(int d, double beta) {
    KahanSum acc;
    for (int k = 1; k <= d; ++k)
        acc.add(static_cast<double>(k) * binom(2 * d, d + k) * std::tanh(2.0 * k * beta));
    return acc.s / std::pow(4.0, d - 1);
}

ThetaTable theta_coefficients(int d, double beta) {
    if (d < 1 || d > 6) throw std::domain_error("theta_coefficients: d must lie in [1,6]");
    if (beta < 0.0) throw std::domain_error("theta_coefficients: beta must be >= 0");

    static std::mutex cache_mutex;
    static std::map<std::pair<int, long long>, ThetaTable> cache;
    const long long key = llround(beta / 1e-12);
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find({d, key});
        if (it != cache.end()) return it->second;
    }

    const int nn = 2 * d;
    ThetaTable tab;
    tab.d = d;
    tab.beta = beta;
    tab.a.assign(static_cast<std::size_t>(nn) + 1, 0.0);

    // Pair sigma with -sigma: even-k terms cancel exactly, odd-k terms double.
    // Enumerate the half-space with sigma_{2d} = +1 (top bit clear).
    std::vector<KahanSum> acc(static_cast<std::size_t>(nn) + 1);
    const std::uint32_t half = 1U << (nn - 1);
    for (std::uint32_t mask = 0; mask < half; ++mask) {
        const int negatives = std::popcount(mask);
        const double th = std::tanh(beta * static_cast<double>(nn - 2 * negatives));
        int prefix_sign = 1;  // sign of s_1 ... s_k as k grows
        for (int k = 1; k <= nn; k += 1) {
            if (mask >> (k - 1) & 1U) prefix_sign = -prefix_sign;
            if (k % 2 == 1) acc[static_cast<std::size_t>(k)].add(th * prefix_sign);
        }
    }
    const double norm = std::pow(2.0, nn);
    for (int k = 1; k <= nn; k += 2)
        tab.a[static_cast<std::size_t>(k)] = 2.0 * acc[static_cast<std::size_t>(k)].s / norm;

    tab.theta.assign(static_cast<std::size_t>(d), 0.0);
    for (int k = 0; k < d; ++k)
        tab.theta[static_cast<std::size_t>(k)] =
            binom(nn, 2 * k + 1) * tab.a[static_cast<std::size_t>(2 * k + 1)];

    tab.b = std::fabs(1.0 - tab.theta[0]);
    for (int k = 1; k < d; ++k)
        tab.b += static_cast<double>(2 * k + 1) * std::fabs(tab.theta[static_cast<std::size_t>(k)]);

    const double closed = theta0_closed_form(d, beta);
    if (std::fabs(closed - tab.theta[0]) > 1e-12)
        throw std::logic_error("theta_coefficients: enumeration disagrees with closed form");

    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(std::make_pair(d, key), tab);
    return tab;
}

double fourier_walsh_identity_check(int d, double beta) {
    const auto tab = theta_coefficients(d, beta);
    const int nn = 2 * d;
    const std::uint32_t total = 1U << nn;
    double worst = 0.0;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        const int negatives = std::popcount(mask);
        const double lhs = std::tanh(beta * static_cast<double>(nn - 2 * negatives));
        KahanSum rhs;
        for (std::uint32_t sub = 0; sub < total; ++sub) {
            const int k = std::popcount(sub);
            const int par = std::popcount(sub & mask) & 1;
            const double ak = tab.a[static_cast<std::size_t>(k)];
            rhs.add(par ? -ak : ak);
        }
        worst = std::max(worst, std::fabs(lhs - rhs.s));
    }
    return worst;
}

double beta1_root(int d, double rel_tol) {
    if (d < 2) throw std::domain_error("beta1_root: no root for d = 1");
    double lo = 0.0, hi = 1.0;
    while (theta0_closed_form(d, hi) < 1.0) {
        hi *= 2.0;
        if (hi > 1e6) throw std::logic_error("beta1_root: bracket not found");
    }
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        (theta0_closed_form(d, mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

void require_statistics_lattice(const TorusLattice& lat, int k) {
    if (lat.collapsed)
        throw std::domain_error("spin statistics need side >= 3 (distinct neighbors)");
    if (k < 1 || k > 2 * lat.d) throw std::domain_error("k out of range [1, 2d]");
}

}  // namespace

double r_statistic(const TorusLattice& lat, std::span<const std::int8_t> spins, int k) {
    require_statistics_lattice(lat, k);
    const int nn = 2 * lat.d;
    std::vector<double> kraw(static_cast<std::size_t>(nn) + 1);
    for (int w = 0; w <= nn; ++w) kraw[static_cast<std::size_t>(w)] = krawtchouk(k, w, nn);
    KahanSum acc;
    for (std::int64_t x = 0; x < lat.num_sites; ++x) {
        int w = 0;
        for (const auto y : lat.site_neighbors(x))
            if (spins[static_cast<std::size_t>(y)] < 0) ++w;
        acc.add(kraw[static_cast<std::size_t>(w)]);
    }
    return acc.s / (binom(nn, k) * static_cast<double>(lat.num_sites));
}

double s_statistic(const TorusLattice& lat, std::span<const std::int8_t> spins, int k) {
    require_statistics_lattice(lat, k);
    const int nn = 2 * lat.d;
    std::vector<double> kraw(static_cast<std::size_t>(nn) + 1);
    for (int w = 0; w <= nn; ++w) kraw[static_cast<std::size_t>(w)] = krawtchouk(k, w, nn);
    KahanSum acc;
    for (std::int64_t x = 0; x < lat.num_sites; ++x) {
        int w = 0;
        for (const auto y : lat.site_neighbors(x))
            if (spins[static_cast<std::size_t>(y)] < 0) ++w;
        acc.add(spins[static_cast<std::size_t>(x)] * kraw[static_cast<std::size_t>(w)]);
    }
    return acc.s / (binom(nn, k) * static_cast<double>(lat.num_sites));
}

double r_statistic_bruteforce(const TorusLattice& lat, std::span<const std::int8_t> spins, int k) {
    require_statistics_lattice(lat, k);
    const int nn = 2 * lat.d;
    KahanSum acc;
    for (std::int64_t x = 0; x < lat.num_sites; ++x) {
        const auto nbrs = lat.site_neighbors(x);
        for (std::uint32_t sub = 0; sub < (1U << nn); ++sub) {
            if (std::popcount(sub) != k) continue;
            int prod = 1;
            for (int i = 0; i < nn; ++i)
                if (sub >> i & 1U) prod *= spins[static_cast<std::size_t>(nbrs[static_cast<std::size_t>(i)])];
            acc.add(prod);
        }
    }
    return acc.s / (binom(nn, k) * static_cast<double>(lat.num_sites));
}

double meanfield_residual(const TorusLattice& lat, std::span<const std::int8_t> spins,
                          double beta, double h, const ThetaTable& thetas) {
    if (thetas.d != lat.d) throw std::domain_error("meanfield_residual: dimension mismatch");
    if (std::fabs(thetas.beta - beta) > 1e-12)
        throw std::domain_error("meanfield_residual: theta table built for another beta");
    std::int64_t total = 0;
    for (const auto s : spins) total += s;
    const double m = static_cast<double>(total) / static_cast<double>(lat.num_sites);
    double res = (1.0 - thetas.theta[0]) * m;
    for (int k = 1; k < lat.d; ++k)
        res -= thetas.theta[static_cast<std::size_t>(k)] * r_statistic(lat, spins, 2 * k + 1);
    if (h != 0.0) {
        double star = 1.0;
        for (int k = 0; k < lat.d; ++k)
            star -= thetas.theta[static_cast<std::size_t>(k)] * s_statistic(lat, spins, 2 * k + 1);
        res -= std::tanh(h) * star;
    }
    return res;
}

State::State(const TorusLattice& lat, double beta, double h)
    : lat_(&lat), beta_(beta), h_(h), tanh_h_(std::tanh(h)),
      spins_(static_cast<std::size_t>(lat.num_sites), 1),
      field_(static_cast<std::size_t>(lat.num_sites), 0), total_(lat.num_sites) {
    const int nn = lat.neighbors_per_site;
    for (auto& f : field_) f = static_cast<std::int16_t>(nn);
    tanh_cond_.resize(static_cast<std::size_t>(2 * nn) + 1);
    tanh_plain_.resize(static_cast<std::size_t>(2 * nn) + 1);
    for (int fv = -nn; fv <= nn; ++fv) {
        tanh_cond_[static_cast<std::size_t>(fv + nn)] = std::tanh(beta * fv + h);
        tanh_plain_[static_cast<std::size_t>(fv + nn)] = std::tanh(beta * fv);
    }
}

State State::all_plus(const TorusLattice& lat, double beta, double h) {
    return State(lat, beta, h);
}

State State::random(const TorusLattice& lat, double beta, double h, Philox4x32& rng) {
    State st(lat, beta, h);
    st.total_ = 0;
    for (auto& s : st.spins_) {
        s = rng.bernoulli(0.5) ? 1 : -1;
        st.total_ += s;
    }
    for (std::int64_t x = 0; x < lat.num_sites; ++x) {
        int f = 0;
        for (const auto y : lat.site_neighbors(x)) f += st.spins_[static_cast<std::size_t>(y)];
        st.field_[static_cast<std::size_t>(x)] = static_cast<std::int16_t>(f);
    }
    return st;
}

double State::flip_probability(std::int64_t x) const {
    const int nn = lat_->neighbors_per_site;
    const double t = tanh_cond_[static_cast<std::size_t>(field_[static_cast<std::size_t>(x)] + nn)];
    return 0.5 * (1.0 - spins_[static_cast<std::size_t>(x)] * t);
}

double State::f() const {
    const int nn = lat_->neighbors_per_site;
    KahanSum acc;
    for (std::int64_t x = 0; x < lat_->num_sites; ++x) {
        const auto fi = static_cast<std::size_t>(field_[static_cast<std::size_t>(x)] + nn);
        const double w = 1.0 + tanh_h_ * tanh_plain_[fi];
        acc.add(w * (spins_[static_cast<std::size_t>(x)] - tanh_cond_[fi]));
    }
    return acc.s / static_cast<double>(lat_->num_sites);
}

double State::f_change_on_flip(std::int64_t x) const {
    const int nn = lat_->neighbors_per_site;
    const int sx = spins_[static_cast<std::size_t>(x)];
    const auto fx = static_cast<std::size_t>(field_[static_cast<std::size_t>(x)] + nn);
    // own term: w_x unchanged (m_x untouched), spin negates
    double diff = (1.0 + tanh_h_ * tanh_plain_[fx]) * (-2.0 * sx);
    // neighbor terms: field shifts by -2 sx
    for (const auto y : lat_->site_neighbors(x)) {
        const auto yi = static_cast<std::size_t>(y);
        const int sy = spins_[yi];
        const auto fy = static_cast<std::size_t>(field_[yi] + nn);
        const auto fy2 = static_cast<std::size_t>(field_[yi] - 2 * sx + nn);
        const double before = (1.0 + tanh_h_ * tanh_plain_[fy]) * (sy - tanh_cond_[fy]);
        const double after = (1.0 + tanh_h_ * tanh_plain_[fy2]) * (sy - tanh_cond_[fy2]);
        diff += after - before;
    }
    return diff / static_cast<double>(lat_->num_sites);
}

void State::apply_flip(std::int64_t x) {
    const auto xi = static_cast<std::size_t>(x);
    const int sx = spins_[xi];
    spins_[xi] = static_cast<std::int8_t>(-sx);
    total_ -= 2 * sx;
    for (const auto y : lat_->site_neighbors(x))
        field_[static_cast<std::size_t>(y)] = static_cast<std::int16_t>(field_[static_cast<std::size_t>(y)] - 2 * sx);
}

PairSample State::step(Philox4x32& rng, bool with_delta) {
    PairSample ps;
    ps.f_x = f();
    if (with_delta) ps.delta_x = delta();
    const auto x = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(lat_->num_sites)));
    const int nn = lat_->neighbors_per_site;
    const auto fx = static_cast<std::size_t>(field_[static_cast<std::size_t>(x)] + nn);
    const int sx = spins_[static_cast<std::size_t>(x)];
    const double w_x = 1.0 + tanh_h_ * tanh_plain_[fx];
    const int new_spin = rng.bernoulli(0.5 * (1.0 + tanh_cond_[fx])) ? 1 : -1;
    if (new_spin != sx) {
        ps.big_f = w_x * (sx - new_spin);
        ps.f_x_prime = ps.f_x + f_change_on_flip(x);
        apply_flip(x);
    } else {
        ps.big_f = 0.0;
        ps.f_x_prime = ps.f_x;
    }
    return ps;
}

void State::sweep(Philox4x32& rng) {
    const int nn = lat_->neighbors_per_site;
    for (std::int64_t k = 0; k < lat_->num_sites; ++k) {
        const auto x = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(lat_->num_sites)));
        const auto fx = static_cast<std::size_t>(field_[static_cast<std::size_t>(x)] + nn);
        const int new_spin = rng.bernoulli(0.5 * (1.0 + tanh_cond_[fx])) ? 1 : -1;
        if (new_spin != spins_[static_cast<std::size_t>(x)]) apply_flip(x);
    }
}

double State::delta() const {
    const int nn = lat_->neighbors_per_site;
    KahanSum acc;
    for (std::int64_t x = 0; x < lat_->num_sites; ++x) {
        const auto fx = static_cast<std::size_t>(field_[static_cast<std::size_t>(x)] + nn);
        const double w_x = 1.0 + tanh_h_ * tanh_plain_[fx];
        acc.add(flip_probability(x) * w_x * std::fabs(f_change_on_flip(x)));
    }
    return acc.s / static_cast<double>(lat_->num_sites);
}

double per_transition_f_bound(const TorusLattice& lat, double beta, double h) {
    const auto tab = theta_coefficients(lat.d, beta);
    return 2.0 / static_cast<double>(lat.num_sites) * tab.b * (1.0 + std::tanh(std::fabs(h)));
}

}  // namespace steinlab::ising
