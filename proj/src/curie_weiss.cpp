#include "steinlab/curie_weiss.hpp"

#include <cmath>
#include <stdexcept>

namespace steinlab::cw {

namespace {

// P(new spin = +1 | rest) with neighbor mean mi
inline double p_up(double beta, double h, double mi) {
    return 0.5 * (1.0 + std::tanh(beta * mi + h));
}

}  // namespace

double f_from_total_spin(std::int64_t n, double beta, double h, std::int64_t S) {
    const double dn = static_cast<double>(n);
    const double k_up = static_cast<double>((n + S) / 2);
    const double k_down = static_cast<double>((n - S) / 2);
    const double t_up = std::tanh(beta * (static_cast<double>(S) - 1.0) / dn + h);
    const double t_down = std::tanh(beta * (static_cast<double>(S) + 1.0) / dn + h);
    return static_cast<double>(S) / dn - (k_up * t_up + k_down * t_down) / dn;
}

double delta_from_total_spin(std::int64_t n, double beta, double h, std::int64_t S) {
    const double dn = static_cast<double>(n);
    const double f0 = f_from_total_spin(n, beta, h, S);
    const std::int64_t k_up = (n + S) / 2;
    const std::int64_t k_down = (n - S) / 2;
    double acc = 0.0;
    if (k_up > 0) {
        const double mi = (static_cast<double>(S) - 1.0) / dn;
        const double p_flip = 1.0 - p_up(beta, h, mi);
        acc += static_cast<double>(k_up) * p_flip *
               std::fabs(f0 - f_from_total_spin(n, beta, h, S - 2));
    }
    if (k_down > 0) {
        const double mi = (static_cast<double>(S) + 1.0) / dn;
        const double p_flip = p_up(beta, h, mi);
        acc += static_cast<double>(k_down) * p_flip *
               std::fabs(f0 - f_from_total_spin(n, beta, h, S + 2));
    }
    return acc / dn;
}

double f_statistic(std::span<const std::int8_t> spins, double beta, double h) {
    const double dn = static_cast<double>(spins.size());
    std::int64_t S = 0;
    for (const auto s : spins) S += s;
    double sum = 0.0;
    for (const auto s : spins) {
        const double mi = static_cast<double>(S - s) / dn;
        sum += std::tanh(beta * mi + h);
    }
    return static_cast<double>(S) / dn - sum / dn;
}

double subcritical_functional(double m, double beta) {
    if (beta < 0.0 || beta > 1.0)
        throw std::domain_error("subcritical_functional: beta must lie in [0,1]");
    const double m2 = m * m;
    return 3.0 * (1.0 - beta) * m2 + beta * beta * beta * m2 * m2;
}

State::State(std::int64_t n, double beta, double h)
    : n_(n), beta_(beta), h_(h), spins_(static_cast<std::size_t>(n), 1), total_(n) {
    if (n < 1) throw std::domain_error("State: n must be >= 1");
}

State State::all_plus(std::int64_t n, double beta, double h) { return State(n, beta, h); }

State State::random(std::int64_t n, double beta, double h, Philox4x32& rng) {
    State st(n, beta, h);
    st.total_ = 0;
    for (auto& s : st.spins_) {
        s = rng.bernoulli(0.5) ? 1 : -1;
        st.total_ += s;
    }
    return st;
}

PairSample State::step(Philox4x32& rng, bool with_delta) {
    PairSample ps;
    ps.f_x = f();
    if (with_delta) ps.delta_x = delta();
    const auto i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n_)));
    const int old_spin = spins_[i];
    const double mi = static_cast<double>(total_ - old_spin) / static_cast<double>(n_);
    const int new_spin = rng.bernoulli(p_up(beta_, h_, mi)) ? 1 : -1;
    if (new_spin != old_spin) {
        spins_[i] = static_cast<std::int8_t>(new_spin);
        total_ += new_spin - old_spin;
    }
    ps.big_f = static_cast<double>(old_spin - new_spin);
    ps.f_x_prime = f();
    return ps;
}

void State::sweep(Philox4x32& rng) {
    for (std::int64_t k = 0; k < n_; ++k) {
        const auto i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n_)));
        const int old_spin = spins_[i];
        const double mi = static_cast<double>(total_ - old_spin) / static_cast<double>(n_);
        const int new_spin = rng.bernoulli(p_up(beta_, h_, mi)) ? 1 : -1;
        if (new_spin != old_spin) {
            spins_[i] = static_cast<std::int8_t>(new_spin);
            total_ += new_spin - old_spin;
        }
    }
}

CriticalTailResult critical_tail_experiment(std::int64_t n, std::uint64_t samples,
                                            std::uint64_t burnin_sweeps,
                                            std::uint64_t thin_sweeps,
                                            std::span<const double> t_grid,
                                            Philox4x32& rng) {
    State st = State::random(n, 1.0, 0.0, rng);
    for (std::uint64_t b = 0; b < burnin_sweeps; ++b) st.sweep(rng);

    const double scale = std::pow(static_cast<double>(n), 0.25);
    std::vector<std::uint64_t> exceed(t_grid.size(), 0);
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (std::uint64_t k = 0; k < thin_sweeps; ++k) st.sweep(rng);
        const double v = scale * std::fabs(st.magnetization());
        for (std::size_t g = 0; g < t_grid.size(); ++g)
            if (v >= t_grid[g]) ++exceed[g];
    }

    CriticalTailResult out;
    out.table = make_tail_table(t_grid, exceed, samples, {});
    const auto c = fit_tail_constant(out.table.rows, 4.0);
    out.fitted_c = c.value_or(0.0);
    for (auto& row : out.table.rows) {
        row.bound_prob = 2.0 * std::exp(-out.fitted_c * std::pow(row.t, 4.0));
        if (row.t > 0.0 && row.empirical_prob > 0.0 &&
            row.empirical_prob * static_cast<double>(samples) < 10.0)
            out.insufficient_samples = true;
    }
    return out;
}

// ---- exact enumeration ----

namespace {

// stationary weight of a configuration through its total spin:
// exp(beta (S^2 - n)/(2n) + h S)
double log_weight(std::int64_t n, double beta, double h, std::int64_t S) {
    const double dn = static_cast<double>(n);
    const double dS = static_cast<double>(S);
    return beta * (dS * dS - dn) / (2.0 * dn) + h * dS;
}

template <typename Visit>
void for_each_config(std::int64_t n, Visit&& visit) {
    const std::uint64_t m = 1ULL << n;
    std::vector<std::int8_t> spins(static_cast<std::size_t>(n));
    for (std::uint64_t mask = 0; mask < m; ++mask) {
        std::int64_t S = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            spins[static_cast<std::size_t>(i)] = (mask >> i & 1U) ? 1 : -1;
            S += spins[static_cast<std::size_t>(i)];
        }
        visit(mask, spins, S);
    }
}

}  // namespace

std::vector<PairSample> enumerate_pair_samples(std::int64_t n, double beta, double h) {
    if (n > 16) throw std::domain_error("enumerate_pair_samples: n too large");
    // normalize mu over all configs
    std::vector<double> logw;
    for_each_config(n, [&](std::uint64_t, const auto&, std::int64_t S) {
        logw.push_back(log_weight(n, beta, h, S));
    });
    double mx = logw[0];
    for (const double v : logw) mx = std::max(mx, v);
    double z = 0.0;
    for (const double v : logw) z += std::exp(v - mx);

    std::vector<PairSample> out;
    const double dn = static_cast<double>(n);
    for_each_config(n, [&](std::uint64_t mask, const auto& spins, std::int64_t S) {
        const double mu = std::exp(log_weight(n, beta, h, S) - mx) / z;
        const double f0 = f_from_total_spin(n, beta, h, S);
        const double d0 = delta_from_total_spin(n, beta, h, S);
        for (std::int64_t i = 0; i < n; ++i) {
            const int old_spin = spins[static_cast<std::size_t>(i)];
            const double mi = static_cast<double>(S - old_spin) / dn;
            const double pu = p_up(beta, h, mi);
            for (const int v : {+1, -1}) {
                PairSample ps;
                ps.weight = mu * (1.0 / dn) * (v == 1 ? pu : 1.0 - pu);
                const std::int64_t S2 = S + (v - old_spin);
                ps.f_x = f0;
                ps.f_x_prime = f_from_total_spin(n, beta, h, S2);
                ps.big_f = static_cast<double>(old_spin - v);
                ps.delta_x = d0;
                ps.x_id = mask;
                ps.x_prime_id = (v == 1) ? (mask | (1ULL << i)) : (mask & ~(1ULL << i));
                out.push_back(ps);
            }
        }
    });
    return out;
}

double detailed_balance_residual(std::int64_t n, double beta, double h) {
    if (n > 20) throw std::domain_error("detailed_balance_residual: n too large");
    // mu(x) K(x, x^i) vs mu(x^i) K(x^i, x) for every config and site
    std::vector<double> logw;
    for_each_config(n, [&](std::uint64_t, const auto&, std::int64_t S) {
        logw.push_back(log_weight(n, beta, h, S));
    });
    double mx = logw[0];
    for (const double v : logw) mx = std::max(mx, v);
    double z = 0.0;
    for (const double v : logw) z += std::exp(v - mx);

    const double dn = static_cast<double>(n);
    double worst = 0.0;
    for_each_config(n, [&](std::uint64_t mask, const auto& spins, std::int64_t S) {
        const double mu_x = std::exp(log_weight(n, beta, h, S) - mx) / z;
        for (std::int64_t i = 0; i < n; ++i) {
            const int s_i = spins[static_cast<std::size_t>(i)];
            const std::int64_t S2 = S - 2 * s_i;
            const double mu_y = std::exp(log_weight(n, beta, h, S2) - mx) / z;
            const double mi = static_cast<double>(S - s_i) / dn;  // same from both sides
            const double pu = p_up(beta, h, mi);
            const double k_xy = (1.0 / dn) * (s_i == 1 ? 1.0 - pu : pu);
            const double k_yx = (1.0 / dn) * (s_i == 1 ? pu : 1.0 - pu);
            worst = std::max(worst, std::fabs(mu_x * k_xy - mu_y * k_yx));
        }
    });
    return worst;
}

double stationary_mean_f(std::int64_t n, double beta, double h) {
    if (n > 30) throw std::domain_error("stationary_mean_f: n too large");
    // S-measurable: sum over spin-count classes with binomial multiplicity
    std::vector<double> logw, fs;
    for (std::int64_t k = 0; k <= n; ++k) {
        const std::int64_t S = n - 2 * k;
        double logc = 0.0;
        for (std::int64_t j = 0; j < k; ++j)
            logc += std::log(static_cast<double>(n - j)) - std::log(static_cast<double>(j + 1));
        logw.push_back(logc + log_weight(n, beta, h, S));
        fs.push_back(f_from_total_spin(n, beta, h, S));
    }
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

}  // namespace steinlab::cw
