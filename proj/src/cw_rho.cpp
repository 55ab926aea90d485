#include "steinlab/cw_rho.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace steinlab::cwrho {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int j = 0; j < k; ++j) r = r * static_cast<double>(n - j) / static_cast<double>(j + 1);
    return r;
}

double f_from_counts(const Spec& spec, std::int64_t n, std::span<const std::int64_t> counts,
                     double sum) {
    const double dn = static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t a = 0; a < spec.atoms.size(); ++a) {
        if (counts[a] == 0) continue;
        const double mi = (sum - spec.atoms[a].x) / dn;
        acc += static_cast<double>(counts[a]) * conditional_mean(spec, n, mi);
    }
    return sum / dn - acc / dn;
}

double delta_from_counts(const Spec& spec, std::int64_t n, std::span<std::int64_t> counts,
                         double sum) {
    const double dn = static_cast<double>(n);
    const double f0 = f_from_counts(spec, n, counts, sum);
    double acc = 0.0;
    for (std::size_t a = 0; a < spec.atoms.size(); ++a) {
        if (counts[a] == 0) continue;
        const double xa = spec.atoms[a].x;
        const double mi = (sum - xa) / dn;
        const auto law = conditional_law(spec, n, mi);
        const double count_a = static_cast<double>(counts[a]);
        for (std::size_t b = 0; b < spec.atoms.size(); ++b) {
            if (b == a || law[b] == 0.0) continue;
            const double xb = spec.atoms[b].x;
            // evaluate f on the configuration with one a replaced by b
            --counts[a];
            ++counts[b];
            const double f1 = f_from_counts(spec, n, counts, sum - xa + xb);
            ++counts[a];
            --counts[b];
            acc += count_a * 0.5 * law[b] * std::fabs(xa - xb) * std::fabs(f0 - f1);
        }
    }
    return acc / dn;
}

}  // namespace

void Spec::validate() const {
    if (atoms.size() < 2) throw std::domain_error("Spec: need at least two atoms");
    if (!(support_bound > 0.0)) throw std::domain_error("Spec: support bound must be > 0");
    if (beta < 0.0) throw std::domain_error("Spec: beta must be >= 0");
    double psum = 0.0, second = 0.0;
    for (const auto& a : atoms) {
        if (!(a.p > 0.0)) throw std::domain_error("Spec: weights must be positive");
        if (std::fabs(a.x) > support_bound + 1e-12)
            throw std::domain_error("Spec: atom outside [-L, L]");
        psum += a.p;
        second += a.p * a.x * a.x;
    }
    if (std::fabs(psum - 1.0) > 1e-10) throw std::domain_error("Spec: weights must sum to 1");
    if (std::fabs(second - 1.0) > 1e-9)
        throw std::domain_error("Spec: second moment must equal 1");
    for (const auto& a : atoms) {
        bool matched = false;
        for (const auto& b : atoms) {
            if (std::fabs(b.x + a.x) < 1e-12 && std::fabs(b.p - a.p) < 1e-12) {
                matched = true;
                break;
            }
        }
        if (!matched) throw std::domain_error("Spec: measure must be symmetric");
    }
}

double Spec::moment(int r) const {
    double acc = 0.0;
    for (const auto& a : atoms) acc += a.p * std::pow(a.x, r);
    return acc;
}

std::vector<double> Spec::cumulants(int max_order) const {
    // kappa_n = m_n - sum_{j=1}^{n-1} C(n-1, j-1) kappa_j m_{n-j}
    std::vector<double> m(static_cast<std::size_t>(max_order) + 1, 0.0);
    for (int r = 0; r <= max_order; ++r) m[static_cast<std::size_t>(r)] = moment(r);
    std::vector<double> kappa(static_cast<std::size_t>(max_order) + 1, 0.0);
    for (int nn = 1; nn <= max_order; ++nn) {
        double acc = m[static_cast<std::size_t>(nn)];
        for (int j = 1; j < nn; ++j)
            acc -= binom(nn - 1, j - 1) * kappa[static_cast<std::size_t>(j)] *
                   m[static_cast<std::size_t>(nn - j)];
        kappa[static_cast<std::size_t>(nn)] = acc;
    }
    return kappa;
}

double Spec::h(double s) const {
    double mx = -1e300;
    for (const auto& a : atoms) mx = std::max(mx, s * a.x);
    double acc = 0.0;
    for (const auto& a : atoms) acc += a.p * std::exp(s * a.x - mx);
    return 0.5 * s * s - (mx + std::log(acc));
}

double Spec::h_prime(double s) const {
    double mx = -1e300;
    for (const auto& a : atoms) mx = std::max(mx, s * a.x);
    double num = 0.0, den = 0.0;
    for (const auto& a : atoms) {
        const double w = a.p * std::exp(s * a.x - mx);
        num += w * a.x;
        den += w;
    }
    return s - num / den;
}

int Spec::detect_order_k(int k_max, double tol) const {
    validate();
    const auto kappa = cumulants(2 * k_max);
    if (std::fabs(1.0 - kappa[2]) > 1e-9)
        throw std::domain_error("detect_order_k: h''(0) != 0, second moment not 1");
    for (int k = 2; k <= k_max; ++k) {
        // h^{(2k)}(0) = -kappa_{2k}
        if (std::fabs(kappa[static_cast<std::size_t>(2 * k)]) > tol) return k;
    }
    throw std::domain_error("detect_order_k: degenerate rho, all derivatives vanish");
}

bool Spec::condition_b_holds(double step) const {
    const double lo = -4.0 * support_bound, hi = 4.0 * support_bound;
    // h' must be negative left of 0 and positive right of 0 (unique root at 0)
    double prev_s = lo;
    double prev = h_prime(lo);
    for (double s = lo + step; s <= hi + step * 0.5; s += step) {
        const double cur = h_prime(s);
        if (prev <= 0.0 && cur > 0.0) {
            // the only allowed sign change spans 0
            if (!(prev_s <= 0.0 && s >= -step)) return false;
        }
        if (prev > 0.0 && cur <= 0.0 && s > step) return false;  // extra root right of 0
        prev = cur;
        prev_s = s;
    }
    return true;
}

std::vector<double> conditional_law(const Spec& spec, std::int64_t n, double m_i) {
    const double dn = static_cast<double>(n);
    std::vector<double> logw(spec.atoms.size());
    double mx = -1e300;
    for (std::size_t j = 0; j < spec.atoms.size(); ++j) {
        const double x = spec.atoms[j].x;
        logw[j] = std::log(spec.atoms[j].p) + spec.beta * (x * x / (2.0 * dn) + x * m_i);
        mx = std::max(mx, logw[j]);
    }
    double z = 0.0;
    for (auto& v : logw) {
        v = std::exp(v - mx);
        z += v;
    }
    for (auto& v : logw) v /= z;
    return logw;
}

double conditional_mean(const Spec& spec, std::int64_t n, double m_i) {
    const auto law = conditional_law(spec, n, m_i);
    double acc = 0.0;
    for (std::size_t j = 0; j < law.size(); ++j) acc += law[j] * spec.atoms[j].x;
    return acc;
}

State::State(const Spec& spec, std::int64_t n)
    : spec_(&spec), n_(n), values_(static_cast<std::size_t>(n), 0),
      count_(spec.atoms.size(), 0), sum_(0.0) {
    spec.validate();
    if (n < 1) throw std::domain_error("State: n must be >= 1");
    std::size_t top = 0;
    for (std::size_t j = 1; j < spec.atoms.size(); ++j)
        if (spec.atoms[j].x > spec.atoms[top].x) top = j;
    for (auto& v : values_) v = static_cast<std::int32_t>(top);
    count_[top] = n;
    sum_ = static_cast<double>(n) * spec.atoms[top].x;
}

State State::random(const Spec& spec, std::int64_t n, Philox4x32& rng) {
    State st(spec, n);
    std::fill(st.count_.begin(), st.count_.end(), 0);
    st.sum_ = 0.0;
    // draw each coordinate from rho itself
    for (auto& v : st.values_) {
        double u = rng.uniform();
        std::size_t j = 0;
        for (; j + 1 < spec.atoms.size(); ++j) {
            if (u < spec.atoms[j].p) break;
            u -= spec.atoms[j].p;
        }
        v = static_cast<std::int32_t>(j);
        ++st.count_[j];
        st.sum_ += spec.atoms[j].x;
    }
    return st;
}

double State::f() const { return f_from_counts(*spec_, n_, count_, sum_); }

double State::delta() const {
    auto counts = count_;
    return delta_from_counts(*spec_, n_, counts, sum_);
}

PairSample State::step(Philox4x32& rng, bool with_delta) {
    PairSample ps;
    ps.f_x = f();
    if (with_delta) ps.delta_x = delta();
    const auto i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n_)));
    const auto a = static_cast<std::size_t>(values_[i]);
    const double xa = spec_->atoms[a].x;
    const double mi = (sum_ - xa) / static_cast<double>(n_);
    const auto law = conditional_law(*spec_, n_, mi);
    double u = rng.uniform();
    std::size_t b = 0;
    for (; b + 1 < law.size(); ++b) {
        if (u < law[b]) break;
        u -= law[b];
    }
    if (b != a) {
        values_[i] = static_cast<std::int32_t>(b);
        --count_[a];
        ++count_[b];
        sum_ += spec_->atoms[b].x - xa;
    }
    ps.big_f = xa - spec_->atoms[b].x;
    ps.f_x_prime = f();
    return ps;
}

void State::sweep(Philox4x32& rng) {
    for (std::int64_t k = 0; k < n_; ++k) (void)step(rng, false);
}

// ---- exact enumeration ----

namespace {

template <typename Visit>
void for_each_config(const Spec& spec, std::int64_t n, Visit&& visit) {
    const auto num_atoms = spec.atoms.size();
    double total = std::pow(static_cast<double>(num_atoms), static_cast<double>(n));
    if (total > 2e6) throw std::domain_error("cwrho enumeration: state space too large");
    std::vector<std::int32_t> idx(static_cast<std::size_t>(n), 0);
    std::vector<std::int64_t> counts(num_atoms, 0);
    counts[0] = n;
    double sum = static_cast<double>(n) * spec.atoms[0].x;
    for (;;) {
        visit(idx, counts, sum);
        // mixed-radix increment
        std::size_t pos = 0;
        for (; pos < idx.size(); ++pos) {
            const auto a = static_cast<std::size_t>(idx[pos]);
            sum -= spec.atoms[a].x;
            --counts[a];
            if (a + 1 < num_atoms) {
                idx[pos] = static_cast<std::int32_t>(a + 1);
                ++counts[a + 1];
                sum += spec.atoms[a + 1].x;
                break;
            }
            idx[pos] = 0;
            ++counts[0];
            sum += spec.atoms[0].x;
        }
        if (pos == idx.size()) break;
    }
}

double log_mu_unnorm(const Spec& spec, std::int64_t n, std::span<const std::int64_t> counts,
                     double sum) {
    double acc = spec.beta * sum * sum / (2.0 * static_cast<double>(n));
    for (std::size_t a = 0; a < counts.size(); ++a)
        acc += static_cast<double>(counts[a]) * std::log(spec.atoms[a].p);
    return acc;
}

}  // namespace

std::vector<PairSample> enumerate_pair_samples(const Spec& spec, std::int64_t n) {
    spec.validate();
    std::vector<double> logw;
    for_each_config(spec, n, [&](const auto&, const auto& counts, double sum) {
        logw.push_back(log_mu_unnorm(spec, n, counts, sum));
    });
    double mx = logw[0];
    for (const double v : logw) mx = std::max(mx, v);
    double z = 0.0;
    for (const double v : logw) z += std::exp(v - mx);

    std::vector<PairSample> out;
    std::uint64_t config_id = 0;
    for_each_config(spec, n, [&](const auto& idx, const auto& counts, double sum) {
        auto cts = std::vector<std::int64_t>(counts.begin(), counts.end());
        const double mu = std::exp(log_mu_unnorm(spec, n, cts, sum) - mx) / z;
        const double f0 = f_from_counts(spec, n, cts, sum);
        const double d0 = delta_from_counts(spec, n, cts, sum);
        for (std::int64_t i = 0; i < n; ++i) {
            const auto a = static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
            const double xa = spec.atoms[a].x;
            const double mi = (sum - xa) / static_cast<double>(n);
            const auto law = conditional_law(spec, n, mi);
            for (std::size_t b = 0; b < law.size(); ++b) {
                PairSample ps;
                ps.weight = mu * law[b] / static_cast<double>(n);
                --cts[a];
                ++cts[b];
                ps.f_x = f0;
                ps.f_x_prime = f_from_counts(spec, n, cts, sum - xa + spec.atoms[b].x);
                ++cts[a];
                --cts[b];
                ps.big_f = xa - spec.atoms[b].x;
                ps.delta_x = d0;
                ps.x_id = config_id;
                out.push_back(ps);
            }
        }
        ++config_id;
    });
    return out;
}

double detailed_balance_residual(const Spec& spec, std::int64_t n) {
    spec.validate();
    std::vector<double> logw;
    for_each_config(spec, n, [&](const auto&, const auto& counts, double sum) {
        logw.push_back(log_mu_unnorm(spec, n, counts, sum));
    });
    double mx = logw[0];
    for (const double v : logw) mx = std::max(mx, v);
    double z = 0.0;
    for (const double v : logw) z += std::exp(v - mx);

    double worst = 0.0;
    for_each_config(spec, n, [&](const auto& idx, const auto& counts, double sum) {
        auto cts = std::vector<std::int64_t>(counts.begin(), counts.end());
        const double mu_x = std::exp(log_mu_unnorm(spec, n, cts, sum) - mx) / z;
        for (std::int64_t i = 0; i < n; ++i) {
            const auto a = static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
            const double xa = spec.atoms[a].x;
            const double mi = (sum - xa) / static_cast<double>(n);
            const auto law = conditional_law(spec, n, mi);
            for (std::size_t b = 0; b < law.size(); ++b) {
                if (b == a) continue;
                --cts[a];
                ++cts[b];
                const double sum_y = sum - xa + spec.atoms[b].x;
                const double mu_y = std::exp(log_mu_unnorm(spec, n, cts, sum_y) - mx) / z;
                ++cts[a];
                --cts[b];
                const double k_xy = law[b] / static_cast<double>(n);
                const auto law_y = conditional_law(spec, n, mi);  // m_i identical from y
                const double k_yx = law_y[a] / static_cast<double>(n);
                worst = std::max(worst, std::fabs(mu_x * k_xy - mu_y * k_yx));
            }
        }
    });
    return worst;
}

double stationary_mean_f(const Spec& spec, std::int64_t n) {
    spec.validate();
    std::vector<double> logw, fs;
    for_each_config(spec, n, [&](const auto&, const auto& counts, double sum) {
        auto cts = std::vector<std::int64_t>(counts.begin(), counts.end());
        logw.push_back(log_mu_unnorm(spec, n, cts, sum));
        fs.push_back(f_from_counts(spec, n, cts, sum));
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

Spec rademacher_spec(double beta) {
    Spec s;
    s.atoms = {{-1.0, 0.5}, {1.0, 0.5}};
    s.support_bound = 1.0;
    s.beta = beta;
    return s;
}

}  // namespace steinlab::cwrho
