#include "steinlab/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace steinlab::mf {

namespace {

constexpr double kBisectTol = 1e-13;
constexpr double kDoubleRootTol = 1e-6;   // on |psi'|
constexpr double kTripleRootTol = 1e-4;   // additionally on |psi''|
constexpr double kTangentPsiTol = 1e-9;   // |psi| at a critical point counts as a root

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// psi scale: the general normalization carries a factor ~aut relative to the
// triangle form, thresholds scale along
inline double psi_scale(Pattern f) {
    return f.is_triangle() ? 1.0 : static_cast<double>(f.aut);
}

struct PsiEval {
    double value, first, second;
};

PsiEval psi_eval(double u, double beta, double h, Pattern f) {
    const double p = logistic(beta * u + h);
    const double pd = beta * p * (1.0 - p);  // d phi / du
    PsiEval out{};
    if (f.is_triangle()) {
        out.value = p * p - u;
        out.first = 2.0 * p * pd - 1.0;
        out.second = 2.0 * beta * pd * p * (2.0 - 3.0 * p);
    } else {
        const double e = static_cast<double>(f.e);
        const double aut = static_cast<double>(f.aut);
        const double pe2 = std::pow(p, f.e - 2);
        out.value = 2.0 * e * pe2 * p - aut * u;
        out.first = 2.0 * e * (e - 1.0) * pe2 * pd - aut;
        out.second = 2.0 * e * (e - 1.0) * beta * pd * pe2 *
                     ((e - 1.0) * (1.0 - p) - p);
    }
    return out;
}

template <typename Fn>
double bisect_sign_change(Fn&& fn, double lo, double hi, double tol = kBisectTol) {
    double flo = fn(lo);
    const bool lo_pos = flo > 0.0;
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((fn(mid) > 0.0) == lo_pos ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Multiplicity classify(double u, double beta, double h, Pattern f) {
    const auto ev = psi_eval(u, beta, h, f);
    const double scale = psi_scale(f);
    if (std::fabs(ev.first) >= kDoubleRootTol * scale) return Multiplicity::simple;
    if (std::fabs(ev.second) >= kTripleRootTol * scale) return Multiplicity::double_root;
    return Multiplicity::triple_root;
}

}  // namespace

double phi(double u, double beta, double h) { return logistic(beta * u + h); }

double phi_prime(double u, double beta, double h) {
    const double p = logistic(beta * u + h);
    return beta * p * (1.0 - p);
}

double psi(double u, double beta, double h, Pattern f) { return psi_eval(u, beta, h, f).value; }

double psi_prime(double u, double beta, double h, Pattern f) {
    return psi_eval(u, beta, h, f).first;
}

double psi_second(double u, double beta, double h, Pattern f) {
    return psi_eval(u, beta, h, f).second;
}

FixedPointReport psi_roots(double beta, double h, Pattern f, int scan_intervals) {
    if (beta < 0.0) throw std::domain_error("psi_roots: beta must be >= 0");
    if (scan_intervals < 16) throw std::domain_error("psi_roots: scan too coarse");

    FixedPointReport rep;
    const double scale = psi_scale(f);
    const double du = 1.0 / static_cast<double>(scan_intervals);

    // one streaming pass collects crossings of psi and of psi'
    std::vector<std::pair<double, double>> psi_brackets, dpsi_brackets;
    PsiEval prev = psi_eval(0.0, beta, h, f);
    double prev_u = 0.0;
    for (int i = 1; i <= scan_intervals; ++i) {
        const double u = static_cast<double>(i) * du;
        const PsiEval cur = psi_eval(u, beta, h, f);
        if ((prev.value > 0.0) != (cur.value > 0.0)) psi_brackets.emplace_back(prev_u, u);
        if ((prev.first > 0.0) != (cur.first > 0.0)) dpsi_brackets.emplace_back(prev_u, u);
        prev = cur;
        prev_u = u;
    }

    const auto add_root = [&](double u) {
        for (const auto& r : rep.roots)
            if (std::fabs(r.u - u) < 1e-6) return;
        Root root;
        root.u = u;
        root.psi_prime = psi_eval(u, beta, h, f).first;
        root.mult = classify(u, beta, h, f);
        rep.roots.push_back(root);
    };

    for (const auto& [lo, hi] : psi_brackets)
        add_root(bisect_sign_change(
            [&](double u) { return psi_eval(u, beta, h, f).value; }, lo, hi));

    // tangent roots: critical points where psi touches zero without crossing
    for (const auto& [lo, hi] : dpsi_brackets) {
        const double uc = bisect_sign_change(
            [&](double u) { return psi_eval(u, beta, h, f).first; }, lo, hi);
        if (std::fabs(psi_eval(uc, beta, h, f).value) <= kTangentPsiTol * scale) add_root(uc);
    }

    std::sort(rep.roots.begin(), rep.roots.end(),
              [](const Root& a, const Root& b) { return a.u < b.u; });

    if (rep.roots.size() == 1) {
        rep.u_star = rep.roots[0].u;
        rep.in_region_S =
            rep.roots[0].mult == Multiplicity::simple && rep.roots[0].psi_prime < 0.0;
    } else if (rep.roots.size() == 2) {
        // boundary configuration: one tangent root, one crossing root
        const Root* simple = nullptr;
        for (const auto& r : rep.roots)
            if (r.mult == Multiplicity::simple) simple = &r;
        rep.u_star = simple ? simple->u : std::numeric_limits<double>::quiet_NaN();
        rep.in_region_S = false;
    } else {
        rep.u_star = std::numeric_limits<double>::quiet_NaN();
        rep.in_region_S = false;
    }
    return rep;
}

double critical_h0(Pattern f) {
    const double e = static_cast<double>(f.e);
    return std::log(e - 1.0) - e / (e - 1.0);
}

double critical_beta0(Pattern f) {
    const double e = static_cast<double>(f.e);
    return static_cast<double>(f.aut) * std::pow(e, f.e - 1) / (2.0 * std::pow(e - 1.0, f.e));
}

double p0_threshold(Pattern f) {
    const double e = static_cast<double>(f.e);
    return (e - 1.0) / (e - 1.0 + std::exp(e / (e - 1.0)));
}

BracketPair region_brackets(double h, Pattern f) {
    BracketPair out;
    const double h0 = critical_h0(f);
    if (h > h0) return out;
    out.defined = true;
    const double em1 = static_cast<double>(f.e) - 1.0;
    const double pivot = 1.0 / em1;
    const auto g = [&](double x) { return -std::log(x) - (1.0 + x) / (em1 * x); };
    if (h == h0) {
        out.a_star = out.a_upper = pivot;
    } else {
        // g increases to h0 on (0, pivot], then decreases; bracket both sides
        out.a_star = bisect_sign_change([&](double x) { return g(x) - h; }, 1e-18, pivot, 1e-16);
        double hi = 2.0 * pivot;
        while (g(hi) > h) hi *= 2.0;
        out.a_upper = bisect_sign_change([&](double x) { return g(x) - h; }, pivot, hi, 1e-12);
    }
    const double e = static_cast<double>(f.e);
    const double aut = static_cast<double>(f.aut);
    const auto beta_of = [&](double a) {
        return aut * std::pow(1.0 + a, f.e) / (2.0 * e * em1 * a);
    };
    out.beta_star = beta_of(out.a_star);
    out.beta_upper = beta_of(out.a_upper);
    return out;
}

RegionReport region_S_membership(double beta, double h, Pattern f) {
    RegionReport rep;
    const double h0 = critical_h0(f);
    const auto br = region_brackets(h, f);
    rep.closed_form = !br.defined || beta < br.beta_star || beta > br.beta_upper;
    rep.numeric = psi_roots(beta, h, f).in_region_S;
    rep.in_S = rep.closed_form;

    rep.near_boundary = rep.closed_form != rep.numeric;
    if (br.defined)
        rep.near_boundary = rep.near_boundary ||
                            std::fabs(beta - br.beta_star) < 1e-6 ||
                            std::fabs(beta - br.beta_upper) < 1e-6;
    if (std::fabs(h - h0) < 1e-6)
        rep.near_boundary = rep.near_boundary || std::fabs(beta - critical_beta0(f)) < 1e-3;
    return rep;
}

PhasePoint phase_curve(double t, Pattern f) {
    if (!(t > 0.0)) throw std::domain_error("phase_curve: t must be > 0");
    const double e = static_cast<double>(f.e);
    const double em1 = e - 1.0;
    PhasePoint p;
    p.h = -std::log(t) - (1.0 + t) / (em1 * t);
    p.beta = static_cast<double>(f.aut) * std::pow(1.0 + t, f.e) / (2.0 * e * em1 * t);
    return p;
}

double curve_inflection_root(double t, Pattern f) {
    if (!(t > 0.0)) throw std::domain_error("curve_inflection_root: t must be > 0");
    return 2.0 * static_cast<double>(f.e) / static_cast<double>(f.aut) *
           std::pow(1.0 + t, 1 - f.e);
}

double kl_rate(double r, double s) {
    if (r < 0.0 || r > 1.0 || s < 0.0 || s > 1.0)
        throw std::domain_error("kl_rate: arguments must lie in [0,1]");
    if (r == s) return 0.0;
    if (s == 0.0 || s == 1.0) return std::numeric_limits<double>::infinity();
    double acc = 0.0;
    if (r > 0.0) acc += r * std::log(r / s);
    if (r < 1.0) acc += (1.0 - r) * std::log((1.0 - r) / (1.0 - s));
    return acc;
}

double energy(double r, double beta, double p, Pattern f) {
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("energy: r must lie in (0,1)");
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("energy: p must lie in (0,1)");
    return 0.5 * kl_rate(r, p) + 0.5 * std::log(1.0 - p) -
           beta * std::pow(r, f.e) / static_cast<double>(f.aut);
}

double mean_field_u_of_r(double r, Pattern f) {
    if (f.is_triangle()) return r * r;
    return 2.0 * static_cast<double>(f.e) * std::pow(r, f.e - 1) / static_cast<double>(f.aut);
}

bool rate_stationarity_check(double r, double beta, double p, Pattern f) {
    const double eps = std::min({1e-6, 0.5 * r, 0.5 * (1.0 - r)});
    const double deriv =
        (energy(r + eps, beta, p, f) - energy(r - eps, beta, p, f)) / (2.0 * eps);
    const double h = std::log(p / (1.0 - p));
    const double psi_val = psi(mean_field_u_of_r(r, f), beta, h, f);
    if (std::fabs(deriv) < 1e-9 && std::fabs(psi_val) < 1e-9 * psi_scale(f)) return true;
    return (deriv > 0.0) == (psi_val < 0.0);
}

double free_energy_limit(double beta, double h, Pattern f) {
    const auto rep = psi_roots(beta, h, f);
    if (rep.roots.size() >= 3 || std::isnan(rep.u_star))
        throw LowTemperatureError("free_energy_limit: low-temperature regime unsolved");
    const double p = phi(0.0, beta, h);
    const double r = phi(rep.u_star, beta, h);
    return -0.5 * kl_rate(r, p) - 0.5 * std::log(1.0 - p) +
           beta * std::pow(r, f.e) / static_cast<double>(f.aut);
}

LdRate ld_rate(double p, double r, Pattern f) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("ld_rate: p must lie in (0,1)");
    if (r < p) throw std::domain_error("ld_rate: need r >= p");
    if (r > 1.0) throw std::domain_error("ld_rate: r must be <= 1");
    LdRate out;
    out.h = std::log(p / (1.0 - p));
    out.rate = 0.5 * kl_rate(r, p);
    if (r == p) {
        out.beta = 0.0;
        out.admissible = region_S_membership(0.0, out.h, f).in_S;
        return out;
    }
    if (r == 1.0) {
        out.beta = std::numeric_limits<double>::infinity();
        out.admissible = true;  // beta above beta^*(h) for every h
        return out;
    }
    const double u_target = mean_field_u_of_r(r, f);
    out.beta = (std::log(r / (1.0 - r)) - out.h) / u_target;
    const auto region = region_S_membership(out.beta, out.h, f);
    const auto roots = psi_roots(out.beta, out.h, f);
    out.admissible = region.in_S && !std::isnan(roots.u_star) &&
                     std::fabs(roots.u_star - u_target) < 1e-9;
    return out;
}

AdmissibleInterval admissible_r_interval(double p, Pattern f) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("admissible_r_interval: p must lie in (0,1)");
    AdmissibleInterval out;
    const double h = std::log(p / (1.0 - p));
    const auto br = region_brackets(h, f);
    if (!br.defined) {
        out.full = true;
        return out;
    }
    // endpoints: the non-tangent root at each tangency beta
    const auto endpoint = [&](double beta_t, bool take_largest) {
        const auto rep = psi_roots(beta_t, h, f);
        const Root* chosen = nullptr;
        for (const auto& rt : rep.roots) {
            if (rt.mult != Multiplicity::simple) continue;
            if (!chosen || (take_largest ? rt.u > chosen->u : rt.u < chosen->u)) chosen = &rt;
        }
        if (!chosen) chosen = &rep.roots.front();  // h == h0: single triple root
        return phi(chosen->u, beta_t, h);
    };
    out.p_lo = endpoint(br.beta_star, false);
    out.p_hi = endpoint(br.beta_upper, true);
    if (out.p_lo > out.p_hi) std::swap(out.p_lo, out.p_hi);
    return out;
}

}  // namespace steinlab::mf
