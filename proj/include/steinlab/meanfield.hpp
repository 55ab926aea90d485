#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace steinlab::mf {

// Only the edge and automorphism counts of the pattern enter the analysis.
struct Pattern {
    int e = 3;
    std::int64_t aut = 6;
    bool is_triangle() const { return e == 3 && aut == 6; }
};

inline constexpr Pattern kTriangle{3, 6};
inline constexpr Pattern kTwoStar{2, 2};
inline constexpr Pattern kK4{6, 24};

double phi(double u, double beta, double h);        // logistic(beta u + h)
double phi_prime(double u, double beta, double h);  // beta phi (1 - phi)

// Fixed-point function whose roots are the mean-field solutions:
// triangle normalization phi(u)^2 - u; general 2 e phi(u)^{e-1} - aut * u.
double psi(double u, double beta, double h, Pattern f = kTriangle);
double psi_prime(double u, double beta, double h, Pattern f = kTriangle);
double psi_second(double u, double beta, double h, Pattern f = kTriangle);

enum class Multiplicity { simple, double_root, triple_root };

struct Root {
    double u = 0.0;
    double psi_prime = 0.0;
    Multiplicity mult = Multiplicity::simple;
};

struct FixedPointReport {
    std::vector<Root> roots;   // sorted by u, between 1 and 3 of them
    double u_star = 0.0;       // the stable root when one exists, else NaN
    bool in_region_S = false;  // unique root with strictly negative psi'
};

// Sign scan (default 1e4 intervals) + bisection to 1e-13 for crossings, plus
// a scan of psi' for tangent (double) roots; multiplicity classified by
// |psi'| < 1e-6 and |psi''| < 1e-4.
FixedPointReport psi_roots(double beta, double h, Pattern f = kTriangle,
                           int scan_intervals = 10000);

double critical_h0(Pattern f = kTriangle);     // log(e-1) - e/(e-1)
double critical_beta0(Pattern f = kTriangle);  // aut e^{e-1} / (2 (e-1)^e)
double p0_threshold(Pattern f = kTriangle);    // (e-1)/(e-1 + exp(e/(e-1)))

struct BracketPair {
    bool defined = false;  // only for h <= h0
    double a_star = 0.0, a_upper = 0.0;
    double beta_star = 0.0, beta_upper = 0.0;
};

// Tangency parameters: the two solutions of log x + (1+x)/((e-1)x) + h = 0
// on either side of 1/(e-1), and the betas they induce.
BracketPair region_brackets(double h, Pattern f = kTriangle);

struct RegionReport {
    bool in_S = false;        // consensus (closed form authoritative)
    bool closed_form = false;
    bool numeric = false;
    bool near_boundary = false;  // within 1e-6 of the phase boundary
};

RegionReport region_S_membership(double beta, double h, Pattern f = kTriangle);

struct PhasePoint {
    double h = 0.0;
    double beta = 0.0;
};

// gamma(t): the tangency curve; t = 1/(e-1) gives the critical point.
PhasePoint phase_curve(double t, Pattern f = kTriangle);
// the double root sitting on gamma(t): (2e/aut) (1+t)^{1-e}
double curve_inflection_root(double t, Pattern f = kTriangle);

// Bernoulli relative entropy I(r,s); boundary r in {0,1} by continuity,
// s in {0,1} with r != s gives +infinity.
double kl_rate(double r, double s);

// e(r) = I(r,p)/2 + log(1-p)/2 - beta r^e / aut
double energy(double r, double beta, double p, Pattern f = kTriangle);

// u(r): the fixed-point argument matching density r (triangle: r^2)
double mean_field_u_of_r(double r, Pattern f = kTriangle);

// sign(d e/d r) == -sign(psi(u(r))) via central differences
bool rate_stationarity_check(double r, double beta, double p, Pattern f = kTriangle);

struct LowTemperatureError : std::domain_error {
    using std::domain_error::domain_error;
};

// -I(phi(u*),p)/2 - log(1-p)/2 + beta phi(u*)^e / aut at the stable root;
// on the phase boundary the non-tangent root is used.  Three roots -> throws
// LowTemperatureError.
double free_energy_limit(double beta, double h, Pattern f = kTriangle);

struct LdRate {
    double rate = 0.0;  // I(r,p)/2 per n^2
    double beta = 0.0;
    double h = 0.0;
    bool admissible = false;
};

// Tilting parameters reproducing density r from base density p (r >= p).
LdRate ld_rate(double p, double r, Pattern f = kTriangle);

struct AdmissibleInterval {
    bool full = false;
    double p_lo = 0.0;  // allowed r: (p, p_lo) union (p_hi, 1]
    double p_hi = 0.0;
};

AdmissibleInterval admissible_r_interval(double p, Pattern f = kTriangle);

}  // namespace steinlab::mf
