#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "steinlab/pair_sample.hpp"
#include "steinlab/rng.hpp"

namespace steinlab::ising {

// d-dimensional torus with periodic boundary, row-major site indexing.
// side = 2 collapses the two neighbors per axis into one (set semantics);
// such lattices sample fine but are rejected by the subset statistics.
struct TorusLattice {
    int d = 1;
    std::int64_t side = 3;
    std::int64_t num_sites = 3;
    int neighbors_per_site = 2;         // 2d, or d when side == 2
    bool collapsed = false;
    std::vector<std::int32_t> neighbors;  // neighbors_per_site entries per site

    static TorusLattice make(int d, std::int64_t side);

    std::span<const std::int32_t> site_neighbors(std::int64_t x) const {
        return {neighbors.data() + x * neighbors_per_site,
                static_cast<std::size_t>(neighbors_per_site)};
    }
};

// Fourier-Walsh coefficients of tanh(2 d beta m_x) over the 2d neighbor spins:
//   a_k = 2^{-2d} sum_{s in {-1,1}^{2d}} tanh(beta sum s_i) s_1...s_k
// theta_k = C(2d, 2k+1) a_{2k+1}, b = |1 - theta_0| + sum (2k+1)|theta_k|.
struct ThetaTable {
    int d = 0;
    double beta = 0.0;
    std::vector<double> a;      // a_0 .. a_{2d}
    std::vector<double> theta;  // theta_0 .. theta_{d-1}
    double b = 0.0;
};

// Exact enumeration over {-1,1}^{2d}; d in [1,6].  Cross-checked against the
// closed form for theta_0 at 1e-12 on every call.  Cached per (d, beta).
ThetaTable theta_coefficients(int d, double beta);

// (1/4^{d-1}) sum_{k=1}^{d} k C(2d, d+k) tanh(2 k beta)
double theta0_closed_form(int d, double beta);

// max over all 2^{2d} neighbor sign vectors of
// | tanh(beta sum s) - sum_k a_k sum_{|S|=k} s_S |
double fourier_walsh_identity_check(int d, double beta);

// unique root of theta_0(beta) = 1 (d >= 2; theta_0 is strictly increasing)
double beta1_root(int d, double rel_tol = 1e-10);

// averages of spin products over k-subsets of each neighborhood (r) and the
// same with the center spin included (s); k in [1, 2d], needs side >= 3
double r_statistic(const TorusLattice& lat, std::span<const std::int8_t> spins, int k);
double s_statistic(const TorusLattice& lat, std::span<const std::int8_t> spins, int k);
// direct subset enumeration, test oracle
double r_statistic_bruteforce(const TorusLattice& lat, std::span<const std::int8_t> spins, int k);

// (1 - theta_0) m - sum_k theta_k r_{2k+1}  (h = 0), and minus the tanh(h)
// star correction when h != 0.  Equals the exchangeable-pair f identically.
double meanfield_residual(const TorusLattice& lat, std::span<const std::int8_t> spins,
                          double beta, double h, const ThetaTable& thetas);

class State {
public:
    State(const TorusLattice& lat, double beta, double h);

    static State all_plus(const TorusLattice& lat, double beta, double h);
    static State random(const TorusLattice& lat, double beta, double h, Philox4x32& rng);

    const TorusLattice& lattice() const { return *lat_; }
    std::span<const std::int8_t> spins() const { return spins_; }
    double magnetization() const {
        return static_cast<double>(total_) / static_cast<double>(lat_->num_sites);
    }
    int local_field(std::int64_t x) const { return field_[static_cast<std::size_t>(x)]; }

    PairSample step(Philox4x32& rng, bool with_delta = false);
    void sweep(Philox4x32& rng);

    // f = (1/|O|) sum_x w_x (s_x - tanh(beta field_x + h)),
    // w_x = 1 + tanh(h) tanh(beta field_x); O(|O|)
    double f() const;
    // exact Delta via the O(d) change of f under a single flip; O(|O| d)
    double delta() const;

private:
    double flip_probability(std::int64_t x) const;
    double f_change_on_flip(std::int64_t x) const;  // f(sigma^x) - f(sigma)
    void apply_flip(std::int64_t x);

    const TorusLattice* lat_;
    double beta_, h_, tanh_h_;
    std::vector<std::int8_t> spins_;
    std::vector<std::int16_t> field_;   // sum of neighbor spins per site
    std::int64_t total_;
    // lookup by field value (index field + nn): tanh(beta f + h), tanh(beta f)
    std::vector<double> tanh_cond_, tanh_plain_;
};

// per-transition bound |f - f'| <= (2/|O|) b(beta) (1 + tanh|h|)
double per_transition_f_bound(const TorusLattice& lat, double beta, double h);

}  // namespace steinlab::ising
