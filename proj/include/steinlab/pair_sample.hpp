#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace steinlab {

// One draw from the law of an exchangeable pair (X, X') built by a reversible
// kernel at stationarity.  f is the conditional mean of the antisymmetric F,
// and delta is the exact conditional expectation
//   Delta(X) = 1/2 E( |(f(X) - f(X')) F(X,X')| | X ),
// always computed by the model as a finite sum over the resampled coordinate,
// never estimated.  For exact-enumeration input `weight` carries the pair
// probability; Monte Carlo draws leave it at 1.
struct PairSample {
    double f_x = 0.0;
    double f_x_prime = 0.0;
    double big_f = 0.0;
    double delta_x = 0.0;
    double weight = 1.0;
    std::uint64_t x_id = 0;        // opaque configuration handles
    std::uint64_t x_prime_id = 0;
};

// Envelope spec for Delta(X) <= psi(f(X)): either a linear envelope B*f + C,
// a power envelope B*|f|^alpha + C with alpha in (0,2), or a tabulated psi.
// The prefactor is the (unoptimized, user-supplied) tail constant in front of
// the resulting bound; it is reported, never asserted.
struct PsiBoundSpec {
    enum class Kind { linear, power, custom };

    Kind kind = Kind::power;
    double B = 0.0;
    double C = 0.0;
    double alpha = 1.0;                               // power kind only
    double prefactor = 1.0;
    std::vector<std::pair<double, double>> table;     // custom kind: (x, psi(x)), x >= 0
    bool once_differentiable = false;                 // exponent t^2/(4 psi) instead of /(2 psi)

    static PsiBoundSpec linear(double B, double C, double prefactor = 1.0) {
        PsiBoundSpec s;
        s.kind = Kind::linear;
        s.B = B;
        s.C = C;
        s.prefactor = prefactor;
        return s;
    }

    static PsiBoundSpec power(double B, double alpha, double C, double prefactor = 1.0) {
        PsiBoundSpec s;
        s.kind = Kind::power;
        s.B = B;
        s.alpha = alpha;
        s.C = C;
        s.prefactor = prefactor;
        return s;
    }

    static PsiBoundSpec custom(std::vector<std::pair<double, double>> tab, double prefactor = 1.0) {
        PsiBoundSpec s;
        s.kind = Kind::custom;
        s.table = std::move(tab);
        s.prefactor = prefactor;
        s.once_differentiable = true;
        return s;
    }

    void validate() const {
        if (!(prefactor > 0.0)) throw std::domain_error("PsiBoundSpec: prefactor must be > 0");
        switch (kind) {
            case Kind::linear:
                if (B < 0.0 || C < 0.0) throw std::domain_error("PsiBoundSpec: B, C must be >= 0");
                break;
            case Kind::power:
                if (!(B > 0.0)) throw std::domain_error("PsiBoundSpec: power kind needs B > 0");
                if (C < 0.0) throw std::domain_error("PsiBoundSpec: C must be >= 0");
                if (!(alpha > 0.0 && alpha < 2.0))
                    throw std::domain_error("PsiBoundSpec: alpha must lie in (0,2)");
                break;
            case Kind::custom: {
                if (table.empty()) throw std::domain_error("PsiBoundSpec: empty table");
                double px = -1.0, pv = 0.0;
                for (const auto& [x, v] : table) {
                    if (x < 0.0 || x <= px) throw std::domain_error("PsiBoundSpec: table x not ascending");
                    if (v < 0.0 || v < pv) throw std::domain_error("PsiBoundSpec: psi must be nonnegative nondecreasing");
                    px = x;
                    pv = v;
                }
                break;
            }
        }
    }

    // psi is symmetric: evaluated at |x|.  The custom table interpolates
    // linearly and extends flat beyond its endpoints.
    double psi(double x) const;
};

}  // namespace steinlab
