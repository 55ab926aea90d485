#include "steinlab/table.hpp"

#include <cmath>
#include <stdexcept>

namespace steinlab {

Table TailTable::to_table() const {
    Table t;
    t.columns = {"t", "empirical_prob", "bound_prob", "n_samples", "std_err"};
    for (const auto& r : rows)
        t.rows.push_back({r.t, r.empirical_prob, r.bound_prob,
                          static_cast<double>(r.n_samples), r.std_err});
    return t;
}

bool TailTable::monotone() const {
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].empirical_prob > rows[i - 1].empirical_prob) return false;
    return true;
}

std::optional<double> fit_tail_constant(std::span<const TailRow> rows, double power) {
    std::optional<double> c;
    for (const auto& r : rows) {
        if (r.t <= 0.0 || r.empirical_prob <= 0.0) continue;
        const double ci = -std::log(r.empirical_prob / 2.0) / std::pow(r.t, power);
        if (!c || ci < *c) c = ci;
    }
    return c;
}

TailTable make_tail_table(std::span<const double> t_grid,
                          std::span<const std::uint64_t> exceed_counts,
                          std::uint64_t n_samples,
                          std::span<const double> bound_probs) {
    if (t_grid.size() != exceed_counts.size() ||
        (!bound_probs.empty() && bound_probs.size() != t_grid.size()))
        throw std::invalid_argument("make_tail_table: size mismatch");
    TailTable tt;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        TailRow r;
        r.t = t_grid[i];
        r.n_samples = n_samples;
        r.empirical_prob =
            n_samples ? static_cast<double>(exceed_counts[i]) / static_cast<double>(n_samples) : 0.0;
        r.std_err = n_samples ? std::sqrt(r.empirical_prob * (1.0 - r.empirical_prob) /
                                          static_cast<double>(n_samples))
                              : 0.0;
        r.bound_prob = bound_probs.empty() ? 0.0 : bound_probs[i];
        tt.rows.push_back(r);
    }
    return tt;
}

std::vector<double> parse_grid(const std::string& s) {
    const auto c1 = s.find(':');
    const auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("grid must be lo:hi:step");
    const double lo = std::stod(s.substr(0, c1));
    const double hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(s.substr(c2 + 1));
    if (step <= 0.0 || hi < lo) throw std::invalid_argument("bad grid bounds");
    std::vector<double> g;
    for (double t = lo; t <= hi + 1e-12 * step; t += step) g.push_back(t);
    return g;
}

}  // namespace steinlab
