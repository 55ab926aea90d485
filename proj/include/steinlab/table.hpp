#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace steinlab {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct TailRow {
    double t = 0.0;
    double empirical_prob = 0.0;
    double bound_prob = 0.0;       // raw bound value (clamp separately if needed)
    std::uint64_t n_samples = 0;
    double std_err = 0.0;          // sqrt(p(1-p)/n_samples)
};

struct TailTable {
    std::vector<TailRow> rows;
    Table to_table() const;
    // empirical_prob must be nonincreasing in t
    bool monotone() const;
};

// From empirical tail points (t_i, p_i), the largest c with
// p_i <= 2 exp(-c t_i^power) for every i (points with p = 0 or t = 0 give no
// constraint).  Empty constraint set -> nullopt.
std::optional<double> fit_tail_constant(std::span<const TailRow> rows, double power);

// Counts per tail threshold -> TailRow list with binomial standard errors.
TailTable make_tail_table(std::span<const double> t_grid,
                          std::span<const std::uint64_t> exceed_counts,
                          std::uint64_t n_samples,
                          std::span<const double> bound_probs);

std::vector<double> parse_grid(const std::string& lo_hi_step);  // "lo:hi:step"

}  // namespace steinlab
