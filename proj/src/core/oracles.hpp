#pragma once

#include <cstdint>
#include <span>
#include <utility>

// Brute-force reference implementations backing the property and
// acceptance cross-checks. They share the stats contracts but none of
// the stats code: explicit rank sort + raw-moment Pearson formula,
// all-pairs drawdown scan, and adaptive quadrature of the t density.
namespace eventalpha::oracle {

double spearman(std::span<const std::pair<double, double>> pairs);

double max_drawdown(std::span<const double> equity);

double student_t_cdf(double t, std::uint64_t df);

} // namespace eventalpha::oracle
