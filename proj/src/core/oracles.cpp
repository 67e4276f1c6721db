#include "core/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace eventalpha::oracle {

namespace {

// Rank of each element with tied values averaged, built by scanning a
// sorted copy and searching positions explicitly.
std::vector<double> explicit_ranks(std::span<const double> v) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t first = 0;
        while (sorted[first] != v[i]) ++first;
        std::size_t last = first;
        while (last + 1 < sorted.size() && sorted[last + 1] == v[i]) ++last;
        // positions first..last are 0-based; average of 1-based ranks
        ranks[i] = (static_cast<double>(first + 1) + static_cast<double>(last + 1)) / 2.0;
    }
    return ranks;
}

double t_density(double x, double df) {
    double c = std::exp(std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0)) /
               std::sqrt(df * M_PI);
    return c * std::pow(1.0 + x * x / df, -(df + 1.0) / 2.0);
}

double simpson(double (*f)(double, double), double df, double a, double b) {
    double m = (a + b) / 2.0;
    return (b - a) / 6.0 * (f(a, df) + 4.0 * f(m, df) + f(b, df));
}

double adaptive_simpson(double (*f)(double, double), double df, double a, double b, double whole,
                        double tol, int depth) {
    double m = (a + b) / 2.0;
    double left = simpson(f, df, a, m);
    double right = simpson(f, df, m, b);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, df, a, m, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, df, m, b, right, tol / 2.0, depth - 1);
}

} // namespace

double spearman(std::span<const std::pair<double, double>> pairs) {
    std::size_t n = pairs.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = pairs[i].first;
        y[i] = pairs[i].second;
    }
    std::vector<double> rx = explicit_ranks(x);
    std::vector<double> ry = explicit_ranks(y);
    // Raw-moment Pearson formula; rank sums and products stay exact in
    // doubles for any realistic n.
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        sx += rx[i];
        sy += ry[i];
        sxy += rx[i] * ry[i];
        sxx += rx[i] * rx[i];
        syy += ry[i] * ry[i];
    }
    double num = dn * sxy - sx * sy;
    double den = std::sqrt((dn * sxx - sx * sx) * (dn * syy - sy * sy));
    return num / den;
}

double max_drawdown(std::span<const double> equity) {
    double worst = 0.0;
    for (std::size_t i = 0; i < equity.size(); ++i)
        for (std::size_t j = i; j < equity.size(); ++j)
            worst = std::min(worst, equity[j] / equity[i] - 1.0);
    return worst;
}

double student_t_cdf(double t, std::uint64_t df) {
    if (t == 0.0) return 0.5;
    double d = static_cast<double>(df);
    double a = 0.0, b = std::fabs(t);
    double whole = simpson(&t_density, d, a, b);
    double integral = adaptive_simpson(&t_density, d, a, b, whole, 1e-12, 40);
    return t > 0.0 ? 0.5 + integral : 0.5 - integral;
}

} // namespace eventalpha::oracle
