#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "resodyn/errors.hpp"
#include "resodyn/spectral.hpp"

namespace resodyn {

namespace {

// Minimum-cost perfect assignment (Hungarian method with potentials).
// Returns assignment[row] = column.
std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
    return assignment;
}

}  // namespace

bool ResonanceMatching::is_identity() const {
    for (std::size_t i = 0; i < permutation.size(); ++i) {
        if (permutation[i] != i) return false;
    }
    return true;
}

ResonanceMatching match_resonances(const std::vector<Complex>& previous, const std::vector<Complex>& current,
                                   double ambiguity_tolerance) {
    if (previous.size() != current.size()) throw InvalidArgument("match_resonances: spectra differ in size");
    const std::size_t n = previous.size();
    auto cost = [&](std::size_t i, std::size_t j) { return std::abs(previous[i] - current[j]); };

    std::vector<std::size_t> nearest(n);
    std::vector<std::size_t> claims(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < n; ++j) {
            if (cost(i, j) < cost(i, best)) best = j;
        }
        nearest[i] = best;
        ++claims[best];
    }

    ResonanceMatching out;
    out.permutation = nearest;

    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < n; ++i) {
        if (claims[nearest[i]] > 1) rows.push_back(i);
        if (claims[i] != 1) cols.push_back(i);
    }
    if (!rows.empty()) {
        std::vector<std::vector<double>> sub(rows.size(), std::vector<double>(cols.size()));
        for (std::size_t a = 0; a < rows.size(); ++a) {
            for (std::size_t b = 0; b < cols.size(); ++b) sub[a][b] = cost(rows[a], cols[b]);
        }
        const auto assignment = solve_assignment(sub);
        for (std::size_t a = 0; a < rows.size(); ++a) out.permutation[rows[a]] = cols[assignment[a]];
    }

    for (std::size_t i = 0; i < n; ++i) out.total_cost += cost(i, out.permutation[i]);

    for (std::size_t i = 0; i < n && !out.ambiguous; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            const std::size_t pi = out.permutation[i];
            const std::size_t pk = out.permutation[k];
            const double change = cost(i, pk) + cost(k, pi) - cost(i, pi) - cost(k, pk);
            if (std::abs(change) < ambiguity_tolerance) {
                std::ostringstream os;
                os << "ambiguous matching: exchanging resonances " << i << " and " << k
                   << " changes the total distance by " << change;
                out.ambiguous = true;
                out.warning = os.str();
                break;
            }
        }
    }
    return out;
}

ResonanceMatching match_resonances(const BiorthogonalSystem& previous, const BiorthogonalSystem& current,
                                   double ambiguity_tolerance) {
    return match_resonances(eigenvalues(previous), eigenvalues(current), ambiguity_tolerance);
}

}  // namespace resodyn
