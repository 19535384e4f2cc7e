#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "tqe/errors.hpp"

// Composite Simpson quadrature with one refinement doubling, plus a
// positive-part integrator that brackets integrand sign changes by bisection
// and integrates the positive segments piecewise (instead of clipping on a
// fixed grid, which would carry O(h) error at each sign change).

namespace tqe {

inline constexpr double kQuadRelTol = 1e-8;
inline constexpr double kQuadAbsTol = 1e-14;
// Bisection brackets are narrowed to this fraction of the interval length.
inline constexpr double kRootRelWidth = 1e-10;

// Smallest odd point count >= 3 containing n (Simpson needs an even number
// of intervals).
inline int odd_points(int n) {
    if (n < 3) n = 3;
    return (n % 2 == 0) ? n + 1 : n;
}

namespace detail {

template <class F>
double simpson_pass(F&& f, double a, double b, int points) {
    const int n = points - 1;  // even interval count
    const double h = (b - a) / n;
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < n; i += 2) odd += f(a + i * h);
    for (int i = 2; i < n; i += 2) even += f(a + i * h);
    return (h / 3.0) * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

}  // namespace detail

namespace detail {

// One refinement doubling on [a, b]: Simpson at `points` and 2*points-1.
// Returns the refined value plus the standard step-doubling error estimate
// (Simpson converges as h^4, so err(fine) ~ |fine - coarse| / 15).
template <class F>
std::pair<double, double> simpson_pair(F&& f, double a, double b, int points) {
    const double coarse = simpson_pass(f, a, b, points);
    const double fine = simpson_pass(f, a, b, 2 * points - 1);
    return {fine, std::abs(fine - coarse) / 15.0};
}

inline constexpr int kMaxAdaptDepth = 18;

// Recursive bisection with a length-proportional share of the global error
// budget; leaves that are locally converged in relative terms are accepted
// early.
template <class F>
double integrate_adaptive(F&& f, double a, double b, int points, double budget,
                          double total_len, double& fmax, int depth) {
    auto probe = [&](double x) {
        const double v = f(x);
        fmax = std::max(fmax, std::abs(v));
        return v;
    };
    const auto [value, err] = simpson_pair(probe, a, b, points);
    const double len = std::abs(b - a);
    const double share = budget * (len / total_len);
    if (err <= std::max(kQuadRelTol * std::abs(value), share)) return value;
    if (depth >= kMaxAdaptDepth) {
        char msg[256];
        std::snprintf(msg, sizeof msg,
                      "quadrature not converged at depth %d: err = %.3e, "
                      "budget share = %.3e over [%.6e, %.6e]",
                      depth, err, share, a, b);
        throw tolerance_error(msg);
    }
    const double mid = 0.5 * (a + b);
    const int half_points = std::max(33, odd_points(points / 2));
    return integrate_adaptive(f, a, mid, half_points, budget, total_len, fmax,
                              depth + 1) +
           integrate_adaptive(f, mid, b, half_points, budget, total_len, fmax,
                              depth + 1);
}

}  // namespace detail

// Composite Simpson on an odd_points(n_points) grid with one refinement
// doubling; accepted when the two estimates agree to kQuadRelTol relative
// (with an absolute floor scaled by the integrand's magnitude, for near-zero
// integrals). Intervals failing the check are bisected recursively with the
// same leaf test and a length-proportional error budget; only a leaf still
// unconverged at the depth cap throws tolerance_error with diagnostics.
template <class F>
double integrate(F&& f, double a, double b, int n_points) {
    if (a == b) return 0.0;
    const int n1 = odd_points(n_points);
    // Track a magnitude scale so the absolute floor is unit-free.
    double fmax = 0.0;
    auto probe = [&](double x) {
        const double v = f(x);
        fmax = std::max(fmax, std::abs(v));
        return v;
    };
    const auto [value, err] = detail::simpson_pair(probe, a, b, n1);
    const double scale = std::max(1.0, fmax * std::abs(b - a));
    const double budget =
        std::max(kQuadRelTol * std::abs(value), kQuadAbsTol * scale);
    if (err <= budget) return value;
    return detail::integrate_adaptive(f, a, b, n1, budget, std::abs(b - a),
                                      fmax, 0);
}

// Bisection on [lo, hi] (f(lo), f(hi) of opposite sign) down to
// kRootRelWidth * span; returns the midpoint of the final bracket.
template <class F>
double bisect_root(F&& f, double lo, double hi, double span) {
    double flo = f(lo);
    const double tol = kRootRelWidth * std::abs(span);
    while (std::abs(hi - lo) > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if ((flo <= 0.0 && fmid <= 0.0) || (flo >= 0.0 && fmid >= 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Sign-change locations of f on [a, b], scanned on a 2*(odd_points(n)-1)
// interval grid and sharpened by bisection. Returned in increasing order.
template <class F>
std::vector<double> bracket_sign_changes(F&& f, double a, double b,
                                         int n_points) {
    std::vector<double> roots;
    if (a == b) return roots;
    const int n = 2 * (odd_points(n_points) - 1);
    const double h = (b - a) / n;
    double xprev = a, fprev = f(a);
    for (int i = 1; i <= n; ++i) {
        const double x = (i == n) ? b : a + i * h;
        const double fx = f(x);
        if ((fprev < 0.0 && fx > 0.0) || (fprev > 0.0 && fx < 0.0))
            roots.push_back(bisect_root(f, xprev, x, b - a));
        xprev = x;
        fprev = fx;
    }
    return roots;
}

// Integral of max(f, 0) over [a, b] (a < b): sign changes are bracketed, the
// interval is split there, and each positive segment is integrated with the
// refined-Simpson contract above. Segment point budgets are proportional to
// segment length with a floor.
template <class F>
double integrate_positive_part(F&& f, double a, double b, int n_points) {
    if (a == b) return 0.0;
    const std::vector<double> roots = bracket_sign_changes(f, a, b, n_points);
    std::vector<double> cuts;
    cuts.push_back(a);
    cuts.insert(cuts.end(), roots.begin(), roots.end());
    cuts.push_back(b);
    double total = 0.0;
    for (size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double lo = cuts[s], hi = cuts[s + 1];
        if (hi <= lo) continue;
        if (f(0.5 * (lo + hi)) <= 0.0) continue;
        const int pts = std::max(
            17, (int)std::lround(n_points * (hi - lo) / (b - a)));
        total += integrate(f, lo, hi, pts);
    }
    return total;
}

}  // namespace tqe
