#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "zerotemp/maxplus.hpp"
#include "zerotemp/spectral.hpp"
#include "zerotemp/walters.hpp"

namespace zerotemp::verify {

/// Maximum cycle mean by enumerating every simple cycle (each rooted at its least node).
template <class T>
T brute_force_max_cycle_mean(const MaxPlusMatrix<T>& m) {
    using S = MaxPlusScalar<T>;
    const std::size_t n = m.size();
    bool found = false;
    T best = S::neg_inf();
    std::vector<bool> used(n, false);
    std::function<void(std::size_t, std::size_t, T, std::size_t)> walk = [&](std::size_t root, std::size_t at,
                                                                            T weight, std::size_t len) {
        for (std::size_t next = root; next < n; ++next) {
            if (!S::finite(m(at, next))) continue;
            const T w = weight + m(at, next);
            if (next == root) {
                const T mean = w / (len + 1);
                if (!found || best < mean) best = mean;
                found = true;
            } else if (!used[next]) {
                used[next] = true;
                walk(root, next, w, len + 1);
                used[next] = false;
            }
        }
    };
    for (std::size_t r = 0; r < n; ++r) {
        used[r] = true;
        walk(r, r, T(0), 0);
        used[r] = false;
    }
    if (!found) throw NumericalError("brute_force_max_cycle_mean", "no cycle");
    return best;
}

/// Run-length chain of a Walters potential with runs capped at `cap`; state (s, n) has index s*cap + n-1.
/// The potential is constant on states, so the transfer operator is an ordinary finite matrix.
inline LogMatrix walters_run_length_matrix(const WaltersPotential& w, double beta, double a_beta, std::size_t cap) {
    LogMatrix t(2 * cap);
    auto index = [cap](int s, std::size_t n) { return static_cast<std::size_t>(s) * cap + n - 1; };
    auto value = [&](int s, std::size_t n) {
        const double a = s == 0 ? w.zero_run(n) : w.one_run(n);
        return beta * a + (s == 0 ? a_beta : 0.0);
    };
    for (int s = 0; s < 2; ++s)
        for (std::size_t n = 1; n <= cap; ++n) {
            const std::size_t longer = std::min(n + 1, cap);
            t(index(s, n), index(s, longer)) = value(s, longer);
            t(index(s, n), index(1 - s, 1)) = value(1 - s, 1);
        }
    return t;
}

struct RunLengthOracle {
    double pressure;
    double mu0;
    double log_h_ratio;  ///< log H(1^inf) / H(0^inf), read off the capped states
};

inline RunLengthOracle walters_run_length_oracle(const WaltersPotential& w, double beta, double a_beta,
                                                 std::size_t cap) {
    const PerronSolution sol = solve_perron(walters_run_length_matrix(w, beta, a_beta, cap));
    double top = neg_inf;
    for (std::size_t i = 0; i < 2 * cap; ++i) top = std::max(top, sol.log_right[i] + sol.log_left[i]);
    double zero = 0.0, total = 0.0;
    for (std::size_t i = 0; i < 2 * cap; ++i) {
        const double m = std::exp(sol.log_right[i] + sol.log_left[i] - top);
        total += m;
        if (i < cap) zero += m;
    }
    return {sol.log_lambda, zero / total, sol.log_right[2 * cap - 1] - sol.log_right[cap - 1]};
}

}  // namespace zerotemp::verify
