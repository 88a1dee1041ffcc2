#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "zerotemp/detail/graph.hpp"
#include "zerotemp/errors.hpp"

namespace zerotemp {

/// Exact rational extended by -infinity; scalar for the exact max-plus mode.
class ExtRational {
public:
    using Rational = boost::multiprecision::cpp_rational;

    ExtRational() = default;
    ExtRational(long long v) : value_(v), finite_(true) {}
    ExtRational(Rational v) : value_(std::move(v)), finite_(true) {}

    static ExtRational neg_inf() {
        ExtRational r;
        r.finite_ = false;
        return r;
    }

    bool finite() const noexcept { return finite_; }
    const Rational& value() const noexcept { return value_; }

    friend ExtRational operator+(const ExtRational& x, const ExtRational& y) {
        if (!x.finite_ || !y.finite_) return neg_inf();
        return ExtRational(Rational(x.value_ + y.value_));
    }
    friend ExtRational operator-(const ExtRational& x, const ExtRational& y) {
        if (!y.finite_) throw InvalidArgument("ExtRational: subtracting -inf");
        if (!x.finite_) return neg_inf();
        return ExtRational(Rational(x.value_ - y.value_));
    }
    friend ExtRational operator/(const ExtRational& x, std::size_t k) {
        if (!x.finite_) return neg_inf();
        return ExtRational(Rational(x.value_ / Rational(static_cast<long long>(k))));
    }
    friend bool operator<(const ExtRational& x, const ExtRational& y) {
        if (!x.finite_) return y.finite_;
        if (!y.finite_) return false;
        return x.value_ < y.value_;
    }
    friend bool operator>(const ExtRational& x, const ExtRational& y) { return y < x; }
    friend bool operator<=(const ExtRational& x, const ExtRational& y) { return !(y < x); }
    friend bool operator==(const ExtRational& x, const ExtRational& y) {
        if (x.finite_ != y.finite_) return false;
        return !x.finite_ || x.value_ == y.value_;
    }

private:
    Rational value_{0};
    bool finite_ = true;
};

template <class T>
struct MaxPlusScalar;

template <>
struct MaxPlusScalar<double> {
    static double neg_inf() { return -std::numeric_limits<double>::infinity(); }
    static bool finite(double x) { return x != neg_inf(); }
    static bool equal(double x, double y, double tol) {
        if (!finite(x) || !finite(y)) return finite(x) == finite(y);
        return std::abs(x - y) <= tol;
    }
    static constexpr double default_tol = 1e-9;
};

template <>
struct MaxPlusScalar<ExtRational> {
    static ExtRational neg_inf() { return ExtRational::neg_inf(); }
    static bool finite(const ExtRational& x) { return x.finite(); }
    static bool equal(const ExtRational& x, const ExtRational& y, double) { return x == y; }
    static constexpr double default_tol = 0.0;
};

/// Square matrix over R ∪ {-inf}. Entry (i, j) is read as an arc i -> j.
template <class T>
class MaxPlusMatrix {
public:
    MaxPlusMatrix() = default;
    explicit MaxPlusMatrix(std::size_t n) : n_(n), entries_(n * n, MaxPlusScalar<T>::neg_inf()) {}

    MaxPlusMatrix(std::initializer_list<std::initializer_list<T>> rows) : MaxPlusMatrix(rows.size()) {
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != n_) throw InvalidArgument("MaxPlusMatrix: ragged rows");
            std::size_t j = 0;
            for (const T& x : row) (*this)(i, j++) = x;
            ++i;
        }
    }

    static MaxPlusMatrix from_rows(const std::vector<std::vector<T>>& rows) {
        MaxPlusMatrix m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw InvalidArgument("MaxPlusMatrix: ragged rows");
            for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    static MaxPlusMatrix identity(std::size_t n) {
        MaxPlusMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(0);
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    T& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

    friend bool operator==(const MaxPlusMatrix&, const MaxPlusMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<T> entries_;
};

template <class T>
using MaxPlusVector = std::vector<T>;

template <class T>
struct MaxPlusEigenData {
    T eigenvalue{};
    std::vector<MaxPlusVector<T>> eigenvectors;
    std::vector<std::size_t> critical_nodes;
    std::vector<std::vector<std::size_t>> critical_components;
    std::size_t eigenspace_dim = 0;
};

/// (M ⊗ v)_i = max_j (M_ij + v_j).
template <class T>
MaxPlusVector<T> mp_apply(const MaxPlusMatrix<T>& m, const MaxPlusVector<T>& v) {
    if (v.size() != m.size()) throw InvalidArgument("mp_apply: dimension mismatch");
    MaxPlusVector<T> out(m.size(), MaxPlusScalar<T>::neg_inf());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) {
            T cand = m(i, j) + v[j];
            if (out[i] < cand) out[i] = cand;
        }
    return out;
}

template <class T>
MaxPlusMatrix<T> mp_multiply(const MaxPlusMatrix<T>& a, const MaxPlusMatrix<T>& b) {
    if (a.size() != b.size()) throw InvalidArgument("mp_multiply: dimension mismatch");
    const std::size_t n = a.size();
    MaxPlusMatrix<T> c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (!MaxPlusScalar<T>::finite(a(i, k))) continue;
            for (std::size_t j = 0; j < n; ++j) {
                T cand = a(i, k) + b(k, j);
                if (c(i, j) < cand) c(i, j) = cand;
            }
        }
    return c;
}

/// Entrywise shift by a constant; -inf stays -inf.
template <class T>
MaxPlusMatrix<T> mp_shift(const MaxPlusMatrix<T>& m, const T& c) {
    MaxPlusMatrix<T> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            if (MaxPlusScalar<T>::finite(m(i, j))) out(i, j) = m(i, j) + c;
    return out;
}

/// Submatrix on the given index list.
template <class T>
MaxPlusMatrix<T> mp_restrict(const MaxPlusMatrix<T>& m, const std::vector<std::size_t>& idx) {
    MaxPlusMatrix<T> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = m(idx[i], idx[j]);
    return out;
}

/// Maximum cycle mean by Karp's walk-length table.
template <class T>
T mp_eigenvalue(const MaxPlusMatrix<T>& m) {
    using S = MaxPlusScalar<T>;
    const std::size_t n = m.size();
    if (n == 0) throw NumericalError("mp_eigenvalue", "empty matrix has no eigenvalue");
    std::vector<std::vector<T>> walk(n + 1, std::vector<T>(n, S::neg_inf()));
    for (std::size_t v = 0; v < n; ++v) walk[0][v] = T(0);
    for (std::size_t k = 1; k <= n; ++k)
        for (std::size_t u = 0; u < n; ++u) {
            if (!S::finite(walk[k - 1][u])) continue;
            for (std::size_t v = 0; v < n; ++v) {
                T cand = walk[k - 1][u] + m(u, v);
                if (walk[k][v] < cand) walk[k][v] = cand;
            }
        }
    bool found = false;
    T best = S::neg_inf();
    for (std::size_t v = 0; v < n; ++v) {
        if (!S::finite(walk[n][v])) continue;
        bool have = false;
        T worst{};
        for (std::size_t k = 0; k < n; ++k) {
            if (!S::finite(walk[k][v])) continue;
            T mean = (walk[n][v] - walk[k][v]) / (n - k);
            if (!have || mean < worst) {
                worst = mean;
                have = true;
            }
        }
        if (have && (!found || best < worst)) {
            best = worst;
            found = true;
        }
    }
    if (!found) throw NumericalError("mp_eigenvalue", "matrix has no finite cycle");
    return best;
}

/// Kleene plus closure B ⊕ B^2 ⊕ ... ⊕ B^n.
template <class T>
MaxPlusMatrix<T> mp_kleene_plus(const MaxPlusMatrix<T>& b) {
    MaxPlusMatrix<T> acc = b;
    MaxPlusMatrix<T> power = b;
    for (std::size_t k = 2; k <= b.size(); ++k) {
        power = mp_multiply(power, b);
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
                if (acc(i, j) < power(i, j)) acc(i, j) = power(i, j);
    }
    return acc;
}

template <class T>
MaxPlusEigenData<T> mp_eigenvectors(const MaxPlusMatrix<T>& m, double tol = MaxPlusScalar<T>::default_tol) {
    using S = MaxPlusScalar<T>;
    const std::size_t n = m.size();
    MaxPlusEigenData<T> out;
    out.eigenvalue = mp_eigenvalue(m);
    MaxPlusMatrix<T> b(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (S::finite(m(i, j))) b(i, j) = m(i, j) - out.eigenvalue;
    const MaxPlusMatrix<T> plus = mp_kleene_plus(b);

    std::vector<bool> critical(n, false);
    for (std::size_t i = 0; i < n; ++i)
        if (S::equal(plus(i, i), T(0), tol)) {
            critical[i] = true;
            out.critical_nodes.push_back(i);
        }

    std::vector<std::vector<bool>> crit_adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (critical[i] && critical[j] && S::finite(b(i, j)) && S::finite(plus(j, i)))
                crit_adj[i][j] = S::equal(b(i, j) + plus(j, i), T(0), tol);
    out.critical_components = detail::strongly_connected_components(crit_adj, critical, false);

    // Column j of B* is column j of B+ with a zero on the diagonal.
    for (std::size_t j : out.critical_nodes) {
        MaxPlusVector<T> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = plus(i, j);
        if (col[j] < T(0)) col[j] = T(0);
        std::size_t pin = 0;
        while (pin < n && !S::finite(col[pin])) ++pin;
        const T base = col[pin];
        for (auto& x : col)
            if (S::finite(x)) x = x - base;
        bool duplicate = false;
        for (const auto& seen : out.eigenvectors) {
            bool same = true;
            for (std::size_t i = 0; i < n && same; ++i) same = S::equal(seen[i], col[i], tol);
            duplicate = duplicate || same;
        }
        if (!duplicate) out.eigenvectors.push_back(std::move(col));
    }
    out.eigenspace_dim = out.eigenvectors.size();
    return out;
}

struct ClosedForm2x2 {
    double eigenvalue;
    double offset;  ///< y - x for the eigenvector (x, y)
};

/// Eigen-data of [[a+b+d, c+d], [a+b, b+c+d]] from the three-branch maximum.
inline ClosedForm2x2 mp_2x2_closed_form(double a, double b, double c, double d, double tie_tol = 1e-12) {
    const double branch[3] = {a + b + d, b + c + d, (a + b + c + d) / 2.0};
    const double offsets[3] = {-d, b, (a + b - c - d) / 2.0};
    const double lambda = std::max({branch[0], branch[1], branch[2]});
    bool have = false;
    double offset = 0.0;
    for (int k = 0; k < 3; ++k) {
        if (lambda - branch[k] > tie_tol) continue;
        if (have && std::abs(offsets[k] - offset) > tie_tol * (1.0 + std::abs(offset)))
            throw NumericalError("mp_2x2_closed_form", "attained branches give different offsets");
        if (!have) offset = offsets[k];
        have = true;
    }
    return {lambda, offset};
}

/// Write the matrix [[m00, m01], [m10, m11]] in the (a, b, c, d) parameterisation.
inline std::array<double, 4> mp_2x2_parameters(double m00, double m01, double m10, double m11) {
    const double d = m00 - m10;
    const double b = m11 - m01;
    return {m10 - b, b, m01 - d, d};
}

}  // namespace zerotemp
