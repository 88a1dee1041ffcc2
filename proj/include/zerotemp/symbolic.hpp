#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "zerotemp/errors.hpp"

namespace zerotemp {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

/// One-sided subshift of finite type on the alphabet {0, ..., alphabet_size-1}.
class Sft {
public:
    Sft(std::size_t alphabet_size, std::vector<std::vector<bool>> transitions, double theta)
        : n_(alphabet_size), transitions_(std::move(transitions)), theta_(theta) {
        if (n_ < 1 || n_ > 255) throw InvalidArgument("Sft: alphabet size must be in [1, 255]");
        if (!(theta_ > 0.0 && theta_ < 1.0)) throw InvalidArgument("Sft: theta must lie in (0,1)");
        if (transitions_.size() != n_) throw InvalidArgument("Sft: transition matrix has wrong size");
        for (const auto& row : transitions_)
            if (row.size() != n_) throw InvalidArgument("Sft: transition matrix has wrong size");
        for (std::size_t i = 0; i < n_; ++i) {
            bool row_ok = false, col_ok = false;
            for (std::size_t j = 0; j < n_; ++j) {
                row_ok = row_ok || transitions_[i][j];
                col_ok = col_ok || transitions_[j][i];
            }
            if (!row_ok || !col_ok)
                throw InvalidArgument("Sft: symbol " + std::to_string(i) + " is dead");
        }
    }

    std::size_t alphabet_size() const noexcept { return n_; }
    double theta() const noexcept { return theta_; }
    const std::vector<std::vector<bool>>& transitions() const noexcept { return transitions_; }

    bool allowed(Symbol a, Symbol b) const {
        return a < n_ && b < n_ && transitions_[a][b];
    }

    bool admissible(const Word& w) const {
        for (Symbol s : w)
            if (s >= n_) return false;
        for (std::size_t i = 1; i < w.size(); ++i)
            if (!transitions_[w[i - 1]][w[i]]) return false;
        return true;
    }

    /// Some power up to alphabet_size^2 of the 0/1 matrix is strictly positive.
    bool is_aperiodic() const {
        std::vector<std::vector<bool>> power = transitions_;
        const std::size_t cap = n_ * n_ + 1;
        for (std::size_t p = 1; p <= cap; ++p) {
            bool positive = true;
            for (const auto& row : power)
                for (bool e : row) positive = positive && e;
            if (positive) return true;
            std::vector<std::vector<bool>> next(n_, std::vector<bool>(n_, false));
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t k = 0; k < n_; ++k)
                    if (power[i][k])
                        for (std::size_t j = 0; j < n_; ++j)
                            if (transitions_[k][j]) next[i][j] = true;
            power = std::move(next);
        }
        return false;
    }

private:
    std::size_t n_;
    std::vector<std::vector<bool>> transitions_;
    double theta_;
};

/// Full shift on d+1 symbols.
inline Sft full_shift(std::size_t d, double theta) {
    if (d < 1) throw InvalidArgument("full_shift: need d >= 1");
    return Sft(d + 1, std::vector<std::vector<bool>>(d + 1, std::vector<bool>(d + 1, true)), theta);
}

/// Two symbols with 11 forbidden.
inline Sft golden_mean_shift(double theta) {
    return Sft(2, {{true, true}, {true, false}}, theta);
}

/// All admissible words of the given length, lexicographically ordered.
inline std::vector<Word> enumerate_words(const Sft& s, std::size_t length) {
    if (length < 1) throw InvalidArgument("enumerate_words: length must be >= 1");
    std::vector<Word> out;
    for (std::size_t a = 0; a < s.alphabet_size(); ++a) out.push_back(Word{static_cast<Symbol>(a)});
    for (std::size_t len = 1; len < length; ++len) {
        std::vector<Word> next;
        for (const Word& w : out)
            for (std::size_t a = 0; a < s.alphabet_size(); ++a)
                if (s.allowed(w.back(), static_cast<Symbol>(a))) {
                    Word v = w;
                    v.push_back(static_cast<Symbol>(a));
                    next.push_back(std::move(v));
                }
        out = std::move(next);
    }
    return out;
}

inline std::string to_string(const Word& w) {
    std::string s;
    for (Symbol c : w) {
        if (!s.empty() && c >= 10) s += '.';
        s += std::to_string(c);
    }
    return s;
}

/// Eventually periodic point: prefix followed by tail^infinity.
struct MarkedPoint {
    enum class Kind { fixed_point, preperiodic, cylinder_representative };

    Kind kind = Kind::fixed_point;
    Word prefix;
    Symbol tail = 0;

    static MarkedPoint fixed(Symbol i) { return {Kind::fixed_point, {}, i}; }

    static MarkedPoint preperiodic(Word prefix, Symbol tail) {
        return {Kind::preperiodic, std::move(prefix), tail};
    }

    /// Representative of the cylinder [w]: w followed by the repeated last symbol.
    static MarkedPoint cylinder(const Word& w) {
        if (w.empty()) throw InvalidArgument("MarkedPoint: empty cylinder word");
        return {Kind::cylinder_representative, w, w.back()};
    }

    Symbol at(std::size_t i) const { return i < prefix.size() ? prefix[i] : tail; }

    bool lies_in(const Sft& s) const {
        if (!s.allowed(tail, tail)) return false;
        if (!s.admissible(prefix)) return false;
        return prefix.empty() || s.allowed(prefix.back(), tail);
    }

    /// First `n` coordinates.
    Word expand(std::size_t n) const {
        Word w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = at(i);
        return w;
    }
};

/// theta^(first index of disagreement); 0 for equal points. Exact on marked points.
inline double word_distance(const MarkedPoint& x, const MarkedPoint& y, double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("word_distance: theta must lie in (0,1)");
    const std::size_t horizon = std::max(x.prefix.size(), y.prefix.size()) + 1;
    for (std::size_t i = 0; i < horizon; ++i)
        if (x.at(i) != y.at(i)) return std::pow(theta, static_cast<double>(i));
    return 0.0;
}

}  // namespace zerotemp
