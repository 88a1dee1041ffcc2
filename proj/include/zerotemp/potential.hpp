#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "zerotemp/errors.hpp"
#include "zerotemp/symbolic.hpp"

namespace zerotemp {

/// Potential constant on cylinders of (depth+1)-words. Depth 0 is stored lifted to depth 1.
class LocallyConstantPotential {
public:
    LocallyConstantPotential(Sft sft, std::size_t depth, const std::map<Word, double>& table)
        : sft_(std::move(sft)), depth_(depth), k_(std::max<std::size_t>(depth, 1)) {
        words_ = enumerate_words(sft_, k_ + 1);
        nodes_ = enumerate_words(sft_, k_);
        for (const auto& [w, v] : table) {
            if (w.size() != depth_ + 1 || !sft_.admissible(w))
                throw InvalidArgument("LocallyConstantPotential: inadmissible key " + to_string(w));
            (void)v;
        }
        values_.reserve(words_.size());
        for (const Word& w : words_) {
            const Word key(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(depth_ + 1));
            auto it = table.find(key);
            if (it == table.end())
                throw InvalidArgument("LocallyConstantPotential: missing value for " + to_string(key));
            values_.push_back(it->second);
        }
        for (std::size_t i = 0; i < nodes_.size(); ++i) node_index_[nodes_[i]] = i;
        for (std::size_t i = 0; i < words_.size(); ++i) word_index_[words_[i]] = i;
    }

    /// Same Sft and depth, values given in word order.
    LocallyConstantPotential with_values(std::vector<double> values) const {
        if (values.size() != values_.size()) throw InvalidArgument("with_values: size mismatch");
        LocallyConstantPotential copy = *this;
        copy.values_ = std::move(values);
        return copy;
    }

    const Sft& sft() const noexcept { return sft_; }
    std::size_t depth() const noexcept { return depth_; }
    /// Length of the words indexing transfer-matrix states.
    std::size_t state_length() const noexcept { return k_; }
    const std::vector<Word>& nodes() const noexcept { return nodes_; }
    const std::vector<Word>& words() const noexcept { return words_; }
    const std::vector<double>& values() const noexcept { return values_; }

    std::size_t node_index(const Word& w) const {
        auto it = node_index_.find(w);
        if (it == node_index_.end()) throw InvalidArgument("node_index: unknown node " + to_string(w));
        return it->second;
    }
    std::size_t word_index(const Word& w) const {
        auto it = word_index_.find(w);
        if (it == word_index_.end()) throw InvalidArgument("word_index: unknown word " + to_string(w));
        return it->second;
    }

    /// A on the cylinder of a (state_length+1)-word.
    double value(const Word& w) const { return values_[word_index(w)]; }

    /// Source and target node of the edge carried by word i.
    std::size_t edge_source(std::size_t i) const {
        const Word& w = words_[i];
        return node_index(Word(w.begin(), w.end() - 1));
    }
    std::size_t edge_target(std::size_t i) const {
        const Word& w = words_[i];
        return node_index(Word(w.begin() + 1, w.end()));
    }

    double sup_norm() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    bool normalized_for_optimization = false;

private:
    Sft sft_;
    std::size_t depth_;
    std::size_t k_;
    std::vector<Word> words_;
    std::vector<Word> nodes_;
    std::vector<double> values_;
    std::map<Word, std::size_t> node_index_;
    std::map<Word, std::size_t> word_index_;
};

/// Zero potential of the given depth.
inline LocallyConstantPotential zero_potential(const Sft& s, std::size_t depth = 1) {
    std::map<Word, double> table;
    for (const Word& w : enumerate_words(s, depth + 1)) table[w] = 0.0;
    return LocallyConstantPotential(s, depth, table);
}

/// Depth-1 potential on two symbols from its four values.
inline LocallyConstantPotential two_symbol_potential(double a00, double a01, double a10, double a11,
                                                    double theta = 0.5) {
    return LocallyConstantPotential(full_shift(1, theta), 1,
                                    {{{0, 0}, a00}, {{0, 1}, a01}, {{1, 0}, a10}, {{1, 1}, a11}});
}

}  // namespace zerotemp
