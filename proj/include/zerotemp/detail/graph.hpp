#pragma once

#include <cstddef>
#include <vector>

namespace zerotemp::detail {

/// Strongly connected components of a directed graph given as a 0/1 adjacency matrix.
/// Only nodes with active[i] set take part. Components are sorted, and ordered by least node.
/// Singletons are kept only if they carry a self-loop when `require_cycle` is set.
inline std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<std::vector<bool>>& adj, const std::vector<bool>& active, bool require_cycle) {
    const std::size_t n = adj.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) reach[i][j] = active[i] && active[j] && adj[i][j];
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (reach[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = true;

    std::vector<bool> placed(n, false);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!active[i] || placed[i]) continue;
        std::vector<std::size_t> comp{i};
        placed[i] = true;
        for (std::size_t j = i + 1; j < n; ++j)
            if (!placed[j] && reach[i][j] && reach[j][i]) {
                comp.push_back(j);
                placed[j] = true;
            }
        if (require_cycle && comp.size() == 1 && !reach[i][i]) continue;
        out.push_back(std::move(comp));
    }
    return out;
}

}  // namespace zerotemp::detail
