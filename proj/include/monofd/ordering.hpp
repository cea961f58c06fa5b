#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <vector>

namespace monofd {

/// Fill-reducing ordering for SparseLU by recursive graph bisection of the
/// symmetrized pattern: a BFS level structure from a pseudo-peripheral node is
/// cut at its median level, both halves are ordered first and the separator
/// level last.
template <typename StorageIndex>
class NestedDissectionOrdering {
public:
    using PermutationType = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, StorageIndex>;

    template <typename MatrixType>
    void operator()(const MatrixType& mat, PermutationType& perm) {
        const int n = static_cast<int>(mat.cols());
        adj_.assign(n, {});
        for (int c = 0; c < mat.outerSize(); ++c) {
            for (typename MatrixType::InnerIterator it(mat, c); it; ++it) {
                const int r = static_cast<int>(it.index());
                if (r == c) continue;
                adj_[r].push_back(c);
                adj_[c].push_back(r);
            }
        }
        for (auto& a : adj_) {
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
        }
        tag_.assign(n, -1);
        level_.assign(n, -1);
        order_.clear();
        order_.reserve(n);
        next_tag_ = 0;
        std::vector<int> all(n);
        for (int i = 0; i < n; ++i) all[i] = i;
        dissect(std::move(all));
        perm.resize(n);
        for (int k = 0; k < n; ++k) perm.indices()(order_[k]) = static_cast<StorageIndex>(k);
    }

private:
    static constexpr std::size_t kLeafSize = 64;

    std::vector<std::vector<int>> adj_;
    std::vector<int> tag_, level_, order_;
    int next_tag_ = 0;

    // BFS restricted to nodes carrying `tag`; fills level_ and returns the visit order.
    std::vector<int> bfs(int root, int tag) {
        const int visited = tag + 1;
        std::vector<int> q{root};
        level_[root] = 0;
        tag_[root] = visited;
        for (std::size_t h = 0; h < q.size(); ++h) {
            const int v = q[h];
            for (int w : adj_[v]) {
                if (tag_[w] != tag) continue;
                tag_[w] = visited;
                level_[w] = level_[v] + 1;
                q.push_back(w);
            }
        }
        for (int v : q) tag_[v] = tag;
        return q;
    }

    void emit(const std::vector<int>& nodes) { order_.insert(order_.end(), nodes.begin(), nodes.end()); }

    void dissect(std::vector<int> nodes) {
        if (nodes.size() <= kLeafSize) {
            emit(nodes);
            return;
        }
        const int tag = (next_tag_ += 2);
        for (int v : nodes) tag_[v] = tag;
        auto q = bfs(nodes[0], tag);
        for (int pass = 0; pass < 2; ++pass) q = bfs(q.back(), tag);
        if (q.size() < nodes.size()) {
            // Disconnected: order the reached component and the rest separately.
            for (int v : q) tag_[v] = -1;
            std::vector<int> rest;
            for (int v : nodes)
                if (tag_[v] == tag) rest.push_back(v);
            for (int v : rest) tag_[v] = -1;
            dissect(std::move(q));
            dissect(std::move(rest));
            return;
        }
        for (int v : nodes) tag_[v] = -1;
        const int depth = level_[q.back()];
        std::vector<int> count(depth + 1, 0);
        for (int v : q) ++count[level_[v]];
        int cut = 0, below = 0;
        while (cut < depth && below + count[cut] < static_cast<int>(q.size()) / 2) below += count[cut++];
        if (cut == 0 || cut == depth) {
            emit(nodes);
            return;
        }
        std::vector<int> lo, hi, sep;
        for (int v : q) (level_[v] < cut ? lo : level_[v] > cut ? hi : sep).push_back(v);
        dissect(std::move(lo));
        dissect(std::move(hi));
        emit(sep);
    }
};

}  // namespace monofd
