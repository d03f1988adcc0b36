#include "sngeo/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sngeo {

namespace {

// Neighbour candidate ordering: distance first, then lexicographic location.
// This is a strict total order on distinct points (locations are pairwise
// distinct in every configuration).
struct Candidate {
    double dist2;
    std::int32_t idx;
};

struct CandLess {
    const MarkedConfiguration* cfg;
    bool operator()(const Candidate& a, const Candidate& b) const {
        if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
        auto pa = cfg->point(a.idx);
        auto pb = cfg->point(b.idx);
        for (std::size_t i = 0; i < pa.size(); ++i)
            if (pa[i] != pb[i]) return pa[i] < pb[i];
        return false;
    }
};

class KdTree {
  public:
    explicit KdTree(const MarkedConfiguration& cfg) : cfg_(&cfg), dim_(cfg.dim()) {
        const std::int64_t n = cfg.size();
        perm_.resize(n);
        std::iota(perm_.begin(), perm_.end(), 0);
        nodes_.reserve(n);
        root_ = build(0, n, 0);
    }

    /// k nearest neighbours of the query point, excluding point self_idx.
    std::vector<std::int32_t> query(std::span<const double> y, std::int32_t self, int k) const {
        CandLess less{cfg_};
        std::vector<Candidate> heap;  // max-heap under less: heap[0] is the worst kept
        heap.reserve(k + 1);
        search(root_, y, self, k, heap, less);
        std::sort_heap(heap.begin(), heap.end(), less);
        std::vector<std::int32_t> out(heap.size());
        for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].idx;
        return out;
    }

  private:
    struct Node {
        std::int32_t point;
        std::int32_t left = -1, right = -1;
        int axis = 0;
        double split = 0.0;
    };

    std::int32_t build(std::int64_t lo, std::int64_t hi, int depth) {
        if (lo >= hi) return -1;
        const int axis = depth % dim_;
        const std::int64_t mid = (lo + hi) / 2;
        std::nth_element(perm_.begin() + lo, perm_.begin() + mid, perm_.begin() + hi,
                         [&](std::int32_t a, std::int32_t b) {
                             const double va = cfg_->point(a)[axis];
                             const double vb = cfg_->point(b)[axis];
                             if (va != vb) return va < vb;
                             return a < b;
                         });
        Node node;
        node.point = perm_[mid];
        node.axis = axis;
        node.split = cfg_->point(perm_[mid])[axis];
        const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(node);
        const std::int32_t l = build(lo, mid, depth + 1);
        const std::int32_t r = build(mid + 1, hi, depth + 1);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    void consider(std::int32_t p, std::span<const double> y, std::int32_t self, int k,
                  std::vector<Candidate>& heap, const CandLess& less) const {
        if (p == self) return;
        auto x = cfg_->point(p);
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double t = y[i] - x[i];
            d2 += t * t;
        }
        Candidate c{d2, p};
        if (static_cast<int>(heap.size()) < k) {
            heap.push_back(c);
            std::push_heap(heap.begin(), heap.end(), less);
        } else if (less(c, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), less);
            heap.back() = c;
            std::push_heap(heap.begin(), heap.end(), less);
        }
    }

    void search(std::int32_t node_id, std::span<const double> y, std::int32_t self, int k,
                std::vector<Candidate>& heap, const CandLess& less) const {
        if (node_id < 0) return;
        const Node& node = nodes_[node_id];
        consider(node.point, y, self, k, heap, less);
        const double diff = y[node.axis] - node.split;
        const std::int32_t near = diff < 0.0 ? node.left : node.right;
        const std::int32_t far = diff < 0.0 ? node.right : node.left;
        search(near, y, self, k, heap, less);
        // Descend the far side unless it provably cannot improve the heap;
        // on exact distance ties a lexicographically smaller point may still
        // be hiding there, so pruning requires a strict inequality.
        if (static_cast<int>(heap.size()) < k || diff * diff <= heap.front().dist2)
            search(far, y, self, k, heap, less);
    }

    const MarkedConfiguration* cfg_;
    int dim_;
    std::vector<std::int32_t> perm_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

}  // namespace

NeighborStructure nn_structure(const MarkedConfiguration& config, int k) {
    if (k < 1) throw invalid_parameter("nn_structure: k must be >= 1");
    const std::int64_t n = config.size();
    if (n <= k) throw invalid_parameter("nn_structure: need more than k points");

    NeighborStructure ns;
    ns.k = k;
    ns.nn.resize(n);
    KdTree tree(config);
    for (std::int64_t i = 0; i < n; ++i)
        ns.nn[i] = tree.query(config.point(i), static_cast<std::int32_t>(i), k);

    ns.symmetric.resize(n);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int32_t j : ns.nn[i]) {
            ns.symmetric[i].push_back(j);
            ns.symmetric[j].push_back(static_cast<std::int32_t>(i));
        }
    }
    for (auto& v : ns.symmetric) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return ns;
}

double nn_length_of(const MarkedConfiguration& restricted, int k) {
    if (restricted.size() <= k) return 0.0;
    NeighborStructure ns = nn_structure(restricted, k);
    double total = 0.0;
    for (std::int64_t i = 0; i < restricted.size(); ++i) {
        auto x = restricted.point(i);
        double s = 0.0;
        for (std::int32_t j : ns.symmetric[i]) {
            auto y = restricted.point(j);
            double d2 = 0.0;
            for (std::size_t a = 0; a < x.size(); ++a) {
                const double t = y[a] - x[a];
                d2 += t * t;
            }
            s += std::sqrt(d2);
        }
        total += 0.5 * s;
    }
    return total;
}

double nn_length_functional(const MarkedConfiguration& config, const LatticeWindow& window,
                            int k) {
    return nn_length_of(restrict(config, Region::window_fill(window)), k);
}

}  // namespace sngeo
