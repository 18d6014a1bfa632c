#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace semlift {

// Exact k-nearest-neighbor search over a static point set.
//
// Results are totally ordered by (squared distance, insertion index), so
// equidistant candidates always resolve to the lowest index. That makes every
// query reproducible regardless of tree layout or traversal order, which the
// label completion and rendering passes rely on.
//
// Build once, then query from any number of threads.
template <int Dim>
class KdTree {
 public:
  using Point = std::array<double, Dim>;

  struct Neighbor {
    double dist2;
    uint32_t index;
  };

  KdTree() = default;

  explicit KdTree(std::vector<Point> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    for (uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    if (!points_.empty()) build(0, static_cast<int>(points_.size()), 0);
  }

  size_t size() const { return points_.size(); }
  const Point& point(uint32_t i) const { return points_[i]; }

  // Fills `out` with the min(k, size()) nearest neighbors of `query`,
  // ascending by (dist2, index). `out` is cleared first.
  void knn(const Point& query, int k, std::vector<Neighbor>& out) const {
    out.clear();
    if (k <= 0 || points_.empty()) return;
    const size_t want = std::min<size_t>(static_cast<size_t>(k), points_.size());
    Heap heap(want, out);
    search(0, static_cast<int>(points_.size()), 0, query, heap);
    std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.dist2 != b.dist2 ? a.dist2 < b.dist2 : a.index < b.index;
    });
  }

  // Nearest single neighbor; index is SIZE_MAX-like sentinel when empty.
  Neighbor nearest(const Point& query) const {
    std::vector<Neighbor> out;
    knn(query, 1, out);
    if (out.empty()) return {0.0, UINT32_MAX};
    return out[0];
  }

 private:
  static constexpr int kLeafSize = 16;

  // Bounded max-heap on (dist2, index); the root is the current worst.
  struct Heap {
    Heap(size_t cap, std::vector<Neighbor>& store) : capacity(cap), data(store) {
      data.reserve(cap);
    }

    // "Less-than" for the heap: better = smaller (dist2, index). With this
    // ordering std::push_heap keeps the worst neighbor at the front.
    static bool better(const Neighbor& a, const Neighbor& b) {
      return a.dist2 != b.dist2 ? a.dist2 < b.dist2 : a.index < b.index;
    }

    bool would_accept(double dist2, uint32_t index) const {
      if (data.size() < capacity) return true;
      const Neighbor& top = data.front();
      return dist2 != top.dist2 ? dist2 < top.dist2 : index < top.index;
    }

    void push(double dist2, uint32_t index) {
      if (data.size() < capacity) {
        data.push_back({dist2, index});
        std::push_heap(data.begin(), data.end(), better);
      } else if (would_accept(dist2, index)) {
        std::pop_heap(data.begin(), data.end(), better);
        data.back() = {dist2, index};
        std::push_heap(data.begin(), data.end(), better);
      }
    }

    // Prune bound: subtrees farther than this cannot contribute.
    double bound() const {
      if (data.size() < capacity) return std::numeric_limits<double>::infinity();
      return data.front().dist2;
    }

    size_t capacity;
    std::vector<Neighbor>& data;
  };

  void build(int begin, int end, int depth) {
    if (end - begin <= kLeafSize) return;
    const int axis = depth % Dim;
    const int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](uint32_t a, uint32_t b) {
                       return points_[a][axis] != points_[b][axis]
                                  ? points_[a][axis] < points_[b][axis]
                                  : a < b;
                     });
    build(begin, mid, depth + 1);
    build(mid + 1, end, depth + 1);
  }

  static double sq_dist(const Point& a, const Point& b) {
    double s = 0.0;
    for (int i = 0; i < Dim; ++i) {
      const double d = a[i] - b[i];
      s += d * d;
    }
    return s;
  }

  void search(int begin, int end, int depth, const Point& query,
              Heap& heap) const {
    if (end - begin <= kLeafSize) {
      for (int i = begin; i < end; ++i) {
        const uint32_t idx = order_[i];
        heap.push(sq_dist(points_[idx], query), idx);
      }
      return;
    }
    const int axis = depth % Dim;
    const int mid = begin + (end - begin) / 2;
    const uint32_t mid_idx = order_[mid];
    heap.push(sq_dist(points_[mid_idx], query), mid_idx);

    const double delta = query[axis] - points_[mid_idx][axis];
    const bool left_first = delta < 0.0;
    if (left_first) {
      search(begin, mid, depth + 1, query, heap);
      if (delta * delta <= heap.bound()) search(mid + 1, end, depth + 1, query, heap);
    } else {
      search(mid + 1, end, depth + 1, query, heap);
      if (delta * delta <= heap.bound()) search(begin, mid, depth + 1, query, heap);
    }
  }

  std::vector<Point> points_;
  std::vector<uint32_t> order_;
};

using KdTree2 = KdTree<2>;
using KdTree3 = KdTree<3>;

}  // namespace semlift
