#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "hyrrt/error.hpp"
#include "hyrrt/hybrid_time.hpp"

namespace hyrrt {

enum class TreeDirection { kForward, kBackward };

inline const char* to_string(TreeDirection d) { return d == TreeDirection::kForward ? "forward" : "backward"; }

/// Directed forest of state-labeled vertices and solution-pair-labeled edges.
template <int N, int M>
class SearchTree {
 public:
  using State = Vector<N>;
  using Pair = SolutionPair<N, M>;

  struct Vertex {
    int id = 0;
    State state;
    int parent = -1;   ///< -1 for roots
    int in_edge = -1;  ///< index into edges(), -1 for roots
  };

  struct Edge {
    int from = 0;
    int to = 0;
    Pair pair;
  };

  explicit SearchTree(TreeDirection direction = TreeDirection::kForward) : direction_(direction) {}

  TreeDirection direction() const { return direction_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& root_ids() const { return roots_; }
  const Vertex& vertex(int id) const { return vertices_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }

  int add_root(const State& x) {
    const int id = static_cast<int>(vertices_.size());
    vertices_.push_back({id, x, -1, -1});
    roots_.push_back(id);
    return id;
  }

  /// Adds the endpoint of `pair` as a child of `from`; the pair must start at the parent's state.
  int add_child(int from, Pair pair) {
    const auto& parent = vertex(from);
    if (pair.start_state() != parent.state) {
      throw Error(ErrorCode::kInvalidDomain, "edge does not start at its parent vertex");
    }
    const int id = static_cast<int>(vertices_.size());
    const int e = static_cast<int>(edges_.size());
    State end = pair.end_state();
    edges_.push_back({from, id, std::move(pair)});
    vertices_.push_back({id, std::move(end), from, e});
    return id;
  }

  /// Vertex ids from the root down to `id`.
  std::vector<int> path_to(int id) const {
    std::vector<int> path;
    for (int v = id; v >= 0; v = vertex(v).parent) path.push_back(v);
    return {path.rbegin(), path.rend()};
  }

  /// Edge of the path entering vertex path[i] (i >= 1).
  const Edge& edge_into(int id) const { return edges_.at(static_cast<std::size_t>(vertex(id).in_edge)); }

  /// Concatenation of the edge pairs along the path to `id`; a root yields the point pair at its state.
  Pair path_pair(int id, const Vector<M>& root_input = Vector<M>::Zero()) const {
    const auto path = path_to(id);
    Pair out = Pair::point(vertex(path.front()).state, root_input);
    for (std::size_t i = 1; i < path.size(); ++i) {
      const auto& e = edge_into(path[i]);
      out = i == 1 ? e.pair : concatenate(out, e.pair);
    }
    return out;
  }

 private:
  TreeDirection direction_;
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<int> roots_;
};

/// Closest vertex to x among those satisfying `constraint` (all when empty); ties go to the lowest id.
template <int N, int M>
std::optional<int> nearest_neighbor(const Vector<N>& x, const SearchTree<N, M>& tree,
                                    const std::type_identity_t<std::function<bool(const Vector<N>&)>>& constraint = {}) {
  std::optional<int> best;
  double best_d = 0.0;
  for (const auto& v : tree.vertices()) {
    if (constraint && !constraint(v.state)) continue;
    const double d = (v.state - x).squaredNorm();
    if (!best || d < best_d) {
      best = v.id;
      best_d = d;
    }
  }
  return best;
}

}  // namespace hyrrt
