#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "recallm/extract.hpp"
#include "recallm/types.hpp"

namespace recallm {

struct ConceptNode {
  std::string label;
  std::string context;
  Timestep temporal_index = 0;
  std::uint64_t merge_count = 1;
  std::uint64_t revisions_done = 0;

  bool operator==(const ConceptNode&) const = default;
};

// Undirected relation between two concepts. strength is the Hebbian counter:
// one per knowledge update that observed the adjacency.
struct Relation {
  EdgeKey endpoints;
  std::uint64_t strength = 1;
  Timestep temporal_index = 0;

  bool operator==(const Relation&) const = default;
};

struct MergeReport {
  std::size_t nodes_created = 0;
  std::size_t nodes_merged = 0;
  std::size_t edges_created = 0;
  std::size_t edges_strengthened = 0;

  bool operator==(const MergeReport&) const = default;
};

// s(r) + alpha * t(r)
inline double relation_score(const Relation& r, double alpha) {
  return static_cast<double>(r.strength) + alpha * static_cast<double>(r.temporal_index);
}

struct NeighborQuery {
  unsigned max_distance = 2;
  std::optional<Timestep> window = 3;  // nullopt: unlimited
  double alpha = 3.0;                  // only used to pick the scoring relation
};

// A concept reached from an essential concept. relation is the edge incident
// to node on a shortest qualifying path. Pointers stay valid until the store
// is next modified.
struct Neighbor {
  const ConceptNode* node = nullptr;
  const Relation* relation = nullptr;
  unsigned distance = 0;
};

// The concept graph with its global temporal counter.
//
// Not internally synchronized: callers serialize writers and may share a
// const store between any number of readers.
class GraphStore {
 public:
  static constexpr int kSnapshotVersion = 1;

  using NodeMap = std::map<std::string, ConceptNode, std::less<>>;
  using EdgeMap = std::map<EdgeKey, Relation>;

  Timestep counter() const noexcept { return counter_; }
  // t <- t + 1; returns the new value.
  Timestep advance() noexcept { return ++counter_; }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const NodeMap& nodes() const noexcept { return nodes_; }
  const EdgeMap& edges() const noexcept { return edges_; }

  const ConceptNode* find(std::string_view label) const;
  const Relation* find_edge(const std::string& x, const std::string& y) const;

  // Merges a batch at the current counter value. Every touched node and edge
  // gets temporal_index = counter(). Throws InvalidBatchError, leaving the
  // store unchanged, if a relation endpoint is not a batch concept.
  MergeReport merge_batch(const ConceptBatch& batch);

  // Replaces a node's context with its revision and bumps revisions_done.
  void apply_revision(std::string_view label, std::string context);

  // All concepts within max_distance hops of essential, where every hop into
  // a node N uses an edge E with T(N) - window <= T(E) <= T(essential).
  // Results are ordered by label. Unknown essential gives an empty result.
  std::vector<Neighbor> neighbors(std::string_view essential, const NeighborQuery& query) const;

  // Versioned JSON document with sorted keys; equal stores give equal bytes.
  std::string snapshot() const;
  static GraphStore load(std::string_view document);

  bool operator==(const GraphStore& other) const {
    return counter_ == other.counter_ && nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  void link(const EdgeKey& key);

  NodeMap nodes_;
  EdgeMap edges_;
  std::map<std::string, std::set<std::string>, std::less<>> adjacency_;
  Timestep counter_ = 0;
};

}  // namespace recallm
