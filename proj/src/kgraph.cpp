#include "recallm/kgraph.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include <json.hpp>

#include "recallm/error.hpp"

namespace recallm {
namespace {

using nlohmann::json;

bool window_admits(Timestep node_t, Timestep edge_t, const std::optional<Timestep>& window) {
  if (!window) return true;
  if (*window > std::numeric_limits<Timestep>::max() - edge_t) return true;
  return node_t <= edge_t + *window;
}

// Prefers the higher score, then the more recent edge, then the edge whose
// far endpoint sorts first.
bool better_relation(const Relation& lhs, const Relation& rhs, const std::string& node, double alpha) {
  double ls = relation_score(lhs, alpha);
  double rs = relation_score(rhs, alpha);
  if (ls != rs) return ls > rs;
  if (lhs.temporal_index != rhs.temporal_index) return lhs.temporal_index > rhs.temporal_index;
  return lhs.endpoints.other(node) < rhs.endpoints.other(node);
}

bool valid_label(const std::string& label) {
  if (label.empty()) return false;
  return std::none_of(label.begin(), label.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isspace(u) || (u < 0x80 && std::isupper(u));
  });
}

}  // namespace

const ConceptNode* GraphStore::find(std::string_view label) const {
  auto it = nodes_.find(label);
  return it == nodes_.end() ? nullptr : &it->second;
}

const Relation* GraphStore::find_edge(const std::string& x, const std::string& y) const {
  if (x == y) return nullptr;
  auto it = edges_.find(EdgeKey::make(x, y));
  return it == edges_.end() ? nullptr : &it->second;
}

void GraphStore::link(const EdgeKey& key) {
  adjacency_[key.a].insert(key.b);
  adjacency_[key.b].insert(key.a);
}

MergeReport GraphStore::merge_batch(const ConceptBatch& batch) {
  for (const auto& rel : batch.relations) {
    if (!batch.concepts.count(rel.a) || !batch.concepts.count(rel.b)) {
      throw InvalidBatchError("relation (" + rel.a + ", " + rel.b +
                              ") references a concept missing from the batch");
    }
  }

  MergeReport report;
  for (const auto& [label, entry] : batch.concepts) {
    auto it = nodes_.find(label);
    if (it == nodes_.end()) {
      nodes_.emplace(label, ConceptNode{label, entry.context, counter_, 1, 0});
      ++report.nodes_created;
      continue;
    }
    ConceptNode& node = it->second;
    if (!entry.context.empty()) {
      if (!node.context.empty()) node.context.push_back(' ');
      node.context += entry.context;
    }
    ++node.merge_count;
    node.temporal_index = counter_;
    ++report.nodes_merged;
  }

  for (const auto& key : batch.relations) {
    auto [it, inserted] = edges_.try_emplace(key, Relation{key, 1, counter_});
    if (inserted) {
      link(key);
      ++report.edges_created;
    } else {
      ++it->second.strength;
      it->second.temporal_index = counter_;
      ++report.edges_strengthened;
    }
  }
  return report;
}

void GraphStore::apply_revision(std::string_view label, std::string context) {
  auto it = nodes_.find(label);
  if (it == nodes_.end()) throw ArgumentError("no concept '" + std::string(label) + "'");
  it->second.context = std::move(context);
  ++it->second.revisions_done;
}

std::vector<Neighbor> GraphStore::neighbors(std::string_view essential, const NeighborQuery& query) const {
  if (query.max_distance < 1) throw ArgumentError("max_distance must be at least 1");
  const ConceptNode* root = find(essential);
  if (!root) return {};
  const Timestep root_t = root->temporal_index;

  std::map<std::string, unsigned, std::less<>> visited{{root->label, 0}};
  std::vector<std::string> frontier{root->label};
  std::vector<Neighbor> out;

  for (unsigned distance = 1; distance <= query.max_distance && !frontier.empty(); ++distance) {
    std::map<std::string, const Relation*> reached;
    for (const auto& from : frontier) {
      auto adj = adjacency_.find(from);
      if (adj == adjacency_.end()) continue;
      for (const auto& to : adj->second) {
        if (visited.count(to)) continue;
        const Relation& rel = edges_.at(EdgeKey::make(from, to));
        const ConceptNode& node = nodes_.find(to)->second;
        if (rel.temporal_index > root_t) continue;
        if (!window_admits(node.temporal_index, rel.temporal_index, query.window)) continue;
        auto [slot, fresh] = reached.try_emplace(to, &rel);
        if (!fresh && better_relation(rel, *slot->second, to, query.alpha)) slot->second = &rel;
      }
    }
    frontier.clear();
    for (const auto& [label, rel] : reached) {
      visited.emplace(label, distance);
      frontier.push_back(label);
      out.push_back(Neighbor{&nodes_.find(label)->second, rel, distance});
    }
  }

  std::sort(out.begin(), out.end(),
            [](const Neighbor& x, const Neighbor& y) { return x.node->label < y.node->label; });
  return out;
}

std::string GraphStore::snapshot() const {
  json nodes = json::object();
  for (const auto& [label, node] : nodes_) {
    nodes[label] = {{"context", node.context},
                    {"merge_count", node.merge_count},
                    {"revisions_done", node.revisions_done},
                    {"t", node.temporal_index}};
  }
  json edges = json::array();
  for (const auto& [key, rel] : edges_) {
    edges.push_back({{"a", key.a}, {"b", key.b}, {"strength", rel.strength}, {"t", rel.temporal_index}});
  }
  json doc = {{"version", kSnapshotVersion}, {"counter", counter_}, {"nodes", nodes}, {"edges", edges}};
  return doc.dump(1, ' ', false, json::error_handler_t::replace) + "\n";
}

GraphStore GraphStore::load(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("graph snapshot: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ParseError("graph snapshot: top level is not an object", 0);
  auto version = doc.find("version");
  if (version == doc.end() || !version->is_number_integer()) {
    throw VersionError("graph snapshot: missing integer version");
  }
  if (version->get<int>() != kSnapshotVersion) {
    throw VersionError("graph snapshot: unsupported version " + std::to_string(version->get<int>()) +
                       " (expected " + std::to_string(kSnapshotVersion) + ")");
  }

  GraphStore store;
  try {
    store.counter_ = doc.at("counter").get<Timestep>();
    for (const auto& [label, value] : doc.at("nodes").items()) {
      if (!valid_label(label)) throw Error("graph snapshot: invalid label '" + label + "'");
      ConceptNode node{label, value.at("context").get<std::string>(), value.at("t").get<Timestep>(),
                       value.at("merge_count").get<std::uint64_t>(),
                       value.at("revisions_done").get<std::uint64_t>()};
      if (node.merge_count < 1) throw Error("graph snapshot: merge_count < 1 on '" + label + "'");
      if (node.temporal_index > store.counter_) {
        throw Error("graph snapshot: node '" + label + "' is newer than the counter");
      }
      store.nodes_.emplace(label, std::move(node));
    }
    for (const auto& value : doc.at("edges")) {
      auto a = value.at("a").get<std::string>();
      auto b = value.at("b").get<std::string>();
      if (a == b) throw Error("graph snapshot: self-relation on '" + a + "'");
      if (!store.nodes_.count(a) || !store.nodes_.count(b)) {
        throw Error("graph snapshot: edge (" + a + ", " + b + ") has a missing endpoint");
      }
      auto key = EdgeKey::make(a, b);
      Relation rel{key, value.at("strength").get<std::uint64_t>(), value.at("t").get<Timestep>()};
      if (rel.strength < 1) throw Error("graph snapshot: strength < 1 on (" + a + ", " + b + ")");
      if (rel.temporal_index > store.counter_) {
        throw Error("graph snapshot: edge (" + a + ", " + b + ") is newer than the counter");
      }
      if (!store.edges_.emplace(key, rel).second) {
        throw Error("graph snapshot: duplicate edge (" + a + ", " + b + ")");
      }
      store.link(key);
    }
  } catch (const json::exception& e) {
    throw Error(std::string("graph snapshot: ") + e.what());
  }
  return store;
}

}  // namespace recallm
