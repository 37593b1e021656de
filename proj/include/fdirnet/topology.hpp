#pragma once

// Sensing/communication hypergraph: agents are vertices, each hyperedge is one
// measurement tagged with its model kind.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace fdirnet {

enum class MeasurementKind { Displacement, Distance, Bearing, TDoA, SubtendedAngle };

// Required hyperedge cardinality: 2, 2, 2, 3, 3.
std::size_t arity(MeasurementKind kind) noexcept;
// Output dimension m_l in ambient dimension d: d, 1, d, 1, 1.
std::size_t output_dim(MeasurementKind kind, std::size_t dim) noexcept;

std::string_view to_string(MeasurementKind kind) noexcept;
std::optional<MeasurementKind> parse_kind(std::string_view name) noexcept;

struct Hyperedge {
  MeasurementKind kind;
  std::vector<std::size_t> members;  // ordered roles (i, j[, k])
};

class Hypergraph {
 public:
  Hypergraph() = default;
  // Throws InvalidArgument on an empty edge, an out-of-range member or a
  // repeated member within one edge.
  Hypergraph(std::size_t vertex_count, std::vector<Hyperedge> edges);

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Hyperedge>& edges() const noexcept { return edges_; }
  const Hyperedge& edge(std::size_t l) const { return edges_.at(l); }

 private:
  std::size_t vertex_count_ = 0;
  std::vector<Hyperedge> edges_;
};

struct NeighborTables {
  std::vector<std::vector<std::size_t>> neighbors;  // N_i, ascending
  std::vector<std::vector<std::size_t>> incident;   // E_i, ascending
};

NeighborTables build_tables(const Hypergraph& g);

struct Connectivity {
  bool connected = true;
  std::vector<std::vector<std::size_t>> components;  // each ascending, ordered by smallest vertex
};

// Connectivity of the simple graph in which two vertices are adjacent iff
// they share a hyperedge.
Connectivity validate_connectivity(const Hypergraph& g);

}  // namespace fdirnet
