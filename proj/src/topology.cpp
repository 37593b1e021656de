#include "fdirnet/topology.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "fdirnet/errors.hpp"

namespace fdirnet {

std::size_t arity(MeasurementKind kind) noexcept {
  switch (kind) {
    case MeasurementKind::TDoA:
    case MeasurementKind::SubtendedAngle:
      return 3;
    default:
      return 2;
  }
}

std::size_t output_dim(MeasurementKind kind, std::size_t dim) noexcept {
  switch (kind) {
    case MeasurementKind::Displacement:
    case MeasurementKind::Bearing:
      return dim;
    default:
      return 1;
  }
}

std::string_view to_string(MeasurementKind kind) noexcept {
  switch (kind) {
    case MeasurementKind::Displacement: return "displacement";
    case MeasurementKind::Distance: return "distance";
    case MeasurementKind::Bearing: return "bearing";
    case MeasurementKind::TDoA: return "tdoa";
    case MeasurementKind::SubtendedAngle: return "subtended_angle";
  }
  return "unknown";
}

std::optional<MeasurementKind> parse_kind(std::string_view name) noexcept {
  for (auto k : {MeasurementKind::Displacement, MeasurementKind::Distance,
                 MeasurementKind::Bearing, MeasurementKind::TDoA,
                 MeasurementKind::SubtendedAngle}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Hypergraph::Hypergraph(std::size_t vertex_count, std::vector<Hyperedge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  for (std::size_t l = 0; l < edges_.size(); ++l) {
    const auto& m = edges_[l].members;
    if (m.empty()) throw InvalidArgument("hyperedge " + std::to_string(l) + " is empty");
    for (std::size_t a = 0; a < m.size(); ++a) {
      if (m[a] >= vertex_count_) {
        throw InvalidArgument("hyperedge " + std::to_string(l) + " references vertex " +
                              std::to_string(m[a]) + " outside [0, " +
                              std::to_string(vertex_count_) + ")");
      }
      for (std::size_t b = 0; b < a; ++b) {
        if (m[a] == m[b]) {
          throw InvalidArgument("hyperedge " + std::to_string(l) + " repeats vertex " +
                                std::to_string(m[a]));
        }
      }
    }
  }
}

NeighborTables build_tables(const Hypergraph& g) {
  const std::size_t n = g.vertex_count();
  NeighborTables t;
  t.neighbors.resize(n);
  t.incident.resize(n);
  for (std::size_t l = 0; l < g.edge_count(); ++l) {
    const auto& m = g.edge(l).members;
    for (std::size_t i : m) {
      if (i >= n) throw InvalidArgument("build_tables: vertex out of range");
      t.incident[i].push_back(l);
      for (std::size_t j : m) {
        if (j != i) t.neighbors[i].push_back(j);
      }
    }
  }
  for (auto& nb : t.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return t;
}

Connectivity validate_connectivity(const Hypergraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges()) {
    for (std::size_t a = 1; a < e.members.size(); ++a) {
      std::size_t r0 = find(e.members[0]);
      std::size_t r1 = find(e.members[a]);
      if (r0 != r1) parent[std::max(r0, r1)] = std::min(r0, r1);
    }
  }
  Connectivity c;
  std::vector<std::size_t> slot(n, static_cast<std::size_t>(-1));
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t r = find(v);
    if (slot[r] == static_cast<std::size_t>(-1)) {
      slot[r] = c.components.size();
      c.components.emplace_back();
    }
    c.components[slot[r]].push_back(v);
  }
  c.connected = c.components.size() <= 1;
  return c;
}

}  // namespace fdirnet
