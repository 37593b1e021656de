#include "fdirnet/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fdirnet/errors.hpp"

namespace fdirnet {

using nlohmann::json;

Hypergraph Scenario::graph() const {
  std::vector<Hyperedge> e;
  e.reserve(edges.size());
  for (const auto& x : edges) e.push_back({x.kind, x.members});
  return Hypergraph(agents.size(), std::move(e));
}

MeasurementStack Scenario::stack() const { return MeasurementStack(graph(), dimension); }

BlockVec Scenario::true_states() const {
  BlockVec p(BlockStructure::uniform(agents.size(), dimension));
  for (const auto& a : agents) p.block(a.id) = a.true_state;
  return p;
}

BlockVec Scenario::reported_states() const {
  BlockVec p(BlockStructure::uniform(agents.size(), dimension));
  for (const auto& a : agents) p.block(a.id) = a.reported_state;
  return p;
}

BlockVec Scenario::measurements() const {
  BlockVec y = eval_stack(stack(), true_states());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t l = 0; l < edges.size(); ++l) {
    if (edges[l].sigma <= 0.0) continue;
    auto blk = y.block(l);
    for (Eigen::Index k = 0; k < blk.size(); ++k) blk(k) += edges[l].sigma * gauss(rng);
  }
  return y;
}

FdirProblem Scenario::problem() const {
  return FdirProblem{stack(), reported_states(), measurements()};
}

bool operator==(const Scenario& a, const Scenario& b) {
  if (a.description != b.description || a.dimension != b.dimension || a.seed != b.seed ||
      a.agents.size() != b.agents.size() || a.edges.size() != b.edges.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.agents.size(); ++i) {
    const auto& x = a.agents[i];
    const auto& y = b.agents[i];
    if (x.id != y.id || x.true_state != y.true_state || x.reported_state != y.reported_state) {
      return false;
    }
  }
  for (std::size_t l = 0; l < a.edges.size(); ++l) {
    const auto& x = a.edges[l];
    const auto& y = b.edges[l];
    if (x.kind != y.kind || x.members != y.members || x.sigma != y.sigma) return false;
  }
  const auto& ai = a.inner;
  const auto& bi = b.inner;
  const auto& ao = a.outer;
  const auto& bo = b.outer;
  return ai.rho == bi.rho && ai.max_inner_iters == bi.max_inner_iters &&
         ai.tol_primal == bi.tol_primal && ai.tol_dual == bi.tol_dual &&
         ao.max_scp_iters == bo.max_scp_iters && ao.tol_step == bo.tol_step &&
         ao.tol_meas == bo.tol_meas && ao.fault_tol == bo.fault_tol;
}

namespace {

struct Reader {
  std::string origin;

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ScenarioError(origin + ":" + path, what);
  }

  const json& field(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.contains(key)) fail(path + "." + key, "missing required field");
    return obj.at(key);
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  double positive(const json& v, const std::string& path) const {
    const double x = number(v, path);
    if (!(x > 0.0)) fail(path, "must be positive");
    return x;
  }

  std::size_t count(const json& v, const std::string& path) const {
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(path, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  Eigen::VectorXd vec(const json& v, std::size_t dim, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array");
    if (v.size() != dim) {
      fail(path, "expected " + std::to_string(dim) + " entries, got " + std::to_string(v.size()));
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
      out(static_cast<Eigen::Index>(k)) = number(v[k], path + "[" + std::to_string(k) + "]");
    }
    return out;
  }
};

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  Reader rd{origin};
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    rd.fail("$", std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) rd.fail("$", "expected an object");

  Scenario s;
  if (doc.contains("description")) {
    if (!doc["description"].is_string()) rd.fail("$.description", "expected a string");
    s.description = doc["description"].get<std::string>();
  }
  s.dimension = rd.count(rd.field(doc, "dimension", "$"), "$.dimension");
  if (s.dimension == 0) rd.fail("$.dimension", "must be positive");
  if (doc.contains("seed")) {
    const json& v = doc["seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      rd.fail("$.seed", "expected a non-negative integer");
    }
    s.seed = v.get<std::uint64_t>();
  }

  const json& agents = rd.field(doc, "agents", "$");
  if (!agents.is_array()) rd.fail("$.agents", "expected an array");
  std::vector<char> seen(agents.size(), 0);
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const std::string path = "$.agents[" + std::to_string(k) + "]";
    const json& a = agents[k];
    if (!a.is_object()) rd.fail(path, "expected an object");
    ScenarioAgent ag;
    ag.id = rd.count(rd.field(a, "id", path), path + ".id");
    if (ag.id >= agents.size()) {
      rd.fail(path + ".id", "ids must be 0.." + std::to_string(agents.size() - 1));
    }
    if (seen[ag.id]) rd.fail(path + ".id", "duplicate id " + std::to_string(ag.id));
    seen[ag.id] = 1;
    ag.true_state = rd.vec(rd.field(a, "true_state", path), s.dimension, path + ".true_state");
    ag.reported_state = a.contains("reported_state")
                            ? rd.vec(a["reported_state"], s.dimension, path + ".reported_state")
                            : ag.true_state;
    s.agents.push_back(std::move(ag));
  }
  std::sort(s.agents.begin(), s.agents.end(),
            [](const ScenarioAgent& x, const ScenarioAgent& y) { return x.id < y.id; });

  if (doc.contains("edges")) {
    const json& edges = doc["edges"];
    if (!edges.is_array()) rd.fail("$.edges", "expected an array");
    for (std::size_t l = 0; l < edges.size(); ++l) {
      const std::string path = "$.edges[" + std::to_string(l) + "]";
      const json& e = edges[l];
      if (!e.is_object()) rd.fail(path, "expected an object");
      ScenarioEdge se;
      const json& kind = rd.field(e, "kind", path);
      if (!kind.is_string()) rd.fail(path + ".kind", "expected a string");
      const auto parsed = parse_kind(kind.get<std::string>());
      if (!parsed) rd.fail(path + ".kind", "unknown measurement kind '" + kind.get<std::string>() + "'");
      se.kind = *parsed;
      const json& members = rd.field(e, "members", path);
      if (!members.is_array()) rd.fail(path + ".members", "expected an array");
      for (std::size_t m = 0; m < members.size(); ++m) {
        const std::string mp = path + ".members[" + std::to_string(m) + "]";
        const std::size_t id = rd.count(members[m], mp);
        if (id >= s.agents.size()) rd.fail(mp, "unknown agent id " + std::to_string(id));
        if (std::find(se.members.begin(), se.members.end(), id) != se.members.end()) {
          rd.fail(mp, "agent " + std::to_string(id) + " repeated");
        }
        se.members.push_back(id);
      }
      if (se.members.size() != arity(se.kind)) {
        rd.fail(path + ".members", std::string(to_string(se.kind)) + " needs " +
                                       std::to_string(arity(se.kind)) + " members");
      }
      if (e.contains("sigma")) {
        se.sigma = rd.number(e["sigma"], path + ".sigma");
        if (se.sigma < 0.0) rd.fail(path + ".sigma", "must be non-negative");
      }
      s.edges.push_back(std::move(se));
    }
  }

  if (doc.contains("solver")) {
    const json& sv = doc["solver"];
    const std::string p = "$.solver";
    if (!sv.is_object()) rd.fail(p, "expected an object");
    for (const auto& [key, value] : sv.items()) {
      const std::string kp = p + "." + key;
      if (key == "rho") s.inner.rho = rd.positive(value, kp);
      else if (key == "max_inner_iters") s.inner.max_inner_iters = rd.count(value, kp);
      else if (key == "tol_primal") s.inner.tol_primal = rd.positive(value, kp);
      else if (key == "tol_dual") s.inner.tol_dual = rd.positive(value, kp);
      else if (key == "max_scp_iters") s.outer.max_scp_iters = rd.count(value, kp);
      else if (key == "tol_step") s.outer.tol_step = rd.positive(value, kp);
      else if (key == "tol_meas") s.outer.tol_meas = rd.positive(value, kp);
      else if (key == "fault_tol") s.outer.fault_tol = rd.positive(value, kp);
      else rd.fail(kp, "unknown solver option");
    }
    if (s.inner.max_inner_iters == 0) rd.fail(p + ".max_inner_iters", "must be positive");
    if (s.outer.max_scp_iters == 0) rd.fail(p + ".max_scp_iters", "must be positive");
  }

  // Throws DomainViolation for an out-of-domain true configuration.
  eval_stack(s.stack(), s.true_states());
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string(), "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

namespace {

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
  json doc;
  if (!s.description.empty()) doc["description"] = s.description;
  doc["dimension"] = s.dimension;
  doc["seed"] = s.seed;
  doc["agents"] = json::array();
  for (const auto& a : s.agents) {
    doc["agents"].push_back(
        {{"id", a.id}, {"true_state", to_json(a.true_state)}, {"reported_state", to_json(a.reported_state)}});
  }
  doc["edges"] = json::array();
  for (const auto& e : s.edges) {
    json je{{"kind", std::string(to_string(e.kind))}, {"members", e.members}};
    if (e.sigma > 0.0) je["sigma"] = e.sigma;
    doc["edges"].push_back(std::move(je));
  }
  json sv{{"rho", s.inner.rho},
          {"max_inner_iters", s.inner.max_inner_iters},
          {"tol_primal", s.inner.tol_primal},
          {"tol_dual", s.inner.tol_dual},
          {"max_scp_iters", s.outer.max_scp_iters},
          {"tol_step", s.outer.tol_step},
          {"tol_meas", s.outer.tol_meas}};
  if (s.outer.fault_tol) sv["fault_tol"] = *s.outer.fault_tol;
  doc["solver"] = std::move(sv);
  return doc.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError(path.string(), "cannot write file");
  out << serialize_scenario(s);
}

FaultReport make_report(const Scenario& s, const ScpResult& r) {
  FaultReport rep;
  rep.identified = r.faults;
  rep.meas_residual = r.meas_residual;
  rep.outer_iters = r.outer_iters;
  rep.inner_iters = r.inner_iters;
  rep.degraded = r.degraded;
  rep.fault_tol = r.fault_tol;
  for (std::size_t i = 0; i < r.x_star.num_blocks(); ++i) {
    rep.error_blocks.emplace_back(r.x_star.block(i));
    rep.error_norms.push_back(r.x_star.block_norm(i));
  }

  for (const auto& a : s.agents) {
    const Eigen::VectorXd truth = a.true_state - a.reported_state;
    if (truth.norm() > r.fault_tol) rep.true_faults.push_back(a.id);
    rep.max_reconstruction_error =
        std::max(rep.max_reconstruction_error, (r.x_star.block(a.id) - truth).norm());
  }
  std::size_t hits = 0;
  for (std::size_t i : rep.identified) {
    if (std::binary_search(rep.true_faults.begin(), rep.true_faults.end(), i)) ++hits;
  }
  if (!rep.identified.empty()) rep.precision = double(hits) / double(rep.identified.size());
  if (!rep.true_faults.empty()) rep.recall = double(hits) / double(rep.true_faults.size());
  return rep;
}

void write_report(std::ostream& os, const FaultReport& r) {
  auto list = [&](const std::vector<std::size_t>& v) {
    os << '{';
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v[k];
    os << '}';
  };
  os << "status: " << (r.degraded ? "degraded" : "converged") << '\n';
  os << "identified faults: ";
  list(r.identified);
  os << "\nfault tolerance: " << r.fault_tol << '\n';
  os << "measurement residual: " << r.meas_residual << '\n';
  os << "outer iterations: " << r.outer_iters << "\ninner iterations: " << r.inner_iters << '\n';
  os << "\nagent  |x*|  x*\n";
  for (std::size_t i = 0; i < r.error_blocks.size(); ++i) {
    os << std::setw(5) << i << "  " << std::setw(12) << r.error_norms[i] << "  [";
    for (Eigen::Index k = 0; k < r.error_blocks[i].size(); ++k) {
      os << (k ? ", " : "") << r.error_blocks[i](k);
    }
    os << "]\n";
  }
  os << "\n-- ground-truth comparison --\n";
  os << "true faults: ";
  list(r.true_faults);
  os << "\nprecision: " << r.precision << "\nrecall: " << r.recall
     << "\nmax reconstruction error: " << r.max_reconstruction_error << '\n';
}

}  // namespace fdirnet
