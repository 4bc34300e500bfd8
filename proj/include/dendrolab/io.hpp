#pragma once

#include <json.hpp>

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "dendrolab/back_and_forth.hpp"
#include "dendrolab/builder.hpp"
#include "dendrolab/chain.hpp"
#include "dendrolab/nerve.hpp"

namespace dendrolab::io {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what)
{
  throw FormatError((where.empty() ? std::string("/") : where) + ": " + what);
}

inline const Json& field(const Json& j, const char* key, const std::string& where)
{
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

inline const Json& array(const Json& j, const std::string& where)
{
  if (!j.is_array()) fail(where, "expected an array");
  return j;
}

inline std::size_t index(const Json& j, const std::string& where)
{
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    fail(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

inline Rational rational(const Json& j, const std::string& where)
{
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (!j.is_string()) fail(where, "expected a rational string \"num/den\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const FormatError& e) {
    fail(where, e.what());
  }
}

inline std::string at(const std::string& where, const std::string& key) { return where + "/" + key; }
inline std::string at(const std::string& where, std::size_t i) { return where + "/" + std::to_string(i); }

/// Turns a constructor precondition into a format error at `where`.
template <class F>
auto guarded(const std::string& where, F&& make)
{
  try {
    return make();
  } catch (const PreconditionError& e) {
    fail(where, e.what());
  }
}

} // namespace detail

inline Json parse(const std::string& text, const std::string& source = "input")
{
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(source + ": " + e.what());
  }
}

inline Json read_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw FormatError(path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::string& path, const Json& j)
{
  std::ofstream out(path);
  if (!out) throw PreconditionError(path + ": cannot write");
  out << dump(j);
}

// Rationals and orders

inline Json to_json(const Rational& q) { return format_rational(q); }

inline Json to_json(Order m)
{
  if (m.is_omega()) return "omega";
  return m.value();
}

inline Order order_from_json(const Json& j, const std::string& where)
{
  if (j.is_string() && j.get<std::string>() == "omega") return Order::omega();
  if (!j.is_number_integer() || j.get<long long>() < 1) detail::fail(where, "expected an order >= 1 or \"omega\"");
  return Order(j.get<int>());
}

// Dendrite

inline Json to_json(const Dendrite& w)
{
  Json nodes = Json::array();
  for (NodeId v = 0; v < w.node_count(); ++v) nodes.push_back({{"id", v}, {"order", to_json(w.order(v))}});
  Json edges = Json::array();
  for (const auto& e : w.edges()) edges.push_back({e.u, e.v, to_json(e.length)});
  Json out{{"nodes", nodes}, {"edges", edges}};
  if (w.depth_tag()) out["depth"] = *w.depth_tag();
  return out;
}

inline Dendrite dendrite_from_json(const Json& j, const std::string& where = "")
{
  using namespace detail;
  const Json& nodes = array(field(j, "nodes", where), at(where, "nodes"));
  std::vector<Order> orders(nodes.size());
  std::vector<char> seen(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string here = at(at(where, "nodes"), i);
    std::size_t id = index(field(nodes[i], "id", here), at(here, "id"));
    if (id >= nodes.size() || seen[id]) fail(at(here, "id"), "ids must be 0..n-1 without repeats");
    seen[id] = 1;
    orders[id] = order_from_json(field(nodes[i], "order", here), at(here, "order"));
  }
  const Json& edges = array(field(j, "edges", where), at(where, "edges"));
  std::vector<Dendrite::Edge> list;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::string here = at(at(where, "edges"), i);
    if (!edges[i].is_array() || edges[i].size() != 3) fail(here, "expected [u, v, \"num/den\"]");
    list.push_back({index(edges[i][0], at(here, 0)), index(edges[i][1], at(here, 1)), rational(edges[i][2], at(here, 2))});
  }
  std::optional<int> depth;
  if (j.contains("depth")) depth = static_cast<int>(index(j["depth"], at(where, "depth")));
  return guarded(where, [&] { return Dendrite(std::move(orders), std::move(list), depth); });
}

/// Reads the same node/edge layout without tree or order requirements.
inline MetricGraph graph_from_json(const Json& j, const std::string& where = "")
{
  using namespace detail;
  const Json& nodes = array(field(j, "nodes", where), at(where, "nodes"));
  const Json& edges = array(field(j, "edges", where), at(where, "edges"));
  std::vector<MetricGraph::Edge> list;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::string here = at(at(where, "edges"), i);
    if (!edges[i].is_array() || edges[i].size() != 3) fail(here, "expected [u, v, \"num/den\"]");
    list.push_back({index(edges[i][0], at(here, 0)), index(edges[i][1], at(here, 1)), rational(edges[i][2], at(here, 2))});
  }
  return guarded(where, [&] { return MetricGraph(nodes.size(), std::move(list)); });
}

inline Json to_json(const MetricGraph& g)
{
  Json nodes = Json::array();
  for (NodeId v = 0; v < g.node_count(); ++v) nodes.push_back({{"id", v}});
  Json edges = Json::array();
  for (EdgeId e = 0; e < g.edge_count(); ++e) edges.push_back({g.edge(e).u, g.edge(e).v, to_json(g.edge(e).length)});
  return {{"nodes", nodes}, {"edges", edges}};
}

// Points and subdendrites

inline Json to_json(const Point& p)
{
  if (p.is_node()) return p.node_id();
  return {{"edge", {p.u(), p.v()}}, {"t", to_json(p.t())}};
}

inline Point point_from_json(const Json& j, const Dendrite& w, const std::string& where)
{
  using namespace detail;
  Point p;
  if (j.is_number()) {
    p = Point::node(index(j, where));
  } else {
    const Json& e = field(j, "edge", where);
    if (!e.is_array() || e.size() != 2) fail(at(where, "edge"), "expected [u, v]");
    NodeId a = index(e[0], at(at(where, "edge"), 0)), b = index(e[1], at(at(where, "edge"), 1));
    Rational t = rational(field(j, "t", where), at(where, "t"));
    p = guarded(where, [&] { return Point::on_edge(a, b, t); });
  }
  guarded(where, [&] {
    w.check_point(p);
    return 0;
  });
  return p;
}

inline Json points_json(const std::vector<Point>& pts)
{
  Json out = Json::array();
  for (const auto& p : pts) out.push_back(to_json(p));
  return out;
}

inline Json to_json(const Subdendrite& k) { return {{"extremes", points_json(k.extremes())}}; }

inline Subdendrite subdendrite_from_json(const Json& j, const Subdendrite::Space& w, const std::string& where = "")
{
  using namespace detail;
  const bool bare = j.is_array();
  const std::string base = bare ? where : at(where, "extremes");
  const Json& list = bare ? j : array(field(j, "extremes", where), base);
  if (list.empty()) fail(base, "a subdendrite needs at least one point");
  std::vector<Point> pts;
  for (std::size_t i = 0; i < list.size(); ++i) pts.push_back(point_from_json(list[i], *w, at(base, i)));
  return guarded(where, [&] { return Subdendrite(w, std::span<const Point>(pts)); });
}

// Chains

inline Json to_json(const Chain& c)
{
  Json elements = Json::array();
  for (const auto& k : c.elements()) elements.push_back(points_json(k.extremes()));
  return {{"space", to_json(c.ambient())}, {"elements", elements}, {"mesh", to_json(c.mesh())}};
}

inline Chain chain_from_json(const Json& j, const std::string& where = "")
{
  using namespace detail;
  auto w = std::make_shared<const Dendrite>(dendrite_from_json(field(j, "space", where), at(where, "space")));
  const Json& list = array(field(j, "elements", where), at(where, "elements"));
  std::vector<Subdendrite> elements;
  for (std::size_t i = 0; i < list.size(); ++i) elements.push_back(subdendrite_from_json(list[i], w, at(at(where, "elements"), i)));
  Chain c = guarded(where, [&] { return Chain(w, std::move(elements)); });
  if (j.contains("mesh") && rational(j["mesh"], at(where, "mesh")) != c.mesh())
    fail(at(where, "mesh"), "does not match the elements (" + format_rational(c.mesh()) + ")");
  return c;
}

// Builder inputs

inline Json to_json(const RefinementSchedule& s)
{
  Json orders = Json::array();
  for (Order m : s.orders) orders.push_back(to_json(m));
  return {{"orders", orders}, {"count", s.count}, {"ratio", to_json(s.ratio)}, {"depth", s.depth}};
}

inline RefinementSchedule schedule_from_json(const Json& j, const std::string& where = "")
{
  using namespace detail;
  RefinementSchedule s;
  const Json& orders = array(field(j, "orders", where), at(where, "orders"));
  for (std::size_t i = 0; i < orders.size(); ++i) s.orders.push_back(order_from_json(orders[i], at(at(where, "orders"), i)));
  if (j.contains("count")) s.count = static_cast<int>(index(j["count"], at(where, "count")));
  if (j.contains("ratio")) s.ratio = rational(j["ratio"], at(where, "ratio"));
  s.depth = static_cast<int>(index(field(j, "depth", where), at(where, "depth")));
  guarded(where, [&] {
    s.validate();
    return 0;
  });
  return s;
}

inline BondingFunction bonding_from_json(const Json& j, const std::string& where = "")
{
  using namespace detail;
  const bool bare = j.is_array();
  const std::string base = bare ? where : at(where, "pairs");
  const Json& list = bare ? j : array(field(j, "pairs", where), base);
  BondingFunction f;
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::string here = at(base, i);
    if (!list[i].is_array() || list[i].size() != 2) fail(here, "expected [a, b]");
    f.pairs.emplace_back(rational(list[i][0], at(here, 0)), rational(list[i][1], at(here, 1)));
  }
  guarded(where, [&] {
    f.validate();
    return 0;
  });
  return f;
}

inline Json to_json(const BondingFunction& f)
{
  Json pairs = Json::array();
  for (const auto& [a, b] : f.pairs) pairs.push_back({to_json(a), to_json(b)});
  return {{"pairs", pairs}};
}

// Reports

inline Json to_json(const GenericReport& r)
{
  Json out{{"passes", r.passes()},
           {"root_is_endpoint", r.root_is_endpoint},
           {"nowhere_dense_steps", r.nowhere_dense_steps},
           {"branch_endpoints_ok", r.branch_endpoints_ok},
           {"willful", r.willful}};
  out["dense_failure"] = r.dense_failure ? Json(*r.dense_failure) : Json(nullptr);
  out["endpoint_failure"] = r.endpoint_failure ? Json(*r.endpoint_failure) : Json(nullptr);
  if (r.willful_witness)
    out["willful_witness"] = {{"from", to_json(r.willful_witness->from)},
                              {"to", to_json(r.willful_witness->to)},
                              {"i", r.willful_witness->i},
                              {"j", r.willful_witness->j}};
  return out;
}

inline Json to_json(const PartialIso& iso)
{
  Json pairs = Json::array();
  for (const auto& [s, t] : iso.pairs) pairs.push_back({s, t});
  return {{"context", iso.context == IsoContext::Subcontinua ? "subcontinua" : "chains"},
          {"source_base", to_json(iso.source_base)},
          {"target_base", to_json(iso.target_base)},
          {"pairs", pairs}};
}

inline Json to_json(const ExtensionReport& r)
{
  Json defects = Json::array();
  for (const auto& d : r.defects)
    defects.push_back({{"source", d.source_index}, {"target", d.target_index}, {"defect", to_json(d.defect)}});
  return {{"tree_edges", r.tree_edges}, {"defects", defects}, {"max_defect", to_json(r.max_defect)}};
}

inline Json to_json(const NerveGraph& n)
{
  Json edges = Json::array();
  for (const auto& [a, b] : n.edges) edges.push_back({a, b});
  return {{"vertices", n.vertices}, {"edges", edges}};
}

inline Json to_json(const GraphPoint& p)
{
  if (p.is_node()) return p.node;
  return {{"edge", p.edge}, {"s", to_json(p.s)}};
}

inline Json to_json(const Cover& c)
{
  Json opens = Json::array();
  for (const auto& b : c.opens) opens.push_back({{"center", to_json(b.center)}, {"radius", to_json(b.radius)}});
  return opens;
}

// DOT

/// Dendrite as an undirected DOT graph; nodes and edges touched by the i-th
/// subdendrite get the i-th colour, partly covered edges are dashed.
inline std::string to_dot(const Dendrite& w, const std::vector<Subdendrite>& highlight = {})
{
  static const char* kColors[] = {"red", "blue", "green4", "orange", "purple", "brown"};
  auto colour = [](std::size_t i) { return std::string(kColors[i % std::size(kColors)]); };
  std::ostringstream out;
  out << "graph dendrite {\n  node [shape=circle, fontsize=10];\n";
  for (NodeId v = 0; v < w.node_count(); ++v) {
    out << "  n" << v << " [label=\"" << v << "\\n" << w.order(v).str() << "\"";
    std::string cs;
    for (std::size_t i = 0; i < highlight.size(); ++i)
      if (highlight[i].region().has_node(v)) cs += (cs.empty() ? "" : ":") + colour(i);
    if (!cs.empty()) out << ", color=\"" << cs << "\", style=bold";
    out << "];\n";
  }
  for (EdgeId e = 0; e < w.edge_count(); ++e) {
    const auto& ed = w.edge(e);
    out << "  n" << ed.u << " -- n" << ed.v << " [label=\"" << format_rational(ed.length) << "\"";
    std::string cs;
    bool partial = false;
    for (std::size_t i = 0; i < highlight.size(); ++i)
      if (const auto& iv = highlight[i].region().interval(e)) {
        cs += (cs.empty() ? "" : ":") + colour(i);
        partial = partial || iv->lo != 0 || iv->hi != 1;
      }
    if (!cs.empty()) out << ", color=\"" << cs << "\", penwidth=2" << (partial ? ", style=dashed" : "");
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

inline std::string to_dot(const NerveGraph& n, const std::string& name = "nerve")
{
  std::ostringstream out;
  out << "graph " << name << " {\n";
  for (std::size_t v = 0; v < n.vertices; ++v) out << "  u" << v << ";\n";
  for (const auto& [a, b] : n.edges) out << "  u" << a << " -- u" << b << ";\n";
  out << "}\n";
  return out.str();
}

} // namespace dendrolab::io
