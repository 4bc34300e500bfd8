#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dendrolab/dendrolab.hpp"

using namespace dendrolab;
using io::Json;

namespace {

struct Options {
  // shared
  std::string space, out;
  std::uint64_t seed = 1;
  std::string eps;
  // build
  std::string orders = "3", ratio = "1/2";
  int count = 1, depth = 2;
  // invlimit / gamma
  std::string pairs, t = "1";
  int k = 3, grid_steps = 8;
  // hausdorff / classify / homeo
  std::string a, b, k1, k2, c1, c2;
  std::size_t steps = 12;
  int auto_refine = 0;
  bool omega = false;
  // chain
  std::string chain, delta;
  // export-dot
  std::vector<std::string> highlight;
  std::string dot;
};

void emit(const Options& o, const std::string& text)
{
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw PreconditionError(o.out + ": cannot write");
  f << text;
}

void emit(const Options& o, const Json& j) { emit(o, io::dump(j)); }

std::shared_ptr<const Dendrite> load_space(const std::string& path)
{
  return std::make_shared<const Dendrite>(io::dendrite_from_json(io::read_file(path)));
}

Subdendrite load_subdendrite(const std::string& path, const Subdendrite::Space& w)
{
  return io::subdendrite_from_json(io::read_file(path), w);
}

Rational rational_flag(const std::string& text, const Rational& fallback)
{
  return text.empty() ? fallback : parse_rational(text);
}

std::vector<Order> parse_orders(const std::string& text)
{
  std::vector<Order> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "omega") {
      out.push_back(Order::omega());
      continue;
    }
    try {
      std::size_t used = 0;
      int m = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(Order(m));
    } catch (const std::logic_error&) {
      throw FormatError("--orders: not an order: '" + item + "'");
    }
  }
  return out;
}

void run_build(const Options& o)
{
  RefinementSchedule s;
  s.orders = parse_orders(o.orders);
  s.count = o.count;
  s.ratio = parse_rational(o.ratio);
  s.depth = o.depth;
  Json j = io::to_json(build_wm(s));
  j["schedule"] = io::to_json(s);
  emit(o, j);
}

void run_invlimit(const Options& o)
{
  BondingFunction f = io::bonding_from_json(io::read_file(o.pairs));
  emit(o, io::to_json(inverse_limit_stage(f, parse_rational(o.t), o.k)));
}

void run_hausdorff(const Options& o)
{
  auto w = load_space(o.space);
  emit(o, format_rational(hausdorff(load_subdendrite(o.a, w), load_subdendrite(o.b, w))) + "\n");
}

void run_classify(const Options& o)
{
  auto w = load_space(o.space);
  Subdendrite k = load_subdendrite(o.k1, w);
  Rational eps = rational_flag(o.eps, w->mesh());
  Json diff = Json::array();
  for (const auto& d : endpoint_diff(k))
    diff.push_back({{"endpoint", io::to_json(d.endpoint)}, {"toward", d.component.toward}});
  Json fails = Json::array();
  for (NodeId v : maximality_failures(k)) fails.push_back(v);
  emit(o, Json{{"full", is_full(k)},
               {"nowhere_dense", is_nowhere_dense(k, eps)},
               {"eps", io::to_json(eps)},
               {"endpoint_diff", diff},
               {"maximality_failures", fails}});
}

std::vector<Rational> uniform_grid(int steps)
{
  if (steps < 1) throw PreconditionError("--grid-steps must be >= 1");
  std::vector<Rational> out;
  for (int i = 1; i <= steps; ++i) out.push_back(Rational(i, steps));
  return out;
}

void run_chain_gen(const Options& o)
{
  auto w = load_space(o.space);
  emit(o, io::to_json(generate_generic_chain(w, o.seed, rational_flag(o.delta, w->mesh()))));
}

void run_chain_check(const Options& o)
{
  Chain c = io::chain_from_json(io::read_file(o.chain));
  Rational eps = rational_flag(o.eps, c.ambient().mesh());
  Json j = io::to_json(o.omega ? check_omega_conditions(c, eps) : check_generic_conditions(c, eps));
  j["eps"] = io::to_json(eps);
  j["mesh"] = io::to_json(c.mesh());
  emit(o, j);
}

void run_chain_gamma(const Options& o)
{
  BondingFunction f = io::bonding_from_json(io::read_file(o.pairs));
  emit(o, io::to_json(gamma_chain(f, o.k, uniform_grid(o.grid_steps))));
}

Json verification(const PartialIso& iso)
{
  IsoViolations v = check_invariants(iso);
  Json msgs = Json::array();
  for (const auto& m : v.messages) msgs.push_back(m);
  return {{"ok", v.ok()}, {"violations", msgs}, {"extension", io::to_json(extend_and_verify(iso))}};
}

void run_homeo(const Options& o)
{
  if (!o.c1.empty() || !o.c2.empty()) {
    if (o.c1.empty() || o.c2.empty()) throw PreconditionError("--c1 and --c2 go together");
    Chain c1 = io::chain_from_json(io::read_file(o.c1));
    Chain c2 = io::chain_from_json(io::read_file(o.c2));
    PartialIso iso = o.omega ? bf_chains_omega(c1, c2, o.steps) : bf_chains(c1, c2, o.steps);
    emit(o, Json{{"iso", io::to_json(iso)}, {"verification", verification(iso)}});
    return;
  }
  Json spec = io::read_file(o.space);
  auto w = std::make_shared<const Dendrite>(io::dendrite_from_json(spec));
  std::optional<RefinementSchedule> schedule;
  if (spec.contains("schedule")) schedule = io::schedule_from_json(spec["schedule"], "/schedule");
  Subdendrite k1 = load_subdendrite(o.k1, w), k2 = load_subdendrite(o.k2, w);

  for (int round = 0;; ++round) {
    try {
      PartialIso iso = bf_subcontinua(k1, k2, o.steps);
      Json j{{"iso", io::to_json(iso)}, {"verification", verification(iso)}, {"refinements", round}};
      if (round > 0) {
        j["depth"] = schedule->depth;
        j["k1"] = io::to_json(k1);
        j["k2"] = io::to_json(k2);
      }
      emit(o, j);
      return;
    } catch (const RefineNeeded& e) {
      if (round >= o.auto_refine) throw;
      if (!schedule) throw RefineNeeded(std::string(e.what()) + "; the space has no schedule to refine");
      ++schedule->depth;
      auto finer = std::make_shared<const Dendrite>(build_wm(*schedule));
      Rational mesh = finer->mesh();
      auto carry = [&](const Subdendrite& k) {
        Subdendrite up = lift(k, finer);
        return is_full(up) || up.is_degenerate() ? up : perturb_to_full(up, mesh);
      };
      k1 = carry(k1);
      k2 = carry(k2);
      w = finer;
    }
  }
}

void run_nerve(const Options& o)
{
  Json spec = io::read_file(o.space);
  std::optional<MetricGraph> g;
  if (!o.k1.empty()) {
    auto w = std::make_shared<const Dendrite>(io::dendrite_from_json(spec));
    g = MetricGraph::from_subdendrite(load_subdendrite(o.k1, w));
  } else {
    g = io::graph_from_json(spec);
  }
  if (o.eps.empty()) throw PreconditionError("--eps is required");
  TreeLikeResult r = tree_like_check(*g, parse_rational(o.eps));
  Json obstruction = Json::array();
  for (NodeId v : r.obstruction) obstruction.push_back(v);
  if (!o.dot.empty()) {
    std::ofstream f(o.dot);
    if (!f) throw PreconditionError(o.dot + ": cannot write");
    f << io::to_dot(r.nerve);
  }
  emit(o, Json{{"tree_like", r.tree_like},
               {"eps", o.eps},
               {"mesh_bound", io::to_json(r.cover.mesh_bound())},
               {"obstruction", obstruction},
               {"cover", io::to_json(r.cover)},
               {"nerve", io::to_json(r.nerve)}});
}

void run_export_dot(const Options& o)
{
  std::shared_ptr<const Dendrite> w;
  std::vector<Subdendrite> marks;
  if (!o.chain.empty()) {
    Chain c = io::chain_from_json(io::read_file(o.chain));
    w = c.space();
    marks = c.elements();
    marks.erase(marks.begin()); // the root singleton adds nothing visible
    if (!marks.empty()) marks.pop_back();
  } else {
    w = load_space(o.space);
  }
  for (const auto& path : o.highlight) marks.push_back(load_subdendrite(path, w));
  emit(o, io::to_dot(*w, marks));
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Finite Wazewski dendrites, chains of subcontinua and back-and-forth maps", "dendrolab"};
  app.require_subcommand(1);
  Options o;

  auto* build = app.add_subcommand("build", "Build a finite refinement stage of W_M");
  build->add_option("--orders", o.orders, "Comma-separated orders, e.g. 3,omega")->capture_default_str();
  build->add_option("--depth", o.depth)->capture_default_str();
  build->add_option("--ratio", o.ratio, "Sprout length ratio")->capture_default_str();
  build->add_option("--count", o.count, "Insertions per order and edge")->capture_default_str();
  build->add_option("--out", o.out);

  auto* inv = app.add_subcommand("invlimit", "Stage tree of the set-valued inverse limit");
  inv->add_option("--pairs", o.pairs, "JSON pairs list")->required();
  inv->add_option("--t", o.t)->capture_default_str();
  inv->add_option("--k", o.k)->capture_default_str();
  inv->add_option("--out", o.out);

  auto* haus = app.add_subcommand("hausdorff", "Exact Hausdorff distance of two subdendrites");
  haus->add_option("--space", o.space)->required();
  haus->add_option("--a", o.a)->required();
  haus->add_option("--b", o.b)->required();
  haus->add_option("--out", o.out);

  auto* cls = app.add_subcommand("classify", "Fullness and density report for a subdendrite");
  cls->add_option("--space", o.space)->required();
  cls->add_option("--k", o.k1)->required();
  cls->add_option("--eps", o.eps, "Defaults to the ambient mesh");
  cls->add_option("--out", o.out);

  auto* chain = app.add_subcommand("chain", "Generate, check or build chains");
  chain->require_subcommand(1);
  auto* gen = chain->add_subcommand("gen", "Generate a generic chain");
  gen->add_option("--space", o.space)->required();
  gen->add_option("--seed", o.seed)->capture_default_str();
  gen->add_option("--delta", o.delta, "Defaults to the ambient mesh");
  gen->add_option("--out", o.out);
  auto* check = chain->add_subcommand("check", "Check the chain conditions");
  check->add_option("--chain", o.chain)->required();
  check->add_option("--eps", o.eps, "Defaults to the ambient mesh");
  check->add_flag("--omega", o.omega, "Use the variant allowing several branching endpoints");
  check->add_option("--out", o.out);
  auto* gamma = chain->add_subcommand("gamma", "Chain of pictures in the inverse limit stage");
  gamma->add_option("--pairs", o.pairs)->required();
  gamma->add_option("--k", o.k)->capture_default_str();
  gamma->add_option("--grid-steps", o.grid_steps, "Parameters i/n for i = 1..n")->capture_default_str();
  gamma->add_option("--out", o.out);

  auto* homeo = app.add_subcommand("homeo", "Back-and-forth between two subcontinua or two chains");
  homeo->add_option("--space", o.space);
  homeo->add_option("--k1", o.k1);
  homeo->add_option("--k2", o.k2);
  homeo->add_option("--c1", o.c1);
  homeo->add_option("--c2", o.c2);
  homeo->add_flag("--omega", o.omega, "Chains: use the variant conditions");
  homeo->add_option("--steps", o.steps)->capture_default_str();
  homeo->add_option("--auto-refine", o.auto_refine, "Extra depth levels to try")->capture_default_str();
  homeo->add_option("--out", o.out);

  auto* nerve_cmd = app.add_subcommand("nerve", "Tree-likeness check of a metric graph");
  nerve_cmd->add_option("--space", o.space)->required();
  nerve_cmd->add_option("--k", o.k1, "Check this subdendrite of the space instead");
  nerve_cmd->add_option("--eps", o.eps)->required();
  nerve_cmd->add_option("--dot", o.dot, "Write the nerve here");
  nerve_cmd->add_option("--out", o.out);

  auto* dot = app.add_subcommand("export-dot", "DOT drawing with highlighted subdendrites");
  dot->add_option("--space", o.space);
  dot->add_option("--chain", o.chain, "Highlight the proper elements of a chain");
  dot->add_option("--highlight", o.highlight, "Subdendrite files");
  dot->add_option("--out", o.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*build) run_build(o);
    else if (*inv) run_invlimit(o);
    else if (*haus) run_hausdorff(o);
    else if (*cls) run_classify(o);
    else if (*gen) run_chain_gen(o);
    else if (*check) run_chain_check(o);
    else if (*gamma) run_chain_gamma(o);
    else if (*homeo) {
      if (o.c1.empty() && (o.space.empty() || o.k1.empty() || o.k2.empty()))
        throw PreconditionError("homeo needs --space with --k1 --k2, or --c1 --c2");
      run_homeo(o);
    } else if (*nerve_cmd) run_nerve(o);
    else if (*dot) {
      if (o.space.empty() && o.chain.empty()) throw PreconditionError("export-dot needs --space or --chain");
      run_export_dot(o);
    }
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return 2;
  } catch (const RefineNeeded& e) {
    std::cerr << "refine needed: " << e.what() << "\n";
    return 3;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
