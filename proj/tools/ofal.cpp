// ofal: command line front end for the OFAL library.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "ofal/adversary.hpp"
#include "ofal/alpha.hpp"
#include "ofal/experiment.hpp"
#include "ofal/hybrid.hpp"
#include "ofal/io.hpp"
#include "ofal/offline_opt.hpp"
#include "ofal/verification.hpp"

using namespace ofal;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string format = "json";
  unsigned jobs = 1;
};

// Exit codes: 0 ok, 1 bound or property violation, 2 usage or input error.
constexpr int kViolation = 1;
constexpr int kError = 2;

void emit(const Globals& g, const Json& doc, const std::string& csv) {
  if (g.format == "csv") {
    std::cout << csv;
  } else {
    std::cout << doc.dump(2) << '\n';
  }
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  return out + '\n';
}

std::string report_csv(const PropertyReport& r) {
  return csv_line({"property", "trials", "violations", "verdict"}) +
         csv_line({r.property, std::to_string(r.trials), std::to_string(r.violations.size()), r.verdict()});
}

ServerLayout parse_layout(const std::string& text) {
  std::vector<Rational> positions;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) positions.push_back(parse_rational(item));
  return ServerLayout(std::move(positions));
}

Json rate_json(const Rate& r) { return {{"rate", r.to_string()}, {"decimal", r.to_decimal()}}; }

// Options shared by the randomized sweeps.
struct SweepOptions {
  std::string alg = "ptcp";
  std::size_t trials = 1000;
  std::size_t k_min = 1;
  std::size_t k_max = 10;
  int capacity_max = 5;
  std::size_t n_max = 40;
  std::string distribution;

  void attach(CLI::App* cmd, bool with_alg = true) {
    if (with_alg) cmd->add_option("--alg", alg, "greedy or ptcp")->check(CLI::IsMember({"greedy", "ptcp"}));
    cmd->add_option("--trials", trials);
    cmd->add_option("--k-min", k_min);
    cmd->add_option("--k-max,--k", k_max);
    cmd->add_option("--capacity-max", capacity_max);
    cmd->add_option("--n-max", n_max);
    cmd->add_option("--distribution", distribution, "uniform, near-servers or opposite");
  }

  SweepConfig config(const Globals& g) const {
    SweepConfig cfg;
    cfg.trials = trials;
    cfg.k_min = k_min;
    cfg.k_max = k_max;
    cfg.capacity_max = capacity_max;
    cfg.n_max = n_max;
    cfg.seed = g.seed;
    cfg.jobs = g.jobs;
    if (!distribution.empty()) cfg.distribution = parse_distribution(distribution);
    return cfg;
  }
};

int cmd_alpha(const Globals& g, const std::string& path) {
  Instance inst = load_instance(path);
  const ServerLayout& s = inst.layout();
  Metrics m = alpha_fast(s);
  Json doc;
  doc["alpha"] = format_rational(m.alpha);
  doc["alpha_decimal"] = format_decimal(m.alpha);
  doc["L"] = format_rational(m.l_value);
  doc["bound"] = format_rational(2 * m.alpha + 1);
  doc["witness"] = m.witness;
  Json interval = Json::array();
  if (!m.witness.empty()) {
    interval.push_back(coordinate_to_json(s[m.witness.front()]));
    interval.push_back(coordinate_to_json(s[m.witness.back()]));
  }
  doc["witness_interval"] = interval;
  std::string lo = m.witness.empty() ? "" : format_rational(s[m.witness.front()]);
  std::string hi = m.witness.empty() ? "" : format_rational(s[m.witness.back()]);
  emit(g, doc,
       csv_line({"alpha", "L", "bound", "witness_left", "witness_right"}) +
           csv_line({format_rational(m.alpha), format_rational(m.l_value), format_rational(2 * m.alpha + 1), lo, hi}));
  return 0;
}

int cmd_tree(const Globals& g, const std::string& path) {
  Instance inst = load_instance(path);
  SplitTree tree(inst.layout());
  Json nodes = Json::array();
  std::string csv = csv_line({"node", "first", "last", "split", "D", "delta1", "delta2", "x", "critical"});
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    const SplitNode& n = tree.nodes()[i];
    Json node{{"first", n.first}, {"last", n.last}, {"leaf", n.leaf}};
    if (!n.leaf) {
      node["split"] = n.split;
      node["D"] = format_rational(n.gap);
      node["delta1"] = format_rational(n.left_span);
      node["delta2"] = format_rational(n.right_span);
      node["x"] = format_rational(n.offset);
      node["critical"] = format_rational(n.critical);
      node["left"] = n.left_child;
      node["right"] = n.right_child;
      csv += csv_line({std::to_string(i), std::to_string(n.first), std::to_string(n.last), std::to_string(n.split),
                       format_rational(n.gap), format_rational(n.left_span), format_rational(n.right_span),
                       format_rational(n.offset), format_rational(n.critical)});
    }
    nodes.push_back(std::move(node));
  }
  emit(g, Json{{"nodes", nodes}}, csv);
  return 0;
}

int cmd_simulate(const Globals& g, const std::string& alg, const std::string& inst_path, const std::string& seq_path) {
  Instance inst = load_instance(inst_path);
  RequestSequence seq = load_sequence(seq_path);
  AssignmentTrace trace = run_algorithm(alg, inst, seq);
  Json doc = trace_to_json(trace);
  doc["algorithm"] = alg;
  std::string csv = csv_line({"step", "request", "server", "position", "cost"});
  for (std::size_t t = 0; t < trace.size(); ++t) {
    csv += csv_line({std::to_string(t), format_rational(seq[t]), std::to_string(trace.assignment[t]),
                     format_rational(inst.layout()[trace.assignment[t]]), format_rational(trace.step_cost[t])});
  }
  emit(g, doc, csv);
  return 0;
}

int cmd_opt(const Globals& g, const std::string& method, const std::string& inst_path, const std::string& seq_path) {
  Instance inst = load_instance(inst_path);
  RequestSequence seq = load_sequence(seq_path);
  Json doc;
  doc["method"] = method;
  std::string csv = csv_line({"request", "server"});
  if (method == "dp") {
    doc["cost"] = format_rational(noncrossing_dp_cost(inst, seq));
  } else {
    OptResult r = method == "bruteforce" ? optimal_bruteforce(inst, seq) : optimal_cost(inst, seq);
    doc["cost"] = format_rational(r.cost);
    doc["assignment"] = r.assignment;
    for (std::size_t t = 0; t < r.assignment.size(); ++t) {
      csv += csv_line({std::to_string(t), std::to_string(r.assignment[t])});
    }
  }
  doc["cost_decimal"] = format_decimal(parse_rational(doc["cost"].get<std::string>()));
  emit(g, doc, csv);
  return 0;
}

int cmd_adversary(const Globals& g, const std::string& family, const AdversaryParams& params,
                  const std::string& out_instance, const std::string& out_sequence) {
  AdversaryCase c = family == "greedy" ? greedy_adversary(params) : permutation_adversary(params);
  Json inst = instance_to_json(c.instance);
  Json seq = sequence_to_json(c.sequence);
  if (!out_instance.empty()) write_json(out_instance, inst);
  if (!out_sequence.empty()) write_json(out_sequence, seq);
  Json doc{{"id", c.id},
           {"delta", format_rational(c.delta)},
           {"epsilon", format_rational(c.epsilon)},
           {"prefill", c.prefill},
           {"instance", inst},
           {"sequence", seq}};
  std::string csv = csv_line({"index", "request"});
  for (std::size_t t = 0; t < c.sequence.size(); ++t) csv += csv_line({std::to_string(t), format_rational(c.sequence[t])});
  emit(g, doc, csv);
  return 0;
}

int finish_report(const Globals& g, const PropertyReport& r, Json extra = Json::object()) {
  Json doc = report_to_json(r);
  for (auto& [key, value] : extra.items()) doc[key] = value;
  emit(g, doc, report_csv(r));
  return r.ok() ? 0 : kViolation;
}

int verify_pair(const Globals& g, const std::string& kind, const std::string& alg, const std::string& inst_path,
                const std::string& seq_path, std::size_t trials) {
  Instance inst = load_instance(inst_path);
  RequestSequence seq = load_sequence(seq_path);
  PriorityRule rule = make_rule(alg, inst.layout());
  if (kind == "surrounding") {
    return finish_report(g, check_surrounding_oriented(simulate(rule, inst, seq), inst.layout(), seq));
  }
  if (kind == "faithful") return finish_report(g, check_faithful(rule, inst, seq, trials, g.seed));
  RatioReport rr = check_ratio_bound(rule, inst, seq);
  PropertyReport r;
  r.property = "ratio";
  r.trials = 1;
  if (!rr.within_bound()) {
    r.violations.push_back({"rate " + rr.rate.to_string() + " above " + format_rational(rr.bound),
                            Reproducer{inst, seq, g.seed, alg}});
  }
  return finish_report(g, r,
                       {{"alg_cost", format_rational(rr.alg_cost)},
                        {"opt_cost", format_rational(rr.opt_cost)},
                        {"rate", rate_json(rr.rate)},
                        {"bound", format_rational(rr.bound)}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online facility assignment on a line: simulation, offline optima and verification"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);

  std::string inst_path, seq_path;

  auto* alpha = app.add_subcommand("alpha", "alpha(S), L(S) and the witness interval");
  alpha->add_option("instance", inst_path)->required()->check(CLI::ExistingFile);

  auto* tree = app.add_subcommand("tree", "dump the PTCP split tree");
  tree->add_option("instance", inst_path)->required()->check(CLI::ExistingFile);

  std::string alg = "ptcp";
  auto* sim = app.add_subcommand("simulate", "run an online algorithm");
  sim->add_option("--alg", alg)->check(CLI::IsMember({"greedy", "ptcp", "permutation"}));
  sim->add_option("instance", inst_path)->required()->check(CLI::ExistingFile);
  sim->add_option("sequence", seq_path)->required()->check(CLI::ExistingFile);

  std::string method = "flow";
  auto* opt = app.add_subcommand("opt", "offline optimum");
  opt->add_option("--method", method)->check(CLI::IsMember({"flow", "bruteforce", "dp"}));
  opt->add_option("instance", inst_path)->required()->check(CLI::ExistingFile);
  opt->add_option("sequence", seq_path)->required()->check(CLI::ExistingFile);

  std::string family, out_instance, out_sequence, epsilon = "1/10", delta;
  AdversaryParams params;
  auto* adv = app.add_subcommand("adversary", "lower-bound constructions");
  adv->add_option("family", family)->required()->check(CLI::IsMember({"greedy", "permutation"}));
  adv->add_option("--k", params.k)->required();
  adv->add_option("--epsilon", epsilon);
  adv->add_option("--delta", delta);
  adv->add_option("--capacity", params.capacity);
  adv->add_option("--out-instance", out_instance);
  adv->add_option("--out-sequence", out_sequence);

  auto* verify = app.add_subcommand("verify", "property checks");
  verify->require_subcommand(1);
  SweepOptions sweep;
  std::string v_inst, v_seq;
  std::size_t faithful_trials = 64;
  std::array<CLI::App*, 3> pair_checks{};
  std::array<std::string, 3> pair_names{"surrounding", "faithful", "ratio"};
  for (std::size_t i = 0; i < pair_checks.size(); ++i) {
    pair_checks[i] = verify->add_subcommand(pair_names[i]);
    sweep.attach(pair_checks[i]);
    pair_checks[i]->add_option("--instance", v_inst)->check(CLI::ExistingFile);
    pair_checks[i]->add_option("--sequence", v_seq)->check(CLI::ExistingFile);
  }
  pair_checks[1]->add_option("--closer", faithful_trials, "closer sequences per check");
  std::string d_text, x_text;
  auto* adx = verify->add_subcommand("adx", "A_{d,x} over PTCP against its bound");
  sweep.attach(adx, false);
  adx->add_option("--d", d_text)->required();
  adx->add_option("--x", x_text)->required();
  std::string layout_text;
  int max_capacity = 3;
  auto* capacity = verify->add_subcommand("capacity", "capacitated vs unit worst rate by grid search");
  capacity->add_option("--alg", sweep.alg)->check(CLI::IsMember({"greedy", "ptcp"}));
  capacity->add_option("--layout", layout_text, "comma separated positions");
  capacity->add_option("--instance", v_inst)->check(CLI::ExistingFile);
  capacity->add_option("--max-capacity", max_capacity);
  capacity->add_option("--n-max", sweep.n_max);
  auto* hybrid = verify->add_subcommand("hybrid", "hybrid-algorithm invariants");
  sweep.attach(hybrid);

  std::string config_path, csv_path, json_path;
  auto* run = app.add_subcommand("run", "batch experiment from a JSON config");
  run->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  run->add_option("--csv", csv_path);
  run->add_option("--json", json_path);

  std::string table;
  auto* repro = app.add_subcommand("reproduce", "headline comparison tables");
  repro->add_option("table", table)->required()->check(CLI::IsMember({"thm46", "thm47", "tightness-k2"}));
  repro->add_option("--epsilon", epsilon);

  CLI11_PARSE(app, argc, argv);

  try {
    if (alpha->parsed()) return cmd_alpha(g, inst_path);
    if (tree->parsed()) return cmd_tree(g, inst_path);
    if (sim->parsed()) return cmd_simulate(g, alg, inst_path, seq_path);
    if (opt->parsed()) return cmd_opt(g, method, inst_path, seq_path);
    if (adv->parsed()) {
      params.epsilon = parse_rational(epsilon);
      if (!delta.empty()) params.delta = parse_rational(delta);
      return cmd_adversary(g, family, params, out_instance, out_sequence);
    }
    if (verify->parsed()) {
      for (std::size_t i = 0; i < pair_checks.size(); ++i) {
        if (!pair_checks[i]->parsed()) continue;
        if (!v_inst.empty() || !v_seq.empty()) {
          if (v_inst.empty() || v_seq.empty()) throw Error("--instance and --sequence go together");
          return verify_pair(g, pair_names[i], sweep.alg, v_inst, v_seq, faithful_trials);
        }
        SweepConfig cfg = sweep.config(g);
        if (i == 0) return finish_report(g, sweep_surrounding(sweep.alg, cfg));
        if (i == 1) return finish_report(g, sweep_faithful(sweep.alg, cfg, faithful_trials));
        return finish_report(g, sweep_ratio(sweep.alg, cfg));
      }
      if (adx->parsed()) {
        Rational d = parse_rational(d_text);
        Rational x = parse_rational(x_text);
        return finish_report(g, sweep_adx(d, x, sweep.config(g)), {{"d", d_text}, {"x", x_text}});
      }
      if (capacity->parsed()) {
        ServerLayout layout = v_inst.empty() ? parse_layout(layout_text.empty() ? "0,1" : layout_text)
                                             : load_instance(v_inst).layout();
        CapacityProbe probe = capacity_insensitivity_probe(make_rule(sweep.alg, layout), layout, max_capacity,
                                                           candidate_grid(layout), sweep.n_max, g.jobs);
        Json worst = Json::object();
        for (const auto& [c, r] : probe.capacitated_worst) worst[std::to_string(c)] = rate_json(r);
        return finish_report(g, probe.report, {{"unit_worst", rate_json(probe.unit_worst)}, {"capacitated_worst", worst}});
      }
      if (hybrid->parsed()) {
        HybridSweep h = sweep_hybrid(sweep.alg, sweep.config(g));
        PropertyReport all;
        all.property = "hybrid";
        all.trials = h.shape.trials;
        for (const PropertyReport* r : {&h.shape, &h.transitions, &h.monotone}) {
          for (const auto& v : r->violations) all.violations.push_back(v);
        }
        return finish_report(g, all,
                             {{"shape", report_to_json(h.shape)},
                              {"transitions", report_to_json(h.transitions)},
                              {"monotone", report_to_json(h.monotone)},
                              {"precondition_met", h.precondition_met}});
      }
    }
    if (run->parsed()) {
      ExperimentConfig cfg = config_from_json(load_json(config_path));
      if (!csv_path.empty()) cfg.csv_path = csv_path;
      if (!json_path.empty()) cfg.json_path = json_path;
      if (app.get_option("--jobs")->count()) cfg.jobs = g.jobs;
      if (app.get_option("--seed")->count()) cfg.random.seed = g.seed;
      ExperimentResult r = run_experiment(cfg);
      Json doc = r.summary;
      doc.erase("cases");
      emit(g, doc, r.csv());
      return r.violations ? kViolation : 0;
    }
    if (repro->parsed()) {
      ReproductionTable t = reproduce(table, parse_rational(epsilon), g.jobs);
      if (g.format == "text") {
        std::cout << t.text();
      } else {
        emit(g, t.json(), t.csv());
      }
      return t.targets_met ? 0 : kViolation;
    }
  } catch (const Error& e) {
    std::cerr << "ofal: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "ofal: " << e.what() << '\n';
    return kError;
  }
  return 0;
}
