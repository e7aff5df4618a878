#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ofal/adversary.hpp"
#include "ofal/io.hpp"
#include "ofal/verification.hpp"

namespace ofal {

/// Runs "greedy", "ptcp" or "permutation" on the instance.
AssignmentTrace run_algorithm(const std::string& id, const Instance& inst, const RequestSequence& seq);
/// Priority rule for the MPFS algorithms ("greedy", "ptcp").
PriorityRule make_rule(const std::string& id, const ServerLayout& layout);

/// Shared knobs of the randomized sweeps. Trial t draws everything from
/// its own seed, the t-th output of Rng(seed), so any trial replays alone.
struct SweepConfig {
  std::size_t trials = 1000;
  std::size_t k_min = 1;
  std::size_t k_max = 10;
  int capacity_max = 5;
  std::size_t n_max = 40;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::optional<Distribution> distribution;  // empty: drawn per trial
};

std::vector<std::uint64_t> trial_seeds(std::uint64_t seed, std::size_t trials);

/// Random (layout, capacities, sequence) triple of one trial.
struct TrialCase {
  Instance instance;
  RequestSequence sequence;
  std::uint64_t seed;
};
TrialCase random_case(const SweepConfig& cfg, std::uint64_t trial_seed);

/// Rate <= 2 alpha(S) + 1 on random triples.
PropertyReport sweep_ratio(const std::string& alg, const SweepConfig& cfg);
/// Surrounding-oriented and faithful checks on random triples.
PropertyReport sweep_surrounding(const std::string& alg, const SweepConfig& cfg);
PropertyReport sweep_faithful(const std::string& alg, const SweepConfig& cfg, std::size_t closer_per_trial = 4);

struct HybridSweep {
  PropertyReport shape;       // free-set difference shape
  PropertyReport transitions; // P1-P3
  PropertyReport monotone;    // chains, checked when the precondition holds
  std::size_t precondition_met = 0;
  bool ok() const { return shape.ok() && transitions.ok() && monotone.ok(); }
};

/// One hybrid per trial: random unit layout with k_min..k_max servers, a
/// random sequence, a random deviation step and forced server (half of the
/// time the other surrounding server, so the monotone-chain precondition
/// is exercised).
HybridSweep sweep_hybrid(const std::string& alg, const SweepConfig& cfg);

/// A_{d,x} over PTCP with random base layouts (k_min..k_max servers) and
/// unit or random capacities.
PropertyReport sweep_adx(const Rational& d, const Rational& x, const SweepConfig& cfg);

enum class CaseSource { file, greedy_adversary, permutation_adversary, random };

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<std::string> algorithms{"greedy", "ptcp", "permutation"};
  CaseSource source = CaseSource::random;
  std::filesystem::path instance_file;
  std::filesystem::path sequence_file;
  std::vector<std::size_t> k_values;  // adversary families
  Rational epsilon{1, 10};
  int capacity = 1;
  SweepConfig random;                 // random family; trials and seed live here
  std::filesystem::path csv_path;
  std::filesystem::path json_path;
  bool assert_bounds = true;          // PTCP above 2 alpha + 1 aborts the run
  unsigned jobs = 1;
};

ExperimentConfig config_from_json(const Json& doc);
Json config_to_json(const ExperimentConfig& cfg);

struct ExperimentRow {
  std::string instance_id;
  std::string algorithm;
  std::size_t n = 0;
  Rational alg_cost;
  Rational opt_cost;
  Rate rate = Rate::finite(Rational(1));
  Rational bound;
  std::string verdict;  // "within-bound" or "above-bound"
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  Json summary;
  bool aborted = false;
  std::size_t violations = 0;  // PTCP rows above the bound
  std::string csv() const;
};

/// Generates the cases, runs every algorithm, writes the CSV and JSON
/// outputs when paths are set. With assert_bounds, processing stops at
/// the first PTCP row above 2 alpha + 1 and the summary carries its
/// reproducer.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct ReproductionTable {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  bool targets_met = true;
  std::string text() const;
  std::string csv() const;
  Json json() const;
};

/// "thm46": greedy vs PTCP on the exponential layout, k = 3..8.
/// "thm47": Permutation vs PTCP on the geometric layout, k = 1..5.
/// "tightness-k2": grid search for PTCP and greedy on S = {0, 1}.
ReproductionTable reproduce(const std::string& table, const Rational& epsilon = Rational(1, 10), unsigned jobs = 1);

}  // namespace ofal
