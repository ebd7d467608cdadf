// Copyright 2026 The onknap Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// onknap command-line tool.
//
// Exit codes: 0 success, 1 invalid input, 2 failed verification.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "onknap/onknap.hpp"

namespace {

using nlohmann::json;
using namespace onknap;

enum class Format { text, json, csv };

struct Global {
  std::uint64_t seed = 20260101;
  unsigned threads = 1;
  bool json = false;
  bool csv = false;
  Format format() const { return json ? Format::json : csv ? Format::csv : Format::text; }
};

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string num15(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ArgumentError("not a number: '" + item + "'");
    }
    if (used != item.size()) throw ArgumentError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ArgumentError("empty list");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// "f1", "f2", "greedy" or "fixed:<tau>".
ThresholdCdf parse_cdf(const std::string& name) {
  if (name == "f1") return cdf_f1();
  if (name == "f2") return cdf_f2();
  if (name == "greedy") return ThresholdCdf::point_mass(0.0);
  if (name.rfind("fixed:", 0) == 0) return ThresholdCdf::point_mass(parse_list(name.substr(6)).at(0));
  throw ArgumentError("unknown threshold distribution '" + name + "'");
}

json report_json(const CompetitiveReport& r) {
  return {{"expected_packed", r.expected_packed}, {"opt_plus", r.opt_plus},       {"opt", r.opt},
          {"ratio_vs_opt_plus", r.ratio_vs_opt_plus}, {"ratio_vs_opt", r.ratio_vs_opt}};
}

json certificate_json(const BoundCertificate& c) {
  return {{"m", c.m},
          {"t_m", c.t_m + 1},
          {"g_prime", c.g_prime},
          {"q", c.q},
          {"n", c.n},
          {"x", c.x},
          {"bound_small_m", c.bound_small_m},
          {"bound_large_m", c.bound_large_m},
          {"applicable_bound", c.applicable_bound},
          {"expected_packed", c.expected_packed},
          {"holds", c.holds}};
}

int cmd_constants(const Global& g, double tol) {
  const SolvedConstants k = solve_constants(tol);
  auto digits15 = [](double v) { return std::stod(num15(v)); };
  const json j{{"q_star", digits15(k.q_star)},
               {"c_star", digits15(k.c_star)},
               {"f2_at_qstar", digits15(k.f2_at_qstar)},
               {"h_residual", h_function(k.c_star, k.q_star)},
               {"g_residual", constants_residual(k.q_star)}};
  if (g.format() == Format::csv) {
    std::cout << "q_star,c_star,f2_at_qstar\n" << num15(k.q_star) << ',' << num15(k.c_star) << ','
              << num15(k.f2_at_qstar) << '\n';
  } else {
    print_json(j);
  }
  return 0;
}

struct EvaluateArgs {
  std::string cdf = "f1";
  std::string seq;
  std::string seq_file;
  std::optional<std::int64_t> capacity;
  std::size_t mc = 0;
  bool certificate = false;
};

template <class Size>
int evaluate_on(const Global& g, const EvaluateArgs& a, const ItemSequence<Size>& seq) {
  json j{{"items", seq.size()}, {"capacity", seq.capacity()}, {"policy", a.cdf}};
  CompetitiveReport r;
  if (a.cdf == "twobins") {
    r = two_bins_report(seq);
    j["method"] = "exact";
  } else {
    const ThresholdCdf f = parse_cdf(a.cdf);
    r = competitive_report(seq, f);
    j["method"] = "exact";
    if (a.mc > 0) {
      const ExpectationReport mc = expected_packed_mc(seq, f, a.mc, g.seed, g.threads);
      j["monte_carlo"] = {{"samples", mc.samples}, {"mean", mc.expected_packed}, {"std_error", mc.std_error}};
    }
    if (a.certificate) j["certificate"] = certificate_json(bound_certificate(seq, f));
  }
  j.update(report_json(r));
  if (g.format() == Format::json) {
    print_json(j);
  } else if (g.format() == Format::csv) {
    std::cout << "policy,expected_packed,opt_plus,opt,ratio_vs_opt_plus,ratio_vs_opt\n"
              << a.cdf << ',' << num(r.expected_packed) << ',' << num(r.opt_plus) << ',' << num(r.opt) << ','
              << num(r.ratio_vs_opt_plus) << ',' << num(r.ratio_vs_opt) << '\n';
  } else {
    std::cout << "policy             " << a.cdf << '\n'
              << "expected           " << num(r.expected_packed) << '\n'
              << "opt_plus           " << num(r.opt_plus) << '\n'
              << "opt                " << num(r.opt) << '\n'
              << "ratio_vs_opt_plus  " << num(r.ratio_vs_opt_plus) << '\n'
              << "ratio_vs_opt       " << num(r.ratio_vs_opt) << '\n';
    if (j.contains("monte_carlo")) {
      std::cout << "mc_mean            " << num(j["monte_carlo"]["mean"].get<double>()) << " +- "
                << num(j["monte_carlo"]["std_error"].get<double>()) << '\n';
    }
    if (j.contains("certificate")) {
      std::cout << "certificate        bound " << num(j["certificate"]["applicable_bound"].get<double>())
                << (j["certificate"]["holds"].get<bool>() ? " holds\n" : " VIOLATED\n");
    }
  }
  if (j.contains("certificate") && !j["certificate"]["holds"].get<bool>()) return 2;
  return 0;
}

int cmd_evaluate(const Global& g, const EvaluateArgs& a) {
  if (a.seq.empty() == a.seq_file.empty()) throw ArgumentError("give exactly one of --seq or --seq-file");
  std::string text = a.seq.empty() ? read_file(a.seq_file) : a.seq;
  for (char& ch : text) {
    if (ch == '\n' || ch == '\r' || ch == ' ' || ch == '\t') ch = ',';
  }
  std::string cleaned;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == ',' && (cleaned.empty() || cleaned.back() == ',')) continue;
    cleaned += text[i];
  }
  if (!cleaned.empty() && cleaned.back() == ',') cleaned.pop_back();
  const std::vector<double> values = parse_list(cleaned);
  if (a.capacity) {
    std::vector<std::int64_t> units;
    for (double v : values) {
      if (v != static_cast<double>(static_cast<std::int64_t>(v))) throw ArgumentError("integer mode needs integer sizes");
      units.push_back(static_cast<std::int64_t>(v));
    }
    return evaluate_on(g, a, UnitSequence(std::move(units), *a.capacity));
  }
  return evaluate_on(g, a, FractionSequence::fractions(values));
}

struct AdversaryArgs {
  std::string construction = "thm32";
  double epsilon = 1e-3;
  std::string emit = "table";
  std::size_t samples = 5;
  std::size_t n = 4;
};

json tightness_json(const TightnessTable& t) {
  json rows = json::array();
  for (const TightnessRow& r : t.rows) {
    rows.push_back({{"case", r.case_id},
                    {"case_lo", r.case_lo},
                    {"case_hi", r.case_hi},
                    {"tau", r.tau},
                    {"proof_value", r.proof_value},
                    {"closed_form", r.closed_form},
                    {"simulated", r.simulated}});
  }
  return {{"construction", to_string(t.kind)}, {"epsilon", t.epsilon},     {"unit", t.unit},
          {"step", t.step},                    {"total_mass", t.total_mass}, {"expected_opt", t.expected_opt},
          {"max_ratio", t.max_ratio},          {"bound", t.bound},           {"rows", rows}};
}

json thm42_json(const Thm42Table& t) {
  json rows = json::array();
  for (const Thm42Row& r : t.rows) {
    json hist = json::object();
    for (const auto& [accepts, count] : r.histogram) hist[std::to_string(accepts)] = count;
    rows.push_back({{"e", r.e},
                    {"histogram", hist},
                    {"expected_phase_two", std::to_string(r.accepted_sum) + "/" + std::to_string(r.permutations)},
                    {"expected_alg", r.expected_alg},
                    {"ratio", r.ratio}});
  }
  json j{{"construction", "thm42"}, {"N", t.n},          {"epsilon", t.epsilon}, {"alpha_term", t.alpha_term},
         {"expected_opt", t.expected_opt}, {"best_ratio", t.best_ratio}, {"best_e", t.best_e}, {"rows", rows}};
  if (t.bound) {
    j["bound"] = *t.bound;
    j["bound_limit"] = "35/76";
  }
  return j;
}

void print_tightness_text(const TightnessTable& t) {
  std::printf("%s  eps=%g  unit=%.9g  step=%.9g  mass=%.12f\n", to_string(t.kind), t.epsilon, t.unit, t.step,
              t.total_mass);
  std::printf("case  tau            proof_value     closed_form     simulated\n");
  for (const TightnessRow& r : t.rows) {
    std::printf("%-4d  %-13.9g  %.12f  %.12f  %.12f\n", r.case_id, r.tau, r.proof_value, r.closed_form,
                r.simulated);
  }
  std::printf("max ratio %.12f <= bound %.12f\n", t.max_ratio, t.bound);
}

void print_thm42_text(const Thm42Table& t) {
  std::printf("thm42  N=%zu  eps=%g  alpha=%.12g  E[OPT]=%.12g\n", t.n, t.epsilon, t.alpha_term, t.expected_opt);
  std::printf("e  histogram                 E[phase2]  ratio\n");
  for (const Thm42Row& r : t.rows) {
    std::string hist;
    for (const auto& [accepts, count] : r.histogram) {
      hist += (hist.empty() ? "" : " ") + std::to_string(accepts) + ":" + std::to_string(count);
    }
    const std::string frac = std::to_string(r.accepted_sum) + "/" + std::to_string(r.permutations);
    std::printf("%-2zu {%-22s}  %-9s  %.12f\n", r.e, hist.c_str(), frac.c_str(), r.ratio);
  }
  std::printf("best ratio %.12f", t.best_ratio);
  if (t.bound) std::printf("  bound 35/(76-48eps) = %.12f  limit 35/76 = %.12f", *t.bound, 35.0 / 76.0);
  std::printf("\n");
}

int cmd_adversary(const Global& g, const AdversaryArgs& a) {
  if (a.emit == "samples") {
    std::mt19937_64 rng(g.seed);
    json out = json::array();
    if (a.construction == "thm42") {
      const AdversarialDistribution d = build_thm42(a.n, a.epsilon);
      for (std::size_t i = 0; i < a.samples; ++i) out.push_back({{"capacities", d.multi[0].instance.capacities()},
                                                                 {"items", d.sample_instance(rng).sizes()}});
    } else {
      const AdversarialDistribution d =
          a.construction == "thm32" ? build_thm32(a.epsilon) : build_thm34(a.epsilon, solve_constants());
      for (std::size_t i = 0; i < a.samples; ++i) out.push_back(d.sample(rng).sizes());
    }
    print_json(out);
    return 0;
  }
  const bool as_json = a.emit == "json" || g.format() == Format::json;
  if (a.construction == "thm42") {
    const Thm42Table t = enumerate_thm42(a.n, a.epsilon);
    if (as_json) print_json(thm42_json(t)); else print_thm42_text(t);
    return 0;
  }
  const TightnessTable t =
      a.construction == "thm32" ? verify_thm32(a.epsilon) : verify_thm34(a.epsilon, solve_constants());
  if (as_json) print_json(tightness_json(t)); else print_tightness_text(t);
  return 0;
}

struct MultiArgs {
  std::string instance;
  std::string cdf = "f1";
  std::string taus;
  std::string correlation = "independent";
  std::string tie = "lowest_index";
};

int cmd_multi(const Global& g, const MultiArgs& a) {
  json doc;
  try {
    doc = json::parse(read_file(a.instance));
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("instance is not valid JSON: ") + e.what());
  }
  if (!doc.contains("capacities") || !doc.contains("items")) {
    throw ArgumentError("instance needs 'capacities' and 'items'");
  }
  const MultiInstance inst(doc["capacities"].get<std::vector<double>>(),
                           doc["items"].get<std::vector<std::vector<double>>>());
  const TieBreak tie = a.tie == "lowest_index_fitting" ? TieBreak::lowest_index_fitting : TieBreak::lowest_index;
  if (a.tie != "lowest_index" && a.tie != "lowest_index_fitting") throw ArgumentError("unknown tie rule");
  if (a.correlation != "independent" && a.correlation != "shared") throw ArgumentError("unknown correlation");

  json j{{"knapsacks", inst.knapsacks()}, {"items", inst.items()}};
  MultiOutcome run;
  if (!a.taus.empty()) {
    const std::vector<double> taus = parse_list(a.taus);
    run = simulate_combined(inst, taus, tie);
  } else {
    const std::vector<ThresholdCdf> cdfs(inst.knapsacks(), parse_cdf(a.cdf));
    const CombinedExpectation e = expected_combined_exact(inst, cdfs);
    j["expected_total"] = e.expected_total;
    j["expected_per_knapsack"] = e.per_knapsack;
    j["opt_plus_per_knapsack"] = e.opt_plus;
    run = simulate_combined(inst, cdfs, g.seed,
                            a.correlation == "shared" ? ThresholdCorrelation::shared : ThresholdCorrelation::independent,
                            tie);
  }
  json assignment = json::array();
  for (const auto& slot : run.assignment) assignment.push_back(slot ? json(*slot + 1) : json(nullptr));
  j["sample"] = {{"thresholds", run.thresholds}, {"assignment", assignment}, {"packed", run.packed},
                 {"total", run.total()}};
  if (inst.items() <= kMaxMultiItems && inst.knapsacks() <= kMaxMultiKnapsacks) {
    const double opt = opt_multi(inst).value;
    j["opt"] = opt;
    const double value = j.contains("expected_total") ? j["expected_total"].get<double>() : run.total();
    j["ratio"] = opt > 0.0 ? value / opt : 1.0;
  }
  if (g.format() == Format::csv) {
    std::cout << "knapsack,threshold,packed\n";
    for (std::size_t k = 0; k < inst.knapsacks(); ++k) {
      std::cout << k + 1 << ',' << num(run.thresholds[k]) << ',' << num(run.packed[k]) << '\n';
    }
  } else {
    print_json(j);
  }
  return 0;
}

struct ExperimentArgs {
  std::string orders;
  std::string inventory;
  bool synthetic = false;
  std::size_t skus = 974;
  std::size_t warehouses = 21;
  std::string alphas;
  std::string policies;
  std::size_t permutations = 200;
  std::string out_dir;
};

int cmd_experiment(const Global& g, const ExperimentArgs& a) {
  OrderDataset data;
  if (a.synthetic) {
    data = synth_generate(a.skus, a.warehouses, g.seed);
  } else {
    if (a.orders.empty() || a.inventory.empty()) {
      throw ArgumentError("give --orders and --inventory, or --synthetic");
    }
    data = ingest_csv(a.orders, a.inventory);
  }
  ExperimentConfig cfg;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  cfg.n_permutations = a.permutations;
  if (!a.alphas.empty()) cfg.alpha_grid = parse_list(a.alphas);
  if (!a.policies.empty()) {
    cfg.policies.clear();
    std::stringstream ss(a.policies);
    std::string p;
    while (std::getline(ss, p, ',')) cfg.policies.push_back(parse_policy(p));
  }
  const ExperimentResults res = run_experiment(data, cfg);
  for (const std::string& w : res.warnings) std::cerr << "warning: " << w << '\n';
  if (!a.out_dir.empty()) emit_results(res, a.out_dir);

  if (g.format() == Format::json) {
    json rows = json::array();
    for (const AggregateRow& r : res.aggregates) {
      rows.push_back({{"alpha", r.alpha}, {"policy", r.policy}, {"mean", r.mean}, {"min", r.min}, {"skus", r.skus}});
    }
    print_json({{"skus", data.skus().size()}, {"pairs", data.inventory.size()}, {"warnings", res.warnings.size()},
                {"aggregates", rows}});
  } else {
    std::cout << "alpha,policy,mean_ratio,min_ratio\n";
    for (const AggregateRow& r : res.aggregates) {
      std::cout << num(r.alpha) << ',' << r.policy << ',' << num(r.mean) << ',' << num(r.min) << '\n';
    }
  }
  return 0;
}

int cmd_selftest(const Global& g) {
  AcceptanceOptions opt;
  opt.seed = g.seed;
  opt.threads = g.threads;
  return print_acceptance(run_acceptance(opt)) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online unit-density knapsack threshold policies"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
  auto* json_flag = app.add_flag("--json", g.json, "JSON output");
  app.add_flag("--csv", g.csv, "CSV output")->excludes(json_flag);

  double tol = 1e-12;
  auto* constants = app.add_subcommand("constants", "Solve for q* and c*");
  constants->add_option("--tol", tol, "Residual tolerance")->capture_default_str();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Expected packing of a policy on one sequence");
  evaluate->add_option("--cdf", ev.cdf, "f1, f2, greedy, fixed:<tau> or twobins")->capture_default_str();
  evaluate->add_option("--seq", ev.seq, "Comma-separated sizes");
  evaluate->add_option("--seq-file", ev.seq_file, "File of sizes");
  evaluate->add_option("--capacity", ev.capacity, "Integer capacity; sizes are then integer units");
  evaluate->add_option("--mc", ev.mc, "Also estimate by Monte Carlo with this many samples");
  evaluate->add_flag("--certificate", ev.certificate, "Check the lower-bound certificate");

  AdversaryArgs adv;
  auto* adversary = app.add_subcommand("adversary", "Build and verify an adversarial construction");
  adversary->add_option("--construction", adv.construction)
      ->check(CLI::IsMember({"thm32", "thm34", "thm42"}))
      ->capture_default_str();
  adversary->add_option("--epsilon", adv.epsilon)->capture_default_str();
  adversary->add_option("--emit", adv.emit)->check(CLI::IsMember({"table", "samples", "json"}))->capture_default_str();
  adversary->add_option("--samples", adv.samples, "Realizations for --emit samples")->capture_default_str();
  adversary->add_option("--knapsacks", adv.n, "N for thm42")->capture_default_str();

  MultiArgs mu;
  auto* multi = app.add_subcommand("multi", "Combined routing and threshold policy on a JSON instance");
  multi->add_option("--instance", mu.instance, "JSON file {capacities, items}")->required();
  multi->add_option("--cdf", mu.cdf, "Threshold distribution for every knapsack")->capture_default_str();
  multi->add_option("--taus", mu.taus, "Deterministic per-knapsack thresholds");
  multi->add_option("--correlation", mu.correlation, "independent or shared")->capture_default_str();
  multi->add_option("--tie", mu.tie, "lowest_index or lowest_index_fitting")->capture_default_str();

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Policy comparison on order streams");
  experiment->add_option("--orders", ex.orders, "Orders CSV");
  experiment->add_option("--inventory", ex.inventory, "Inventory CSV");
  experiment->add_flag("--synthetic", ex.synthetic, "Generate synthetic streams instead");
  experiment->add_option("--skus", ex.skus)->capture_default_str();
  experiment->add_option("--warehouses", ex.warehouses)->capture_default_str();
  experiment->add_option("--alphas", ex.alphas, "Comma-separated inventory scale factors");
  experiment->add_option("--policies", ex.policies, "Comma-separated policy list");
  experiment->add_option("--permutations", ex.permutations)->capture_default_str();
  experiment->add_option("--out-dir", ex.out_dir, "Directory for the CSV outputs");

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*constants) return cmd_constants(g, tol);
    if (*evaluate) return cmd_evaluate(g, ev);
    if (*adversary) return cmd_adversary(g, adv);
    if (*multi) return cmd_multi(g, mu);
    if (*experiment) return cmd_experiment(g, ex);
    if (*selftest) return cmd_selftest(g);
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver failed: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
