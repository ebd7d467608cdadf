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

// Order-stream experiments: per (sku, warehouse) FCFS-censored order sizes in
// integer units, inventory rescaled by alpha, every policy scored against the
// integer optimum of the rescaled instance.
//
// Random-threshold policies are implemented by percentile assignment: the k
// thresholds F^-1(i / (k-1)) are permuted over the k warehouses stocking a
// SKU, warehouse ratios are averaged, and that average is averaged again over
// random permutations.

#ifndef ONKNAP_EXPERIMENTS_HPP
#define ONKNAP_EXPERIMENTS_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "onknap/core.hpp"
#include "onknap/errors.hpp"
#include "onknap/evaluation.hpp"
#include "onknap/optimum.hpp"
#include "onknap/parallel.hpp"
#include "onknap/thresholds.hpp"

namespace onknap {

struct OrderRecord {
  std::string sku_id;
  std::string warehouse_id;
  std::int64_t arrival_index = 0;
  std::int64_t order_size = 0;
};

struct InventoryRecord {
  std::string sku_id;
  std::string warehouse_id;
  std::int64_t initial_inventory = 0;
};

/// All accepted orders of one (sku, warehouse) pair, in arrival order.
struct OrderStream {
  std::string sku_id;
  std::string warehouse_id;
  std::int64_t initial_inventory = 0;
  std::vector<std::int64_t> sizes;
};

struct OrderDataset {
  std::vector<OrderRecord> orders;         // sorted by (sku, warehouse, arrival_index)
  std::vector<InventoryRecord> inventory;  // sorted by (sku, warehouse)
  std::vector<std::string> warnings;

  /// One stream per inventory row (possibly without orders).
  std::vector<OrderStream> streams() const {
    std::vector<OrderStream> out;
    out.reserve(inventory.size());
    std::size_t o = 0;
    for (const InventoryRecord& inv : inventory) {
      OrderStream s{inv.sku_id, inv.warehouse_id, inv.initial_inventory, {}};
      const auto key = std::tie(inv.sku_id, inv.warehouse_id);
      while (o < orders.size() && std::tie(orders[o].sku_id, orders[o].warehouse_id) < key) ++o;
      while (o < orders.size() && std::tie(orders[o].sku_id, orders[o].warehouse_id) == key) {
        s.sizes.push_back(orders[o].order_size);
        ++o;
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  std::vector<std::string> skus() const {
    std::vector<std::string> out;
    for (const InventoryRecord& inv : inventory) {
      if (out.empty() || out.back() != inv.sku_id) out.push_back(inv.sku_id);
    }
    return out;
  }
};

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline std::int64_t parse_int(std::string_view field, const char* column, std::size_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(std::string(column) + " is not an integer", line);
  }
  return v;
}

/// Reads non-empty lines, checks the header, hands each row's fields to `row`.
template <class Row>
void read_csv(std::istream& in, std::string_view header, std::size_t columns, Row&& row) {
  std::string line;
  std::size_t number = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) throw ParseError("expected header '" + std::string(header) + "'", number);
      seen_header = true;
      continue;
    }
    const std::vector<std::string_view> fields = split_csv_line(line);
    if (fields.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()),
                       number);
    }
    for (std::string_view f : fields) {
      if (f.empty()) throw ParseError("empty field", number);
    }
    row(fields, number);
  }
}

/// Contiguity and censoring checks; violations become warnings.
inline void collect_warnings(OrderDataset& d) {
  const std::vector<OrderStream> streams = d.streams();
  std::size_t o = 0;
  for (const OrderStream& s : streams) {
    std::int64_t expected = 1;
    std::int64_t total = 0;
    for (std::size_t i = 0; i < s.sizes.size(); ++i, ++o) {
      if (d.orders[o].arrival_index != expected) {
        d.warnings.push_back(s.sku_id + "/" + s.warehouse_id + ": arrival indices are not contiguous from 1");
        expected = d.orders[o].arrival_index;
      }
      ++expected;
      total += s.sizes[i];
    }
    if (total > s.initial_inventory) {
      d.warnings.push_back(s.sku_id + "/" + s.warehouse_id + ": orders total " + std::to_string(total) +
                           " exceeds inventory " + std::to_string(s.initial_inventory));
    }
  }
}

}  // namespace detail

/// Parses the orders and inventory CSVs. Every order must have an inventory row.
inline OrderDataset ingest_csv(std::istream& orders, std::istream& inventory) {
  OrderDataset d;
  std::map<std::pair<std::string, std::string>, std::size_t> inv_line;
  detail::read_csv(inventory, "sku_id,warehouse_id,initial_inventory", 3,
                   [&](const std::vector<std::string_view>& f, std::size_t line) {
                     InventoryRecord r{std::string(f[0]), std::string(f[1]),
                                       detail::parse_int(f[2], "initial_inventory", line)};
                     if (r.initial_inventory < 1) throw ParseError("initial_inventory must be positive", line);
                     if (!inv_line.emplace(std::make_pair(r.sku_id, r.warehouse_id), line).second) {
                       throw ParseError("duplicate inventory row for " + r.sku_id + "/" + r.warehouse_id, line);
                     }
                     d.inventory.push_back(std::move(r));
                   });
  std::map<std::tuple<std::string, std::string, std::int64_t>, std::size_t> seen;
  detail::read_csv(orders, "sku_id,warehouse_id,arrival_index,order_size", 4,
                   [&](const std::vector<std::string_view>& f, std::size_t line) {
                     OrderRecord r{std::string(f[0]), std::string(f[1]),
                                   detail::parse_int(f[2], "arrival_index", line),
                                   detail::parse_int(f[3], "order_size", line)};
                     if (r.arrival_index < 1) throw ParseError("arrival_index must be at least 1", line);
                     if (r.order_size < 1) throw ParseError("order_size must be positive", line);
                     if (!inv_line.count({r.sku_id, r.warehouse_id})) {
                       throw ParseError("no inventory row for " + r.sku_id + "/" + r.warehouse_id, line);
                     }
                     if (!seen.emplace(std::make_tuple(r.sku_id, r.warehouse_id, r.arrival_index), line).second) {
                       throw ParseError("duplicate order " + r.sku_id + "/" + r.warehouse_id + "/" +
                                            std::to_string(r.arrival_index),
                                        line);
                     }
                     d.orders.push_back(std::move(r));
                   });
  std::sort(d.inventory.begin(), d.inventory.end(), [](const InventoryRecord& a, const InventoryRecord& b) {
    return std::tie(a.sku_id, a.warehouse_id) < std::tie(b.sku_id, b.warehouse_id);
  });
  std::sort(d.orders.begin(), d.orders.end(), [](const OrderRecord& a, const OrderRecord& b) {
    return std::tie(a.sku_id, a.warehouse_id, a.arrival_index) <
           std::tie(b.sku_id, b.warehouse_id, b.arrival_index);
  });
  detail::collect_warnings(d);
  return d;
}

inline OrderDataset ingest_csv(const std::filesystem::path& orders_path,
                               const std::filesystem::path& inventory_path) {
  std::ifstream orders(orders_path);
  if (!orders) throw IoError("cannot open " + orders_path.string());
  std::ifstream inventory(inventory_path);
  if (!inventory) throw IoError("cannot open " + inventory_path.string());
  return ingest_csv(orders, inventory);
}

struct SynthOptions {
  double inventory_log_mean = 4.0;
  double inventory_log_sd = 0.8;
  double order_log_mean = 1.0;
  double order_log_sd = 0.9;
  double demand_min = 1.0;    // offered demand as a multiple of inventory
  double demand_max = 2.5;
  double full_coverage = 0.6;  // chance a SKU is stocked in every warehouse
};

/// Synthetic FCFS-censored order streams. Each SKU gets its own substream, so
/// the output depends only on (counts, seed, options).
inline OrderDataset synth_generate(std::size_t n_skus, std::size_t n_warehouses, std::uint64_t seed,
                                   const SynthOptions& opt = {}) {
  if (n_skus < 1 || n_warehouses < 1) throw ArgumentError("need at least one SKU and one warehouse");
  char buf[32];
  std::vector<std::string> wh_names;
  for (std::size_t w = 0; w < n_warehouses; ++w) {
    std::snprintf(buf, sizeof buf, "WH%02zu", w + 1);
    wh_names.emplace_back(buf);
  }
  OrderDataset d;
  for (std::size_t s = 0; s < n_skus; ++s) {
    std::snprintf(buf, sizeof buf, "SKU%04zu", s + 1);
    const std::string sku(buf);
    std::mt19937_64 rng(derive_seed(seed, s));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t k = n_warehouses;
    if (unit(rng) >= opt.full_coverage) {
      k = std::uniform_int_distribution<std::size_t>(1, n_warehouses)(rng);
    }
    std::vector<std::size_t> chosen(n_warehouses);
    std::iota(chosen.begin(), chosen.end(), std::size_t{0});
    std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(k);
    std::sort(chosen.begin(), chosen.end());

    std::lognormal_distribution<double> inv_dist(opt.inventory_log_mean, opt.inventory_log_sd);
    std::lognormal_distribution<double> order_dist(opt.order_log_mean, opt.order_log_sd);
    std::uniform_real_distribution<double> demand(opt.demand_min, opt.demand_max);
    for (std::size_t w : chosen) {
      const std::int64_t inv = std::max<std::int64_t>(1, std::llround(inv_dist(rng)));
      const double offered = demand(rng) * static_cast<double>(inv);
      std::int64_t left = inv;
      std::int64_t arrival = 0;
      for (double sum = 0.0; sum < offered;) {
        const std::int64_t size = std::max<std::int64_t>(1, std::llround(order_dist(rng)));
        sum += static_cast<double>(size);
        if (size <= left) {
          left -= size;
          d.orders.push_back({sku, wh_names[w], ++arrival, size});
        }
      }
      d.inventory.push_back({sku, wh_names[w], inv});
    }
  }
  detail::collect_warnings(d);
  return d;
}

/// F^-1(i / (k-1)) for i = 0..k-1; k = 1 gives the single threshold F^-1(0).
inline std::vector<double> percentile_thresholds(const ThresholdCdf& f, std::size_t k) {
  if (k < 1) throw ArgumentError("need at least one percentile");
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = k == 1 ? f.quantile(0.0) : f.quantile(static_cast<double>(i) / static_cast<double>(k - 1));
  }
  return out;
}

struct PolicySpec {
  enum class Kind : std::uint8_t { fcfs, fixed, two_bins, random_threshold, random_threshold_exact };
  Kind kind = Kind::fcfs;
  double percent = 0.0;  // fixed only
  std::string cdf;       // random-threshold kinds: "f1" or "f2"

  std::string name() const {
    switch (kind) {
      case Kind::fcfs: return "fcfs";
      case Kind::fixed: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "fixed:%g", percent);
        return buf;
      }
      case Kind::two_bins: return "twobins";
      case Kind::random_threshold: return "rt:" + cdf;
      case Kind::random_threshold_exact: return "rt_exact:" + cdf;
    }
    return "?";
  }
};

/// Parses "fcfs", "fixed:<percent>", "twobins", "rt:<f1|f2>", "rt_exact:<f1|f2>".
inline PolicySpec parse_policy(std::string_view text) {
  using Kind = PolicySpec::Kind;
  if (text == "fcfs") return {Kind::fcfs, 0.0, {}};
  if (text == "twobins") return {Kind::two_bins, 0.0, {}};
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) throw ArgumentError("unknown policy '" + std::string(text) + "'");
  const std::string_view head = text.substr(0, colon);
  const std::string arg(text.substr(colon + 1));
  if (head == "fixed") {
    double pct = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), pct);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || !(pct >= 0.0 && pct <= 100.0)) {
      throw ArgumentError("fixed policy needs a percent in [0, 100]");
    }
    return {Kind::fixed, pct, {}};
  }
  if (arg != "f1" && arg != "f2") throw ArgumentError("threshold distribution must be f1 or f2");
  if (head == "rt") return {Kind::random_threshold, 0.0, arg};
  if (head == "rt_exact") return {Kind::random_threshold_exact, 0.0, arg};
  throw ArgumentError("unknown policy '" + std::string(text) + "'");
}

inline std::vector<PolicySpec> default_policies() {
  std::vector<PolicySpec> out{parse_policy("fcfs")};
  for (int pct : {3, 5, 10, 15, 20, 30, 40, 50, 60, 80}) out.push_back(parse_policy("fixed:" + std::to_string(pct)));
  for (const char* p : {"twobins", "rt:f1", "rt:f2", "rt_exact:f1"}) out.push_back(parse_policy(p));
  return out;
}

struct ExperimentConfig {
  std::vector<double> alpha_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<PolicySpec> policies = default_policies();
  std::size_t n_permutations = 200;
  std::uint64_t seed = 20260101;
  unsigned threads = 1;

  void validate() const {
    if (alpha_grid.empty()) throw ArgumentError("alpha grid is empty");
    for (double a : alpha_grid) {
      if (!(a > 0.0 && a <= 1.0)) throw ArgumentError("alpha values must lie in (0, 1]");
    }
    if (!std::is_sorted(alpha_grid.begin(), alpha_grid.end())) throw ArgumentError("alpha grid must be ascending");
    if (policies.empty()) throw ArgumentError("no policies selected");
    if (n_permutations < 1) throw ArgumentError("need at least one permutation");
  }
};

/// floor(alpha * inventory). The 1e-9 keeps products like 0.7 * 10 from rounding down.
inline std::int64_t scaled_capacity(double alpha, std::int64_t inventory) {
  return static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(inventory) + 1e-9));
}

struct SkuPerformance {
  std::string sku_id;
  double alpha = 0.0;
  std::string policy;
  double ratio = 0.0;
  double std_error = 0.0;  // across permutations, percentile policies only
};

struct AggregateRow {
  double alpha = 0.0;
  std::string policy;
  double mean = 0.0;
  double min = 0.0;
  std::size_t skus = 0;
};

struct ExperimentResults {
  std::vector<SkuPerformance> per_sku;  // ordered by (sku, alpha, policy order)
  std::vector<AggregateRow> aggregates;  // ordered by (alpha, policy order)
  std::vector<std::string> warnings;
};

/// Exact single-warehouse ratios at one alpha. `opt` is 0 when nothing fits.
struct WarehouseScore {
  std::int64_t capacity = 0;
  std::int64_t opt = 0;
  std::int64_t opt_plus = 0;
  UnitSequence sequence;
};

inline WarehouseScore score_warehouse(const OrderStream& s, double alpha) {
  WarehouseScore w;
  w.capacity = scaled_capacity(alpha, s.initial_inventory);
  if (w.capacity < 1 || s.sizes.empty()) return w;
  w.sequence = UnitSequence(s.sizes, w.capacity);
  w.opt = opt_dp(w.sequence).value;
  w.opt_plus = opt_plus(w.sequence).value;
  return w;
}

namespace detail {

inline double ratio_units(double packed, std::int64_t opt) {
  return opt > 0 ? packed / static_cast<double>(opt) : 1.0;
}

inline double policy_ratio(const WarehouseScore& w, const PolicySpec& p, const ThresholdCdf* f) {
  using Kind = PolicySpec::Kind;
  if (w.opt == 0) return 1.0;
  switch (p.kind) {
    case Kind::fcfs: return ratio_units(static_cast<double>(simulate_greedy(w.sequence).packed_total), w.opt);
    case Kind::fixed:
      return ratio_units(
          static_cast<double>(simulate_fixed_threshold(w.sequence, p.percent / 100.0).packed_total), w.opt);
    case Kind::two_bins: return ratio_units(simulate_two_bins(w.sequence).expected_packed, w.opt);
    case Kind::random_threshold_exact:
      return ratio_units(expected_packed_exact(w.sequence, *f).expected_packed, w.opt);
    case Kind::random_threshold: break;
  }
  throw PreconditionError("percentile policies are scored per SKU");
}

}  // namespace detail

/// Runs every policy at every alpha on every SKU.
inline ExperimentResults run_experiment(const OrderDataset& data, const ExperimentConfig& config) {
  config.validate();
  const std::vector<OrderStream> streams = data.streams();
  if (streams.empty()) throw ArgumentError("dataset has no (sku, warehouse) pairs");

  std::vector<std::pair<std::size_t, std::size_t>> sku_ranges;  // [begin, end) into streams
  for (std::size_t i = 0; i < streams.size(); ++i) {
    if (sku_ranges.empty() || streams[sku_ranges.back().first].sku_id != streams[i].sku_id) {
      sku_ranges.push_back({i, i});
    }
    sku_ranges.back().second = i + 1;
  }

  const ThresholdCdf f1 = cdf_f1();
  const ThresholdCdf f2 = cdf_f2();
  auto cdf_for = [&](const PolicySpec& p) -> const ThresholdCdf* {
    if (p.cdf.empty()) return nullptr;
    return p.cdf == "f1" ? &f1 : &f2;
  };

  const std::size_t n_alpha = config.alpha_grid.size();
  const std::size_t n_pol = config.policies.size();
  std::vector<std::vector<SkuPerformance>> per_sku(sku_ranges.size());
  parallel_for(sku_ranges.size(), config.threads, [&](std::size_t si) {
    const auto [begin, end] = sku_ranges[si];
    const std::size_t k = end - begin;
    std::vector<SkuPerformance>& out = per_sku[si];
    out.reserve(n_alpha * n_pol);
    for (std::size_t ai = 0; ai < n_alpha; ++ai) {
      const double alpha = config.alpha_grid[ai];
      std::vector<WarehouseScore> scores;
      for (std::size_t i = begin; i < end; ++i) scores.push_back(score_warehouse(streams[i], alpha));
      for (const PolicySpec& p : config.policies) {
        SkuPerformance perf{streams[begin].sku_id, alpha, p.name(), 0.0, 0.0};
        if (p.kind != PolicySpec::Kind::random_threshold) {
          for (const WarehouseScore& w : scores) perf.ratio += detail::policy_ratio(w, p, cdf_for(p));
          perf.ratio /= static_cast<double>(k);
        } else {
          // ratio[w][i]: warehouse w run at the i-th percentile threshold.
          const std::vector<double> taus = percentile_thresholds(*cdf_for(p), k);
          std::vector<std::vector<double>> ratio(k, std::vector<double>(k, 1.0));
          for (std::size_t w = 0; w < k; ++w) {
            if (scores[w].opt == 0) continue;
            for (std::size_t i = 0; i < k; ++i) {
              ratio[w][i] = detail::ratio_units(
                  static_cast<double>(simulate_fixed_threshold(scores[w].sequence, taus[i]).packed_total),
                  scores[w].opt);
            }
          }
          std::mt19937_64 rng(derive_seed(derive_seed(config.seed, si), ai));
          std::vector<std::size_t> perm(k);
          std::iota(perm.begin(), perm.end(), std::size_t{0});
          double mean = 0.0;
          double m2 = 0.0;
          for (std::size_t r = 0; r < config.n_permutations; ++r) {
            std::shuffle(perm.begin(), perm.end(), rng);
            double avg = 0.0;
            for (std::size_t w = 0; w < k; ++w) avg += ratio[w][perm[w]];
            avg /= static_cast<double>(k);
            const double d = avg - mean;
            mean += d / static_cast<double>(r + 1);
            m2 += d * (avg - mean);
          }
          perf.ratio = mean;
          const auto n = static_cast<double>(config.n_permutations);
          perf.std_error = n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
        }
        out.push_back(std::move(perf));
      }
    }
  });

  ExperimentResults res;
  res.warnings = data.warnings;
  for (std::size_t si = 0; si < sku_ranges.size(); ++si) {
    if (sku_ranges[si].second - sku_ranges[si].first == 1) {
      res.warnings.push_back(streams[sku_ranges[si].first].sku_id +
                             ": stocked in one warehouse, percentile policies reduce to FCFS");
    }
    for (SkuPerformance& p : per_sku[si]) res.per_sku.push_back(std::move(p));
  }
  for (std::size_t ai = 0; ai < n_alpha; ++ai) {
    for (std::size_t pi = 0; pi < n_pol; ++pi) {
      AggregateRow row{config.alpha_grid[ai], config.policies[pi].name(), 0.0, 1.0, 0};
      for (std::size_t si = 0; si < sku_ranges.size(); ++si) {
        const double r = res.per_sku[(si * n_alpha + ai) * n_pol + pi].ratio;
        row.mean += r;
        row.min = std::min(row.min, r);
        ++row.skus;
      }
      row.mean /= static_cast<double>(row.skus);
      res.aggregates.push_back(std::move(row));
    }
  }
  return res;
}

/// Writes per_sku.csv, aggregate_mean.csv and aggregate_min.csv into `dir`.
inline void emit_results(const ExperimentResults& results, const std::filesystem::path& dir) {
  if (results.per_sku.empty()) throw ArgumentError("no results to write");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    return out;
  };
  char buf[64];
  {
    std::ofstream out = open("per_sku.csv");
    out << "sku,alpha,policy,ratio\n";
    for (const SkuPerformance& p : results.per_sku) {
      std::snprintf(buf, sizeof buf, "%.6g,", p.alpha);
      out << p.sku_id << ',' << buf << p.policy << ',';
      std::snprintf(buf, sizeof buf, "%.12f\n", p.ratio);
      out << buf;
    }
  }
  for (const bool mean : {true, false}) {
    std::ofstream out = open(mean ? "aggregate_mean.csv" : "aggregate_min.csv");
    out << (mean ? "alpha,policy,mean_ratio\n" : "alpha,policy,min_ratio\n");
    for (const AggregateRow& row : results.aggregates) {
      std::snprintf(buf, sizeof buf, "%.6g,", row.alpha);
      out << buf << row.policy << ',';
      std::snprintf(buf, sizeof buf, "%.12f\n", mean ? row.mean : row.min);
      out << buf;
    }
    if (!out) throw IoError("write failed in " + dir.string());
  }
}

}  // namespace onknap

#endif  // ONKNAP_EXPERIMENTS_HPP
