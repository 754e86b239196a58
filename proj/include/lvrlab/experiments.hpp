// Simulation campaigns: protected-vs-unprotected retention runs, re-add sweeps,
// the block-time sweep and the inclusion-delay sweep.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "lvrlab/agents.hpp"
#include "lvrlab/amm.hpp"
#include "lvrlab/error.hpp"
#include "lvrlab/ev.hpp"
#include "lvrlab/gbm.hpp"
#include "lvrlab/hooks.hpp"
#include "lvrlab/parallel.hpp"
#include "lvrlab/random.hpp"

namespace lvrlab {

enum class RetentionMode {
  ConversionAtPoolPrice,  // whole vault converted into the pool at the pool price every block
  PerBlockReAdd,          // vault tranche of readd_pct re-added by the first-swap hook
};

constexpr std::string_view to_string(RetentionMode mode) noexcept {
  return mode == RetentionMode::ConversionAtPoolPrice ? "conversion_at_pool_price" : "per_block_readd";
}

struct ExperimentConfig {
  GbmParams gbm;
  double initial_price = 1.0;
  double initial_reserve_a = 100.0;
  double initial_reserve_b = 100.0;
  double fee = 0.0;
  int days = 180;
  int n_paths = 1000;
  std::uint64_t seed = 42;
  double rebate_beta1 = 1.0;
  int rebate_z = 10;
  double readd_pct = 0.01;
  double readd_min_a = 0.0;
  double readd_min_b = 0.0;
  RetentionMode mode = RetentionMode::ConversionAtPoolPrice;

  void validate() const {
    gbm.validate();
    if (!(initial_price > 0.0) || !std::isfinite(initial_price)) {
      throw config_error("initial_price", "must be positive and finite");
    }
    new_pool(initial_reserve_a, initial_reserve_b, fee);
    if (days < 1) {
      throw config_error("days", "must be at least 1");
    }
    if (n_paths < 2) {
      throw config_error("n_paths", "must be at least 2");
    }
    RebateSchedule::linear(rebate_beta1, rebate_z);
    if (!(readd_pct >= 0.0 && readd_pct <= 1.0)) {
      throw config_error("readd_pct", "must lie in [0, 1]");
    }
    if (!(readd_min_a >= 0.0)) {
      throw config_error("readd_min_a", "must be non-negative");
    }
    if (!(readd_min_b >= 0.0)) {
      throw config_error("readd_min_b", "must be non-negative");
    }
  }

  PoolState pool() const { return new_pool(initial_reserve_a, initial_reserve_b, fee); }

  std::int64_t blocks() const noexcept {
    return static_cast<std::int64_t>(days) * static_cast<std::int64_t>(gbm.blocks_per_day);
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// -----------------------------------------------------------------------------
// Per-block simulation
// -----------------------------------------------------------------------------

struct SimulationState {
  ProtectedPool protected_pool;
  PoolState unprotected;
  RetentionMode mode = RetentionMode::ConversionAtPoolPrice;

  // Builder inventory against each pool; negative holdings are funded on the
  // external venue.
  double builder_protected_a = 0.0;
  double builder_protected_b = 0.0;
  double builder_unprotected_a = 0.0;
  double builder_unprotected_b = 0.0;

  double initial_a = 0.0;
  double initial_b = 0.0;
};

struct BlockLedger {
  double profit_protected = 0.0;
  double profit_unprotected = 0.0;
  // Token-conservation residuals (absolute) for the protected and unprotected systems.
  double audit_protected = 0.0;
  double audit_unprotected = 0.0;
};

inline SimulationState make_simulation_state(const ExperimentConfig& config) {
  const PoolState pool = config.pool();
  VaultState vault;
  if (config.mode == RetentionMode::PerBlockReAdd) {
    vault.pct_to_re_add = config.readd_pct;
    vault.min_re_add_a = config.readd_min_a;
    vault.min_re_add_b = config.readd_min_b;
  }
  SimulationState state;
  state.protected_pool = make_protected_pool(pool, RebateSchedule::linear(config.rebate_beta1, config.rebate_z), vault);
  state.unprotected = pool;
  state.mode = config.mode;
  state.initial_a = pool.reserve_a;
  state.initial_b = pool.reserve_b;
  return state;
}

namespace detail {

inline void book_trade(const Trade& t, double& holding_a, double& holding_b) {
  if (t.side == Side::BuyA) {
    holding_a += t.amount_out;
    holding_b -= t.amount_in;
  } else {
    holding_b += t.amount_out;
    holding_a -= t.amount_in;
  }
}

// Converts the whole vault into the pool at the pool price.
inline void convert_vault(ProtectedPool& pp) {
  VaultState all = pp.vault;
  all.pct_to_re_add = 1.0;
  all.min_re_add_a = 0.0;
  all.min_re_add_b = 0.0;
  const auto readd = vault_re_add(all, pp.pool);
  pp.pool = readd.pool;
  pp.vault.balance_a = readd.vault.balance_a;
  pp.vault.balance_b = readd.vault.balance_b;
  pp.counterparty_a += readd.counterparty_a;
  pp.counterparty_b += readd.counterparty_b;
}

}  // namespace detail

// One builder arbitrage per pool at the block's external price.
inline BlockLedger run_block(SimulationState& state, double external_price, std::int64_t block) {
  BlockLedger ledger;

  auto plain = builder_arbitrage(state.unprotected, external_price);
  state.unprotected = plain.pool;
  ledger.profit_unprotected = plain.profit;
  if (plain.trade) {
    detail::book_trade(*plain.trade, state.builder_unprotected_a, state.builder_unprotected_b);
  }

  auto guarded = builder_arbitrage(std::move(state.protected_pool), external_price, block);
  state.protected_pool = std::move(guarded.pool);
  ledger.profit_protected = guarded.profit;
  if (guarded.executed) {
    detail::book_trade(*guarded.executed, state.builder_protected_a, state.builder_protected_b);
  }
  if (state.mode == RetentionMode::ConversionAtPoolPrice) {
    detail::convert_vault(state.protected_pool);
  }

  const auto& pp = state.protected_pool;
  ledger.audit_protected =
      std::max(std::abs(pp.total_a() - pp.counterparty_a + state.builder_protected_a - state.initial_a),
               std::abs(pp.total_b() - pp.counterparty_b + state.builder_protected_b - state.initial_b));
  ledger.audit_unprotected =
      std::max(std::abs(state.unprotected.reserve_a + state.builder_unprotected_a - state.initial_a),
               std::abs(state.unprotected.reserve_b + state.builder_unprotected_b - state.initial_b));
  return ledger;
}

// -----------------------------------------------------------------------------
// Retention experiment
// -----------------------------------------------------------------------------

struct PathRecord {
  std::int64_t path_id = 0;
  double value_protected = 0.0;
  double value_unprotected = 0.0;
  double value_hodl = 0.0;
  double ratio_protected_unprotected = 0.0;
  double ratio_hodl_unprotected = 0.0;
  double max_audit_error = 0.0;
};

struct ExperimentReport {
  std::vector<PathRecord> per_path;
  double mean_ratio = 0.0;
  double std_error = 0.0;
  double mean_ratio_hodl = 0.0;
  double max_audit_error = 0.0;
  ExperimentConfig config_echo;
};

struct SampleSummary {
  double mean = 0.0;
  double std_error = 0.0;
};

inline SampleSummary summarize(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double sq = 0.0;
  for (double x : xs) {
    sq += (x - mean) * (x - mean);
  }
  return {mean, xs.size() > 1 ? std::sqrt(sq / (n - 1.0) / n) : 0.0};
}

inline PathRecord simulate_retention_path(const ExperimentConfig& config, std::uint64_t path_index) {
  SimulationState state = make_simulation_state(config);
  const GbmStepper step(config.gbm);
  auto normals = normal_stream(config.seed, path_index);

  PathRecord record;
  record.path_id = static_cast<std::int64_t>(path_index);
  double price = config.initial_price;
  const std::int64_t blocks = config.blocks();
  for (std::int64_t block = 1; block <= blocks; ++block) {
    price = step(price, normals());
    const auto ledger = run_block(state, price, block);
    record.max_audit_error = std::max({record.max_audit_error, ledger.audit_protected, ledger.audit_unprotected});
  }

  record.value_protected = state.protected_pool.value(price);
  record.value_unprotected = pool_value(state.unprotected, price);
  record.value_hodl = hodl_value(config.initial_reserve_a, config.initial_reserve_b, price);
  record.ratio_protected_unprotected = record.value_protected / record.value_unprotected;
  record.ratio_hodl_unprotected = record.value_hodl / record.value_unprotected;
  return record;
}

inline ExperimentReport run_retention_experiment(const ExperimentConfig& config, unsigned workers = 0) {
  config.validate();
  ExperimentReport report;
  report.config_echo = config;
  report.per_path = parallel_map(
      static_cast<std::size_t>(config.n_paths), [&](std::size_t i) { return simulate_retention_path(config, i); },
      workers);

  std::vector<double> ratios;
  std::vector<double> hodl;
  ratios.reserve(report.per_path.size());
  hodl.reserve(report.per_path.size());
  for (const auto& r : report.per_path) {
    ratios.push_back(r.ratio_protected_unprotected);
    hodl.push_back(r.ratio_hodl_unprotected);
    report.max_audit_error = std::max(report.max_audit_error, r.max_audit_error);
  }
  const auto summary = summarize(ratios);
  report.mean_ratio = summary.mean;
  report.std_error = summary.std_error;
  report.mean_ratio_hodl = summarize(hodl).mean;
  return report;
}

// -----------------------------------------------------------------------------
// Re-add sweep
// -----------------------------------------------------------------------------

struct ReAddRow {
  double pct = 0.0;
  double mean_ratio = 0.0;
  double std_error = 0.0;
  double mean_ratio_hodl = 0.0;
};

// One PerBlockReAdd run per percentage on the same seed, so rows share paths.
inline std::vector<ReAddRow> run_readd_sweep(const ExperimentConfig& config, const std::vector<double>& pcts,
                                             unsigned workers = 0) {
  if (pcts.empty()) {
    throw config_error("pcts", "at least one re-add percentage is required");
  }
  for (double pct : pcts) {
    if (!(pct > 0.0 && pct <= 1.0)) {
      throw config_error("pcts", "re-add percentages must lie in (0, 1]");
    }
  }
  std::vector<ReAddRow> rows;
  rows.reserve(pcts.size());
  for (double pct : pcts) {
    ExperimentConfig run = config;
    run.mode = RetentionMode::PerBlockReAdd;
    run.readd_pct = pct;
    const auto report = run_retention_experiment(run, workers);
    rows.push_back({pct, report.mean_ratio, report.std_error, report.mean_ratio_hodl});
  }
  return rows;
}

// -----------------------------------------------------------------------------
// Block-time sweep
// -----------------------------------------------------------------------------

struct BlocktimeRow {
  int block_gap = 1;
  double block_time_days = 0.0;
  double arb_profit_per_day = 0.0;
  double std_error = 0.0;
};

struct BlocktimeSweep {
  std::vector<BlocktimeRow> rows;
  double fitted_slope = 0.0;  // d log(profit per day) / d log(block time)
  double slope_std_error = 0.0;
};

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_std_error = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (xs.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - fit.intercept - fit.slope * xs[i];
      rss += r * r;
    }
    fit.slope_std_error = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

// Unprotected-pool arbitrage profit per day when the builder may only act
// every gap-th block. All gaps see the same price paths.
inline BlocktimeSweep run_blocktime_sweep(const ExperimentConfig& config, const std::vector<int>& block_gaps,
                                          unsigned workers = 0) {
  config.validate();
  if (!(config.fee > 0.0)) {
    throw config_error("fee", "the block-time sweep needs a positive fee");
  }
  if (block_gaps.size() < 2) {
    throw config_error("gaps", "at least two block gaps are required");
  }
  for (int g : block_gaps) {
    if (g < 1) {
      throw config_error("gaps", "block gaps must be positive");
    }
  }
  const auto [lo, hi] = std::minmax_element(block_gaps.begin(), block_gaps.end());
  if (*hi < 10 * *lo) {
    throw config_error("gaps", "block gaps must span at least one decade");
  }

  const PoolState start = config.pool();
  const GbmStepper step(config.gbm);
  const std::int64_t blocks = config.blocks();
  const auto per_path = parallel_map(
      static_cast<std::size_t>(config.n_paths),
      [&](std::size_t path) {
        std::vector<PoolState> pools(block_gaps.size(), start);
        std::vector<double> profit(block_gaps.size(), 0.0);
        auto normals = normal_stream(config.seed, path);
        double price = config.initial_price;
        for (std::int64_t block = 1; block <= blocks; ++block) {
          price = step(price, normals());
          for (std::size_t g = 0; g < block_gaps.size(); ++g) {
            if (block % block_gaps[g] == 0) {
              const auto arb = builder_arbitrage(pools[g], price);
              pools[g] = arb.pool;
              profit[g] += arb.profit;
            }
          }
        }
        for (double& p : profit) {
          p /= static_cast<double>(config.days);
        }
        return profit;
      },
      workers);

  BlocktimeSweep sweep;
  std::vector<double> log_time;
  std::vector<double> log_profit;
  for (std::size_t g = 0; g < block_gaps.size(); ++g) {
    std::vector<double> xs;
    xs.reserve(per_path.size());
    for (const auto& p : per_path) {
      xs.push_back(p[g]);
    }
    const auto s = summarize(xs);
    const double block_time = static_cast<double>(block_gaps[g]) * config.gbm.dt();
    sweep.rows.push_back({block_gaps[g], block_time, s.mean, s.std_error});
    log_time.push_back(std::log(block_time));
    log_profit.push_back(std::log(s.mean));
  }
  const auto fit = fit_line(log_time, log_profit);
  sweep.fitted_slope = fit.slope;
  sweep.slope_std_error = fit.slope_std_error;
  return sweep;
}

// -----------------------------------------------------------------------------
// Inclusion-delay sweep
// -----------------------------------------------------------------------------

struct DelayRow {
  std::int64_t delta_blocks = 0;
  double intrinsic = 0.0;
  double time_ev = 0.0;
  double total = 0.0;
  double std_error = 0.0;
};

// Sells 10% of the pool's token-B reserve with a 1% slippage limit.
inline UserOrder canonical_order(const PoolState& pool) {
  return make_order(pool, OrderSide::SellB, 0.1 * pool.reserve_b, 0.01);
}

inline std::vector<DelayRow> run_delay_sweep(const ExperimentConfig& config, const UserOrder& order,
                                             const std::vector<std::int64_t>& deltas, unsigned workers = 0) {
  config.validate();
  if (std::find(deltas.begin(), deltas.end(), std::int64_t{0}) == deltas.end()) {
    throw config_error("deltas", "the delay grid must include 0");
  }
  const PoolState pool = config.pool();
  std::vector<DelayRow> rows;
  rows.reserve(deltas.size());
  for (std::int64_t delta : deltas) {
    if (delta < 0) {
      throw config_error("deltas", "delays must be non-negative");
    }
    const auto ev = order_time_ev(pool, order, config.gbm, delta, config.n_paths, config.seed, config.initial_price,
                                  workers);
    rows.push_back({delta, ev.intrinsic, ev.time_value, ev.total, ev.std_error});
  }
  return rows;
}

// Relative return of a position that avoids a constant daily loss rate.
inline double theoretical_relative_return(double daily_cost, int days) {
  if (!(daily_cost >= 0.0 && daily_cost < 1.0)) {
    throw argument_error("daily cost must lie in [0, 1)");
  }
  return 1.0 / std::pow(1.0 - daily_cost, days);
}

}  // namespace lvrlab
