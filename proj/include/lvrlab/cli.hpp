// Subcommand dispatch for the lvrlab tool. Exit codes: 0 success,
// 1 configuration or usage error, 2 numerical or I/O failure.
#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lvrlab/ev.hpp"
#include "lvrlab/experiments.hpp"
#include "lvrlab/io.hpp"

namespace lvrlab {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_runtime = 2 };

namespace detail {

inline void require_finite(std::initializer_list<double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw numerical_error(std::string("non-finite value in ") + what);
    }
  }
}

inline std::string fixed4(double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.4f", v);
  return buf.data();
}

inline std::string plus_minus(double mean, double se) { return fixed4(mean) + " ± " + fixed4(se); }

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
};

inline void add_common(CLI::App* cmd, CommonOptions& o, bool with_out = true) {
  cmd->add_option("--config", o.config_path, "JSON experiment configuration");
  if (with_out) {
    cmd->add_option("--out", o.out_dir, "output directory");
  }
  cmd->add_option("--seed", o.seed, "override the configured seed");
  cmd->add_option("--workers", o.workers, "worker threads (0 = hardware concurrency)");
}

inline ExperimentConfig load_config(const CommonOptions& o, ExperimentConfig base = {}) {
  ExperimentConfig c = o.config_path.empty() ? base : parse_config(o.config_path, base);
  if (o.seed) {
    c.seed = *o.seed;
  }
  c.validate();
  return c;
}

struct OrderOptions {
  std::string side = "sell-b";
  std::optional<double> amount;
  double slippage = 0.01;
};

inline void add_order(CLI::App* cmd, OrderOptions& o) {
  cmd->add_option("--order-side", o.side, "sell-a or sell-b")->check(CLI::IsMember({"sell-a", "sell-b"}));
  cmd->add_option("--order-amount", o.amount, "order input amount (default: 10% of the input reserve)");
  cmd->add_option("--order-slippage", o.slippage, "min_out = (1 - slippage) * quote")->check(CLI::Range(0.0, 1.0));
}

inline UserOrder build_order(const PoolState& pool, const OrderOptions& o) {
  const OrderSide side = o.side == "sell-a" ? OrderSide::SellA : OrderSide::SellB;
  const double amount = o.amount.value_or(0.1 * (side == OrderSide::SellA ? pool.reserve_a : pool.reserve_b));
  return make_order(pool, side, amount, o.slippage);
}

inline RunManifest start_manifest(const std::string& command, const ExperimentConfig& config) {
  RunManifest m;
  m.command = command;
  m.config_echo = config_to_json(config);
  m.seed = config.seed;
  m.started_at = utc_timestamp(std::chrono::system_clock::now());
  m.extra["calibration"] = {{"blocks_per_day", config.gbm.blocks_per_day}};
  return m;
}

inline void finish_manifest(const std::filesystem::path& out_dir, RunManifest& m) {
  m.finished_at = utc_timestamp(std::chrono::system_clock::now());
  write_manifest(out_dir, m);
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;

  CLI::App app{"lvrlab: LVR retention and extractable-value simulation laboratory", "lvrlab"};
  app.require_subcommand(1);

  CommonOptions common;
  OrderOptions order_opts;
  std::vector<double> pcts{0.01, 0.05, 0.125};
  std::vector<int> gaps{1, 2, 5, 10, 20, 50};
  std::vector<std::int64_t> deltas{0, 10, 50, 250, 1000};
  std::vector<std::int64_t> horizons{0, 100};
  std::vector<double> probs;
  std::vector<double> values;
  double strike = 0.0;

  auto* retention = app.add_subcommand("retention", "protected vs unprotected vs HODL retention run");
  add_common(retention, common);

  auto* readd = app.add_subcommand("readd-sweep", "retention runs over vault re-add percentages");
  add_common(readd, common);
  readd->add_option("--pcts", pcts, "comma-separated re-add fractions")->delimiter(',');

  auto* blocktime = app.add_subcommand("blocktime-sweep", "arbitrage profit per day vs block time");
  add_common(blocktime, common);
  blocktime->add_option("--gaps", gaps, "comma-separated block gaps")->delimiter(',');

  auto* delay = app.add_subcommand("delay-sweep", "time value of a pending order vs inclusion delay");
  add_common(delay, common);
  delay->add_option("--deltas", deltas, "comma-separated delays in blocks")->delimiter(',');
  add_order(delay, order_opts);

  auto* goldmine = app.add_subcommand("goldmine", "value of a discrete-outcome option");
  goldmine->add_option("--probs", probs, "outcome probabilities")->delimiter(',')->required();
  goldmine->add_option("--values", values, "outcome values")->delimiter(',')->required();
  goldmine->add_option("--strike", strike, "exercise cost")->required();

  auto* time_value = app.add_subcommand("time-value", "intrinsic/time decomposition of pool or order value");
  add_common(time_value, common);
  time_value->add_option("--horizons", horizons, "comma-separated horizons in blocks")->delimiter(',');
  add_order(time_value, order_opts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    const std::filesystem::path out_dir(common.out_dir);

    if (retention->parsed()) {
      const auto config = load_config(common);
      auto manifest = start_manifest("retention", config);
      const auto report = run_retention_experiment(config, common.workers);
      for (const auto& r : report.per_path) {
        require_finite({r.value_protected, r.value_unprotected, r.value_hodl}, "retention report");
      }
      require_finite({report.mean_ratio, report.std_error}, "retention summary");
      manifest.extra["mean_ratio"] = report.mean_ratio;
      manifest.extra["std_error"] = report.std_error;
      manifest.extra["mean_ratio_hodl"] = report.mean_ratio_hodl;
      emit_file(out_dir, "retention.csv", retention_csv(report), manifest);
      finish_manifest(out_dir, manifest);
      out << "mean_ratio=" << plus_minus(report.mean_ratio, report.std_error)
          << " hodl_ratio=" << fixed4(report.mean_ratio_hodl) << '\n';
    } else if (readd->parsed()) {
      const auto config = load_config(common);
      auto manifest = start_manifest("readd-sweep", config);
      const auto rows = run_readd_sweep(config, pcts, common.workers);
      for (const auto& r : rows) {
        require_finite({r.mean_ratio, r.std_error}, "re-add sweep");
        out << "pct=" << format_double(r.pct) << " mean_ratio=" << plus_minus(r.mean_ratio, r.std_error) << '\n';
      }
      emit_file(out_dir, "readd_sweep.csv", readd_sweep_csv(rows), manifest);
      finish_manifest(out_dir, manifest);
    } else if (blocktime->parsed()) {
      ExperimentConfig base;
      base.gbm.blocks_per_day = 7200;
      const auto config = load_config(common, base);
      auto manifest = start_manifest("blocktime-sweep", config);
      const auto sweep = run_blocktime_sweep(config, gaps, common.workers);
      require_finite({sweep.fitted_slope, sweep.slope_std_error}, "block-time sweep");
      manifest.extra["fitted_slope"] = sweep.fitted_slope;
      manifest.extra["slope_std_error"] = sweep.slope_std_error;
      emit_file(out_dir, "blocktime_sweep.csv", blocktime_sweep_csv(sweep), manifest);
      finish_manifest(out_dir, manifest);
      out << "slope=" << plus_minus(sweep.fitted_slope, sweep.slope_std_error) << '\n';
    } else if (delay->parsed()) {
      const auto config = load_config(common);
      const auto order = build_order(config.pool(), order_opts);
      auto manifest = start_manifest("delay-sweep", config);
      manifest.extra["order"] = {{"side", order_opts.side}, {"amount_in", order.amount_in}, {"min_out", order.min_out}};
      const auto rows = run_delay_sweep(config, order, deltas, common.workers);
      for (const auto& r : rows) {
        require_finite({r.time_ev, r.std_error}, "delay sweep");
        out << "delta=" << r.delta_blocks << " time_ev=" << plus_minus(r.time_ev, r.std_error) << '\n';
      }
      emit_file(out_dir, "delay_sweep.csv", delay_sweep_csv(rows), manifest);
      finish_manifest(out_dir, manifest);
    } else if (goldmine->parsed()) {
      if (probs.size() != values.size()) {
        throw argument_error("--probs and --values must have the same length");
      }
      std::vector<DiscreteOutcome> outcomes;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        outcomes.push_back({probs[i], values[i]});
      }
      const double v = discrete_option_value(outcomes, strike);
      require_finite({v}, "option value");
      out << format_double(v) << '\n';
    } else if (time_value->parsed()) {
      const auto config = load_config(common);
      const PoolState pool = config.pool();
      const bool with_order = order_opts.amount.has_value();
      auto manifest = start_manifest("time-value", config);
      std::vector<EvDecomposition> rows;
      std::optional<UserOrder> order;
      if (with_order) {
        order = build_order(pool, order_opts);
        manifest.extra["order"] = {
            {"side", order_opts.side}, {"amount_in", order->amount_in}, {"min_out", order->min_out}};
      }
      for (std::int64_t h : horizons) {
        rows.push_back(with_order ? order_time_ev(pool, *order, config.gbm, h, config.n_paths, config.seed,
                                                  config.initial_price, common.workers)
                                  : pool_time_ev(pool, config.gbm, h, config.n_paths, config.seed,
                                                 config.initial_price, common.workers));
        const auto& r = rows.back();
        require_finite({r.total, r.std_error}, "time value");
        out << "horizon=" << h << " intrinsic=" << format_double(r.intrinsic)
            << " time_value=" << plus_minus(r.time_value, r.std_error) << '\n';
      }
      emit_file(out_dir, "time_value.csv", time_value_csv(rows), manifest);
      finish_manifest(out_dir, manifest);
    }
  } catch (const config_error& e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_usage;
  } catch (const argument_error& e) {
    err << "argument error: " << e.what() << '\n';
    return exit_usage;
  } catch (const numerical_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_runtime;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O failure: " << e.what() << '\n';
    return exit_runtime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_runtime;
  }
  return exit_ok;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace lvrlab
