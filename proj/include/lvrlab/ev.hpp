// Extractable value priced as an option: the intrinsic part is what a builder
// earns by acting now, the time part is the extra expected profit from being
// allowed to wait until expiry before deciding.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "lvrlab/agents.hpp"
#include "lvrlab/amm.hpp"
#include "lvrlab/error.hpp"
#include "lvrlab/gbm.hpp"
#include "lvrlab/parallel.hpp"
#include "lvrlab/random.hpp"

namespace lvrlab {

struct DiscreteOutcome {
  double probability = 0.0;
  double value = 0.0;
};

// sum_i p_i * max(v_i - strike, 0)
inline double discrete_option_value(std::span<const DiscreteOutcome> outcomes, double strike) {
  double total_probability = 0.0;
  double value = 0.0;
  for (const auto& o : outcomes) {
    if (!(o.probability >= 0.0 && o.probability <= 1.0)) {
      throw argument_error("outcome probabilities must lie in [0, 1]");
    }
    total_probability += o.probability;
    value += o.probability * std::max(o.value - strike, 0.0);
  }
  if (std::abs(total_probability - 1.0) > 1e-12) {
    throw argument_error("outcome probabilities must sum to 1");
  }
  return value;
}

struct EvDecomposition {
  double intrinsic = 0.0;
  double time_value = 0.0;
  double total = 0.0;
  std::int64_t horizon = 0;  // blocks
  std::int64_t n_samples = 0;
  double std_error = 0.0;
};

enum class PriceClass { WellPriced, MisPriced };

struct StateClass {
  PriceClass classification = PriceClass::WellPriced;
  double instant_profit = 0.0;
  std::int64_t staleness_blocks = 0;
};

// Sequencing domain: minimum time between state transitions and the delay
// before a submitted transaction is guaranteed inclusion, both in blocks.
struct DomainSpec {
  double min_transition_time_t = 1.0;
  double inclusion_delay_delta = 0.0;

  void validate() const {
    if (!(min_transition_time_t >= 0.0)) {
      throw argument_error("min_transition_time_t must be non-negative");
    }
    if (!(inclusion_delay_delta >= 0.0)) {
      throw argument_error("inclusion_delay_delta must be non-negative");
    }
  }
};

inline std::int64_t staleness(std::int64_t last_acted_block, std::int64_t current_block) {
  if (current_block < last_acted_block) {
    throw argument_error("current block precedes the last acted block");
  }
  return current_block - last_acted_block;
}

inline StateClass classify_state(const PoolState& pool, double external_price, std::int64_t staleness_blocks = 0) {
  const double profit = arbitrage_profit(pool, external_price);
  return {profit > 0.0 ? PriceClass::MisPriced : PriceClass::WellPriced, profit, staleness_blocks};
}

// E[(S_T - S_0)^+] for driftless GBM started at S_0: Black-Scholes at the money
// with zero rate, S_0 * (2 N(sigma sqrt(T) / 2) - 1) = S_0 * erf(sigma sqrt(T) / (2 sqrt 2)).
inline double atm_option_benchmark(double spot, double sigma, double horizon) {
  if (!(spot > 0.0) || !(sigma >= 0.0) || !(horizon >= 0.0)) {
    throw argument_error("atm_option_benchmark needs spot > 0, sigma >= 0, horizon >= 0");
  }
  return spot * std::erf(sigma * std::sqrt(horizon) / (2.0 * std::numbers::sqrt2));
}

// Expected per-unit-time arbitrage loss of a fee-free constant-product pool as
// a fraction of pool value.
constexpr double lvr_rate(double sigma) noexcept { return sigma * sigma / 8.0; }

namespace detail {

// Monte-Carlo decomposition from a per-sample payoff at the terminal price.
// The time value is averaged as (payoff - intrinsic) so an expiry at zero
// horizon, or a deterministic path, gives exactly zero.
template <typename Payoff>
EvDecomposition estimate_time_value(Payoff&& payoff, double start_price, const GbmParams& params,
                                    std::int64_t horizon_blocks, std::int64_t n_samples, std::uint64_t seed,
                                    unsigned workers) {
  params.validate();
  if (n_samples < 2) {
    throw argument_error("n_samples must be at least 2");
  }
  if (horizon_blocks < 0) {
    throw argument_error("horizon must be non-negative");
  }
  EvDecomposition ev;
  ev.horizon = horizon_blocks;
  ev.n_samples = n_samples;
  ev.intrinsic = payoff(start_price);
  if (horizon_blocks == 0) {
    ev.total = ev.intrinsic;
    return ev;
  }

  const GbmStepper step(params);
  const auto excess = parallel_map(
      static_cast<std::size_t>(n_samples),
      [&](std::size_t i) {
        auto normals = normal_stream(seed, i);
        double price = start_price;
        for (std::int64_t b = 0; b < horizon_blocks; ++b) {
          price = step(price, normals());
        }
        return payoff(price) - ev.intrinsic;
      },
      workers);

  const double n = static_cast<double>(n_samples);
  const double mean = std::accumulate(excess.begin(), excess.end(), 0.0) / n;
  double sq = 0.0;
  for (double e : excess) {
    sq += (e - mean) * (e - mean);
  }
  ev.time_value = mean;
  ev.total = ev.intrinsic + mean;
  ev.std_error = std::sqrt(sq / (n - 1.0) / n);
  return ev;
}

}  // namespace detail

// Arbitrage value of a pool whose external price diffuses from
// `external_price` for `horizon_blocks` before the builder must act.
inline EvDecomposition pool_time_ev(const PoolState& pool, const GbmParams& params, std::int64_t horizon_blocks,
                                    std::int64_t n_samples, std::uint64_t seed, double external_price,
                                    unsigned workers = 0) {
  return detail::estimate_time_value([&](double p) { return arbitrage_profit(pool, p); }, external_price, params,
                                     horizon_blocks, n_samples, seed, workers);
}

// Same, starting from a well-priced pool (external price = pool price).
inline EvDecomposition pool_time_ev(const PoolState& pool, const GbmParams& params, std::int64_t horizon_blocks,
                                    std::int64_t n_samples, std::uint64_t seed) {
  return pool_time_ev(pool, params, horizon_blocks, n_samples, seed, spot_price(pool));
}

// Value a builder draws from a pending order when inclusion happens
// `delta_blocks` after submission; the decision (including exclusion) is taken
// at the price prevailing then.
inline EvDecomposition order_time_ev(const PoolState& pool, const UserOrder& order, const GbmParams& params,
                                     std::int64_t delta_blocks, std::int64_t n_samples, std::uint64_t seed,
                                     double external_price, unsigned workers = 0) {
  return detail::estimate_time_value([&](double p) { return order_marginal_value(pool, order, p); },
                                     external_price, params, delta_blocks, n_samples, seed, workers);
}

inline EvDecomposition order_time_ev(const PoolState& pool, const UserOrder& order, const GbmParams& params,
                                     std::int64_t delta_blocks, std::int64_t n_samples, std::uint64_t seed) {
  return order_time_ev(pool, order, params, delta_blocks, n_samples, seed, spot_price(pool));
}

}  // namespace lvrlab
