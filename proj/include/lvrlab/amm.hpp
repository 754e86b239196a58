// Constant-product market maker: reserves (a, b), spot price b / a,
// input-side fee retained in the reserves (Uniswap V2 convention).
#pragma once

#include <cmath>
#include <optional>

#include "lvrlab/error.hpp"

namespace lvrlab {

enum class Side {
  BuyA,  // pay token B, receive token A
  BuyB,  // pay token A, receive token B
};

struct PoolState {
  double reserve_a = 0.0;
  double reserve_b = 0.0;
  double fee = 0.0;

  double invariant() const noexcept { return reserve_a * reserve_b; }

  friend bool operator==(const PoolState&, const PoolState&) = default;
};

struct Trade {
  Side side = Side::BuyA;
  double amount_in = 0.0;
  double amount_out = 0.0;

  friend bool operator==(const Trade&, const Trade&) = default;
};

struct SwapResult {
  PoolState pool;
  double amount_out = 0.0;
};

struct SwapPreview {
  double true_price = 0.0;
  double amount_out = 0.0;
};

inline PoolState new_pool(double reserve_a, double reserve_b, double fee) {
  if (!(reserve_a > 0.0) || !std::isfinite(reserve_a)) {
    throw config_error("reserve_a", "must be a positive finite quantity");
  }
  if (!(reserve_b > 0.0) || !std::isfinite(reserve_b)) {
    throw config_error("reserve_b", "must be a positive finite quantity");
  }
  if (!(fee >= 0.0 && fee < 1.0)) {
    throw config_error("fee", "must lie in [0, 1)");
  }
  return PoolState{reserve_a, reserve_b, fee};
}

inline double spot_price(const PoolState& pool) noexcept {
  return pool.reserve_b / pool.reserve_a;
}

// -----------------------------------------------------------------------------
// Swaps
// -----------------------------------------------------------------------------

namespace detail {

// Output of a constant-product curve for an effective input `in_eff` against
// reserves (in_reserve, out_reserve). Written as out_reserve * in / (x + in)
// so that tiny inputs do not cancel.
inline double curve_output(double in_reserve, double out_reserve, double in_eff) noexcept {
  return out_reserve * in_eff / (in_reserve + in_eff);
}

inline void check_amount(double amount_in) {
  if (!(amount_in >= 0.0) || !std::isfinite(amount_in)) {
    throw argument_error("swap amount_in must be a non-negative finite quantity");
  }
}

}  // namespace detail

inline SwapResult swap_exact_in(const PoolState& pool, Side side, double amount_in) {
  detail::check_amount(amount_in);
  if (amount_in == 0.0) {
    return {pool, 0.0};
  }
  const double in_eff = amount_in * (1.0 - pool.fee);
  SwapResult result{pool, 0.0};
  if (side == Side::BuyA) {
    result.amount_out = detail::curve_output(pool.reserve_b, pool.reserve_a, in_eff);
    result.pool.reserve_b += amount_in;
    result.pool.reserve_a -= result.amount_out;
  } else {
    result.amount_out = detail::curve_output(pool.reserve_a, pool.reserve_b, in_eff);
    result.pool.reserve_a += amount_in;
    result.pool.reserve_b -= result.amount_out;
  }
  return result;
}

inline SwapPreview simulate_swap(const PoolState& pool, Side side, double amount_in) {
  const auto result = swap_exact_in(pool, side, amount_in);
  return {spot_price(result.pool), result.amount_out};
}

// Input needed to receive exactly `amount_out`; requires amount_out below the
// opposing reserve.
inline double amount_in_for_output(const PoolState& pool, Side side, double amount_out) {
  const double out_reserve = side == Side::BuyA ? pool.reserve_a : pool.reserve_b;
  const double in_reserve = side == Side::BuyA ? pool.reserve_b : pool.reserve_a;
  if (!(amount_out >= 0.0) || !(amount_out < out_reserve)) {
    throw argument_error("amount_out must lie in [0, opposing reserve)");
  }
  const double in_eff = in_reserve * amount_out / (out_reserve - amount_out);
  return in_eff / (1.0 - pool.fee);
}

// -----------------------------------------------------------------------------
// Valuation and arbitrage
// -----------------------------------------------------------------------------

// Value in token B of a trade's counterparty position, marked at `price`.
inline double trade_profit(const Trade& trade, double price) noexcept {
  return trade.side == Side::BuyA ? trade.amount_out * price - trade.amount_in
                                  : trade.amount_out - trade.amount_in * price;
}

inline double pool_value(const PoolState& pool, double external_price) noexcept {
  return pool.reserve_a * external_price + pool.reserve_b;
}

inline double hodl_value(double initial_a, double initial_b, double external_price) noexcept {
  return initial_a * external_price + initial_b;
}

// Profit-maximizing trade against an external venue quoting `external_price`.
// With input fee f and g = 1 - f the optimum of p * out(in) - in solves
// (b + g * in)^2 = g * p * a * b when buying A, and (a + g * in)^2 = g * a * b / p
// when buying B. Returns nullopt when no trade earns a positive profit.
inline std::optional<Trade> arbitrage_trade(const PoolState& pool, double external_price) {
  if (!(external_price > 0.0) || !std::isfinite(external_price)) {
    throw argument_error("external price must be positive and finite");
  }
  const double g = 1.0 - pool.fee;
  const double a = pool.reserve_a;
  const double b = pool.reserve_b;
  const double p = external_price;

  Trade trade;
  if (b < g * p * a) {
    trade.side = Side::BuyA;
    trade.amount_in = (std::sqrt(g * p * a * b) - b) / g;
  } else if (g * b > p * a) {
    trade.side = Side::BuyB;
    trade.amount_in = (std::sqrt(g * a * b / p) - a) / g;
  } else {
    return std::nullopt;
  }
  if (!(trade.amount_in > 0.0)) {
    return std::nullopt;
  }
  trade.amount_out = swap_exact_in(pool, trade.side, trade.amount_in).amount_out;
  if (!(trade_profit(trade, p) > 0.0)) {
    return std::nullopt;
  }
  return trade;
}

// Optimal arbitrage profit available now; zero inside the no-arbitrage band.
inline double arbitrage_profit(const PoolState& pool, double external_price) {
  const auto trade = arbitrage_trade(pool, external_price);
  return trade ? trade_profit(*trade, external_price) : 0.0;
}

}  // namespace lvrlab
