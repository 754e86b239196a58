// Block-builder behaviour: per-block arbitrage and the sandwich / back-run /
// exclude choice on a pending user order. All profits are in token B, with
// inventory marked at the external price at block end.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include "lvrlab/amm.hpp"
#include "lvrlab/error.hpp"
#include "lvrlab/hooks.hpp"
#include "lvrlab/optimize.hpp"

namespace lvrlab {

// -----------------------------------------------------------------------------
// Arbitrage
// -----------------------------------------------------------------------------

struct ArbitrageOutcome {
  PoolState pool;
  double profit = 0.0;
  std::optional<Trade> trade;
};

inline ArbitrageOutcome builder_arbitrage(const PoolState& pool, double external_price) {
  ArbitrageOutcome out{pool, 0.0, arbitrage_trade(pool, external_price)};
  if (out.trade) {
    out.pool = swap_exact_in(pool, out.trade->side, out.trade->amount_in).pool;
    out.profit = trade_profit(*out.trade, external_price);
  }
  return out;
}

struct ProtectedArbitrageOutcome {
  ProtectedPool pool;
  double profit = 0.0;
  std::optional<Trade> executed;  // portion actually swapped against the pool
};

// The builder sizes its trade against the pool the first swap will meet (after
// the hedger drain and vault re-add) and routes it through both hooks.
inline ProtectedArbitrageOutcome builder_arbitrage(ProtectedPool pp, double external_price,
                                                   std::int64_t current_block) {
  const auto trade = arbitrage_trade(first_swap_pool(pp, current_block), external_price);
  if (!trade) {
    return {std::move(pp), 0.0, std::nullopt};
  }
  if (current_block > pp.b_previous) {
    const Trade executed = protected_swap(pp, trade->side, trade->amount_in, current_block);
    return {std::move(pp), trade_profit(executed, external_price), executed};
  }
  // Same-block swaps can be rejected by the hedge budget; keep the original state for that case.
  ProtectedPool next = pp;
  try {
    const Trade executed = protected_swap(next, trade->side, trade->amount_in, current_block);
    return {std::move(next), trade_profit(executed, external_price), executed};
  } catch (const swap_rejected&) {
    return {std::move(pp), 0.0, std::nullopt};
  }
}

// -----------------------------------------------------------------------------
// User orders
// -----------------------------------------------------------------------------

enum class OrderSide { SellA, SellB };

struct UserOrder {
  OrderSide side = OrderSide::SellB;
  double amount_in = 0.0;
  double min_out = 0.0;
  std::int64_t submit_block = 0;
};

constexpr Side swap_side(OrderSide side) noexcept {
  return side == OrderSide::SellA ? Side::BuyB : Side::BuyA;
}

inline double order_quote(const PoolState& pool, const UserOrder& order) {
  return simulate_swap(pool, swap_side(order.side), order.amount_in).amount_out;
}

// Order with min_out set to (1 - slippage) of the current quote.
inline UserOrder make_order(const PoolState& pool, OrderSide side, double amount_in, double slippage,
                            std::int64_t submit_block = 0) {
  if (!(amount_in > 0.0)) {
    throw argument_error("order amount_in must be positive");
  }
  if (!(slippage >= 0.0 && slippage <= 1.0)) {
    throw argument_error("order slippage must lie in [0, 1]");
  }
  UserOrder order{side, amount_in, 0.0, submit_block};
  order.min_out = (1.0 - slippage) * order_quote(pool, order);
  return order;
}

enum class BuilderAction { Exclude, BackrunOnly, Sandwich };

struct BuilderDecision {
  BuilderAction action = BuilderAction::Exclude;
  double front_run_size = 0.0;
  double profit = 0.0;  // whole-block builder profit, arbitrage included
};

// Builder profit for one candidate block: optional front-run of size
// `front_run` in the order's direction, the order itself, then the best
// arbitrage against the external price. Returns nullopt when the order would
// revert on its min_out.
inline std::optional<double> sandwich_profit(const PoolState& pool, const UserOrder& order, double external_price,
                                             double front_run) {
  const Side side = swap_side(order.side);
  const auto front = swap_exact_in(pool, side, front_run);
  const auto user = swap_exact_in(front.pool, side, order.amount_in);
  if (user.amount_out < order.min_out) {
    return std::nullopt;
  }
  const double front_pnl = trade_profit(Trade{side, front_run, front.amount_out}, external_price);
  return front_pnl + arbitrage_profit(user.pool, external_price);
}

// Largest front-run that still leaves the order fillable, capped at
// `cap_multiple` times the reserve the front-run pays into.
inline double max_front_run(const PoolState& pool, const UserOrder& order, double cap_multiple = 100.0) {
  const Side side = swap_side(order.side);
  const double cap = cap_multiple * (side == Side::BuyA ? pool.reserve_b : pool.reserve_a);
  const auto fillable = [&](double f) {
    const auto front = swap_exact_in(pool, side, f);
    return swap_exact_in(front.pool, side, order.amount_in).amount_out >= order.min_out;
  };
  if (!fillable(0.0)) {
    return 0.0;
  }
  return bisect_last_true(fillable, 0.0, cap);
}

inline BuilderDecision sandwich_decision(const PoolState& pool, const UserOrder& order, double external_price) {
  if (!(order.amount_in > 0.0) || !(order.min_out >= 0.0)) {
    throw argument_error("order needs amount_in > 0 and min_out >= 0");
  }
  const double exclude = arbitrage_profit(pool, external_price);
  BuilderDecision best{BuilderAction::Exclude, 0.0, exclude};
  if (order_quote(pool, order) < order.min_out) {
    return best;  // unfillable: the order would revert
  }

  const auto tie = [](double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };

  const double backrun = *sandwich_profit(pool, order, external_price, 0.0);
  if (backrun > best.profit + tie(backrun, best.profit)) {
    best = {BuilderAction::BackrunOnly, 0.0, backrun};
  }

  const double f_max = max_front_run(pool, order);
  if (f_max > 0.0) {
    const auto objective = [&](double f) {
      return sandwich_profit(pool, order, external_price, f).value_or(-HUGE_VAL);
    };
    const auto opt = golden_section_maximize(objective, 0.0, f_max, 1e-9 * std::max(1.0, f_max));
    if (opt.x > 0.0 && opt.value > best.profit + tie(opt.value, best.profit)) {
      best = {BuilderAction::Sandwich, opt.x, opt.value};
    }
  }
  return best;
}

// Extra builder profit the order makes available over plain arbitrage.
inline double order_marginal_value(const PoolState& pool, const UserOrder& order, double external_price) {
  const double with_order = sandwich_decision(pool, order, external_price).profit;
  return std::max(0.0, with_order - arbitrage_profit(pool, external_price));
}

}  // namespace lvrlab
