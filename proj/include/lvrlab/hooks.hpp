// LVR-retaining swap hooks: a protected pool whose first swap in each block is
// executed only in part, with the pool then pushed to the price the full swap
// would have reached and the difference retained in a vault. Later swaps in
// the same block must be covered by a hedge budget.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lvrlab/amm.hpp"
#include "lvrlab/error.hpp"

namespace lvrlab {

// -----------------------------------------------------------------------------
// Rebate schedule
// -----------------------------------------------------------------------------

// beta(g) for block gaps g = 1..Z, strictly decreasing with beta(Z) = 0.
// The all-zero schedule is accepted as the "no protection" degenerate case.
class RebateSchedule {
public:
  RebateSchedule() : RebateSchedule(std::vector<double>{0.0}) {}

  explicit RebateSchedule(std::vector<double> beta) : beta_(std::move(beta)) {
    if (beta_.empty()) {
      throw config_error("rebate_z", "schedule needs at least one entry");
    }
    if (beta_.back() != 0.0) {
      throw config_error("rebate_z", "beta(Z) must be 0");
    }
    const bool all_zero = std::all_of(beta_.begin(), beta_.end(), [](double b) { return b == 0.0; });
    for (std::size_t i = 0; i < beta_.size(); ++i) {
      if (!(beta_[i] >= 0.0 && beta_[i] <= 1.0)) {
        throw config_error("rebate_beta1", "rebate fractions must lie in [0, 1]");
      }
      if (!all_zero && i > 0 && !(beta_[i] < beta_[i - 1])) {
        throw config_error("rebate_beta1", "rebate schedule must be strictly decreasing");
      }
    }
  }

  // Constant beta(1) with a linear tail down to beta(Z) = 0.
  static RebateSchedule linear(double beta1, int horizon_z) {
    if (horizon_z < 1) {
      throw config_error("rebate_z", "must be at least 1");
    }
    if (!(beta1 >= 0.0 && beta1 <= 1.0)) {
      throw config_error("rebate_beta1", "must lie in [0, 1]");
    }
    if (horizon_z == 1 && beta1 != 0.0) {
      throw config_error("rebate_z", "must be at least 2 when rebate_beta1 > 0");
    }
    std::vector<double> beta(static_cast<std::size_t>(horizon_z), 0.0);
    for (int g = 1; g < horizon_z; ++g) {
      beta[static_cast<std::size_t>(g - 1)] =
          beta1 * static_cast<double>(horizon_z - g) / static_cast<double>(horizon_z - 1);
    }
    return RebateSchedule(std::move(beta));
  }

  int horizon() const noexcept { return static_cast<int>(beta_.size()); }

  double operator()(std::int64_t gap) const {
    if (gap <= 0) {
      throw argument_error("rebate gap must be at least 1");
    }
    if (gap >= static_cast<std::int64_t>(beta_.size())) {
      return 0.0;
    }
    return beta_[static_cast<std::size_t>(gap - 1)];
  }

private:
  std::vector<double> beta_;
};

inline double rebate(const RebateSchedule& schedule, std::int64_t gap) { return schedule(gap); }

// -----------------------------------------------------------------------------
// Hedger
// -----------------------------------------------------------------------------

// Budgets gate intra-block swaps; balances are the tokens physically held.
struct HedgerState {
  double balance_a = 0.0;
  double balance_b = 0.0;
  double hedge_available_a = 0.0;
  double hedge_available_b = 0.0;
  std::string owner;
};

inline HedgerState hedger_deposit(HedgerState h, double amount_a, double amount_b, std::string depositor) {
  if (!(amount_a >= 0.0) || !(amount_b >= 0.0)) {
    throw argument_error("hedger deposits must be non-negative");
  }
  h.balance_a += amount_a;
  h.balance_b += amount_b;
  h.hedge_available_a += amount_a;
  h.hedge_available_b += amount_b;
  h.owner = std::move(depositor);
  return h;
}

inline HedgerState hedger_withdraw(HedgerState h, double amount_a, double amount_b) {
  if (!(amount_a >= 0.0) || !(amount_b >= 0.0)) {
    throw argument_error("hedger withdrawals must be non-negative");
  }
  if (h.hedge_available_a < amount_a || h.hedge_available_b < amount_b) {
    throw withdrawal_rejected("withdrawal exceeds hedge budget");
  }
  if (h.balance_a < amount_a || h.balance_b < amount_b) {
    throw withdrawal_rejected("withdrawal exceeds hedger balance");
  }
  h.balance_a -= amount_a;
  h.balance_b -= amount_b;
  h.hedge_available_a -= amount_a;
  h.hedge_available_b -= amount_b;
  return h;
}

struct DrainResult {
  HedgerState hedger;
  double amount_a = 0.0;  // tokens moved into the pool
  double amount_b = 0.0;
};

inline DrainResult hedger_drain(HedgerState h) {
  DrainResult result{std::move(h), 0.0, 0.0};
  result.amount_a = std::exchange(result.hedger.balance_a, 0.0);
  result.amount_b = std::exchange(result.hedger.balance_b, 0.0);
  result.hedger.hedge_available_a = 0.0;
  result.hedger.hedge_available_b = 0.0;
  return result;
}

// -----------------------------------------------------------------------------
// Vault
// -----------------------------------------------------------------------------

struct VaultState {
  double balance_a = 0.0;
  double balance_b = 0.0;
  double pct_to_re_add = 0.0;
  double min_re_add_a = 0.0;
  double min_re_add_b = 0.0;
};

struct ReAddResult {
  VaultState vault;
  PoolState pool;
  // Net tokens supplied by the outside counterparty that converts the tranche
  // into the pool's current composition at the pool price. Negative values are
  // tokens handed to that counterparty.
  double counterparty_a = 0.0;
  double counterparty_b = 0.0;
};

// Re-adds min(balance, max(pct * balance, minimum)) of each token. The tranche
// is injected at the pool price as balanced liquidity, so the pool price does
// not move: both reserves scale by (pool value + tranche value) / pool value.
inline ReAddResult vault_re_add(VaultState v, const PoolState& pool) {
  const auto tranche = [](double balance, double pct, double minimum) {
    return std::min(balance, std::max(pct * balance, minimum));
  };
  const double tranche_a = tranche(v.balance_a, v.pct_to_re_add, v.min_re_add_a);
  const double tranche_b = tranche(v.balance_b, v.pct_to_re_add, v.min_re_add_b);
  if (tranche_a <= 0.0 && tranche_b <= 0.0) {
    return {std::move(v), pool, 0.0, 0.0};
  }
  const double price = spot_price(pool);
  const double pool_worth = pool_value(pool, price);
  const double tranche_worth = tranche_a * price + tranche_b;
  const double scale = (pool_worth + tranche_worth) / pool_worth;

  ReAddResult result{std::move(v), pool, 0.0, 0.0};
  result.pool.reserve_a = pool.reserve_a * scale;
  result.pool.reserve_b = pool.reserve_b * scale;
  result.vault.balance_a -= tranche_a;
  result.vault.balance_b -= tranche_b;
  result.counterparty_a = (result.pool.reserve_a - pool.reserve_a) - tranche_a;
  result.counterparty_b = (result.pool.reserve_b - pool.reserve_b) - tranche_b;
  return result;
}

struct RebalanceResult {
  VaultState vault;
  PoolState pool;
  double removed_a = 0.0;
  double removed_b = 0.0;
};

// Removes the token being bought until the pool price equals `true_price`.
inline RebalanceResult vault_rebalance(VaultState v, const PoolState& pool, double true_price) {
  if (!(true_price > 0.0) || !std::isfinite(true_price)) {
    throw argument_error("true price must be positive and finite");
  }
  RebalanceResult result{std::move(v), pool, 0.0, 0.0};
  const double spot = spot_price(pool);
  if (spot < true_price) {
    result.removed_a = pool.reserve_a - pool.reserve_b / true_price;
    result.pool.reserve_a = pool.reserve_b / true_price;
  } else if (spot > true_price) {
    result.removed_b = pool.reserve_b - pool.reserve_a * true_price;
    result.pool.reserve_b = pool.reserve_a * true_price;
  }
  result.vault.balance_a += result.removed_a;
  result.vault.balance_b += result.removed_b;
  return result;
}

// -----------------------------------------------------------------------------
// Protected pool
// -----------------------------------------------------------------------------

struct PendingSwap {
  bool first_in_block = false;
  double true_price = 0.0;  // only meaningful for the first swap
  Side side = Side::BuyA;
  double amount_in = 0.0;   // requested input
  double executed_in = 0.0;
  double amount_out = 0.0;
  std::int64_t block = 0;
};

struct ProtectedPool {
  PoolState pool;
  HedgerState hedger;
  VaultState vault;
  RebateSchedule schedule;
  std::int64_t b_previous = 0;
  std::optional<PendingSwap> pending;

  // Cumulative tokens supplied by the re-add conversion counterparty.
  double counterparty_a = 0.0;
  double counterparty_b = 0.0;

  std::optional<double> pending_true_price() const {
    if (pending && pending->first_in_block) {
      return pending->true_price;
    }
    return std::nullopt;
  }

  double total_a() const noexcept { return pool.reserve_a + hedger.balance_a + vault.balance_a; }
  double total_b() const noexcept { return pool.reserve_b + hedger.balance_b + vault.balance_b; }

  // Pool, vault and hedger holdings marked at `price`.
  double value(double price) const noexcept { return total_a() * price + total_b(); }
};

inline ProtectedPool make_protected_pool(const PoolState& pool, RebateSchedule schedule, VaultState vault = {},
                                         std::int64_t start_block = 0) {
  ProtectedPool pp;
  pp.pool = pool;
  pp.vault = vault;
  pp.schedule = std::move(schedule);
  pp.b_previous = start_block;
  return pp;
}

// Pool a first swap in `current_block` would trade against: the hedger drained
// and the vault tranche re-added. For a same-block swap the pool is unchanged.
inline PoolState first_swap_pool(const ProtectedPool& pp, std::int64_t current_block) {
  if (current_block <= pp.b_previous) {
    return pp.pool;
  }
  PoolState pool = pp.pool;
  pool.reserve_a += pp.hedger.balance_a;
  pool.reserve_b += pp.hedger.balance_b;
  return vault_re_add(pp.vault, pool).pool;
}

// Returns the portion of the swap actually executed against the pool.
inline Trade before_swap(ProtectedPool& pp, Side side, double amount_in, std::int64_t current_block) {
  detail::check_amount(amount_in);
  if (pp.pending) {
    throw protocol_error("before_swap called while another swap is in flight");
  }
  if (current_block < pp.b_previous) {
    throw argument_error("current block precedes the last swap block");
  }

  const std::int64_t gap = current_block - pp.b_previous;
  if (gap > 0) {
    auto drained = hedger_drain(std::move(pp.hedger));
    pp.hedger = std::move(drained.hedger);
    pp.pool.reserve_a += drained.amount_a;
    pp.pool.reserve_b += drained.amount_b;

    auto readd = vault_re_add(std::move(pp.vault), pp.pool);
    pp.vault = std::move(readd.vault);
    pp.pool = readd.pool;
    pp.counterparty_a += readd.counterparty_a;
    pp.counterparty_b += readd.counterparty_b;

    const double swap_discount = 1.0 - pp.schedule(gap);
    const double true_price = simulate_swap(pp.pool, side, amount_in).true_price;
    const double executed_in = swap_discount * amount_in;
    const auto executed = swap_exact_in(pp.pool, side, executed_in);
    pp.pool = executed.pool;
    pp.pending = PendingSwap{true, true_price, side, amount_in, executed_in, executed.amount_out, current_block};
    return Trade{side, executed_in, executed.amount_out};
  }

  const double amount_out = simulate_swap(pp.pool, side, amount_in).amount_out;
  const double budget = side == Side::BuyA ? pp.hedger.hedge_available_a : pp.hedger.hedge_available_b;
  if (!(amount_out > 0.0 && budget >= amount_out)) {
    throw swap_rejected("revert: price is not attested (hedge budget does not cover the swap)");
  }
  const auto executed = swap_exact_in(pp.pool, side, amount_in);
  pp.pool = executed.pool;
  pp.pending = PendingSwap{false, 0.0, side, amount_in, amount_in, executed.amount_out, current_block};
  return Trade{side, amount_in, executed.amount_out};
}

inline void after_swap(ProtectedPool& pp, Side side, double amount_in, std::int64_t current_block) {
  if (!pp.pending) {
    throw protocol_error("after_swap called without a matching before_swap");
  }
  const PendingSwap pending = *pp.pending;
  if (pending.side != side || pending.amount_in != amount_in || pending.block != current_block) {
    throw protocol_error("after_swap arguments do not match the swap in flight");
  }

  if (pending.first_in_block) {
    auto rebalanced = vault_rebalance(std::move(pp.vault), pp.pool, pending.true_price);
    pp.vault = std::move(rebalanced.vault);
    pp.pool = rebalanced.pool;
    pp.b_previous = current_block;
  } else if (side == Side::BuyA) {
    pp.hedger.hedge_available_a -= pending.amount_out;
    pp.hedger.hedge_available_b += pending.executed_in;
  } else {
    pp.hedger.hedge_available_b -= pending.amount_out;
    pp.hedger.hedge_available_a += pending.executed_in;
  }
  pp.pending.reset();
}

// before_swap followed by after_swap.
inline Trade protected_swap(ProtectedPool& pp, Side side, double amount_in, std::int64_t current_block) {
  const Trade executed = before_swap(pp, side, amount_in, current_block);
  after_swap(pp, side, amount_in, current_block);
  return executed;
}

}  // namespace lvrlab
