#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lvrlab/agents.hpp"
#include "lvrlab/hooks.hpp"

using namespace lvrlab;

namespace {

ProtectedPool fresh(double beta1, double a = 100, double b = 100) {
  return make_protected_pool(new_pool(a, b, 0), RebateSchedule::linear(beta1, 10));
}

}  // namespace

// -----------------------------------------------------------------------------
// Rebate schedule

TEST(Rebate, ZeroAtAndBeyondHorizon) {
  const auto s = RebateSchedule::linear(0.75, 8);
  EXPECT_EQ(rebate(s, 8), 0.0);
  EXPECT_EQ(rebate(s, 13), 0.0);
  EXPECT_EQ(rebate(s, 1), 0.75);
}

TEST(Rebate, StrictlyDecreasingBelowHorizon) {
  const auto s = RebateSchedule::linear(1.0, 12);
  for (int g1 = 1; g1 < 12; ++g1) {
    for (int g2 = g1 + 1; g2 < 12; ++g2) {
      EXPECT_GT(rebate(s, g1), rebate(s, g2));
    }
  }
}

TEST(Rebate, RejectsNonPositiveGap) {
  const auto s = RebateSchedule::linear(0.5, 4);
  EXPECT_THROW(rebate(s, 0), argument_error);
  EXPECT_THROW(rebate(s, -3), argument_error);
}

TEST(Rebate, ScheduleValidation) {
  EXPECT_THROW(RebateSchedule({0.5, 0.5, 0.0}), config_error);
  EXPECT_THROW(RebateSchedule({0.5, 0.2}), config_error);
  EXPECT_THROW(RebateSchedule({1.5, 0.0}), config_error);
  EXPECT_THROW(RebateSchedule::linear(0.5, 1), config_error);
  EXPECT_NO_THROW(RebateSchedule({0.0, 0.0, 0.0}));
  EXPECT_NO_THROW(RebateSchedule({0.9, 0.3, 0.0}));
}

// -----------------------------------------------------------------------------
// First swap of a block

TEST(BeforeSwap, FullRebateRecordsTruePriceWithoutExecuting) {
  auto pp = fresh(1.0);
  const Trade executed = before_swap(pp, Side::BuyA, 100, 1);
  EXPECT_EQ(executed.amount_in, 0.0);
  EXPECT_EQ(executed.amount_out, 0.0);
  ASSERT_TRUE(pp.pending_true_price());
  EXPECT_DOUBLE_EQ(*pp.pending_true_price(), 4.0);
  EXPECT_EQ(pp.pool, new_pool(100, 100, 0));
}

TEST(BeforeSwap, ZeroRebateExecutesFullSwap) {
  auto pp = fresh(0.0);
  const Trade executed = before_swap(pp, Side::BuyA, 100, 1);
  EXPECT_DOUBLE_EQ(executed.amount_in, 100.0);
  EXPECT_DOUBLE_EQ(pp.pool.reserve_a, 50.0);
  EXPECT_DOUBLE_EQ(pp.pool.reserve_b, 200.0);
}

TEST(AfterSwap, RebalanceMovesRetainedTokensToVault) {
  auto pp = fresh(1.0);
  before_swap(pp, Side::BuyA, 100, 1);
  after_swap(pp, Side::BuyA, 100, 1);
  EXPECT_NEAR(pp.pool.reserve_a, 25.0, 1e-9);
  EXPECT_NEAR(pp.pool.reserve_b, 100.0, 1e-9);
  EXPECT_NEAR(spot_price(pp.pool), 4.0, 4.0 * 1e-9);
  EXPECT_NEAR(pp.vault.balance_a, 100.0 - 100.0 / 4.0, 1e-9);
  EXPECT_EQ(pp.vault.balance_b, 0.0);
  EXPECT_EQ(pp.b_previous, 1);
  EXPECT_FALSE(pp.pending);
}

TEST(AfterSwap, AlreadyAtTruePriceLeavesVaultEmpty) {
  auto pp = fresh(0.0);
  protected_swap(pp, Side::BuyA, 100, 1);
  EXPECT_EQ(pp.vault.balance_a, 0.0);
  EXPECT_EQ(pp.vault.balance_b, 0.0);
}

TEST(AfterSwap, WithoutBeforeIsProtocolMisuse) {
  auto pp = fresh(1.0);
  EXPECT_THROW(after_swap(pp, Side::BuyA, 100, 1), protocol_error);
}

TEST(AfterSwap, MismatchedArgumentsAreProtocolMisuse) {
  auto pp = fresh(1.0);
  before_swap(pp, Side::BuyA, 100, 1);
  EXPECT_THROW(after_swap(pp, Side::BuyA, 50, 1), protocol_error);
  EXPECT_THROW(before_swap(pp, Side::BuyA, 1, 1), protocol_error);
}

TEST(BeforeSwap, RejectsBlockBeforeLastSwap) {
  auto pp = fresh(1.0);
  pp.b_previous = 5;
  EXPECT_THROW(before_swap(pp, Side::BuyA, 1, 4), argument_error);
  EXPECT_THROW(before_swap(pp, Side::BuyA, -1, 6), argument_error);
}

TEST(BeforeSwap, FirstSwapDrainsHedgerAndReAddsVault) {
  auto pp = fresh(1.0);
  pp.hedger = hedger_deposit(pp.hedger, 3, 4, "builder");
  pp.vault.balance_a = 10;
  pp.vault.pct_to_re_add = 0.5;
  const PoolState expected = first_swap_pool(pp, 1);
  before_swap(pp, Side::BuyA, 0, 1);
  EXPECT_EQ(pp.pool, expected);
  EXPECT_EQ(pp.hedger.balance_a, 0.0);
  EXPECT_EQ(pp.hedger.hedge_available_a, 0.0);
  EXPECT_NEAR(pp.vault.balance_a, 5.0, 1e-12);
  // Drain puts (103, 104) in the pool; re-add of 5 A at price 104/103 preserves price.
  EXPECT_NEAR(spot_price(pp.pool), 104.0 / 103.0, 1e-12);
  EXPECT_NEAR(pool_value(pp.pool, 104.0 / 103.0), 2 * 104.0 + 5.0 * 104.0 / 103.0, 1e-9);
}

// -----------------------------------------------------------------------------
// Same-block swaps

TEST(SameBlockSwap, BudgetGate) {
  auto pp = fresh(1.0);
  pp.b_previous = 7;
  const double in = amount_in_for_output(pp.pool, Side::BuyA, 5.0);

  auto covered = pp;
  covered.hedger.hedge_available_a = 10;
  const Trade t = before_swap(covered, Side::BuyA, in, 7);
  EXPECT_NEAR(t.amount_out, 5.0, 1e-12);

  auto short_budget = pp;
  short_budget.hedger.hedge_available_a = 3;
  EXPECT_THROW(before_swap(short_budget, Side::BuyA, in, 7), swap_rejected);
  EXPECT_EQ(short_budget.pool, pp.pool);
  EXPECT_FALSE(short_budget.pending);
}

TEST(SameBlockSwap, BudgetLedgerArithmetic) {
  // Pool (25, 24): paying 6 B returns exactly 5 A.
  auto pp = make_protected_pool(new_pool(25, 24, 0), RebateSchedule::linear(1.0, 10));
  pp.b_previous = 3;
  pp.hedger.hedge_available_a = 10;
  const Trade t = protected_swap(pp, Side::BuyA, 6, 3);
  EXPECT_DOUBLE_EQ(t.amount_out, 5.0);
  EXPECT_DOUBLE_EQ(pp.hedger.hedge_available_a, 5.0);
  EXPECT_DOUBLE_EQ(pp.hedger.hedge_available_b, 6.0);
}

TEST(SameBlockSwap, BuyingBUsesTokenBBudget) {
  auto pp = fresh(1.0);
  pp.b_previous = 2;
  pp.hedger.hedge_available_b = 8;
  const Trade t = protected_swap(pp, Side::BuyB, 5, 2);
  EXPECT_NEAR(pp.hedger.hedge_available_b, 8 - t.amount_out, 1e-12);
  EXPECT_NEAR(pp.hedger.hedge_available_a, 5, 1e-12);
}

TEST(SameBlockSwap, ZeroOutputIsNotAttested) {
  auto pp = fresh(1.0);
  pp.b_previous = 2;
  pp.hedger.hedge_available_a = 10;
  EXPECT_THROW(before_swap(pp, Side::BuyA, 0, 2), swap_rejected);
}

// -----------------------------------------------------------------------------
// Hedger

TEST(Hedger, DepositIncreasesBudgetsAndSetsOwner) {
  auto h = hedger_deposit({}, 10, 0, "alice");
  EXPECT_EQ(h.hedge_available_a, 10.0);
  EXPECT_EQ(h.hedge_available_b, 0.0);
  EXPECT_EQ(h.owner, "alice");
  const auto same = hedger_deposit(h, 0, 0, "bob");
  EXPECT_EQ(same.hedge_available_a, 10.0);
  EXPECT_EQ(same.owner, "bob");
  const auto split = hedger_deposit(hedger_deposit({}, 4, 1, "x"), 6, 2, "x");
  const auto merged = hedger_deposit({}, 10, 3, "x");
  EXPECT_EQ(split.hedge_available_a, merged.hedge_available_a);
  EXPECT_EQ(split.balance_b, merged.balance_b);
  EXPECT_THROW(hedger_deposit({}, -1, 0, "x"), argument_error);
}

TEST(Hedger, WithdrawWithinBudget) {
  const auto h = hedger_deposit({}, 10, 6, "alice");
  const auto emptied = hedger_withdraw(h, 10, 6);
  EXPECT_EQ(emptied.hedge_available_a, 0.0);
  EXPECT_EQ(emptied.hedge_available_b, 0.0);
  EXPECT_THROW(hedger_withdraw(h, 11, 0), withdrawal_rejected);
  const auto same = hedger_withdraw(h, 0, 0);
  EXPECT_EQ(same.hedge_available_a, 10.0);
  EXPECT_EQ(same.balance_b, 6.0);
}

TEST(Hedger, DrainMovesEverythingAndZeroesBudgets) {
  const auto empty = hedger_drain({});
  EXPECT_EQ(empty.amount_a, 0.0);
  EXPECT_EQ(empty.amount_b, 0.0);

  auto h = hedger_deposit({}, 3, 4, "alice");
  h.hedge_available_a = 17;  // budgets can drift from balances through same-block swaps
  const auto d = hedger_drain(h);
  EXPECT_EQ(d.amount_a, 3.0);
  EXPECT_EQ(d.amount_b, 4.0);
  EXPECT_EQ(d.hedger.hedge_available_a, 0.0);
  EXPECT_EQ(d.hedger.hedge_available_b, 0.0);
  EXPECT_EQ(d.hedger.balance_a, 0.0);

  auto pp = fresh(1.0);
  pp.hedger = h;
  EXPECT_EQ(first_swap_pool(pp, 1), new_pool(103, 104, 0));
}

// -----------------------------------------------------------------------------
// Vault

TEST(Vault, ReAddOfEmptyVaultIsIdentity) {
  const auto pool = new_pool(25, 100, 0);
  const auto r = vault_re_add({0, 0, 1.0, 0, 0}, pool);
  EXPECT_EQ(r.pool, pool);
}

TEST(Vault, ReAddInjectsValueAtPoolPrice) {
  const auto r = vault_re_add({75, 0, 1.0, 0, 0}, new_pool(25, 100, 0));
  EXPECT_DOUBLE_EQ(r.pool.reserve_a, 62.5);
  EXPECT_DOUBLE_EQ(r.pool.reserve_b, 250.0);
  EXPECT_DOUBLE_EQ(spot_price(r.pool), 4.0);
  EXPECT_EQ(r.vault.balance_a, 0.0);
  // 75 A go in, 37.5 A stay, the counterparty takes 37.5 A and supplies 150 B.
  EXPECT_DOUBLE_EQ(r.counterparty_a, -37.5);
  EXPECT_DOUBLE_EQ(r.counterparty_b, 150.0);
}

TEST(Vault, ReAddWithZeroPercentAndMinimumsIsIdentity) {
  const auto pool = new_pool(25, 100, 0);
  const auto r = vault_re_add({75, 10, 0.0, 0, 0}, pool);
  EXPECT_EQ(r.pool, pool);
  EXPECT_EQ(r.vault.balance_a, 75.0);
}

TEST(Vault, TrancheNeverExceedsBalance) {
  const auto r = vault_re_add({2, 1, 0.1, 5, 0.5}, new_pool(10, 10, 0));
  EXPECT_EQ(r.vault.balance_a, 0.0);
  EXPECT_DOUBLE_EQ(r.vault.balance_b, 0.5);
}

TEST(Vault, RebalanceRemovesBoughtToken) {
  const auto up = vault_rebalance({}, new_pool(100, 100, 0), 4.0);
  EXPECT_DOUBLE_EQ(up.removed_a, 75.0);
  EXPECT_EQ(up.pool, new_pool(25, 100, 0));
  EXPECT_DOUBLE_EQ(up.vault.balance_a, 75.0);

  const auto aligned = vault_rebalance({}, new_pool(25, 100, 0), 4.0);
  EXPECT_EQ(aligned.removed_a, 0.0);
  EXPECT_EQ(aligned.removed_b, 0.0);

  const auto down = vault_rebalance({}, new_pool(100, 100, 0), 0.25);
  EXPECT_DOUBLE_EQ(down.removed_b, 75.0);
  EXPECT_EQ(down.pool, new_pool(100, 25, 0));
  EXPECT_THROW(vault_rebalance({}, new_pool(1, 1, 0), 0.0), argument_error);
}

TEST(Vault, MinimumsDrainVaultInBoundedCalls) {
  VaultState v{7.3, 2.0, 0.0, 0.5, 0.3};
  PoolState pool = new_pool(50, 80, 0);
  const int bound = static_cast<int>(std::max(std::ceil(7.3 / 0.5), std::ceil(2.0 / 0.3)));
  int calls = 0;
  while ((v.balance_a > 0 || v.balance_b > 0) && calls < 1000) {
    auto r = vault_re_add(v, pool);
    v = r.vault;
    pool = r.pool;
    ++calls;
  }
  EXPECT_EQ(v.balance_a, 0.0);
  EXPECT_EQ(v.balance_b, 0.0);
  EXPECT_LE(calls, bound);
}

// -----------------------------------------------------------------------------
// Properties of a first-swap cycle

TEST(FirstSwap, PriceEqualsTruePriceAndProfitIsBracketed) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::lognormal_distribution<double> move(0.0, 0.2);
  for (int i = 0; i < 200; ++i) {
    const double beta1 = unit(rng);
    const auto pool = new_pool(50 + 100 * unit(rng), 50 + 100 * unit(rng), 0);
    const double p = spot_price(pool) * move(rng);
    const auto full = arbitrage_trade(pool, p);
    if (!full) {
      continue;
    }
    const double full_profit = trade_profit(*full, p);
    auto pp = make_protected_pool(pool, RebateSchedule::linear(beta1, 5));
    const Trade executed = protected_swap(pp, full->side, full->amount_in, 1);
    EXPECT_NEAR(spot_price(pp.pool), p, 1e-9 * p);
    const double d = trade_profit(executed, p);
    EXPECT_GE(d, (1.0 - beta1) * full_profit - 1e-9);
    EXPECT_LE(d, full_profit + 1e-9);
  }
}

TEST(FirstSwap, ZeroScheduleTraceEqualsUnprotectedPool) {
  std::mt19937_64 rng(23);
  std::lognormal_distribution<double> move(0.0, 0.05);
  PoolState plain = new_pool(100, 100, 0);
  auto pp = make_protected_pool(plain, RebateSchedule({0.0, 0.0, 0.0}));
  double p = 1.0;
  for (int block = 1; block <= 500; ++block) {
    p *= move(rng);
    const auto a = builder_arbitrage(plain, p);
    auto b = builder_arbitrage(std::move(pp), p, block);
    plain = a.pool;
    pp = std::move(b.pool);
    ASSERT_EQ(pp.pool, plain);
    ASSERT_EQ(a.profit, b.profit);
  }
  EXPECT_EQ(pp.vault.balance_a, 0.0);
  EXPECT_EQ(pp.vault.balance_b, 0.0);
}
