#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "orl/dataset.hpp"
#include "orl/low_adaptive.hpp"
#include "orl/mdp.hpp"
#include "orl/rng.hpp"

using namespace orl;
using namespace testutil;

namespace {

/// Four-arm one-step instance with one clearly dominant arm.
TabularMDP gap_bandit() {
  TabularMDP m(1, 4, 1);
  m.d1 = {1.0};
  m.noise = RewardNoise::deterministic;
  for (int a = 0; a < 4; ++a) {
    m.p(0, 0, a, 0) = 1.0;
    m.reward(0, 0, a) = a == 0 ? 0.9 : 0.1;
  }
  return m;
}

}  // namespace

TEST_SUITE("low_adaptive") {

TEST_CASE("stage schedule covers the budget with few doubling stages") {
  CHECK_THROWS_AS(stage_schedule(0), std::invalid_argument);
  CHECK(stage_schedule(1) == std::vector<int>{1});
  CHECK(stage_schedule(4) == std::vector<int>{2, 2});
  CHECK(stage_schedule(256) == std::vector<int>{16, 64, 128, 48});
  for (int T : {1, 2, 3, 7, 16, 100, 256, 1000, 4096, 100000}) {
    const std::vector<int> sched = stage_schedule(T);
    int total = 0;
    for (int len : sched) {
      CHECK(len >= 1);
      total += len;
    }
    CHECK(total == T);
    // lengths grow until the truncated last stage
    for (std::size_t k = 0; k + 2 < sched.size(); ++k)
      CHECK(sched[k] <= sched[k + 1]);
    const int cap =
        static_cast<int>(std::ceil(std::log2(std::max(
            2.0, std::log2(std::max(2.0, static_cast<double>(T))))))) +
        2;
    CHECK(static_cast<int>(sched.size()) <= cap);
  }
}

TEST_CASE("episode sampler validates inputs and counts runs") {
  TabularMDP bad(2, 2, 2);  // all-zero rows never normalize
  CHECK_THROWS_AS(Environment(bad, 1), std::invalid_argument);

  TabularMDP m = random_mdp(90, 2, 2, 3, 1.0);
  Environment env(m, 90);
  CHECK(env.S() == 2);
  CHECK(env.A() == 2);
  CHECK(env.H() == 3);
  CHECK(env.episodes_run() == 0);
  std::vector<Transition> ep;
  Policy wrong = Policy::uniform(3, 2, 3);
  CHECK_THROWS_AS(env.episode(wrong, ep), std::invalid_argument);
  CHECK(env.episodes_run() == 0);
  env.episode(Policy::uniform(2, 2, 3), ep);
  CHECK(env.episodes_run() == 1);
  REQUIRE(ep.size() == 3);
  CHECK(ep[1].s == ep[0].s_next);
  CHECK(ep[2].s == ep[1].s_next);
}

TEST_CASE("episode draws depend on the slot, not on deployment history") {
  TabularMDP m = random_mdp(91, 3, 2, 3, 1.0);
  Rng rng(91);
  Policy pa = random_policy(3, 2, 3, rng);
  Policy pb = random_policy(3, 2, 3, rng);
  Policy pc = random_policy(3, 2, 3, rng);

  std::vector<Transition> skip, first, second;
  Environment env1(m, 500);
  env1.episode(pa, skip);
  env1.episode(pb, first);  // slot 1 under pb, after pa

  Environment env2(m, 500);
  env2.episode(pc, skip);
  env2.episode(pb, second);  // slot 1 under pb, after a different policy

  REQUIRE(first.size() == 3);
  REQUIRE(second.size() == 3);
  for (int h = 0; h < 3; ++h) {
    CHECK(first[h].s == second[h].s);
    CHECK(first[h].a == second[h].a);
    CHECK(first[h].r == second[h].r);
    CHECK(first[h].s_next == second[h].s_next);
  }
}

TEST_CASE("deterministic systems yield the predicted trajectory") {
  TabularMDP m = random_mdp(92, 3, 2, 3, 0.0);
  m.noise = RewardNoise::deterministic;
  m.d1 = {0.0, 0.0, 1.0};  // pin the start so the whole path is forced
  auto [pol, vt] = optimal_policy(m);
  Environment env(m, 123);
  std::vector<Transition> ep;
  env.episode(pol, ep);
  int s = 2;
  for (int h = 0; h < 3; ++h) {
    const int a = pol.action(h, s);
    CHECK(ep[h].s == s);
    CHECK(ep[h].a == a);
    CHECK(ep[h].r == doctest::Approx(m.reward(h, s, a)));
    int sp = 0;
    while (m.p(h, s, a, sp) == 0.0) ++sp;
    CHECK(ep[h].s_next == sp);
    s = sp;
  }
}

TEST_CASE("stagewise search rejects oversized inputs") {
  TabularMDP m = random_mdp(93, 2, 2, 2, 1.0);
  Environment env(m, 93);
  CHECK_THROWS_AS(apeve(env, 0), std::invalid_argument);
  ApeveConfig tight;
  tight.policy_cap = 8;  // 16 deterministic policies here
  CHECK_THROWS_AS(apeve(env, 16, tight), std::invalid_argument);
  CHECK(env.episodes_run() == 0);  // refusals consume no budget
}

TEST_CASE("stagewise search spends exactly the budget in fixed batches") {
  TabularMDP m = random_mdp(94, 2, 2, 2, 1.0);
  const int T = 128;
  ApeveResult r1, r2;
  apeve_regret(m, T, 11, {}, &r1);
  apeve_regret(m, T, 77, {}, &r2);

  const std::vector<int> sched = stage_schedule(T);
  REQUIRE(r1.ledger.batch_count() == static_cast<int>(sched.size()));
  CHECK(static_cast<int>(r1.ledger.policy_per_episode.size()) == T);
  int offset = 0;
  for (std::size_t k = 0; k < sched.size(); ++k) {
    CHECK(r1.ledger.batch_starts[k] == offset);
    offset += sched[k];
  }
  // batch boundaries are decided by the budget alone, never by the draws
  CHECK(r1.ledger.batch_starts == r2.ledger.batch_starts);

  // switching stays far below the episode count
  const int per_stage_cap = 2 * 2 * 2 + 1;  // one policy per cell plus crude
  CHECK(r1.ledger.switch_count() <
        r1.ledger.batch_count() * per_stage_cap);
  CHECK(r1.ledger.switch_count() < T / 2);
}

TEST_CASE("stage records partition the candidates") {
  TabularMDP m = random_mdp(95, 2, 2, 2, 1.0);
  ApeveResult detail;
  apeve_regret(m, 64, 95, {}, &detail);
  REQUIRE(!detail.stages.empty());
  std::size_t prev_active = deterministic_policy_count(2, 2, 2);
  for (const ApeveStageRecord& rec : detail.stages) {
    CHECK(rec.active.size() <= prev_active);
    CHECK(rec.estimate.size() == rec.active.size());
    CHECK(rec.lo.size() == rec.active.size());
    CHECK(rec.hi.size() == rec.active.size());
    for (std::size_t j = 0; j < rec.active.size(); ++j) {
      CHECK(rec.lo[j] <= rec.estimate[j]);
      CHECK(rec.estimate[j] <= rec.hi[j]);
    }
    for (std::uint64_t gone : rec.eliminated)
      CHECK(std::find(rec.active.begin(), rec.active.end(), gone) !=
            rec.active.end());
    prev_active = rec.active.size() - rec.eliminated.size();
    CHECK(prev_active >= 1);
  }
  CHECK(detail.survivors.indices.size() == prev_active);
  // the recommendation is one of the survivors
  bool found = false;
  for (std::uint64_t idx : detail.survivors.indices)
    if (detail.survivors.policy(idx).pi == detail.chosen.pi) found = true;
  CHECK(found);
}

TEST_CASE("a dominant arm eliminates the rest") {
  TabularMDP m = gap_bandit();
  RegretSummary sum;
  ApeveResult detail;
  sum = apeve_regret(m, 512, 9, {}, &detail);
  CHECK(sum.episodes == 512);
  REQUIRE(detail.survivors.indices.size() == 1);
  CHECK(detail.survivors.indices[0] == 0);
  CHECK(detail.chosen.action(0, 0) == 0);
  CHECK(sum.best_value_survived);
  CHECK(sum.elimination_sound);
  // suboptimal arms only run while they survive, so regret stays well
  // below the worst case of 0.8 per episode
  CHECK(sum.total_regret > 0.0);
  CHECK(sum.total_regret < 0.8 * 512 * 0.5);
}

TEST_CASE("elimination never drops all optimal candidates under valid bounds") {
  int survived = 0;
  for (int seed = 0; seed < 10; ++seed) {
    TabularMDP m = random_mdp(9600 + seed, 2, 2, 2, 1.0);
    RegretSummary sum = apeve_regret(m, 256, 40 + seed);
    CHECK(sum.elimination_sound);
    CHECK(sum.total_regret >= -1e-9);
    if (sum.best_value_survived) ++survived;
  }
  CHECK(survived >= 8);
}

TEST_CASE("average regret falls as the budget grows") {
  TabularMDP m = gap_bandit();
  const RegretSummary small = apeve_regret(m, 64, 5);
  const RegretSummary big = apeve_regret(m, 1024, 5);
  CHECK(big.total_regret / 1024.0 < small.total_regret / 64.0);
}

TEST_CASE("reward-free collection obeys its batch and budget accounting") {
  TabularMDP m = random_mdp(97, 2, 2, 2, 1.0);
  Environment env(m, 97);
  LarfeConfig cfg;
  cfg.budget_scale = 0.05;
  LarfeResult res = larfe(env, 2.0, cfg);
  CHECK_THROWS_AS(larfe(env, 0.0, cfg), std::invalid_argument);

  CHECK(res.ledger.batch_count() == 2 * m.H);
  const int episodes = static_cast<int>(res.ledger.policy_per_episode.size());
  CHECK(episodes == env.episodes_run());
  CHECK(res.data.n == episodes);
  CHECK(episodes % m.H == 0);  // equal per-layer budgets
  for (int k = 1; k < res.ledger.batch_count(); ++k)
    CHECK(res.ledger.batch_starts[k] >= res.ledger.batch_starts[k - 1]);

  // boundaries depend only on the budget arithmetic
  Environment env2(m, 1097);
  LarfeResult res2 = larfe(env2, 2.0, cfg);
  CHECK(res.ledger.batch_starts == res2.ledger.batch_starts);

  // the returned model is exactly the plug-in of the returned data
  PluginModel pm = plugin_model(res.data);
  CHECK(pm.mdp.P == res.model.mdp.P);
  CHECK(pm.mdp.r == res.model.mdp.r);
}

TEST_CASE("reward-free data covers every cell of a mixing instance") {
  TabularMDP m = random_mdp(98, 2, 2, 2, 1.0);
  Environment env(m, 98);
  LarfeConfig cfg;
  cfg.budget_scale = 0.5;
  LarfeResult res = larfe(env, 0.5, cfg);
  for (int h = 0; h < 2; ++h)
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) CHECK(res.model.count(h, s, a) > 0);
}

TEST_CASE("the learned model certifies planning for arbitrary rewards") {
  TabularMDP m = random_mdp(99, 2, 2, 2, 1.0);
  Environment env(m, 99);
  LarfeResult res = larfe(env, 0.5);
  const double worst = larfe_certificate(m, res.model, 5, 99);
  CHECK(worst >= 0.0);
  CHECK(worst <= 0.5);
  // deterministic scoring
  CHECK(larfe_certificate(m, res.model, 5, 99) == doctest::Approx(worst));

  TabularMDP other = random_mdp(100, 3, 2, 2, 1.0);
  CHECK_THROWS_AS(larfe_certificate(other, res.model, 2, 1),
                  std::invalid_argument);
}

}  // TEST_SUITE
