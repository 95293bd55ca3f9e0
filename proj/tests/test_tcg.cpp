// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "nocweave/error.hpp"
#include "nocweave/tcg.hpp"

using namespace nocweave;

namespace {

Tcg chain() {
  Tcg t;
  t.tasks = {{0, 5, 0, std::nullopt}, {1, 3, std::nullopt, std::nullopt}};
  t.messages = {{0, 1, 16}};
  t.mapping = {{0, 0}, {1, 1}};
  return t;
}

}  // namespace

TEST(Spec, ChainHandEvaluation) {
  TimingSpec spec = compute_spec(chain(), RtParams{0, Rational(4)});
  EXPECT_EQ(spec.end.at(0), Rational(5));
  EXPECT_EQ(spec.end.at(1), Rational(12));
}

TEST(Spec, InfiniteAlphaIsLongestPathOfDurations) {
  Tcg t;
  t.tasks = {{0, 2, 1, {}}, {1, 4, 0, {}}, {2, 3, {}, {}}, {3, 1, {}, {}}};
  t.messages = {{0, 2, 100}, {1, 2, 7}, {2, 3, 9}};
  TimingSpec spec = compute_spec(t, RtParams{0, std::nullopt});
  EXPECT_EQ(spec.end.at(2), Rational(4 + 3));
  EXPECT_EQ(spec.end.at(3), Rational(8));
}

TEST(Spec, MaxOverParents) {
  Tcg t;
  t.tasks = {{0, 7, 0, {}}, {1, 9, 0, {}}, {2, 1, {}, {}}};
  t.messages = {{0, 2, 8}, {1, 2, 8}};
  TimingSpec spec = compute_spec(t, RtParams{0, Rational(4)});
  EXPECT_EQ(spec.end.at(2), Rational(12));
}

TEST(Spec, FractionalDelayStaysExact) {
  Tcg t = chain();
  t.messages[0].bits = 10;
  TimingSpec spec = compute_spec(t, RtParams{1, Rational(4)});
  EXPECT_EQ(spec.end.at(1), Rational(5) + 1 + Rational(10, 4) + 3);
}

TEST(Spec, Errors) {
  Tcg cyc;
  cyc.tasks = {{0, 1, 0, {}}, {1, 1, {}, {}}};
  cyc.messages = {{0, 1, 4}, {1, 0, 4}};
  EXPECT_THROW(compute_spec(cyc, RtParams{0, Rational(4)}), Error);
  Tcg no_arrival;
  no_arrival.tasks = {{0, 1, {}, {}}};
  EXPECT_THROW(compute_spec(no_arrival, RtParams{0, Rational(4)}), Error);
}

TEST(Spec, MonotoneInLatencyAndAlpha) {
  SyntheticTcgOptions opt;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Tcg t = generate_synthetic_tcg(opt, seed);
    TimingSpec base = compute_spec(t, RtParams{4, Rational(8)});
    TimingSpec more_l = compute_spec(t, RtParams{6, Rational(8)});
    TimingSpec less_a = compute_spec(t, RtParams{4, Rational(4)});
    for (const auto& [id, end] : base.end) {
      EXPECT_GE(more_l.end.at(id), end);
      EXPECT_GE(less_a.end.at(id), end);
    }
    for (const Message& m : t.messages) {
      EXPECT_GE(base.end.at(m.dst), base.end.at(m.src) + t.task(m.dst).duration);
    }
  }
}

TEST(Spec, IndependentOfListOrder) {
  Tcg t = generate_synthetic_tcg(SyntheticTcgOptions{}, 3);
  TimingSpec a = compute_spec(t, RtParams{2, Rational(4)});
  std::reverse(t.tasks.begin(), t.tasks.end());
  std::reverse(t.messages.begin(), t.messages.end());
  TimingSpec b = compute_spec(t, RtParams{2, Rational(4)});
  EXPECT_EQ(a.end, b.end);
}

TEST(Lags, IdentityShiftAndMissing) {
  TimingSpec spec = compute_spec(chain(), RtParams{0, Rational(4)});
  LagReport same = compute_lags(spec, spec.end);
  EXPECT_EQ(same.sum_lag, 0);
  EXPECT_EQ(same.max_lag, 0);
  std::map<int, Rational> early;
  for (const auto& [id, end] : spec.end) early[id] = end - 1;
  EXPECT_EQ(compute_lags(spec, early).sum_lag, Rational(-2));
  std::map<int, Rational> partial{{0, Rational(5)}};
  try {
    compute_lags(spec, partial);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("task 1"), std::string::npos);
  }
}

TEST(Drift, Classification) {
  std::vector<Rational> constant(5, Rational(-2));
  EXPECT_EQ(detect_drift(constant).kind, DriftKind::None);
  EXPECT_EQ(detect_drift(constant).slope, 0);
  std::vector<Rational> ramp{0, 1, 2, 3};
  DriftResult d = detect_drift(ramp);
  EXPECT_EQ(d.kind, DriftKind::Drift);
  EXPECT_EQ(d.slope, 1);
  std::vector<Rational> alternating{1, -1, 1, -1, 1, -1, 1};
  DriftResult a = detect_drift(alternating);
  EXPECT_EQ(a.kind, DriftKind::Bounded);
  EXPECT_EQ(a.slope, 0);
  std::vector<Rational> two{0, 1};
  EXPECT_THROW(detect_drift(two), Error);
}

TEST(Drift, ConstructedRunWithGrowingLag) {
  Tcg base = chain();
  Tcg unrolled = unroll(base, 5, 20);
  TimingSpec spec = compute_spec(unrolled, RtParams{0, Rational(4)});
  std::map<int, Rational> observed;
  for (const auto& [id, end] : spec.end) observed[id] = end + id / unrolled_stride(base);
  LagReport lags = compute_lags(spec, observed);
  std::vector<Rational> sink;
  for (int i = 0; i < 5; ++i) sink.push_back(lags.lag.at(i * unrolled_stride(base) + 1));
  DriftResult d = detect_drift(sink);
  EXPECT_EQ(d.kind, DriftKind::Drift);
  EXPECT_EQ(d.slope, 1);
}

TEST(Unroll, ShiftsArrivalsAndIds) {
  Tcg u = unroll(chain(), 3, 16);
  ASSERT_EQ(u.tasks.size(), 6u);
  EXPECT_EQ(u.task(4).arrival, 32);
  EXPECT_EQ(u.mapping.at(5), 1);
  TimingSpec spec = compute_spec(u, RtParams{0, Rational(4)});
  EXPECT_EQ(spec.end.at(5), Rational(12 + 32));
}

TEST(Synthetic, ValidAndDeterministic) {
  SyntheticTcgOptions opt;
  opt.tasks = 40;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Tcg a = generate_synthetic_tcg(opt, seed);
    Tcg b = generate_synthetic_tcg(opt, seed);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    EXPECT_EQ(a.tasks.size(), 40u);
    EXPECT_NO_THROW(a.topological_order());
    // Tasks on one PE are totally ordered by the DAG.
    std::map<int, std::vector<int>> by_pe;
    for (int id : a.topological_order()) by_pe[a.mapping.at(id)].push_back(id);
    for (const auto& [pe, ids] : by_pe) {
      for (std::size_t i = 1; i < ids.size(); ++i) {
        std::set<int> reach{ids[i - 1]};
        bool grew = true;
        while (grew) {
          grew = false;
          for (const Message& m : a.messages) {
            if (reach.count(m.src) && reach.insert(m.dst).second) grew = true;
          }
        }
        EXPECT_TRUE(reach.count(ids[i])) << "seed " << seed;
      }
    }
  }
}

TEST(TcgJson, RoundTrip) {
  Tcg t = generate_synthetic_tcg(SyntheticTcgOptions{}, 9);
  t.app_period = 64;
  EXPECT_EQ(to_json(tcg_from_json(to_json(t))).dump(), to_json(t).dump());
}
