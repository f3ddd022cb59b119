#include <gtest/gtest.h>

#include "amw/model.hpp"
#include "amw/rng.hpp"
#include "expect_error.hpp"
#include "reference.hpp"

namespace amw {
namespace {

TEST(Traffic, UniformIsValid) { EXPECT_NO_THROW(validate_traffic(TrafficSpec::uniform(4, 0.04))); }

TEST(Traffic, PermutationIsValid) {
  TrafficSpec t;
  t.nu = RealMatrix::identity(3);
  t.epsilon = 0.5;
  EXPECT_NO_THROW(validate_traffic(t));
}

TEST(Traffic, RowSumAboveOneRejected) {
  TrafficSpec t = TrafficSpec::uniform(2, 0.1);
  t.nu(0, 0) = 0.6;  // row 0 sums to 1.1
  EXPECT_AMW_ERROR(validate_traffic(t), ErrorCode::NonDoublyStochastic);
}

TEST(Traffic, ToleranceIsTight) {
  TrafficSpec t = TrafficSpec::uniform(2, 0.1);
  t.nu(0, 0) += 1e-11;
  EXPECT_AMW_ERROR(validate_traffic(t), ErrorCode::NonDoublyStochastic);
}

TEST(Traffic, EpsilonOutsideUnitIntervalRejected) {
  EXPECT_AMW_ERROR(validate_traffic(TrafficSpec::uniform(2, 0.0)), ErrorCode::BadEpsilon);
  EXPECT_AMW_ERROR(validate_traffic(TrafficSpec::uniform(2, 1.0)), ErrorCode::BadEpsilon);
}

TEST(Traffic, LambdaIsScaledNu) {
  const auto t = TrafficSpec::uniform(4, 0.04);
  EXPECT_DOUBLE_EQ(t.lambda(1, 2), 0.96 * 0.25);
  EXPECT_DOUBLE_EQ(t.rho(), 0.96);
}

TEST(ScheduleType, RejectsRepeatedOutput) {
  EXPECT_AMW_ERROR(Schedule(std::vector<int>{0, 0}), ErrorCode::InvalidState);
}

TEST(ScheduleType, PartialMatchingAllowed) {
  const Schedule s(std::vector<int>{-1, 0});
  EXPECT_FALSE(s.is_permutation());
  EXPECT_EQ(s.to_matrix(), (IntMatrix{{0, 0}, {1, 0}}));
  EXPECT_EQ(Schedule::from_matrix(s.to_matrix()), s);
}

TEST(ScheduleType, CyclicShift) {
  const auto s = Schedule::cyclic(3, 1);
  EXPECT_EQ(s.columns(), (std::vector<int>{1, 2, 0}));
}

TEST(Dynamics, EmptyQueuesWasteEveryService) {
  SwitchState st = SwitchState::initial(3);
  auto [next, out] = step_dynamics(st, IntMatrix(3, 0));
  EXPECT_EQ(next.q, IntMatrix(3, 0));
  EXPECT_EQ(out.unused, IntMatrix::identity(3));
  EXPECT_EQ(out.served, IntMatrix(3, 0));
  EXPECT_EQ(next.t, 1);
}

TEST(Dynamics, TwoByTwoServing) {
  SwitchState st = SwitchState::initial(2);
  st.q = IntMatrix{{1, 0}, {0, 0}};
  const IntMatrix a(2, 0);
  auto [next, out] = step_dynamics(st, a);
  const auto oracle = ref::step(ref::to_grid(st.q), st.s.columns(), st.r, ref::to_grid(a));
  EXPECT_EQ(ref::to_grid(next.q), oracle.q_next);
  EXPECT_EQ(ref::to_grid(out.unused), oracle.unused);
  EXPECT_EQ(out.unused, (IntMatrix{{0, 0}, {0, 1}}));
}

TEST(Dynamics, ReconfigurationGatesService) {
  SwitchState st = SwitchState::initial(2);
  st.q = IntMatrix{{1, 0}, {0, 0}};
  st.r = 3;
  st.t_last_reconfig = 0;
  st.t = 17;  // r = 3 would be inconsistent at t = 17 with t_last = 0 but dynamics do not care
  const IntMatrix a{{1, 1}, {0, 0}};
  auto [next, out] = step_dynamics(st, a);
  const auto oracle = ref::step(ref::to_grid(st.q), st.s.columns(), st.r, ref::to_grid(a));
  EXPECT_EQ(ref::to_grid(next.q), oracle.q_next);
  EXPECT_EQ(next.q, (IntMatrix{{2, 1}, {0, 0}}));
  EXPECT_EQ(out.unused, IntMatrix(2, 0));
  EXPECT_EQ(next.r, 2);
}

TEST(Dynamics, NegativeArrivalsRejected) {
  SwitchState st = SwitchState::initial(2);
  EXPECT_ANY_THROW(step_dynamics(st, IntMatrix{{-1, 0}, {0, 0}}));
}

TEST(Reconfiguration, LosesExactlyDeltaRSlots) {
  for (int dr : {1, 20}) {
    SwitchState st = SwitchState::initial(2);
    st.q = IntMatrix(2, 1000);
    st = begin_reconfiguration(st, Schedule::cyclic(2, 1), dr);
    EXPECT_EQ(st.r, dr);
    EXPECT_EQ(st.t_last_reconfig, 0);
    int idle = 0;
    for (int k = 0; k < dr + 5; ++k) {
      auto [next, out] = step_dynamics(st, IntMatrix(2, 0));
      if (out.served_total == 0) ++idle;
      EXPECT_EQ(out.served_total == 0, k < dr);
      st = next;
    }
    EXPECT_EQ(idle, dr);
  }
}

TEST(Reconfiguration, RejectedWhileReconfiguring) {
  SwitchState st = SwitchState::initial(2);
  st.r = 5;
  EXPECT_AMW_ERROR(begin_reconfiguration(st, Schedule::identity(2), 20), ErrorCode::ReconfigWhileReconfiguring);
}

TEST(DynamicsProperty, MatchesReferenceOnRandomStates) {
  rng::Xoshiro256StarStar g(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + static_cast<int>(g() % 4);
    SwitchState st = SwitchState::initial(n);
    for (auto& v : st.q.flat()) v = static_cast<std::int64_t>(g() % 3);
    st.s = Schedule::cyclic(n, static_cast<int>(g() % static_cast<std::uint64_t>(n)));
    st.r = static_cast<int>(g() % 3);
    IntMatrix a(n, 0);
    for (auto& v : a.flat()) v = static_cast<std::int64_t>(g() % 2);
    auto [next, out] = step_dynamics(st, a);
    const auto oracle = ref::step(ref::to_grid(st.q), st.s.columns(), st.r, ref::to_grid(a));
    ASSERT_EQ(ref::to_grid(next.q), oracle.q_next);
    ASSERT_EQ(ref::to_grid(out.unused), oracle.unused);
    ASSERT_EQ(next.q.total() - st.q.total(), a.total() - out.served.total());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        ASSERT_EQ(out.unused(i, j) * next.q(i, j), 0);
        const int gate = (st.s.connects(i, j) && st.r == 0) ? 1 : 0;
        ASSERT_EQ(out.served(i, j) + out.unused(i, j), gate);
      }
    }
  }
}

}  // namespace
}  // namespace amw
