#include "amw/model.hpp"

#include <cmath>
#include <sstream>

namespace amw {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonDoublyStochastic: return "NonDoublyStochastic";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::BadTraffic: return "BadTraffic";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::ReconfigWhileReconfiguring: return "ReconfigWhileReconfiguring";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::BadFrame: return "BadFrame";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InsufficientBatches: return "InsufficientBatches";
    case ErrorCode::TooFewIntervals: return "TooFewIntervals";
    case ErrorCode::NegativeArgument: return "NegativeArgument";
    case ErrorCode::NonPositiveData: return "NonPositiveData";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

void check_queue(const QueueMatrix& q, int n) {
  if (q.n() != n) throw Error(ErrorCode::DimensionMismatch, "queue matrix has wrong dimension");
  for (auto v : q.flat()) {
    if (v < 0) throw Error(ErrorCode::InvalidState, "negative queue length");
  }
}

Schedule::Schedule(std::vector<int> col_of_row) : col_(std::move(col_of_row)) {
  const int n = static_cast<int>(col_.size());
  std::vector<bool> used(col_.size(), false);
  for (int c : col_) {
    if (c < -1 || c >= n) throw Error(ErrorCode::InvalidState, "schedule column out of range");
    if (c >= 0) {
      if (used[static_cast<std::size_t>(c)]) {
        throw Error(ErrorCode::InvalidState, "schedule serves an output twice");
      }
      used[static_cast<std::size_t>(c)] = true;
    }
  }
}

Schedule Schedule::identity(int n) { return cyclic(n, 0); }

Schedule Schedule::empty(int n) { return Schedule(std::vector<int>(static_cast<std::size_t>(n), -1)); }

Schedule Schedule::cyclic(int n, int shift) {
  std::vector<int> c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = ((i + shift) % n + n) % n;
  return Schedule(std::move(c));
}

Schedule Schedule::from_matrix(const IntMatrix& m) {
  std::vector<int> c(static_cast<std::size_t>(m.n()), -1);
  for (int i = 0; i < m.n(); ++i) {
    for (int j = 0; j < m.n(); ++j) {
      const auto v = m(i, j);
      if (v != 0 && v != 1) throw Error(ErrorCode::InvalidState, "schedule entries must be 0/1");
      if (v == 1) {
        if (c[static_cast<std::size_t>(i)] != -1) {
          throw Error(ErrorCode::InvalidState, "schedule row serves two outputs");
        }
        c[static_cast<std::size_t>(i)] = j;
      }
    }
  }
  return Schedule(std::move(c));
}

bool Schedule::is_permutation() const noexcept {
  for (int c : col_) {
    if (c < 0) return false;
  }
  return true;  // column uniqueness is a constructor invariant
}

IntMatrix Schedule::to_matrix() const {
  IntMatrix m(n());
  for (int i = 0; i < n(); ++i) {
    if (col_[static_cast<std::size_t>(i)] >= 0) m(i, col_[static_cast<std::size_t>(i)]) = 1;
  }
  return m;
}

SwitchState SwitchState::initial(int n) {
  SwitchState s;
  s.q = QueueMatrix(n);
  s.s = Schedule::identity(n);
  return s;
}

std::string_view to_string(ArrivalFamily f) noexcept {
  switch (f) {
    case ArrivalFamily::Poisson: return "poisson";
    case ArrivalFamily::Bernoulli: return "bernoulli";
    case ArrivalFamily::TruncatedPoisson: return "truncated-poisson";
  }
  return "poisson";
}

ArrivalFamily parse_arrival_family(std::string_view s) {
  if (s == "poisson") return ArrivalFamily::Poisson;
  if (s == "bernoulli") return ArrivalFamily::Bernoulli;
  if (s == "truncated-poisson") return ArrivalFamily::TruncatedPoisson;
  throw Error(ErrorCode::ConfigInvalid, "unknown arrival family '" + std::string(s) + "'");
}

TrafficSpec TrafficSpec::uniform(int n, double epsilon) {
  TrafficSpec t;
  t.nu = RealMatrix(n, 1.0 / n);
  t.epsilon = epsilon;
  return t;
}

void validate_traffic(const TrafficSpec& spec) {
  const int n = spec.n();
  if (n < 1) throw Error(ErrorCode::BadTraffic, "empty rate matrix");
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) {
    throw Error(ErrorCode::BadEpsilon, "epsilon must lie in (0,1)");
  }
  for (double v : spec.nu.flat()) {
    if (!(v >= 0.0)) throw Error(ErrorCode::BadTraffic, "rate matrix has a negative entry");
  }
  for (int k = 0; k < n; ++k) {
    const double rs = spec.nu.row_sum(k);
    const double cs = spec.nu.col_sum(k);
    if (std::abs(rs - 1.0) > kDoublyStochasticTol || std::abs(cs - 1.0) > kDoublyStochasticTol) {
      std::ostringstream os;
      os << "port " << k << " has row sum " << rs << " and column sum " << cs;
      throw Error(ErrorCode::NonDoublyStochastic, os.str());
    }
  }
  switch (spec.family) {
    case ArrivalFamily::Poisson:
      break;
    case ArrivalFamily::Bernoulli:
      break;  // lambda <= 1 holds for every entry of a doubly stochastic matrix
    case ArrivalFamily::TruncatedPoisson: {
      if (!spec.a_max || *spec.a_max < 1) {
        throw Error(ErrorCode::BadTraffic, "truncated-poisson requires a_max >= 1");
      }
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (spec.lambda(i, j) >= *spec.a_max) {
            throw Error(ErrorCode::BadTraffic, "mean rate not below a_max");
          }
        }
      }
      break;
    }
  }
}

void step_dynamics_inplace(SwitchState& state, const IntMatrix& arrivals, SlotOutcome& out) {
  const int n = state.n();
  if (arrivals.n() != n) throw Error(ErrorCode::DimensionMismatch, "arrival matrix has wrong size");
  if (out.arrivals.n() != n) {
    out.arrivals = IntMatrix(n);
    out.served = IntMatrix(n);
    out.unused = IntMatrix(n);
  }
  out.arrivals = arrivals;
  out.served.fill(0);
  out.unused.fill(0);
  out.reconfigured = state.t_last_reconfig == state.t;
  out.arrivals_total = 0;
  out.served_total = 0;
  out.unused_total = 0;

  const bool serving = state.r == 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto a = arrivals(i, j);
      out.arrivals_total += a;
      auto& qij = state.q(i, j);
      qij += a;
      if (serving && state.s.connects(i, j)) {
        if (qij > 0) {
          --qij;
          out.served(i, j) = 1;
          ++out.served_total;
        } else {
          out.unused(i, j) = 1;
          ++out.unused_total;
        }
      }
    }
  }
  if (state.r > 0) --state.r;
  ++state.t;
}

std::pair<SwitchState, SlotOutcome> step_dynamics(const SwitchState& state, const IntMatrix& arrivals) {
  for (auto a : arrivals.flat()) {
    if (a < 0) throw Error(ErrorCode::InvalidState, "negative arrivals");
  }
  SwitchState next = state;
  SlotOutcome out;
  step_dynamics_inplace(next, arrivals, out);
  return {std::move(next), std::move(out)};
}

void begin_reconfiguration_inplace(SwitchState& state, const Schedule& new_s, int delta_r) {
  if (state.r > 0) {
    throw Error(ErrorCode::ReconfigWhileReconfiguring,
                "reconfiguration requested with " + std::to_string(state.r) + " slots remaining");
  }
  if (delta_r < 0) throw Error(ErrorCode::InvalidState, "negative reconfiguration delay");
  if (new_s.n() != state.n()) throw Error(ErrorCode::DimensionMismatch, "schedule has wrong size");
  state.s = new_s;
  state.r = delta_r;
  state.t_last_reconfig = state.t;
}

SwitchState begin_reconfiguration(const SwitchState& state, const Schedule& new_s, int delta_r) {
  SwitchState next = state;
  begin_reconfiguration_inplace(next, new_s, delta_r);
  return next;
}

}  // namespace amw
