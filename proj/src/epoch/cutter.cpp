#include "ttkv/epoch/cutter.hpp"

#include <cmath>

namespace ttkv::epoch {

namespace {

Nanos scaled(long double v, double max_drift) {
  if (v <= 0) return 0;
  return static_cast<Nanos>(std::ceil(v * (1.0L + max_drift) - 1e-6L));
}

constexpr Nanos kOracleRetry = 1_ms;

}  // namespace

Nanos first_cut_timer(Nanos interval, double max_drift) { return scaled(interval, max_drift); }

Nanos next_cut_timer(Nanos interval, Nanos promised_end, Nanos ts, double max_drift) {
  long double v = static_cast<long double>(interval) + static_cast<long double>(promised_end) - static_cast<long double>(ts);
  return scaled(v, max_drift);
}

EpochCutter::EpochCutter(simnet::Env& env, tsbatch::TimestampSource& ts, EpochSchedule schedule, double max_drift,
                         OnCut on_cut)
    : env_(env), ts_(ts), schedule_(schedule), max_drift_(max_drift), on_cut_(std::move(on_cut)) {}

void EpochCutter::start(Epoch next, bool immediate) {
  ++generation_;
  running_ = true;
  next_ = next;
  if (immediate)
    fire(generation_);
  else
    arm(first_cut_timer(schedule_.interval, max_drift_));
}

void EpochCutter::arm(Nanos local_delay) {
  env_.after(local_delay, [this, gen = generation_] { fire(gen); });
}

void EpochCutter::fire(std::uint64_t gen) {
  if (gen != generation_ || !running_) return;
  ts_.acquire([this, gen](std::optional<tsbatch::TsGrant> g) {
    if (gen != generation_ || !running_) return;
    if (!g) {
      arm(kOracleRetry);
      return;
    }
    const Nanos t_n = schedule_.promised_end(next_);
    if (g->ts.nanos <= t_n) {
      arm(t_n - g->ts.nanos + 1);
      return;
    }
    const Nanos next_timer = next_cut_timer(schedule_.interval, t_n, g->ts.nanos, max_drift_);
    const Nanos wait = g->cwt.remaining(env_.local_now());
    const Epoch n = next_;
    auto cut = [this, gen, n, next_timer, wait] {
      if (gen != generation_ || !running_) return;
      next_ = n + 1;
      on_cut_(n);
      arm(next_timer > wait ? next_timer - wait : 0);
    };
    if (wait == 0)
      cut();
    else
      env_.after(wait, cut);
  });
}

}  // namespace ttkv::epoch
