#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "devs/coordinator.hpp"
#include "devs/time.hpp"

namespace devs {

// Monotonic wall-clock boundary. Backends: host steady clock, the
// scripted mock below, or an embedded timer on a real target.
class WallClock {
public:
    virtual ~WallClock() = default;
    virtual std::uint64_t now() = 0;
    virtual void wait_until(std::uint64_t instant) = 0;
    // Called by the executor once per processed instant, after the
    // transitions have been applied; test backends account scripted
    // execution cost here.
    virtual void on_step_complete() {}
};

// Accumulated scheduler slip and the tolerance governing halt.
// tolerance == nullopt means unlimited (never halt).
struct SlipLedger {
    std::uint64_t accumulated_slip = 0;
    std::optional<std::uint64_t> tolerance;

    bool unlimited() const { return !tolerance.has_value(); }
};

struct DeadlineOutcome {
    enum class Kind { on_time, missed, halt };
    Kind kind;
    std::uint64_t waited = 0;      // on_time: remaining wait to the deadline
    std::uint64_t missed_by = 0;   // missed/halt: overshoot of this step
    std::uint64_t total_slip = 0;  // ledger value after reconciliation
};

// The scheduler-slip ledger rules: a late finish accumulates slip and
// halts once the tolerance is strictly exceeded; an early finish pays
// slip down, clamped at zero.
inline DeadlineOutcome reconcile_deadline(SlipLedger& ledger, std::uint64_t scheduled_next_wall,
                                          std::uint64_t finish_wall) {
    if (finish_wall > scheduled_next_wall) {
        std::uint64_t miss = finish_wall - scheduled_next_wall;
        ledger.accumulated_slip += miss;
        if (!ledger.unlimited() && ledger.accumulated_slip > *ledger.tolerance)
            return {DeadlineOutcome::Kind::halt, 0, miss, ledger.accumulated_slip};
        return {DeadlineOutcome::Kind::missed, 0, miss, ledger.accumulated_slip};
    }
    std::uint64_t remaining = scheduled_next_wall - finish_wall;
    ledger.accumulated_slip =
        ledger.accumulated_slip > remaining ? ledger.accumulated_slip - remaining : 0;
    return {DeadlineOutcome::Kind::on_time, remaining, 0, ledger.accumulated_slip};
}

// Brackets the output-collection and state-advance work of one step and
// keeps a per-step elapsed record.
class ExecutionTimer {
public:
    explicit ExecutionTimer(WallClock& clock) : clock_(clock) {}

    void start() { start_ = clock_.now(); }
    std::uint64_t stop() {
        std::uint64_t elapsed = clock_.now() - start_;
        per_step_.push_back(elapsed);
        return elapsed;
    }

    const std::vector<std::uint64_t>& per_step() const { return per_step_; }

private:
    WallClock& clock_;
    std::uint64_t start_ = 0;
    std::vector<std::uint64_t> per_step_;
};

// Deterministic clock for tests: time moves only when charged by the
// per-step cost script or by wait_until. Not thread-safe.
class MockClock : public WallClock {
public:
    MockClock() = default;
    explicit MockClock(std::vector<std::uint64_t> step_costs) : costs_(std::move(step_costs)) {}

    std::uint64_t now() override { return now_; }
    void wait_until(std::uint64_t instant) override {
        if (instant > now_) now_ = instant;
    }
    void on_step_complete() override {
        if (next_ < costs_.size()) now_ += costs_[next_++];
        // script exhaustion: remaining steps cost 0
    }
    void advance(std::uint64_t micros) { now_ += micros; }

private:
    std::vector<std::uint64_t> costs_;
    std::size_t next_ = 0;
    std::uint64_t now_ = 0;
};

inline MockClock mock_clock_script(std::vector<std::uint64_t> step_costs) {
    return MockClock(std::move(step_costs));
}

// Host backend over the steady clock. wait_until sleeps coarsely to
// within 2 ms of the target, then spins.
class HostClock : public WallClock {
public:
    std::uint64_t now() override {
        auto d = std::chrono::steady_clock::now().time_since_epoch();
        return static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::microseconds>(d).count());
    }

    void wait_until(std::uint64_t instant) override {
        static constexpr std::uint64_t kSpinWindow = 2'000;
        for (;;) {
            std::uint64_t t = now();
            if (t + kSpinWindow >= instant) break;
            std::this_thread::sleep_for(std::chrono::microseconds(instant - t - kSpinWindow));
        }
        while (now() < instant) {
        }
    }
};

struct RtOutcome {
    bool halted = false;
    SlipLedger ledger;
    VirtualTime last_instant = VirtualTime::zero();
};

// Binds a coordinator to wall-clock time. Deadlines are anchored to the
// start instant plus virtual offsets, so a miss never re-baselines the
// schedule. Owns the coordinator and clock exclusively while running.
class RealTimeExecutor {
public:
    RealTimeExecutor(Coordinator& coordinator, WallClock& clock)
        : coordinator_(coordinator), clock_(clock) {}

    // Observers for tests and diagnostics; both optional.
    std::function<void(VirtualTime, std::uint64_t)> step_observer;  // (instant, wall at start)
    std::function<void(const DeadlineOutcome&, const SlipLedger&)> deadline_observer;

    std::uint64_t anchor() const { return anchor_; }
    const std::vector<std::uint64_t>& step_times() const { return timer_steps_; }

    RtOutcome run(VirtualTime t_end, SlipLedger ledger) {
        anchor_ = clock_.now();
        coordinator_.emit_initial_states();
        ExecutionTimer timer(clock_);
        for (;;) {
            VirtualTime t = coordinator_.next_event_time();
            if (t.infinite() || t > t_end) {
                timer_steps_ = timer.per_step();
                return {false, ledger, coordinator_.now()};
            }
            std::uint64_t deadline = anchor_ + t.value();
            DeadlineOutcome outcome = reconcile_deadline(ledger, deadline, clock_.now());
            if (deadline_observer) deadline_observer(outcome, ledger);
            switch (outcome.kind) {
                case DeadlineOutcome::Kind::on_time:
                    if (outcome.waited > 0) clock_.wait_until(deadline);
                    break;
                case DeadlineOutcome::Kind::missed:
                    notify_miss(outcome.missed_by);
                    break;
                case DeadlineOutcome::Kind::halt:
                    notify_miss(outcome.missed_by);
                    timer_steps_ = timer.per_step();
                    return {true, ledger, coordinator_.now()};
            }
            if (step_observer) step_observer(t, clock_.now());
            timer.start();
            coordinator_.process_instant(t);
            clock_.on_step_complete();
            timer.stop();
        }
    }

private:
    void notify_miss(std::uint64_t by) {
        if (coordinator_.sink()) coordinator_.sink()->on_deadline_miss(by);
    }

    Coordinator& coordinator_;
    WallClock& clock_;
    std::uint64_t anchor_ = 0;
    std::vector<std::uint64_t> timer_steps_;
};

inline RtOutcome execute_realtime(Coordinator& coordinator, VirtualTime t_end, WallClock& clock,
                                  SlipLedger ledger) {
    return RealTimeExecutor(coordinator, clock).run(t_end, ledger);
}

}  // namespace devs
