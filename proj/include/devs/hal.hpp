#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "devs/core.hpp"
#include "devs/time.hpp"

namespace devs {

// Reads back a boolean pin level. Non-blocking; idempotent between
// external level changes.
class PinSource {
public:
    virtual ~PinSource() = default;
    virtual bool read() = 0;
};

// Writes a boolean pin level, last-write-wins.
class PinSink {
public:
    virtual ~PinSink() = default;
    virtual void write(bool level) = 0;
};

// Supplies "now" to scripted pin backends: virtual microseconds under
// simulation, wall microseconds past the anchor under real-time runs.
using TimeProvider = std::function<std::uint64_t()>;

struct PinEdge {
    std::uint64_t at;  // microseconds
    bool level;
};

// Desk-scale stand-in for a physical button: the level follows a
// scripted edge schedule against the bound time provider.
class ScriptedPinSource : public PinSource {
public:
    explicit ScriptedPinSource(bool initial_level = false, std::vector<PinEdge> schedule = {})
        : initial_(initial_level), schedule_(std::move(schedule)) {
        for (std::size_t i = 1; i < schedule_.size(); ++i)
            if (schedule_[i].at <= schedule_[i - 1].at)
                throw std::invalid_argument("ScriptedPinSource: instants must be increasing");
    }

    void bind_time(TimeProvider now) { now_ = std::move(now); }

    bool read() override {
        std::uint64_t t = now_ ? now_() : 0;
        bool level = initial_;
        for (const PinEdge& e : schedule_) {
            if (e.at > t) break;
            level = e.level;
        }
        return level;
    }

private:
    bool initial_;
    std::vector<PinEdge> schedule_;
    TimeProvider now_;
};

// Desk-scale stand-in for an LED: records every write with the instant
// reported by the bound time provider.
class RecordingPinSink : public PinSink {
public:
    void bind_time(TimeProvider now) { now_ = std::move(now); }

    void write(bool level) override { recorded_.push_back({now_ ? now_() : 0, level}); }

    const std::vector<std::pair<std::uint64_t, bool>>& recorded() const { return recorded_; }

private:
    TimeProvider now_;
    std::vector<std::pair<std::uint64_t, bool>> recorded_;
};

class NullPinSink : public PinSink {
public:
    void write(bool) override {}
};

namespace detail {

struct DigitalInputState {
    bool last_emitted = false;
};

// Polls the pin every poll_period and emits the level only when it
// changed since the last emission (edge emission).
class DigitalInputAtomic : public AtomicBehavior {
public:
    DigitalInputAtomic(std::shared_ptr<PinSource> source, TimeSpan poll_period, std::string name)
        : AtomicBehavior(std::move(name), {},
                         {{"out", PortDirection::output, ValueKind::boolean}}),
          source_(std::move(source)),
          poll_(poll_period) {
        if (poll_.infinite() || poll_.value() == 0)
            throw std::invalid_argument("digital input poll period must be finite and positive");
    }

    State initial_state() const override { return DigitalInputState{source_->read()}; }
    TimeSpan time_advance(const State&) const override { return poll_; }

    State internal_transition(State s) const override {
        auto st = std::any_cast<DigitalInputState>(std::move(s));
        st.last_emitted = source_->read();
        return st;
    }

    State external_transition(State, TimeSpan, const MessageBag&) const override {
        throw std::logic_error("digital input has no input ports");
    }

    MessageBag output(const State& s) const override {
        const auto& st = std::any_cast<const DigitalInputState&>(s);
        MessageBag bag;
        bool level = source_->read();
        if (level != st.last_emitted) bag.add("out", level);
        return bag;
    }

    std::string render_state(const State& s) const override {
        return std::string("Pin: ") +
               (std::any_cast<const DigitalInputState&>(s).last_emitted ? "1" : "0");
    }

private:
    std::shared_ptr<PinSource> source_;
    TimeSpan poll_;
};

struct DigitalOutputState {
    bool level = false;
};

// Passive model: writes every received boolean straight to the pin.
class DigitalOutputAtomic : public AtomicBehavior {
public:
    DigitalOutputAtomic(std::shared_ptr<PinSink> sink, std::string name)
        : AtomicBehavior(std::move(name), {{"in", PortDirection::input, ValueKind::boolean}}, {}),
          sink_(std::move(sink)) {}

    State initial_state() const override { return DigitalOutputState{}; }
    TimeSpan time_advance(const State&) const override { return TimeSpan::infinity(); }

    State internal_transition(State) const override {
        throw std::logic_error("digital output never schedules internal events");
    }

    State external_transition(State s, TimeSpan, const MessageBag& bag) const override {
        auto st = std::any_cast<DigitalOutputState>(std::move(s));
        for (const Value& v : bag.on("in")) {
            st.level = std::get<bool>(v);
            sink_->write(st.level);
        }
        return st;
    }

    MessageBag output(const State&) const override { return {}; }

    std::string render_state(const State& s) const override {
        return std::string("Pin: ") +
               (std::any_cast<const DigitalOutputState&>(s).level ? "1" : "0");
    }

private:
    std::shared_ptr<PinSink> sink_;
};

}  // namespace detail

inline AtomicPtr digital_input_atomic(std::shared_ptr<PinSource> source, TimeSpan poll_period,
                                      std::string name = "digitalInput") {
    return std::make_shared<detail::DigitalInputAtomic>(std::move(source), poll_period,
                                                        std::move(name));
}

inline AtomicPtr digital_output_atomic(std::shared_ptr<PinSink> sink,
                                       std::string name = "digitalOutput") {
    return std::make_shared<detail::DigitalOutputAtomic>(std::move(sink), std::move(name));
}

}  // namespace devs
