#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "devs/core.hpp"
#include "devs/hal.hpp"
#include "devs/time.hpp"

namespace devs {

namespace detail {

struct BlinkyState {
    int phase = 1;  // S1..S4
};

// Four-state blinker: internal transitions swap within the current
// period branch (S1<->S2 at sigma1, S3<->S4 at sigma2), any external
// input swaps between branches preserving parity (S1<->S3, S2<->S4).
// Output is 1 from S1/S3 and 0 from S2/S4.
class BlinkyAtomic : public AtomicBehavior {
public:
    BlinkyAtomic(TimeSpan sigma1, TimeSpan sigma2, std::string name)
        : AtomicBehavior(std::move(name), {{"in", PortDirection::input, ValueKind::boolean}},
                         {{"out", PortDirection::output, ValueKind::boolean}}),
          sigma1_(sigma1),
          sigma2_(sigma2) {
        if (sigma1.infinite() || sigma1.value() == 0 || sigma2.infinite() || sigma2.value() == 0)
            throw std::invalid_argument("blinky periods must be finite and positive");
    }

    State initial_state() const override { return BlinkyState{1}; }

    TimeSpan time_advance(const State& s) const override {
        return phase(s) <= 2 ? sigma1_ : sigma2_;
    }

    State internal_transition(State s) const override {
        static constexpr int next[5] = {0, 2, 1, 4, 3};
        return BlinkyState{next[phase(std::move(s))]};
    }

    State external_transition(State s, TimeSpan, const MessageBag&) const override {
        // any input toggles the period branch; the payload is ignored
        static constexpr int next[5] = {0, 3, 4, 1, 2};
        return BlinkyState{next[phase(std::move(s))]};
    }

    MessageBag output(const State& s) const override {
        MessageBag bag;
        bag.add("out", emits(s));
        return bag;
    }

    std::string render_state(const State& s) const override {
        return std::string("Status:, ") + (emits(s) ? "1" : "0") +
               ", sigma: " + time_advance(s).seconds_str();
    }

private:
    static int phase(const State& s) { return std::any_cast<const BlinkyState&>(s).phase; }
    bool emits(const State& s) const { return phase(s) % 2 == 1; }

    TimeSpan sigma1_;
    TimeSpan sigma2_;
};

}  // namespace detail

inline AtomicPtr blinky_atomic(TimeSpan sigma1, TimeSpan sigma2, std::string name = "blinky") {
    return std::make_shared<detail::BlinkyAtomic>(sigma1, sigma2, std::move(name));
}

struct GeneratorConfig {
    struct Scripted {
        std::vector<VirtualTime> instants;  // strictly increasing firing instants
    };
    struct Random {
        std::uint64_t seed = 0;
        TimeSpan min_gap;
        TimeSpan max_gap;
    };
    std::variant<Scripted, Random> source;

    static GeneratorConfig scripted(std::vector<VirtualTime> instants) {
        return {Scripted{std::move(instants)}};
    }
    static GeneratorConfig random(std::uint64_t seed, TimeSpan min_gap, TimeSpan max_gap) {
        return {Random{seed, min_gap, max_gap}};
    }
};

namespace detail {

struct GeneratorState {
    TimeSpan sigma = TimeSpan::infinity();
    bool value = false;
    std::size_t next_index = 0;       // scripted
    std::optional<std::mt19937_64> rng;  // random
};

// Input-free event source: fires booleans at scripted instants, or at
// seeded uniformly-random gaps. Same seed, same trace.
class GeneratorAtomic : public AtomicBehavior {
public:
    GeneratorAtomic(GeneratorConfig cfg, std::string name)
        : AtomicBehavior(std::move(name), {},
                         {{"out", PortDirection::output, ValueKind::boolean}}),
          cfg_(std::move(cfg)) {
        if (const auto* s = std::get_if<GeneratorConfig::Scripted>(&cfg_.source)) {
            for (std::size_t i = 0; i < s->instants.size(); ++i) {
                if (s->instants[i].infinite() || s->instants[i].value() == 0)
                    throw std::invalid_argument("generator instants must be finite and positive");
                if (i > 0 && s->instants[i] <= s->instants[i - 1])
                    throw std::invalid_argument("generator instants must be increasing");
            }
        } else {
            const auto& r = std::get<GeneratorConfig::Random>(cfg_.source);
            if (r.min_gap.infinite() || r.max_gap.infinite() || r.min_gap.value() == 0 ||
                r.min_gap > r.max_gap)
                throw std::invalid_argument("generator gap bounds invalid");
        }
    }

    State initial_state() const override {
        GeneratorState st;
        if (const auto* s = std::get_if<GeneratorConfig::Scripted>(&cfg_.source)) {
            if (!s->instants.empty()) st.sigma = TimeSpan::micros(s->instants[0].value());
        } else {
            st.rng = std::mt19937_64(std::get<GeneratorConfig::Random>(cfg_.source).seed);
            draw(st);
        }
        return st;
    }

    TimeSpan time_advance(const State& s) const override {
        return std::any_cast<const GeneratorState&>(s).sigma;
    }

    State internal_transition(State s) const override {
        auto st = std::any_cast<GeneratorState>(std::move(s));
        if (const auto* sc = std::get_if<GeneratorConfig::Scripted>(&cfg_.source)) {
            std::size_t i = ++st.next_index;
            st.sigma = i < sc->instants.size()
                           ? time_diff(sc->instants[i], sc->instants[i - 1])
                           : TimeSpan::infinity();
        } else {
            draw(st);
        }
        return st;
    }

    State external_transition(State, TimeSpan, const MessageBag&) const override {
        throw std::logic_error("generator has no input ports");
    }

    MessageBag output(const State& s) const override {
        MessageBag bag;
        bag.add("out", std::any_cast<const GeneratorState&>(s).value);
        return bag;
    }

    std::string render_state(const State& s) const override {
        return "sigma: " + std::any_cast<const GeneratorState&>(s).sigma.seconds_str();
    }

private:
    void draw(GeneratorState& st) const {
        const auto& r = std::get<GeneratorConfig::Random>(cfg_.source);
        std::uniform_int_distribution<std::uint64_t> gap(r.min_gap.value(), r.max_gap.value());
        std::uniform_int_distribution<int> bit(0, 1);
        st.sigma = TimeSpan::micros(gap(*st.rng));
        st.value = bit(*st.rng) != 0;
    }

    GeneratorConfig cfg_;
};

}  // namespace detail

inline AtomicPtr generator_atomic(GeneratorConfig cfg, std::string name = "generator") {
    return std::make_shared<detail::GeneratorAtomic>(std::move(cfg), std::move(name));
}

enum class BlinkyMode { simulation, deployment };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BlinkyParams {
    TimeSpan sigma1 = TimeSpan::micros(500'000);
    TimeSpan sigma2 = TimeSpan::micros(1'000'000);
    std::optional<GeneratorConfig> generator;   // simulation mode only
    std::shared_ptr<PinSource> pin_input;       // deployment mode only
    std::shared_ptr<PinSink> pin_output;        // deployment mode only
    TimeSpan poll_period = TimeSpan::micros(100'000);
};

// The case-study system. Simulation wiring drives blinky from the
// generator; deployment wiring bridges it between the pin drivers.
inline CoupledPtr blinky_system(BlinkyMode mode, const BlinkyParams& params) {
    auto spec = std::make_shared<CoupledSpec>();
    spec->name = "blinkySystem";
    AtomicPtr blinky = blinky_atomic(params.sigma1, params.sigma2);
    if (mode == BlinkyMode::simulation) {
        if (params.pin_input || params.pin_output)
            throw ConfigError("simulation mode takes no pin backends");
        if (!params.generator)
            throw ConfigError("simulation mode requires a generator config");
        spec->components = {blinky, generator_atomic(*params.generator)};
        spec->ic = {{"generator", "out", "blinky", "in"}};
    } else {
        if (params.generator)
            throw ConfigError("deployment mode takes no generator config");
        if (!params.pin_input || !params.pin_output)
            throw ConfigError("deployment mode requires pin backends");
        spec->components = {blinky, digital_output_atomic(params.pin_output),
                            digital_input_atomic(params.pin_input, params.poll_period)};
        spec->ic = {{"digitalInput", "out", "blinky", "in"},
                    {"blinky", "out", "digitalOutput", "in"}};
    }
    return spec;
}

}  // namespace devs
