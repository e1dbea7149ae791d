#include <doctest.h>

#include <memory>
#include <random>

#include "devs/blinky.hpp"
#include "devs/coordinator.hpp"
#include "support/capture.hpp"

using namespace devs;
using testsupport::CollectingSink;

namespace {

// identify a blinky state by its observable pair (output level, period)
std::pair<bool, std::uint64_t> observe(const AtomicBehavior& m, const State& s) {
    return {std::get<bool>(m.output(s).on("out").at(0)), m.time_advance(s).value()};
}

MessageBag any_input() {
    MessageBag bag;
    bag.add("in", true);
    return bag;
}

std::vector<std::pair<std::uint64_t, std::string>> outputs_of(const CollectingSink& sink,
                                                              const std::string& name) {
    std::vector<std::pair<std::uint64_t, std::string>> out;
    for (const auto& ev : sink.events)
        if (ev.port_name && ev.model_name == name) out.push_back({ev.time.value(), ev.data});
    return out;
}

}  // namespace

TEST_CASE("blinky walks its four-state transition diagram") {
    AtomicPtr m = blinky_atomic(TimeSpan::micros(500'000), TimeSpan::seconds(1));
    const std::pair<bool, std::uint64_t> s1{true, 500'000}, s2{false, 500'000},
        s3{true, 1'000'000}, s4{false, 1'000'000};

    State a = m->initial_state();
    CHECK(observe(*m, a) == s1);

    SUBCASE("internal transitions swap within the period branch") {
        State b = m->internal_transition(a);
        CHECK(observe(*m, b) == s2);
        CHECK(observe(*m, m->internal_transition(b)) == s1);
        State c = m->external_transition(a, TimeSpan::zero(), any_input());
        State d = m->internal_transition(c);
        CHECK(observe(*m, c) == s3);
        CHECK(observe(*m, d) == s4);
        CHECK(observe(*m, m->internal_transition(d)) == s3);
    }
    SUBCASE("external input swaps the branch, preserving the output level") {
        State c = m->external_transition(a, TimeSpan::micros(1), any_input());
        CHECK(observe(*m, c) == s3);
        CHECK(observe(*m, m->external_transition(c, TimeSpan::zero(), any_input())) == s1);
        State b = m->internal_transition(a);
        State d = m->external_transition(b, TimeSpan::zero(), any_input());
        CHECK(observe(*m, d) == s4);
        CHECK(observe(*m, m->external_transition(d, TimeSpan::zero(), any_input())) == s2);
    }
    SUBCASE("state renders as level plus remaining period") {
        CHECK(m->render_state(a) == "Status:, 1, sigma: 0.5");
        AtomicPtr slow = blinky_atomic(TimeSpan::micros(750'000), TimeSpan::seconds(2));
        CHECK(slow->render_state(slow->initial_state()) == "Status:, 1, sigma: 0.75");
    }
}

TEST_CASE("output level flips on every internal transition, never on external") {
    AtomicPtr m = blinky_atomic(TimeSpan::micros(3), TimeSpan::micros(7));
    std::mt19937_64 rng(7);
    State s = m->initial_state();
    bool level = true;
    for (int i = 0; i < 500; ++i) {
        if (rng() % 2 == 0) {
            s = m->internal_transition(std::move(s));
            level = !level;
        } else {
            s = m->external_transition(std::move(s), TimeSpan::zero(), any_input());
        }
        CHECK(observe(*m, s).first == level);
    }
}

TEST_CASE("blinky rejects degenerate periods") {
    CHECK_THROWS_AS(blinky_atomic(TimeSpan::zero(), TimeSpan::seconds(1)), std::invalid_argument);
    CHECK_THROWS_AS(blinky_atomic(TimeSpan::seconds(1), TimeSpan::infinity()),
                    std::invalid_argument);
}

TEST_CASE("scripted generator fires exactly at its instants") {
    CollectingSink sink;
    Coordinator coord(Model{generator_atomic(GeneratorConfig::scripted(
                          {VirtualTime::micros(1'500'000), VirtualTime::micros(28'594'700)}))},
                      &sink);
    coord.simulate(VirtualTime::seconds(60));
    auto outs = outputs_of(sink, "generator");
    REQUIRE(outs.size() == 2);
    CHECK(outs[0] == std::pair<std::uint64_t, std::string>{1'500'000, "0"});
    CHECK(outs[1] == std::pair<std::uint64_t, std::string>{28'594'700, "0"});
    CHECK(coord.next_event_time() == VirtualTime::infinity());

    SUBCASE("an empty script is passive from the start") {
        Coordinator empty(Model{generator_atomic(GeneratorConfig::scripted({}))});
        CHECK(empty.next_event_time() == VirtualTime::infinity());
    }
    SUBCASE("instants must be increasing and positive") {
        CHECK_THROWS_AS(generator_atomic(GeneratorConfig::scripted(
                            {VirtualTime::micros(5), VirtualTime::micros(5)})),
                        std::invalid_argument);
        CHECK_THROWS_AS(generator_atomic(GeneratorConfig::scripted({VirtualTime::zero()})),
                        std::invalid_argument);
    }
}

TEST_CASE("random generator is deterministic per seed with gaps in range") {
    auto trace = [](std::uint64_t seed) {
        CollectingSink sink;
        Coordinator coord(Model{generator_atomic(GeneratorConfig::random(
                              seed, TimeSpan::micros(1'000), TimeSpan::micros(5'000)))},
                          &sink);
        coord.simulate(VirtualTime::micros(200'000));
        return outputs_of(sink, "generator");
    };
    auto a = trace(42);
    auto b = trace(42);
    auto c = trace(43);
    CHECK(a == b);
    CHECK(a != c);
    REQUIRE(a.size() > 10);
    std::uint64_t prev = 0;
    for (const auto& [t, data] : a) {
        std::uint64_t gap = t - prev;
        CHECK(gap >= 1'000);
        CHECK(gap <= 5'000);
        CHECK((data == "0" || data == "1"));
        prev = t;
    }
    CHECK_THROWS_AS(
        generator_atomic(GeneratorConfig::random(1, TimeSpan::micros(10), TimeSpan::micros(5))),
        std::invalid_argument);
}

TEST_CASE("blinky_system wiring") {
    SUBCASE("simulation mode couples generator to blinky") {
        BlinkyParams params;
        params.generator = GeneratorConfig::scripted({});
        auto spec = blinky_system(BlinkyMode::simulation, params);
        CHECK(validate_coupled(*spec).empty());
        REQUIRE(spec->components.size() == 2);
        auto ids = assign_model_ids(spec);
        CHECK(ids[0].name == "blinky");
        CHECK(ids[1].name == "generator");
    }
    SUBCASE("deployment mode couples the pin drivers around blinky") {
        BlinkyParams params;
        params.pin_input = std::make_shared<ScriptedPinSource>(false);
        params.pin_output = std::make_shared<NullPinSink>();
        auto spec = blinky_system(BlinkyMode::deployment, params);
        CHECK(validate_coupled(*spec).empty());
        auto ids = assign_model_ids(spec);
        REQUIRE(ids.size() == 3);
        CHECK(ids[1].name == "digitalOutput");
        CHECK(ids[2].name == "digitalInput");
    }
    SUBCASE("mode and params must agree") {
        BlinkyParams bare;
        CHECK_THROWS_AS(blinky_system(BlinkyMode::simulation, bare), ConfigError);
        CHECK_THROWS_AS(blinky_system(BlinkyMode::deployment, bare), ConfigError);
        BlinkyParams mixed;
        mixed.generator = GeneratorConfig::scripted({});
        mixed.pin_input = std::make_shared<ScriptedPinSource>(false);
        mixed.pin_output = std::make_shared<NullPinSink>();
        CHECK_THROWS_AS(blinky_system(BlinkyMode::simulation, mixed), ConfigError);
        CHECK_THROWS_AS(blinky_system(BlinkyMode::deployment, mixed), ConfigError);
    }
}

TEST_CASE("deployment blinky matches simulation when edges land on poll instants") {
    // pin edge at 1.55 s with a 0.1 s poll reaches blinky at 1.6 s, so a
    // generator firing at 1.6 s drives the identical blinky trajectory
    BlinkyParams sim_params;
    sim_params.generator = GeneratorConfig::scripted({VirtualTime::micros(1'600'000)});
    CollectingSink sim_sink;
    Coordinator sim(blinky_system(BlinkyMode::simulation, sim_params), &sim_sink);
    sim.simulate(VirtualTime::seconds(5));

    BlinkyParams dep_params;
    auto source = std::make_shared<ScriptedPinSource>(false,
                                                      std::vector<PinEdge>{{1'550'000, true}});
    dep_params.pin_input = source;
    dep_params.pin_output = std::make_shared<NullPinSink>();
    CollectingSink dep_sink;
    Coordinator dep(blinky_system(BlinkyMode::deployment, dep_params), &dep_sink);
    source->bind_time([&dep] { return dep.now().value(); });
    dep.simulate(VirtualTime::seconds(5));

    CHECK(outputs_of(sim_sink, "blinky") == outputs_of(dep_sink, "blinky"));
}
