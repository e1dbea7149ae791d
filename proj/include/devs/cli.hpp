#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "devs/blinky.hpp"
#include "devs/coordinator.hpp"
#include "devs/hal.hpp"
#include "devs/logging.hpp"
#include "devs/rt_clock.hpp"

namespace devs::cli {

enum class RunMode { simulate, run_rt };

struct RunConfig {
    RunMode mode = RunMode::simulate;
    std::string system = "blinky";
    VirtualTime duration = VirtualTime::zero();
    std::optional<std::uint64_t> tolerance_us;  // nullopt = unlimited
    TimeSpan sigma1 = TimeSpan::micros(500'000);
    TimeSpan sigma2 = TimeSpan::micros(1'000'000);
    std::vector<VirtualTime> gen_script;
    std::optional<std::uint64_t> gen_seed;
    TimeSpan gen_min_gap = TimeSpan::seconds(1);
    TimeSpan gen_max_gap = TimeSpan::seconds(5);
    std::string pin_script;  // "", "stdin", or a path
    TimeSpan poll_period = TimeSpan::micros(100'000);
    std::string log_dest = "stdout";  // "stdout" or a path
    std::uint64_t event_cap = 10'000'000;
};

struct ParseResult {
    std::optional<RunConfig> config;  // set when parsing succeeded
    int exit_code = 0;                // meaningful when config is empty
    std::string message;
};

namespace detail {

inline ParseResult usage_error(std::string msg) { return {std::nullopt, 2, std::move(msg)}; }

inline bool parse_span(const std::string& text, TimeSpan& out) {
    auto v = TimeSpan::parse_seconds(text);
    if (!v) return false;
    out = *v;
    return true;
}

// Interactive stand-in for the button: every stdin newline toggles the
// level. The reader thread is detached; read() only sees the atomic.
class StdinTogglePinSource : public PinSource {
public:
    StdinTogglePinSource() {
        std::thread([level = level_] {
            std::string line;
            while (std::getline(std::cin, line)) level->store(!level->load());
        }).detach();
    }
    bool read() override { return level_->load(); }

private:
    std::shared_ptr<std::atomic<bool>> level_ = std::make_shared<std::atomic<bool>>(false);
};

inline std::optional<std::vector<PinEdge>> load_pin_script(const std::string& path,
                                                           std::string& error) {
    std::ifstream in(path);
    if (!in) {
        error = "cannot open pin script: " + path;
        return std::nullopt;
    }
    std::vector<PinEdge> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string when, level;
        if (!(row >> when >> level) || (level != "0" && level != "1")) {
            error = path + ":" + std::to_string(line_no) + ": expected '<seconds> <0|1>'";
            return std::nullopt;
        }
        auto t = VirtualTime::parse_seconds(when);
        if (!t) {
            error = path + ":" + std::to_string(line_no) + ": bad time '" + when + "'";
            return std::nullopt;
        }
        if (!edges.empty() && t->value() <= edges.back().at) {
            error = path + ":" + std::to_string(line_no) + ": times must be increasing";
            return std::nullopt;
        }
        edges.push_back({t->value(), level == "1"});
    }
    return edges;
}

}  // namespace detail

inline ParseResult parse_args(const std::vector<std::string>& args) {
    RunConfig cfg;
    std::string duration, sigma1 = "0.5", sigma2 = "1", poll = "0.1", tolerance = "unlimited";
    std::vector<std::string> gen_script;

    CLI::App app{"Parallel-DEVS kernel: virtual-time simulation and soft real-time execution"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("system", cfg.system, "system to build (blinky)")->required();
        sub->add_option("--duration", duration, "run length in seconds")->required();
        sub->add_option("--sigma1", sigma1, "fast blink period in seconds");
        sub->add_option("--sigma2", sigma2, "slow blink period in seconds");
        sub->add_option("--log", cfg.log_dest, "trace destination: stdout or a file path");
        sub->add_option("--event-cap", cfg.event_cap, "maximum number of processed instants");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run in virtual time");
    add_common(sim);
    sim->add_option("--gen-script", gen_script,
                    "generator firing instants in seconds (comma separated)")
        ->delimiter(',');
    std::uint64_t seed = 0;
    std::string gen_min = "1", gen_max = "5";
    CLI::Option* seed_opt = sim->add_option("--gen-seed", seed, "random generator seed");
    sim->add_option("--gen-min", gen_min, "random generator minimum gap in seconds");
    sim->add_option("--gen-max", gen_max, "random generator maximum gap in seconds");

    CLI::App* rt = app.add_subcommand("run-rt", "execute against the wall clock");
    add_common(rt);
    rt->add_option("--tolerance-us", tolerance,
                   "accumulated-slip halt threshold in microseconds, or 'unlimited'");
    rt->add_option("--pin-script", cfg.pin_script,
                   "input pin edges: a '<seconds> <0|1>' file, or 'stdin' for newline toggling");
    rt->add_option("--poll", poll, "input pin polling period in seconds");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return {std::nullopt, 0, app.help()};
    } catch (const CLI::ParseError& e) {
        return detail::usage_error(e.what());
    }

    cfg.mode = sim->parsed() ? RunMode::simulate : RunMode::run_rt;
    if (cfg.system != "blinky") return detail::usage_error("unknown system: " + cfg.system);

    auto dur = VirtualTime::parse_seconds(duration);
    if (!dur || dur->value() == 0) return detail::usage_error("--duration must be > 0 seconds");
    cfg.duration = *dur;
    if (!detail::parse_span(sigma1, cfg.sigma1) || cfg.sigma1.value() == 0)
        return detail::usage_error("--sigma1 must be > 0 seconds");
    if (!detail::parse_span(sigma2, cfg.sigma2) || cfg.sigma2.value() == 0)
        return detail::usage_error("--sigma2 must be > 0 seconds");
    if (!detail::parse_span(poll, cfg.poll_period) || cfg.poll_period.value() == 0)
        return detail::usage_error("--poll must be > 0 seconds");
    if (tolerance != "unlimited") {
        try {
            cfg.tolerance_us = std::stoull(tolerance);
        } catch (...) {
            return detail::usage_error("--tolerance-us must be an integer or 'unlimited'");
        }
    }
    for (const std::string& s : gen_script) {
        auto t = VirtualTime::parse_seconds(s);
        if (!t || (!cfg.gen_script.empty() && *t <= cfg.gen_script.back()))
            return detail::usage_error("--gen-script instants must be increasing seconds");
        cfg.gen_script.push_back(*t);
    }
    if (seed_opt->count() > 0) {
        if (!cfg.gen_script.empty())
            return detail::usage_error("--gen-seed conflicts with --gen-script");
        cfg.gen_seed = seed;
        if (!detail::parse_span(gen_min, cfg.gen_min_gap) || cfg.gen_min_gap.value() == 0 ||
            !detail::parse_span(gen_max, cfg.gen_max_gap) || cfg.gen_max_gap < cfg.gen_min_gap)
            return detail::usage_error("--gen-min/--gen-max must satisfy 0 < min <= max");
    }
    return {cfg, 0, ""};
}

// Builds the configured system, runs it, writes the trace. Exit 0 on a
// completed run, 1 on halt or I/O failure.
inline int run(const RunConfig& cfg, std::ostream& diag = std::cerr) {
    try {
        std::unique_ptr<logging::LogSink> sink;
        if (cfg.log_dest == "stdout")
            sink = std::make_unique<logging::StdoutSink>();
        else
            sink = std::make_unique<logging::FileSink>(cfg.log_dest);
        logging::TraceLogger logger(*sink);

        BlinkyParams params;
        params.sigma1 = cfg.sigma1;
        params.sigma2 = cfg.sigma2;

        if (cfg.mode == RunMode::simulate) {
            params.generator = cfg.gen_seed
                                   ? GeneratorConfig::random(*cfg.gen_seed, cfg.gen_min_gap,
                                                             cfg.gen_max_gap)
                                   : GeneratorConfig::scripted(cfg.gen_script);
            Coordinator coordinator(blinky_system(BlinkyMode::simulation, params), &logger,
                                    cfg.event_cap);
            coordinator.simulate(cfg.duration);
            return 0;
        }

        params.poll_period = cfg.poll_period;
        std::shared_ptr<ScriptedPinSource> scripted;
        if (cfg.pin_script == "stdin") {
            params.pin_input = std::make_shared<detail::StdinTogglePinSource>();
        } else if (!cfg.pin_script.empty()) {
            std::string error;
            auto edges = detail::load_pin_script(cfg.pin_script, error);
            if (!edges) {
                diag << error << '\n';
                return 2;
            }
            scripted = std::make_shared<ScriptedPinSource>(false, std::move(*edges));
            params.pin_input = scripted;
        } else {
            scripted = std::make_shared<ScriptedPinSource>(false);
            params.pin_input = scripted;
        }
        params.pin_output = std::make_shared<NullPinSink>();

        HostClock clock;
        Coordinator coordinator(blinky_system(BlinkyMode::deployment, params), &logger,
                                cfg.event_cap);
        RealTimeExecutor executor(coordinator, clock);
        if (scripted)  // pin script instants are wall time past the anchor
            scripted->bind_time([&clock, &executor] { return clock.now() - executor.anchor(); });

        SlipLedger ledger;
        ledger.tolerance = cfg.tolerance_us;
        RtOutcome outcome = executor.run(cfg.duration, ledger);
        if (outcome.halted) {
            diag << "halted: accumulated scheduler slip " << outcome.ledger.accumulated_slip
                 << " microseconds exceeded tolerance\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << '\n';
        return 1;
    }
}

inline int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    ParseResult parsed = parse_args(args);
    if (!parsed.config) {
        (parsed.exit_code == 0 ? std::cout : std::cerr) << parsed.message << '\n';
        return parsed.exit_code;
    }
    return run(*parsed.config);
}

}  // namespace devs::cli
