#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "devs/coordinator.hpp"
#include "devs/time.hpp"

namespace devs::logging {

inline constexpr std::string_view kHeader = "time;model_id;model_name;port_name;data";

// Line-oriented output boundary; lines are emitted whole and in call
// order.
class LogSink {
public:
    virtual ~LogSink() = default;
    virtual void write_line(std::string_view text) = 0;
};

class StreamSink : public LogSink {
public:
    explicit StreamSink(std::ostream& out) : out_(out) {}
    void write_line(std::string_view text) override {
        out_ << text << '\n';
        out_.flush();
    }

private:
    std::ostream& out_;
};

class StdoutSink : public StreamSink {
public:
    StdoutSink() : StreamSink(std::cout) {}
};

class FileSink : public LogSink {
public:
    explicit FileSink(const std::string& path) : out_(path, std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open log file: " + path);
    }
    void write_line(std::string_view text) override {
        out_ << text << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
};

class StringSink : public LogSink {
public:
    void write_line(std::string_view text) override {
        text_.append(text);
        text_.push_back('\n');
    }
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

// Decimal seconds with up to six fractional digits, trailing zeros and
// a bare point removed ("4", "28.5947").
inline std::string render_time(VirtualTime t) {
    if (t.infinite()) throw std::invalid_argument("render_time: infinite instant");
    return t.seconds_str();
}

inline std::string render_output_event(const TraceEvent& ev) {
    if (!ev.port_name) throw std::invalid_argument("render_output_event: missing port");
    return render_time(ev.time) + ";" + std::to_string(ev.model_id) + ";" + ev.model_name + ";" +
           *ev.port_name + ";" + ev.data;
}

inline std::string render_state_event(const TraceEvent& ev) {
    if (ev.port_name) throw std::invalid_argument("render_state_event: unexpected port");
    return render_time(ev.time) + ";" + std::to_string(ev.model_id) + ";" + ev.model_name + ";;" +
           ev.data;
}

inline std::string render_deadline_miss(std::uint64_t by_micros) {
    if (by_micros == 0) throw std::invalid_argument("render_deadline_miss: zero miss");
    return "MISSED SCHEDULED TIME ADVANCE DEADLINE BY:" + std::to_string(by_micros) +
           " microseconds";
}

inline void write_header(LogSink& sink) { sink.write_line(kHeader); }

// Renders coordinator trace events and deadline-miss notifications into
// the semicolon-delimited stream format. Writes the header up front.
class TraceLogger : public TraceSink {
public:
    explicit TraceLogger(LogSink& sink) : sink_(sink) { write_header(sink_); }

    void on_event(const TraceEvent& ev) override {
        sink_.write_line(ev.port_name ? render_output_event(ev) : render_state_event(ev));
    }

    void on_deadline_miss(std::uint64_t by_micros) override {
        sink_.write_line(render_deadline_miss(by_micros));
    }

private:
    LogSink& sink_;
};

}  // namespace devs::logging
