#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "devs/core.hpp"
#include "devs/time.hpp"

namespace devs {

struct TraceEvent {
    VirtualTime time;
    ModelId model_id;
    std::string model_name;
    std::optional<std::string> port_name;  // absent for state events
    std::string data;
};

// Destination for coordinator trace events and real-time deadline-miss
// notifications. The logging module renders these into text.
class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void on_event(const TraceEvent& ev) = 0;
    virtual void on_deadline_miss(std::uint64_t /*by_micros*/) {}
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EventCapExceeded : public std::runtime_error {
public:
    explicit EventCapExceeded(std::uint64_t cap)
        : std::runtime_error("event-count cap exceeded (" + std::to_string(cap) + " instants)") {}
};

struct ComponentRuntime {
    AtomicPtr behavior;
    ModelId id = 0;
    State state;
    VirtualTime t_last = VirtualTime::zero();
    VirtualTime t_next = VirtualTime::zero();
    MessageBag inbox;
};

// The abstract Parallel-DEVS simulator: finds imminent components,
// collects and routes outputs through the coupling hierarchy, applies
// transitions, and advances virtual time. Strictly single-threaded.
class Coordinator {
public:
    explicit Coordinator(Model root, TraceSink* sink = nullptr,
                         std::uint64_t event_cap = 10'000'000)
        : root_(std::move(root)), sink_(sink), event_cap_(event_cap) {
        auto errors = validate_model(root_);
        if (!errors.empty()) {
            std::string msg = "invalid model:";
            for (const auto& e : errors) msg += "\n  " + e;
            throw std::invalid_argument(msg);
        }
        tree_ = build_node(root_, nullptr);
        for (auto& rt : runtimes_) {
            rt.state = rt.behavior->initial_state();
            rt.t_next = time_add(rt.t_last, checked_ta(rt));
        }
    }

    VirtualTime now() const { return now_; }
    std::uint64_t steps() const { return steps_; }
    TraceSink* sink() const { return sink_; }
    const std::vector<ComponentRuntime>& runtimes() const { return runtimes_; }

    std::vector<RegisteredModel> registry() const {
        std::vector<RegisteredModel> out;
        out.reserve(runtimes_.size());
        for (const auto& rt : runtimes_) out.push_back({rt.id, rt.behavior->name(), rt.behavior});
        return out;
    }

    // Minimum over component t_next and pending injected inputs;
    // Infinity means the system is fully passive.
    VirtualTime next_event_time() const {
        VirtualTime t = VirtualTime::infinity();
        for (const auto& rt : runtimes_)
            if (rt.t_next < t) t = rt.t_next;
        if (!injections_.empty() && injections_.begin()->first < t)
            t = injections_.begin()->first;
        return t;
    }

    // Schedules an external input on one of the root model's input ports.
    void schedule_input(VirtualTime t, std::string_view port, Value v) {
        if (t < now_) throw std::invalid_argument("schedule_input: instant already passed");
        injections_.emplace(t, std::make_pair(std::string(port), std::move(v)));
    }

    // Output collection phase: lambda once per imminent atomic, bags
    // routed along EOC/IC/EIC chains, one trace event per non-empty port.
    void collect_outputs(VirtualTime t) {
        for (std::size_t i = 0; i < runtimes_.size(); ++i) {
            ComponentRuntime& rt = runtimes_[i];
            if (rt.t_next != t) continue;
            MessageBag bag = guarded<MessageBag>(rt, [&] { return rt.behavior->output(rt.state); });
            for (const PortId& port : rt.behavior->output_ports()) {
                const std::vector<Value>& vals = bag.on(port.name);
                if (vals.empty()) continue;
                emit_event({t, rt.id, rt.behavior->name(), port.name, render_values(vals)});
                route_up(atom_nodes_[i], port.name, vals);
            }
        }
    }

    // Transition phase: delta_int / delta_ext / delta_con selection per
    // imminence and inbox contents, then reschedule and emit state events.
    void advance_state(VirtualTime t) {
        for (ComponentRuntime& rt : runtimes_) {
            bool imminent = rt.t_next == t;
            bool has_input = !rt.inbox.empty();
            if (!imminent && !has_input) continue;
            guarded<int>(rt, [&] {
                if (imminent && has_input)
                    rt.state = rt.behavior->confluent_transition(std::move(rt.state), rt.inbox);
                else if (imminent)
                    rt.state = rt.behavior->internal_transition(std::move(rt.state));
                else
                    rt.state = rt.behavior->external_transition(std::move(rt.state),
                                                                time_diff(t, rt.t_last), rt.inbox);
                return 0;
            });
            rt.t_last = t;
            rt.t_next = time_add(t, checked_ta(rt));
            rt.inbox.clear();
            emit_event({t, rt.id, rt.behavior->name(), std::nullopt,
                        rt.behavior->render_state(rt.state)});
        }
    }

    // One full step at instant t: outputs, injected inputs, transitions.
    void process_instant(VirtualTime t) {
        if (t.infinite()) throw std::invalid_argument("process_instant: infinite instant");
        if (t < now_ || (steps_ > 0 && t == now_))
            throw std::logic_error("process_instant: non-increasing instant");
        if (++steps_ > event_cap_) throw EventCapExceeded(event_cap_);
        now_ = t;
        collect_outputs(t);
        deliver_injections(t);
        advance_state(t);
    }

    void emit_initial_states() {
        if (initial_emitted_) return;
        initial_emitted_ = true;
        for (const ComponentRuntime& rt : runtimes_)
            emit_event({VirtualTime::zero(), rt.id, rt.behavior->name(), std::nullopt,
                        rt.behavior->render_state(rt.state)});
    }

    // Virtual-time loop: runs every instant up to and including t_end,
    // returns the last processed instant.
    VirtualTime simulate(VirtualTime t_end) {
        emit_initial_states();
        for (;;) {
            VirtualTime t = next_event_time();
            if (t.infinite() || t > t_end) break;
            process_instant(t);
        }
        return now_;
    }

private:
    struct Node {
        std::string name;
        AtomicPtr atomic;
        CoupledPtr coupled;
        Node* parent = nullptr;
        std::vector<std::unique_ptr<Node>> children;
        std::unordered_map<std::string, Node*> child_by_name;
        std::size_t runtime_index = 0;
    };

    std::unique_ptr<Node> build_node(const Model& m, Node* parent) {
        auto node = std::make_unique<Node>();
        node->name = model_name(m);
        node->parent = parent;
        if (const AtomicPtr* a = std::get_if<AtomicPtr>(&m)) {
            node->atomic = *a;
            node->runtime_index = runtimes_.size();
            runtimes_.push_back({*a, static_cast<ModelId>(runtimes_.size() + 1), {}, {}, {}, {}});
            atom_nodes_.push_back(node.get());
        } else {
            node->coupled = std::get<CoupledPtr>(m);
            for (const Model& c : node->coupled->components) {
                auto child = build_node(c, node.get());
                node->child_by_name.emplace(child->name, child.get());
                node->children.push_back(std::move(child));
            }
        }
        return node;
    }

    TimeSpan checked_ta(ComponentRuntime& rt) {
        TimeSpan ta = guarded<TimeSpan>(rt, [&] { return rt.behavior->time_advance(rt.state); });
        if (!ta.infinite() && ta.value() == 0)
            throw ModelError(rt.behavior->name() + ": time advance must be positive");
        return ta;
    }

    template <typename R, typename F>
    R guarded(ComponentRuntime& rt, F&& f) {
        try {
            return f();
        } catch (const ModelError&) {
            throw;
        } catch (const TimeOverflow&) {
            throw;
        } catch (const std::exception& e) {
            throw ModelError(rt.behavior->name() + ": " + e.what());
        }
    }

    static std::string render_values(const std::vector<Value>& vals) {
        std::string out = render_value(vals.front());
        for (std::size_t i = 1; i < vals.size(); ++i) out += "," + render_value(vals[i]);
        return out;
    }

    void emit_event(TraceEvent ev) {
        if (sink_) sink_->on_event(ev);
    }

    void deliver(ComponentRuntime& rt, const std::string& port, const Value& v) {
        const PortId* p = find_port(rt.behavior->input_ports(), port, PortDirection::input);
        if (!p)
            throw ModelError(rt.behavior->name() + ": no input port '" + port + "'");
        if (p->kind != kind_of(v))
            throw ModelError(rt.behavior->name() + "." + port + ": payload kind mismatch");
        rt.inbox.add(port, v);
    }

    void route_down(Node* node, const std::string& port, const std::vector<Value>& vals) {
        if (node->atomic) {
            for (const Value& v : vals) deliver(runtimes_[node->runtime_index], port, v);
            return;
        }
        for (const auto& c : node->coupled->eic)
            if (c.parent_port == port)
                route_down(node->child_by_name.at(c.child), c.child_port, vals);
    }

    void route_up(Node* node, const std::string& port, const std::vector<Value>& vals) {
        Node* parent = node->parent;
        if (!parent) return;  // whole-system output with no consumer: log only
        for (const auto& c : parent->coupled->ic)
            if (c.from_child == node->name && c.from_port == port)
                route_down(parent->child_by_name.at(c.to_child), c.to_port, vals);
        for (const auto& c : parent->coupled->eoc)
            if (c.child == node->name && c.child_port == port)
                route_up(parent, c.parent_port, vals);
    }

    void deliver_injections(VirtualTime t) {
        auto range = injections_.equal_range(t);
        for (auto it = range.first; it != range.second; ++it) {
            const auto& [port, value] = it->second;
            if (tree_->atomic) {
                deliver(runtimes_[tree_->runtime_index], port, value);
            } else {
                bool found = false;
                for (const auto& c : tree_->coupled->eic)
                    if (c.parent_port == port) {
                        route_down(tree_->child_by_name.at(c.child), c.child_port, {value});
                        found = true;
                    }
                if (!found && !find_port(tree_->coupled->inputs, port, PortDirection::input))
                    throw ModelError(tree_->name + ": no input port '" + port + "'");
            }
        }
        injections_.erase(range.first, range.second);
    }

    Model root_;
    TraceSink* sink_ = nullptr;
    std::uint64_t event_cap_;
    std::vector<ComponentRuntime> runtimes_;
    std::vector<Node*> atom_nodes_;
    std::unique_ptr<Node> tree_;
    std::multimap<VirtualTime, std::pair<std::string, Value>> injections_;
    VirtualTime now_ = VirtualTime::zero();
    std::uint64_t steps_ = 0;
    bool initial_emitted_ = false;
};

}  // namespace devs
