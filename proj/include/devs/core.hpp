#pragma once

#include <any>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "devs/time.hpp"

namespace devs {

enum class PortDirection { input, output };
enum class ValueKind { boolean, integer };

// Message payload on a port. Booleans render as "1"/"0" in traces.
using Value = std::variant<bool, std::int64_t>;

inline ValueKind kind_of(const Value& v) {
    return std::holds_alternative<bool>(v) ? ValueKind::boolean : ValueKind::integer;
}

inline std::string render_value(const Value& v) {
    if (const bool* b = std::get_if<bool>(&v)) return *b ? "1" : "0";
    return std::to_string(std::get<std::int64_t>(v));
}

inline std::string_view kind_name(ValueKind k) {
    return k == ValueKind::boolean ? "boolean" : "integer";
}

struct PortId {
    std::string name;
    PortDirection direction;
    ValueKind kind;
};

inline const PortId* find_port(const std::vector<PortId>& ports,
                               std::string_view name, PortDirection dir) {
    for (const PortId& p : ports)
        if (p.direction == dir && p.name == name) return &p;
    return nullptr;
}

// Multiset of payloads per port, valid for a single instant.
class MessageBag {
public:
    void add(std::string_view port, Value v) {
        by_port_[std::string(port)].push_back(std::move(v));
    }

    bool empty() const { return by_port_.empty(); }
    void clear() { by_port_.clear(); }

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& [_, vals] : by_port_) n += vals.size();
        return n;
    }

    const std::vector<Value>& on(std::string_view port) const {
        static const std::vector<Value> kEmpty;
        auto it = by_port_.find(std::string(port));
        return it == by_port_.end() ? kEmpty : it->second;
    }

    const std::map<std::string, std::vector<Value>>& by_port() const { return by_port_; }

private:
    std::map<std::string, std::vector<Value>> by_port_;
};

// Model state is opaque to the engine; behaviors cast it back.
using State = std::any;

class AtomicBehavior;

State default_confluent(const AtomicBehavior& model, State s, const MessageBag& bag);

// The DEVS atomic interface. Output must not mutate model state;
// external transitions only see 0 <= elapsed < ta(s).
class AtomicBehavior {
public:
    AtomicBehavior(std::string name, std::vector<PortId> inputs, std::vector<PortId> outputs)
        : name_(std::move(name)), inputs_(std::move(inputs)), outputs_(std::move(outputs)) {}
    virtual ~AtomicBehavior() = default;

    const std::string& name() const { return name_; }
    const std::vector<PortId>& input_ports() const { return inputs_; }
    const std::vector<PortId>& output_ports() const { return outputs_; }

    virtual State initial_state() const = 0;
    virtual TimeSpan time_advance(const State& s) const = 0;
    virtual State internal_transition(State s) const = 0;
    virtual State external_transition(State s, TimeSpan elapsed, const MessageBag& input) const = 0;
    virtual State confluent_transition(State s, const MessageBag& input) const {
        return default_confluent(*this, std::move(s), input);
    }
    virtual MessageBag output(const State& s) const = 0;
    virtual std::string render_state(const State&) const { return {}; }

private:
    std::string name_;
    std::vector<PortId> inputs_;
    std::vector<PortId> outputs_;
};

// Internal-then-external collision resolution, used when a model does
// not override its confluent transition.
inline State default_confluent(const AtomicBehavior& model, State s, const MessageBag& bag) {
    if (bag.empty())
        throw std::invalid_argument("default_confluent: input bag must be non-empty");
    return model.external_transition(model.internal_transition(std::move(s)),
                                     TimeSpan::zero(), bag);
}

struct CoupledSpec;
using AtomicPtr = std::shared_ptr<AtomicBehavior>;
using CoupledPtr = std::shared_ptr<CoupledSpec>;
using Model = std::variant<AtomicPtr, CoupledPtr>;

struct ExternalInputCoupling {   // parent input -> child input
    std::string parent_port;
    std::string child;
    std::string child_port;
};
struct ExternalOutputCoupling {  // child output -> parent output
    std::string child;
    std::string child_port;
    std::string parent_port;
};
struct InternalCoupling {        // child output -> child input
    std::string from_child;
    std::string from_port;
    std::string to_child;
    std::string to_port;
};

// Structural composition: components plus EIC/EOC/IC coupling tables.
struct CoupledSpec {
    std::string name;
    std::vector<Model> components;
    std::vector<PortId> inputs;
    std::vector<PortId> outputs;
    std::vector<ExternalInputCoupling> eic;
    std::vector<ExternalOutputCoupling> eoc;
    std::vector<InternalCoupling> ic;
};

inline const std::string& model_name(const Model& m) {
    if (const AtomicPtr* a = std::get_if<AtomicPtr>(&m)) return (*a)->name();
    return std::get<CoupledPtr>(m)->name;
}

inline const std::vector<PortId>& model_inputs(const Model& m) {
    if (const AtomicPtr* a = std::get_if<AtomicPtr>(&m)) return (*a)->input_ports();
    return std::get<CoupledPtr>(m)->inputs;
}

inline const std::vector<PortId>& model_outputs(const Model& m) {
    if (const AtomicPtr* a = std::get_if<AtomicPtr>(&m)) return (*a)->output_ports();
    return std::get<CoupledPtr>(m)->outputs;
}

namespace detail {

inline const Model* find_component(const CoupledSpec& spec, std::string_view name) {
    for (const Model& c : spec.components)
        if (model_name(c) == name) return &c;
    return nullptr;
}

inline void check_duplicate_ports(const std::string& owner, const std::vector<PortId>& ports,
                                  std::vector<std::string>& errors) {
    for (std::size_t i = 0; i < ports.size(); ++i)
        for (std::size_t j = i + 1; j < ports.size(); ++j)
            if (ports[i].name == ports[j].name && ports[i].direction == ports[j].direction)
                errors.push_back(owner + ": duplicate port '" + ports[i].name + "'");
}

inline void check_endpoint(const CoupledSpec& spec, const std::string& where,
                           const std::string& child, const std::string& port,
                           PortDirection dir, const PortId*& out,
                           std::vector<std::string>& errors) {
    out = nullptr;
    const Model* c = find_component(spec, child);
    if (!c) {
        errors.push_back(spec.name + ": " + where + " names unknown component '" + child + "'");
        return;
    }
    const auto& ports = dir == PortDirection::input ? model_inputs(*c) : model_outputs(*c);
    out = find_port(ports, port, dir);
    if (!out)
        errors.push_back(spec.name + ": " + where + " names unknown port '" + child + "." +
                         port + "'");
}

}  // namespace detail

// Structural validation of one coupling level. Returns the violation
// list; callers must not execute an invalid spec.
inline std::vector<std::string> validate_coupled(const CoupledSpec& spec) {
    std::vector<std::string> errors;
    for (std::size_t i = 0; i < spec.components.size(); ++i)
        for (std::size_t j = i + 1; j < spec.components.size(); ++j)
            if (model_name(spec.components[i]) == model_name(spec.components[j]))
                errors.push_back(spec.name + ": duplicate component name '" +
                                 model_name(spec.components[i]) + "'");
    detail::check_duplicate_ports(spec.name, spec.inputs, errors);
    detail::check_duplicate_ports(spec.name, spec.outputs, errors);

    auto kind_mismatch = [&](const PortId* a, const PortId* b, const std::string& where) {
        if (a && b && a->kind != b->kind)
            errors.push_back(spec.name + ": " + where + " couples " +
                             std::string(kind_name(a->kind)) + " to " +
                             std::string(kind_name(b->kind)));
    };

    for (const auto& c : spec.eic) {
        const PortId* from = find_port(spec.inputs, c.parent_port, PortDirection::input);
        if (!from)
            errors.push_back(spec.name + ": EIC names unknown input port '" + c.parent_port + "'");
        const PortId* to = nullptr;
        detail::check_endpoint(spec, "EIC", c.child, c.child_port, PortDirection::input, to, errors);
        kind_mismatch(from, to, "EIC " + c.parent_port + " -> " + c.child + "." + c.child_port);
    }
    for (const auto& c : spec.eoc) {
        const PortId* from = nullptr;
        detail::check_endpoint(spec, "EOC", c.child, c.child_port, PortDirection::output, from, errors);
        const PortId* to = find_port(spec.outputs, c.parent_port, PortDirection::output);
        if (!to)
            errors.push_back(spec.name + ": EOC names unknown output port '" + c.parent_port + "'");
        kind_mismatch(from, to, "EOC " + c.child + "." + c.child_port + " -> " + c.parent_port);
    }
    for (const auto& c : spec.ic) {
        if (c.from_child == c.to_child)
            errors.push_back(spec.name + ": IC self-coupling on component '" + c.from_child + "'");
        const PortId* from = nullptr;
        const PortId* to = nullptr;
        detail::check_endpoint(spec, "IC", c.from_child, c.from_port, PortDirection::output, from,
                               errors);
        detail::check_endpoint(spec, "IC", c.to_child, c.to_port, PortDirection::input, to, errors);
        kind_mismatch(from, to, "IC " + c.from_child + "." + c.from_port + " -> " + c.to_child +
                                    "." + c.to_port);
    }
    return errors;
}

// Recursive validation of a whole model tree.
inline std::vector<std::string> validate_model(const Model& root) {
    std::vector<std::string> errors;
    if (const AtomicPtr* a = std::get_if<AtomicPtr>(&root)) {
        detail::check_duplicate_ports((*a)->name(), (*a)->input_ports(), errors);
        detail::check_duplicate_ports((*a)->name(), (*a)->output_ports(), errors);
        return errors;
    }
    const CoupledPtr& spec = std::get<CoupledPtr>(root);
    errors = validate_coupled(*spec);
    for (const Model& c : spec->components) {
        auto child_errors = validate_model(c);
        errors.insert(errors.end(), child_errors.begin(), child_errors.end());
    }
    return errors;
}

using ModelId = std::uint32_t;

struct RegisteredModel {
    ModelId id;
    std::string name;
    AtomicPtr behavior;
};

namespace detail {
inline void collect_atomics(const Model& m, std::vector<RegisteredModel>& out) {
    if (const AtomicPtr* a = std::get_if<AtomicPtr>(&m)) {
        out.push_back({static_cast<ModelId>(out.size() + 1), (*a)->name(), *a});
        return;
    }
    for (const Model& c : std::get<CoupledPtr>(m)->components) collect_atomics(c, out);
}
}  // namespace detail

// Depth-first registration-order numbering of atomic models, 1-based.
inline std::vector<RegisteredModel> assign_model_ids(const Model& root) {
    std::vector<RegisteredModel> out;
    detail::collect_atomics(root, out);
    return out;
}

}  // namespace devs
