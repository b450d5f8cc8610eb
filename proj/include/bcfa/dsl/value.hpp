#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "bcfa/cfg.hpp"

namespace bcfa::dsl {

struct NodeRef {
    NodeId id = 0;
    friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

class Value;

/// Set (sorted, unique) or Seq (insertion order) payload.
struct Collection {
    bool is_set = true;
    std::vector<Value> items;
};

/// Runtime value of the DSL. Collections are shared and copied on write,
/// which keeps assignment cheap while preserving value semantics.
class Value {
public:
    enum class Kind { Null, Int, Bool, Str, Node, Set, Seq };

    Value() = default;
    static Value integer(std::int64_t v) { return Value(Payload(v)); }
    static Value boolean(bool v) { return Value(Payload(v)); }
    static Value string(std::string v) { return Value(Payload(std::move(v))); }
    static Value node(NodeId id) { return Value(Payload(NodeRef{id})); }
    static Value set(std::vector<Value> items = {});
    static Value seq(std::vector<Value> items = {});

    Kind kind() const;
    bool is_null() const { return std::holds_alternative<std::monostate>(v_); }
    bool is_collection() const { return std::holds_alternative<std::shared_ptr<Collection>>(v_); }

    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }
    const std::string& as_string() const { return std::get<std::string>(v_); }
    NodeId as_node() const { return std::get<NodeRef>(v_).id; }
    const std::vector<Value>& items() const { return std::get<std::shared_ptr<Collection>>(v_)->items; }

    // Mutators for collections; each detaches a shared payload first.
    void insert(Value v);
    void erase(const Value& v);
    void insert_all(const Value& other);
    void erase_all(const Value& other);
    bool contains(const Value& v) const;

    friend bool operator==(const Value& a, const Value& b);
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);

private:
    using Payload = std::variant<std::monostate, std::int64_t, bool, std::string, NodeRef, std::shared_ptr<Collection>>;
    explicit Value(Payload p) : v_(std::move(p)) {}
    Collection& mutable_collection();

    Payload v_;
};

std::string_view to_string(Value::Kind k);

/// Set union / intersection; a Null operand is the identity (the other operand is returned).
Value set_union(const Value& a, const Value& b);
Value set_intersection(const Value& a, const Value& b);

/// Human-readable rendering: sets as {1, 2}, sequences as [a, b], null as null.
std::string to_display(const Value& v);

} // namespace bcfa::dsl
