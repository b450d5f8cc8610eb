#include "bcfa/dsl/value.hpp"

#include <algorithm>

namespace bcfa::dsl {

Value Value::set(std::vector<Value> items) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    return Value(Payload(std::make_shared<Collection>(Collection{true, std::move(items)})));
}

Value Value::seq(std::vector<Value> items) {
    return Value(Payload(std::make_shared<Collection>(Collection{false, std::move(items)})));
}

Value::Kind Value::kind() const {
    switch (v_.index()) {
    case 0: return Kind::Null;
    case 1: return Kind::Int;
    case 2: return Kind::Bool;
    case 3: return Kind::Str;
    case 4: return Kind::Node;
    default: return std::get<std::shared_ptr<Collection>>(v_)->is_set ? Kind::Set : Kind::Seq;
    }
}

std::string_view to_string(Value::Kind k) {
    switch (k) {
    case Value::Kind::Null: return "null";
    case Value::Kind::Int: return "int";
    case Value::Kind::Bool: return "bool";
    case Value::Kind::Str: return "string";
    case Value::Kind::Node: return "Node";
    case Value::Kind::Set: return "Set";
    case Value::Kind::Seq: return "Seq";
    }
    return "null";
}

Collection& Value::mutable_collection() {
    auto& ptr = std::get<std::shared_ptr<Collection>>(v_);
    if (ptr.use_count() > 1) ptr = std::make_shared<Collection>(*ptr);
    return *ptr;
}

void Value::insert(Value v) {
    Collection& c = mutable_collection();
    if (!c.is_set) {
        c.items.push_back(std::move(v));
        return;
    }
    auto it = std::lower_bound(c.items.begin(), c.items.end(), v);
    if (it == c.items.end() || *it != v) c.items.insert(it, std::move(v));
}

void Value::erase(const Value& v) {
    const auto& cur = items();
    if (kind() == Kind::Set) {
        if (!std::binary_search(cur.begin(), cur.end(), v)) return;
        Collection& c = mutable_collection();
        c.items.erase(std::lower_bound(c.items.begin(), c.items.end(), v));
        return;
    }
    auto pos = std::find(cur.begin(), cur.end(), v);
    if (pos == cur.end()) return;
    auto offset = pos - cur.begin();
    Collection& c = mutable_collection();
    c.items.erase(c.items.begin() + offset);
}

void Value::insert_all(const Value& other) {
    if (kind() == Kind::Seq) {
        Collection& c = mutable_collection();
        const auto& src = other.items();
        std::vector<Value> copy(src.begin(), src.end());
        c.items.insert(c.items.end(), copy.begin(), copy.end());
        return;
    }
    *this = set_union(*this, other);
}

void Value::erase_all(const Value& other) {
    const auto& drop = other.items();
    if (drop.empty()) return;
    std::vector<Value> keep;
    bool sorted_drop = other.kind() == Kind::Set;
    for (const auto& v : items()) {
        bool gone = sorted_drop ? std::binary_search(drop.begin(), drop.end(), v)
                                : std::find(drop.begin(), drop.end(), v) != drop.end();
        if (!gone) keep.push_back(v);
    }
    if (keep.size() == items().size()) return;
    mutable_collection().items = std::move(keep);
}

bool Value::contains(const Value& v) const {
    const auto& cur = items();
    if (kind() == Kind::Set) return std::binary_search(cur.begin(), cur.end(), v);
    return std::find(cur.begin(), cur.end(), v) != cur.end();
}

bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.v_.index() != b.v_.index()) return a.v_.index() <=> b.v_.index();
    if (a.is_collection()) {
        const auto& ca = *std::get<std::shared_ptr<Collection>>(a.v_);
        const auto& cb = *std::get<std::shared_ptr<Collection>>(b.v_);
        if (&ca == &cb) return std::strong_ordering::equal;
        if (ca.is_set != cb.is_set) return ca.is_set <=> cb.is_set;
        return std::lexicographical_compare_three_way(ca.items.begin(), ca.items.end(), cb.items.begin(),
                                                      cb.items.end());
    }
    switch (a.v_.index()) {
    case 0: return std::strong_ordering::equal;
    case 1: return std::get<std::int64_t>(a.v_) <=> std::get<std::int64_t>(b.v_);
    case 2: return std::get<bool>(a.v_) <=> std::get<bool>(b.v_);
    case 3: return std::get<std::string>(a.v_).compare(std::get<std::string>(b.v_)) <=> 0;
    case 4: return std::get<NodeRef>(a.v_) <=> std::get<NodeRef>(b.v_);
    }
    return std::strong_ordering::equal;
}

Value set_union(const Value& a, const Value& b) {
    if (a.is_null()) return b;
    if (b.is_null()) return a;
    if (a.kind() == Value::Kind::Seq) {
        Value out = a;
        out.insert_all(b);
        return out;
    }
    if (b.items().empty()) return a;
    if (a.items().empty() && b.kind() == Value::Kind::Set) return b;
    std::vector<Value> merged;
    if (b.kind() == Value::Kind::Set) {
        merged.reserve(a.items().size() + b.items().size());
        std::set_union(a.items().begin(), a.items().end(), b.items().begin(), b.items().end(),
                       std::back_inserter(merged));
        return Value::set(std::move(merged));
    }
    merged = a.items();
    merged.insert(merged.end(), b.items().begin(), b.items().end());
    return Value::set(std::move(merged));
}

Value set_intersection(const Value& a, const Value& b) {
    if (a.is_null()) return b;
    if (b.is_null()) return a;
    std::vector<Value> kept;
    for (const auto& v : a.items())
        if (b.contains(v)) kept.push_back(v);
    if (kept.size() == a.items().size()) return a;
    return a.kind() == Value::Kind::Set ? Value::set(std::move(kept)) : Value::seq(std::move(kept));
}

std::string to_display(const Value& v) {
    switch (v.kind()) {
    case Value::Kind::Null: return "null";
    case Value::Kind::Int: return std::to_string(v.as_int());
    case Value::Kind::Bool: return v.as_bool() ? "true" : "false";
    case Value::Kind::Str: return v.as_string();
    case Value::Kind::Node: return "node" + std::to_string(v.as_node());
    case Value::Kind::Set:
    case Value::Kind::Seq: {
        bool set = v.kind() == Value::Kind::Set;
        std::string out = set ? "{" : "[";
        for (std::size_t i = 0; i < v.items().size(); ++i) {
            if (i) out += ", ";
            out += to_display(v.items()[i]);
        }
        return out + (set ? "}" : "]");
    }
    }
    return "null";
}

} // namespace bcfa::dsl
