#pragma once

#include "error.hpp"
#include "lts.hpp"
#include "ports.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace coordbridge {

struct finite_domain {
    std::string name = "D";
    std::vector<datum> values{0};

    static finite_domain make(std::string name, std::vector<datum> values)
    {
        std::sort(values.begin(), values.end());
        if (values.empty())
            throw error(errc::invalid_model, "data domain '" + name + "' is empty");
        if (std::adjacent_find(values.begin(), values.end()) != values.end())
            throw error(errc::invalid_model, "data domain '" + name + "' repeats a value");
        return {std::move(name), std::move(values)};
    }

    static finite_domain singleton() { return make("U", {0}); }

    [[nodiscard]] bool contains(datum v) const { return std::binary_search(values.begin(), values.end(), v); }
    [[nodiscard]] std::size_t size() const { return values.size(); }

    friend bool operator==(const finite_domain&, const finite_domain&) = default;
};

/// Named finite functions usable inside data constraints and transfers.
/// `max` and `min` are always available; tables are user supplied.
class function_table {
public:
    using callback = std::function<std::optional<datum>(std::span<const datum>)>;

    struct entry {
        std::size_t arity = 0;
        bool builtin = false;
        callback fn;
        std::map<std::vector<datum>, datum> table;
    };

    function_table()
    {
        auto fold = [](auto pick) {
            return [pick](std::span<const datum> args) -> std::optional<datum> {
                if (args.empty())
                    return std::nullopt;
                datum acc = args[0];
                for (auto v : args.subspan(1))
                    acc = pick(acc, v);
                return acc;
            };
        };
        entries_["max"] = {2, true, fold([](datum a, datum b) { return std::max(a, b); }), {}};
        entries_["min"] = {2, true, fold([](datum a, datum b) { return std::min(a, b); }), {}};
    }

    void define(const std::string& name, std::size_t arity, callback fn)
    {
        check_new(name);
        entries_[name] = {arity, false, std::move(fn), {}};
    }

    void define_table(const std::string& name, std::size_t arity, std::map<std::vector<datum>, datum> rows)
    {
        check_new(name);
        for (const auto& [args, result] : rows)
            if (args.size() != arity)
                throw error(errc::invalid_model, "row of function '" + name + "' has the wrong arity");
        entries_[name] = {arity, false, {}, std::move(rows)};
    }

    [[nodiscard]] const entry* find(std::string_view name) const
    {
        auto it = entries_.find(std::string(name));
        return it == entries_.end() ? nullptr : &it->second;
    }

    [[nodiscard]] bool contains(std::string_view name) const { return find(name) != nullptr; }

    [[nodiscard]] std::optional<datum> apply(std::string_view name, std::span<const datum> args) const
    {
        const entry* e = find(name);
        if (!e)
            throw error(errc::unknown_function, "function '" + std::string(name) + "' is not declared");
        if (args.size() != e->arity && !e->builtin)
            throw error(errc::invalid_model, "function '" + std::string(name) + "' expects " +
                                                 std::to_string(e->arity) + " arguments");
        if (e->fn)
            return e->fn(args);
        auto it = e->table.find(std::vector<datum>(args.begin(), args.end()));
        if (it == e->table.end())
            return std::nullopt;
        return it->second;
    }

    /// User-declared functions (no builtins), in name order.
    [[nodiscard]] std::vector<std::pair<std::string, const entry*>> user_entries() const
    {
        std::vector<std::pair<std::string, const entry*>> out;
        for (const auto& [name, e] : entries_)
            if (!e.builtin)
                out.emplace_back(name, &e);
        return out;
    }

    void merge(const function_table& other)
    {
        for (const auto& [name, e] : other.entries_) {
            auto it = entries_.find(name);
            if (it == entries_.end())
                entries_.emplace(name, e);
            else if (!e.builtin && !same(it->second, e))
                throw error(errc::invalid_model, "conflicting definitions of function '" + name + "'");
        }
    }

    friend bool operator==(const function_table& a, const function_table& b)
    {
        if (a.entries_.size() != b.entries_.size())
            return false;
        for (const auto& [name, e] : a.entries_) {
            auto it = b.entries_.find(name);
            if (it == b.entries_.end() || !same(e, it->second))
                return false;
        }
        return true;
    }

private:
    static bool same(const entry& a, const entry& b)
    {
        return a.arity == b.arity && a.builtin == b.builtin && a.table == b.table &&
               static_cast<bool>(a.fn) == static_cast<bool>(b.fn);
    }

    void check_new(const std::string& name)
    {
        if (auto it = entries_.find(name); it != entries_.end() && it->second.builtin)
            throw error(errc::invalid_model, "cannot redefine builtin function '" + name + "'");
    }

    std::map<std::string, entry> entries_;
};

/// Immutable data-constraint AST. Copies share structure.
class data_constraint {
public:
    enum class kind { top, negation, conjunction, disjunction, exists, eq_const, eq_port, in_set, fun_eq };

    struct node {
        kind type = kind::top;
        std::vector<data_constraint> children;
        port_name port;               // binder, or the constrained port
        port_name other;              // right-hand port of eq_port
        std::string function;         // fun_eq
        std::vector<port_name> args;  // fun_eq
        std::vector<datum> values;    // eq_const (one value) or in_set
    };

    data_constraint() : node_(top_node()) {}
    explicit data_constraint(node n) : node_(std::make_shared<const node>(std::move(n))) {}

    [[nodiscard]] kind type() const { return node_->type; }
    [[nodiscard]] const node& get() const { return *node_; }
    [[nodiscard]] const std::vector<data_constraint>& children() const { return node_->children; }
    [[nodiscard]] bool is_top() const { return node_->type == kind::top; }

    friend int compare(const data_constraint& a, const data_constraint& b)
    {
        if (a.node_ == b.node_)
            return 0;
        const node& x = *a.node_;
        const node& y = *b.node_;
        auto cmp = [](const auto& l, const auto& r) { return l < r ? -1 : (r < l ? 1 : 0); };
        if (int c = cmp(static_cast<int>(x.type), static_cast<int>(y.type)))
            return c;
        if (int c = cmp(x.port, y.port))
            return c;
        if (int c = cmp(x.other, y.other))
            return c;
        if (int c = cmp(x.function, y.function))
            return c;
        if (int c = cmp(x.args, y.args))
            return c;
        if (int c = cmp(x.values, y.values))
            return c;
        if (int c = cmp(x.children.size(), y.children.size()))
            return c;
        for (std::size_t i = 0; i < x.children.size(); ++i)
            if (int c = compare(x.children[i], y.children[i]))
                return c;
        return 0;
    }

    friend bool operator==(const data_constraint& a, const data_constraint& b) { return compare(a, b) == 0; }
    friend bool operator<(const data_constraint& a, const data_constraint& b) { return compare(a, b) < 0; }

private:
    static std::shared_ptr<const node> top_node()
    {
        static const auto shared = std::make_shared<const node>();
        return shared;
    }

    std::shared_ptr<const node> node_;
};

namespace dc {

using kind = data_constraint::kind;

inline data_constraint top() { return {}; }

inline data_constraint negate(data_constraint g)
{
    data_constraint::node n;
    n.type = kind::negation;
    n.children.push_back(std::move(g));
    return data_constraint(std::move(n));
}

inline data_constraint falsum() { return negate(top()); }

/// n-ary conjunction; zero parts is true and one part is that part.
inline data_constraint all_of(std::vector<data_constraint> parts)
{
    if (parts.empty())
        return top();
    if (parts.size() == 1)
        return parts.front();
    data_constraint::node n;
    n.type = kind::conjunction;
    n.children = std::move(parts);
    return data_constraint(std::move(n));
}

/// n-ary disjunction; zero parts is false and one part is that part.
inline data_constraint any_of(std::vector<data_constraint> parts)
{
    if (parts.empty())
        return falsum();
    if (parts.size() == 1)
        return parts.front();
    data_constraint::node n;
    n.type = kind::disjunction;
    n.children = std::move(parts);
    return data_constraint(std::move(n));
}

/// g1 ∧ g2 with ⊤ operands dropped.
inline data_constraint conjoin(const data_constraint& a, const data_constraint& b)
{
    if (a.is_top())
        return b;
    if (b.is_top())
        return a;
    return all_of({a, b});
}

inline data_constraint exists(port_name p, data_constraint body)
{
    data_constraint::node n;
    n.type = kind::exists;
    n.port = std::move(p);
    n.children.push_back(std::move(body));
    return data_constraint(std::move(n));
}

inline data_constraint eq(port_name p, datum v)
{
    data_constraint::node n;
    n.type = kind::eq_const;
    n.port = std::move(p);
    n.values = {v};
    return data_constraint(std::move(n));
}

inline data_constraint eq_ports(port_name p, port_name q)
{
    data_constraint::node n;
    n.type = kind::eq_port;
    n.port = std::move(p);
    n.other = std::move(q);
    return data_constraint(std::move(n));
}

inline data_constraint member(port_name p, std::vector<datum> values)
{
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    data_constraint::node n;
    n.type = kind::in_set;
    n.port = std::move(p);
    n.values = std::move(values);
    return data_constraint(std::move(n));
}

/// d[result] == f(d[args...])
inline data_constraint fun_eq(port_name result, std::string function, std::vector<port_name> args)
{
    data_constraint::node n;
    n.type = kind::fun_eq;
    n.port = std::move(result);
    n.function = std::move(function);
    n.args = std::move(args);
    return data_constraint(std::move(n));
}

} // namespace dc

namespace detail {

inline void collect_free_ports(const data_constraint& g, std::vector<std::string_view>& bound, port_set& out)
{
    const auto& n = g.get();
    auto note = [&](const port_name& p) {
        if (std::find(bound.begin(), bound.end(), p) == bound.end())
            out.insert(p);
    };
    switch (n.type) {
    case dc::kind::top: break;
    case dc::kind::negation:
    case dc::kind::conjunction:
    case dc::kind::disjunction:
        for (const auto& c : n.children)
            collect_free_ports(c, bound, out);
        break;
    case dc::kind::exists:
        bound.push_back(n.port);
        collect_free_ports(n.children.front(), bound, out);
        bound.pop_back();
        break;
    case dc::kind::eq_const:
    case dc::kind::in_set: note(n.port); break;
    case dc::kind::eq_port:
        note(n.port);
        note(n.other);
        break;
    case dc::kind::fun_eq:
        note(n.port);
        for (const auto& a : n.args)
            note(a);
        break;
    }
}

/// Variable bindings searched innermost-first, so quantifiers shadow.
class binding_stack {
public:
    void push(std::string_view port, value v) { items_.emplace_back(port, v); }
    void pop() { items_.pop_back(); }
    value& back() { return items_.back().second; }

    [[nodiscard]] const value& lookup(std::string_view port) const
    {
        for (auto it = items_.rbegin(); it != items_.rend(); ++it)
            if (it->first == port)
                return it->second;
        throw error(errc::unbound_port, "port '" + std::string(port) + "' has no value in the assignment");
    }

private:
    std::vector<std::pair<std::string_view, value>> items_;
};

inline bool eval(const data_constraint& g, binding_stack& env, const finite_domain& dom, const function_table& fns)
{
    const auto& n = g.get();
    switch (n.type) {
    case dc::kind::top: return true;
    case dc::kind::negation: return !eval(n.children.front(), env, dom, fns);
    case dc::kind::conjunction:
        for (const auto& c : n.children)
            if (!eval(c, env, dom, fns))
                return false;
        return true;
    case dc::kind::disjunction:
        for (const auto& c : n.children)
            if (eval(c, env, dom, fns))
                return true;
        return false;
    case dc::kind::exists: {
        bool found = false;
        env.push(n.port, std::nullopt);
        for (auto v : dom.values) {
            env.back() = v;
            if (eval(n.children.front(), env, dom, fns)) {
                found = true;
                break;
            }
        }
        env.pop();
        return found;
    }
    case dc::kind::eq_const: {
        const auto& v = env.lookup(n.port);
        return v && *v == n.values.front();
    }
    case dc::kind::eq_port: {
        const auto& a = env.lookup(n.port);
        const auto& b = env.lookup(n.other);
        return a && b && *a == *b;
    }
    case dc::kind::in_set: {
        const auto& v = env.lookup(n.port);
        return v && std::binary_search(n.values.begin(), n.values.end(), *v);
    }
    case dc::kind::fun_eq: {
        const auto& r = env.lookup(n.port);
        std::vector<datum> args;
        args.reserve(n.args.size());
        for (const auto& a : n.args) {
            const auto& v = env.lookup(a);
            if (!v)
                return false;
            args.push_back(*v);
        }
        if (!r)
            return false;
        const auto out = fns.apply(n.function, args);
        return out && *out == *r;
    }
    }
    return false;
}

inline std::uint64_t candidate_count(std::size_t domain_size, std::size_t ports, const enumeration_limits& limits)
{
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < ports; ++i) {
        if (total > limits.max_candidates / std::max<std::size_t>(domain_size, 1) + 1)
            throw error(errc::domain_too_large, "|D|^" + std::to_string(ports) + " exceeds the enumeration bound of " +
                                                    std::to_string(limits.max_candidates));
        total *= domain_size;
    }
    if (total > limits.max_candidates)
        throw error(errc::domain_too_large, std::to_string(total) + " candidate assignments exceed the bound of " +
                                                std::to_string(limits.max_candidates));
    return total;
}

/// Calls `visit(values)` for every point of D^|ports| with `env` bound.
template <class Visit>
void enumerate_assignments(const std::vector<port_name>& ports, const finite_domain& dom, binding_stack& env,
                           const enumeration_limits& limits, Visit visit)
{
    candidate_count(dom.size(), ports.size(), limits);
    std::vector<std::size_t> digits(ports.size(), 0);
    for (const auto& p : ports)
        env.push(p, dom.values.front());
    std::vector<datum> current(ports.size(), dom.values.front());
    while (true) {
        visit(current);
        std::size_t i = 0;
        for (; i < ports.size(); ++i) {
            if (++digits[i] < dom.size())
                break;
            digits[i] = 0;
        }
        if (i == ports.size())
            break;
        // Re-bind the changed suffix of digits; the stack holds ports in order.
        for (std::size_t k = 0; k <= i; ++k)
            current[k] = dom.values[digits[k]];
        for (std::size_t k = 0; k < ports.size(); ++k) {
            env.pop();
        }
        for (std::size_t k = 0; k < ports.size(); ++k)
            env.push(ports[k], current[k]);
    }
    for (std::size_t k = 0; k < ports.size(); ++k)
        env.pop();
}

} // namespace detail

using partial_assignment = std::map<port_name, datum>;

inline std::string to_string(const partial_assignment& a)
{
    std::vector<std::string> parts;
    for (const auto& [p, v] : a)
        parts.push_back(p + "=" + std::to_string(v));
    return "[" + join(parts, ",") + "]";
}

/// Ports occurring outside every enclosing quantifier that binds them.
inline port_set free_ports(const data_constraint& g)
{
    port_set out;
    std::vector<std::string_view> bound;
    detail::collect_free_ports(g, bound, out);
    return out;
}

inline bool is_quantifier_free(const data_constraint& g)
{
    if (g.type() == dc::kind::exists)
        return false;
    return std::all_of(g.children().begin(), g.children().end(), is_quantifier_free);
}

inline bool dc_eval(const data_constraint& g, const partial_assignment& delta, const finite_domain& dom,
                    const function_table& fns = {})
{
    detail::binding_stack env;
    for (const auto& [p, v] : delta)
        env.push(p, v);
    return detail::eval(g, env, dom, fns);
}

/// Void-valued ports make every atomic predicate on them false.
inline bool dc_eval(const data_constraint& g, const assignment& delta, const finite_domain& dom,
                    const function_table& fns = {})
{
    detail::binding_stack env;
    for (const auto& [p, v] : delta)
        env.push(p, v);
    return detail::eval(g, env, dom, fns);
}

/// Every δ : nodes -> D with δ ⊨ g, in lexicographic order.
inline std::vector<partial_assignment> dc_solutions(const port_set& nodes, const data_constraint& g,
                                                    const finite_domain& dom, const function_table& fns = {},
                                                    const enumeration_limits& limits = {})
{
    for (const auto& p : free_ports(g))
        if (!nodes.count(p))
            throw error(errc::unbound_port, "free port '" + p + "' is not among the enumerated nodes");
    std::vector<port_name> order(nodes.begin(), nodes.end());
    std::vector<partial_assignment> out;
    detail::binding_stack env;
    detail::enumerate_assignments(order, dom, env, limits, [&](const std::vector<datum>& values) {
        if (detail::eval(g, env, dom, fns)) {
            partial_assignment a;
            for (std::size_t i = 0; i < order.size(); ++i)
                a.emplace(order[i], values[i]);
            out.push_back(std::move(a));
        }
    });
    std::sort(out.begin(), out.end());
    return out;
}

/// Δ(N,g): total assignments over 2P that are void exactly outside N and
/// satisfy g.
inline std::vector<assignment> delta_set(const port_set& n, const data_constraint& g, const port_set& two_p,
                                         const finite_domain& dom, const function_table& fns = {},
                                         const enumeration_limits& limits = {})
{
    if (!is_subset(n, two_p))
        throw error(errc::invalid_model, "firing set " + to_string(n) + " is not within " + to_string(two_p));
    for (const auto& p : free_ports(g))
        if (!two_p.count(p))
            throw error(errc::unbound_port, "free port '" + p + "' is outside the duplicated port set");
    std::vector<port_name> order(n.begin(), n.end());
    const auto silent = set_difference(two_p, n);
    detail::binding_stack env;
    for (const auto& p : silent)
        env.push(p, std::nullopt);
    std::vector<assignment> out;
    detail::enumerate_assignments(order, dom, env, limits, [&](const std::vector<datum>& values) {
        if (detail::eval(g, env, dom, fns)) {
            assignment a;
            for (const auto& p : silent)
                a.emplace(p, std::nullopt);
            for (std::size_t i = 0; i < order.size(); ++i)
                a.emplace(order[i], values[i]);
            out.push_back(std::move(a));
        }
    });
    std::sort(out.begin(), out.end());
    return out;
}

/// ∃d_{p1} ... ∃d_{pn} (g)
inline data_constraint dc_hide(data_constraint g, const port_set& ports)
{
    for (auto it = ports.rbegin(); it != ports.rend(); ++it)
        g = dc::exists(*it, std::move(g));
    return g;
}

inline bool dc_equivalent(const data_constraint& g1, const data_constraint& g2, const port_set& nodes,
                          const finite_domain& dom, const function_table& fns = {},
                          const enumeration_limits& limits = {})
{
    return dc_solutions(nodes, g1, dom, fns, limits) == dc_solutions(nodes, g2, dom, fns, limits);
}

/// Canonical disjunction of full assignments over `ports`, one disjunct per
/// solution; ⊤ when every candidate is a solution.
inline data_constraint canonical_disjunction(const std::vector<partial_assignment>& solutions,
                                             const port_set& ports, const finite_domain& dom,
                                             const enumeration_limits& limits = {})
{
    if (solutions.size() == detail::candidate_count(dom.size(), ports.size(), limits))
        return dc::top();
    std::vector<data_constraint> disjuncts;
    disjuncts.reserve(solutions.size());
    for (const auto& s : solutions) {
        std::vector<data_constraint> atoms;
        for (const auto& [p, v] : s)
            atoms.push_back(dc::eq(p, v));
        disjuncts.push_back(dc::all_of(std::move(atoms)));
    }
    return dc::any_of(std::move(disjuncts));
}

/// Quantifier-free equivalent of g over its free ports, by enumeration.
inline data_constraint dc_eliminate_quantifiers(const data_constraint& g, const finite_domain& dom,
                                                const function_table& fns = {},
                                                const enumeration_limits& limits = {})
{
    if (g.is_top())
        return g;
    const auto ports = free_ports(g);
    return canonical_disjunction(dc_solutions(ports, g, dom, fns, limits), ports, dom, limits);
}

/// Renames free occurrences of ports; bound variables are left alone.
inline data_constraint rename_free_ports(const data_constraint& g, const std::map<port_name, port_name>& renaming)
{
    if (renaming.empty())
        return g;
    const auto& n = g.get();
    auto map_port = [&](const port_name& p) {
        auto it = renaming.find(p);
        return it == renaming.end() ? p : it->second;
    };
    data_constraint::node out = n;
    switch (n.type) {
    case dc::kind::top: return g;
    case dc::kind::negation:
    case dc::kind::conjunction:
    case dc::kind::disjunction:
        for (auto& c : out.children)
            c = rename_free_ports(c, renaming);
        break;
    case dc::kind::exists: {
        auto inner = renaming;
        inner.erase(n.port);
        out.children.front() = rename_free_ports(n.children.front(), inner);
        break;
    }
    case dc::kind::eq_const:
    case dc::kind::in_set: out.port = map_port(n.port); break;
    case dc::kind::eq_port:
        out.port = map_port(n.port);
        out.other = map_port(n.other);
        break;
    case dc::kind::fun_eq:
        out.port = map_port(n.port);
        for (auto& a : out.args)
            a = map_port(a);
        break;
    }
    return data_constraint(std::move(out));
}

namespace detail {

// Binding strength: exists < || < && < ! and atoms.
inline int precedence(dc::kind k)
{
    switch (k) {
    case dc::kind::exists: return 0;
    case dc::kind::disjunction: return 1;
    case dc::kind::conjunction: return 2;
    default: return 3;
    }
}

inline void print(const data_constraint& g, int context, std::string& out)
{
    const auto& n = g.get();
    const bool parens = precedence(n.type) < context;
    if (parens)
        out += '(';
    switch (n.type) {
    case dc::kind::top: out += "true"; break;
    case dc::kind::negation:
        out += '!';
        print(n.children.front(), 3, out);
        break;
    case dc::kind::conjunction:
    case dc::kind::disjunction:
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i != 0)
                out += n.type == dc::kind::conjunction ? " && " : " || ";
            print(n.children[i], n.type == dc::kind::conjunction ? 3 : 2, out);
        }
        break;
    case dc::kind::exists:
        out += "exists " + n.port + ". ";
        print(n.children.front(), 0, out);
        break;
    case dc::kind::eq_const: out += "d[" + n.port + "]==" + std::to_string(n.values.front()); break;
    case dc::kind::eq_port: out += "d[" + n.port + "]==d[" + n.other + "]"; break;
    case dc::kind::in_set: {
        std::vector<std::string> vs;
        for (auto v : n.values)
            vs.push_back(std::to_string(v));
        out += "d[" + n.port + "] in {" + join(vs, ",") + "}";
        break;
    }
    case dc::kind::fun_eq:
        out += n.function + "(" + join(n.args, ",") + ")==d[" + n.port + "]";
        break;
    }
    if (parens)
        out += ')';
}

} // namespace detail

inline std::string to_string(const data_constraint& g)
{
    std::string out;
    detail::print(g, 0, out);
    return out;
}

} // namespace coordbridge
