#pragma once

#include "bip.hpp"
#include "data_constraint.hpp"
#include "error.hpp"
#include "interaction.hpp"
#include "lts.hpp"
#include "reo.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Line-oriented surface syntax (.coord files). A file holds one or more
// blocks; the last block is the primary model.
//
//   pa M { nodes a, b; states s0*, s1; s0 -{a}-> s1; s1 -{}-> s1; }
//   ca M { domain D = {0,1}; nodes a*, b_*; states q*; q -{a*,b_*} | d[a*]==d[b_*] -> q; }
//   component C { ports p; states s*; s -{p}-> s; }
//   arch A { coordinators C; interface p, x; gamma {}, {p,x}; }
//   im G { domain D = {0,1,2}; conn w <- {a,b} locals {l} | guard: true
//          up: l := max(a,b) down: a := l, b := l; }
//   lts L { alphabet ports {a}; states q*; q -{a}-> q; }
//
// '#' starts a comment; '*' after a state marks it initial; names that are
// not plain identifiers are written in double quotes.

namespace coordbridge {

using model = std::variant<port_automaton, constraint_automaton, bip_component, bip_architecture, interaction_model, lts>;

enum class model_kind { pa, ca, component, arch, im, lts };

inline std::string_view to_string(model_kind k)
{
    switch (k) {
    case model_kind::pa: return "pa";
    case model_kind::ca: return "ca";
    case model_kind::component: return "component";
    case model_kind::arch: return "arch";
    case model_kind::im: return "im";
    case model_kind::lts: return "lts";
    }
    return "?";
}

inline model_kind kind_of(const model& m) { return static_cast<model_kind>(m.index()); }

struct source_span {
    std::size_t offset = 0;
    std::size_t length = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

struct diagnostic {
    enum class severity { error, warning };
    severity level = severity::error;
    std::string message;
    source_span span;
    std::optional<errc> code;
};

inline std::string format_diagnostic(const diagnostic& d, std::string_view source = "<input>")
{
    std::string out = std::string(source) + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) +
                      ": " + (d.level == diagnostic::severity::error ? "error" : "warning") + ": ";
    if (d.code)
        out += std::string(to_string(*d.code)) + ": ";
    return out + d.message;
}

struct document {
    std::vector<model> models;

    [[nodiscard]] const model& primary() const { return models.back(); }
};

struct parse_result {
    std::optional<document> doc;
    std::vector<diagnostic> diagnostics;

    [[nodiscard]] bool ok() const { return doc.has_value(); }
};

namespace detail {

inline bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

/// Double-quotes a name unless it is a plain identifier.
inline std::string quote(std::string_view name)
{
    const bool plain = !name.empty() && std::all_of(name.begin(), name.end(), is_ident_char);
    if (plain)
        return std::string(name);
    std::string out = "\"";
    for (char c : name) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

class parser {
public:
    explicit parser(std::string_view text) : src_(text) {}

    parse_result run(std::optional<model_kind> expected)
    {
        parse_result result;
        try {
            document doc;
            skip();
            if (pos_ >= src_.size())
                fail("expected a model block (pa, ca, component, arch, im or lts)", pos_, 0);
            while (skip(), pos_ < src_.size())
                block(doc);
            if (expected && kind_of(doc.primary()) != *expected)
                fail("expected a " + std::string(to_string(*expected)) + " model but the last block is a " +
                         std::string(to_string(kind_of(doc.primary()))),
                     last_block_, 1);
            result.doc = std::move(doc);
        }
        catch (const failure& f) {
            result.diagnostics.push_back(f.d);
        }
        return result;
    }

private:
    struct failure {
        diagnostic d;
    };

    [[noreturn]] void fail(std::string message, std::size_t offset, std::size_t length,
                           std::optional<errc> code = std::nullopt) const
    {
        offset = std::min(offset, src_.size());
        length = std::min(length, src_.size() - offset);
        source_span span{offset, length, 1, 1};
        for (std::size_t i = 0; i < offset; ++i) {
            if (src_[i] == '\n') {
                ++span.line;
                span.column = 1;
            }
            else {
                ++span.column;
            }
        }
        throw failure{{diagnostic::severity::error, std::move(message), span, code}};
    }

    [[noreturn]] void fail_here(const std::string& what) const
    {
        std::string found = pos_ < src_.size() ? "'" + std::string(1, src_[pos_]) + "'" : "end of input";
        fail("expected " + what + ", found " + found, pos_, 1);
    }

    void skip()
    {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)))
                ++pos_;
            else if (c == '#')
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    ++pos_;
            else
                break;
        }
    }

    bool peek(std::string_view token)
    {
        skip();
        return src_.substr(pos_, token.size()) == token;
    }

    bool accept(std::string_view token)
    {
        if (!peek(token))
            return false;
        pos_ += token.size();
        return true;
    }

    void expect(std::string_view token)
    {
        if (!accept(token))
            fail_here("'" + std::string(token) + "'");
    }

    bool peek_keyword(std::string_view kw)
    {
        skip();
        if (src_.substr(pos_, kw.size()) != kw)
            return false;
        const std::size_t end = pos_ + kw.size();
        return end >= src_.size() || !(is_ident_char(src_[end]) || src_[end] == '*');
    }

    bool accept_keyword(std::string_view kw)
    {
        if (!peek_keyword(kw))
            return false;
        pos_ += kw.size();
        return true;
    }

    std::string quoted()
    {
        const std::size_t start = pos_;
        ++pos_;
        std::string out;
        while (pos_ < src_.size() && src_[pos_] != '"') {
            if (src_[pos_] == '\\' && pos_ + 1 < src_.size())
                ++pos_;
            out += src_[pos_++];
        }
        if (pos_ >= src_.size())
            fail("unterminated string", start, 1);
        ++pos_;
        return out;
    }

    /// A model or state name: identifier or quoted string.
    std::string name(const std::string& what)
    {
        skip();
        if (pos_ < src_.size() && src_[pos_] == '"')
            return quoted();
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_]))
            ++pos_;
        if (start == pos_)
            fail_here(what);
        return std::string(src_.substr(start, pos_ - start));
    }

    port_name port()
    {
        skip();
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_port_char(src_[pos_]))
            ++pos_;
        if (start == pos_)
            fail_here("a port name");
        return std::string(src_.substr(start, pos_ - start));
    }

    datum integer()
    {
        skip();
        const std::size_t start = pos_;
        if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+'))
            ++pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        datum v = 0;
        const char* first = src_.data() + start + (src_[start] == '+' ? 1 : 0);
        auto [ptr, ec] = std::from_chars(first, src_.data() + pos_, v);
        if (ec != std::errc{} || ptr != src_.data() + pos_ || start == pos_) {
            pos_ = start;
            fail_here("an integer");
        }
        return v;
    }

    bool at_integer()
    {
        skip();
        if (pos_ >= src_.size())
            return false;
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)))
            return true;
        return (c == '-' || c == '+') && pos_ + 1 < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]));
    }

    std::vector<datum> integer_set()
    {
        expect("{");
        std::vector<datum> out;
        if (!accept("}")) {
            do
                out.push_back(integer());
            while (accept(","));
            expect("}");
        }
        return out;
    }

    std::vector<datum> integer_tuple()
    {
        expect("(");
        std::vector<datum> out;
        if (!accept(")")) {
            do
                out.push_back(integer());
            while (accept(","));
            expect(")");
        }
        return out;
    }

    port_set port_braces()
    {
        expect("{");
        port_set out;
        if (!accept("}")) {
            do
                out.insert(port());
            while (accept(","));
            expect("}");
        }
        return out;
    }

    std::vector<port_name> port_tuple()
    {
        expect("(");
        std::vector<port_name> out;
        if (!accept(")")) {
            do
                out.push_back(port());
            while (accept(","));
            expect(")");
        }
        return out;
    }

    /// `a, b, c ;` (possibly empty).
    port_set port_list()
    {
        port_set out;
        if (accept(";"))
            return out;
        do
            out.insert(port());
        while (accept(","));
        expect(";");
        return out;
    }

    // ---- guards ----

    data_constraint guard_expr()
    {
        if (accept_keyword("exists")) {
            const auto p = port();
            expect(".");
            return dc::exists(p, guard_expr());
        }
        std::vector<data_constraint> parts{guard_and()};
        while (accept("||"))
            parts.push_back(guard_and());
        return dc::any_of(std::move(parts));
    }

    data_constraint guard_and()
    {
        std::vector<data_constraint> parts{guard_unary()};
        while (accept("&&"))
            parts.push_back(guard_unary());
        return dc::all_of(std::move(parts));
    }

    data_constraint guard_unary()
    {
        if (accept("!"))
            return dc::negate(guard_unary());
        if (accept("(")) {
            auto g = guard_expr();
            expect(")");
            return g;
        }
        if (peek_keyword("exists"))
            return guard_expr();
        if (accept_keyword("true"))
            return dc::top();
        if (accept_keyword("false"))
            return dc::falsum();
        if (accept("d[")) {
            const auto p = port();
            expect("]");
            if (accept_keyword("in"))
                return dc::member(p, integer_set());
            expect("==");
            if (accept("d[")) {
                const auto q = port();
                expect("]");
                return dc::eq_ports(p, q);
            }
            return dc::eq(p, integer());
        }
        skip();
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_]))
            ++pos_;
        if (start == pos_ || !peek("(")) {
            pos_ = start;
            fail_here("a guard (true, false, !, (, exists, d[p] or f(...))");
        }
        std::string fn(src_.substr(start, pos_ - start));
        auto args = port_tuple();
        expect("==");
        expect("d[");
        const auto r = port();
        expect("]");
        return dc::fun_eq(r, std::move(fn), std::move(args));
    }

    // ---- shared statements ----

    struct state_decl {
        std::vector<state_id> names;
        std::optional<std::size_t> initial;
    };

    state_decl states()
    {
        state_decl out;
        do {
            const std::size_t at = pos_;
            out.names.push_back(name("a state name"));
            if (accept("*")) {
                if (out.initial)
                    fail("more than one initial state", at, pos_ - at);
                out.initial = out.names.size() - 1;
            }
        } while (accept(","));
        expect(";");
        return out;
    }

    finite_domain domain_decl()
    {
        const std::size_t at = pos_;
        const auto n = name("a domain name");
        expect("=");
        auto values = integer_set();
        expect(";");
        try {
            return finite_domain::make(n, std::move(values));
        }
        catch (const error& e) {
            fail(e.message(), at, pos_ - at, e.code());
        }
    }

    void function_decl(function_table& fns)
    {
        const std::size_t at = pos_;
        const auto n = name("a function name");
        expect("(");
        const auto arity = integer();
        expect(")");
        expect("=");
        expect("{");
        std::map<std::vector<datum>, datum> rows;
        if (!accept("}")) {
            do {
                auto args = integer_tuple();
                expect("->");
                rows[std::move(args)] = integer();
            } while (accept(","));
            expect("}");
        }
        expect(";");
        try {
            if (arity < 0)
                throw error(errc::invalid_model, "negative arity");
            fns.define_table(n, static_cast<std::size_t>(arity), std::move(rows));
        }
        catch (const error& e) {
            fail(e.message(), at, pos_ - at, e.code());
        }
    }

    template <class Label>
    struct raw_transition {
        state_id source;
        Label label;
        state_id target;
        std::size_t offset;
    };

    template <class Label>
    state_graph<Label> build_graph(const std::optional<state_decl>& decl, std::vector<raw_transition<Label>>& raw,
                                   std::size_t block_start)
    {
        if (!decl)
            fail("missing 'states' declaration", block_start, 1);
        std::map<state_id, std::size_t> index;
        for (std::size_t i = 0; i < decl->names.size(); ++i)
            if (!index.emplace(decl->names[i], i).second)
                fail("duplicate state '" + decl->names[i] + "'", block_start, 1, errc::invalid_model);
        std::vector<transition<Label>> ts;
        for (auto& t : raw) {
            auto s = index.find(t.source);
            auto d = index.find(t.target);
            if (s == index.end() || d == index.end())
                fail("transition uses an undeclared state '" + (s == index.end() ? t.source : t.target) + "'",
                     t.offset, 1, errc::invalid_model);
            ts.push_back({s->second, std::move(t.label), d->second});
        }
        return state_graph<Label>(decl->names, decl->initial.value_or(0), std::move(ts));
    }

    /// `src -{...}` already consumed up to the label; reads `-> dst ;`.
    state_id arrow_target()
    {
        expect("->");
        const auto t = name("a target state");
        expect(";");
        return t;
    }

    // ---- transfers ----

    data_transfer transfer()
    {
        if (accept_keyword("skip"))
            return assignment_transfer{};
        if (accept_keyword("table")) {
            table_transfer t;
            t.inputs = port_tuple();
            expect("->");
            t.outputs = port_tuple();
            expect("{");
            while (!accept("}")) {
                const std::size_t at = pos_;
                auto in = integer_tuple();
                expect("->");
                auto out = integer_tuple();
                expect(";");
                if (in.size() != t.inputs.size() || out.size() != t.outputs.size())
                    fail("table row has the wrong width", at, pos_ - at, errc::invalid_model);
                t.rows.emplace(std::move(in), std::move(out));
            }
            return t;
        }
        assignment_transfer a;
        do {
            const auto target = port();
            expect(":=");
            a.assigns.emplace_back(target, term_expr());
        } while (accept(","));
        return a;
    }

    term term_expr()
    {
        if (at_integer())
            return term::lit(integer());
        const auto head = port();
        if (accept("("))
        {
            --pos_;
            return term::call(head, port_tuple());
        }
        return term::var(head);
    }

    // ---- blocks ----

    void block(document& doc)
    {
        const std::size_t start = pos_;
        last_block_ = start;
        try {
            if (accept_keyword("pa"))
                doc.models.emplace_back(pa_block(start));
            else if (accept_keyword("ca"))
                doc.models.emplace_back(ca_block(start));
            else if (accept_keyword("component"))
                doc.models.emplace_back(component_block(start));
            else if (accept_keyword("arch"))
                doc.models.emplace_back(arch_block());
            else if (accept_keyword("im"))
                doc.models.emplace_back(im_block());
            else if (accept_keyword("lts"))
                doc.models.emplace_back(lts_block(start));
            else
                fail_here("a model block (pa, ca, component, arch, im or lts)");
        }
        catch (const error& e) {
            fail(e.message(), start, block_header_length(start), e.code());
        }
        if (auto* c = std::get_if<bip_component>(&doc.models.back()))
            components_[c->name()] = *c;
    }

    std::size_t block_header_length(std::size_t start) const
    {
        auto end = src_.find('{', start);
        return end == std::string_view::npos ? 1 : end - start;
    }

    port_automaton pa_block(std::size_t start)
    {
        const auto n = name("a model name");
        expect("{");
        port_set nodes;
        std::optional<state_decl> decl;
        std::vector<raw_transition<port_set>> raw;
        while (!accept("}")) {
            if (accept_keyword("nodes"))
                nodes = port_list();
            else if (accept_keyword("states"))
                decl = states();
            else
                raw.push_back(port_transition());
        }
        return {n, nodes, build_graph(decl, raw, start)};
    }

    bip_component component_block(std::size_t start)
    {
        const auto n = name("a component name");
        expect("{");
        port_set ports;
        std::optional<state_decl> decl;
        std::vector<raw_transition<port_set>> raw;
        while (!accept("}")) {
            if (accept_keyword("ports"))
                ports = port_list();
            else if (accept_keyword("states"))
                decl = states();
            else
                raw.push_back(port_transition());
        }
        return {n, ports, build_graph(decl, raw, start)};
    }

    raw_transition<port_set> port_transition()
    {
        skip();
        const std::size_t at = pos_;
        const auto s = name("a statement or transition");
        expect("-");
        const auto l = port_braces();
        if (peek("|"))
            fail("guards are only allowed in ca blocks", pos_, 1);
        return {s, l, arrow_target(), at};
    }

    constraint_automaton ca_block(std::size_t start)
    {
        const auto n = name("a model name");
        expect("{");
        finite_domain dom = finite_domain::singleton();
        function_table fns;
        port_set nodes;
        std::optional<state_decl> decl;
        std::vector<raw_transition<ca_label>> raw;
        while (!accept("}")) {
            if (accept_keyword("domain"))
                dom = domain_decl();
            else if (accept_keyword("fn"))
                function_decl(fns);
            else if (accept_keyword("nodes"))
                nodes = port_list();
            else if (accept_keyword("states"))
                decl = states();
            else {
                skip();
                const std::size_t at = pos_;
                const auto s = name("a statement or transition");
                expect("-");
                auto l = port_braces();
                data_constraint g;
                if (accept("|"))
                    g = guard_expr();
                raw.push_back({s, {std::move(l), std::move(g)}, arrow_target(), at});
            }
        }
        return {n, nodes, dom, fns, build_graph(decl, raw, start)};
    }

    bip_architecture arch_block()
    {
        const auto n = name("an architecture name");
        expect("{");
        std::vector<bip_component> coordinators;
        port_set interface;
        interaction_set gamma;
        while (!accept("}")) {
            if (accept_keyword("coordinators")) {
                if (accept(";"))
                    continue;
                do {
                    skip();
                    const std::size_t at = pos_;
                    const auto c = name("a coordinator name");
                    auto it = components_.find(c);
                    if (it == components_.end())
                        fail("unknown component '" + c + "'", at, c.size(), errc::invalid_model);
                    coordinators.push_back(it->second);
                } while (accept(","));
                expect(";");
            }
            else if (accept_keyword("component")) {
                const std::size_t at = pos_;
                coordinators.push_back(component_block(at));
            }
            else if (accept_keyword("interface")) {
                interface = port_list();
            }
            else if (accept_keyword("gamma")) {
                if (accept(";"))
                    continue;
                do
                    gamma.insert(port_braces());
                while (accept(","));
                expect(";");
            }
            else {
                fail_here("coordinators, component, interface or gamma");
            }
        }
        return {n, std::move(coordinators), std::move(interface), std::move(gamma)};
    }

    interaction_model im_block()
    {
        const auto n = name("a model name");
        expect("{");
        finite_domain dom = finite_domain::singleton();
        std::map<port_name, finite_domain> port_domains;
        function_table fns;
        std::vector<std::pair<std::size_t, interaction_expression>> raw;
        while (!accept("}")) {
            if (accept_keyword("domain")) {
                dom = domain_decl();
            }
            else if (accept_keyword("fn")) {
                function_decl(fns);
            }
            else if (accept_keyword("port")) {
                const auto p = port();
                expect(":");
                const std::size_t at = pos_;
                auto values = integer_set();
                expect(";");
                try {
                    port_domains[p] = finite_domain::make(p, std::move(values));
                }
                catch (const error& e) {
                    fail(e.message(), at, pos_ - at, e.code());
                }
            }
            else if (accept_keyword("conn")) {
                skip();
                const std::size_t at = pos_;
                interaction_expression e;
                e.top.insert(port());
                expect("<-");
                e.bottom = port_braces();
                if (accept_keyword("locals"))
                    e.locals = port_braces();
                accept("|");
                if (accept_keyword("guard")) {
                    expect(":");
                    e.guard = guard_expr();
                }
                if (accept_keyword("up")) {
                    expect(":");
                    e.up = transfer();
                }
                if (accept_keyword("down")) {
                    expect(":");
                    e.down = transfer();
                }
                expect(";");
                raw.emplace_back(at, std::move(e));
            }
            else {
                fail_here("domain, port, fn or conn");
            }
        }
        std::vector<simple_connector> connectors;
        for (auto& [at, e] : raw) {
            try {
                connectors.push_back(validate_simple(std::move(e)));
            }
            catch (const error& err) {
                fail(err.what(), at, 1, err.code());
            }
        }
        return {n, dom, std::move(port_domains), std::move(fns), std::move(connectors)};
    }

    lts lts_block(std::size_t start)
    {
        name("a model name");
        expect("{");
        std::optional<alphabet> alpha;
        std::optional<state_decl> decl;
        std::vector<raw_transition<label>> raw;
        while (!accept("}")) {
            if (accept_keyword("alphabet")) {
                if (accept_keyword("ports")) {
                    alpha = alphabet::over_ports(port_braces());
                }
                else if (accept_keyword("assignments")) {
                    auto ports = port_braces();
                    if (!accept_keyword("domain"))
                        fail_here("'domain'");
                    alpha = alphabet::over_assignments(std::move(ports), integer_set());
                }
                else {
                    fail_here("'ports' or 'assignments'");
                }
                expect(";");
            }
            else if (accept_keyword("states")) {
                decl = states();
            }
            else {
                skip();
                const std::size_t at = pos_;
                const auto s = name("a statement or transition");
                expect("-");
                label l;
                if (accept("[")) {
                    assignment a;
                    if (!accept("]")) {
                        do {
                            const auto p = port();
                            expect("=");
                            if (accept_keyword("void"))
                                a[p] = std::nullopt;
                            else
                                a[p] = integer();
                        } while (accept(","));
                        expect("]");
                    }
                    l = std::move(a);
                }
                else {
                    l = port_braces();
                }
                raw.push_back({s, std::move(l), arrow_target(), at});
            }
        }
        if (!alpha)
            fail("missing 'alphabet' declaration", start, 3);
        auto graph = build_graph(decl, raw, start);
        for (const auto& t : graph.transitions())
            if (!alpha->conforms(t.label))
                fail("label " + to_string(t.label) + " does not conform to the alphabet", start, 3,
                     errc::alphabet_mismatch);
        return lts(*alpha, std::move(graph));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t last_block_ = 0;
    std::map<std::string, bip_component> components_;
};

// ---- serialization ----

/// " a, b" or "" for an empty list.
inline std::string join_ports(const port_set& ports)
{
    return ports.empty() ? "" : " " + join({ports.begin(), ports.end()}, ", ");
}

inline std::string braces(const port_set& ports) { return "{" + join({ports.begin(), ports.end()}, ",") + "}"; }

inline std::string values_text(const std::vector<datum>& values, const char* open = "{", const char* close = "}")
{
    std::vector<std::string> parts;
    for (auto v : values)
        parts.push_back(std::to_string(v));
    return open + join(parts, ",") + close;
}

template <class Label>
void write_states(std::ostringstream& out, const state_graph<Label>& g)
{
    std::vector<std::string> names;
    for (std::size_t s = 0; s < g.state_count(); ++s)
        names.push_back(quote(g.name(s)) + (s == g.initial() ? "*" : ""));
    out << "  states " << join(names, ", ") << ";\n";
}

inline void write_functions(std::ostringstream& out, const function_table& fns)
{
    for (const auto& [name, e] : fns.user_entries()) {
        if (e->fn) {
            out << "  # fn " << name << " is a host callback and has no text form\n";
            continue;
        }
        std::vector<std::string> rows;
        for (const auto& [args, result] : e->table)
            rows.push_back(values_text(args, "(", ")") + "->" + std::to_string(result));
        out << "  fn " << quote(name) << "(" << e->arity << ") = {" << join(rows, ", ") << "};\n";
    }
}

inline void write_port_graph(std::ostringstream& out, const state_graph<port_set>& g)
{
    write_states(out, g);
    for (const auto& t : g.transitions())
        out << "  " << quote(g.name(t.source)) << " -" << braces(t.label) << "-> " << quote(g.name(t.target))
            << ";\n";
}

inline std::string transfer_text(const data_transfer& t)
{
    if (const auto* a = std::get_if<assignment_transfer>(&t)) {
        if (a->assigns.empty())
            return "skip";
        std::vector<std::string> parts;
        for (const auto& [target, rhs] : a->assigns)
            parts.push_back(target + " := " + to_string(rhs));
        return join(parts, ", ");
    }
    const auto& tab = std::get<table_transfer>(t);
    std::string out = "table (" + join(tab.inputs, ",") + ") -> (" + join(tab.outputs, ",") + ") {";
    for (const auto& [in, o] : tab.rows)
        out += " " + values_text(in, "(", ")") + "->" + values_text(o, "(", ")") + ";";
    return out + " }";
}

inline void write_component(std::ostringstream& out, const bip_component& c, const std::string& indent = "")
{
    std::ostringstream body;
    body << "  ports" << join_ports(c.ports()) << ";\n";
    write_port_graph(body, c.graph());
    out << indent << "component " << quote(c.name()) << " {\n";
    std::istringstream lines(body.str());
    for (std::string line; std::getline(lines, line);)
        out << indent << line << "\n";
    out << indent << "}\n";
}

struct writer {
    std::ostringstream& out;

    void operator()(const port_automaton& a) const
    {
        out << "pa " << quote(a.name()) << " {\n  nodes" << join_ports(a.nodes()) << ";\n";
        write_port_graph(out, a.graph());
        out << "}\n";
    }

    void operator()(const constraint_automaton& a) const
    {
        out << "ca " << quote(a.name()) << " {\n";
        out << "  domain " << quote(a.domain().name) << " = " << values_text(a.domain().values) << ";\n";
        write_functions(out, a.functions());
        out << "  nodes" << join_ports(a.nodes()) << ";\n";
        const auto& g = a.graph();
        write_states(out, g);
        for (const auto& t : g.transitions()) {
            out << "  " << quote(g.name(t.source)) << " -" << braces(t.label.ports);
            if (!t.label.guard.is_top())
                out << " | " << to_string(t.label.guard) << " ";
            out << "-> " << quote(g.name(t.target)) << ";\n";
        }
        out << "}\n";
    }

    void operator()(const bip_component& c) const { write_component(out, c); }

    void operator()(const bip_architecture& a) const
    {
        std::set<std::string> names;
        bool unique = true;
        for (const auto& c : a.coordinators())
            unique = unique && names.insert(c.name()).second;
        if (unique)
            for (const auto& c : a.coordinators()) {
                write_component(out, c);
                out << "\n";
            }
        out << "arch " << quote(a.name()) << " {\n";
        if (unique) {
            std::vector<std::string> refs;
            for (const auto& c : a.coordinators())
                refs.push_back(quote(c.name()));
            out << "  coordinators" << (refs.empty() ? "" : " " + join(refs, ", ")) << ";\n";
        }
        else {
            for (const auto& c : a.coordinators())
                write_component(out, c, "  ");
        }
        out << "  interface" << join_ports(a.interface()) << ";\n";
        std::vector<std::string> gamma;
        for (const auto& n : a.gamma())
            gamma.push_back(braces(n));
        out << "  gamma" << (gamma.empty() ? "" : " " + join(gamma, ", ")) << ";\n}\n";
    }

    void operator()(const interaction_model& m) const
    {
        out << "im " << quote(m.name()) << " {\n";
        out << "  domain " << quote(m.default_domain().name) << " = " << values_text(m.default_domain().values)
            << ";\n";
        for (const auto& [p, d] : m.port_domains())
            out << "  port " << p << " : " << values_text(d.values) << ";\n";
        write_functions(out, m.functions());
        for (const auto& c : m.connectors()) {
            out << "  conn " << c.top() << " <- " << braces(c.bottom());
            if (!c.locals().empty())
                out << " locals " << braces(c.locals());
            out << " | guard: " << to_string(c.guard()) << " up: " << transfer_text(c.up())
                << " down: " << transfer_text(c.down()) << ";\n";
        }
        out << "}\n";
    }

    void operator()(const lts& l) const
    {
        out << "lts L {\n";
        if (l.alpha().type == alphabet::kind::port_sets)
            out << "  alphabet ports " << braces(l.alpha().ports) << ";\n";
        else
            out << "  alphabet assignments " << braces(l.alpha().ports) << " domain "
                << values_text(l.alpha().domain) << ";\n";
        const auto& g = l.graph();
        write_states(out, g);
        for (const auto& t : g.transitions()) {
            out << "  " << quote(g.name(t.source)) << " -";
            if (const auto* ports = std::get_if<port_set>(&t.label)) {
                out << braces(*ports);
            }
            else {
                std::vector<std::string> parts;
                for (const auto& [p, v] : std::get<assignment>(t.label))
                    parts.push_back(p + "=" + to_string(v));
                out << "[" << join(parts, ",") << "]";
            }
            out << "-> " << quote(g.name(t.target)) << ";\n";
        }
        out << "}\n";
    }
};

inline std::string dot_id(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

template <class Label, class Text>
void dot_graph(std::ostringstream& out, const state_graph<Label>& g, Text text, const std::string& prefix = "",
               const std::string& indent = "  ")
{
    for (std::size_t s = 0; s < g.state_count(); ++s) {
        out << indent << dot_id(prefix + g.name(s)) << " [label=" << dot_id(g.name(s));
        if (s == g.initial())
            out << ", peripheries=2";
        out << "];\n";
    }
    for (const auto& t : g.transitions())
        out << indent << dot_id(prefix + g.name(t.source)) << " -> " << dot_id(prefix + g.name(t.target))
            << " [label=" << dot_id(text(t.label)) << "];\n";
}

} // namespace detail

inline parse_result parse(std::string_view text, std::optional<model_kind> expected = std::nullopt)
{
    return detail::parser(text).run(expected);
}

inline parse_result parse_file(const std::string& path, std::optional<model_kind> expected = std::nullopt)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        parse_result r;
        r.diagnostics.push_back({diagnostic::severity::error, "cannot open '" + path + "'", {}, std::nullopt});
        return r;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), expected);
}

/// Canonical text; equal models give byte-equal output.
inline std::string serialize(const model& m)
{
    std::ostringstream out;
    std::visit(detail::writer{out}, m);
    return out.str();
}

/// Components that a later architecture already writes out are skipped.
inline std::string serialize(const document& doc)
{
    std::string out;
    for (std::size_t i = 0; i < doc.models.size(); ++i) {
        if (const auto* c = std::get_if<bip_component>(&doc.models[i])) {
            const bool emitted_later = std::any_of(doc.models.begin() + i + 1, doc.models.end(), [&](const model& m) {
                const auto* a = std::get_if<bip_architecture>(&m);
                return a && std::count(a->coordinators().begin(), a->coordinators().end(), *c);
            });
            if (emitted_later)
                continue;
        }
        out += (out.empty() ? "" : "\n") + serialize(doc.models[i]);
    }
    return out;
}

/// Graphviz text. The initial state is drawn with a double border; edges
/// carry "N" or "N, g".
inline std::string export_dot(const model& m)
{
    std::ostringstream out;
    auto ports_text = [](const port_set& n) { return to_string(n); };
    auto head = [&](const std::string& name) {
        out << "digraph " << detail::dot_id(name) << " {\n  rankdir=LR;\n  node [shape=ellipse];\n";
    };
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, port_automaton> || std::is_same_v<T, bip_component>) {
                head(x.name());
                detail::dot_graph(out, x.graph(), ports_text);
            }
            else if constexpr (std::is_same_v<T, constraint_automaton>) {
                head(x.name());
                detail::dot_graph(out, x.graph(), [](const ca_label& l) { return to_string(l); });
            }
            else if constexpr (std::is_same_v<T, lts>) {
                head("L");
                detail::dot_graph(out, x.graph(), [](const label& l) { return to_string(l); });
            }
            else if constexpr (std::is_same_v<T, bip_architecture>) {
                head(x.name());
                for (const auto& c : x.coordinators()) {
                    out << "  subgraph " << detail::dot_id("cluster_" + c.name()) << " {\n    label="
                        << detail::dot_id(c.name()) << ";\n";
                    detail::dot_graph(out, c.graph(), ports_text, c.name() + ".", "    ");
                    out << "  }\n";
                }
                out << "  gamma [shape=note, label=" << detail::dot_id("gamma = " + to_string(x.gamma())) << "];\n";
            }
            else {
                head(x.name());
                for (const auto& c : x.connectors()) {
                    out << "  " << detail::dot_id(c.top()) << " [shape=box];\n";
                    for (const auto& p : c.bottom())
                        out << "  " << detail::dot_id(c.top()) << " -> " << detail::dot_id(p) << ";\n";
                }
            }
        },
        m);
    out << "}\n";
    return out.str();
}

} // namespace coordbridge
