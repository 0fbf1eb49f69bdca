#pragma once

#include "dsl.hpp"
#include "random.hpp"
#include "theorems.hpp"
#include "translate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace coordbridge::cli {

enum exit_code : int { ok = 0, property_false = 1, usage_error = 2 };

enum class output_format { text, json_lines };

struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// COORDBRIDGE_ENUM_BOUND overrides the candidate bound of every enumeration.
inline enumeration_limits limits_from_environment()
{
    enumeration_limits limits;
    if (const char* v = std::getenv("COORDBRIDGE_ENUM_BOUND")) {
        char* end = nullptr;
        const unsigned long long n = std::strtoull(v, &end, 10);
        if (end == v || *end != '\0' || n == 0)
            throw input_error("COORDBRIDGE_ENUM_BOUND must be a positive integer, got '" + std::string(v) + "'");
        limits.max_candidates = static_cast<std::size_t>(n);
    }
    return limits;
}

inline document load(const std::string& path)
{
    auto result = parse_file(path);
    if (!result.ok()) {
        std::string message;
        for (const auto& d : result.diagnostics)
            message += (message.empty() ? "" : "\n") + format_diagnostic(d, path);
        throw input_error(message);
    }
    return std::move(*result.doc);
}

template <class T>
T load_as(const std::string& path)
{
    auto doc = load(path);
    if (const auto* m = std::get_if<T>(&doc.primary()))
        return *m;
    throw input_error(path + ": unexpected model kind '" + std::string(to_string(kind_of(doc.primary()))) + "'");
}

/// A CA without polarity suffixes over a one-value domain is read as a port
/// automaton; every other CA is interpreted through f_b.
inline bool reads_as_port_automaton(const constraint_automaton& a)
{
    if (!is_port_automaton(a))
        return false;
    return std::none_of(a.nodes().begin(), a.nodes().end(),
                        [](const port_name& p) { return polarity_of(p) != polarity::mixed; });
}

inline lts interpret(const model& m, const enumeration_limits& limits)
{
    return std::visit(
        [&](const auto& x) -> lts {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, port_automaton>)
                return interpret_pa(x);
            else if constexpr (std::is_same_v<T, constraint_automaton>)
                return reads_as_port_automaton(x) ? interpret_pa(to_port_automaton(x))
                                                  : interpret_ca(polarized_ca(x), limits);
            else if constexpr (std::is_same_v<T, bip_component>)
                return as_lts(x);
            else if constexpr (std::is_same_v<T, bip_architecture>)
                return interpret_arch(x, {false, limits});
            else if constexpr (std::is_same_v<T, interaction_model>)
                return interpret_im(x, limits);
            else
                return x;
        },
        m);
}

inline std::optional<gen::bounds> parse_bounds(const std::string& text)
{
    gen::bounds b;
    if (text.empty())
        return b;
    std::map<std::string, unsigned*> fields{{"states", &b.max_states},
                                            {"ports", &b.max_ports},
                                            {"coordinators", &b.max_coordinators},
                                            {"bidirectional", &b.max_bidirectional},
                                            {"domain", &b.max_domain},
                                            {"transitions", &b.max_transitions}};
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            return std::nullopt;
        auto it = fields.find(item.substr(0, eq));
        if (it == fields.end())
            return std::nullopt;
        try {
            const auto v = std::stoul(item.substr(eq + 1));
            if (v == 0 || v > 64)
                return std::nullopt;
            *it->second = static_cast<unsigned>(v);
        }
        catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return b;
}

class reporter {
public:
    reporter(std::ostream& out, output_format format) : out_(out), format_(format) {}

    [[nodiscard]] bool json() const { return format_ == output_format::json_lines; }

    void model_text(const std::string& command, const std::string& text)
    {
        if (json())
            line({{"command", command}, {"model", text}});
        else
            out_ << text;
    }

    void line(const nlohmann::json& j) { out_ << j.dump() << "\n"; }

    std::ostream& text() { return out_; }

private:
    std::ostream& out_;
    output_format format_;
};

inline nlohmann::json to_json(const theorem_verdict& v)
{
    nlohmann::json j{{"statement", v.statement}, {"outcome", to_string(v.outcome)}, {"detail", v.detail}};
    if (v.witness) {
        auto pairs = nlohmann::json::array();
        for (const auto& [a, b] : v.witness->pairs)
            pairs.push_back({a, b});
        j["witness"] = pairs;
    }
    if (!v.violations.empty())
        j["violations"] = v.violations;
    if (v.delta_checks)
        j["delta_checks"] = v.delta_checks;
    return j;
}

inline void print_verdict(reporter& rep, const theorem_verdict& v, nlohmann::json extra = nlohmann::json::object())
{
    if (rep.json()) {
        auto j = to_json(v);
        j.update(extra);
        rep.line(j);
        return;
    }
    auto& out = rep.text();
    if (extra.contains("case"))
        out << "case " << extra["case"].get<std::size_t>() << ": ";
    out << to_string(v.outcome) << ": " << v.statement;
    if (!v.detail.empty())
        out << " [" << v.detail << "]";
    if (v.delta_checks)
        out << " delta-checks=" << v.delta_checks;
    out << "\n";
    if (v.witness && !extra.contains("case"))
        out << "witness: " << to_string(*v.witness) << "\n";
    for (const auto& violation : v.violations)
        out << "  violation: " << violation << "\n";
}

struct verify_request {
    std::vector<int> theorems;
    std::vector<std::string> inputs;
    bool random = false;
    bool adversarial = false;
    std::size_t cases = 100;
    std::uint64_t seed = 1;
    gen::bounds bounds;
};

/// One random instance; `rejected` verdicts are what adversarial runs expect.
inline std::vector<theorem_verdict> random_case(int theorem, std::size_t index, const verify_request& req,
                                                const enumeration_limits& limits)
{
    std::seed_seq seq{static_cast<std::uint32_t>(req.seed), static_cast<std::uint32_t>(req.seed >> 32),
                      static_cast<std::uint32_t>(theorem), static_cast<std::uint32_t>(index)};
    gen::rng r(seq);
    const auto& b = req.bounds;
    auto guarded = [](const std::string& statement, auto&& run) {
        try {
            return run();
        }
        catch (const error& e) {
            return detail::rejected(statement, {e.what()});
        }
    };
    std::vector<theorem_verdict> out;
    switch (theorem) {
    case 1:
        if (req.adversarial) {
            out.push_back(check_theorem1_pa(gen::pa_adversarial(r, b, "P"), limits));
            out.push_back(check_theorem1_arch(gen::arch_adversarial(r, b, "A"), limits));
        }
        else {
            out.push_back(check_theorem1_pa(gen::pa_prime(r, b, "P"), limits));
            out.push_back(check_theorem1_arch(gen::arch_prime(r, b, "A"), limits));
        }
        break;
    case 2:
        if (req.adversarial) {
            auto [a1, a2] = gen::adversarial_pair(r, b, static_cast<unsigned>(index % 3));
            out.push_back(check_theorem2(a1, a2));
        }
        else {
            auto [a1, a2] = gen::composable_pair(r, b);
            out.push_back(check_lemma1(a1, a2));
            out.push_back(check_theorem2(a1, a2));
        }
        break;
    case 3:
        if (req.adversarial) {
            auto p1 = gen::pa_adversarial(r, b, "P1", {"a", "b", "c"});
            auto p2 = gen::pa_prime(r, b, "P2", {"b", "c", "d"});
            out.push_back(check_theorem3(p1, p2, limits));
        }
        else {
            auto [p1, p2] = gen::pa_pair(r, b);
            out.push_back(check_theorem3(p1, p2, limits));
        }
        break;
    default:
        if (req.adversarial) {
            // A stateful automaton is outside CA±'s stateless fragment.
            auto fifo = primitive(primitive_kind::fifo1, "a*", "b_*", gen::small_domain(r, b));
            out.push_back(guarded("g_b(BIP_b(FIFO1)) = f_b(FIFO1)",
                                  [&] { return check_theorem4_ca(polarized_ca(fifo), limits); }));
        }
        else {
            out.push_back(check_theorem4_ca(gen::polarized(r, b), limits));
            out.push_back(check_theorem4_im(gen::interaction(r, b), limits));
        }
        break;
    }
    return out;
}

inline std::vector<theorem_verdict> input_case(int theorem, const std::vector<std::string>& inputs,
                                               const enumeration_limits& limits)
{
    std::vector<theorem_verdict> out;
    auto need = [&](std::size_t n) {
        if (inputs.size() != n)
            throw input_error("theorem " + std::to_string(theorem) + " takes " + std::to_string(n) + " input files");
    };
    switch (theorem) {
    case 1:
        for (const auto& path : inputs) {
            auto doc = load(path);
            if (const auto* a = std::get_if<port_automaton>(&doc.primary()))
                out.push_back(check_theorem1_pa(*a, limits));
            else if (const auto* arch = std::get_if<bip_architecture>(&doc.primary()))
                out.push_back(check_theorem1_arch(*arch, limits));
            else
                throw input_error(path + ": theorem 1 needs a pa or arch model");
        }
        break;
    case 2: {
        need(2);
        const auto a1 = load_as<bip_architecture>(inputs[0]);
        const auto a2 = load_as<bip_architecture>(inputs[1]);
        out.push_back(check_lemma1(a1, a2));
        out.push_back(check_theorem2(a1, a2));
        break;
    }
    case 3:
        need(2);
        out.push_back(check_theorem3(load_as<port_automaton>(inputs[0]), load_as<port_automaton>(inputs[1]), limits));
        break;
    default:
        for (const auto& path : inputs) {
            auto doc = load(path);
            if (const auto* a = std::get_if<constraint_automaton>(&doc.primary()))
                out.push_back(check_theorem4_ca(polarized_ca(*a), limits));
            else if (const auto* m = std::get_if<interaction_model>(&doc.primary()))
                out.push_back(check_theorem4_im(*m, limits));
            else
                throw input_error(path + ": theorem 4 needs a ca or im model");
        }
        break;
    }
    return out;
}

inline int run_verify(reporter& rep, const verify_request& req, const enumeration_limits& limits)
{
    if (req.random == !req.inputs.empty())
        throw input_error("verify needs exactly one of --inputs or --random");
    if (req.adversarial && !req.random)
        throw input_error("--adversarial applies to --random runs");
    std::vector<int> theorems = req.theorems;
    if (theorems.empty())
        theorems = req.random ? std::vector<int>{1, 2, 3, 4} : std::vector<int>{};
    if (theorems.empty())
        throw input_error("verify --inputs needs --theorem");
    if (!req.random && theorems.size() != 1)
        throw input_error("verify --inputs takes a single --theorem");

    bool all_good = true;
    for (int t : theorems) {
        if (!req.random) {
            for (const auto& v : input_case(t, req.inputs, limits)) {
                print_verdict(rep, v, {{"theorem", t}});
                all_good = all_good && v.holds();
            }
            continue;
        }
        std::size_t passed = 0, total = 0, delta = 0;
        for (std::size_t i = 0; i < req.cases; ++i) {
            for (const auto& v : random_case(t, i, req, limits)) {
                const bool good = req.adversarial ? v.outcome == verdict_outcome::precondition_violated : v.holds();
                ++total;
                passed += good ? 1 : 0;
                delta += v.delta_checks;
                if (rep.json() || !good)
                    print_verdict(rep, v, {{"case", i}, {"theorem", t}});
            }
        }
        all_good = all_good && passed == total;
        const std::string expectation = req.adversarial ? "rejected" : "hold";
        if (rep.json())
            rep.line({{"theorem", t},
                      {"summary", expectation},
                      {"passed", passed},
                      {"total", total},
                      {"delta_checks", delta},
                      {"seed", req.seed}});
        else
            rep.text() << "theorem " << t << ": " << passed << "/" << total << " " << expectation
                       << (delta ? " (delta-checks " + std::to_string(delta) + ")" : "") << "\n";
    }
    return all_good ? ok : property_false;
}

inline int run_classcheck(reporter& rep, const std::vector<std::string>& files)
{
    std::vector<class_report> reports;
    std::vector<bip_architecture> archs;
    for (const auto& path : files) {
        auto doc = load(path);
        if (const auto* a = std::get_if<port_automaton>(&doc.primary()))
            reports.push_back(in_pa_prime(*a));
        else if (const auto* arch = std::get_if<bip_architecture>(&doc.primary())) {
            reports.push_back(in_arch_prime(*arch));
            archs.push_back(*arch);
        }
        else
            throw input_error(path + ": classcheck needs a pa or arch model");
    }
    std::vector<std::string> composition;
    if (archs.size() == 2) {
        composition = composition_side_conditions(archs[0], archs[1]);
    }
    bool member = composition.empty();
    for (const auto& r : reports) {
        member = member && r.member;
        if (rep.json())
            rep.line({{"subject", r.subject},
                      {"class", to_string(r.cls)},
                      {"member", r.member},
                      {"violations", r.violations}});
        else {
            rep.text() << r.subject << (r.member ? " in " : " not in ") << to_string(r.cls) << "\n";
            for (const auto& v : r.violations)
                rep.text() << "  violation: " << v << "\n";
        }
    }
    if (archs.size() == 2) {
        if (rep.json())
            rep.line({{"composition", composition.empty()}, {"violations", composition}});
        else {
            rep.text() << "composition side conditions " << (composition.empty() ? "hold" : "violated") << "\n";
            for (const auto& v : composition)
                rep.text() << "  violation: " << v << "\n";
        }
    }
    return member ? ok : property_false;
}

inline port_set split_ports(const std::string& text)
{
    port_set out;
    std::stringstream in(text);
    for (std::string p; std::getline(in, p, ',');)
        if (!p.empty())
            out.insert(p);
    return out;
}

/// Entry point shared by the executable and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Translate and compare BIP architectures and Reo connectors", "coordbridge"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json-lines"}));

    std::vector<std::string> files;
    std::string ports;
    bool full_product = false;
    verify_request req;
    std::string bounds_text;

    auto* parse_cmd = app.add_subcommand("parse", "Parse a model and print its canonical form");
    parse_cmd->add_option("file", files, "Model file")->required()->expected(1);
    auto* product_cmd = app.add_subcommand("product", "Synchronous product of automata (left-associated)");
    product_cmd->add_option("files", files, "Automaton files")->required()->expected(2, -1);
    auto* hide_cmd = app.add_subcommand("hide", "Hide nodes of an automaton");
    hide_cmd->add_option("file", files, "Automaton file")->required()->expected(1);
    hide_cmd->add_option("--ports", ports, "Comma-separated nodes to hide")->required();
    auto* apply_cmd = app.add_subcommand("apply", "Apply an architecture to operand components");
    apply_cmd->add_option("files", files, "Architecture file followed by operand files")->required()->expected(1, -1);
    apply_cmd->add_flag("--full-product", full_product, "Keep unreachable product states");
    auto* compose_cmd = app.add_subcommand("compose", "Compose two architectures");
    compose_cmd->add_option("files", files, "Architecture files")->required()->expected(2);
    auto* reo_cmd = app.add_subcommand("to-reo", "Translate an arch or im model to Reo");
    reo_cmd->add_option("file", files, "Model file")->required()->expected(1);
    auto* bip_cmd = app.add_subcommand("to-bip", "Translate a pa or ca model to BIP");
    bip_cmd->add_option("file", files, "Model file")->required()->expected(1);
    auto* interpret_cmd = app.add_subcommand("interpret", "Interpret a model as a labeled transition system");
    interpret_cmd->add_option("file", files, "Model file")->required()->expected(1);
    auto* bisim_cmd = app.add_subcommand("bisim", "Decide bisimilarity of two models' interpretations");
    bisim_cmd->add_option("files", files, "Model files")->required()->expected(2);
    auto* class_cmd = app.add_subcommand("classcheck", "Check membership in PA' or Arch'");
    class_cmd->add_option("files", files, "Model files (two architectures also check composability)")
        ->required()
        ->expected(1, 2);
    auto* verify_cmd = app.add_subcommand("verify", "Check the translation theorems");
    verify_cmd->add_option("--theorem", req.theorems, "Theorem number (1-4)")->check(CLI::Range(1, 4));
    verify_cmd->add_option("--inputs", req.inputs, "Model files")->expected(1, -1);
    verify_cmd->add_flag("--random", req.random, "Use generated instances");
    verify_cmd->add_flag("--adversarial", req.adversarial, "Generate out-of-class instances");
    verify_cmd->add_option("--cases", req.cases, "Random cases per theorem");
    verify_cmd->add_option("--seed", req.seed, "Random seed");
    verify_cmd->add_option("--bounds", bounds_text,
                           "Generator bounds, e.g. states=4,ports=4,coordinators=2,bidirectional=3,domain=3");
    auto* dot_cmd = app.add_subcommand("dot", "Export a model as Graphviz DOT");
    dot_cmd->add_option("file", files, "Model file")->required()->expected(1);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    }
    catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    }
    catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return usage_error;
    }

    reporter rep(out, format == "json-lines" ? output_format::json_lines : output_format::text);
    try {
        const auto limits = limits_from_environment();
        if (parse_cmd->parsed()) {
            rep.model_text("parse", serialize(load(files[0]).primary()));
            return ok;
        }
        if (product_cmd->parsed()) {
            auto first = load(files[0]);
            if (const auto* pa = std::get_if<port_automaton>(&first.primary())) {
                auto acc = *pa;
                for (std::size_t i = 1; i < files.size(); ++i)
                    acc = pa_product(acc, load_as<port_automaton>(files[i]));
                rep.model_text("product", serialize(acc));
            }
            else if (const auto* ca = std::get_if<constraint_automaton>(&first.primary())) {
                auto acc = *ca;
                for (std::size_t i = 1; i < files.size(); ++i)
                    acc = ca_product(acc, load_as<constraint_automaton>(files[i]));
                rep.model_text("product", serialize(acc));
            }
            else {
                throw input_error(files[0] + ": product needs pa or ca models");
            }
            return ok;
        }
        if (hide_cmd->parsed()) {
            auto doc = load(files[0]);
            const auto hidden = split_ports(ports);
            if (const auto* pa = std::get_if<port_automaton>(&doc.primary()))
                rep.model_text("hide", serialize(pa_hide(*pa, hidden)));
            else if (const auto* ca = std::get_if<constraint_automaton>(&doc.primary()))
                rep.model_text("hide", serialize(ca_hide(*ca, hidden)));
            else
                throw input_error(files[0] + ": hide needs a pa or ca model");
            return ok;
        }
        if (apply_cmd->parsed()) {
            const auto arch = load_as<bip_architecture>(files[0]);
            std::vector<bip_component> operands;
            for (std::size_t i = 1; i < files.size(); ++i)
                operands.push_back(load_as<bip_component>(files[i]));
            rep.model_text("apply", serialize(arch_apply(arch, operands, {full_product, limits})));
            return ok;
        }
        if (compose_cmd->parsed()) {
            rep.model_text("compose",
                           serialize(arch_compose(load_as<bip_architecture>(files[0]), load_as<bip_architecture>(files[1]))));
            return ok;
        }
        if (reo_cmd->parsed()) {
            auto doc = load(files[0]);
            if (const auto* arch = std::get_if<bip_architecture>(&doc.primary()))
                rep.model_text("to-reo", serialize(reo_a(*arch)));
            else if (const auto* im = std::get_if<interaction_model>(&doc.primary()))
                rep.model_text("to-reo", serialize(reo_b(*im, limits).automaton()));
            else
                throw input_error(files[0] + ": to-reo needs an arch or im model");
            return ok;
        }
        if (bip_cmd->parsed()) {
            auto doc = load(files[0]);
            if (const auto* pa = std::get_if<port_automaton>(&doc.primary()))
                rep.model_text("to-bip", serialize(bip_a(*pa, {}, limits).arch));
            else if (const auto* ca = std::get_if<constraint_automaton>(&doc.primary()))
                rep.model_text("to-bip", serialize(bip_b(polarized_ca(*ca), limits)));
            else
                throw input_error(files[0] + ": to-bip needs a pa or ca model");
            return ok;
        }
        if (interpret_cmd->parsed()) {
            rep.model_text("interpret", serialize(interpret(load(files[0]).primary(), limits)));
            return ok;
        }
        if (bisim_cmd->parsed()) {
            const auto l1 = interpret(load(files[0]).primary(), limits);
            const auto l2 = interpret(load(files[1]).primary(), limits);
            const auto v = compare_bisimulation(l1, l2);
            const char* verdict = v.outcome == bisim_outcome::bisimilar       ? "bisimilar"
                                  : v.outcome == bisim_outcome::not_bisimilar ? "not bisimilar"
                                                                              : "alphabet mismatch";
            if (rep.json()) {
                nlohmann::json j{{"command", "bisim"}, {"verdict", verdict}};
                if (v.witness) {
                    auto pairs = nlohmann::json::array();
                    for (const auto& [a, b] : v.witness->pairs)
                        pairs.push_back({a, b});
                    j["witness"] = pairs;
                }
                rep.line(j);
            }
            else {
                out << verdict << "\n";
                if (v.witness)
                    out << "witness: " << to_string(*v.witness) << "\n";
            }
            return v.outcome == bisim_outcome::bisimilar ? ok : property_false;
        }
        if (class_cmd->parsed())
            return run_classcheck(rep, files);
        if (verify_cmd->parsed()) {
            const auto b = parse_bounds(bounds_text);
            if (!b)
                throw input_error("malformed --bounds '" + bounds_text + "'");
            req.bounds = *b;
            return run_verify(rep, req, limits);
        }
        if (dot_cmd->parsed()) {
            rep.model_text("dot", export_dot(load(files[0]).primary()));
            return ok;
        }
    }
    catch (const input_error& e) {
        err << e.what() << "\n";
        return usage_error;
    }
    catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    }
    err << "usage error: no subcommand\n";
    return usage_error;
}

} // namespace coordbridge::cli
