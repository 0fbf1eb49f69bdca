#include <catch2/catch_amalgamated.hpp>

#include "coordbridge/dsl.hpp"
#include "coordbridge/random.hpp"
#include "coordbridge/translate.hpp"
#include "support.hpp"

#include <filesystem>

using namespace coordbridge;

namespace {

model reparse(const model& m)
{
    const auto text = serialize(m);
    auto r = parse(text, kind_of(m));
    INFO(text);
    if (!r.ok())
        FAIL(format_diagnostic(r.diagnostics.front()));
    return r.doc->primary();
}

std::size_t count_lines_with(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        n += line.find(needle) != std::string::npos;
    return n;
}

} // namespace

TEST_CASE("every fixture round-trips byte for byte")
{
    for (const auto& entry : std::filesystem::directory_iterator(COORDBRIDGE_MODELS)) {
        if (entry.path().extension() != ".coord")
            continue;
        INFO(entry.path().filename().string());
        const auto doc = support::load_document(entry.path().filename().string());
        const auto once = serialize(doc.primary());
        CHECK(reparse(doc.primary()) == doc.primary());
        CHECK(serialize(reparse(doc.primary())) == once);
    }
}

TEST_CASE("round-trip on generated models")
{
    gen::rng r(47);
    gen::bounds b;
    for (int i = 0; i < 100; ++i) {
        const std::vector<model> ms{
            gen::pa_prime(r, b, "P"),
            gen::pa_adversarial(r, b, "Q"),
            as_component(gen::pa_prime(r, b, "K")),
            gen::arch_prime(r, b, "A"),
            gen::arch_adversarial(r, b, "Z"),
            gen::polarized(r, b).automaton(),
            gen::interaction(r, b),
            gen::random_lts(r, 4, {"a", "b"}),
            interpret_ca(hide_mixed(gen::polarized(r, b))),
        };
        for (const auto& m : ms) {
            INFO("case " << i << ", kind " << to_string(kind_of(m)));
            CHECK(reparse(m) == m);
        }
    }
}

TEST_CASE("serialization is deterministic")
{
    gen::rng r1(5), r2(5);
    gen::bounds b;
    for (int i = 0; i < 20; ++i)
        CHECK(serialize(model(gen::interaction(r1, b))) == serialize(model(gen::interaction(r2, b))));
}

TEST_CASE("the mutex coordinator parses as a two-state component")
{
    const auto c12 = std::get<bip_architecture>(support::load_document("a12.coord").primary()).coordinators()[0];
    const auto again = std::get<bip_component>(reparse(c12));
    CHECK(again.graph().state_count() == 2);
    CHECK(again.graph().initial_state() == "free");
    CHECK(again == c12);
}

TEST_CASE("diagnostics")
{
    const auto empty = parse("");
    REQUIRE_FALSE(empty.ok());
    CHECK(empty.diagnostics.front().span.offset == 0);

    const auto stray = parse("arch A {\n  interface a;\n  gamma {}, {a,z};\n}\n");
    REQUIRE_FALSE(stray.ok());
    CHECK(stray.diagnostics.front().code == errc::interaction_out_of_interface);
    CHECK(format_diagnostic(stray.diagnostics.front(), "x.coord").starts_with("x.coord:1:1: error:"));

    const auto syntax = parse("pa A {\n  nodes a;\n  states s*;\n  s -{a}-> ;\n}\n");
    REQUIRE_FALSE(syntax.ok());
    CHECK(syntax.diagnostics.front().span.line == 4);
    CHECK(syntax.diagnostics.front().span.column == 12);

    const auto label = parse("pa A { nodes a; states s; s -{b}-> s; }");
    REQUIRE_FALSE(label.ok());
    CHECK(label.diagnostics.front().code == errc::invalid_model);

    const auto polarity = parse("ca C { domain D = {0}; nodes a**; states q; }");
    CHECK_FALSE(polarity.ok());

    const auto shared = parse("component X { ports p; states s; }\ncomponent Y { ports p; states s; }\n"
                              "arch A { coordinators X, Y; interface p; gamma {}; }");
    REQUIRE_FALSE(shared.ok());
    CHECK(shared.diagnostics.front().code == errc::not_disconnected);

    CHECK_FALSE(parse("pa A { nodes a; states s; }", model_kind::arch).ok());
    for (const auto* bad : {"pa", "pa A {", "pa A { nodes a, ; }", "ca C { domain D = {}; }", "im G { conn w <- }"})
        for (const auto& d : parse(bad).diagnostics)
            CHECK(d.span.offset <= std::string_view(bad).size());
}

TEST_CASE("guards keep their structure through the text form")
{
    const auto r = parse("ca C {\n  domain D = {0,1,2};\n  nodes a*, b_*, m;\n  states q;\n"
                         "  q -{a*,b_*,m} | exists z. (d[z]==d[a*] && !(d[m] in {0,2})) || max(a*,m)==d[b_*] -> q;\n}\n");
    REQUIRE(r.ok());
    const auto& ca = std::get<constraint_automaton>(r.doc->primary());
    const auto& g = ca.graph().transitions()[0].label.guard;
    CHECK(g.type() == dc::kind::exists);
    CHECK(free_ports(g) == port_set{"a*", "b_*", "m"});
}

TEST_CASE("DOT export")
{
    const auto mutex_reo = export_dot(support::load_document("mutex_reo.coord").primary());
    CHECK(count_lines_with(mutex_reo, "->") == 6);
    CHECK(count_lines_with(mutex_reo, "[label=\"(") == 2);
    CHECK(count_lines_with(mutex_reo, "peripheries=2") == 1);

    const auto one = export_dot(support::load_document("sync_ab.coord").primary());
    CHECK(count_lines_with(one, "[label=\"q\"") == 1);
    CHECK(count_lines_with(one, "->") == 2);

    const auto data = export_dot(support::load_document("sync_data.coord").primary());
    CHECK(data.find("d[a*]") != std::string::npos);
    CHECK(export_dot(support::load_document("a12.coord").primary()).find("subgraph") != std::string::npos);
}
