#include <catch2/catch_amalgamated.hpp>

#include "coordbridge/data_constraint.hpp"
#include "coordbridge/random.hpp"
#include "oracles.hpp"

using namespace coordbridge;

namespace {

const auto d3 = finite_domain::make("D", {0, 1, 2});

data_constraint max_guard()
{
    return dc::all_of({dc::fun_eq("a_*", "max", {"a*", "b*"}), dc::fun_eq("b_*", "max", {"a*", "b*"})});
}

errc code_of(auto&& f)
{
    try {
        f();
    }
    catch (const error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return errc::invalid_model;
}

} // namespace

TEST_CASE("dc_eval on partial and total assignments")
{
    CHECK(dc_eval(dc::top(), partial_assignment{}, d3));
    CHECK(dc_eval(dc::eq("a", 2), partial_assignment{{"a", 2}}, d3));
    CHECK_FALSE(dc_eval(dc::eq("a", 2), partial_assignment{{"a", 1}}, d3));
    CHECK(dc_eval(max_guard(), partial_assignment{{"a*", 1}, {"b*", 2}, {"a_*", 2}, {"b_*", 2}}, d3));
    CHECK_FALSE(dc_eval(max_guard(), partial_assignment{{"a*", 1}, {"b*", 2}, {"a_*", 1}, {"b_*", 2}}, d3));

    // a void port makes every atom mentioning it false
    const assignment silent{{"a", std::nullopt}, {"b", 0}};
    CHECK_FALSE(dc_eval(dc::eq("a", 0), silent, d3));
    CHECK_FALSE(dc_eval(dc::eq_ports("a", "b"), silent, d3));
    CHECK(dc_eval(dc::negate(dc::eq("a", 0)), silent, d3));
    CHECK(dc_eval(dc::exists("a", dc::eq("a", 0)), silent, d3));

    CHECK(dc_eval(dc::member("a", {1, 2}), partial_assignment{{"a", 2}}, d3));
    CHECK_FALSE(dc_eval(dc::member("a", {1, 2}), partial_assignment{{"a", 0}}, d3));
}

TEST_CASE("unbound ports and unknown functions are errors")
{
    CHECK(code_of([] { (void)dc_eval(dc::eq("z", 0), partial_assignment{{"a", 0}}, d3); }) == errc::unbound_port);
    CHECK(code_of([] { (void)dc_solutions({"a"}, dc::eq_ports("a", "z"), d3); }) == errc::unbound_port);
    CHECK(code_of([] {
              (void)dc_eval(dc::fun_eq("a", "nope", {"b"}), partial_assignment{{"a", 0}, {"b", 0}}, d3);
          }) == errc::unknown_function);
}

TEST_CASE("dc_solutions")
{
    CHECK(dc_solutions({"a"}, dc::top(), finite_domain::make("D", {0, 1})) ==
          std::vector<partial_assignment>{{{"a", 0}}, {{"a", 1}}});
    CHECK(dc_solutions({"a", "b"}, dc::eq_ports("a", "b"), d3).size() == 3);

    const auto sols = dc_solutions({"a*", "b*", "a_*", "b_*"}, max_guard(), d3);
    REQUIRE(sols.size() == 9);
    for (const auto& s : sols) {
        CHECK(s.at("a_*") == std::max(s.at("a*"), s.at("b*")));
        CHECK(s.at("b_*") == s.at("a_*"));
    }
}

TEST_CASE("enumeration bound")
{
    enumeration_limits tight;
    tight.max_candidates = 80;
    CHECK(code_of([&] { (void)dc_solutions({"a*", "b*", "a_*", "b_*"}, max_guard(), d3, {}, tight); }) ==
          errc::domain_too_large);
    tight.max_candidates = 81;
    CHECK(dc_solutions({"a*", "b*", "a_*", "b_*"}, max_guard(), d3, {}, tight).size() == 9);
}

TEST_CASE("delta_set matches the brute-force oracle")
{
    CHECK(delta_set({}, dc::top(), {"A", "B"}, d3) ==
          std::vector<assignment>{{{"A", std::nullopt}, {"B", std::nullopt}}});
    CHECK(delta_set({"A", "B"}, dc::top(), {"A", "B"}, finite_domain::singleton()).size() == 1);

    const port_set two_p{"a*", "a_*", "b*", "b_*"};
    const auto max = delta_set(two_p, max_guard(), two_p, d3);
    CHECK(max.size() == 9);
    CHECK(std::set<assignment>(max.begin(), max.end()) == oracle::delta(two_p, max_guard(), two_p, d3));

    gen::rng r(5);
    const std::vector<port_name> pool{"a*", "a_*", "b*", "b_*"};
    for (int i = 0; i < 100; ++i) {
        const auto dom = finite_domain::make("D", {0, 1 + static_cast<datum>(i % 2)});
        const auto n = gen::subset(r, pool);
        const auto g = gen::guard(r, std::vector<port_name>(n.begin(), n.end()), dom, 3);
        const auto got = delta_set(n, g, two_p, dom);
        INFO(to_string(g) << " over " << to_string(n));
        CHECK(std::set<assignment>(got.begin(), got.end()) == oracle::delta(n, g, two_p, dom));
    }
}

TEST_CASE("dc_hide and quantifier elimination")
{
    CHECK(dc_equivalent(dc_hide(dc::top(), {"p"}), dc::top(), {}, d3));
    CHECK(dc_equivalent(dc_hide(dc::eq("p", 1), {"p"}), dc::top(), {}, d3));
    CHECK(dc_equivalent(dc_hide(dc::eq("p", 7), {"p"}), dc::falsum(), {}, d3));

    const auto chain = dc::all_of({dc::eq_ports("a", "m"), dc::eq_ports("m", "b")});
    const auto hidden = dc_hide(chain, {"m"});
    CHECK(free_ports(hidden) == port_set{"a", "b"});
    CHECK(dc_equivalent(hidden, dc::eq_ports("a", "b"), {"a", "b"}, d3));

    const auto d2 = finite_domain::make("D", {0, 1});
    const auto qf = dc_eliminate_quantifiers(hidden, d2);
    CHECK(is_quantifier_free(qf));
    CHECK(dc_equivalent(hidden, qf, {"a", "b"}, d2));

    CHECK(dc_equivalent(chain, chain, {"a", "b", "m"}, d3));
    CHECK_FALSE(dc_equivalent(dc::top(), dc::negate(dc::top()), {"a"}, d3));
}

TEST_CASE("function tables")
{
    function_table fns;
    fns.define_table("inc", 1, {{{0}, 1}, {{1}, 2}, {{2}, 0}});
    CHECK(dc_solutions({"a", "b"}, dc::fun_eq("b", "inc", {"a"}), d3, fns).size() == 3);
    CHECK(code_of([&] { fns.define_table("max", 2, {}); }) == errc::invalid_model);

    // a partial table has no value outside its rows
    function_table partial;
    partial.define_table("f", 1, {{{0}, 0}});
    CHECK(dc_solutions({"a", "b"}, dc::fun_eq("b", "f", {"a"}), d3, partial).size() == 1);
}
