#include <catch2/catch_amalgamated.hpp>

#include "coordbridge/random.hpp"
#include "coordbridge/translate.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace coordbridge;

namespace {

lts single(std::vector<label> loops, alphabet a)
{
    std::vector<transition<label>> ts;
    for (auto& l : loops)
        ts.push_back({0, std::move(l), 0});
    return lts(std::move(a), state_graph<label>({"q"}, 0, std::move(ts)));
}

} // namespace

TEST_CASE("bisimilarity is reflexive with the identity among its pairs")
{
    gen::rng r(3);
    const auto l = gen::random_lts(r, 4, {"a", "b", "c"});
    const auto w = bisimilar(l, l);
    REQUIRE(w);
    for (const auto& s : l.graph().states())
        CHECK(std::count(w->pairs.begin(), w->pairs.end(), std::make_pair(s, s)) == 1);
    CHECK(is_bisimulation(l, l, *w));
}

TEST_CASE("the Reo mutex and the BIP-like connector with idle loops are bisimilar")
{
    const auto mutex_reo = support::load<port_automaton>("mutex_reo.coord");
    const auto mutex = add_empty_selfloops(support::load<port_automaton>("mutex.coord"));
    const auto w = bisimilar(interpret_pa(mutex_reo), interpret_pa(mutex));
    REQUIRE(w);
    CHECK(is_bisimulation(interpret_pa(mutex_reo), interpret_pa(mutex), *w));
    // Without the idle loops the two differ.
    CHECK_FALSE(bisimilar(interpret_pa(mutex_reo), interpret_pa(support::load<port_automaton>("mutex.coord"))));
}

TEST_CASE("partition refinement agrees with the fixpoint oracle")
{
    gen::rng r(11);
    const std::vector<port_name> ports{"a", "b", "c"};
    std::size_t positives = 0;
    for (int i = 0; i < 300; ++i) {
        const auto l1 = gen::random_lts(r, 4, ports);
        const auto l2 = i % 2 ? gen::split_states(r, l1) : gen::random_lts(r, 4, ports);
        const auto w = bisimilar(l1, l2);
        INFO("case " << i);
        REQUIRE(w.has_value() == oracle::bisimilar(l1, l2));
        if (w) {
            ++positives;
            CHECK(is_bisimulation(l1, l2, *w));
        }
    }
    CHECK(positives >= 150);
}

TEST_CASE("different alphabets are reported, not thrown")
{
    const auto l1 = single({port_set{"a"}}, alphabet::over_ports({"a"}));
    const auto l2 = single({port_set{"a"}}, alphabet::over_ports({"a", "b"}));
    CHECK(compare_bisimulation(l1, l2).outcome == bisim_outcome::alphabet_mismatch);
    CHECK_FALSE(bisimilar(l1, l2));
}

TEST_CASE("reachable_part drops unreachable islands")
{
    const lts island(alphabet::over_ports({"a"}),
                     state_graph<label>({"s0", "s1", "x0", "x1"}, 0,
                                        {{0, port_set{"a"}, 1}, {2, port_set{"a"}, 3}, {3, port_set{}, 2}}));
    const auto r = reachable_part(island);
    CHECK(r.graph().states() == std::vector<state_id>{"s0", "s1"});
    CHECK(r.transitions().size() == 1);

    const auto loop = single({port_set{"a"}}, alphabet::over_ports({"a"}));
    CHECK(reachable_part(loop) == loop);
}

TEST_CASE("lts_identical compares single-state label sets")
{
    const auto alpha = alphabet::over_assignments({"a*", "a_*"}, {0, 1});
    const assignment x{{"a*", 0}, {"a_*", 0}};
    const assignment y{{"a*", 1}, {"a_*", 0}};
    const auto l = single({x, y}, alpha);
    CHECK(lts_identical(l, l));
    CHECK_FALSE(lts_identical(l, single({x}, alpha)));
    CHECK_FALSE(lts_identical(single({x}, alpha), single({y}, alpha)));

    const lts two(alphabet::over_ports({}), state_graph<label>({"p", "q"}, 0, {}));
    try {
        (void)lts_identical(two, two);
        FAIL("expected an error");
    }
    catch (const error& e) {
        CHECK(e.code() == errc::not_single_state);
    }
}

TEST_CASE("check_unreachable returns a shortest trace")
{
    const lts chain(alphabet::over_ports({"a", "b"}),
                    state_graph<label>({"s0", "s1", "s2"}, 0,
                                       {{0, port_set{"a"}, 1}, {1, port_set{"b"}, 2}, {0, port_set{}, 0}}));
    CHECK(check_unreachable(chain, {}).safe);
    CHECK(check_unreachable(chain, [](const state_id& s) { return s == "nowhere"; }).safe);
    const auto r = check_unreachable(chain, [](const state_id& s) { return s == "s2"; });
    REQUIRE_FALSE(r.safe);
    CHECK(r.bad_state == "s2");
    CHECK(r.trace == std::vector<label>{port_set{"a"}, port_set{"b"}});
}

TEST_CASE("isomorphism ignores state names only")
{
    const auto foolproof = support::load<port_automaton>("foolproof.coord");
    std::vector<state_id> names;
    for (const auto& s : foolproof.graph().states())
        names.push_back("x" + s);
    const auto renamed = foolproof.graph().rename_states(names);
    CHECK(isomorphic(interpret_pa(foolproof), interpret_pa(port_automaton("y", foolproof.nodes(), renamed))));
    CHECK_FALSE(isomorphic(interpret_pa(foolproof), interpret_pa(support::load<port_automaton>("mutex.coord"))));
}
