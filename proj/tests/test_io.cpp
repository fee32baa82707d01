#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"
#include "treeramsey/io.hpp"
#include "treeramsey/search.hpp"

using namespace treeramsey;
using tt::pw;
using tt::w;

TEST_CASE("set files round-trip bit-exactly") {
    Alphabet k2(2);
    GridTreeSet grid = random_grid_set(k2, 4, Rational(1, 3), 11);
    std::string text = write_set(grid);
    AnySet back = parse_set(text);
    REQUIRE(std::holds_alternative<GridTreeSet>(back));
    CHECK(write_set(std::get<GridTreeSet>(back)) == text);

    TreeSet line = random_tree_set(k2, 5, Rational(1, 2), 12);
    std::string text1 = write_set(line);
    AnySet back1 = parse_set(text1);
    REQUIRE(std::holds_alternative<TreeSet>(back1));
    CHECK(write_set(std::get<TreeSet>(back1)) == text1);

    TreeSet mask = TreeSet::level_mask(k2, 6, {0, 2, 5});
    CHECK(write_set(mask) == "treeset v1 k=2 n=6 dim=1 repr=levellift\n0\n2\n5\n");

    GridTreeSet lift = level_lift(GridSet(3, {{0, 0}, {2, 1}}), k2);
    std::string lift_text = write_set(lift);
    CHECK(lift_text == "treeset v1 k=2 n=3 dim=2 repr=levellift\n0 0\n2 1\n");
    CHECK(write_set(std::get<GridTreeSet>(parse_set(lift_text))) == lift_text);
}

TEST_CASE("level-lift files carry their density") {
    std::string text = "treeset v1 k=2 n=2 dim=2 repr=levellift\n0 0\n1 1\n";
    AnySet parsed = parse_set(text);
    CHECK(density_2d(std::get<GridTreeSet>(parsed)) == Rational(1, 2));
}

TEST_CASE("empty bodies parse to empty sets") {
    AnySet parsed = parse_set("treeset v1 k=2 n=3 dim=2 repr=explicit\n");
    CHECK(density_2d(std::get<GridTreeSet>(parsed)) == 0);
}

TEST_CASE("set parse errors carry line numbers") {
    auto line_of = [](const std::string& text) {
        try {
            parse_set(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("treeset v2 k=2 n=3 dim=2 repr=explicit\n") == 1);
    CHECK(line_of("grid v1 k=2 n=3 dim=2 repr=explicit\n") == 1);
    CHECK(line_of("treeset v1 k=2 n=3 dim=2 repr=explicit\n1,1\n0,0\n") == 3);  // unsorted
    CHECK(line_of("treeset v1 k=2 n=3 dim=2 repr=explicit\n0,0\n0,0\n") == 3);  // duplicate
    CHECK(line_of("treeset v1 k=2 n=3 dim=2 repr=explicit\n0,2\n") == 2);       // bad letter
    CHECK(line_of("treeset v1 k=2 n=2 dim=2 repr=explicit\n00,0\n") == 2);      // too deep
    CHECK(line_of("treeset v1 k=2 n=3 dim=2 repr=levellift\n0 7\n") == 2);
    CHECK(line_of("treeset v1 k=2 n=3 dim=2 repr=explicit\n0,0") == 0);  // missing newline
    CHECK_THROWS_AS(parse_set_file("/nonexistent/set.txt"), ParseError);
}

TEST_CASE("witness JSON is canonical and survives the round trip") {
    Alphabet k2(2);
    TreeSet full = TreeSet::full(k2, 4);
    auto tree = find_arithmetic_subtree(full, 2);
    REQUIRE(tree.status == SearchStatus::Found);

    std::string bytes = write_witness(*tree.witness);
    CHECK(bytes ==
          R"({"kind":"tree","k":2,"r":2,"q":1,"map":{"":"","0":"0","00":"00","01":"01","1":"1","10":"10","11":"11"}})"
          "\n");
    AnyWitness back = parse_witness(bytes);
    REQUIRE(std::holds_alternative<TreeWitness>(back));
    CHECK(write_witness(back) == bytes);
    CHECK(verify_arithmetic_subtree(std::get<TreeWitness>(back), full).pass);
}

TEST_CASE("product witness keys come out shortlex with x before y") {
    Alphabet k2(2);
    GridTreeSet full = GridTreeSet::full(k2, 3);
    auto found = find_product_tree(full, 1, {1, 1}, {1, 1}, 1, 1);
    REQUIRE(found.status == SearchStatus::Found);
    std::string bytes = write_witness(*found.witness);
    std::size_t px0 = bytes.find("\"x0\"");
    std::size_t px1 = bytes.find("\"x1\"");
    std::size_t py0 = bytes.find("\"y0\"");
    std::size_t py1 = bytes.find("\"y1\"");
    REQUIRE(px0 != std::string::npos);
    CHECK(px0 < px1);
    CHECK(px1 < py0);
    CHECK(py0 < py1);

    AnyWitness back = parse_witness(bytes);
    CHECK(write_witness(back) == bytes);
    CHECK(verify_product_tree(std::get<ProductTreeWitness>(back), full).pass);
}

TEST_CASE("array witnesses round-trip with their row words") {
    Alphabet k2(2);
    GridTreeSet full = GridTreeSet::full(k2, 4);
    auto arr = construct_tree_array(full, 2, Rational(1, 2));
    REQUIRE(arr.status == SearchStatus::Found);
    std::string bytes = write_witness(*arr.witness);
    AnyWitness back = parse_witness(bytes);
    REQUIRE(std::holds_alternative<TreeArrayWitness>(back));
    CHECK(write_witness(back) == bytes);
    CHECK(verify_tree_array(std::get<TreeArrayWitness>(back), full).pass);
}

TEST_CASE("witness parsing rejects malformed documents") {
    CHECK_THROWS_AS(parse_witness("not json"), ParseError);
    CHECK_THROWS_AS(parse_witness(R"({"kind":"sphere","k":2,"r":1,"map":{}})"), ParseError);
    CHECK_THROWS_AS(parse_witness(R"({"kind":"tree","k":2,"r":1,"map":{}})"), ParseError);
    // array rows must agree on the row word
    CHECK_THROWS_AS(
        parse_witness(
            R"({"kind":"array","k":1,"r":0,"q":1,"c1":0,"c2":0,"map":{"0:":"0,0","0:0":"00,"}})"),
        ParseError);
}

TEST_CASE("tampered witnesses fail verification after reparse") {
    Alphabet k2(2);
    TreeSet full = TreeSet::full(k2, 3);
    auto tree = find_arithmetic_subtree(full, 1);
    REQUIRE(tree.status == SearchStatus::Found);
    std::string bytes = write_witness(*tree.witness);
    std::string tampered = bytes;
    std::size_t pos = tampered.find("\"1\":\"1\"");
    REQUIRE(pos != std::string::npos);
    tampered.replace(pos, 7, "\"1\":\"0\"");
    AnyWitness back = parse_witness(tampered);
    Verdict v = verify_arithmetic_subtree(std::get<TreeWitness>(back), full);
    REQUIRE_FALSE(v.pass);
    CHECK(v.violation->condition == "descent");
}

TEST_CASE("markov files round-trip") {
    std::string text =
        "markov v1 k=2 m=3\n"
        "T0: 1 2 0\n"
        "p0: 1/2 1/3 1/1\n"
        "T1: 0 1 2\n"
        "p1: 1/2 2/3 0/1\n";
    std::vector<FiniteMarkovSystem> systems = parse_markov_systems(text);
    REQUIRE(systems.size() == 1);
    CHECK(systems[0].transition(0, 1) == 2);
    CHECK(systems[0].probability(1, 1) == Rational(2, 3));
    CHECK(write_markov(systems[0]) == text);

    // two stacked blocks make a pair input
    std::vector<FiniteMarkovSystem> both = parse_markov_systems(text + text);
    CHECK(both.size() == 2);
}

TEST_CASE("markov parse errors carry line numbers") {
    auto line_of = [](const std::string& text) {
        try {
            parse_markov_systems(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("markov v1 k=1 m=2\nT0: 0 1\np0: 1/2 1\n") == 1);  // bad row sums
    CHECK(line_of("markov v1 k=1 m=2\nT0: 0 1 1\np0: 1 1\n") == 2);  // wrong arity
    CHECK(line_of("markov v1 k=1 m=2\np0: 1 1\nT0: 0 1\n") == 2);    // wrong order
    CHECK(line_of("markov v1 k=1 m=2\nT0: 0 1\np0: 1 x\n") == 3);
}
