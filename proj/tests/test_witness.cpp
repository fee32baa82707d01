#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "test_util.hpp"
#include "treeramsey/witness.hpp"

using namespace treeramsey;
using tt::fw;
using tt::pw;
using tt::w;

namespace {

TreeWitness identity_tree_witness(Alphabet alpha, int r) {
    TreeWitness wit{alpha, r, 1, {}};
    for (const Word& addr : enumerate_ball(alpha, r)) wit.map.emplace(addr, addr);
    return wit;
}

}  // namespace

TEST_CASE("arithmetic subtree verifier accepts the basic witnesses") {
    Alphabet k2(2);
    TreeSet ball1 = TreeSet::full(k2, 2);

    TreeWitness root_only{k2, 0, 1, {}};
    root_only.map.emplace(Word(k2), w(2, "1"));
    CHECK(verify_arithmetic_subtree(root_only, ball1).pass);

    CHECK(verify_arithmetic_subtree(identity_tree_witness(k2, 1), ball1).pass);
}

TEST_CASE("arithmetic subtree verifier pinpoints the broken condition") {
    Alphabet k2(2);
    TreeSet ball1 = TreeSet::full(k2, 2);
    TreeWitness wit = identity_tree_witness(k2, 1);
    wit.map.insert_or_assign(w(2, "1"), w(2, "01"));

    Verdict v = verify_arithmetic_subtree(wit, ball1);
    REQUIRE_FALSE(v.pass);
    CHECK(v.violation->condition == "descent");
    CHECK(v.violation->address == "1");
}

TEST_CASE("arithmetic subtree verifier flags gap and membership breaks") {
    Alphabet k2(2);
    TreeSet sparse = TreeSet::explicit_set(k2, 4, {Word(k2), w(2, "00"), w(2, "01"),
                                                   w(2, "10"), w(2, "11"), w(2, "0")});
    // gap 2 witness, but one child sits at depth 1
    TreeWitness wit{k2, 1, 2, {}};
    wit.map.emplace(Word(k2), Word(k2));
    wit.map.emplace(w(2, "0"), w(2, "0"));
    wit.map.emplace(w(2, "1"), w(2, "10"));
    Verdict v = verify_arithmetic_subtree(wit, sparse);
    REQUIRE_FALSE(v.pass);
    CHECK(v.violation->condition == "gap");
    CHECK(v.violation->address == "0");

    // proper gap-2 shape but an image that left the set
    TreeSet missing = TreeSet::explicit_set(k2, 4, {Word(k2), w(2, "00"), w(2, "01"), w(2, "11")});
    TreeWitness wit2{k2, 1, 2, {}};
    wit2.map.emplace(Word(k2), Word(k2));
    wit2.map.emplace(w(2, "0"), w(2, "00"));
    wit2.map.emplace(w(2, "1"), w(2, "10"));
    Verdict v2 = verify_arithmetic_subtree(wit2, missing);
    REQUIRE_FALSE(v2.pass);
    CHECK(v2.violation->condition == "membership");
    CHECK(v2.violation->address == "1");
}

TEST_CASE("verifiers demand total maps") {
    Alphabet k2(2);
    TreeSet ball1 = TreeSet::full(k2, 2);
    TreeWitness partial{k2, 1, 1, {}};
    partial.map.emplace(Word(k2), Word(k2));
    partial.map.emplace(w(2, "0"), w(2, "0"));
    CHECK_THROWS_AS(verify_arithmetic_subtree(partial, ball1), std::invalid_argument);

    ProductTreeWitness partial_product{k2, 1, {1, 1}, {1, 1}, {}};
    partial_product.map.emplace(FreeWord(k2), identity_pair(k2));
    CHECK_THROWS_AS(verify_product_tree(partial_product, GridTreeSet::full(k2, 3)),
                    std::invalid_argument);
}

TEST_CASE("regular embedding verifier") {
    Alphabet k2(2);
    TreeSet ball2 = TreeSet::full(k2, 3);
    RegularEmbeddingWitness ident{k2, 2, identity_tree_witness(k2, 2).map};
    CHECK(verify_regular_embedding(ident, ball2).pass);
    CHECK(ident.level_schedule() == std::vector<int>{0, 1, 2});

    // collapsing two siblings kills injectivity
    RegularEmbeddingWitness collapsed = ident;
    collapsed.map.insert_or_assign(w(2, "1"), w(2, "0"));
    collapsed.map.insert_or_assign(w(2, "10"), w(2, "00"));
    collapsed.map.insert_or_assign(w(2, "11"), w(2, "01"));
    Verdict v = verify_regular_embedding(collapsed, ball2);
    REQUIRE_FALSE(v.pass);
    CHECK(v.violation->condition == "injectivity");

    // levels must be single-valued per depth
    RegularEmbeddingWitness skew = ident;
    skew.map.insert_or_assign(w(2, "1"), w(2, "10"));
    skew.map.insert_or_assign(w(2, "10"), w(2, "100"));
    skew.map.insert_or_assign(w(2, "11"), w(2, "101"));
    Verdict v2 = verify_regular_embedding(skew, TreeSet::full(k2, 4));
    REQUIRE_FALSE(v2.pass);
    CHECK(v2.violation->condition == "level-schedule");
}

TEST_CASE("passing arithmetic subtrees re-read as regular embeddings") {
    Alphabet k2(2);
    TreeSet evens = TreeSet::level_mask(k2, 5, {0, 2, 4});
    TreeWitness wit{k2, 2, 2, {}};
    // gap-2 witness on the even levels, built by hand
    wit.map.emplace(Word(k2), Word(k2));
    for (const Word& addr : enumerate_ball(k2, 2)) {
        if (addr.empty()) continue;
        Word image(k2);
        for (int i = 0; i < addr.length(); ++i) {
            image = image.extended(addr.letter(i));
            image = image.extended(0);
        }
        wit.map.emplace(addr, image);
    }
    REQUIRE(verify_arithmetic_subtree(wit, evens).pass);
    CHECK(verify_regular_embedding(as_regular_embedding(wit), evens).pass);
}

TEST_CASE("passing tree witnesses are injective") {
    Alphabet k2(2);
    TreeSet evens = TreeSet::level_mask(k2, 7, {0, 2, 4, 6});
    TreeWitness wit{k2, 2, 2, {}};
    wit.map.emplace(Word(k2), Word(k2));
    for (const Word& addr : enumerate_ball(k2, 2)) {
        if (addr.empty()) continue;
        Word image(k2);
        for (int i = 0; i < addr.length(); ++i) {
            image = image.extended(addr.letter(i));
            image = image.extended(1);
        }
        wit.map.emplace(addr, image);
    }
    REQUIRE(verify_arithmetic_subtree(wit, evens).pass);
    std::set<Word, WordLexLess> images;
    for (const auto& [addr, img] : wit.map) images.insert(img);
    CHECK(images.size() == wit.map.size());
}

TEST_CASE("tree array verifier") {
    Alphabet k2(2);
    GridTreeSet everything = GridTreeSet::full(k2, 3);

    TreeArrayWitness arr{k2, 1, 1, 0, 0, {}, {}};
    arr.row_words = {Word(k2), w(2, "0")};
    arr.row_maps = {identity_tree_witness(k2, 1).map, identity_tree_witness(k2, 1).map};
    CHECK(verify_tree_array(arr, everything).pass);

    TreeArrayWitness bad = arr;
    bad.row_words[1] = w(2, "00");
    Verdict v = verify_tree_array(bad, everything);
    REQUIRE_FALSE(v.pass);
    CHECK(v.violation->condition == "row-level");
    CHECK(v.violation->address == "1:");

    TreeArrayWitness short_rows = arr;
    short_rows.row_words.pop_back();
    short_rows.row_maps.pop_back();
    CHECK_THROWS_AS(verify_tree_array(short_rows, everything), std::invalid_argument);
}

TEST_CASE("product tree verifier") {
    Alphabet k1(1);
    GridTreeSet everything = GridTreeSet::full(k1, 3);

    ProductTreeWitness root_only{k1, 0, {1, 1}, {1, 1}, {}};
    root_only.map.emplace(FreeWord(k1), identity_pair(k1));
    CHECK(verify_product_tree(root_only, everything).pass);

    // the hand-checked order-1 witness: both children land on ("0","0")
    ProductTreeWitness wit{k1, 1, {1, 1}, {1, 1}, {}};
    wit.map.emplace(FreeWord(k1), identity_pair(k1));
    wit.map.emplace(fw(1, "x0"), pw(1, "0", "0"));
    wit.map.emplace(fw(1, "y0"), pw(1, "0", "0"));
    CHECK(verify_product_tree(wit, everything).pass);

    ProductTreeWitness bent = wit;
    bent.map.insert_or_assign(fw(1, "x0"), pw(1, "00", ""));
    Verdict v = verify_product_tree(bent, everything);
    REQUIRE_FALSE(v.pass);
    CHECK(v.violation->condition == "level-increment");
    CHECK(v.violation->address == "x0");

    ProductTreeWitness detached = wit;
    detached.map.insert_or_assign(fw(1, "y0"), pw(1, "0", ""));
    // with v=(1,1) this also breaks the level, but descent is checked first
    detached.map.insert_or_assign(fw(1, "y0"), pw(1, "00", ""));
    Verdict v2 = verify_product_tree(detached, everything);
    REQUIRE_FALSE(v2.pass);
    CHECK(v2.violation->condition == "descent");
    CHECK(v2.violation->address == "y0");
}

TEST_CASE("product witnesses survive left translation") {
    Alphabet k2(2);
    GridTreeSet everything = GridTreeSet::full(k2, 3);
    ProductTreeWitness wit{k2, 1, {1, 1}, {1, 1}, {}};
    wit.map.emplace(FreeWord(k2), identity_pair(k2));
    for (const GenToken& tok : generator_tokens(k2)) {
        PairWord stepped = act_free(identity_pair(k2), FreeWord(k2, {tok}));
        // pad the other coordinate to reach level (1,1)
        Word f = stepped.first, s = stepped.second;
        if (f.empty()) f = f.extended(0);
        if (s.empty()) s = s.extended(0);
        wit.map.emplace(FreeWord(k2).extended(tok), PairWord(f, s));
    }
    REQUIRE(verify_product_tree(wit, everything).pass);

    PairWord offset = pw(2, "10", "1");
    GridTreeSet shifted = translate_set(offset, everything);
    ProductTreeWitness moved = translate_product_witness(offset, wit);
    CHECK(verify_product_tree(moved, shifted).pass);
    // and the untranslated witness is not in the shifted set
    CHECK_FALSE(verify_product_tree(wit, shifted).pass);
}

TEST_CASE("metadata inference helpers") {
    Alphabet k2(2);
    TreeWitness wit = identity_tree_witness(k2, 2);
    CHECK(infer_gap(wit) == 1);

    ProductTreeWitness pwit{k2, 1, {2, 1}, {1, 2}, {}};
    pwit.map.emplace(FreeWord(k2), identity_pair(k2));
    for (const GenToken& tok : generator_tokens(k2)) {
        PairWord base = act_free(identity_pair(k2), FreeWord(k2, {tok}));
        Word f = base.first, s = base.second;
        while (f.length() < (tok.axis == 0 ? 2 : 1)) f = f.extended(0);
        while (s.length() < (tok.axis == 0 ? 1 : 2)) s = s.extended(0);
        pwit.map.emplace(FreeWord(k2).extended(tok), PairWord(f, s));
    }
    auto inc = infer_increments(pwit);
    REQUIRE(inc.has_value());
    CHECK(inc->first == std::array<long long, 2>{2, 1});
    CHECK(inc->second == std::array<long long, 2>{1, 2});
}
