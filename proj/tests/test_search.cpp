#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "test_util.hpp"
#include "treeramsey/search.hpp"

using namespace treeramsey;
using tt::pw;
using tt::w;

namespace {

// Brute-force enumeration of arithmetic subtrees in canonical order,
// independent of the search path: it assigns images address by address and
// accepts the first complete map the verifier passes.
std::optional<TreeWitness> oracle_first_tree(const TreeSet& a, int r, int q_lo, int q_hi) {
    Alphabet alpha = a.alphabet();
    std::vector<Word> addrs = enumerate_ball(alpha, r);
    for (int q = q_lo; q <= q_hi; ++q) {
        for (int root_level = 0; root_level + r * q < a.depth(); ++root_level) {
            std::optional<TreeWitness> found;
            std::function<bool(std::size_t, WordMap&)> assign = [&](std::size_t idx,
                                                                    WordMap& map) -> bool {
                if (idx == addrs.size()) {
                    TreeWitness cand{alpha, r, q, map};
                    if (verify_arithmetic_subtree(cand, a).pass) {
                        found = std::move(cand);
                        return false;
                    }
                    return true;
                }
                const Word& addr = addrs[idx];
                std::vector<Letter> ls = addr.letters();
                Letter last = ls.back();
                ls.pop_back();
                const Word& pimg = map.at(Word(alpha, std::move(ls)));
                return a.for_each_descendant_at(pimg.extended(last), pimg.length() + q,
                                                [&](const Word& img) {
                                                    map.insert_or_assign(addr, img);
                                                    bool keep = assign(idx + 1, map);
                                                    map.erase(addr);
                                                    return keep;
                                                });
            };
            bool exhausted = a.for_each_descendant_at(Word(alpha), root_level, [&](const Word& root) {
                WordMap map;
                map.emplace(Word(alpha), root);
                return assign(1, map);
            });
            if (!exhausted && found) return found;
        }
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("tree search on the full set returns the identity witness") {
    Alphabet k2(2);
    TreeSet full = TreeSet::full(k2, 4);
    for (int r = 0; r <= 3; ++r) {
        auto out = find_arithmetic_subtree(full, r);
        REQUIRE(out.status == SearchStatus::Found);
        CHECK(out.witness->gap == 1);
        for (const Word& addr : enumerate_ball(k2, r)) CHECK(out.witness->map.at(addr) == addr);
        CHECK(verify_arithmetic_subtree(*out.witness, full).pass);
    }
}

TEST_CASE("tree search finds the gap-2 witness on even levels") {
    Alphabet k2(2);
    TreeSet evens = TreeSet::level_mask(k2, 7, {0, 2, 4, 6});
    auto out = find_arithmetic_subtree(evens, 2);
    REQUIRE(out.status == SearchStatus::Found);
    CHECK(out.witness->gap == 2);
    REQUIRE(verify_arithmetic_subtree(*out.witness, evens).pass);

    auto expect = oracle_first_tree(evens, 2, 1, 2);
    REQUIRE(expect.has_value());
    CHECK(expect->gap == out.witness->gap);
    CHECK(expect->map == out.witness->map);
}

TEST_CASE("tree search agrees with the brute-force oracle on random sets") {
    Alphabet k2(2);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        TreeSet s = random_tree_set(k2, 5, Rational(3, 5), seed);
        auto got = find_arithmetic_subtree(s, 1);
        auto expect = oracle_first_tree(s, 1, 1, 4);
        REQUIRE(got.witness.has_value() == expect.has_value());
        if (expect) {
            CHECK(got.witness->gap == expect->gap);
            CHECK(got.witness->map == expect->map);
        } else {
            CHECK(got.status == SearchStatus::NoneExhaustive);
        }
    }
}

TEST_CASE("tree search reports exhaustion honestly") {
    Alphabet k2(2);
    auto out = find_arithmetic_subtree(TreeSet::empty(k2, 4), 1);
    CHECK(out.status == SearchStatus::NoneExhaustive);
    CHECK_FALSE(out.witness.has_value());

    SearchBudget tiny;
    tiny.node_cap = 3;
    auto starved = find_arithmetic_subtree(TreeSet::full(k2, 6), 3, QRange::all(), tiny);
    CHECK(starved.status == SearchStatus::BudgetExhausted);
}

TEST_CASE("tree search is deterministic across workers") {
    Alphabet k2(2);
    TreeSet s = random_tree_set(k2, 6, Rational(1, 2), 77);
    auto serial = find_arithmetic_subtree(s, 2);
    SearchBudget wide;
    wide.workers = 3;
    auto parallel = find_arithmetic_subtree(s, 2, QRange::all(), wide);
    REQUIRE(serial.status == parallel.status);
    if (serial.witness) {
        CHECK(serial.witness->gap == parallel.witness->gap);
        CHECK(serial.witness->map == parallel.witness->map);
    }
}

TEST_CASE("witnesses on level lifts follow the level progression") {
    Alphabet k2(2);
    for (int n = 2; n <= 8; ++n) {
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::vector<int> levels;
            for (int i = 0; i < n; ++i)
                if (mask & (1 << i)) levels.push_back(i);
            TreeSet s = TreeSet::level_mask(k2, n, levels);
            for (int r = 1; r <= 2; ++r) {
                auto out = find_arithmetic_subtree(s, r);
                // oracle: a witness exists iff the occupied levels contain an
                // (r+1)-term progression
                bool expect = false;
                for (int q = 1; !expect && r * q <= n - 1; ++q)
                    for (int start = 0; !expect && start + r * q < n; ++start) {
                        bool all = true;
                        for (int i = 0; all && i <= r; ++i)
                            all = (mask >> (start + i * q)) & 1;
                        expect = all;
                    }
                REQUIRE((out.status == SearchStatus::Found) == expect);
                if (out.witness) {
                    int base = out.witness->map.at(Word(k2)).length();
                    for (const Word& addr : enumerate_ball(k2, r)) {
                        int lvl = out.witness->map.at(addr).length();
                        REQUIRE(lvl == base + addr.length() * out.witness->gap);
                        REQUIRE(((mask >> lvl) & 1) == 1);
                    }
                }
            }
        }
    }
}

TEST_CASE("enlarging the set never loses a witness") {
    Alphabet k2(2);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        TreeSet small = random_tree_set(k2, 5, Rational(1, 2), 500 + seed);
        std::vector<Word> grown;
        small.for_each_member([&](const Word& member) {
            grown.push_back(member);
            return true;
        });
        TreeSet extra = random_tree_set(k2, 5, Rational(1, 4), 900 + seed);
        extra.for_each_member([&](const Word& member) {
            grown.push_back(member);
            return true;
        });
        TreeSet big = TreeSet::explicit_set(k2, 5, std::move(grown));
        auto before = find_arithmetic_subtree(small, 1);
        auto after = find_arithmetic_subtree(big, 1);
        if (before.status == SearchStatus::Found) REQUIRE(after.status == SearchStatus::Found);
    }
}

TEST_CASE("enlarging the grid never loses a product tree") {
    Alphabet k2(2);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        GridTreeSet small = random_grid_set(k2, 4, Rational(1, 2), 1200 + seed);
        std::vector<PairWord> grown;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                small.for_each_in_cell(i, j, [&](const PairWord& p) {
                    grown.push_back(p);
                    return true;
                });
        GridTreeSet extra = random_grid_set(k2, 4, Rational(1, 4), 1300 + seed);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                extra.for_each_in_cell(i, j, [&](const PairWord& p) {
                    grown.push_back(p);
                    return true;
                });
        GridTreeSet big = GridTreeSet::explicit_set(k2, 4, std::move(grown));
        auto before = find_product_tree(small, 1, {1, 1}, {1, 1}, 1, 2);
        auto after = find_product_tree(big, 1, {1, 1}, {1, 1}, 1, 2);
        if (before.status == SearchStatus::Found) REQUIRE(after.status == SearchStatus::Found);
    }
}

TEST_CASE("regular embedding search") {
    Alphabet k2(2);
    TreeSet full = TreeSet::full(k2, 4);
    auto ident = find_regular_embedding(full, 3);
    REQUIRE(ident.status == SearchStatus::Found);
    for (const Word& addr : enumerate_ball(k2, 3)) CHECK(ident.witness->map.at(addr) == addr);

    TreeSet one_level = TreeSet::level_mask(k2, 4, {2});
    CHECK(find_regular_embedding(one_level, 1).status == SearchStatus::NoneExhaustive);

    int successes = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        TreeSet s = random_tree_set(k2, 5, Rational(3, 5), 3000 + seed);
        auto out = find_regular_embedding(s, 2);
        if (out.status != SearchStatus::Found) continue;
        ++successes;
        REQUIRE(verify_regular_embedding(*out.witness, s).pass);
    }
    REQUIRE(successes >= 40);
}

TEST_CASE("regular embeddings can skip levels that arithmetic trees cannot use") {
    Alphabet k2(2);
    // levels 0,1,3: no 3-term progression, but a regular embedding of
    // depth 2 exists
    TreeSet s = TreeSet::level_mask(k2, 4, {0, 1, 3});
    CHECK(find_arithmetic_subtree(s, 2).status == SearchStatus::NoneExhaustive);
    auto out = find_regular_embedding(s, 2);
    REQUIRE(out.status == SearchStatus::Found);
    CHECK(out.witness->level_schedule() == std::vector<int>{0, 1, 3});
}

TEST_CASE("grid progression search") {
    auto full = find_ap_grid(GridSet::full(4), 3);
    REQUIRE(full.has_value());
    CHECK(full->a1 == 0);
    CHECK(full->a2 == 0);
    CHECK(full->q == 1);

    std::vector<std::pair<int, int>> diag;
    for (int i = 0; i < 6; ++i) diag.emplace_back(i, i);
    CHECK_FALSE(find_ap_grid(GridSet(6, diag), 2).has_value());

    GridSet sparse(5, {{4, 1}, {1, 3}});
    auto single = find_ap_grid(sparse, 1);
    REQUIRE(single.has_value());
    CHECK(single->a1 == 1);
    CHECK(single->a2 == 3);
}

TEST_CASE("grid progression search matches the exhaustive enumerator") {
    // all 512 subsets of the 3x3 grid, r = 2
    for (int bits = 0; bits < 512; ++bits) {
        std::vector<std::pair<int, int>> cells;
        for (int c = 0; c < 9; ++c)
            if (bits & (1 << c)) cells.emplace_back(c / 3, c % 3);
        GridSet b(3, cells);
        auto got = find_ap_grid(b, 2);

        // oracle: collect every valid witness, then take the least
        std::optional<GridApWitness> expect;
        for (int q = 1; q <= 2; ++q)
            for (int a1 = 0; a1 + q < 3; ++a1)
                for (int a2 = 0; a2 + q < 3; ++a2) {
                    bool ok = b.contains(a1, a2) && b.contains(a1 + q, a2) &&
                              b.contains(a1, a2 + q) && b.contains(a1 + q, a2 + q);
                    if (!ok) continue;
                    if (!expect || std::tuple(q, a1, a2) < std::tuple(expect->q, expect->a1, expect->a2))
                        expect = GridApWitness{a1, a2, q, 2};
                }
        REQUIRE(got.has_value() == expect.has_value());
        if (expect) {
            CHECK(got->a1 == expect->a1);
            CHECK(got->a2 == expect->a2);
            CHECK(got->q == expect->q);
        }
    }
}

TEST_CASE("dense index selection") {
    Rational half(1, 2);
    std::vector<Rational> flat(6, half);
    CHECK(select_dense_indices(flat, half).size() == 6);

    std::vector<Rational> spike{1, 0, 0, 0};
    auto j = select_dense_indices(spike, Rational(1, 4));
    REQUIRE(j == std::vector<int>{0});

    CHECK_THROWS_AS(select_dense_indices(spike, Rational(1, 2)), std::invalid_argument);

    KeyedRng rng(31, 0);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng.below(10));
        std::vector<Rational> values;
        Rational sum = 0;
        for (int i = 0; i < n; ++i) {
            Rational v(rng.below(101), 100);
            values.push_back(v);
            sum += v;
        }
        Rational delta = sum / n;  // the mean itself is always admissible
        if (delta == 0) continue;
        auto picked = select_dense_indices(values, delta);
        // counting oracle: |J| >= delta*N/2
        REQUIRE(Rational(BigInt(picked.size()), 1) * 2 >= delta * n);
        for (int idx : picked) REQUIRE(values[static_cast<std::size_t>(idx)] >= delta / 2);
    }
}

TEST_CASE("tree array construction on the full set") {
    Alphabet k2(2);
    for (int r = 1; r <= 3; ++r) {
        GridTreeSet full = GridTreeSet::full(k2, r + 2);
        auto out = construct_tree_array(full, r, Rational(1, 2));
        REQUIRE(out.status == SearchStatus::Found);
        CHECK(out.witness->gap == 1);
        CHECK(out.witness->c1 == 0);
        CHECK(out.witness->c2 == 0);
        CHECK(verify_tree_array(*out.witness, full).pass);
    }
}

TEST_CASE("tree array construction on the even-coordinate lift") {
    Alphabet k2(2);
    std::vector<std::pair<int, int>> evens;
    for (int i = 0; i < 9; i += 2)
        for (int j = 0; j < 9; j += 2) evens.emplace_back(i, j);
    GridTreeSet a = level_lift(GridSet(9, evens), k2);
    auto out = construct_tree_array(a, 2, Rational(1, 4));
    REQUIRE(out.status == SearchStatus::Found);
    CHECK(out.witness->gap == 2);
    CHECK(verify_tree_array(*out.witness, a).pass);
}

TEST_CASE("tree array construction names the failing stage") {
    Alphabet k2(2);
    std::vector<std::pair<int, int>> diag;
    for (int i = 0; i < 4; ++i) diag.emplace_back(i, i);
    GridTreeSet a = level_lift(GridSet(4, diag), k2);
    auto out = construct_tree_array(a, 1, Rational(1, 4));
    REQUIRE(out.status == SearchStatus::NoneExhaustive);
    CHECK_FALSE(out.witness.has_value());
    CHECK(out.failed_stage == "ap-grid");

    GridTreeSet thin = GridTreeSet::full(k2, 2);
    CHECK_THROWS_AS(construct_tree_array(thin, 1, Rational(3, 2)), std::invalid_argument);
}

TEST_CASE("tree array construction round-trips on random dense sets") {
    Alphabet k2(2);
    int successes = 0;
    for (std::uint64_t seed = 0; seed < 25 && successes < 15; ++seed) {
        GridTreeSet a = random_grid_set(k2, 6, Rational(4, 5), 4000 + seed);
        Rational d = density_2d(a);
        if (d < Rational(1, 2)) continue;
        auto out = construct_tree_array(a, 1, Rational(1, 2));
        if (out.status != SearchStatus::Found) continue;
        ++successes;
        REQUIRE(verify_tree_array(*out.witness, a).pass);
    }
    REQUIRE(successes >= 10);
}

TEST_CASE("product tree search on the full set") {
    Alphabet k2(2);
    GridTreeSet full = GridTreeSet::full(k2, 3);
    auto out = find_product_tree(full, 1, {1, 1}, {1, 1}, 1, 1);
    REQUIRE(out.status == SearchStatus::Found);
    CHECK(out.n == 1);
    for (const auto& [addr, img] : out.witness->map) {
        auto [i, j] = img.level();
        CHECK(i == (addr.empty() ? 0 : 1));
        CHECK(j == (addr.empty() ? 0 : 1));
    }
    CHECK(verify_product_tree(*out.witness, full).pass);

    CHECK(find_product_tree(GridTreeSet::empty(k2, 4), 1, {1, 1}, {1, 1}, 1, 2).status ==
          SearchStatus::NoneExhaustive);
}

TEST_CASE("product tree search respects parity obstructions") {
    Alphabet k2(2);
    std::vector<std::pair<int, int>> even_sum;
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j)
            if ((i + j) % 2 == 0) even_sum.emplace_back(i, j);
    GridTreeSet a = level_lift(GridSet(7, even_sum), k2);

    // (1,1)-increments preserve the parity of i+j, so n = 1 works
    auto diag = find_product_tree(a, 1, {1, 1}, {1, 1}, 1, 3);
    REQUIRE(diag.status == SearchStatus::Found);
    CHECK(diag.n == 1);
    CHECK(verify_product_tree(*diag.witness, a).pass);

    // axis increments flip parity per step, so n must be even
    auto axis = find_product_tree(a, 1, {1, 0}, {0, 1}, 1, 3, true);
    REQUIRE(axis.status == SearchStatus::Found);
    CHECK(axis.n == 2);
    CHECK(verify_product_tree(*axis.witness, a).pass);

    // oracle for the n = 1 failure: no member has an X-child one level up
    bool any_child = false;
    for (auto [i, j] : even_sum)
        if (i + 1 < 7 && a.lift().contains(i + 1, j)) any_child = true;
    CHECK_FALSE(any_child);

    CHECK_THROWS_AS(find_product_tree(a, 1, {1, 0}, {0, 1}, 1, 2), std::invalid_argument);
}

TEST_CASE("product tree search at order two") {
    Alphabet k2(2);
    GridTreeSet full = GridTreeSet::full(k2, 5);
    auto out = find_product_tree(full, 2, {1, 1}, {1, 1}, 1, 1);
    REQUIRE(out.status == SearchStatus::Found);
    REQUIRE(out.witness->map.size() == 21);  // 1 + 4 + 16 addresses
    CHECK(verify_product_tree(*out.witness, full).pass);

    // commuting addresses land on the same canonical image, which the
    // witness map is free to do
    const PairWord& xy = out.witness->map.at(tt::fw(2, "x0.y0"));
    const PairWord& yx = out.witness->map.at(tt::fw(2, "y0.x0"));
    CHECK(xy.level() == yx.level());

    SearchBudget tiny;
    tiny.node_cap = 5;
    CHECK(find_product_tree(full, 2, {1, 1}, {1, 1}, 1, 1, false, tiny).status ==
          SearchStatus::BudgetExhausted);
}

TEST_CASE("unary alphabets reduce to progressions") {
    Alphabet k1(1);
    TreeSet evens = TreeSet::level_mask(k1, 7, {0, 2, 4, 6});
    auto out = find_arithmetic_subtree(evens, 2);
    REQUIRE(out.status == SearchStatus::Found);
    CHECK(out.witness->gap == 2);
    CHECK(out.witness->map.at(Word(k1)).length() == 0);

    TreeSet gaps = TreeSet::level_mask(k1, 8, {0, 1, 3, 7});
    CHECK(find_arithmetic_subtree(gaps, 3).status == SearchStatus::NoneExhaustive);
}

TEST_CASE("product tree search is deterministic across workers") {
    Alphabet k2(2);
    GridTreeSet a = random_grid_set(k2, 4, Rational(7, 10), 606);
    auto serial = find_product_tree(a, 1, {1, 1}, {1, 1}, 1, 2);
    SearchBudget wide;
    wide.workers = 4;
    auto parallel = find_product_tree(a, 1, {1, 1}, {1, 1}, 1, 2, false, wide);
    REQUIRE(serial.status == parallel.status);
    if (serial.witness) {
        CHECK(serial.n == parallel.n);
        CHECK(serial.witness->map == parallel.witness->map);
    }
}

TEST_CASE("cartesian product exploration") {
    Alphabet k2(2);
    GridTreeSet full = GridTreeSet::full(k2, 3);
    auto out = find_cartesian_product_tree(full, 1);
    REQUIRE(out.status == SearchStatus::Found);
    REQUIRE(out.witness.has_value());
    CHECK(out.witness->u == std::array<long long, 2>{1, 0});
    CHECK(out.witness->v == std::array<long long, 2>{0, 1});
    CHECK(verify_product_tree(*out.witness, full).pass);
    CHECK(verify_arithmetic_subtree(*out.tree1, slice_at(full, Word(k2))).pass);

    // the diagonal admits no cartesian square: its level cells would need
    // a = b and a = b + q at once
    std::vector<std::pair<int, int>> diag;
    for (int i = 0; i < 4; ++i) diag.emplace_back(i, i);
    GridTreeSet board = level_lift(GridSet(4, diag), k2);
    auto none = find_cartesian_product_tree(board, 1);
    CHECK(none.status == SearchStatus::NoneExhaustive);

    // the checkerboard does admit one, with an even gap
    std::vector<std::pair<int, int>> even_sum;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if ((i + j) % 2 == 0) even_sum.emplace_back(i, j);
    auto even_gap = find_cartesian_product_tree(level_lift(GridSet(4, even_sum), k2), 1);
    REQUIRE(even_gap.status == SearchStatus::Found);
    CHECK(even_gap.witness->u == std::array<long long, 2>{2, 0});
}
