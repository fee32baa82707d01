#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "treeramsey/sets.hpp"
#include "treeramsey/words.hpp"

namespace treeramsey {

// Witnesses are explicit certificates: total maps from an address tree to
// the ambient set. Verifiers re-check every declared constant (gap,
// increments, level offsets) against the map; nothing is inferred.

struct Violation {
    std::string condition;  // which requirement broke
    std::string address;    // the offending address, in its text form
    std::string detail;
};

struct Verdict {
    bool pass;
    std::optional<Violation> violation;

    static Verdict ok() { return {true, std::nullopt}; }
    static Verdict fail(std::string condition, std::string address, std::string detail) {
        return {false, Violation{std::move(condition), std::move(address), std::move(detail)}};
    }
    explicit operator bool() const { return pass; }
};

using WordMap = std::map<Word, Word, WordLexLess>;

/// Order-r embedding of the full k-ary tree with a single gap q: every
/// edge maps to a length-q branch starting with the edge's letter.
struct TreeWitness {
    Alphabet alphabet;
    int order;
    int gap;  // required >= 1 when order >= 1; ignored at order 0
    WordMap map;
};

/// Level-respecting injective embedding without the equal-gap requirement.
struct RegularEmbeddingWitness {
    Alphabet alphabet;
    int depth;
    WordMap map;

    /// The derived level schedule n_0 < ... < n_d; meaningful only for
    /// witnesses whose levels are consistent (the verifier checks that).
    std::vector<int> level_schedule() const {
        std::vector<int> out;
        Word probe(alphabet);
        for (int i = 0; i <= depth; ++i) {
            auto it = map.find(probe);
            if (it == map.end()) break;
            out.push_back(it->second.length());
            probe = probe.extended(0);
        }
        return out;
    }
};

/// r+1 horizontal arithmetic subtrees sharing one gap q, row j sitting on
/// the slice at y_j with |y_j| = q*j + c2 and all roots at level c1.
struct TreeArrayWitness {
    Alphabet alphabet;
    int order;
    int gap;
    int c1;
    int c2;
    std::vector<Word> row_words;  // y_0 .. y_r
    std::vector<WordMap> row_maps;

    TreeWitness row_witness(int j) const {
        return TreeWitness{alphabet, order, gap, row_maps[static_cast<std::size_t>(j)]};
    }
};

using FreeWordMap = std::map<FreeWord, PairWord, FreeWordShortlexLess>;

/// Map from the free-product ball into the grid set with level increment u
/// on X-edges and v on Y-edges, descending coordinatewise along each edge.
struct ProductTreeWitness {
    Alphabet alphabet;
    int order;
    std::array<long long, 2> u;
    std::array<long long, 2> v;
    FreeWordMap map;
};

namespace detail {

inline const Word& witness_image(const WordMap& map, const Word& addr, const char* what) {
    auto it = map.find(addr);
    if (it == map.end())
        throw std::invalid_argument(std::string(what) + ": address map is not total (missing \"" +
                                    format_word(addr) + "\")");
    return it->second;
}

inline const PairWord& witness_image(const FreeWordMap& map, const FreeWord& addr, const char* what) {
    auto it = map.find(addr);
    if (it == map.end())
        throw std::invalid_argument(std::string(what) + ": address map is not total (missing \"" +
                                    format_free_word(addr) + "\")");
    return it->second;
}

/// Addresses of the ball in dictionary order (the violation-report order
/// and the serialization key order for tree-shaped witnesses).
inline std::vector<Word> addresses_lex(Alphabet alpha, int r) {
    std::vector<Word> out = enumerate_ball(alpha, r);
    std::sort(out.begin(), out.end(), WordLexLess{});
    return out;
}

}  // namespace detail

/// Def-style conditions for an arithmetic subtree, checked per edge in
/// dictionary order of the parent: descent first, then the gap, then the
/// child's membership; the root's membership is checked before any edge.
inline Verdict verify_arithmetic_subtree(const TreeWitness& w, const TreeSet& a) {
    if (w.alphabet.size != a.alphabet().size) throw std::invalid_argument("alphabets differ");
    if (w.order < 0) throw std::invalid_argument("order must be >= 0");
    if (w.order >= 1 && w.gap < 1) return Verdict::fail("gap", "", "gap must be >= 1");

    std::vector<Word> addrs = detail::addresses_lex(w.alphabet, w.order);
    for (const Word& addr : addrs) detail::witness_image(w.map, addr, "tree witness");

    const Word& root = detail::witness_image(w.map, Word(w.alphabet), "tree witness");
    if (!a.contains(root))
        return Verdict::fail("membership", "", "root image \"" + format_word(root) + "\" is not in the set");

    for (const Word& parent : addrs) {
        if (parent.length() >= w.order) continue;
        const Word& pimg = w.map.at(parent);
        for (int l = 0; l < w.alphabet.size; ++l) {
            Word child = parent.extended(static_cast<Letter>(l));
            const Word& cimg = w.map.at(child);
            if (!is_descendent(cimg, pimg.extended(static_cast<Letter>(l))))
                return Verdict::fail("descent", format_word(child),
                                     "\"" + format_word(cimg) + "\" does not descend from \"" +
                                         format_word(pimg.extended(static_cast<Letter>(l))) + "\"");
            if (cimg.length() != pimg.length() + w.gap)
                return Verdict::fail("gap", format_word(child),
                                     "level " + std::to_string(cimg.length()) + ", expected " +
                                         std::to_string(pimg.length() + w.gap));
            if (!a.contains(cimg))
                return Verdict::fail("membership", format_word(child),
                                     "image \"" + format_word(cimg) + "\" is not in the set");
        }
    }
    return Verdict::ok();
}

/// Injectivity, image containment, level-to-single-level with a strictly
/// increasing schedule, and edge descent.
inline Verdict verify_regular_embedding(const RegularEmbeddingWitness& w, const TreeSet& s) {
    if (w.alphabet.size != s.alphabet().size) throw std::invalid_argument("alphabets differ");
    if (w.depth < 0) throw std::invalid_argument("depth must be >= 0");

    std::vector<Word> addrs = detail::addresses_lex(w.alphabet, w.depth);
    for (const Word& addr : addrs) detail::witness_image(w.map, addr, "regular embedding");

    std::vector<std::optional<int>> schedule(static_cast<std::size_t>(w.depth) + 1);
    std::set<Word, WordLexLess> seen;
    for (const Word& addr : addrs) {
        const Word& img = w.map.at(addr);
        if (!s.contains(img))
            return Verdict::fail("membership", format_word(addr),
                                 "image \"" + format_word(img) + "\" is not in the set");
        auto& lvl = schedule[static_cast<std::size_t>(addr.length())];
        if (!lvl)
            lvl = img.length();
        else if (*lvl != img.length())
            return Verdict::fail("level-schedule", format_word(addr),
                                 "level " + std::to_string(img.length()) + " breaks the single-level rule (" +
                                     std::to_string(*lvl) + ")");
        if (!seen.insert(img).second)
            return Verdict::fail("injectivity", format_word(addr),
                                 "image \"" + format_word(img) + "\" repeats");
    }
    for (int i = 0; i < w.depth; ++i)
        if (*schedule[static_cast<std::size_t>(i)] >= *schedule[static_cast<std::size_t>(i) + 1])
            return Verdict::fail("level-schedule", "",
                                 "schedule is not strictly increasing at depth " + std::to_string(i));
    for (const Word& parent : addrs) {
        if (parent.length() >= w.depth) continue;
        const Word& pimg = w.map.at(parent);
        for (int l = 0; l < w.alphabet.size; ++l) {
            Word child = parent.extended(static_cast<Letter>(l));
            const Word& cimg = w.map.at(child);
            if (!is_descendent(cimg, pimg.extended(static_cast<Letter>(l))))
                return Verdict::fail("descent", format_word(child),
                                     "\"" + format_word(cimg) + "\" does not descend from \"" +
                                         format_word(pimg.extended(static_cast<Letter>(l))) + "\"");
        }
    }
    return Verdict::ok();
}

/// Rows verify as arithmetic subtrees against their slices, levels follow
/// (q|u|+c1, qj+c2), and the assembled map is injective.
inline Verdict verify_tree_array(const TreeArrayWitness& w, const GridTreeSet& a) {
    if (w.alphabet.size != a.alphabet().size) throw std::invalid_argument("alphabets differ");
    if (w.row_words.size() != static_cast<std::size_t>(w.order) + 1 ||
        w.row_maps.size() != static_cast<std::size_t>(w.order) + 1)
        throw std::invalid_argument("tree array witness needs exactly order+1 rows");

    std::vector<Word> addrs = detail::addresses_lex(w.alphabet, w.order);
    for (int j = 0; j <= w.order; ++j) {
        const auto& row = w.row_maps[static_cast<std::size_t>(j)];
        std::string row_prefix = std::to_string(j) + ":";
        // the row-word level comes first: it also keeps the slice in range
        int row_level = w.row_words[static_cast<std::size_t>(j)].length();
        if (row_level != w.gap * j + w.c2 || row_level >= a.depth())
            return Verdict::fail("row-level", row_prefix,
                                 "row word level " + std::to_string(row_level) +
                                     (row_level >= a.depth()
                                          ? " is beyond the set depth"
                                          : ", expected " + std::to_string(w.gap * j + w.c2)));
        TreeSet slice = slice_at(a, w.row_words[static_cast<std::size_t>(j)]);
        Verdict inner = verify_arithmetic_subtree(w.row_witness(j), slice);
        if (!inner.pass) {
            Violation v = *inner.violation;
            return Verdict::fail("row-" + v.condition, row_prefix + v.address, v.detail);
        }
        for (const Word& addr : addrs) {
            const Word& img = detail::witness_image(row, addr, "tree array witness");
            if (img.length() != w.gap * addr.length() + w.c1)
                return Verdict::fail("level", row_prefix + format_word(addr),
                                     "image level " + std::to_string(img.length()) + ", expected " +
                                         std::to_string(w.gap * addr.length() + w.c1));
        }
    }
    std::set<std::pair<std::string, std::string>> assembled;
    for (int j = 0; j <= w.order; ++j)
        for (const Word& addr : addrs) {
            const Word& img = w.row_maps[static_cast<std::size_t>(j)].at(addr);
            auto key = std::make_pair(format_word(img),
                                      format_word(w.row_words[static_cast<std::size_t>(j)]));
            if (!assembled.insert(key).second)
                return Verdict::fail("injectivity", std::to_string(j) + ":" + format_word(addr),
                                     "assembled image (" + key.first + "," + key.second + ") repeats");
        }
    return Verdict::ok();
}

/// Product-tree conditions, checked per edge in shortlex order of the
/// parent with X-edges before Y-edges: coordinatewise descent, then the
/// level increment, then the child's membership.
inline Verdict verify_product_tree(const ProductTreeWitness& w, const GridTreeSet& a) {
    if (w.alphabet.size != a.alphabet().size) throw std::invalid_argument("alphabets differ");
    if (w.order < 0) throw std::invalid_argument("order must be >= 0");

    std::vector<FreeWord> addrs = enumerate_free_ball(w.alphabet, w.order);
    for (const FreeWord& addr : addrs) detail::witness_image(w.map, addr, "product tree witness");

    const PairWord& root = detail::witness_image(w.map, FreeWord(w.alphabet), "product tree witness");
    if (!a.contains(root))
        return Verdict::fail("membership", "", "root image (" + format_pair(root) + ") is not in the set");

    for (const FreeWord& parent : addrs) {
        if (parent.length() >= w.order) continue;
        const PairWord& pimg = w.map.at(parent);
        for (const GenToken& tok : generator_tokens(w.alphabet)) {
            FreeWord child = parent.extended(tok);
            const PairWord& cimg = w.map.at(child);
            PairWord stepped = act_free(pimg, FreeWord(w.alphabet, {tok}));
            const auto& inc = tok.axis == 0 ? w.u : w.v;
            if (!is_descendent(cimg, stepped))
                return Verdict::fail("descent", format_free_word(child),
                                     "(" + format_pair(cimg) + ") does not descend from (" +
                                         format_pair(stepped) + ")");
            auto [pi, pj] = pimg.level();
            auto [ci, cj] = cimg.level();
            if (ci != pi + inc[0] || cj != pj + inc[1])
                return Verdict::fail("level-increment", format_free_word(child),
                                     "level (" + std::to_string(ci) + "," + std::to_string(cj) +
                                         "), expected (" + std::to_string(pi + inc[0]) + "," +
                                         std::to_string(pj + inc[1]) + ")");
            if (!a.contains(cimg))
                return Verdict::fail("membership", format_free_word(child),
                                     "image (" + format_pair(cimg) + ") is not in the set");
        }
    }
    return Verdict::ok();
}

// ---- derived forms and helpers ----------------------------------------

/// Every arithmetic subtree is a regular embedding; re-reading the witness
/// only forgets the constant gap.
inline RegularEmbeddingWitness as_regular_embedding(const TreeWitness& w) {
    return RegularEmbeddingWitness{w.alphabet, w.order, w.map};
}

/// Recovers the gap from the map alone (first edge out of the root);
/// nothing for order-0 witnesses.
inline std::optional<int> infer_gap(const TreeWitness& w) {
    if (w.order < 1) return std::nullopt;
    auto root = w.map.find(Word(w.alphabet));
    auto child = w.map.find(Word(w.alphabet).extended(0));
    if (root == w.map.end() || child == w.map.end()) return std::nullopt;
    return child->second.length() - root->second.length();
}

/// Recovers (u, v) from the map alone (first X- and Y-edges of the root).
inline std::optional<std::pair<std::array<long long, 2>, std::array<long long, 2>>>
infer_increments(const ProductTreeWitness& w) {
    if (w.order < 1) return std::nullopt;
    auto root = w.map.find(FreeWord(w.alphabet));
    auto xchild = w.map.find(FreeWord(w.alphabet).extended(GenToken{0, 0}));
    auto ychild = w.map.find(FreeWord(w.alphabet).extended(GenToken{1, 0}));
    if (root == w.map.end() || xchild == w.map.end() || ychild == w.map.end()) return std::nullopt;
    auto [ri, rj] = root->second.level();
    auto [xi, xj] = xchild->second.level();
    auto [yi, yj] = ychild->second.level();
    return std::make_pair(std::array<long long, 2>{xi - ri, xj - rj},
                          std::array<long long, 2>{yi - ri, yj - rj});
}

/// Left translation of the set: alpha . A, kept as an implicit set.
inline GridTreeSet translate_set(const PairWord& offset, const GridTreeSet& a) {
    if (offset.alphabet().size != a.alphabet().size) throw std::invalid_argument("alphabet mismatch");
    int extra = std::max(offset.first.length(), offset.second.length());
    GridTreeSet base = a;
    return GridTreeSet::predicate_set(
        a.alphabet(), a.depth() + extra,
        [offset, base](const PairWord& p) {
            auto tail = is_descendent(p, offset);
            return tail && base.contains(*tail);
        },
        "translate(" + format_pair(offset, true) + ")", 1);
}

/// Left translation of a product-tree witness into the translated set.
inline ProductTreeWitness translate_product_witness(const PairWord& offset,
                                                    const ProductTreeWitness& w) {
    ProductTreeWitness out{w.alphabet, w.order, w.u, w.v, {}};
    for (const auto& [addr, img] : w.map) out.map.emplace(addr, concat(offset, img));
    return out;
}

}  // namespace treeramsey
