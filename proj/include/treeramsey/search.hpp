#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "treeramsey/rational.hpp"
#include "treeramsey/sets.hpp"
#include "treeramsey/witness.hpp"
#include "treeramsey/words.hpp"

namespace treeramsey {

// All searches are canonical-first: the witness returned is the least one
// in a documented total order, independent of worker count, so runs are
// reproducible byte for byte. "None" answers distinguish an exhausted
// search space from an exhausted budget.

struct SearchBudget {
    static constexpr std::uint64_t kUnbounded = std::uint64_t(1) << 62;

    std::uint64_t node_cap = kUnbounded;
    std::optional<std::chrono::milliseconds> wall_cap;
    int workers = 1;
};

enum class SearchStatus { Found, NoneExhaustive, BudgetExhausted };

template <class W>
struct SearchOutcome {
    SearchStatus status;
    std::optional<W> witness;
    std::uint64_t nodes = 0;
};

/// A cartesian product of two equal-difference arithmetic progressions of
/// length `len` inside an integer grid.
struct GridApWitness {
    int a1;
    int a2;
    int q;
    int len;
};

struct QRange {
    int lo = 1;
    std::optional<int> hi;

    static QRange all() { return QRange{}; }
    static QRange exactly(int q) { return QRange{q, q}; }
    static QRange between(int lo, int hi) { return QRange{lo, hi}; }
};

namespace detail {

struct BudgetStop {};  // internal control flow; never escapes the search entry points

class BudgetMeter {
public:
    explicit BudgetMeter(const SearchBudget& budget)
        : budget_(budget), start_(std::chrono::steady_clock::now()) {}

    void tick(std::uint64_t n = 1) {
        std::uint64_t seen = nodes_.fetch_add(n, std::memory_order_relaxed) + n;
        if (seen > budget_.node_cap) throw BudgetStop{};
        if (budget_.wall_cap && (seen & 0xfff) == 0 &&
            std::chrono::steady_clock::now() - start_ > *budget_.wall_cap)
            throw BudgetStop{};
    }

    std::uint64_t nodes() const { return nodes_.load(std::memory_order_relaxed); }
    int workers() const {
        // finite budgets force serial execution so that the exhaustion
        // point does not depend on thread interleaving
        if (budget_.node_cap < SearchBudget::kUnbounded || budget_.wall_cap) return 1;
        return std::max(1, budget_.workers);
    }

private:
    const SearchBudget& budget_;
    std::atomic<std::uint64_t> nodes_{0};
    std::chrono::steady_clock::time_point start_;
};

struct WordDepthHash {
    std::size_t operator()(const std::pair<Word, int>& p) const {
        return WordHash{}(p.first) * 31 + static_cast<std::size_t>(p.second);
    }
};

struct PairDepthHash {
    std::size_t operator()(const std::pair<PairWord, int>& p) const {
        return PairWordHash{}(p.first) * 31 + static_cast<std::size_t>(p.second);
    }
};

/// Exact completability of an arithmetic subtree of the remaining depth
/// below the image x, for a fixed gap. Children live in disjoint subtrees,
/// so this makes the canonical greedy construction backtrack-free.
class TreeViability {
public:
    TreeViability(const TreeSet& a, int gap, BudgetMeter& meter)
        : a_(a), gap_(gap), meter_(meter) {}

    bool viable(const Word& x, int depth) {
        if (depth == 0) return true;
        auto key = std::make_pair(x, depth);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        bool ok = true;
        for (int l = 0; ok && l < a_.alphabet().size; ++l) {
            bool found = false;
            a_.for_each_descendant_at(x.extended(static_cast<Letter>(l)), x.length() + gap_,
                                      [&](const Word& child) {
                                          meter_.tick();
                                          if (viable(child, depth - 1)) {
                                              found = true;
                                              return false;
                                          }
                                          return true;
                                      });
            ok = found;
        }
        memo_.emplace(key, ok);
        return ok;
    }

    /// Lex-least viable child of x along letter l, given remaining depth.
    std::optional<Word> first_child(const Word& x, Letter l, int depth) {
        std::optional<Word> out;
        a_.for_each_descendant_at(x.extended(l), x.length() + gap_, [&](const Word& child) {
            meter_.tick();
            if (viable(child, depth - 1)) {
                out = child;
                return false;
            }
            return true;
        });
        return out;
    }

private:
    const TreeSet& a_;
    int gap_;
    BudgetMeter& meter_;
    std::unordered_map<std::pair<Word, int>, bool, WordDepthHash> memo_;
};

inline WordMap greedy_tree_map(TreeViability& v, Alphabet alpha, const Word& root, int order) {
    WordMap map;
    map.emplace(Word(alpha), root);
    std::vector<Word> addrs = enumerate_ball(alpha, order > 0 ? order - 1 : 0);
    if (order > 0)
        for (const Word& parent : addrs) {
            const Word& pimg = map.at(parent);
            int remaining = order - parent.length();
            for (int l = 0; l < alpha.size; ++l) {
                auto child = v.first_child(pimg, static_cast<Letter>(l), remaining);
                if (!child) throw std::logic_error("viability promised a child");
                map.emplace(parent.extended(static_cast<Letter>(l)), *child);
            }
        }
    return map;
}

/// Scans `count` candidates with `workers` threads and returns the least
/// index accepted by `check`, or nullopt. `check` must be a pure function
/// of the index.
template <class Check>
std::optional<std::size_t> least_accepted_index(std::size_t count, int workers, Check&& check) {
    if (count == 0) return std::nullopt;
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            if (check(i)) return i;
        return std::nullopt;
    }
    std::atomic<std::size_t> best{count};
    std::atomic<bool> aborted{false};
    auto run = [&](std::size_t offset) {
        try {
            for (std::size_t i = offset; i < count; i += static_cast<std::size_t>(workers)) {
                if (i >= best.load(std::memory_order_relaxed)) break;
                if (check(i)) {
                    std::size_t cur = best.load(std::memory_order_relaxed);
                    while (i < cur && !best.compare_exchange_weak(cur, i)) {
                    }
                    break;
                }
            }
        } catch (const BudgetStop&) {
            aborted.store(true);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(run, static_cast<std::size_t>(t));
    for (auto& th : pool) th.join();
    if (aborted.load()) throw BudgetStop{};
    std::size_t found = best.load();
    if (found == count) return std::nullopt;
    return found;
}

}  // namespace detail

/// First witness by (gap, then images in address order). Roots are tried
/// shortlex over the set's members; each edge continues with the letter
/// prefix and then lexicographic suffixes.
inline SearchOutcome<TreeWitness> find_arithmetic_subtree(const TreeSet& a, int r,
                                                          QRange q_range = QRange::all(),
                                                          const SearchBudget& budget = {}) {
    if (r < 0) throw std::invalid_argument("order must be >= 0");
    detail::BudgetMeter meter(budget);
    Alphabet alpha = a.alphabet();
    try {
        if (r == 0) {
            std::optional<Word> first;
            a.for_each_member([&](const Word& w) {
                meter.tick();
                first = w;
                return false;
            });
            if (!first) return {SearchStatus::NoneExhaustive, std::nullopt, meter.nodes()};
            WordMap map;
            map.emplace(Word(alpha), *first);
            return {SearchStatus::Found, TreeWitness{alpha, 0, 1, std::move(map)}, meter.nodes()};
        }
        int q_max = (a.depth() - 1) / r;
        int q_lo = std::max(1, q_range.lo);
        int q_hi = q_range.hi ? std::min(*q_range.hi, q_max) : q_max;
        for (int q = q_lo; q <= q_hi; ++q) {
            for (int root_level = 0; root_level + r * q < a.depth(); ++root_level) {
                if (!a.level_occupied(root_level)) continue;
                std::vector<Word> roots;
                a.for_each_descendant_at(Word(alpha), root_level, [&](const Word& w) {
                    meter.tick();
                    roots.push_back(w);
                    return true;
                });
                int workers = meter.workers();
                std::optional<std::size_t> hit;
                if (workers <= 1) {
                    detail::TreeViability v(a, q, meter);
                    hit = detail::least_accepted_index(roots.size(), 1, [&](std::size_t i) {
                        meter.tick();
                        return v.viable(roots[i], r);
                    });
                    if (hit) {
                        WordMap map = detail::greedy_tree_map(v, alpha, roots[*hit], r);
                        return {SearchStatus::Found, TreeWitness{alpha, r, q, std::move(map)},
                                meter.nodes()};
                    }
                } else {
                    std::vector<detail::TreeViability> views;
                    views.reserve(static_cast<std::size_t>(workers));
                    for (int t = 0; t < workers; ++t) views.emplace_back(a, q, meter);
                    hit = detail::least_accepted_index(roots.size(), workers, [&](std::size_t i) {
                        meter.tick();
                        return views[i % static_cast<std::size_t>(workers)].viable(roots[i], r);
                    });
                    if (hit) {
                        detail::TreeViability v(a, q, meter);
                        WordMap map = detail::greedy_tree_map(v, alpha, roots[*hit], r);
                        return {SearchStatus::Found, TreeWitness{alpha, r, q, std::move(map)},
                                meter.nodes()};
                    }
                }
            }
        }
        return {SearchStatus::NoneExhaustive, std::nullopt, meter.nodes()};
    } catch (const detail::BudgetStop&) {
        return {SearchStatus::BudgetExhausted, std::nullopt, meter.nodes()};
    }
}

namespace detail {

/// Exact completability of a regular embedding below image x from schedule
/// position pos, memoized per schedule.
class ScheduleViability {
public:
    ScheduleViability(const TreeSet& s, const std::vector<int>& schedule, BudgetMeter& meter)
        : s_(s), schedule_(schedule), meter_(meter) {}

    bool viable(const Word& x, std::size_t pos) {
        if (pos + 1 >= schedule_.size()) return true;
        auto key = std::make_pair(x, static_cast<int>(pos));
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        bool ok = true;
        for (int l = 0; ok && l < s_.alphabet().size; ++l) {
            bool found = false;
            s_.for_each_descendant_at(x.extended(static_cast<Letter>(l)),
                                      schedule_[pos + 1], [&](const Word& child) {
                                          meter_.tick();
                                          if (viable(child, pos + 1)) {
                                              found = true;
                                              return false;
                                          }
                                          return true;
                                      });
            ok = found;
        }
        memo_.emplace(key, ok);
        return ok;
    }

    std::optional<Word> first_child(const Word& x, Letter l, std::size_t pos) {
        std::optional<Word> out;
        s_.for_each_descendant_at(x.extended(l), schedule_[pos + 1], [&](const Word& child) {
            meter_.tick();
            if (viable(child, pos + 1)) {
                out = child;
                return false;
            }
            return true;
        });
        return out;
    }

private:
    const TreeSet& s_;
    const std::vector<int>& schedule_;
    BudgetMeter& meter_;
    std::unordered_map<std::pair<Word, int>, bool, WordDepthHash> memo_;
};

}  // namespace detail

/// First witness by (level schedule lexicographically, then images).
inline SearchOutcome<RegularEmbeddingWitness> find_regular_embedding(
    const TreeSet& s, int d, const SearchBudget& budget = {}) {
    if (d < 0) throw std::invalid_argument("depth must be >= 0");
    detail::BudgetMeter meter(budget);
    Alphabet alpha = s.alphabet();
    std::vector<int> occupied = s.occupied_levels();
    if (static_cast<int>(occupied.size()) < d + 1)
        return {SearchStatus::NoneExhaustive, std::nullopt, meter.nodes()};
    try {
        // increasing (d+1)-tuples of occupied levels, lexicographically
        std::vector<int> pick(static_cast<std::size_t>(d) + 1);
        for (int i = 0; i <= d; ++i) pick[static_cast<std::size_t>(i)] = i;
        for (;;) {
            std::vector<int> schedule;
            schedule.reserve(pick.size());
            for (int idx : pick) schedule.push_back(occupied[static_cast<std::size_t>(idx)]);

            detail::ScheduleViability v(s, schedule, meter);
            std::optional<Word> root;
            s.for_each_descendant_at(Word(alpha), schedule[0], [&](const Word& w) {
                meter.tick();
                if (v.viable(w, 0)) {
                    root = w;
                    return false;
                }
                return true;
            });
            if (root) {
                WordMap map;
                map.emplace(Word(alpha), *root);
                if (d > 0)
                    for (const Word& parent : enumerate_ball(alpha, d - 1)) {
                        const Word& pimg = map.at(parent);
                        for (int l = 0; l < alpha.size; ++l) {
                            auto child = v.first_child(pimg, static_cast<Letter>(l),
                                                       static_cast<std::size_t>(parent.length()));
                            if (!child) throw std::logic_error("viability promised a child");
                            map.emplace(parent.extended(static_cast<Letter>(l)), *child);
                        }
                    }
                return {SearchStatus::Found, RegularEmbeddingWitness{alpha, d, std::move(map)},
                        meter.nodes()};
            }

            // next combination
            int i = d;
            while (i >= 0 &&
                   pick[static_cast<std::size_t>(i)] ==
                       static_cast<int>(occupied.size()) - (d + 1 - i))
                --i;
            if (i < 0) break;
            ++pick[static_cast<std::size_t>(i)];
            for (int j = i + 1; j <= d; ++j)
                pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j) - 1] + 1;
        }
        return {SearchStatus::NoneExhaustive, std::nullopt, meter.nodes()};
    } catch (const detail::BudgetStop&) {
        return {SearchStatus::BudgetExhausted, std::nullopt, meter.nodes()};
    }
}

/// First (by q, then a1, then a2) full r-by-r product of progressions
/// inside the grid set; the space is small, so the scan is exhaustive.
inline std::optional<GridApWitness> find_ap_grid(const GridSet& b, int r) {
    if (r < 1) throw std::invalid_argument("progression length must be >= 1");
    int n = b.size_bound();
    if (r == 1) {
        if (b.members().empty()) return std::nullopt;
        auto [a1, a2] = b.members().front();
        return GridApWitness{a1, a2, 1, 1};
    }
    std::vector<char> grid(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
    for (auto [i, j] : b.members())
        grid[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(j)] = 1;
    auto at = [&](int i, int j) {
        return grid[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(j)] != 0;
    };
    for (int q = 1; (r - 1) * q <= n - 1; ++q)
        for (int a1 = 0; a1 + (r - 1) * q < n; ++a1)
            for (int a2 = 0; a2 + (r - 1) * q < n; ++a2) {
                bool ok = true;
                for (int x = 0; ok && x < r; ++x)
                    for (int y = 0; ok && y < r; ++y) ok = at(a1 + x * q, a2 + y * q);
                if (ok) return GridApWitness{a1, a2, q, r};
            }
    return std::nullopt;
}

/// Mean >= delta forces at least delta*N/2 entries to reach delta/2; this
/// returns exactly those indices.
inline std::vector<int> select_dense_indices(const std::vector<Rational>& values,
                                             const Rational& delta) {
    Rational sum = 0;
    for (const Rational& v : values) {
        if (v < 0 || v > 1) throw std::invalid_argument("values must lie in [0,1]");
        sum += v;
    }
    if (sum < delta * static_cast<int>(values.size()))
        throw std::invalid_argument("mean of values is below delta");
    Rational half = delta / 2;
    std::vector<int> out;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] >= half) out.push_back(static_cast<int>(i));
    return out;
}

struct TreeArrayOutcome {
    SearchStatus status;
    std::optional<TreeArrayWitness> witness;
    std::string failed_stage;  // set when status != Found
    std::string message;
    std::uint64_t nodes = 0;
};

/// Constructive pipeline behind the tree-array existence argument:
/// dense rows -> dense slice per row -> deepest regular embedding per
/// slice -> grid of occupied levels -> product of progressions -> witness.
/// Any stage can honestly fail at a finite depth; the report names it.
inline TreeArrayOutcome construct_tree_array(const GridTreeSet& a, int r, const Rational& delta,
                                             const SearchBudget& budget = {}) {
    if (r < 0) throw std::invalid_argument("order must be >= 0");
    if (delta <= 0) throw std::invalid_argument("delta must be positive");
    if (density_2d(a) < delta)
        throw std::invalid_argument("set density is below delta");
    Alphabet alpha = a.alphabet();
    int n = a.depth();
    detail::BudgetMeter meter(budget);

    auto fail = [&](const std::string& stage, const std::string& msg) {
        return TreeArrayOutcome{SearchStatus::NoneExhaustive, std::nullopt, stage, msg,
                                meter.nodes()};
    };

    // row values of the slice decomposition: (1/N) sum_i |A cap L_{i,j}| k^{-i-j}
    std::vector<Rational> rows(static_cast<std::size_t>(n), Rational(0));
    for (int j = 0; j < n; ++j) {
        Rational acc = 0;
        for (int i = 0; i < n; ++i) {
            BigInt count = a.cell_count(i, j);
            if (count != 0)
                acc += Rational(count, pow_int(static_cast<std::uint64_t>(alpha.size),
                                               static_cast<std::uint64_t>(i + j)));
        }
        rows[static_cast<std::size_t>(j)] = acc / n;
    }
    std::vector<int> selected = select_dense_indices(rows, delta);
    if (selected.empty()) return fail("dense-rows", "no row reaches delta/2");

    Rational half = delta / 2;
    std::map<int, Word> slice_words;
    std::map<int, TreeSet> slices;
    for (int j : selected) {
        std::optional<Word> pick;
        TreeSet shell = TreeSet::level_mask(alpha, n, {j});
        shell.for_each_descendant_at(Word(alpha), j, [&](const Word& y) {
            meter.tick();
            if (density_1d(slice_at(a, y)) >= half) {
                pick = y;
                return false;
            }
            return true;
        });
        if (!pick) return fail("slice-pick", "no slice at row " + std::to_string(j) +
                                                 " reaches density delta/2");
        slice_words.emplace(j, *pick);
        slices.emplace(j, slice_at(a, *pick));
    }

    std::map<int, RegularEmbeddingWitness> embeddings;
    for (int j : selected) {
        std::optional<RegularEmbeddingWitness> best;
        for (int d = n - 1; d >= 0 && !best; --d) {
            auto found = find_regular_embedding(slices.at(j), d, budget);
            if (found.status == SearchStatus::BudgetExhausted)
                return TreeArrayOutcome{SearchStatus::BudgetExhausted, std::nullopt,
                                        "row-embedding", "budget exhausted", meter.nodes()};
            if (found.status == SearchStatus::Found) best = std::move(found.witness);
        }
        if (!best) return fail("row-embedding", "slice at row " + std::to_string(j) + " is empty");
        embeddings.emplace(j, *std::move(best));
    }

    std::vector<std::pair<int, int>> level_points;
    for (int j : selected)
        for (int lvl : embeddings.at(j).level_schedule()) level_points.emplace_back(lvl, j);
    auto ap = find_ap_grid(GridSet(n, std::move(level_points)), r + 1);
    if (!ap)
        return fail("ap-grid", "occupied levels admit no (r+1)x(r+1) progression grid at depth " +
                                   std::to_string(n));

    TreeArrayWitness w{alpha, r, ap->q, ap->a1, ap->a2, {}, {}};
    for (int row = 0; row <= r; ++row) {
        int j = ap->a2 + row * ap->q;
        const RegularEmbeddingWitness& emb = embeddings.at(j);
        std::vector<int> schedule = emb.level_schedule();
        std::vector<std::size_t> pos(static_cast<std::size_t>(r) + 1);
        for (int x = 0; x <= r; ++x) {
            auto it = std::find(schedule.begin(), schedule.end(), ap->a1 + x * ap->q);
            if (it == schedule.end()) return fail("assemble", "schedule lost an expected level");
            pos[static_cast<std::size_t>(x)] = static_cast<std::size_t>(it - schedule.begin());
        }
        // restriction of the embedding to the progression levels, padding
        // the skipped schedule steps with letter 0
        std::map<Word, Word, WordLexLess> address_of;
        Word root_addr(alpha);
        for (std::size_t i = 0; i < pos[0]; ++i) root_addr = root_addr.extended(0);
        address_of.emplace(Word(alpha), root_addr);
        WordMap row_map;
        row_map.emplace(Word(alpha), emb.map.at(root_addr));
        for (const Word& parent : enumerate_ball(alpha, r > 0 ? r - 1 : 0)) {
            if (parent.length() >= r) continue;
            const Word& paddr = address_of.at(parent);
            std::size_t from = pos[static_cast<std::size_t>(parent.length())];
            std::size_t to = pos[static_cast<std::size_t>(parent.length()) + 1];
            for (int l = 0; l < alpha.size; ++l) {
                Word caddr = paddr.extended(static_cast<Letter>(l));
                for (std::size_t i = from + 1; i < to; ++i) caddr = caddr.extended(0);
                Word child = parent.extended(static_cast<Letter>(l));
                address_of.emplace(child, caddr);
                row_map.emplace(child, emb.map.at(caddr));
            }
        }
        w.row_words.push_back(slice_words.at(j));
        w.row_maps.push_back(std::move(row_map));
    }

    Verdict check = verify_tree_array(w, a);
    if (!check.pass)
        return fail("assemble", "assembled witness failed verification: " +
                                    check.violation->condition + " at " + check.violation->address);
    return TreeArrayOutcome{SearchStatus::Found, std::move(w), "", "", meter.nodes()};
}

namespace detail {

/// Exact completability of a product tree below an image pair. X- and
/// Y-branches out of commuting addresses often share images, so the memo
/// sees real hits.
class ProductViability {
public:
    ProductViability(const GridTreeSet& a, std::array<long long, 2> eff_u,
                     std::array<long long, 2> eff_v, BudgetMeter& meter)
        : a_(a), u_(eff_u), v_(eff_v), meter_(meter) {}

    bool viable(const PairWord& p, int depth) {
        if (depth == 0) return true;
        auto key = std::make_pair(p, depth);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        bool ok = true;
        for (int l = 0; ok && l < a_.alphabet().size; ++l)
            ok = static_cast<bool>(first_child(p, static_cast<Letter>(l), 0, depth)) &&
                 static_cast<bool>(first_child(p, static_cast<Letter>(l), 1, depth));
        memo_.emplace(key, ok);
        return ok;
    }

    /// Lex-least viable child on the given axis (0 = X, 1 = Y).
    std::optional<PairWord> first_child(const PairWord& p, Letter l, int axis, int depth) {
        const auto& inc = axis == 0 ? u_ : v_;
        auto [i, j] = p.level();
        Word p1 = axis == 0 ? p.first.extended(l) : p.first;
        Word p2 = axis == 0 ? p.second : p.second.extended(l);
        std::optional<PairWord> out;
        a_.for_each_extension(p1, p2, static_cast<int>(i + inc[0]), static_cast<int>(j + inc[1]),
                              [&](const PairWord& child) {
                                  meter_.tick();
                                  if (viable(child, depth - 1)) {
                                      out = child;
                                      return false;
                                  }
                                  return true;
                              });
        return out;
    }

private:
    const GridTreeSet& a_;
    std::array<long long, 2> u_, v_;
    BudgetMeter& meter_;
    std::unordered_map<std::pair<PairWord, int>, bool, PairDepthHash> memo_;
};

inline FreeWordMap greedy_product_map(ProductViability& v, Alphabet alpha, const PairWord& root,
                                      int order) {
    FreeWordMap map;
    map.emplace(FreeWord(alpha), root);
    if (order > 0)
        for (const FreeWord& parent : enumerate_free_ball(alpha, order - 1)) {
            const PairWord& pimg = map.at(parent);
            int remaining = order - parent.length();
            for (const GenToken& tok : generator_tokens(alpha)) {
                auto child = v.first_child(pimg, tok.letter, tok.axis, remaining);
                if (!child) throw std::logic_error("viability promised a child");
                map.emplace(parent.extended(tok), *child);
            }
        }
    return map;
}

}  // namespace detail

struct ProductSearchOutcome {
    SearchStatus status;
    std::optional<int> n;
    std::optional<ProductTreeWitness> witness;
    std::uint64_t nodes = 0;
};

/// Smallest n in the range admitting an (n.u, n.v)-product tree of order r,
/// with the canonical-first witness for that n. Increments must be
/// strictly positive unless `relaxed` allows zero coordinates (at least
/// one positive per increment); the relaxed mode is exploratory and
/// promises nothing.
inline ProductSearchOutcome find_product_tree(const GridTreeSet& a, int r,
                                              std::array<long long, 2> u,
                                              std::array<long long, 2> v, int n_lo, int n_hi,
                                              bool relaxed = false,
                                              const SearchBudget& budget = {}) {
    if (r < 0) throw std::invalid_argument("order must be >= 0");
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("bad n range");
    auto check_increment = [&](std::array<long long, 2> inc, const char* name) {
        if (relaxed) {
            if (inc[0] < 0 || inc[1] < 0 || (inc[0] == 0 && inc[1] == 0))
                throw std::invalid_argument(std::string(name) +
                                            " needs a nonnegative increment with a positive coordinate");
        } else if (inc[0] < 1 || inc[1] < 1) {
            throw std::invalid_argument(std::string(name) +
                                        " must be strictly positive (use relaxed mode for zeros)");
        }
    };
    check_increment(u, "u");
    check_increment(v, "v");

    detail::BudgetMeter meter(budget);
    Alphabet alpha = a.alphabet();
    int n_grid = a.depth();
    try {
        for (int n = n_lo; n <= n_hi; ++n) {
            std::array<long long, 2> eu{u[0] * n, u[1] * n};
            std::array<long long, 2> ev{v[0] * n, v[1] * n};
            if (r >= 1 && (eu[0] < 1 || ev[1] < 1)) continue;  // descent is impossible
            long long span1 = static_cast<long long>(r) * std::max(eu[0], ev[0]);
            long long span2 = static_cast<long long>(r) * std::max(eu[1], ev[1]);
            if (span1 >= n_grid || span2 >= n_grid) continue;

            std::vector<PairWord> roots;
            for (int i = 0; i + span1 < n_grid; ++i)
                for (int j = 0; j + span2 < n_grid; ++j)
                    a.for_each_in_cell(i, j, [&](const PairWord& p) {
                        meter.tick();
                        roots.push_back(p);
                        return true;
                    });
            std::sort(roots.begin(), roots.end(), PairWordLevelLexLess{});

            int workers = meter.workers();
            std::optional<std::size_t> hit;
            if (workers <= 1) {
                detail::ProductViability view(a, eu, ev, meter);
                hit = detail::least_accepted_index(roots.size(), 1, [&](std::size_t i) {
                    meter.tick();
                    return view.viable(roots[i], r);
                });
                if (hit) {
                    FreeWordMap map = detail::greedy_product_map(view, alpha, roots[*hit], r);
                    return {SearchStatus::Found, n,
                            ProductTreeWitness{alpha, r, eu, ev, std::move(map)}, meter.nodes()};
                }
            } else {
                std::vector<detail::ProductViability> views;
                views.reserve(static_cast<std::size_t>(workers));
                for (int t = 0; t < workers; ++t) views.emplace_back(a, eu, ev, meter);
                hit = detail::least_accepted_index(roots.size(), workers, [&](std::size_t i) {
                    meter.tick();
                    return views[i % static_cast<std::size_t>(workers)].viable(roots[i], r);
                });
                if (hit) {
                    detail::ProductViability view(a, eu, ev, meter);
                    FreeWordMap map = detail::greedy_product_map(view, alpha, roots[*hit], r);
                    return {SearchStatus::Found, n,
                            ProductTreeWitness{alpha, r, eu, ev, std::move(map)}, meter.nodes()};
                }
            }
        }
        return {SearchStatus::NoneExhaustive, std::nullopt, std::nullopt, meter.nodes()};
    } catch (const detail::BudgetStop&) {
        return {SearchStatus::BudgetExhausted, std::nullopt, std::nullopt, meter.nodes()};
    }
}

struct CartesianOutcome {
    SearchStatus status;
    std::optional<ProductTreeWitness> witness;  // factors through the pair of trees
    std::optional<TreeWitness> tree1, tree2;
    std::uint64_t nodes = 0;
};

namespace detail {

/// Enumerates gap-q subtrees of s in canonical order, invoking the visitor
/// with each complete witness map; the visitor returns false to stop.
inline bool enumerate_gap_trees(const TreeSet& s, int r, int q, BudgetMeter& meter,
                                const std::function<bool(const WordMap&)>& visit) {
    Alphabet alpha = s.alphabet();
    if (r == 0) {
        return s.for_each_member([&](const Word& w) {
            meter.tick();
            WordMap map;
            map.emplace(Word(alpha), w);
            return visit(map);
        });
    }
    std::vector<Word> addrs = enumerate_ball(alpha, r);  // shortlex: parents first
    std::vector<Word> images;
    WordMap map;

    std::function<bool(std::size_t)> assign = [&](std::size_t idx) -> bool {
        if (idx == addrs.size()) return visit(map);
        const Word& addr = addrs[idx];
        std::vector<Letter> ls = addr.letters();
        ls.pop_back();
        Word parent(alpha, std::move(ls));
        const Word& pimg = map.at(parent);
        bool keep_going = true;
        s.for_each_descendant_at(pimg.extended(addr.last()), pimg.length() + q,
                                 [&](const Word& img) {
                                     meter.tick();
                                     map.insert_or_assign(addr, img);
                                     keep_going = assign(idx + 1);
                                     return keep_going;
                                 });
        map.erase(addr);
        return keep_going;
    };

    for (int root_level = 0; root_level + r * q < s.depth(); ++root_level) {
        bool keep_going = true;
        s.for_each_descendant_at(Word(alpha), root_level, [&](const Word& root) {
            meter.tick();
            map.clear();
            map.emplace(Word(alpha), root);
            keep_going = assign(1);
            return keep_going;
        });
        if (!keep_going) return false;
    }
    return true;
}

}  // namespace detail

/// Exploration mode: exhaustive search for a cartesian product of two
/// gap-q trees inside the grid set, i.e. a product-tree witness that
/// factors through the natural homomorphism onto pairs. Existence is an
/// open problem; expect honest "none" answers.
inline CartesianOutcome find_cartesian_product_tree(const GridTreeSet& a, int r,
                                                    QRange q_range = QRange::all(),
                                                    const SearchBudget& budget = {}) {
    if (r < 0) throw std::invalid_argument("order must be >= 0");
    detail::BudgetMeter meter(budget);
    Alphabet alpha = a.alphabet();
    int n = a.depth();

    // first-coordinate projection
    std::vector<Word> firsts;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (a.rep() != GridTreeSet::Rep::Explicit)
                require_within_cap(a.cell_size(i, j), "projection");
            a.for_each_in_cell(i, j, [&](const PairWord& p) {
                firsts.push_back(p.first);
                return true;
            });
        }
    TreeSet proj = TreeSet::explicit_set(alpha, n, std::move(firsts));

    try {
        int q_max = r > 0 ? (n - 1) / std::max(1, r) : 1;
        int q_lo = std::max(1, q_range.lo);
        int q_hi = q_range.hi ? std::min(*q_range.hi, q_max) : q_max;
        for (int q = q_lo; q <= q_hi; ++q) {
            CartesianOutcome out{SearchStatus::NoneExhaustive, std::nullopt, std::nullopt,
                                 std::nullopt, 0};
            bool exhausted = detail::enumerate_gap_trees(
                proj, r, q, meter, [&](const WordMap& phi1) {
                    // rows compatible with every image of phi1
                    std::vector<Word> seconds;
                    TreeSet everything = TreeSet::full(alpha, n);
                    everything.for_each_member([&](const Word& y) {
                        meter.tick();
                        for (const auto& [addr, x] : phi1)
                            if (!a.contains(PairWord(x, y))) return true;
                        seconds.push_back(y);
                        return true;
                    });
                    TreeSet compatible = TreeSet::explicit_set(alpha, n, std::move(seconds));
                    auto second = find_arithmetic_subtree(compatible, r, QRange::exactly(q), budget);
                    if (second.status == SearchStatus::BudgetExhausted) throw detail::BudgetStop{};
                    if (second.status != SearchStatus::Found) return true;

                    ProductTreeWitness w{alpha, r, {q, 0}, {0, q}, {}};
                    for (const FreeWord& addr : enumerate_free_ball(alpha, r)) {
                        PairWord parts = act_free(identity_pair(alpha), addr);
                        w.map.emplace(addr, PairWord(phi1.at(parts.first),
                                                     second.witness->map.at(parts.second)));
                    }
                    out = CartesianOutcome{SearchStatus::Found, std::move(w),
                                           TreeWitness{alpha, r, q, phi1},
                                           std::move(*second.witness), 0};
                    return false;
                });
            if (!exhausted && out.status == SearchStatus::Found) {
                out.nodes = meter.nodes();
                return out;
            }
        }
        return {SearchStatus::NoneExhaustive, std::nullopt, std::nullopt, std::nullopt,
                meter.nodes()};
    } catch (const detail::BudgetStop&) {
        return {SearchStatus::BudgetExhausted, std::nullopt, std::nullopt, std::nullopt,
                meter.nodes()};
    }
}

}  // namespace treeramsey
