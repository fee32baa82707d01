#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "treeramsey/core.hpp"
#include "treeramsey/rational.hpp"
#include "treeramsey/rng.hpp"
#include "treeramsey/words.hpp"

namespace treeramsey {

/// A finite subset of the depth-N tree: members live on levels 0..N-1.
/// Two representations: an explicit member list, or a level mask where
/// every listed level is fully occupied.
class TreeSet {
public:
    enum class Rep { Explicit, LevelMask };

    static TreeSet explicit_set(Alphabet alpha, int depth, std::vector<Word> members) {
        TreeSet s(alpha, depth, Rep::Explicit);
        s.levels_.assign(static_cast<std::size_t>(depth), {});
        for (Word& w : members) {
            if (w.alphabet_size() != alpha.size) throw std::invalid_argument("alphabet mismatch");
            if (w.length() >= depth) throw std::invalid_argument("member exceeds set depth");
            s.levels_[static_cast<std::size_t>(w.length())].push_back(std::move(w));
        }
        for (auto& level : s.levels_) {
            std::sort(level.begin(), level.end(), WordLexLess{});
            level.erase(std::unique(level.begin(), level.end()), level.end());
        }
        return s;
    }

    static TreeSet level_mask(Alphabet alpha, int depth, const std::vector<int>& levels) {
        TreeSet s(alpha, depth, Rep::LevelMask);
        s.mask_.assign(static_cast<std::size_t>(depth), false);
        for (int l : levels) {
            if (l < 0 || l >= depth) throw std::invalid_argument("level out of range");
            s.mask_[static_cast<std::size_t>(l)] = true;
        }
        return s;
    }

    static TreeSet full(Alphabet alpha, int depth) {
        std::vector<int> levels(static_cast<std::size_t>(depth));
        for (int i = 0; i < depth; ++i) levels[static_cast<std::size_t>(i)] = i;
        return level_mask(alpha, depth, levels);
    }

    static TreeSet empty(Alphabet alpha, int depth) { return level_mask(alpha, depth, {}); }

    Alphabet alphabet() const { return alpha_; }
    int depth() const { return depth_; }
    Rep rep() const { return rep_; }

    bool contains(const Word& w) const {
        if (w.alphabet_size() != alpha_.size) return false;
        if (w.length() >= depth_) return false;
        if (rep_ == Rep::LevelMask) return mask_[static_cast<std::size_t>(w.length())];
        const auto& level = levels_[static_cast<std::size_t>(w.length())];
        return std::binary_search(level.begin(), level.end(), w, WordLexLess{});
    }

    bool level_occupied(int i) const {
        if (i < 0 || i >= depth_) return false;
        if (rep_ == Rep::LevelMask) return mask_[static_cast<std::size_t>(i)];
        return !levels_[static_cast<std::size_t>(i)].empty();
    }

    /// |S cap L_i| as a big integer (the mask rep occupies k^i words).
    BigInt level_count(int i) const {
        if (i < 0 || i >= depth_) return 0;
        if (rep_ == Rep::LevelMask)
            return mask_[static_cast<std::size_t>(i)]
                       ? pow_int(static_cast<std::uint64_t>(alpha_.size), static_cast<std::uint64_t>(i))
                       : BigInt(0);
        return BigInt(levels_[static_cast<std::size_t>(i)].size());
    }

    bool has_descendant_at(const Word& prefix, int level) const {
        if (level < 0 || level >= depth_ || prefix.length() > level) return false;
        if (rep_ == Rep::LevelMask) return mask_[static_cast<std::size_t>(level)];
        const auto& members = levels_[static_cast<std::size_t>(level)];
        auto it = std::lower_bound(members.begin(), members.end(), prefix,
                                   [](const Word& m, const Word& p) {
                                       return std::lexicographical_compare(
                                           m.letters().begin(),
                                           m.letters().begin() + std::min<std::size_t>(m.letters().size(), p.letters().size()),
                                           p.letters().begin(), p.letters().end());
                                   });
        return it != members.end() && is_descendent(*it, prefix).has_value();
    }

    /// Visits members at `level` extending `prefix`, lexicographically.
    /// The visitor returns false to stop; returns true if it ran to the end.
    template <class F>
    bool for_each_descendant_at(const Word& prefix, int level, F&& visit) const {
        if (level < 0 || level >= depth_ || prefix.length() > level) return true;
        if (rep_ == Rep::Explicit) {
            const auto& members = levels_[static_cast<std::size_t>(level)];
            auto cmp_prefix = [](const Word& m, const Word& p) {
                return std::lexicographical_compare(
                    m.letters().begin(),
                    m.letters().begin() + std::min<std::size_t>(m.letters().size(), p.letters().size()),
                    p.letters().begin(), p.letters().end());
            };
            auto it = std::lower_bound(members.begin(), members.end(), prefix, cmp_prefix);
            for (; it != members.end() && is_descendent(*it, prefix); ++it)
                if (!visit(*it)) return false;
            return true;
        }
        if (!mask_[static_cast<std::size_t>(level)]) return true;
        // enumerate suffixes odometer-style
        int tail = level - prefix.length();
        std::vector<Letter> suffix(static_cast<std::size_t>(tail), 0);
        for (;;) {
            Word w = prefix;
            for (Letter l : suffix) w = w.extended(l);
            if (!visit(w)) return false;
            int pos = tail - 1;
            while (pos >= 0 && suffix[static_cast<std::size_t>(pos)] == alpha_.size - 1) {
                suffix[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
            ++suffix[static_cast<std::size_t>(pos)];
        }
        return true;
    }

    /// Members in canonical order (level ascending, lex within level).
    /// Mask levels are materialized, so the usual cap guard applies.
    template <class F>
    bool for_each_member(F&& visit) const {
        for (int i = 0; i < depth_; ++i) {
            if (rep_ == Rep::Explicit) {
                for (const Word& w : levels_[static_cast<std::size_t>(i)])
                    if (!visit(w)) return false;
            } else if (mask_[static_cast<std::size_t>(i)]) {
                require_within_cap(checked_pow(static_cast<std::uint64_t>(alpha_.size),
                                               static_cast<std::uint64_t>(i), enumeration_cap()),
                                   "level materialization");
                if (!for_each_descendant_at(Word(alpha_), i, visit)) return false;
            }
        }
        return true;
    }

    std::vector<int> occupied_levels() const {
        std::vector<int> out;
        for (int i = 0; i < depth_; ++i)
            if (level_occupied(i)) out.push_back(i);
        return out;
    }

private:
    TreeSet(Alphabet alpha, int depth, Rep rep) : alpha_(alpha), depth_(depth), rep_(rep) {
        if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    }

    Alphabet alpha_;
    int depth_;
    Rep rep_;
    std::vector<std::vector<Word>> levels_;  // Explicit
    std::vector<bool> mask_;                 // LevelMask
};

/// d_N on the one-dimensional tree: (1/N) sum over members of k^-|x|.
inline Rational density_1d(const TreeSet& s) {
    Rational total = 0;
    for (int i = 0; i < s.depth(); ++i) {
        BigInt count = s.level_count(i);
        if (count != 0)
            total += Rational(count, pow_int(static_cast<std::uint64_t>(s.alphabet().size),
                                             static_cast<std::uint64_t>(i)));
    }
    return total / s.depth();
}

/// A finite subset of the integer grid [0,N)^2.
class GridSet {
public:
    GridSet(int n, std::vector<std::pair<int, int>> members) : n_(n), members_(std::move(members)) {
        if (n < 1) throw std::invalid_argument("grid size must be >= 1");
        for (auto& [i, j] : members_)
            if (i < 0 || j < 0 || i >= n || j >= n)
                throw std::invalid_argument("grid member out of range");
        std::sort(members_.begin(), members_.end());
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    }

    static GridSet full(int n) {
        std::vector<std::pair<int, int>> m;
        m.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m.emplace_back(i, j);
        return GridSet(n, std::move(m));
    }

    int size_bound() const { return n_; }
    const std::vector<std::pair<int, int>>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }

    bool contains(int i, int j) const {
        return std::binary_search(members_.begin(), members_.end(), std::make_pair(i, j));
    }

private:
    int n_;
    std::vector<std::pair<int, int>> members_;
};

/// A finite subset of the depth-N product of trees. Three representations:
///   Explicit  - sorted member list,
///   LevelLift - union of the full level cells over a grid set,
///   Predicate - a pure membership function with a documented name and a
///               declared per-query cost bound (implicit sets).
class GridTreeSet {
public:
    enum class Rep { Explicit, LevelLift, Predicate };

    static GridTreeSet explicit_set(Alphabet alpha, int depth, std::vector<PairWord> members) {
        GridTreeSet s(alpha, depth, Rep::Explicit);
        s.cells_.assign(static_cast<std::size_t>(depth) * static_cast<std::size_t>(depth), {});
        for (PairWord& p : members) {
            if (p.alphabet().size != alpha.size) throw std::invalid_argument("alphabet mismatch");
            auto [i, j] = p.level();
            if (i >= depth || j >= depth) throw std::invalid_argument("member exceeds set depth");
            s.cells_[s.cell_index(i, j)].push_back(std::move(p));
        }
        auto pair_lex = [](const PairWord& a, const PairWord& b) {
            if (a.first != b.first) return lex_less(a.first, b.first);
            return lex_less(a.second, b.second);
        };
        for (auto& cell : s.cells_) {
            std::sort(cell.begin(), cell.end(), pair_lex);
            cell.erase(std::unique(cell.begin(), cell.end()), cell.end());
        }
        return s;
    }

    static GridTreeSet level_lift(const GridSet& b, Alphabet alpha) {
        GridTreeSet s(alpha, b.size_bound(), Rep::LevelLift);
        s.lift_ = std::make_shared<GridSet>(b);
        return s;
    }

    static GridTreeSet predicate_set(Alphabet alpha, int depth,
                                     std::function<bool(const PairWord&)> pred, std::string name,
                                     std::uint64_t cost_per_query = 1) {
        GridTreeSet s(alpha, depth, Rep::Predicate);
        s.pred_ = std::move(pred);
        s.pred_name_ = std::move(name);
        s.pred_cost_ = cost_per_query;
        return s;
    }

    static GridTreeSet full(Alphabet alpha, int depth) {
        return level_lift(GridSet::full(depth), alpha);
    }

    static GridTreeSet empty(Alphabet alpha, int depth) {
        return level_lift(GridSet(depth, {}), alpha);
    }

    Alphabet alphabet() const { return alpha_; }
    int depth() const { return depth_; }
    Rep rep() const { return rep_; }
    const std::string& predicate_name() const { return pred_name_; }
    std::uint64_t predicate_cost() const { return pred_cost_; }
    const GridSet& lift() const {
        if (rep_ != Rep::LevelLift) throw std::logic_error("not a level-lift set");
        return *lift_;
    }

    bool contains(const PairWord& p) const {
        if (p.alphabet().size != alpha_.size) return false;
        auto [i, j] = p.level();
        if (i >= depth_ || j >= depth_) return false;
        switch (rep_) {
            case Rep::LevelLift:
                return lift_->contains(i, j);
            case Rep::Predicate:
                return pred_(p);
            case Rep::Explicit: {
                const auto& cell = cells_[cell_index(i, j)];
                auto pair_lex = [](const PairWord& a, const PairWord& b) {
                    if (a.first != b.first) return lex_less(a.first, b.first);
                    return lex_less(a.second, b.second);
                };
                return std::binary_search(cell.begin(), cell.end(), p, pair_lex);
            }
        }
        return false;
    }

    BigInt cell_count(int i, int j) const {
        if (i < 0 || j < 0 || i >= depth_ || j >= depth_) return 0;
        switch (rep_) {
            case Rep::LevelLift:
                return lift_->contains(i, j) ? pow_int(static_cast<std::uint64_t>(alpha_.size),
                                                       static_cast<std::uint64_t>(i + j))
                                             : BigInt(0);
            case Rep::Explicit:
                return BigInt(cells_[cell_index(i, j)].size());
            case Rep::Predicate: {
                require_within_cap(cell_size(i, j), "predicate cell enumeration");
                BigInt count = 0;
                for_each_in_cell(i, j, [&](const PairWord&) {
                    ++count;
                    return true;
                });
                return count;
            }
        }
        return 0;
    }

    /// Visits cell (i,j) members in (first, second) lexicographic order.
    template <class F>
    bool for_each_in_cell(int i, int j, F&& visit) const {
        return for_each_extension(Word(alpha_), Word(alpha_), i, j, std::forward<F>(visit));
    }

    /// Visits members (x,y) at levels (len1, len2) with the given prefixes,
    /// ordered lexicographically by (suffix of x, suffix of y).
    template <class F>
    bool for_each_extension(const Word& p1, const Word& p2, int len1, int len2, F&& visit) const {
        if (len1 < 0 || len2 < 0 || len1 >= depth_ || len2 >= depth_) return true;
        if (p1.length() > len1 || p2.length() > len2) return true;
        if (rep_ == Rep::Explicit) {
            const auto& cell = cells_[cell_index(len1, len2)];
            // cells are sorted by (first, second); the p1-extensions form a
            // contiguous range, p2 is filtered inside it
            auto cmp_prefix = [](const PairWord& m, const Word& p) {
                return std::lexicographical_compare(
                    m.first.letters().begin(),
                    m.first.letters().begin() +
                        std::min<std::size_t>(m.first.letters().size(), p.letters().size()),
                    p.letters().begin(), p.letters().end());
            };
            auto it = std::lower_bound(cell.begin(), cell.end(), p1, cmp_prefix);
            for (; it != cell.end() && is_descendent(it->first, p1); ++it) {
                if (!is_descendent(it->second, p2)) continue;
                if (!visit(*it)) return false;
            }
            return true;
        }
        if (rep_ == Rep::LevelLift && !lift_->contains(len1, len2)) return true;
        std::uint64_t count = checked_pow(static_cast<std::uint64_t>(alpha_.size),
                                          static_cast<std::uint64_t>((len1 - p1.length()) +
                                                                     (len2 - p2.length())),
                                          enumeration_cap());
        require_within_cap(count, "cell enumeration");
        bool keep_going = true;
        TreeSet shell1 = TreeSet::level_mask(alpha_, depth_, {len1});
        shell1.for_each_descendant_at(p1, len1, [&](const Word& x) {
            TreeSet shell2 = TreeSet::level_mask(alpha_, depth_, {len2});
            shell2.for_each_descendant_at(p2, len2, [&](const Word& y) {
                PairWord p(x, y);
                if (rep_ == Rep::Predicate && !pred_(p)) return true;
                if (!visit(p)) {
                    keep_going = false;
                    return false;
                }
                return true;
            });
            return keep_going;
        });
        return keep_going;
    }

    /// Total enumeration cost of one cell in the implicit representations.
    std::uint64_t cell_size(int i, int j) const {
        return checked_pow(static_cast<std::uint64_t>(alpha_.size),
                           static_cast<std::uint64_t>(i + j), enumeration_cap());
    }

    GridTreeSet to_explicit() const {
        std::vector<PairWord> members;
        for (int i = 0; i < depth_; ++i)
            for (int j = 0; j < depth_; ++j) {
                if (rep_ != Rep::Explicit) require_within_cap(cell_size(i, j), "set materialization");
                for_each_in_cell(i, j, [&](const PairWord& p) {
                    members.push_back(p);
                    return true;
                });
            }
        return explicit_set(alpha_, depth_, std::move(members));
    }

private:
    GridTreeSet(Alphabet alpha, int depth, Rep rep) : alpha_(alpha), depth_(depth), rep_(rep) {
        if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    }

    std::size_t cell_index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(depth_) +
               static_cast<std::size_t>(j);
    }

    Alphabet alpha_;
    int depth_;
    Rep rep_;
    std::vector<std::vector<PairWord>> cells_;
    std::shared_ptr<const GridSet> lift_;
    std::function<bool(const PairWord&)> pred_;
    std::string pred_name_;
    std::uint64_t pred_cost_ = 1;
};

/// d_N on the product: (1/N^2) sum over members of k^-(|x|+|y|).
inline Rational density_2d(const GridTreeSet& a) {
    Rational total = 0;
    int n = a.depth();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            BigInt count = a.cell_count(i, j);
            if (count != 0)
                total += Rational(count, pow_int(static_cast<std::uint64_t>(a.alphabet().size),
                                                 static_cast<std::uint64_t>(i + j)));
        }
    return total / (BigInt(n) * n);
}

/// The horizontal slice A_y = { x | (x,y) in A }.
inline TreeSet slice_at(const GridTreeSet& a, const Word& y) {
    if (y.alphabet_size() != a.alphabet().size) throw std::invalid_argument("alphabet mismatch");
    if (y.length() >= a.depth()) throw std::invalid_argument("slice word exceeds set depth");
    if (a.rep() == GridTreeSet::Rep::LevelLift) {
        std::vector<int> levels;
        for (int i = 0; i < a.depth(); ++i)
            if (a.lift().contains(i, y.length())) levels.push_back(i);
        return TreeSet::level_mask(a.alphabet(), a.depth(), levels);
    }
    std::vector<Word> members;
    if (a.rep() == GridTreeSet::Rep::Explicit) {
        for (int i = 0; i < a.depth(); ++i)
            a.for_each_extension(Word(a.alphabet()), y, i, y.length(), [&](const PairWord& p) {
                if (p.second == y) members.push_back(p.first);
                return true;
            });
    } else {
        for (int i = 0; i < a.depth(); ++i) {
            require_within_cap(checked_pow(static_cast<std::uint64_t>(a.alphabet().size),
                                           static_cast<std::uint64_t>(i), enumeration_cap()),
                               "predicate slice");
            TreeSet shell = TreeSet::level_mask(a.alphabet(), a.depth(), {i});
            shell.for_each_descendant_at(Word(a.alphabet()), i, [&](const Word& x) {
                if (a.contains(PairWord(x, y))) members.push_back(x);
                return true;
            });
        }
    }
    return TreeSet::explicit_set(a.alphabet(), a.depth(), std::move(members));
}

inline GridTreeSet level_lift(const GridSet& b, Alphabet alpha) {
    return GridTreeSet::level_lift(b, alpha);
}

/// Seeded Bernoulli sample over the whole depth-N grid of words: every
/// element is included independently with probability delta.
inline GridTreeSet random_grid_set(Alphabet alpha, int depth, const Rational& delta,
                                   std::uint64_t seed) {
    if (delta < 0 || delta > 1) throw std::invalid_argument("delta must be in [0,1]");
    std::uint64_t side = ball_size(alpha.size, depth - 1);
    require_within_cap(checked_pow(side, 2, enumeration_cap()), "random grid set");
    GridTreeSet everything = GridTreeSet::full(alpha, depth);
    KeyedRng rng(seed, 0x7472656552616d73ull);
    std::vector<PairWord> members;
    for (int i = 0; i < depth; ++i)
        for (int j = 0; j < depth; ++j)
            everything.for_each_in_cell(i, j, [&](const PairWord& p) {
                if (rng.bernoulli(delta)) members.push_back(p);
                return true;
            });
    return GridTreeSet::explicit_set(alpha, depth, std::move(members));
}

/// Seeded Bernoulli sample over the 1-dimensional depth-N tree.
inline TreeSet random_tree_set(Alphabet alpha, int depth, const Rational& delta,
                               std::uint64_t seed) {
    if (delta < 0 || delta > 1) throw std::invalid_argument("delta must be in [0,1]");
    require_within_cap(ball_size(alpha.size, depth - 1), "random tree set");
    TreeSet everything = TreeSet::full(alpha, depth);
    KeyedRng rng(seed, 0x31645472656554ull);
    std::vector<Word> members;
    everything.for_each_member([&](const Word& w) {
        if (rng.bernoulli(delta)) members.push_back(w);
        return true;
    });
    return TreeSet::explicit_set(alpha, depth, std::move(members));
}

}  // namespace treeramsey
