#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "treeramsey/rational.hpp"
#include "treeramsey/rng.hpp"
#include "treeramsey/sets.hpp"
#include "treeramsey/words.hpp"

namespace treeramsey {

using StateFunction = std::vector<Rational>;
using StateSet = std::vector<bool>;

/// A finite-state system with one transition map and one probability
/// function per letter; the probabilities at each state sum to 1.
class FiniteMarkovSystem {
public:
    FiniteMarkovSystem(Alphabet alpha, int states, std::vector<std::vector<int>> transitions,
                       std::vector<std::vector<Rational>> probabilities)
        : alpha_(alpha), states_(states), trans_(std::move(transitions)), prob_(std::move(probabilities)) {
        if (states < 1) throw std::invalid_argument("state count must be >= 1");
        if (trans_.size() != static_cast<std::size_t>(alpha.size) ||
            prob_.size() != static_cast<std::size_t>(alpha.size))
            throw std::invalid_argument("need one transition map and one probability row per letter");
        for (int l = 0; l < alpha.size; ++l) {
            if (trans_[static_cast<std::size_t>(l)].size() != static_cast<std::size_t>(states) ||
                prob_[static_cast<std::size_t>(l)].size() != static_cast<std::size_t>(states))
                throw std::invalid_argument("transition/probability row has wrong length");
            for (int x = 0; x < states; ++x) {
                int t = trans_[static_cast<std::size_t>(l)][static_cast<std::size_t>(x)];
                if (t < 0 || t >= states) throw std::invalid_argument("transition target out of range");
                const Rational& p = prob_[static_cast<std::size_t>(l)][static_cast<std::size_t>(x)];
                if (p < 0 || p > 1) throw std::invalid_argument("probability out of [0,1]");
            }
        }
        for (int x = 0; x < states; ++x) {
            Rational sum = 0;
            for (int l = 0; l < alpha.size; ++l)
                sum += prob_[static_cast<std::size_t>(l)][static_cast<std::size_t>(x)];
            if (sum != 1)
                throw std::invalid_argument("probabilities at state " + std::to_string(x) +
                                            " sum to " + rational_to_string(sum) + ", not 1");
        }
    }

    Alphabet alphabet() const { return alpha_; }
    int state_count() const { return states_; }
    int transition(int letter, int state) const {
        return trans_[static_cast<std::size_t>(letter)][static_cast<std::size_t>(state)];
    }
    const Rational& probability(int letter, int state) const {
        return prob_[static_cast<std::size_t>(letter)][static_cast<std::size_t>(state)];
    }

    /// The image set T_letter(M).
    StateSet image_set(int letter) const {
        StateSet out(static_cast<std::size_t>(states_), false);
        for (int x = 0; x < states_; ++x)
            out[static_cast<std::size_t>(transition(letter, x))] = true;
        return out;
    }

    bool non_degenerate() const {
        for (int l = 0; l < alpha_.size; ++l) {
            bool some = false;
            for (int x = 0; x < states_ && !some; ++x) some = probability(l, x) > 0;
            if (!some) return false;
        }
        return true;
    }

    bool disjoint_images() const {
        std::vector<int> owner(static_cast<std::size_t>(states_), -1);
        for (int l = 0; l < alpha_.size; ++l)
            for (int x = 0; x < states_; ++x) {
                int t = transition(l, x);
                if (owner[static_cast<std::size_t>(t)] == -1)
                    owner[static_cast<std::size_t>(t)] = l;
                else if (owner[static_cast<std::size_t>(t)] != l)
                    return false;
            }
        return true;
    }

    bool constant_probabilities() const {
        for (int l = 0; l < alpha_.size; ++l)
            for (int x = 1; x < states_; ++x)
                if (probability(l, x) != probability(l, 0)) return false;
        return true;
    }

    /// Endomorphic with respect to the candidate section S: wherever a
    /// letter has positive probability, S undoes its transition.
    bool is_endomorphic_with(const std::vector<int>& section) const {
        if (section.size() != static_cast<std::size_t>(states_))
            throw std::invalid_argument("section has wrong length");
        for (int l = 0; l < alpha_.size; ++l)
            for (int x = 0; x < states_; ++x)
                if (probability(l, x) > 0 &&
                    section[static_cast<std::size_t>(transition(l, x))] != x)
                    return false;
        return true;
    }

private:
    Alphabet alpha_;
    int states_;
    std::vector<std::vector<int>> trans_;
    std::vector<std::vector<Rational>> prob_;
};

/// (Pf)(x) = sum over letters of p_l(x) f(T_l x), evaluated exactly.
inline StateFunction markov_apply(const FiniteMarkovSystem& sys, const StateFunction& f) {
    if (f.size() != static_cast<std::size_t>(sys.state_count()))
        throw std::invalid_argument("state function has wrong dimension");
    StateFunction out(f.size(), Rational(0));
    for (int x = 0; x < sys.state_count(); ++x) {
        Rational acc = 0;
        for (int l = 0; l < sys.alphabet().size; ++l) {
            const Rational& p = sys.probability(l, x);
            if (p != 0) acc += p * f[static_cast<std::size_t>(sys.transition(l, x))];
        }
        out[static_cast<std::size_t>(x)] = acc;
    }
    return out;
}

inline StateFunction markov_apply_power(const FiniteMarkovSystem& sys, StateFunction f, int times) {
    for (int i = 0; i < times; ++i) f = markov_apply(sys, f);
    return f;
}

struct PairReport {
    bool same_shape = false;
    bool commuting = false;
    bool non_degenerate_first = false;
    bool non_degenerate_second = false;
    bool disjoint_images_first = false;
    bool disjoint_images_second = false;
    bool constant_probabilities_first = false;
    bool constant_probabilities_second = false;

    bool non_degenerate() const { return non_degenerate_first && non_degenerate_second; }
    bool disjoint_images() const { return disjoint_images_first && disjoint_images_second; }
    bool constant_probabilities() const {
        return constant_probabilities_first && constant_probabilities_second;
    }
    bool all() const {
        return same_shape && commuting && non_degenerate() && disjoint_images() &&
               constant_probabilities();
    }
};

/// Two systems on one state space whose transition maps commute across
/// systems; commutation is validated at construction.
class CommutingPair {
public:
    CommutingPair(FiniteMarkovSystem first, FiniteMarkovSystem second)
        : first_(std::move(first)), second_(std::move(second)) {
        PairReport r = analyze(first_, second_);
        if (!r.same_shape)
            throw std::invalid_argument("systems must share one state space and alphabet");
        if (!r.commuting) throw std::invalid_argument("transition maps do not commute");
    }

    static PairReport analyze(const FiniteMarkovSystem& a, const FiniteMarkovSystem& b) {
        PairReport r;
        r.same_shape = a.state_count() == b.state_count() && a.alphabet() == b.alphabet();
        if (!r.same_shape) return r;
        r.commuting = true;
        for (int l = 0; r.commuting && l < a.alphabet().size; ++l)
            for (int m = 0; r.commuting && m < b.alphabet().size; ++m)
                for (int x = 0; r.commuting && x < a.state_count(); ++x)
                    r.commuting = a.transition(l, b.transition(m, x)) ==
                                  b.transition(m, a.transition(l, x));
        r.non_degenerate_first = a.non_degenerate();
        r.non_degenerate_second = b.non_degenerate();
        r.disjoint_images_first = a.disjoint_images();
        r.disjoint_images_second = b.disjoint_images();
        r.constant_probabilities_first = a.constant_probabilities();
        r.constant_probabilities_second = b.constant_probabilities();
        return r;
    }

    const FiniteMarkovSystem& first() const { return first_; }
    const FiniteMarkovSystem& second() const { return second_; }
    Alphabet alphabet() const { return first_.alphabet(); }
    int state_count() const { return first_.state_count(); }
    PairReport report() const { return analyze(first_, second_); }

private:
    FiniteMarkovSystem first_;
    FiniteMarkovSystem second_;
};

/// Full structural report on a pair of systems (no commutation required).
inline PairReport validate_pair(const FiniteMarkovSystem& a, const FiniteMarkovSystem& b) {
    return CommutingPair::analyze(a, b);
}
inline PairReport validate_pair(const CommutingPair& pair) { return pair.report(); }

namespace detail {

inline StateSet step_all(const FiniteMarkovSystem& sys, const StateSet& from) {
    StateSet out(from.size(), false);
    for (int x = 0; x < sys.state_count(); ++x) {
        if (!from[static_cast<std::size_t>(x)]) continue;
        for (int l = 0; l < sys.alphabet().size; ++l)
            if (sys.probability(l, x) > 0)
                out[static_cast<std::size_t>(sys.transition(l, x))] = true;
    }
    return out;
}

inline StateSet step_all_times(const FiniteMarkovSystem& sys, StateSet from, long long times) {
    for (long long i = 0; i < times; ++i) from = step_all(sys, from);
    return from;
}

}  // namespace detail

/// Endpoints of positive-probability paths of the given length whose first
/// step carries the given letter; length 0 is the start state itself with
/// no direction constraint.
inline std::vector<int> reachable_endpoints(const FiniteMarkovSystem& sys, int start, int length,
                                            int direction) {
    if (start < 0 || start >= sys.state_count()) throw std::invalid_argument("state out of range");
    if (length < 0) throw std::invalid_argument("length must be >= 0");
    if (length == 0) return {start};
    if (direction < 0 || direction >= sys.alphabet().size)
        throw std::invalid_argument("direction out of range");
    StateSet frontier(static_cast<std::size_t>(sys.state_count()), false);
    if (sys.probability(direction, start) > 0)
        frontier[static_cast<std::size_t>(sys.transition(direction, start))] = true;
    frontier = detail::step_all_times(sys, std::move(frontier), length - 1);
    std::vector<int> out;
    for (int x = 0; x < sys.state_count(); ++x)
        if (frontier[static_cast<std::size_t>(x)]) out.push_back(x);
    return out;
}

namespace detail {

inline void require_phi_preconditions(const CommutingPair& pair) {
    PairReport r = pair.report();
    if (!r.disjoint_images())
        throw std::invalid_argument("recurrence functions need disjoint images in both systems");
    if (!r.non_degenerate())
        throw std::invalid_argument("recurrence functions need non-degenerate systems");
}

inline StateFunction indicator(const StateSet& s) {
    StateFunction f(s.size(), Rational(0));
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i]) f[i] = 1;
    return f;
}

inline void require_increments(std::array<long long, 2> u, std::array<long long, 2> v, int n,
                               int r) {
    if (u[0] < 1 || u[1] < 1 || v[0] < 1 || v[1] < 1)
        throw std::invalid_argument("increments must be strictly positive");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (r < 1) throw std::invalid_argument("order must be >= 1");
}

}  // namespace detail

/// The recurrence functions: level 1 multiplies the set indicator by the
/// one-step hitting masses of every image set; each further level inserts
/// the operator powers prescribed by the increments between the indicator
/// factors and the previous level.
inline StateFunction compute_phi_r(const CommutingPair& pair, const StateSet& a,
                                   std::array<long long, 2> u, std::array<long long, 2> v, int n,
                                   int r) {
    detail::require_phi_preconditions(pair);
    detail::require_increments(u, v, n, r);
    if (a.size() != static_cast<std::size_t>(pair.state_count()))
        throw std::invalid_argument("state set has wrong dimension");

    const FiniteMarkovSystem& p1 = pair.first();
    const FiniteMarkovSystem& p2 = pair.second();
    int k = pair.alphabet().size;

    StateFunction ind_a = detail::indicator(a);
    std::vector<StateFunction> ind_b, ind_c;
    for (int l = 0; l < k; ++l) {
        ind_b.push_back(detail::indicator(p1.image_set(l)));
        ind_c.push_back(detail::indicator(p2.image_set(l)));
    }

    auto pointwise = [](StateFunction& acc, const StateFunction& f) {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] *= f[i];
    };

    StateFunction phi = ind_a;
    for (int l = 0; l < k; ++l) {
        pointwise(phi, markov_apply(p1, ind_b[static_cast<std::size_t>(l)]));
        pointwise(phi, markov_apply(p2, ind_c[static_cast<std::size_t>(l)]));
    }

    for (int level = 2; level <= r; ++level) {
        // operator powers compose right to left: the inner power acts first
        StateFunction via_x = markov_apply_power(
            p1, markov_apply_power(p2, phi, static_cast<int>(u[1] * n)),
            static_cast<int>(u[0] * n - 1));
        StateFunction via_y = markov_apply_power(
            p1, markov_apply_power(p2, phi, static_cast<int>(v[1] * n - 1)),
            static_cast<int>(v[0] * n));
        StateFunction next = ind_a;
        for (int l = 0; l < k; ++l) {
            StateFunction bx = ind_b[static_cast<std::size_t>(l)];
            pointwise(bx, via_x);
            pointwise(next, markov_apply(p1, bx));
            StateFunction cy = ind_c[static_cast<std::size_t>(l)];
            pointwise(cy, via_y);
            pointwise(next, markov_apply(p2, cy));
        }
        phi = std::move(next);
    }
    return phi;
}

/// States that root an order-r product tree in the pair, by direct
/// unfolding of the path conditions with memoization on (state, depth):
/// an X-edge needs a system-1 path of length n*u1 with the edge's initial
/// direction followed by a system-2 path of length n*u2 into a smaller
/// root; a Y-edge starts in system 2 (length n*v2, directed) and finishes
/// in system 1 (length n*v1).
inline std::vector<int> roots_by_search(const CommutingPair& pair, const StateSet& a,
                                        std::array<long long, 2> u, std::array<long long, 2> v,
                                        int n, int r) {
    detail::require_phi_preconditions(pair);
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (r < 0) throw std::invalid_argument("order must be >= 0");
    if (u[0] < 1 || u[1] < 1 || v[0] < 1 || v[1] < 1)
        throw std::invalid_argument("increments must be strictly positive");
    if (a.size() != static_cast<std::size_t>(pair.state_count()))
        throw std::invalid_argument("state set has wrong dimension");

    const FiniteMarkovSystem& p1 = pair.first();
    const FiniteMarkovSystem& p2 = pair.second();
    int m = pair.state_count();
    int k = pair.alphabet().size;

    // per-state, per-letter reachability of one tree edge
    auto edge_targets = [&](const FiniteMarkovSystem& lead, const FiniteMarkovSystem& follow,
                            long long lead_len, long long follow_len) {
        std::vector<std::vector<StateSet>> out(
            static_cast<std::size_t>(m),
            std::vector<StateSet>(static_cast<std::size_t>(k)));
        for (int x = 0; x < m; ++x)
            for (int l = 0; l < k; ++l) {
                StateSet s(static_cast<std::size_t>(m), false);
                if (lead.probability(l, x) > 0)
                    s[static_cast<std::size_t>(lead.transition(l, x))] = true;
                s = detail::step_all_times(lead, std::move(s), lead_len - 1);
                s = detail::step_all_times(follow, std::move(s), follow_len);
                out[static_cast<std::size_t>(x)][static_cast<std::size_t>(l)] = std::move(s);
            }
        return out;
    };
    auto x_edges = edge_targets(p1, p2, u[0] * n, u[1] * n);
    auto y_edges = edge_targets(p2, p1, v[1] * n, v[0] * n);

    std::vector<StateSet> is_root(static_cast<std::size_t>(r) + 1,
                                  StateSet(static_cast<std::size_t>(m), false));
    for (int x = 0; x < m; ++x) is_root[0][static_cast<std::size_t>(x)] = a[static_cast<std::size_t>(x)];
    for (int d = 1; d <= r; ++d)
        for (int x = 0; x < m; ++x) {
            if (!a[static_cast<std::size_t>(x)]) continue;
            bool ok = true;
            for (int l = 0; ok && l < k; ++l) {
                auto hits = [&](const StateSet& targets) {
                    for (int y = 0; y < m; ++y)
                        if (targets[static_cast<std::size_t>(y)] &&
                            is_root[static_cast<std::size_t>(d) - 1][static_cast<std::size_t>(y)])
                            return true;
                    return false;
                };
                ok = hits(x_edges[static_cast<std::size_t>(x)][static_cast<std::size_t>(l)]) &&
                     hits(y_edges[static_cast<std::size_t>(x)][static_cast<std::size_t>(l)]);
            }
            is_root[static_cast<std::size_t>(d)][static_cast<std::size_t>(x)] = ok;
        }

    std::vector<int> out;
    for (int x = 0; x < m; ++x)
        if (is_root[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)]) out.push_back(x);
    return out;
}

/// Finite truncation of the labelled-tree dynamics: a state is a pair of
/// offset buffers (words up to the horizon) plus the last letter written
/// on each axis. Writes saturate at the horizon. The per-axis letter
/// component makes both systems' images disjoint; probabilities are the
/// uniform 1/k.
inline CommutingPair labelled_tree_truncation_pair(Alphabet alpha, int horizon) {
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    std::vector<Word> offsets = enumerate_ball(alpha, horizon);
    int b = static_cast<int>(offsets.size());
    int k = alpha.size;
    int m = b * b * k * k;

    std::map<Word, int, WordLexLess> offset_index;
    for (int i = 0; i < b; ++i) offset_index.emplace(offsets[static_cast<std::size_t>(i)], i);

    auto encode = [&](int o1, int o2, int l1, int l2) {
        return ((o1 * b + o2) * k + l1) * k + l2;
    };

    std::vector<std::vector<int>> t1(static_cast<std::size_t>(k),
                                     std::vector<int>(static_cast<std::size_t>(m)));
    std::vector<std::vector<int>> t2 = t1;
    std::vector<std::vector<Rational>> prob(
        static_cast<std::size_t>(k),
        std::vector<Rational>(static_cast<std::size_t>(m), Rational(1, k)));

    for (int o1 = 0; o1 < b; ++o1)
        for (int o2 = 0; o2 < b; ++o2)
            for (int l1 = 0; l1 < k; ++l1)
                for (int l2 = 0; l2 < k; ++l2) {
                    int x = encode(o1, o2, l1, l2);
                    for (int l = 0; l < k; ++l) {
                        const Word& w1 = offsets[static_cast<std::size_t>(o1)];
                        const Word& w2 = offsets[static_cast<std::size_t>(o2)];
                        int n1 = w1.length() < horizon
                                     ? offset_index.at(w1.extended(static_cast<Letter>(l)))
                                     : o1;
                        int n2 = w2.length() < horizon
                                     ? offset_index.at(w2.extended(static_cast<Letter>(l)))
                                     : o2;
                        t1[static_cast<std::size_t>(l)][static_cast<std::size_t>(x)] =
                            encode(n1, o2, l, l2);
                        t2[static_cast<std::size_t>(l)][static_cast<std::size_t>(x)] =
                            encode(o1, n2, l1, l);
                    }
                }

    FiniteMarkovSystem s1(alpha, m, std::move(t1), prob);
    FiniteMarkovSystem s2(alpha, m, std::move(t2), std::move(prob));
    return CommutingPair(std::move(s1), std::move(s2));
}

/// One orbit point of the labelled-tree process over a fixed base set:
/// the shifted indicator is represented by its offset, together with the
/// last letter written on each axis. Actions past the horizon are
/// rejected rather than wrapped.
class LabelledTreeFrame {
public:
    explicit LabelledTreeFrame(const GridTreeSet& base, int horizon = -1)
        : base_(&base),
          offset_(identity_pair(base.alphabet())),
          horizon_(horizon < 0 ? 2 * base.depth() : horizon) {}

    void act_x(const Word& w) {
        if (w.alphabet_size() != base_->alphabet().size) throw std::invalid_argument("alphabet mismatch");
        if (w.empty()) return;
        if (offset_.first.length() + w.length() > horizon_)
            throw std::out_of_range("frame action exceeds the horizon");
        offset_ = PairWord(concat(offset_.first, w), offset_.second);
        label1_ = w.last();
    }

    void act_y(const Word& w) {
        if (w.alphabet_size() != base_->alphabet().size) throw std::invalid_argument("alphabet mismatch");
        if (w.empty()) return;
        if (offset_.second.length() + w.length() > horizon_)
            throw std::out_of_range("frame action exceeds the horizon");
        offset_ = PairWord(offset_.first, concat(offset_.second, w));
        label2_ = w.last();
    }

    /// The event "root label is 1": the shifted indicator evaluates to 1
    /// at the origin, i.e. the offset is a member of the base set.
    bool in_event() const { return base_->contains(offset_); }

    const PairWord& offset() const { return offset_; }
    std::pair<Letter, Letter> labels() const { return {label1_, label2_}; }
    int horizon() const { return horizon_; }

private:
    const GridTreeSet* base_;
    PairWord offset_;
    Letter label1_ = 0;  // arbitrary initial labels
    Letter label2_ = 0;
    int horizon_;
};

/// The Cesaro average of the pushforwards of the point mass, evaluated on
/// the root-label event by walking frames along every pair of words up to
/// length N-1. Independent of the weight-summation route through the
/// density functional; their equality is a theorem, asserted in tests,
/// not assumed here.
inline Rational mu_N_exact(const GridTreeSet& a, int n) {
    if (n < 1) throw std::invalid_argument("N must be >= 1");
    std::uint64_t side = ball_size(a.alphabet().size, n - 1);
    require_within_cap(checked_pow(side, 2, enumeration_cap()), "exact measure evaluation");

    Rational total = 0;
    std::vector<Word> words = enumerate_ball(a.alphabet(), n - 1);
    for (const Word& w1 : words)
        for (const Word& w2 : words) {
            LabelledTreeFrame frame(a, 2 * n);
            frame.act_x(w1);
            frame.act_y(w2);
            if (frame.in_event())
                total += inv_pow(static_cast<std::uint64_t>(a.alphabet().size),
                                 static_cast<std::uint64_t>(w1.length() + w2.length()));
        }
    return total / (BigInt(n) * n);
}

struct MonteCarloEstimate {
    Rational estimate;  // hits / samples, exact
    double standard_error;
    std::uint64_t hits;
    std::uint64_t samples;
};

/// Uniform sampling of the Cesaro average: a random cell, then a uniform
/// word per axis, applied through frame actions. Draws are keyed by
/// (seed, sample index), so the result does not depend on how samples are
/// split across workers.
inline MonteCarloEstimate mu_N_monte_carlo(const GridTreeSet& a, int n, std::uint64_t samples,
                                           std::uint64_t seed, int workers = 1) {
    if (n < 1) throw std::invalid_argument("N must be >= 1");
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    int k = a.alphabet().size;

    auto run_chunk = [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t hits = 0;
        for (std::uint64_t s = begin; s < end; ++s) {
            KeyedRng rng(seed, s);
            int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            std::vector<Letter> w1(static_cast<std::size_t>(i)), w2(static_cast<std::size_t>(j));
            for (auto& l : w1) l = static_cast<Letter>(rng.below(static_cast<std::uint64_t>(k)));
            for (auto& l : w2) l = static_cast<Letter>(rng.below(static_cast<std::uint64_t>(k)));
            LabelledTreeFrame frame(a, 2 * n);
            frame.act_x(Word(a.alphabet(), std::move(w1)));
            frame.act_y(Word(a.alphabet(), std::move(w2)));
            if (frame.in_event()) ++hits;
        }
        return hits;
    };

    std::uint64_t hits = 0;
    workers = std::max(1, workers);
    if (workers == 1) {
        hits = run_chunk(0, samples);
    } else {
        std::vector<std::uint64_t> partial(static_cast<std::size_t>(workers), 0);
        std::vector<std::thread> pool;
        std::uint64_t chunk = (samples + static_cast<std::uint64_t>(workers) - 1) /
                              static_cast<std::uint64_t>(workers);
        for (int t = 0; t < workers; ++t) {
            std::uint64_t begin = chunk * static_cast<std::uint64_t>(t);
            std::uint64_t end = std::min(samples, begin + chunk);
            pool.emplace_back([&, t, begin, end] { partial[static_cast<std::size_t>(t)] = run_chunk(begin, end); });
        }
        for (auto& th : pool) th.join();
        for (std::uint64_t h : partial) hits += h;
    }

    Rational est{BigInt(hits), BigInt(samples)};
    double p = rational_to_double(est);
    double stderr_value = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    return MonteCarloEstimate{est, stderr_value, hits, samples};
}

}  // namespace treeramsey
