#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "treeramsey/core.hpp"

namespace treeramsey {

/// The finite alphabet; letters are 0 .. size-1.
struct Alphabet {
    int size;

    explicit Alphabet(int k) : size(k) {
        if (k < 1) throw std::invalid_argument("alphabet size must be >= 1");
        if (k > 16) throw std::invalid_argument("alphabets above 16 letters are unsupported");
    }
    friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

using Letter = std::uint8_t;

/// A word of the free semigroup over its alphabet; the empty word is the
/// identity. Immutable value type.
class Word {
public:
    explicit Word(Alphabet alpha) : k_(alpha.size) {}
    Word(Alphabet alpha, std::vector<Letter> letters) : k_(alpha.size), letters_(std::move(letters)) {
        for (Letter l : letters_)
            if (l >= k_) throw std::invalid_argument("letter out of alphabet range");
    }

    Alphabet alphabet() const { return Alphabet(k_); }
    int alphabet_size() const { return k_; }
    int length() const { return static_cast<int>(letters_.size()); }
    bool empty() const { return letters_.empty(); }
    Letter letter(int i) const { return letters_[static_cast<std::size_t>(i)]; }
    Letter last() const { return letters_.back(); }
    const std::vector<Letter>& letters() const { return letters_; }

    Word extended(Letter l) const {
        Word w = *this;
        if (l >= k_) throw std::invalid_argument("letter out of alphabet range");
        w.letters_.push_back(l);
        return w;
    }

    friend bool operator==(const Word& a, const Word& b) {
        return a.k_ == b.k_ && a.letters_ == b.letters_;
    }

private:
    int k_;
    std::vector<Letter> letters_;
};

inline void require_same_alphabet(const Word& a, const Word& b) {
    if (a.alphabet_size() != b.alphabet_size())
        throw std::invalid_argument("alphabet mismatch");
}

/// Dictionary order: a proper prefix precedes its extensions.
inline bool lex_less(const Word& a, const Word& b) {
    return std::lexicographical_compare(a.letters().begin(), a.letters().end(),
                                        b.letters().begin(), b.letters().end());
}

/// Length first, then dictionary order.
inline bool shortlex_less(const Word& a, const Word& b) {
    if (a.length() != b.length()) return a.length() < b.length();
    return lex_less(a, b);
}

struct WordLexLess {
    bool operator()(const Word& a, const Word& b) const { return lex_less(a, b); }
};
struct WordShortlexLess {
    bool operator()(const Word& a, const Word& b) const { return shortlex_less(a, b); }
};

/// Semigroup product: w followed by u.
inline Word concat(const Word& w, const Word& u) {
    require_same_alphabet(w, u);
    std::vector<Letter> letters = w.letters();
    letters.insert(letters.end(), u.letters().begin(), u.letters().end());
    return Word(w.alphabet(), std::move(letters));
}

/// When wp = w.t for some t, returns that quotient t; otherwise nothing.
/// Every word descends from itself with t = empty.
inline std::optional<Word> is_descendent(const Word& wp, const Word& w) {
    require_same_alphabet(wp, w);
    if (w.length() > wp.length()) return std::nullopt;
    if (!std::equal(w.letters().begin(), w.letters().end(), wp.letters().begin()))
        return std::nullopt;
    std::vector<Letter> tail(wp.letters().begin() + w.length(), wp.letters().end());
    return Word(wp.alphabet(), std::move(tail));
}

/// All words of length exactly r, lexicographic; count k^r.
inline std::vector<Word> enumerate_sphere(Alphabet alpha, int r) {
    if (r < 0) throw std::invalid_argument("sphere radius must be >= 0");
    std::uint64_t count =
        checked_pow(static_cast<std::uint64_t>(alpha.size), static_cast<std::uint64_t>(r),
                    enumeration_cap());
    require_within_cap(count, "sphere of radius " + std::to_string(r));
    std::vector<Word> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<Letter> digits(static_cast<std::size_t>(r), 0);
    for (;;) {
        out.emplace_back(alpha, digits);
        int pos = r - 1;
        while (pos >= 0 && digits[static_cast<std::size_t>(pos)] == alpha.size - 1) {
            digits[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++digits[static_cast<std::size_t>(pos)];
    }
    return out;
}

/// All words of length at most r, shortlex.
inline std::vector<Word> enumerate_ball(Alphabet alpha, int r) {
    std::vector<Word> out;
    for (int i = 0; i <= r; ++i) {
        std::vector<Word> sphere = enumerate_sphere(alpha, i);
        require_within_cap(out.size() + sphere.size(), "ball of radius " + std::to_string(r));
        out.insert(out.end(), sphere.begin(), sphere.end());
    }
    return out;
}

inline std::uint64_t ball_size(int k, int r) {
    std::uint64_t total = 0;
    for (int i = 0; i <= r; ++i) {
        std::uint64_t s = checked_pow(static_cast<std::uint64_t>(k),
                                      static_cast<std::uint64_t>(i), enumeration_cap());
        require_within_cap(s, "ball");
        total += s;
        require_within_cap(total, "ball");
    }
    return total;
}

/// An element of the direct sum: a pair of words multiplied coordinatewise.
struct PairWord {
    Word first;
    Word second;

    PairWord(Word f, Word s) : first(std::move(f)), second(std::move(s)) {
        require_same_alphabet(first, second);
    }
    Alphabet alphabet() const { return first.alphabet(); }
    std::pair<int, int> level() const { return {first.length(), second.length()}; }

    friend bool operator==(const PairWord&, const PairWord&) = default;
};

inline PairWord identity_pair(Alphabet alpha) { return PairWord(Word(alpha), Word(alpha)); }

inline PairWord concat(const PairWord& a, const PairWord& b) {
    return PairWord(concat(a.first, b.first), concat(a.second, b.second));
}

inline std::optional<PairWord> is_descendent(const PairWord& wp, const PairWord& w) {
    auto t1 = is_descendent(wp.first, w.first);
    if (!t1) return std::nullopt;
    auto t2 = is_descendent(wp.second, w.second);
    if (!t2) return std::nullopt;
    return PairWord(*std::move(t1), *std::move(t2));
}

/// Levels (lex) first, then both coordinates lexicographically. The
/// canonical enumeration order for members of grid sets.
inline bool pair_level_lex_less(const PairWord& a, const PairWord& b) {
    auto la = a.level(), lb = b.level();
    if (la != lb) return la < lb;
    if (a.first != b.first) return lex_less(a.first, b.first);
    return lex_less(a.second, b.second);
}

struct PairWordLevelLexLess {
    bool operator()(const PairWord& a, const PairWord& b) const {
        return pair_level_lex_less(a, b);
    }
};

/// One generator of the free product: X_letter (axis 0) or Y_letter (axis 1).
struct GenToken {
    std::uint8_t axis;  // 0 = X, 1 = Y
    Letter letter;

    friend bool operator==(const GenToken&, const GenToken&) = default;
    friend auto operator<=>(const GenToken& a, const GenToken& b) {
        if (a.axis != b.axis) return a.axis <=> b.axis;
        return a.letter <=> b.letter;
    }
};

/// A word of the free product: a sequence of X/Y generators. Unlike a
/// PairWord it remembers the interleaving, so it addresses vertices of the
/// acyclic cover of the product of two trees.
class FreeWord {
public:
    explicit FreeWord(Alphabet alpha) : k_(alpha.size) {}
    FreeWord(Alphabet alpha, std::vector<GenToken> tokens) : k_(alpha.size), tokens_(std::move(tokens)) {
        for (const GenToken& t : tokens_) {
            if (t.axis > 1) throw std::invalid_argument("bad generator axis");
            if (t.letter >= k_) throw std::invalid_argument("letter out of alphabet range");
        }
    }

    Alphabet alphabet() const { return Alphabet(k_); }
    int alphabet_size() const { return k_; }
    int length() const { return static_cast<int>(tokens_.size()); }
    bool empty() const { return tokens_.empty(); }
    const std::vector<GenToken>& tokens() const { return tokens_; }

    /// (#X tokens, #Y tokens).
    std::pair<int, int> level() const {
        int x = 0;
        for (const GenToken& t : tokens_) x += (t.axis == 0);
        return {x, length() - x};
    }

    FreeWord extended(GenToken t) const {
        FreeWord w = *this;
        if (t.axis > 1 || t.letter >= k_) throw std::invalid_argument("bad generator");
        w.tokens_.push_back(t);
        return w;
    }

    friend bool operator==(const FreeWord& a, const FreeWord& b) {
        return a.k_ == b.k_ && a.tokens_ == b.tokens_;
    }

private:
    int k_;
    std::vector<GenToken> tokens_;
};

inline FreeWord concat(const FreeWord& a, const FreeWord& b) {
    if (a.alphabet_size() != b.alphabet_size()) throw std::invalid_argument("alphabet mismatch");
    std::vector<GenToken> tokens = a.tokens();
    tokens.insert(tokens.end(), b.tokens().begin(), b.tokens().end());
    return FreeWord(a.alphabet(), std::move(tokens));
}

inline bool free_lex_less(const FreeWord& a, const FreeWord& b) {
    return std::lexicographical_compare(a.tokens().begin(), a.tokens().end(),
                                        b.tokens().begin(), b.tokens().end());
}

/// Length first, then token order with X before Y. The canonical address
/// order for product-tree witnesses.
inline bool free_shortlex_less(const FreeWord& a, const FreeWord& b) {
    if (a.length() != b.length()) return a.length() < b.length();
    return free_lex_less(a, b);
}

struct FreeWordShortlexLess {
    bool operator()(const FreeWord& a, const FreeWord& b) const {
        return free_shortlex_less(a, b);
    }
};

/// All 2k generators in canonical order X_0..X_{k-1}, Y_0..Y_{k-1}.
inline std::vector<GenToken> generator_tokens(Alphabet alpha) {
    std::vector<GenToken> out;
    out.reserve(static_cast<std::size_t>(2 * alpha.size));
    for (std::uint8_t axis = 0; axis <= 1; ++axis)
        for (int l = 0; l < alpha.size; ++l)
            out.push_back(GenToken{axis, static_cast<Letter>(l)});
    return out;
}

/// All free-product words of length <= r, shortlex; count sum_{i<=r} (2k)^i.
inline std::vector<FreeWord> enumerate_free_ball(Alphabet alpha, int r) {
    if (r < 0) throw std::invalid_argument("ball radius must be >= 0");
    std::uint64_t gens = static_cast<std::uint64_t>(2 * alpha.size);
    std::uint64_t total = 0;
    for (int i = 0; i <= r; ++i) {
        std::uint64_t layer = checked_pow(gens, static_cast<std::uint64_t>(i), enumeration_cap());
        require_within_cap(layer, "free ball");
        total += layer;
        require_within_cap(total, "free ball of radius " + std::to_string(r));
    }
    std::vector<FreeWord> out;
    out.reserve(static_cast<std::size_t>(total));
    out.emplace_back(alpha);
    std::size_t layer_begin = 0;
    std::vector<GenToken> gen = generator_tokens(alpha);
    for (int i = 1; i <= r; ++i) {
        std::size_t layer_end = out.size();
        for (std::size_t j = layer_begin; j < layer_end; ++j)
            for (const GenToken& t : gen) out.push_back(out[j].extended(t));
        layer_begin = layer_end;
    }
    return out;
}

/// The right action of the free product on pairs: X_l appends l to the
/// first coordinate, Y_l to the second. Applying to the identity pair is
/// the natural level-preserving homomorphism into the direct sum.
inline PairWord act_free(const PairWord& g, const FreeWord& t) {
    if (g.alphabet().size != t.alphabet_size()) throw std::invalid_argument("alphabet mismatch");
    std::vector<Letter> a = g.first.letters();
    std::vector<Letter> b = g.second.letters();
    for (const GenToken& tok : t.tokens())
        (tok.axis == 0 ? a : b).push_back(tok.letter);
    return PairWord(Word(g.alphabet(), std::move(a)), Word(g.alphabet(), std::move(b)));
}

// ---- text forms ------------------------------------------------------

inline char letter_to_char(Letter l) { return l < 10 ? static_cast<char>('0' + l) : static_cast<char>('a' + l - 10); }

inline std::optional<Letter> letter_from_char(char c) {
    if (c >= '0' && c <= '9') return static_cast<Letter>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<Letter>(c - 'a' + 10);
    return std::nullopt;
}

/// Digit-string form; the empty word renders as "" (or "-" when asked).
inline std::string format_word(const Word& w, bool empty_as_dash = false) {
    if (w.empty() && empty_as_dash) return "-";
    std::string s;
    s.reserve(static_cast<std::size_t>(w.length()));
    for (Letter l : w.letters()) s.push_back(letter_to_char(l));
    return s;
}

inline Word parse_word(Alphabet alpha, const std::string& text) {
    if (text == "-" || text.empty()) return Word(alpha);
    std::vector<Letter> letters;
    letters.reserve(text.size());
    for (char c : text) {
        auto l = letter_from_char(c);
        if (!l || *l >= alpha.size)
            throw std::invalid_argument("bad letter '" + std::string(1, c) + "' in word");
        letters.push_back(*l);
    }
    return Word(alpha, std::move(letters));
}

inline std::string format_pair(const PairWord& p, bool empty_as_dash = false) {
    return format_word(p.first, empty_as_dash) + "," + format_word(p.second, empty_as_dash);
}

inline PairWord parse_pair(Alphabet alpha, const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("pair needs '<w1>,<w2>'");
    return PairWord(parse_word(alpha, text.substr(0, comma)),
                    parse_word(alpha, text.substr(comma + 1)));
}

/// Dot-joined token form, e.g. "x0.y1"; the identity renders as "".
inline std::string format_free_word(const FreeWord& t) {
    std::string s;
    for (std::size_t i = 0; i < t.tokens().size(); ++i) {
        if (i > 0) s.push_back('.');
        s.push_back(t.tokens()[i].axis == 0 ? 'x' : 'y');
        s.push_back(letter_to_char(t.tokens()[i].letter));
    }
    return s;
}

inline FreeWord parse_free_word(Alphabet alpha, const std::string& text) {
    std::vector<GenToken> tokens;
    if (!text.empty()) {
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t dot = text.find('.', pos);
            std::string tok = text.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
            if (tok.size() != 2 || (tok[0] != 'x' && tok[0] != 'y'))
                throw std::invalid_argument("bad generator token '" + tok + "'");
            auto l = letter_from_char(tok[1]);
            if (!l || *l >= alpha.size) throw std::invalid_argument("bad generator letter in '" + tok + "'");
            tokens.push_back(GenToken{static_cast<std::uint8_t>(tok[0] == 'y'), *l});
            if (dot == std::string::npos) break;
            pos = dot + 1;
        }
    }
    return FreeWord(alpha, std::move(tokens));
}

// ---- hashing ---------------------------------------------------------

struct WordHash {
    std::size_t operator()(const Word& w) const {
        std::size_t h = 0x811c9dc5u ^ static_cast<std::size_t>(w.alphabet_size());
        for (Letter l : w.letters()) h = (h ^ l) * 0x01000193u;
        return h;
    }
};

struct PairWordHash {
    std::size_t operator()(const PairWord& p) const {
        WordHash h;
        std::size_t a = h(p.first), b = h(p.second);
        return a ^ (b + 0x9e3779b9u + (a << 6) + (a >> 2));
    }
};

}  // namespace treeramsey
