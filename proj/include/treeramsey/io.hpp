#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "treeramsey/core.hpp"
#include "treeramsey/markov.hpp"
#include "treeramsey/sets.hpp"
#include "treeramsey/witness.hpp"
#include "treeramsey/words.hpp"

namespace treeramsey {

// Text formats are bit-exact contracts: lines sorted in ascending byte
// order, a trailing newline, and no incidental whitespace. Witness JSON
// is canonical: fixed key order at the top level, map keys emitted in the
// canonical address order, no indentation, one trailing newline.

using AnySet = std::variant<TreeSet, GridTreeSet>;
using AnyWitness = std::variant<TreeWitness, TreeArrayWitness, ProductTreeWitness>;

namespace detail {

inline std::vector<std::string> split_lines_strict(const std::string& text) {
    if (text.empty() || text.back() != '\n')
        throw ParseError(0, "missing trailing newline");
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

inline std::map<std::string, std::string> parse_header(const std::string& line,
                                                       const std::string& magic) {
    std::istringstream in(line);
    std::string word;
    if (!(in >> word) || word != magic) throw ParseError(1, "expected '" + magic + "' header");
    if (!(in >> word) || word != "v1") throw ParseError(1, "unsupported format version");
    std::map<std::string, std::string> fields;
    while (in >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos) throw ParseError(1, "malformed header field '" + word + "'");
        fields[word.substr(0, eq)] = word.substr(eq + 1);
    }
    return fields;
}

inline int header_int(const std::map<std::string, std::string>& fields, const std::string& key) {
    auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(1, "header is missing '" + key + "'");
    try {
        std::size_t used = 0;
        int v = std::stoi(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ParseError(1, "header field '" + key + "' is not an integer");
    }
}

inline std::string header_text(const std::map<std::string, std::string>& fields,
                               const std::string& key) {
    auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(1, "header is missing '" + key + "'");
    return it->second;
}

}  // namespace detail

// ---- set files ---------------------------------------------------------

inline std::string write_set(const TreeSet& s) {
    std::string repr = s.rep() == TreeSet::Rep::Explicit ? "explicit" : "levellift";
    std::string out = "treeset v1 k=" + std::to_string(s.alphabet().size) +
                      " n=" + std::to_string(s.depth()) + " dim=1 repr=" + repr + "\n";
    std::vector<std::string> lines;
    if (s.rep() == TreeSet::Rep::Explicit) {
        s.for_each_member([&](const Word& w) {
            lines.push_back(format_word(w, true));
            return true;
        });
    } else {
        for (int l : s.occupied_levels()) lines.push_back(std::to_string(l));
    }
    std::sort(lines.begin(), lines.end());
    for (const std::string& line : lines) out += line + "\n";
    return out;
}

inline std::string write_set(const GridTreeSet& s) {
    if (s.rep() == GridTreeSet::Rep::Predicate)
        throw std::invalid_argument("predicate sets have no file form; convert to explicit first");
    std::string repr = s.rep() == GridTreeSet::Rep::Explicit ? "explicit" : "levellift";
    std::string out = "treeset v1 k=" + std::to_string(s.alphabet().size) +
                      " n=" + std::to_string(s.depth()) + " dim=2 repr=" + repr + "\n";
    std::vector<std::string> lines;
    if (s.rep() == GridTreeSet::Rep::Explicit) {
        for (int i = 0; i < s.depth(); ++i)
            for (int j = 0; j < s.depth(); ++j)
                s.for_each_in_cell(i, j, [&](const PairWord& p) {
                    lines.push_back(format_pair(p, true));
                    return true;
                });
    } else {
        for (auto [i, j] : s.lift().members())
            lines.push_back(std::to_string(i) + " " + std::to_string(j));
    }
    std::sort(lines.begin(), lines.end());
    for (const std::string& line : lines) out += line + "\n";
    return out;
}

inline AnySet parse_set(const std::string& text) {
    std::vector<std::string> lines = detail::split_lines_strict(text);
    if (lines.empty()) throw ParseError(1, "empty input");
    auto fields = detail::parse_header(lines[0], "treeset");
    int k = detail::header_int(fields, "k");
    int n = detail::header_int(fields, "n");
    int dim = detail::header_int(fields, "dim");
    std::string repr = detail::header_text(fields, "repr");
    if (dim != 1 && dim != 2) throw ParseError(1, "dim must be 1 or 2");
    if (repr != "explicit" && repr != "levellift")
        throw ParseError(1, "repr must be 'explicit' or 'levellift'");
    Alphabet alpha(1);
    try {
        alpha = Alphabet(k);
        if (n < 1) throw std::invalid_argument("depth must be >= 1");
    } catch (const std::exception& e) {
        throw ParseError(1, e.what());
    }

    for (std::size_t i = 2; i < lines.size(); ++i)
        if (!(lines[i - 1] < lines[i]))
            throw ParseError(static_cast<int>(i) + 1, "lines are not sorted (or duplicate)");

    auto parse_level = [&](const std::string& tok, int line_no) {
        try {
            std::size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size() || v < 0 || v >= n) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ParseError(line_no, "bad level '" + tok + "'");
        }
    };

    if (dim == 1) {
        if (repr == "explicit") {
            std::vector<Word> members;
            for (std::size_t i = 1; i < lines.size(); ++i) {
                try {
                    Word w = parse_word(alpha, lines[i]);
                    if (w.length() >= n) throw std::invalid_argument("word exceeds depth");
                    members.push_back(std::move(w));
                } catch (const std::exception& e) {
                    throw ParseError(static_cast<int>(i) + 1, e.what());
                }
            }
            return TreeSet::explicit_set(alpha, n, std::move(members));
        }
        std::vector<int> levels;
        for (std::size_t i = 1; i < lines.size(); ++i)
            levels.push_back(parse_level(lines[i], static_cast<int>(i) + 1));
        return TreeSet::level_mask(alpha, n, levels);
    }

    if (repr == "explicit") {
        std::vector<PairWord> members;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            try {
                PairWord p = parse_pair(alpha, lines[i]);
                auto [a, b] = p.level();
                if (a >= n || b >= n) throw std::invalid_argument("pair exceeds depth");
                members.push_back(std::move(p));
            } catch (const std::exception& e) {
                throw ParseError(static_cast<int>(i) + 1, e.what());
            }
        }
        return GridTreeSet::explicit_set(alpha, n, std::move(members));
    }
    std::vector<std::pair<int, int>> cells;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto space = lines[i].find(' ');
        if (space == std::string::npos)
            throw ParseError(static_cast<int>(i) + 1, "expected '<i> <j>'");
        cells.emplace_back(parse_level(lines[i].substr(0, space), static_cast<int>(i) + 1),
                           parse_level(lines[i].substr(space + 1), static_cast<int>(i) + 1));
    }
    return GridTreeSet::level_lift(GridSet(n, std::move(cells)), alpha);
}

inline AnySet parse_set_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_set(buf.str());
}

// ---- witness JSON ------------------------------------------------------

inline std::string write_witness(const TreeWitness& w) {
    nlohmann::ordered_json j;
    j["kind"] = "tree";
    j["k"] = w.alphabet.size;
    j["r"] = w.order;
    j["q"] = w.gap;
    nlohmann::ordered_json map = nlohmann::ordered_json::object();
    for (const auto& [addr, img] : w.map) map[format_word(addr)] = format_word(img);
    j["map"] = std::move(map);
    return j.dump() + "\n";
}

inline std::string write_witness(const TreeArrayWitness& w) {
    nlohmann::ordered_json j;
    j["kind"] = "array";
    j["k"] = w.alphabet.size;
    j["r"] = w.order;
    j["q"] = w.gap;
    j["c1"] = w.c1;
    j["c2"] = w.c2;
    nlohmann::ordered_json map = nlohmann::ordered_json::object();
    for (std::size_t row = 0; row < w.row_maps.size(); ++row)
        for (const auto& [addr, img] : w.row_maps[row])
            map[std::to_string(row) + ":" + format_word(addr)] =
                format_word(img) + "," + format_word(w.row_words[row]);
    j["map"] = std::move(map);
    return j.dump() + "\n";
}

inline std::string write_witness(const ProductTreeWitness& w) {
    nlohmann::ordered_json j;
    j["kind"] = "product";
    j["k"] = w.alphabet.size;
    j["r"] = w.order;
    j["u"] = {w.u[0], w.u[1]};
    j["v"] = {w.v[0], w.v[1]};
    nlohmann::ordered_json map = nlohmann::ordered_json::object();
    for (const auto& [addr, img] : w.map) map[format_free_word(addr)] = format_pair(img);
    j["map"] = std::move(map);
    return j.dump() + "\n";
}

inline std::string write_witness(const AnyWitness& w) {
    return std::visit([](const auto& inner) { return write_witness(inner); }, w);
}

namespace detail {

inline std::array<long long, 2> json_increment(const nlohmann::json& j, const char* name) {
    if (!j.contains(name) || !j[name].is_array() || j[name].size() != 2)
        throw ParseError(0, std::string("witness field '") + name + "' must be a pair");
    return {j[name][0].get<long long>(), j[name][1].get<long long>()};
}

}  // namespace detail

inline AnyWitness parse_witness(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("bad witness JSON: ") + e.what());
    }
    try {
        std::string kind = j.at("kind").get<std::string>();
        Alphabet alpha(j.at("k").get<int>());
        int r = j.at("r").get<int>();
        const auto& map = j.at("map");
        if (!map.is_object()) throw ParseError(0, "witness 'map' must be an object");

        if (kind == "tree") {
            TreeWitness w{alpha, r, j.at("q").get<int>(), {}};
            for (auto it = map.begin(); it != map.end(); ++it)
                w.map.emplace(parse_word(alpha, it.key()),
                              parse_word(alpha, it.value().get<std::string>()));
            return w;
        }
        if (kind == "array") {
            TreeArrayWitness w{alpha, r, j.at("q").get<int>(), j.at("c1").get<int>(),
                               j.at("c2").get<int>(), {}, {}};
            w.row_words.assign(static_cast<std::size_t>(r) + 1, Word(alpha));
            w.row_maps.assign(static_cast<std::size_t>(r) + 1, {});
            std::vector<bool> row_seen(static_cast<std::size_t>(r) + 1, false);
            for (auto it = map.begin(); it != map.end(); ++it) {
                auto colon = it.key().find(':');
                if (colon == std::string::npos)
                    throw ParseError(0, "array addresses look like '<row>:<address>'");
                int row = std::stoi(it.key().substr(0, colon));
                if (row < 0 || row > r) throw ParseError(0, "array row out of range");
                Word addr = parse_word(alpha, it.key().substr(colon + 1));
                PairWord img = parse_pair(alpha, it.value().get<std::string>());
                if (!row_seen[static_cast<std::size_t>(row)]) {
                    w.row_words[static_cast<std::size_t>(row)] = img.second;
                    row_seen[static_cast<std::size_t>(row)] = true;
                } else if (!(w.row_words[static_cast<std::size_t>(row)] == img.second)) {
                    throw ParseError(0, "array row " + std::to_string(row) +
                                            " mixes different row words");
                }
                w.row_maps[static_cast<std::size_t>(row)].emplace(std::move(addr), img.first);
            }
            for (int row = 0; row <= r; ++row)
                if (!row_seen[static_cast<std::size_t>(row)])
                    throw ParseError(0, "array row " + std::to_string(row) + " is missing");
            return w;
        }
        if (kind == "product") {
            ProductTreeWitness w{alpha, r, detail::json_increment(j, "u"),
                                 detail::json_increment(j, "v"), {}};
            for (auto it = map.begin(); it != map.end(); ++it)
                w.map.emplace(parse_free_word(alpha, it.key()),
                              parse_pair(alpha, it.value().get<std::string>()));
            return w;
        }
        throw ParseError(0, "unknown witness kind '" + kind + "'");
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(0, std::string("bad witness: ") + e.what());
    }
}

inline AnyWitness parse_witness_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_witness(buf.str());
}

// ---- markov system files ------------------------------------------------

inline std::string write_markov(const FiniteMarkovSystem& s) {
    std::string out = "markov v1 k=" + std::to_string(s.alphabet().size) +
                      " m=" + std::to_string(s.state_count()) + "\n";
    for (int l = 0; l < s.alphabet().size; ++l) {
        out += "T" + std::to_string(l) + ":";
        for (int x = 0; x < s.state_count(); ++x) out += " " + std::to_string(s.transition(l, x));
        out += "\np" + std::to_string(l) + ":";
        for (int x = 0; x < s.state_count(); ++x)
            out += " " + rational_to_string(s.probability(l, x));
        out += "\n";
    }
    return out;
}

/// One or more stacked system blocks; pair subcommands expect two.
inline std::vector<FiniteMarkovSystem> parse_markov_systems(const std::string& text) {
    std::vector<std::string> lines = detail::split_lines_strict(text);
    std::vector<FiniteMarkovSystem> out;
    std::size_t pos = 0;
    while (pos < lines.size()) {
        int base = static_cast<int>(pos) + 1;
        auto fields = detail::parse_header(lines[pos], "markov");
        int k = detail::header_int(fields, "k");
        int m = detail::header_int(fields, "m");
        Alphabet alpha(1);
        try {
            alpha = Alphabet(k);
        } catch (const std::exception& e) {
            throw ParseError(base, e.what());
        }
        ++pos;
        std::vector<std::vector<int>> trans(static_cast<std::size_t>(k));
        std::vector<std::vector<Rational>> prob(static_cast<std::size_t>(k));
        for (int l = 0; l < k; ++l) {
            for (int part = 0; part < 2; ++part) {
                if (pos >= lines.size())
                    throw ParseError(static_cast<int>(pos) + 1, "unexpected end of system block");
                int line_no = static_cast<int>(pos) + 1;
                std::istringstream in(lines[pos]);
                std::string tag;
                in >> tag;
                std::string expected = (part == 0 ? "T" : "p") + std::to_string(l) + ":";
                if (tag != expected)
                    throw ParseError(line_no, "expected '" + expected + "', got '" + tag + "'");
                std::string tok;
                try {
                    if (part == 0) {
                        std::vector<int> row;
                        while (in >> tok) row.push_back(std::stoi(tok));
                        if (row.size() != static_cast<std::size_t>(m))
                            throw std::invalid_argument("expected " + std::to_string(m) + " entries");
                        trans[static_cast<std::size_t>(l)] = std::move(row);
                    } else {
                        std::vector<Rational> row;
                        while (in >> tok) row.push_back(parse_rational(tok));
                        if (row.size() != static_cast<std::size_t>(m))
                            throw std::invalid_argument("expected " + std::to_string(m) + " entries");
                        prob[static_cast<std::size_t>(l)] = std::move(row);
                    }
                } catch (const std::exception& e) {
                    throw ParseError(line_no, e.what());
                }
                ++pos;
            }
        }
        try {
            out.emplace_back(alpha, m, std::move(trans), std::move(prob));
        } catch (const std::exception& e) {
            throw ParseError(base, e.what());
        }
    }
    if (out.empty()) throw ParseError(1, "no system blocks found");
    return out;
}

inline std::vector<FiniteMarkovSystem> parse_markov_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_markov_systems(buf.str());
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace treeramsey
