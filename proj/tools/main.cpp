// tree-ramsey: batch front-end for the tree-density searches, witness
// verification and the finite Markov machinery.
//
// Exit codes: 0 found/PASS, 1 exhaustive none/FAIL, 2 budget exhausted,
// 3 input error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "treeramsey/treeramsey.hpp"

namespace tr = treeramsey;

namespace {

constexpr int kExitFound = 0;
constexpr int kExitNone = 1;
constexpr int kExitBudget = 2;
constexpr int kExitInput = 3;

struct Options {
    std::string input;
    std::string out;
    int r = 1;
    std::string q = "all";
    std::string u = "1,1";
    std::string v = "1,1";
    std::string n_range = "1..1";
    std::string delta = "1/2";
    std::uint64_t budget = tr::SearchBudget::kUnbounded;
    std::uint64_t seed = 0;
    std::uint64_t samples = 100000;
    int workers = 1;
    bool deterministic = true;
    bool relaxed = false;
    bool factor = false;
    std::string states;
};

std::pair<int, int> parse_range(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos) {
        int v = std::stoi(text);
        return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

tr::QRange parse_q(const std::string& text) {
    if (text == "all") return tr::QRange::all();
    auto [lo, hi] = parse_range(text);
    return tr::QRange::between(lo, hi);
}

std::array<long long, 2> parse_increment(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("increment must look like 'a,b'");
    return {std::stoll(text.substr(0, comma)), std::stoll(text.substr(comma + 1))};
}

tr::SearchBudget make_budget(const Options& opt) {
    tr::SearchBudget b;
    b.node_cap = opt.budget;
    b.workers = opt.workers;
    return b;
}

tr::TreeSet require_1d(const tr::AnySet& set) {
    if (!std::holds_alternative<tr::TreeSet>(set))
        throw std::invalid_argument("this command needs a dim=1 set file");
    return std::get<tr::TreeSet>(set);
}

tr::GridTreeSet require_2d(const tr::AnySet& set) {
    if (!std::holds_alternative<tr::GridTreeSet>(set))
        throw std::invalid_argument("this command needs a dim=2 set file");
    return std::get<tr::GridTreeSet>(set);
}

void emit_witness(const Options& opt, const std::string& bytes) {
    if (opt.out.empty())
        std::cout << bytes;
    else
        tr::write_text_file(opt.out, bytes);
}

int exit_for(tr::SearchStatus status) {
    switch (status) {
        case tr::SearchStatus::Found:
            return kExitFound;
        case tr::SearchStatus::NoneExhaustive:
            return kExitNone;
        case tr::SearchStatus::BudgetExhausted:
            return kExitBudget;
    }
    return kExitInput;
}

std::string show(const tr::Rational& q) {
    return tr::rational_to_string(q) + " (~" + std::to_string(tr::rational_to_double(q)) + ")";
}

int run_density(const Options& opt) {
    tr::AnySet set = tr::parse_set_file(opt.input);
    if (std::holds_alternative<tr::TreeSet>(set)) {
        const tr::TreeSet& s = std::get<tr::TreeSet>(set);
        for (int n = 1; n <= s.depth(); ++n) {
            tr::Rational d = 0;
            for (int i = 0; i < n; ++i) {
                tr::BigInt c = s.level_count(i);
                if (c != 0)
                    d += tr::Rational(c, tr::pow_int(static_cast<std::uint64_t>(s.alphabet().size),
                                                     static_cast<std::uint64_t>(i)));
            }
            d /= n;
            std::cout << "d[" << n << "] = " << show(d) << "\n";
        }
        return kExitFound;
    }
    const tr::GridTreeSet& a = std::get<tr::GridTreeSet>(set);
    for (int n = 1; n <= a.depth(); ++n) {
        tr::Rational d = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                tr::BigInt c = a.cell_count(i, j);
                if (c != 0)
                    d += tr::Rational(c, tr::pow_int(static_cast<std::uint64_t>(a.alphabet().size),
                                                     static_cast<std::uint64_t>(i + j)));
            }
        d /= tr::BigInt(n) * n;
        std::cout << "d[" << n << "] = " << show(d) << "\n";
    }
    return kExitFound;
}

int run_search_tree(const Options& opt) {
    tr::TreeSet s = require_1d(tr::parse_set_file(opt.input));
    auto out = tr::find_arithmetic_subtree(s, opt.r, parse_q(opt.q), make_budget(opt));
    if (out.status == tr::SearchStatus::Found) {
        tr::Verdict check = tr::verify_arithmetic_subtree(*out.witness, s);
        if (!check.pass) throw std::logic_error("search emitted a non-verifying witness");
        std::cout << "found order=" << opt.r << " gap=" << out.witness->gap
                  << " nodes=" << out.nodes << "\n";
        emit_witness(opt, tr::write_witness(*out.witness));
    } else {
        std::cout << (out.status == tr::SearchStatus::NoneExhaustive ? "none (exhaustive)"
                                                                     : "budget exhausted")
                  << " nodes=" << out.nodes << "\n";
    }
    return exit_for(out.status);
}

int run_search_array(const Options& opt) {
    tr::GridTreeSet a = require_2d(tr::parse_set_file(opt.input));
    auto out = tr::construct_tree_array(a, opt.r, tr::parse_rational(opt.delta), make_budget(opt));
    if (out.status == tr::SearchStatus::Found) {
        tr::Verdict check = tr::verify_tree_array(*out.witness, a);
        if (!check.pass) throw std::logic_error("search emitted a non-verifying witness");
        std::cout << "found order=" << opt.r << " gap=" << out.witness->gap
                  << " c1=" << out.witness->c1 << " c2=" << out.witness->c2
                  << " nodes=" << out.nodes << "\n";
        emit_witness(opt, tr::write_witness(*out.witness));
    } else {
        std::cout << (out.status == tr::SearchStatus::NoneExhaustive ? "none" : "budget exhausted")
                  << " at stage " << out.failed_stage;
        if (!out.message.empty()) std::cout << ": " << out.message;
        std::cout << "\n";
    }
    return exit_for(out.status);
}

int run_search_product(const Options& opt) {
    tr::GridTreeSet a = require_2d(tr::parse_set_file(opt.input));
    if (opt.factor) {
        auto out = tr::find_cartesian_product_tree(a, opt.r, parse_q(opt.q), make_budget(opt));
        if (out.status == tr::SearchStatus::Found) {
            tr::Verdict check = tr::verify_product_tree(*out.witness, a);
            if (!check.pass) throw std::logic_error("search emitted a non-verifying witness");
            std::cout << "found order=" << opt.r << " gap=" << out.witness->u[0]
                      << " (factors through a pair of trees) nodes=" << out.nodes << "\n";
            emit_witness(opt, tr::write_witness(*out.witness));
        } else {
            std::cout << (out.status == tr::SearchStatus::NoneExhaustive ? "none (exhaustive)"
                                                                         : "budget exhausted")
                      << " nodes=" << out.nodes << "\n";
        }
        return exit_for(out.status);
    }
    auto [n_lo, n_hi] = parse_range(opt.n_range);
    auto out = tr::find_product_tree(a, opt.r, parse_increment(opt.u), parse_increment(opt.v),
                                     n_lo, n_hi, opt.relaxed, make_budget(opt));
    if (out.status == tr::SearchStatus::Found) {
        tr::Verdict check = tr::verify_product_tree(*out.witness, a);
        if (!check.pass) throw std::logic_error("search emitted a non-verifying witness");
        std::cout << "found order=" << opt.r << " n=" << *out.n << " increments=("
                  << out.witness->u[0] << "," << out.witness->u[1] << ")/(" << out.witness->v[0]
                  << "," << out.witness->v[1] << ") nodes=" << out.nodes << "\n";
        emit_witness(opt, tr::write_witness(*out.witness));
    } else {
        std::cout << (out.status == tr::SearchStatus::NoneExhaustive ? "none (exhaustive)"
                                                                     : "budget exhausted")
                  << " nodes=" << out.nodes << "\n";
    }
    return exit_for(out.status);
}

int run_verify(const Options& opt, const std::string& witness_path) {
    tr::AnyWitness witness = tr::parse_witness_file(witness_path);
    tr::AnySet set = tr::parse_set_file(opt.input);
    tr::Verdict verdict = tr::Verdict::ok();
    if (std::holds_alternative<tr::TreeWitness>(witness)) {
        const auto& w = std::get<tr::TreeWitness>(witness);
        verdict = tr::verify_arithmetic_subtree(w, require_1d(set));
        if (auto q = tr::infer_gap(w)) std::cout << "inferred gap=" << *q << "\n";
    } else if (std::holds_alternative<tr::TreeArrayWitness>(witness)) {
        verdict = tr::verify_tree_array(std::get<tr::TreeArrayWitness>(witness), require_2d(set));
    } else {
        const auto& w = std::get<tr::ProductTreeWitness>(witness);
        verdict = tr::verify_product_tree(w, require_2d(set));
        if (auto inc = tr::infer_increments(w))
            std::cout << "inferred increments=(" << inc->first[0] << "," << inc->first[1] << ")/("
                      << inc->second[0] << "," << inc->second[1] << ")\n";
    }
    if (verdict.pass) {
        std::cout << "PASS\n";
        return kExitFound;
    }
    std::cout << "FAIL " << verdict.violation->condition << " at \"" << verdict.violation->address
              << "\": " << verdict.violation->detail << "\n";
    return kExitNone;
}

int run_ap_grid(const Options& opt) {
    tr::GridTreeSet a = require_2d(tr::parse_set_file(opt.input));
    if (a.rep() != tr::GridTreeSet::Rep::LevelLift)
        throw std::invalid_argument("ap-grid expects a levellift set file (a plain grid)");
    auto out = tr::find_ap_grid(a.lift(), opt.r);
    if (out) {
        std::cout << "found start=(" << out->a1 << "," << out->a2 << ") q=" << out->q
                  << " len=" << out->len << "\n";
        return kExitFound;
    }
    std::cout << "none (exhaustive)\n";
    return kExitNone;
}

std::pair<tr::CommutingPair, tr::StateSet> load_pair(const Options& opt) {
    std::vector<tr::FiniteMarkovSystem> systems = tr::parse_markov_file(opt.input);
    if (systems.size() != 2)
        throw std::invalid_argument("expected exactly two stacked system blocks, found " +
                                    std::to_string(systems.size()));
    tr::CommutingPair pair(systems[0], systems[1]);
    tr::StateSet a(static_cast<std::size_t>(pair.state_count()), true);
    if (!opt.states.empty()) {
        a.assign(a.size(), false);
        std::size_t pos = 0;
        while (pos < opt.states.size()) {
            std::size_t comma = opt.states.find(',', pos);
            std::string tok = opt.states.substr(pos, comma == std::string::npos ? std::string::npos
                                                                                : comma - pos);
            int x = std::stoi(tok);
            if (x < 0 || x >= pair.state_count())
                throw std::invalid_argument("state " + tok + " out of range");
            a[static_cast<std::size_t>(x)] = true;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    return {std::move(pair), std::move(a)};
}

int run_markov_validate(const Options& opt) {
    std::vector<tr::FiniteMarkovSystem> systems = tr::parse_markov_file(opt.input);
    if (systems.size() != 2)
        throw std::invalid_argument("expected exactly two stacked system blocks, found " +
                                    std::to_string(systems.size()));
    tr::PairReport r = tr::validate_pair(systems[0], systems[1]);
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    std::cout << "same-shape: " << yn(r.same_shape) << "\n";
    std::cout << "commuting: " << yn(r.commuting) << "\n";
    std::cout << "non-degenerate: " << yn(r.non_degenerate_first) << " "
              << yn(r.non_degenerate_second) << "\n";
    std::cout << "disjoint-images: " << yn(r.disjoint_images_first) << " "
              << yn(r.disjoint_images_second) << "\n";
    std::cout << "constant-probabilities: " << yn(r.constant_probabilities_first) << " "
              << yn(r.constant_probabilities_second) << "\n";
    return kExitFound;
}

int run_markov_phi(const Options& opt) {
    auto [pair, a] = load_pair(opt);
    auto [n_lo, n_hi] = parse_range(opt.n_range);
    for (int n = n_lo; n <= n_hi; ++n) {
        tr::StateFunction phi =
            tr::compute_phi_r(pair, a, parse_increment(opt.u), parse_increment(opt.v), n, opt.r);
        tr::Rational integral = 0;
        int support = 0;
        for (const tr::Rational& value : phi) {
            integral += value;
            support += value > 0;
        }
        integral /= pair.state_count();
        std::cout << "n=" << n << " integral=" << show(integral) << " support=" << support << "/"
                  << pair.state_count() << "\n";
    }
    return kExitFound;
}

int run_markov_roots(const Options& opt) {
    auto [pair, a] = load_pair(opt);
    auto [n_lo, n_hi] = parse_range(opt.n_range);
    for (int n = n_lo; n <= n_hi; ++n) {
        std::vector<int> roots =
            tr::roots_by_search(pair, a, parse_increment(opt.u), parse_increment(opt.v), n, opt.r);
        std::cout << "n=" << n << " roots=";
        for (std::size_t i = 0; i < roots.size(); ++i)
            std::cout << (i ? "," : "") << roots[i];
        if (roots.empty()) std::cout << "-";
        std::cout << "\n";
    }
    return kExitFound;
}

int run_markov_mu(const Options& opt) {
    tr::GridTreeSet a = require_2d(tr::parse_set_file(opt.input));
    tr::Rational exact = tr::mu_N_exact(a, a.depth());
    tr::Rational by_density = tr::density_2d(a);
    std::cout << "mu_exact = " << show(exact) << "\n";
    std::cout << "density  = " << show(by_density) << "\n";
    bool match = exact == by_density;
    std::cout << "match: " << (match ? "yes" : "NO") << "\n";
    if (opt.samples > 0) {
        tr::MonteCarloEstimate mc =
            tr::mu_N_monte_carlo(a, a.depth(), opt.samples, opt.seed, opt.workers);
        std::cout << "mc_estimate = " << show(mc.estimate) << " stderr=" << mc.standard_error
                  << " samples=" << mc.samples << "\n";
    }
    return match ? kExitFound : kExitNone;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact densities, arithmetic-structure searches and finite Markov machinery "
                 "on products of trees"};
    app.require_subcommand(1);

    Options opt;
    std::string witness_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--input", opt.input, "input file")->required();
        cmd->add_option("--budget", opt.budget, "node budget for searches");
        cmd->add_option("--seed", opt.seed, "seed for randomized subcommands");
        cmd->add_option("--workers", opt.workers, "parallel worker hint");
        cmd->add_flag("--deterministic,!--no-deterministic", opt.deterministic,
                      "keep canonical-first answers (default on; turning it off never changes "
                      "correctness, only the witness-order guarantee)");
    };

    CLI::App* density = app.add_subcommand("density", "print the exact density sequence");
    add_common(density);

    CLI::App* search = app.add_subcommand("search", "search for a structure and emit its witness");
    search->require_subcommand(1);
    CLI::App* s_tree = search->add_subcommand("tree", "arithmetic subtree in a dim=1 set");
    CLI::App* s_array = search->add_subcommand("array", "tree array in a dim=2 set");
    CLI::App* s_product = search->add_subcommand("product", "arithmetic product tree in a dim=2 set");
    for (CLI::App* cmd : {s_tree, s_array, s_product}) {
        add_common(cmd);
        cmd->add_option("--r", opt.r, "order of the structure");
        cmd->add_option("--out", opt.out, "witness output path (stdout when omitted)");
    }
    s_tree->add_option("--q", opt.q, "gap: a value, lo..hi, or 'all'");
    s_array->add_option("--delta", opt.delta, "density bound num/den");
    s_product->add_option("--u", opt.u, "X increment a,b");
    s_product->add_option("--v", opt.v, "Y increment a,b");
    s_product->add_option("--n-range", opt.n_range, "scan n over lo..hi");
    s_product->add_flag("--relaxed", opt.relaxed,
                        "allow zero coordinates in the increments (exploration)");
    s_product->add_flag("--factor", opt.factor,
                        "search for a witness factoring through a pair of trees (exploration); "
                        "uses --q instead of --u/--v/--n-range");
    s_product->add_option("--q", opt.q, "gap range for --factor mode");

    CLI::App* verify = app.add_subcommand("verify", "re-verify a witness against a set");
    verify->add_option("witness", witness_path, "witness JSON path")->required();
    add_common(verify);

    CLI::App* apgrid = app.add_subcommand("ap-grid", "grid of progressions in a levellift set");
    add_common(apgrid);
    apgrid->add_option("--r", opt.r, "progression length");

    CLI::App* markov = app.add_subcommand("markov", "finite Markov-system machinery");
    markov->require_subcommand(1);
    CLI::App* m_validate = markov->add_subcommand("validate", "structural report on a pair");
    CLI::App* m_phi = markov->add_subcommand("phi", "recurrence-function integrals per n");
    CLI::App* m_roots = markov->add_subcommand("roots", "product-tree roots per n");
    CLI::App* m_mu = markov->add_subcommand("mu", "exact vs Monte-Carlo measure of a set");
    for (CLI::App* cmd : {m_validate, m_phi, m_roots, m_mu}) add_common(cmd);
    for (CLI::App* cmd : {m_phi, m_roots}) {
        cmd->add_option("--r", opt.r, "order");
        cmd->add_option("--u", opt.u, "X increment a,b");
        cmd->add_option("--v", opt.v, "Y increment a,b");
        cmd->add_option("--n-range", opt.n_range, "scan n over lo..hi");
        cmd->add_option("--states", opt.states, "comma list of states forming the target set "
                                                "(default: all states)");
    }
    m_mu->add_option("--samples", opt.samples, "Monte-Carlo sample count (0 disables)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (density->parsed()) return run_density(opt);
        if (search->parsed()) {
            if (s_tree->parsed()) return run_search_tree(opt);
            if (s_array->parsed()) return run_search_array(opt);
            return run_search_product(opt);
        }
        if (verify->parsed()) return run_verify(opt, witness_path);
        if (apgrid->parsed()) return run_ap_grid(opt);
        if (markov->parsed()) {
            if (m_validate->parsed()) return run_markov_validate(opt);
            if (m_phi->parsed()) return run_markov_phi(opt);
            if (m_roots->parsed()) return run_markov_roots(opt);
            return run_markov_mu(opt);
        }
    } catch (const tr::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const tr::InstanceTooLarge& e) {
        std::cerr << "instance too large: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
