#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtevo/analysis.hpp"
#include "rtevo/model.hpp"

namespace rtevo {

// Variables available to response-time formulae. Order matches the grammar's
// <var> production list.
enum class Var : std::uint8_t { ri, di, ji, ci, bi, ti, jk, ck, dk, tk };

enum class ExprOp : std::uint8_t { add, sub, min, max };

const char* var_name(Var v);
const char* op_name(ExprOp op);

// Binary expression tree over Var leaves.
struct Expr {
    bool is_leaf = true;
    Var var = Var::ri;
    ExprOp op = ExprOp::add;
    std::vector<Expr> kids; // size 2 for interior nodes

    static Expr leaf(Var v) {
        Expr e;
        e.var = v;
        return e;
    }
    static Expr node(ExprOp op, Expr lhs, Expr rhs) {
        Expr e;
        e.is_leaf = false;
        e.op = op;
        e.kids.push_back(std::move(lhs));
        e.kids.push_back(std::move(rhs));
        return e;
    }

    bool mentions(Var v) const;
    bool operator==(const Expr&) const = default;
};

// A response-time test:
//   R_i = base + sum_{k in hp(i)} (floor(num / T_k) + k01) * C_k
// base ranges over {J_i, C_i, B_i} with {+, max}; num over all variables with
// {+, -, min, max}. The formula is self-referential iff num mentions R_i, in
// which case evaluation is a fixed-point iteration.
struct Formula {
    Expr base;
    Expr num;
    int k01 = 1;

    bool self_referential() const { return num.mentions(Var::ri); }
    bool operator==(const Formula&) const = default;
};

// Built-in formulae: 1 = the iterative sufficient test, 2 = its closed form
// with D_i substituted for the iterate, 3 = the further simplified numerator
// D_i + J_k, 4 = an evolved formula kept for comparison runs.
Formula builtin(int eq);

// S-expression surface syntax: (rt <base> (isum <num> <k01>)).
std::string render_formula(const Formula& f);
Formula parse_formula(const std::string& text);

std::string render_expr(const Expr& e);

// --- Grammatical evolution -------------------------------------------------

// Token-level BNF. Each production is a sequence of terminals (surface
// tokens) and nonterminal references; mapping derives a word which is then
// parsed into a Formula. Productions are indexed from 0 in listed order.
struct Grammar {
    struct Sym {
        int nt = -1;     // >= 0: nonterminal index into rules
        std::string tok; // terminal token when nt < 0
    };
    using Production = std::vector<Sym>;

    std::vector<std::vector<Production>> rules;
    int start = 0;

    // The fixed grammar; builtins 1-4 are all derivable words:
    //   <rt>    ::= <base> "+" <isum>
    //   <base>  ::= <bterm> | <base> "+" <bterm> | max(<base>,<bterm>)
    //   <bterm> ::= J_i | C_i | B_i
    //   <isum>  ::= SUM_{k in hp(i)} (floor(<num>/T_k) + <k01>) * C_k
    //   <k01>   ::= 1 | 0
    //   <num>   ::= <var> | (<num>+<num>) | (<num>-<num>)
    //             | min(<num>,<num>) | max(<num>,<num>)
    //   <var>   ::= R_i | D_i | J_i | C_i | B_i | T_i | J_k | C_k | D_k | T_k
    static Grammar standard();

    // Degenerate grammar whose single derivable word renders the given
    // formula; handy for pinning the search space in tests.
    static Grammar single_word(const Formula& f);
};

struct Genotype {
    std::vector<std::uint32_t> codons;
    int max_wraps = 3;
};

// Standard GE mapping: leftmost derivation; a nonterminal with p > 1
// productions consumes the next codon c and picks c mod p; single-production
// nonterminals consume nothing; the codon index wraps up to max_wraps times.
// Returns nullopt when the derivation is still unfinished after the wrap
// budget (MappingIncomplete).
std::optional<Formula> map_genotype(const Genotype& g, const Grammar& grammar);

// --- Evaluation -------------------------------------------------------------

enum class DivergenceCause { none, iteration_limit, cap_exceeded, overflow };

struct EvalOutcome {
    bool is_value = false;
    Ticks value = 0;
    DivergenceCause cause = DivergenceCause::none;
    int iterations = 0;

    static EvalOutcome val(Ticks v, int iters) {
        return {true, v, DivergenceCause::none, iters};
    }
    static EvalOutcome divergent(DivergenceCause c, int iters) {
        return {false, 0, c, iters};
    }
};

// Per-message variable bindings, precomputed once per corpus so population
// evaluation does not touch MessageSet internals.
struct BoundMessage {
    Ticks ji = 0, ci = 0, bi = 0, di = 0, ti = 0;
    struct K {
        Ticks jk = 0, ck = 0, dk = 0, tk = 0;
    };
    std::vector<K> hp;

    static BoundMessage bind(const MessageSet& set, std::size_t idx);
};

// Postfix-compiled formula for tight evaluation loops.
class CompiledFormula {
public:
    explicit CompiledFormula(const Formula& f);

    EvalOutcome eval(const BoundMessage& m, const AnalysisConfig& cfg) const;
    bool self_referential() const { return self_ref_; }

private:
    struct Ins {
        bool push = true;
        Var v = Var::ri;
        ExprOp op = ExprOp::add;
    };

    Ticks run(const std::vector<Ins>& prog, const std::array<Ticks, 10>& vars,
              std::vector<Ticks>& stack) const;

    std::vector<Ins> base_, num_;
    int k01_ = 1;
    bool self_ref_ = false;
    std::size_t stack_need_ = 1;
};

// Bind message idx of the set and evaluate f on it. Non-self-referential
// formulae take a single evaluation; self-referential ones iterate from
// R0 = J_i + C_i until equality, up to cfg.iter_limit iterations or
// |iterate| > cap. Overflow is reported as a divergence, not an error.
EvalOutcome eval_formula(const Formula& f, const MessageSet& set,
                         std::size_t idx, const AnalysisConfig& cfg);
EvalOutcome eval_formula(const Formula& f, const MessageSet& set,
                         const std::string& id, const AnalysisConfig& cfg);

} // namespace rtevo
