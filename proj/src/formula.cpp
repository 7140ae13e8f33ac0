#include "rtevo/formula.hpp"

#include <algorithm>
#include <cctype>

namespace rtevo {

const char* var_name(Var v) {
    static const char* names[] = {"Ri", "Di", "Ji", "Ci", "Bi",
                                  "Ti", "Jk", "Ck", "Dk", "Tk"};
    return names[static_cast<int>(v)];
}

const char* op_name(ExprOp op) {
    switch (op) {
    case ExprOp::add: return "+";
    case ExprOp::sub: return "-";
    case ExprOp::min: return "min";
    case ExprOp::max: return "max";
    }
    return "?";
}

bool Expr::mentions(Var v) const {
    if (is_leaf)
        return var == v;
    return kids[0].mentions(v) || kids[1].mentions(v);
}

namespace {

Expr v(Var x) { return Expr::leaf(x); }
Expr add(Expr a, Expr b) { return Expr::node(ExprOp::add, std::move(a), std::move(b)); }
Expr sub(Expr a, Expr b) { return Expr::node(ExprOp::sub, std::move(a), std::move(b)); }
Expr emin(Expr a, Expr b) { return Expr::node(ExprOp::min, std::move(a), std::move(b)); }
Expr emax(Expr a, Expr b) { return Expr::node(ExprOp::max, std::move(a), std::move(b)); }

// Base shared by builtins 1-3: J_i + C_i + max(B_i, C_i), built on the
// left spine the grammar derives.
Expr baseline_base() {
    return add(add(emax(v(Var::bi), v(Var::ci)), v(Var::ji)), v(Var::ci));
}

} // namespace

Formula builtin(int eq) {
    Formula f;
    switch (eq) {
    case 1:
        f.base = baseline_base();
        f.num = add(sub(sub(v(Var::ri), v(Var::ji)), v(Var::ci)), v(Var::jk));
        f.k01 = 1;
        return f;
    case 2:
        f.base = baseline_base();
        f.num = add(sub(sub(v(Var::di), v(Var::ji)), v(Var::ci)), v(Var::jk));
        f.k01 = 1;
        return f;
    case 3:
        f.base = baseline_base();
        f.num = add(v(Var::di), v(Var::jk));
        f.k01 = 1;
        return f;
    case 4:
        // R_i = J_i + C_i + B_i + sum floor(min(max(min(max(J_i,C_i),J_k),
        //       max(J_k, min(C_i,C_k)-C_i)) + R_i, T_i) / T_k) * C_k
        f.base = add(add(v(Var::ji), v(Var::ci)), v(Var::bi));
        f.num = emin(
            add(emax(emin(emax(v(Var::ji), v(Var::ci)), v(Var::jk)),
                     emax(v(Var::jk),
                          sub(emin(v(Var::ci), v(Var::ck)), v(Var::ci)))),
                v(Var::ri)),
            v(Var::ti));
        f.k01 = 0;
        return f;
    default:
        throw Error(Errc::invalid_config, "builtin equation must be 1..4");
    }
}

std::string render_expr(const Expr& e) {
    if (e.is_leaf)
        return var_name(e.var);
    return "(" + std::string(op_name(e.op)) + " " + render_expr(e.kids[0]) +
           " " + render_expr(e.kids[1]) + ")";
}

std::string render_formula(const Formula& f) {
    return "(rt " + render_expr(f.base) + " (isum " + render_expr(f.num) + " " +
           std::to_string(f.k01) + "))";
}

// --- Parsing -----------------------------------------------------------------

namespace {

struct Token {
    std::string text;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(' || c == ')') {
            out.push_back({std::string(1, c), i});
            ++i;
        } else {
            std::size_t start = i;
            while (i < text.size() && text[i] != '(' && text[i] != ')' &&
                   !std::isspace(static_cast<unsigned char>(text[i])))
                ++i;
            out.push_back({text.substr(start, i - start), start});
        }
    }
    return out;
}

[[noreturn]] void syntax_error(const std::string& msg, std::size_t pos) {
    throw Error(Errc::syntax_error, msg + " at offset " + std::to_string(pos));
}

struct Parser {
    const std::vector<Token>& toks;
    std::size_t at = 0;
    int depth = 0;

    static constexpr int kMaxDepth = 4096;

    const Token& peek() const {
        if (at >= toks.size())
            syntax_error("unexpected end of input",
                         toks.empty() ? 0 : toks.back().pos + 1);
        return toks[at];
    }
    Token take() {
        const Token& t = peek();
        ++at;
        return t;
    }
    void expect(const std::string& text) {
        Token t = take();
        if (t.text != text)
            syntax_error("expected '" + text + "', got '" + t.text + "'", t.pos);
    }

    std::optional<Var> lookup_var(const std::string& atom) const {
        for (int i = 0; i < 10; ++i) {
            if (atom == var_name(static_cast<Var>(i)))
                return static_cast<Var>(i);
        }
        return std::nullopt;
    }

    std::optional<ExprOp> lookup_op(const std::string& atom) const {
        if (atom == "+") return ExprOp::add;
        if (atom == "-") return ExprOp::sub;
        if (atom == "min") return ExprOp::min;
        if (atom == "max") return ExprOp::max;
        return std::nullopt;
    }

    Expr parse_expr() {
        Token t = take();
        if (t.text == "(") {
            if (++depth > kMaxDepth)
                syntax_error("expression nested too deeply", t.pos);
            Token op_tok = take();
            auto op = lookup_op(op_tok.text);
            if (!op)
                syntax_error("expected operator, got '" + op_tok.text + "'",
                             op_tok.pos);
            Expr lhs = parse_expr();
            Expr rhs = parse_expr();
            expect(")");
            --depth;
            return Expr::node(*op, std::move(lhs), std::move(rhs));
        }
        if (t.text == ")")
            syntax_error("unexpected ')'", t.pos);
        auto var = lookup_var(t.text);
        if (!var)
            throw Error(Errc::unknown_atom,
                        "'" + t.text + "' at offset " + std::to_string(t.pos));
        return Expr::leaf(*var);
    }
};

void check_base_shape(const Expr& e, std::size_t pos) {
    if (e.is_leaf) {
        if (e.var != Var::ji && e.var != Var::ci && e.var != Var::bi)
            syntax_error(std::string("variable ") + var_name(e.var) +
                             " not allowed in base",
                         pos);
        return;
    }
    if (e.op != ExprOp::add && e.op != ExprOp::max)
        syntax_error(std::string("operator ") + op_name(e.op) +
                         " not allowed in base",
                     pos);
    check_base_shape(e.kids[0], pos);
    check_base_shape(e.kids[1], pos);
}

} // namespace

Formula parse_formula(const std::string& text) {
    std::vector<Token> toks = tokenize(text);
    Parser p{toks};

    p.expect("(");
    {
        Token t = p.take();
        if (t.text != "rt")
            syntax_error("expected 'rt', got '" + t.text + "'", t.pos);
    }
    std::size_t base_pos = p.peek().pos;
    Formula f;
    f.base = p.parse_expr();
    check_base_shape(f.base, base_pos);

    // Interference summation: (isum <num> <k01>).
    {
        const Token& t = p.peek();
        if (!(t.text == "(" && p.at + 1 < toks.size() &&
              toks[p.at + 1].text == "isum"))
            throw Error(Errc::missing_isum, "expected (isum <num> <k01>) at offset " +
                                                std::to_string(t.pos));
        p.take();
        p.take();
    }
    f.num = p.parse_expr();
    {
        Token t = p.take();
        if (t.text == "0")
            f.k01 = 0;
        else if (t.text == "1")
            f.k01 = 1;
        else
            syntax_error("k01 must be 0 or 1, got '" + t.text + "'", t.pos);
    }
    p.expect(")");
    p.expect(")");
    if (p.at != toks.size())
        syntax_error("trailing tokens", toks[p.at].pos);
    return f;
}

// --- Grammar and genotype mapping ---------------------------------------------

namespace {

Grammar::Sym term(std::string tok) { return {-1, std::move(tok)}; }
Grammar::Sym nt(int idx) { return {idx, ""}; }

enum NtIdx { nt_rt = 0, nt_base, nt_bterm, nt_isum, nt_k01, nt_num, nt_var };

} // namespace

Grammar Grammar::standard() {
    Grammar g;
    g.rules.resize(7);
    g.start = nt_rt;

    g.rules[nt_rt] = {{term("("), term("rt"), nt(nt_base), nt(nt_isum), term(")")}};
    g.rules[nt_base] = {
        {nt(nt_bterm)},
        {term("("), term("+"), nt(nt_base), nt(nt_bterm), term(")")},
        {term("("), term("max"), nt(nt_base), nt(nt_bterm), term(")")},
    };
    g.rules[nt_bterm] = {{term("Ji")}, {term("Ci")}, {term("Bi")}};
    g.rules[nt_isum] = {
        {term("("), term("isum"), nt(nt_num), nt(nt_k01), term(")")}};
    g.rules[nt_k01] = {{term("1")}, {term("0")}};
    g.rules[nt_num] = {
        {nt(nt_var)},
        {term("("), term("+"), nt(nt_num), nt(nt_num), term(")")},
        {term("("), term("-"), nt(nt_num), nt(nt_num), term(")")},
        {term("("), term("min"), nt(nt_num), nt(nt_num), term(")")},
        {term("("), term("max"), nt(nt_num), nt(nt_num), term(")")},
    };
    g.rules[nt_var].clear();
    for (int i = 0; i < 10; ++i)
        g.rules[nt_var].push_back({term(var_name(static_cast<Var>(i)))});
    return g;
}

Grammar Grammar::single_word(const Formula& f) {
    Grammar g;
    g.rules.resize(1);
    g.start = 0;
    Production p;
    std::string rendered = render_formula(f);
    for (const Token& t : tokenize(rendered))
        p.push_back(term(t.text));
    g.rules[0] = {std::move(p)};
    return g;
}

std::optional<Formula> map_genotype(const Genotype& g, const Grammar& grammar) {
    if (g.codons.empty())
        throw Error(Errc::invalid_config, "genotype must be non-empty");
    if (g.max_wraps < 0)
        throw Error(Errc::invalid_config, "max_wraps must be >= 0");

    // Leftmost derivation via an explicit symbol stack (production symbols
    // pushed in reverse so the leftmost nonterminal is always on top).
    std::vector<Grammar::Sym> stack{nt(grammar.start)};
    std::string word;
    std::size_t codon_at = 0;
    int wraps = 0;
    // Guards runaway custom grammars; the standard grammar is bounded by the
    // codon budget alone.
    long expansions_left = 1'000'000;

    while (!stack.empty()) {
        Grammar::Sym sym = stack.back();
        stack.pop_back();
        if (sym.nt < 0) {
            if (!word.empty())
                word += ' ';
            word += sym.tok;
            continue;
        }
        const auto& prods = grammar.rules[sym.nt];
        std::size_t pick = 0;
        if (prods.size() > 1) {
            if (codon_at == g.codons.size()) {
                if (wraps == g.max_wraps)
                    return std::nullopt; // MappingIncomplete
                ++wraps;
                codon_at = 0;
            }
            pick = g.codons[codon_at++] % prods.size();
        }
        if (--expansions_left < 0)
            return std::nullopt;
        const auto& chosen = prods[pick];
        for (auto it = chosen.rbegin(); it != chosen.rend(); ++it)
            stack.push_back(*it);
    }
    return parse_formula(word);
}

// --- Evaluation ----------------------------------------------------------------

BoundMessage BoundMessage::bind(const MessageSet& set, std::size_t idx) {
    const Message& mi = set.at(idx);
    BoundMessage b;
    b.ji = mi.j;
    b.ci = mi.c;
    b.bi = blocking_term(set, idx);
    b.di = mi.d;
    b.ti = mi.t;
    b.hp.reserve(idx);
    for (const Message& mk : set.hp(idx))
        b.hp.push_back({mk.j, mk.c, mk.d, mk.t});
    return b;
}

CompiledFormula::CompiledFormula(const Formula& f) : k01_(f.k01) {
    self_ref_ = f.self_referential();
    auto emit = [](const Expr& e, std::vector<Ins>& prog, std::size_t& depth) {
        // Postfix emission; track worst-case stack depth.
        struct Frame {
            const Expr* node;
            int stage;
        };
        std::vector<Frame> work{{&e, 0}};
        std::size_t cur = 0;
        while (!work.empty()) {
            Frame& f2 = work.back();
            if (f2.node->is_leaf) {
                prog.push_back({true, f2.node->var, ExprOp::add});
                ++cur;
                depth = std::max(depth, cur);
                work.pop_back();
                continue;
            }
            if (f2.stage == 0) {
                f2.stage = 1;
                work.push_back({&f2.node->kids[0], 0});
            } else if (f2.stage == 1) {
                f2.stage = 2;
                work.push_back({&f2.node->kids[1], 0});
            } else {
                prog.push_back({false, Var::ri, f2.node->op});
                --cur; // two pops, one push
                work.pop_back();
            }
        }
    };
    std::size_t depth = 0;
    emit(f.base, base_, depth);
    std::size_t depth_num = 0;
    emit(f.num, num_, depth_num);
    stack_need_ = std::max({depth, depth_num, std::size_t{1}});
}

Ticks CompiledFormula::run(const std::vector<Ins>& prog,
                           const std::array<Ticks, 10>& vars,
                           std::vector<Ticks>& stack) const {
    stack.clear();
    for (const Ins& ins : prog) {
        if (ins.push) {
            stack.push_back(vars[static_cast<int>(ins.v)]);
            continue;
        }
        Ticks b = stack.back();
        stack.pop_back();
        Ticks a = stack.back();
        switch (ins.op) {
        case ExprOp::add: stack.back() = checked_add(a, b); break;
        case ExprOp::sub: stack.back() = checked_sub(a, b); break;
        case ExprOp::min: stack.back() = std::min(a, b); break;
        case ExprOp::max: stack.back() = std::max(a, b); break;
        }
    }
    return stack.back();
}

EvalOutcome CompiledFormula::eval(const BoundMessage& m,
                                  const AnalysisConfig& cfg) const {
    std::array<Ticks, 10> vars{};
    vars[static_cast<int>(Var::ji)] = m.ji;
    vars[static_cast<int>(Var::ci)] = m.ci;
    vars[static_cast<int>(Var::bi)] = m.bi;
    vars[static_cast<int>(Var::di)] = m.di;
    vars[static_cast<int>(Var::ti)] = m.ti;

    std::vector<Ticks> stack;
    stack.reserve(stack_need_);

    try {
        const Ticks base_val = run(base_, vars, stack);
        auto apply = [&](Ticks r) {
            vars[static_cast<int>(Var::ri)] = r;
            Ticks acc = base_val;
            for (const BoundMessage::K& k : m.hp) {
                vars[static_cast<int>(Var::jk)] = k.jk;
                vars[static_cast<int>(Var::ck)] = k.ck;
                vars[static_cast<int>(Var::dk)] = k.dk;
                vars[static_cast<int>(Var::tk)] = k.tk;
                Ticks num = run(num_, vars, stack);
                Ticks inst = checked_add(floor_div(num, k.tk), k01_);
                acc = checked_add(acc, checked_mul(inst, k.ck));
            }
            return acc;
        };

        if (!self_ref_)
            return EvalOutcome::val(apply(0), 1);

        const Ticks cap = cfg.cap_for(m.di, m.ti);
        Ticks prev = checked_add(m.ji, m.ci);
        for (int it = 1; it <= cfg.iter_limit; ++it) {
            Ticks next = apply(prev);
            if (next == prev)
                return EvalOutcome::val(next, it);
            if (next > cap || next < -cap)
                return EvalOutcome::divergent(DivergenceCause::cap_exceeded, it);
            prev = next;
        }
        return EvalOutcome::divergent(DivergenceCause::iteration_limit,
                                      cfg.iter_limit);
    } catch (const Error& e) {
        if (e.code() == Errc::overflow)
            return EvalOutcome::divergent(DivergenceCause::overflow, 0);
        throw;
    }
}

EvalOutcome eval_formula(const Formula& f, const MessageSet& set,
                         std::size_t idx, const AnalysisConfig& cfg) {
    CompiledFormula cf(f);
    return cf.eval(BoundMessage::bind(set, idx), cfg);
}

EvalOutcome eval_formula(const Formula& f, const MessageSet& set,
                         const std::string& id, const AnalysisConfig& cfg) {
    return eval_formula(f, set, set.index_of(id), cfg);
}

} // namespace rtevo
