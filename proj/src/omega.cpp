#include "mpa/omega.hpp"

#include <algorithm>
#include <cctype>

namespace mpa {

SumExpr operator*(const SumExpr &a, const SumExpr &b)
{
    SumExpr out;
    for (const auto &s : a.terms) {
        for (const auto &t : b.terms) {
            ProductExpr p(s.prefactor * t.prefactor, s.factors);
            p.factors.insert(p.factors.end(), t.factors.begin(), t.factors.end());
            out.terms.push_back(std::move(p));
        }
    }
    return out;
}

SumExpr operator+(SumExpr a, const SumExpr &b)
{
    a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
    return a;
}

namespace {

struct Split {
    Monomial prefactor;
    std::vector<Monomial> binomials;
    std::vector<Monomial> geometrics;
};

Split split(const ProductExpr &e)
{
    Split s{e.prefactor, {}, {}};
    for (const auto &f : e.factors) {
        switch (f.kind) {
        case Factor::Kind::mono: s.prefactor = s.prefactor * f.m; break;
        case Factor::Kind::one_plus: s.binomials.push_back(f.m); break;
        case Factor::Kind::geom_inv: s.geometrics.push_back(f.m); break;
        }
    }
    return s;
}

} // namespace

LaurentPoly expand_product(const ProductExpr &e, ContextPtr ctx)
{
    const auto s = split(e);
    return expand_factored(s.prefactor, s.binomials, s.geometrics, std::move(ctx));
}

LaurentPoly expand_expr(const SumExpr &e, ContextPtr ctx)
{
    LaurentPoly out(ctx);
    for (const auto &t : e.terms) {
        out += expand_product(t, ctx);
    }
    return out;
}

std::int64_t product_min_degree(const ProductExpr &e, const TruncationContext &ctx)
{
    const auto s = split(e);
    return factored_min_degree(s.prefactor, s.binomials, ctx);
}

SumExpr zero_variable(const SumExpr &e, std::size_t var)
{
    SumExpr out;
    for (const auto &t : e.terms) {
        if (t.prefactor.exponents.at(var) != 0) {
            continue;
        }
        ProductExpr kept(t.prefactor);
        bool vanishes = false;
        for (const auto &f : t.factors) {
            if (f.m.exponents.at(var) == 0) {
                kept.factors.push_back(f);
            } else if (f.kind == Factor::Kind::mono) {
                vanishes = true;
            }
        }
        if (!vanishes) {
            out.terms.push_back(std::move(kept));
        }
    }
    return out;
}

SumExpr chi_block(const Monomial &x, const std::string &lambda, int k, const TruncationContext &ctx)
{
    if (k < 0) {
        throw std::invalid_argument("chi block needs k >= 0");
    }
    const auto l = ctx.variable(lambda);
    const auto xl = x * l;
    SumExpr out;
    out.terms.emplace_back(ctx.one(), std::vector{Factor::one_plus(x * pow(l, 1 - k)), Factor::geom_inv(xl * xl)});
    return out;
}

ContextPtr drop_lambda(const TruncationContext &ctx)
{
    if (ctx.is_widened()) {
        throw std::invalid_argument("omega needs a base context");
    }
    auto table = std::make_shared<VarTable>();
    std::vector<std::int64_t> weights;
    std::vector<std::optional<Exponent>> caps;
    for (std::size_t i = 0; i < ctx.nvars(); ++i) {
        if (ctx.vars().is_lambda(i)) {
            continue;
        }
        table->add(ctx.vars().name(i), VarRole::parameter);
        weights.push_back(ctx.weight(i));
        caps.push_back(ctx.cap(i));
    }
    return std::make_shared<TruncationContext>(table, weights, ctx.order(), caps);
}

LaurentPoly omega_ge(const LaurentPoly &p)
{
    const auto &src = p.context();
    auto target = drop_lambda(src);
    std::vector<std::size_t> keep;
    std::vector<std::size_t> lambdas;
    for (std::size_t i = 0; i < src.nvars(); ++i) {
        (src.vars().is_lambda(i) ? lambdas : keep).push_back(i);
    }
    LaurentPoly out(target);
    Exponents e(keep.size());
    for (const auto &[src_e, c] : p.terms()) {
        if (std::any_of(lambdas.begin(), lambdas.end(), [&](std::size_t i) { return src_e[i] < 0; })) {
            continue;
        }
        for (std::size_t j = 0; j < keep.size(); ++j) {
            e[j] = src_e[keep[j]];
        }
        out.add_term(e, c);
    }
    return out;
}

// ----------------------------------------------------------------- rules

std::vector<RuleKind> lemma_rules()
{
    return {RuleKind::r0, RuleKind::r01, RuleKind::r1, RuleKind::r2, RuleKind::r3, RuleKind::r4,
            RuleKind::r5, RuleKind::r6,  RuleKind::r7, RuleKind::r8, RuleKind::r9};
}

namespace {

std::string rule_kind_name(RuleKind k)
{
    switch (k) {
    case RuleKind::base: return "BASE";
    case RuleKind::r0: return "R0";
    case RuleKind::r01: return "R01";
    case RuleKind::r1: return "R1";
    case RuleKind::r2: return "R2";
    case RuleKind::r3: return "R3";
    case RuleKind::r4: return "R4";
    case RuleKind::r5: return "R5";
    case RuleKind::r6: return "R6";
    case RuleKind::r7: return "R7";
    case RuleKind::r8: return "R8";
    case RuleKind::r9: return "R9";
    case RuleKind::chi: return "CHI";
    }
    return "?";
}

struct RuleSides {
    SumExpr lhs; // argument of Omega, or the direct sum for CHI
    SumExpr rhs;
};

RuleSides rule_sides(const RuleId &r, const TruncationContext &c)
{
    const auto x = c.variable("x");
    const auto y = c.variable("y");
    const auto z = c.variable("z");
    const auto w = c.variable("w");
    const auto l = c.variable("l");
    const auto one = c.one();
    auto l_pow = [&](int k) { return pow(l, k); };
    using F = Factor;
    auto product = [](Monomial pre, std::vector<Factor> f) {
        SumExpr s;
        s.terms.emplace_back(std::move(pre), std::move(f));
        return s;
    };
    // Common denominators.
    const std::vector<Factor> d_x2_y2{F::geom_inv(x * l_pow(2)), F::geom_inv(y / l_pow(2))};
    const std::vector<Factor> d_x1_y2{F::geom_inv(x * l), F::geom_inv(y / l_pow(2))};
    const std::vector<Factor> d_x2_y1{F::geom_inv(x * l_pow(2)), F::geom_inv(y / l)};
    const std::vector<Factor> r_x_xy{F::geom_inv(x), F::geom_inv(x * y)};
    const std::vector<Factor> r_x_x2y{F::geom_inv(x), F::geom_inv(x * x * y)};
    const std::vector<Factor> r_x_xy2{F::geom_inv(x), F::geom_inv(x * y * y)};
    auto with = [](std::vector<Factor> base, std::initializer_list<Factor> extra) {
        base.insert(base.end(), extra.begin(), extra.end());
        return base;
    };

    switch (r.kind) {
    case RuleKind::base:
        return {product(l_pow(-r.param), {F::geom_inv(x * l), F::geom_inv(y / l)}),
                product(pow(x, r.param), r_x_xy)};
    case RuleKind::r0:
        return {product(l_pow(-2), with(d_x2_y2, {F::one_plus(z / l)})),
                product(x, with(r_x_xy, {F::one_plus(x * z)}))};
    case RuleKind::r01:
        return {product(l_pow(-2), with(d_x2_y2, {F::one_plus(z * l)})), product(x, with(r_x_xy, {F::one_plus(z)}))};
    case RuleKind::r1:
        return {product(l_pow(-1), with(d_x2_y2, {F::one_plus(z * l)})),
                product(x, r_x_xy) + product(z, r_x_xy)};
    case RuleKind::r2: return {product(l_pow(-1), d_x1_y2), product(x, r_x_x2y)};
    case RuleKind::r3:
        return {product(l_pow(-1), d_x2_y1), product(x, with(r_x_xy2, {F::one_plus(y)}))};
    case RuleKind::r4: return {product(one, with(d_x2_y2, {F::one_plus(z * l)})), product(one, with(r_x_xy, {F::one_plus(z)}))};
    case RuleKind::r5: return {product(one, d_x1_y2), product(one, r_x_x2y)};
    case RuleKind::r6: return {product(one, d_x2_y1), product(one, with(r_x_xy2, {F::one_plus(x * y)}))};
    case RuleKind::r7:
        return {product(one, with(d_x1_y2, {F::one_plus(z / l_pow(4))})),
                product(one, with(r_x_x2y, {F::one_plus(pow(x, 4) * z)}))};
    case RuleKind::r8:
        return {product(one, with(d_x2_y2, {F::one_plus(w * l), F::one_plus(z / l_pow(4))})),
                product(one, with(r_x_xy, {F::one_plus(w), F::one_plus(x * x * z)}))};
    case RuleKind::r9:
        return {product(one, with(d_x2_y2, {F::one_plus(w / l_pow(2)), F::one_plus(z / l)})),
                product(one, with(r_x_xy, {F::one_plus(w * x), F::one_plus(x * z)}))};
    case RuleKind::chi: return {SumExpr{}, chi_block(x, "l", r.param, c)};
    }
    throw std::logic_error("unknown rule");
}

ContextPtr rule_context(std::int64_t order)
{
    return ContextBuilder().var("x", 1).var("y", 1).var("z", 1).var("w", 1).lambda("l").order(order).build();
}

} // namespace

std::string RuleId::name() const
{
    std::string out = rule_kind_name(kind);
    if (kind == RuleKind::base || kind == RuleKind::chi) {
        out += "(" + std::to_string(param) + ")";
    }
    return out;
}

Report check_rule(const RuleId &r, std::int64_t order)
{
    if (order < 1) {
        throw std::invalid_argument("rule checks need order >= 1");
    }
    if (r.kind == RuleKind::base && r.param < 0) {
        throw std::invalid_argument("BASE needs A >= 0");
    }
    if (r.kind == RuleKind::chi && r.param < 0) {
        throw std::invalid_argument("CHI needs k >= 0");
    }
    Stopwatch clock;
    Report rep;
    rep.check = "rule";
    rep.params["rule"] = rule_kind_name(r.kind);
    if (r.kind == RuleKind::base) {
        rep.params["A"] = r.param;
    }
    if (r.kind == RuleKind::chi) {
        rep.params["k"] = r.param;
    }
    if (!r.zero_vars.empty()) {
        rep.params["zero"] = std::vector<std::string>(r.zero_vars.begin(), r.zero_vars.end());
    }
    rep.order = order;

    auto ctx = rule_context(order);
    auto sides = rule_sides(r, *ctx);
    for (const auto &v : r.zero_vars) {
        const auto i = ctx->vars().index(v);
        if (ctx->vars().is_lambda(i)) {
            throw std::invalid_argument("cannot zero the lambda variable");
        }
        sides.lhs = zero_variable(sides.lhs, i);
        sides.rhs = zero_variable(sides.rhs, i);
    }

    if (r.kind == RuleKind::chi) {
        // Direct sum over n against the closed form; no Omega involved.
        LaurentPoly direct(ctx);
        const auto x = ctx->variable("x");
        const auto l = ctx->variable("l");
        for (std::int64_t n = 0; n <= order; ++n) {
            const std::int64_t shift = n - (n % 2 != 0 ? r.param : 0);
            direct.add_term((pow(x, n) * pow(l, shift)).exponents, 1);
        }
        const auto closed = expand_expr(sides.rhs, ctx);
        compare_sides(rep, {{"direct", &direct}, {"closed", &closed}});
    } else {
        const auto lhs = omega_ge(expand_expr(sides.lhs, ctx));
        // The closed side is lambda-free, so omega_ge only moves it to the output context.
        const auto rhs = omega_ge(expand_expr(sides.rhs, ctx));
        compare_sides(rep, {{"omega", &lhs}, {"closed", &rhs}});
    }
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

std::vector<Report> all_rules(std::int64_t order, int max_a, int max_k)
{
    std::vector<Report> out;
    {
        Stopwatch clock;
        Report base;
        base.check = "rule";
        base.params["rule"] = "BASE";
        base.params["A"] = Json::array();
        base.order = order;
        for (int a = 0; a <= max_a; ++a) {
            base.params["A"].push_back(a);
            auto r = check_rule(RuleId{RuleKind::base, a, {}}, order);
            if (base.sides.empty()) {
                base.sides = r.sides;
            }
            if (!r.passed() && !base.first_mismatch) {
                base.first_mismatch = r.first_mismatch;
                base.notes.push_back("fails at A=" + std::to_string(a));
            }
        }
        base.elapsed_ms = clock.elapsed_ms();
        out.push_back(std::move(base));
    }
    for (auto k : lemma_rules()) {
        out.push_back(check_rule(RuleId{k, 0, {}}, order));
    }
    for (int k = 0; k <= max_k; ++k) {
        out.push_back(check_rule(RuleId{RuleKind::chi, k, {}}, order));
    }
    return out;
}

// ----------------------------------------------------------- crude forms

std::optional<CrudeMode> parse_crude_mode(std::string_view s)
{
    std::string lower;
    for (char c : s) {
        lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (lower == "exact") {
        return CrudeMode::exact;
    }
    if (lower == "paired") {
        return CrudeMode::paired;
    }
    if (lower == "bounded") {
        return CrudeMode::bounded;
    }
    return std::nullopt;
}

std::string crude_mode_name(CrudeMode m)
{
    switch (m) {
    case CrudeMode::exact: return "exact";
    case CrudeMode::paired: return "paired";
    case CrudeMode::bounded: return "bounded";
    }
    return "?";
}

bool crude_supported(const FamilySpec &f, CrudeMode mode)
{
    switch (f.tag) {
    case FamilyTag::all: return mode == CrudeMode::bounded;
    case FamilyTag::g1:
    case FamilyTag::g2: return mode == CrudeMode::exact;
    case FamilyTag::g1p:
    case FamilyTag::g2p: return mode == CrudeMode::paired;
    case FamilyTag::p1:
    case FamilyTag::p2:
    case FamilyTag::p1p:
    case FamilyTag::p2p: return mode == CrudeMode::exact || mode == CrudeMode::bounded;
    case FamilyTag::gen: return false;
    }
    return false;
}

LengthFilter crude_length_filter(CrudeMode mode, int n)
{
    switch (mode) {
    case CrudeMode::exact: return LengthFilter::exact(n);
    case CrudeMode::paired: return LengthFilter::paired(n);
    case CrudeMode::bounded: return LengthFilter::bounded(n);
    }
    return LengthFilter::unbounded();
}

namespace {

// One inequality  sum_j linear[j] p_j + sum_j parity[j] chi(p_j) + constant >= 0
// over the parts p_1..p_l; each becomes one lambda.
struct Inequality {
    std::vector<int> linear;
    std::vector<int> parity;
    int constant = 0;
};

// Parts are p_j = scale[j] * a_j with independent a_j >= 0.
struct System {
    std::vector<int> scale;
    std::vector<Inequality> rows;
};

System family_system(const FamilySpec &f, CrudeMode mode, int n)
{
    const bool paired = mode == CrudeMode::paired;
    const int parts = paired ? 2 * n : n;
    System s;
    s.scale.assign(static_cast<std::size_t>(parts), 1);
    auto row = [&]() {
        Inequality q;
        q.linear.assign(static_cast<std::size_t>(parts), 0);
        q.parity.assign(static_cast<std::size_t>(parts), 0);
        return q;
    };
    // Position-parity families: which 1-based positions hold even parts.
    auto even_positions = [&](int parity_of_even) {
        for (int j = 1; j <= parts; ++j) {
            if (j % 2 == parity_of_even) {
                s.scale[static_cast<std::size_t>(j - 1)] = 2;
            }
        }
    };
    switch (f.tag) {
    case FamilyTag::g1p:
    case FamilyTag::p1p: even_positions(0); break;
    case FamilyTag::g2p:
    case FamilyTag::p2p: even_positions(1); break;
    default: break;
    }

    const bool exact = mode == CrudeMode::exact;
    for (int i = 1; i <= parts; ++i) {
        auto q = row();
        const auto a = static_cast<std::size_t>(i - 1);
        q.linear[a] = 1;
        if (i < parts) {
            const auto b = static_cast<std::size_t>(i);
            q.linear[b] = -1;
            switch (f.tag) {
            case FamilyTag::g1:
            case FamilyTag::g2:
                q.constant = -2;
                q.parity[a] = -1;
                break;
            case FamilyTag::g1p:
            case FamilyTag::g2p: q.constant = -1; break;
            case FamilyTag::p1: q.parity[b] = -3; break;
            case FamilyTag::p2: q.parity[a] = -3; break;
            default: break;
            }
        } else {
            // Smallest part.
            switch (f.tag) {
            case FamilyTag::g1:
            case FamilyTag::p1:
            case FamilyTag::p1p:
            case FamilyTag::p2p: q.constant = exact ? -1 : 0; break;
            case FamilyTag::g2: q.constant = -2; break;
            case FamilyTag::p2:
                if (exact) {
                    q.constant = -2;
                } else {
                    q.parity[a] = -3;
                }
                break;
            default: break;
            }
        }
        s.rows.push_back(std::move(q));
    }
    return s;
}

std::string lambda_var(std::size_t i)
{
    return "l" + std::to_string(i);
}

} // namespace

CrudeForm crude_form(const FamilySpec &f, CrudeMode mode, int n, std::int64_t degree, std::optional<Exponent> cap)
{
    if (!crude_supported(f, mode)) {
        throw std::invalid_argument("unsupported crude form: family " + f.name() + " with mode "
                                    + crude_mode_name(mode));
    }
    if (n < 1) {
        throw std::invalid_argument("crude forms need n >= 1");
    }
    const auto sys = family_system(f, mode, n);
    const auto parts = sys.scale.size();
    ContextBuilder b;
    for (std::size_t j = 1; j <= parts; ++j) {
        b.var(refined_var(j), 1, cap);
    }
    for (std::size_t i = 1; i <= sys.rows.size(); ++i) {
        b.lambda(lambda_var(i));
    }
    auto ctx = b.order(degree).build();

    std::vector<Monomial> lam;
    for (std::size_t i = 1; i <= sys.rows.size(); ++i) {
        lam.push_back(ctx->variable(lambda_var(i)));
    }
    Monomial prefactor = ctx->one();
    for (std::size_t i = 0; i < sys.rows.size(); ++i) {
        prefactor = prefactor * pow(lam[i], sys.rows[i].constant);
    }
    ProductExpr term(prefactor);
    for (std::size_t j = 0; j < parts; ++j) {
        const int scale = sys.scale[j];
        Monomial y = pow(ctx->variable(refined_var(j + 1)), scale);
        Monomial w = ctx->one();
        for (std::size_t i = 0; i < sys.rows.size(); ++i) {
            y = y * pow(lam[i], sys.rows[i].linear[j] * scale);
            // An even scale makes the part even whatever a_j is.
            if (scale % 2 == 1) {
                w = w * pow(lam[i], sys.rows[i].parity[j]);
            }
        }
        if (w.is_unit()) {
            term.factors.push_back(Factor::geom_inv(y));
        } else {
            // sum_a y^a w^{chi(a)} = (1 + y w) / (1 - y^2)
            term.factors.push_back(Factor::one_plus(y * w));
            term.factors.push_back(Factor::geom_inv(y * y));
        }
    }
    CrudeForm out;
    out.expr.terms.push_back(std::move(term));
    out.ctx = std::move(ctx);
    out.parts = static_cast<int>(parts);
    return out;
}

Report verify_crude(const FamilySpec &f, CrudeMode mode, int n, std::int64_t degree, std::optional<Exponent> cap)
{
    Stopwatch clock;
    Report rep;
    rep.check = "crude";
    rep.params["family"] = f.name();
    rep.params["mode"] = crude_mode_name(mode);
    rep.params["n"] = n;
    rep.params["degree"] = degree;
    if (cap) {
        rep.params["cap"] = *cap;
    } else {
        rep.params["cap"] = nullptr;
    }
    rep.order = degree;

    const auto crude = crude_form(f, mode, n, degree, cap);
    const auto omega = omega_ge(expand_expr(crude.expr, crude.ctx));
    const auto brute = brute_refined(f, crude_length_filter(mode, n), omega.context_ptr());
    if (f.tag == FamilyTag::all) {
        const auto &c = omega.context();
        std::vector<Monomial> geoms;
        Monomial big_x = c.one();
        for (int i = 1; i <= crude.parts; ++i) {
            big_x = big_x * c.variable(refined_var(static_cast<std::size_t>(i)));
            geoms.push_back(big_x);
        }
        const auto closed = expand_factored(c.one(), {}, geoms, omega.context_ptr());
        compare_sides(rep, {{"omega", &omega}, {"brute", &brute}, {"closed", &closed}});
        rep.notes.push_back("closed form prod_{i=1}^{" + std::to_string(crude.parts) + "} 1/(1-X_i)");
    } else {
        compare_sides(rep, {{"omega", &omega}, {"brute", &brute}});
    }
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

} // namespace mpa
