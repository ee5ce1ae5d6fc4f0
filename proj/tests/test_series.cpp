#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mpa/series.hpp"

using namespace mpa;

namespace {

using Powers = std::initializer_list<std::pair<std::string_view, std::int64_t>>;

LaurentPoly mono(const ContextPtr &ctx, Powers p, const Coeff &c = 1)
{
    return LaurentPoly::from_monomial(ctx, ctx->monomial(p), c);
}

LaurentPoly one(const ContextPtr &ctx) { return LaurentPoly::constant(ctx, 1); }

ContextPtr q_ctx(std::int64_t n) { return ContextBuilder().var("q", 1).order(n).build(); }

ContextPtr zq_ctx(std::int64_t n) { return ContextBuilder().var("z", 0).var("q", 1).order(n).build(); }

// Random sparse series over (q weight 1, z weight 0, w weight 1) with
// non-negative weighted degree, at most 30 terms.
struct Gen {
    std::mt19937_64 rng{20240611};

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    LaurentPoly series(const ContextPtr &ctx)
    {
        LaurentPoly p(ctx);
        const int terms = uniform(0, 30);
        for (int t = 0; t < terms; ++t) {
            Exponents e{checked_exponent(uniform(0, 6)), checked_exponent(uniform(-3, 3)),
                        checked_exponent(uniform(0, 6))};
            p.add_term(e, Coeff(uniform(-5, 5)));
        }
        return p;
    }

    Monomial positive_monomial(const ContextPtr &ctx)
    {
        for (;;) {
            Monomial m(Exponents{checked_exponent(uniform(0, 3)), checked_exponent(uniform(-2, 2)),
                                 checked_exponent(uniform(0, 3))},
                       uniform(0, 1) == 0 ? 1 : -1);
            if (ctx->degree(m) > 0) {
                return m;
            }
        }
    }
};

ContextPtr qzw_ctx(std::int64_t n) { return ContextBuilder().var("q", 1).var("z", 0).var("w", 1).order(n).build(); }

} // namespace

TEST_CASE("poly_add examples")
{
    const auto ctx = q_ctx(5);
    const auto p = mono(ctx, {{"q", 1}}) + mono(ctx, {{"q", 3}}, 2);
    CHECK(LaurentPoly(ctx) + p == p);
    CHECK(poly_add(mono(ctx, {{"q", 1}}) + mono(ctx, {{"q", 2}}), -mono(ctx, {{"q", 1}})) == mono(ctx, {{"q", 2}}));
    CHECK((one(ctx) - mono(ctx, {{"q", 1}})) + (one(ctx) + mono(ctx, {{"q", 1}})) == LaurentPoly::constant(ctx, 2));
}

TEST_CASE("poly_add and poly_mul reject mixed contexts")
{
    const auto a = q_ctx(5);
    const auto b = q_ctx(6);
    CHECK_THROWS_AS(poly_add(one(a), one(b)), ContextMismatch);
    CHECK_THROWS_AS(poly_mul(one(a), one(b)), ContextMismatch);
}

TEST_CASE("poly_mul examples")
{
    const auto ctx = q_ctx(3);
    auto geo = one(ctx);
    for (int i = 1; i <= 3; ++i) {
        geo += mono(ctx, {{"q", i}});
    }
    CHECK(poly_mul(one(ctx) - mono(ctx, {{"q", 1}}), geo) == one(ctx));
    CHECK(poly_mul(geo, one(ctx)) == geo);

    const auto zq = zq_ctx(3);
    const auto lhs = poly_mul(one(zq) + mono(zq, {{"z", 1}, {"q", 1}}), one(zq) + mono(zq, {{"z", 2}, {"q", 2}}));
    const auto rhs = one(zq) + mono(zq, {{"z", 1}, {"q", 1}}) + mono(zq, {{"z", 2}, {"q", 2}})
                     + mono(zq, {{"z", 3}, {"q", 3}});
    CHECK(lhs == rhs);
}

TEST_CASE("poly_coeff examples")
{
    const auto ctx = zq_ctx(4);
    CHECK(poly_coeff(one(ctx), ctx->one()) == 1);
    const auto b = one(ctx) + mono(ctx, {{"z", 1}, {"q", 1}});
    const auto sq = b * b;
    CHECK(poly_coeff(sq, ctx->monomial({{"z", 2}, {"q", 2}})) == 1);
    CHECK(poly_coeff(sq, ctx->monomial({{"z", 1}, {"q", 1}})) == 2);
    CHECK(poly_coeff(sq, ctx->monomial({{"z", 5}, {"q", 1}})) == 0);
}

TEST_CASE("exponent overflow is detected")
{
    const auto ctx = q_ctx(5);
    const auto big = ctx->monomial({{"q", std::numeric_limits<Exponent>::max()}});
    CHECK_THROWS_AS(big * ctx->variable("q"), std::overflow_error);
    CHECK_THROWS_AS(checked_exponent(std::int64_t{1} << 40), std::overflow_error);
}

TEST_CASE("context validation")
{
    CHECK_THROWS_AS(ContextBuilder().var("z", 0).order(3).build(), std::invalid_argument);
    CHECK_THROWS_AS(ContextBuilder().var("q", 1).var("q", 1).order(3).build(), std::invalid_argument);
    CHECK_THROWS_AS(ContextBuilder().var("q", -1).order(3).build(), std::invalid_argument);
    const auto ctx = ContextBuilder().var("q", 1).lambda("l").order(3).build();
    CHECK(ctx->weight(1) == 0);
    CHECK(ctx->vars().is_lambda(1));
}

TEST_CASE("caps bound every stored exponent")
{
    const auto ctx = ContextBuilder().var("x", 1, 2).var("y", 1).order(10).build();
    auto p = one(ctx) + mono(ctx, {{"x", 1}});
    p = p * p * p;
    CHECK(poly_coeff(p, ctx->monomial({{"x", 2}})) == 3);
    CHECK(poly_coeff(p, ctx->monomial({{"x", 3}})) == 0);
    CHECK(p.size() == 3);
}

TEST_CASE("substitute_monomial examples")
{
    const auto src = ContextBuilder().var("x1", 1).var("x2", 1).order(20).build();
    const auto m = mono(src, {{"x1", 4}, {"x2", 2}});
    const auto q = q_ctx(20);
    CHECK(substitute_monomial(m, {{"x1", q->variable("q")}, {"x2", q->variable("q")}}, q) == mono(q, {{"q", 6}}));
    const auto zq = zq_ctx(20);
    CHECK(substitute_monomial(m,
                              {{"x1", zq->monomial({{"z", 1}, {"q", 1}})}, {"x2", zq->monomial({{"z", -1}, {"q", 1}})}},
                              zq)
          == mono(zq, {{"z", 2}, {"q", 6}}));
    CHECK(substitute_monomial(m, {{"x1", zq->monomial({{"z", 1}, {"q", 1}})}, {"x2", zq->monomial({{"z", -1}})}}, zq)
          == mono(zq, {{"z", 2}, {"q", 4}}));
    CHECK_THROWS_AS(substitute_monomial(m, {{"x1", q->variable("q")}}, q), std::invalid_argument);
}

TEST_CASE("expand_geometric examples")
{
    const auto q = q_ctx(3);
    CHECK(expand_geometric(q->variable("q"), q)
          == one(q) + mono(q, {{"q", 1}}) + mono(q, {{"q", 2}}) + mono(q, {{"q", 3}}));
    const auto xy = ContextBuilder().var("x", 1).var("y", 1).order(3).build();
    CHECK(expand_geometric(xy->monomial({{"x", 1}, {"y", 1}}), xy) == one(xy) + mono(xy, {{"x", 1}, {"y", 1}}));
    const auto zq = zq_ctx(4);
    CHECK(expand_geometric(zq->monomial({{"z", 2}, {"q", 2}}), zq)
          == one(zq) + mono(zq, {{"z", 2}, {"q", 2}}) + mono(zq, {{"z", 4}, {"q", 4}}));
    CHECK_THROWS_AS(expand_geometric(zq->monomial({{"z", 1}}), zq), NonContracting);
    CHECK_THROWS_AS(expand_geometric(zq->monomial({{"q", -1}}), zq), NonContracting);
}

TEST_CASE("pochhammer_finite examples")
{
    const auto ctx = q_ctx(6);
    const auto q = ctx->variable("q");
    CHECK(pochhammer_finite(q, q, 0, ctx) == one(ctx));
    CHECK(pochhammer_finite(q, q, 2, ctx)
          == one(ctx) - mono(ctx, {{"q", 1}}) - mono(ctx, {{"q", 2}}) + mono(ctx, {{"q", 3}}));
    CHECK(pochhammer_finite(-pow(q, -1), pow(q, 2), 2, ctx)
          == mono(ctx, {{"q", -1}}) + LaurentPoly::constant(ctx, 2) + mono(ctx, {{"q", 1}}));
}

TEST_CASE("pochhammer_finite keeps terms that a negative-degree factor brings back")
{
    // (1+q^{-1})(1+1)(1+q) = 2q^{-1} + 4 + 2q
    const auto ctx = q_ctx(1);
    const auto q = ctx->variable("q");
    const auto p = pochhammer_finite(-pow(q, -1), q, 3, ctx);
    CHECK(poly_coeff(p, pow(q, -1)) == 2);
    CHECK(poly_coeff(p, ctx->one()) == 4);
    CHECK(poly_coeff(p, q) == 2);
}

TEST_CASE("pochhammer_infinite examples")
{
    const auto c3 = q_ctx(3);
    CHECK(pochhammer_infinite(c3->variable("q"), c3->monomial({{"q", 8}}), false, c3) == one(c3) - mono(c3, {{"q", 1}}));
    const auto c5 = q_ctx(5);
    CHECK(pochhammer_infinite(c5->monomial({{"q", 2}}), c5->monomial({{"q", 4}}), false, c5)
          == one(c5) - mono(c5, {{"q", 2}}));
    const auto c4 = q_ctx(4);
    const auto inv = pochhammer_infinite(c4->variable("q"), c4->variable("q"), true, c4);
    const int p[] = {1, 1, 2, 3, 5};
    for (int n = 0; n <= 4; ++n) {
        CHECK(poly_coeff(inv, c4->monomial({{"q", n}})) == p[n]);
    }
    const auto zq = zq_ctx(5);
    CHECK_THROWS_AS(pochhammer_infinite(zq->monomial({{"z", 1}}), zq->variable("z"), false, zq), std::domain_error);
    CHECK_THROWS_AS(pochhammer_infinite(zq->monomial({{"q", -1}}), zq->variable("q"), true, zq), NonContracting);
}

TEST_CASE("partition numbers from the inverted Euler product")
{
    // p(n) computed independently by the pentagonal recurrence.
    const int n_max = 60;
    std::vector<Coeff> p(n_max + 1, 0);
    p[0] = 1;
    for (int n = 1; n <= n_max; ++n) {
        for (int k = 1;; ++k) {
            const int g1 = k * (3 * k - 1) / 2;
            const int g2 = k * (3 * k + 1) / 2;
            if (g1 > n) {
                break;
            }
            const int sign = k % 2 == 1 ? 1 : -1;
            p[n] += sign * p[n - g1];
            if (g2 <= n) {
                p[n] += sign * p[n - g2];
            }
        }
    }
    const auto ctx = q_ctx(n_max);
    const auto inv = pochhammer_infinite(ctx->variable("q"), ctx->variable("q"), true, ctx);
    for (int n = 0; n <= n_max; ++n) {
        CHECK(poly_coeff(inv, ctx->monomial({{"q", n}})) == p[n]);
    }
    CHECK(p[60] == Coeff("966467"));
}

TEST_CASE("property: ring axioms")
{
    Gen g;
    const auto ctx = qzw_ctx(8);
    for (int i = 0; i < 1000; ++i) {
        const auto a = g.series(ctx);
        const auto b = g.series(ctx);
        const auto c = g.series(ctx);
        REQUIRE(a + b == b + a);
        REQUIRE(a * b == b * a);
        REQUIRE((a + b) + c == a + (b + c));
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE(a - a == LaurentPoly(ctx));
        REQUIRE(a * one(ctx) == a);
    }
}

TEST_CASE("property: truncation coherence")
{
    Gen g;
    const auto wide = qzw_ctx(14);
    const auto narrow = std::make_shared<const TruncationContext>(wide->vars_ptr(), wide->weights(), 7);
    for (int i = 0; i < 1000; ++i) {
        const auto a = g.series(wide);
        const auto b = g.series(wide);
        REQUIRE((a * b).retruncate(narrow) == a.retruncate(narrow) * b.retruncate(narrow));
        REQUIRE((a + b).retruncate(narrow) == a.retruncate(narrow) + b.retruncate(narrow));
    }
}

TEST_CASE("property: geometric inverse witness")
{
    Gen g;
    const auto ctx = qzw_ctx(9);
    for (int i = 0; i < 1000; ++i) {
        const auto m = g.positive_monomial(ctx);
        const auto geo = expand_geometric(m, ctx);
        REQUIRE((one(ctx) - LaurentPoly::from_monomial(ctx, m)) * geo == one(ctx));
        const auto p = g.series(ctx);
        REQUIRE(div_one_minus(p, m) == p * geo);
        REQUIRE(mul_one_plus(p, m) == p + p * LaurentPoly::from_monomial(ctx, m));
    }
}

TEST_CASE("property: substitution is a monoid homomorphism")
{
    Gen g;
    const auto src = ContextBuilder().var("x1", 1).var("x2", 1).var("x3", 1).order(1000).build();
    const auto target = ContextBuilder().var("z", 0).var("q", 1).order(12).build();
    for (int i = 0; i < 1000; ++i) {
        std::vector<std::pair<std::string, Monomial>> images;
        for (const char *v : {"x1", "x2", "x3"}) {
            images.emplace_back(v, target->monomial({{"z", g.uniform(-2, 2)}, {"q", g.uniform(0, 3)}},
                                                    g.uniform(0, 1) == 0 ? 1 : -1));
        }
        auto rand_mono = [&] {
            return src->monomial({{"x1", g.uniform(0, 4)}, {"x2", g.uniform(0, 4)}, {"x3", g.uniform(0, 4)}},
                                 g.uniform(0, 1) == 0 ? 1 : -1);
        };
        const auto m1 = rand_mono();
        const auto m2 = rand_mono();
        const auto lhs = substitute_monomial(LaurentPoly::from_monomial(src, m1 * m2), images, target);
        const auto rhs = substitute_monomial(LaurentPoly::from_monomial(src, m1), images, target)
                         * substitute_monomial(LaurentPoly::from_monomial(src, m2), images, target);
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("property: pochhammer recurrence")
{
    Gen g;
    const auto ctx = qzw_ctx(10);
    for (int i = 0; i < 1000; ++i) {
        const auto base = g.positive_monomial(ctx);
        const auto step = g.positive_monomial(ctx);
        const Monomial step_abs(step.exponents);
        const int n = g.uniform(0, 6);
        const auto lhs = pochhammer_finite(base, step_abs, n + 1, ctx);
        const auto rhs = pochhammer_finite(base, step_abs, n, ctx)
                         * (one(ctx) - LaurentPoly::from_monomial(ctx, base * pow(step_abs, n)));
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("property: expand_factored agrees with the exact product in a wide context")
{
    // Negative-degree binomials: the result must equal the product taken with
    // ample room and truncated afterwards.
    Gen g;
    const auto ctx = ContextBuilder().var("q", 1).var("z", 0).order(8).build();
    const auto wide = std::make_shared<const TruncationContext>(ctx->vars_ptr(), ctx->weights(), 40);
    for (int i = 0; i < 300; ++i) {
        const auto pre = ctx->monomial({{"q", g.uniform(0, 6)}, {"z", g.uniform(-2, 2)}});
        std::vector<Monomial> bin;
        std::vector<Monomial> geo;
        for (int k = g.uniform(0, 4); k > 0; --k) {
            bin.push_back(ctx->monomial({{"q", g.uniform(-3, 4)}, {"z", g.uniform(-1, 1)}}, g.uniform(0, 1) ? 1 : -1));
        }
        for (int k = g.uniform(0, 3); k > 0; --k) {
            geo.push_back(ctx->monomial({{"q", g.uniform(1, 4)}, {"z", g.uniform(-1, 1)}}));
        }
        auto exact = LaurentPoly::from_monomial(wide, pre);
        for (const auto &b : bin) {
            exact = mul_one_plus(exact, b);
        }
        for (const auto &m : geo) {
            exact = div_one_minus(exact, m);
        }
        REQUIRE(expand_factored(pre, bin, geo, ctx) == exact.retruncate(ctx));
    }
}

TEST_CASE("to_string is deterministic and readable")
{
    const auto ctx = q_ctx(3);
    const auto p = one(ctx) - mono(ctx, {{"q", 1}}, 2) + mono(ctx, {{"q", 3}});
    CHECK(p.to_string() == p.to_string());
    CHECK(LaurentPoly(ctx).to_string() == "0");
}
