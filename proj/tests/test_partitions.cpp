#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "mpa/partitions.hpp"

using namespace mpa;

namespace {

LaurentPoly mono(const ContextPtr &ctx, std::initializer_list<std::pair<std::string_view, std::int64_t>> p)
{
    return LaurentPoly::from_monomial(ctx, ctx->monomial(p));
}

ContextPtr q_ctx(std::int64_t n) { return ContextBuilder().var("q", 1).order(n).build(); }

ContextPtr x_ctx(int m, std::int64_t n)
{
    ContextBuilder b;
    for (int i = 1; i <= m; ++i) {
        b.var(refined_var(static_cast<std::size_t>(i)), 1);
    }
    return b.order(n).build();
}

// All partitions of n by naive recursion, independent of PartitionStream.
void naive(int n, int max_part, std::vector<int> &cur, std::vector<std::vector<int>> &out)
{
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (int p = std::min(n, max_part); p >= 1; --p) {
        cur.push_back(p);
        naive(n - p, p, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> naive_partitions(int n)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    naive(n, n, cur, out);
    return out;
}

const FamilyTag kFamilies[] = {FamilyTag::all, FamilyTag::g1, FamilyTag::g2, FamilyTag::g1p, FamilyTag::g2p,
                               FamilyTag::p1,  FamilyTag::p2, FamilyTag::p1p, FamilyTag::p2p};

} // namespace

TEST_CASE("Partition validation")
{
    CHECK_THROWS_AS(Partition({1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(Partition({2, 0}), std::invalid_argument);
    const Partition p({4, 2, 1});
    CHECK(p.weight() == 7);
    CHECK(p.length() == 3);
    CHECK(p.part(1) == 4);
    CHECK(p.part(3) == 1);
}

TEST_CASE("gen_partitions examples")
{
    const auto zero = gen_partitions(0);
    REQUIRE(zero.size() == 1);
    CHECK(zero.front().empty());
    const auto four = gen_partitions(4);
    const std::vector<Partition> expected{Partition({4}), Partition({3, 1}), Partition({2, 2}), Partition({2, 1, 1}),
                                          Partition({1, 1, 1, 1})};
    CHECK(four == expected);
    CHECK(gen_partitions(10).size() == 42);
    CHECK_THROWS_AS(gen_partitions(61), std::out_of_range);
    CHECK(gen_partitions(61, {}, 70).size() == 1121505);
}

TEST_CASE("gen_partitions matches a naive recursion and honours the filter")
{
    for (int n = 0; n <= 20; ++n) {
        const auto got = gen_partitions(n);
        const auto want = naive_partitions(n);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            REQUIRE(got[i].parts() == want[i]);
        }
        const auto two = gen_partitions(n, [](std::size_t l) { return l == 2; });
        REQUIRE(static_cast<int>(two.size()) == n / 2);
    }
}

TEST_CASE("PartitionStream is restartable")
{
    PartitionStream a(7);
    PartitionStream b(7);
    int count = 0;
    while (auto p = a.next()) {
        REQUIRE(b.next() == p);
        ++count;
    }
    CHECK(count == 15);
    CHECK(!b.next());
}

TEST_CASE("conjugate, alt_sum and schmidt_weight examples")
{
    CHECK(conjugate(Partition({4, 2})) == Partition({2, 2, 1, 1}));
    CHECK(conjugate(Partition()).empty());
    CHECK(conjugate(conjugate(Partition({3, 1}))) == Partition({3, 1}));
    CHECK(alt_sum(Partition({4, 2})) == 2);
    CHECK(alt_sum(Partition()) == 0);
    CHECK(alt_sum(Partition({3, 2, 1})) == 2);
    CHECK(schmidt_weight(Partition({4, 2, 1})) == 5);
    CHECK(schmidt_weight(Partition()) == 0);
    CHECK(schmidt_weight(Partition({2, 2})) == 2);
}

TEST_CASE("is_member examples")
{
    CHECK(is_member(FamilyTag::g1, Partition({5, 1})));
    CHECK_FALSE(is_member(FamilyTag::g1, Partition({3, 1})));
    CHECK(is_member(FamilyTag::p2, Partition({2, 2})));
    CHECK_FALSE(is_member(FamilyTag::p1p, Partition({2, 1})));
    CHECK(is_member(FamilyTag::g2p, Partition({4, 1})));
    for (auto f : kFamilies) {
        CHECK(is_member(f, Partition()));
    }
    CHECK_FALSE(is_member(FamilyTag::g2, Partition({1})));
    CHECK_FALSE(is_member(FamilyTag::p2, Partition({3, 1})));
    CHECK(is_member(FamilyTag::p1, Partition({4, 1})));
    CHECK_FALSE(is_member(FamilyTag::p1, Partition({3, 1})));
    CHECK(is_member(FamilyTag::p1, Partition({3, 2})));
    CHECK_FALSE(is_member(FamilyTag::g1p, Partition({2, 2})));
    CHECK_FALSE(is_member(FamilyTag::g1p, Partition({2, 1})));
    CHECK(is_member(FamilyTag::g1p, Partition({3, 2, 1})));
    CHECK_FALSE(is_member(FamilyTag::g2p, Partition({3})));
    CHECK(is_member(FamilyTag::g2p, Partition({2})));
    CHECK_FALSE(is_member(FamilyTag::p2p, Partition({1})));
    CHECK(is_member(FamilyTag::p2p, Partition({2, 1})));
    CHECK_FALSE(is_member(FamilyTag::p2p, Partition({2, 1, 1})));
}

TEST_CASE("family names round-trip")
{
    for (auto f : kFamilies) {
        CHECK(parse_family(family_name(f)) == f);
    }
    CHECK(parse_family("G1'") == FamilyTag::g1p);
    CHECK(!parse_family("nosuch"));
    CHECK_THROWS_AS(FamilySpec::gen({2}, 2), std::invalid_argument);
    CHECK_THROWS_AS(FamilySpec::gen({0}, 1), std::invalid_argument);
    CHECK(FamilySpec::gen({0, 2}, 4).name() == "gen(0,2;4)");
}

TEST_CASE("refined_monomial examples")
{
    const auto ctx = x_ctx(2, 20);
    CHECK(refined_monomial(Partition({4, 2}), StatScheme::refined(2), ctx) == mono(ctx, {{"x1", 4}, {"x2", 2}}));
    CHECK(refined_monomial(Partition(), StatScheme::refined(2), ctx) == LaurentPoly::constant(ctx, 1));
    CHECK_THROWS_AS(refined_monomial(Partition({3, 1, 1}), StatScheme::refined(2), ctx), std::invalid_argument);
    CHECK_THROWS_AS(StatScheme::refined(0), std::invalid_argument);
    const auto zq = ContextBuilder().var("z", 0).var("q", 1).order(20).build();
    CHECK(refined_monomial(Partition({4, 2}), StatScheme::alt(), zq) == mono(zq, {{"z", 2}, {"q", 6}}));
    CHECK(refined_monomial(Partition({4, 2}), StatScheme::schmidt(), zq) == mono(zq, {{"z", 2}, {"q", 4}}));
    CHECK(refined_monomial(Partition({4, 2}), StatScheme::plain(), zq) == mono(zq, {{"q", 6}}));
}

TEST_CASE("brute_series examples")
{
    const auto q = q_ctx(10);
    const auto g1 = brute_series(FamilyTag::g1, StatKind::plain, q);
    CHECK(poly_coeff(g1, q->monomial({{"q", 6}})) == 3);
    const auto q4 = q_ctx(4);
    CHECK(brute_series(FamilyTag::all, StatKind::plain, q4)
          == LaurentPoly::constant(q4, 1) + mono(q4, {{"q", 1}}) + LaurentPoly::from_monomial(q4, q4->monomial({{"q", 2}}), 2)
                 + LaurentPoly::from_monomial(q4, q4->monomial({{"q", 3}}), 3)
                 + LaurentPoly::from_monomial(q4, q4->monomial({{"q", 4}}), 5));
    const auto zq = ContextBuilder().var("z", 0).var("q", 1).order(6).build();
    CHECK(poly_coeff(brute_series(FamilyTag::g1p, StatKind::alt, zq), zq->monomial({{"z", 2}, {"q", 6}})) == 2);
    const auto z2 = ContextBuilder().var("z", 0).var("q", 1).order(2).build();
    const auto p2p = brute_series(FamilyTag::p2p, StatKind::schmidt, z2);
    CHECK(poly_coeff(p2p, z2->monomial({{"z", 0}, {"q", 2}})) == 1);
    CHECK(poly_coeff(p2p, z2->monomial({{"z", 1}, {"q", 2}})) == 1);
    CHECK(poly_coeff(p2p, z2->monomial({{"z", 2}, {"q", 2}})) == 1);
}

TEST_CASE("golden coefficients from enumeration")
{
    // Counted here by filtering naive partitions through is_member.
    auto count = [](FamilyTag f, int n) {
        int c = 0;
        for (const auto &parts : naive_partitions(n)) {
            c += is_member(f, Partition(parts)) ? 1 : 0;
        }
        return c;
    };
    CHECK(count(FamilyTag::g1, 5) == 2);
    CHECK(count(FamilyTag::g1, 6) == 3);
    CHECK(count(FamilyTag::g2, 7) == 2);
    CHECK(count(FamilyTag::g1p, 6) == 3);
    CHECK(count(FamilyTag::g2p, 6) == 2);
    CHECK(count(FamilyTag::p1, 4) == 2);
    CHECK(count(FamilyTag::p1, 5) == 3);
    CHECK(count(FamilyTag::p2, 6) == 3);
    CHECK(count(FamilyTag::p1p, 4) == 2);
    CHECK(count(FamilyTag::p2p, 4) == 2);
    const auto q = q_ctx(25);
    for (auto f : kFamilies) {
        const auto series = brute_series(f, StatKind::plain, q);
        for (int n = 0; n <= 25; ++n) {
            REQUIRE(poly_coeff(series, q->monomial({{"q", n}})) == count(f, n));
        }
    }
}

TEST_CASE("brute_refined examples")
{
    const auto c3 = x_ctx(2, 3);
    const auto all2 = brute_refined(FamilyTag::all, LengthFilter::bounded(2), c3);
    const auto want = LaurentPoly::constant(c3, 1) + mono(c3, {{"x1", 1}}) + mono(c3, {{"x1", 2}}) + mono(c3, {{"x1", 3}})
                      + mono(c3, {{"x1", 1}, {"x2", 1}}) + mono(c3, {{"x1", 2}, {"x2", 1}});
    CHECK(all2 == want);
    const auto c4 = x_ctx(1, 4);
    CHECK(brute_refined(FamilyTag::g2, LengthFilter::exact(1), c4)
          == mono(c4, {{"x1", 2}}) + mono(c4, {{"x1", 3}}) + mono(c4, {{"x1", 4}}));
    const auto c42 = x_ctx(2, 4);
    CHECK(brute_refined(FamilyTag::p1p, LengthFilter::exact(2), c42) == mono(c42, {{"x1", 2}, {"x2", 2}}));
    CHECK_THROWS_AS(brute_refined(FamilyTag::all, LengthFilter::exact(3), c42), std::invalid_argument);
    CHECK_THROWS_AS(brute_refined(FamilyTag::all, LengthFilter::unbounded(), c42), std::invalid_argument);
}

TEST_CASE("property: alt_sum equals the odd parts of the conjugate")
{
    for (int n = 0; n <= 25; ++n) {
        for (const auto &p : gen_partitions(n)) {
            const auto c = conjugate(p);
            REQUIRE(conjugate(c) == p);
            REQUIRE(c.weight() == p.weight());
            const auto odd = std::count_if(c.parts().begin(), c.parts().end(), [](int v) { return v % 2 == 1; });
            REQUIRE(alt_sum(p) == odd);
        }
    }
}

TEST_CASE("property: Sylvester refinement")
{
    for (int n = 0; n <= 25; ++n) {
        std::map<std::int64_t, int> odd_parts;
        std::map<std::int64_t, int> strict_alt;
        for (const auto &p : gen_partitions(n)) {
            const auto &v = p.parts();
            if (std::all_of(v.begin(), v.end(), [](int x) { return x % 2 == 1; })) {
                ++odd_parts[static_cast<std::int64_t>(v.size())];
            }
            if (std::adjacent_find(v.begin(), v.end()) == v.end()) {
                ++strict_alt[alt_sum(p)];
            }
        }
        REQUIRE(odd_parts == strict_alt);
    }
}

TEST_CASE("property: odd parts of P1' members are distinct")
{
    for (int n = 0; n <= 25; ++n) {
        for (const auto &p : gen_partitions(n)) {
            if (!is_member(FamilyTag::p1p, p)) {
                continue;
            }
            const auto &v = p.parts();
            for (std::size_t i = 0; i + 1 < v.size(); ++i) {
                REQUIRE_FALSE((v[i] % 2 == 1 && v[i] == v[i + 1]));
            }
        }
    }
}

TEST_CASE("property: GEN(0;2) is P1' and GEN(1;2) is P2'")
{
    const auto g0 = FamilySpec::gen({0}, 2);
    const auto g1 = FamilySpec::gen({1}, 2);
    for (int n = 0; n <= 25; ++n) {
        for (const auto &p : gen_partitions(n)) {
            REQUIRE(is_member(g0, p) == is_member(FamilyTag::p1p, p));
            REQUIRE(is_member(g1, p) == is_member(FamilyTag::p2p, p));
        }
    }
}

TEST_CASE("property: plain brute force is the refined one at x_i = q")
{
    const auto q = q_ctx(20);
    const auto x = x_ctx(20, 20);
    std::vector<std::pair<std::string, Monomial>> images;
    for (int i = 1; i <= 20; ++i) {
        images.emplace_back(refined_var(static_cast<std::size_t>(i)), q->variable("q"));
    }
    for (auto f : kFamilies) {
        const auto refined = brute_refined(f, LengthFilter::unbounded(), x);
        REQUIRE(substitute_monomial(refined, images, q) == brute_series(f, StatKind::plain, q));
    }
}

TEST_CASE("property: alt and schmidt brute force agree with the statistic definitions")
{
    const auto zq = ContextBuilder().var("z", 0).var("q", 1).order(14).build();
    for (auto f : kFamilies) {
        LaurentPoly alt(zq);
        for (int n = 0; n <= 14; ++n) {
            for (const auto &p : gen_partitions(n)) {
                if (is_member(f, p)) {
                    alt.add_term(zq->monomial({{"z", alt_sum(p)}, {"q", n}}).exponents, 1);
                }
            }
        }
        REQUIRE(brute_series(f, StatKind::alt, zq) == alt);
        // Schmidt: S(p) <= 14 implies |p| <= 28.
        LaurentPoly sch(zq);
        for (int n = 0; n <= 28; ++n) {
            for (const auto &p : gen_partitions(n)) {
                if (is_member(f, p) && schmidt_weight(p) <= 14) {
                    sch.add_term(zq->monomial({{"z", alt_sum(p)}, {"q", schmidt_weight(p)}}).exponents, 1);
                }
            }
        }
        REQUIRE(brute_series(f, StatKind::schmidt, zq) == sch);
    }
}
