#include "mpa/identities.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mpa {

namespace {

struct Entry {
    IdentityId id;
    const char *name;
    IdentityKind kind;
    FamilyTag family;
    StatKind stat;
};

constexpr std::array<Entry, 35> kEntries{{
    {IdentityId::lg1, "lg1", IdentityKind::base, FamilyTag::g1, StatKind::plain},
    {IdentityId::lg2, "lg2", IdentityKind::base, FamilyTag::g2, StatKind::plain},
    {IdentityId::nlg1, "nlg1", IdentityKind::base, FamilyTag::g1p, StatKind::plain},
    {IdentityId::nlg2, "nlg2", IdentityKind::base, FamilyTag::g2p, StatKind::plain},
    {IdentityId::ap1, "ap1", IdentityKind::base, FamilyTag::p1, StatKind::plain},
    {IdentityId::ap2, "ap2", IdentityKind::base, FamilyTag::p2, StatKind::plain},
    {IdentityId::np1, "np1", IdentityKind::base, FamilyTag::p1p, StatKind::plain},
    {IdentityId::np2, "np2", IdentityKind::base, FamilyTag::p2p, StatKind::plain},
    {IdentityId::ref_g1, "ref-g1", IdentityKind::refined, FamilyTag::g1, StatKind::refined},
    {IdentityId::ref_g2, "ref-g2", IdentityKind::refined, FamilyTag::g2, StatKind::refined},
    {IdentityId::ref_g1p, "ref-g1p", IdentityKind::refined, FamilyTag::g1p, StatKind::refined},
    {IdentityId::ref_g2p, "ref-g2p", IdentityKind::refined, FamilyTag::g2p, StatKind::refined},
    {IdentityId::ref_p1, "ref-p1", IdentityKind::refined, FamilyTag::p1, StatKind::refined},
    {IdentityId::ref_p2, "ref-p2", IdentityKind::refined, FamilyTag::p2, StatKind::refined},
    {IdentityId::ref_p1p, "ref-p1p", IdentityKind::refined, FamilyTag::p1p, StatKind::refined},
    {IdentityId::ref_p2p, "ref-p2p", IdentityKind::refined, FamilyTag::p2p, StatKind::refined},
    {IdentityId::biv_g1_alt, "biv-g1-alt", IdentityKind::bivariate, FamilyTag::g1, StatKind::alt},
    {IdentityId::biv_g1_schmidt, "biv-g1-schmidt", IdentityKind::bivariate, FamilyTag::g1, StatKind::schmidt},
    {IdentityId::biv_g2_alt, "biv-g2-alt", IdentityKind::bivariate, FamilyTag::g2, StatKind::alt},
    {IdentityId::biv_g2_schmidt, "biv-g2-schmidt", IdentityKind::bivariate, FamilyTag::g2, StatKind::schmidt},
    {IdentityId::biv_g1p_alt, "biv-g1p-alt", IdentityKind::bivariate, FamilyTag::g1p, StatKind::alt},
    {IdentityId::biv_g1p_schmidt, "biv-g1p-schmidt", IdentityKind::bivariate, FamilyTag::g1p, StatKind::schmidt},
    {IdentityId::biv_g2p_alt, "biv-g2p-alt", IdentityKind::bivariate, FamilyTag::g2p, StatKind::alt},
    {IdentityId::biv_g2p_schmidt, "biv-g2p-schmidt", IdentityKind::bivariate, FamilyTag::g2p, StatKind::schmidt},
    {IdentityId::biv_p1_alt, "biv-p1-alt", IdentityKind::bivariate, FamilyTag::p1, StatKind::alt},
    {IdentityId::biv_p1_schmidt, "biv-p1-schmidt", IdentityKind::bivariate, FamilyTag::p1, StatKind::schmidt},
    {IdentityId::biv_p2_alt, "biv-p2-alt", IdentityKind::bivariate, FamilyTag::p2, StatKind::alt},
    {IdentityId::biv_p2_schmidt, "biv-p2-schmidt", IdentityKind::bivariate, FamilyTag::p2, StatKind::schmidt},
    {IdentityId::biv_p1p_alt, "biv-p1p-alt", IdentityKind::bivariate, FamilyTag::p1p, StatKind::alt},
    {IdentityId::biv_p1p_schmidt, "biv-p1p-schmidt", IdentityKind::bivariate, FamilyTag::p1p, StatKind::schmidt},
    {IdentityId::biv_p2p_alt, "biv-p2p-alt", IdentityKind::bivariate, FamilyTag::p2p, StatKind::alt},
    {IdentityId::biv_p2p_schmidt, "biv-p2p-schmidt", IdentityKind::bivariate, FamilyTag::p2p, StatKind::schmidt},
    {IdentityId::qgauss, "qgauss", IdentityKind::classical, FamilyTag::all, StatKind::plain},
    {IdentityId::qgauss_lim, "qgauss-lim", IdentityKind::classical, FamilyTag::all, StatKind::plain},
    {IdentityId::qlebesgue, "qlebesgue", IdentityKind::classical, FamilyTag::all, StatKind::plain},
}};

const Entry &entry(IdentityId id)
{
    for (const auto &e : kEntries) {
        if (e.id == id) {
            return e;
        }
    }
    throw std::invalid_argument("unregistered identity");
}

// Builds one product term: prefactor, (1 + m) factors and 1/(1 - m) factors.
class Term {
public:
    explicit Term(const TruncationContext &c) : pre_(c.one()) {}

    Term &pre(const Monomial &m)
    {
        pre_ = pre_ * m;
        return *this;
    }
    // (base; step)_n in the numerator.
    Term &num(const Monomial &base, const Monomial &step, std::int64_t n)
    {
        for (std::int64_t i = 0; i < n; ++i) {
            f_.push_back(Factor::one_plus(-(base * pow(step, i))));
        }
        return *this;
    }
    // (base; step)_n in the denominator.
    Term &den(const Monomial &base, const Monomial &step, std::int64_t n)
    {
        for (std::int64_t i = 0; i < n; ++i) {
            f_.push_back(Factor::geom_inv(base * pow(step, i)));
        }
        return *this;
    }
    Term &plus(const Monomial &m)
    {
        f_.push_back(Factor::one_plus(m));
        return *this;
    }
    Term &geom(const Monomial &m)
    {
        f_.push_back(Factor::geom_inv(m));
        return *this;
    }

    operator SumExpr() const { return SumExpr{{ProductExpr(pre_, f_)}}; } // NOLINT(google-explicit-constructor)

private:
    Monomial pre_;
    std::vector<Factor> f_;
};

struct InfPoch {
    Monomial base;
    Monomial step;
    bool invert;
};

LaurentPoly infinite_product(const std::vector<InfPoch> &factors, ContextPtr ctx)
{
    auto out = LaurentPoly::constant(ctx, 1);
    for (const auto &f : factors) {
        out *= pochhammer_infinite(f.base, f.step, f.invert, ctx);
    }
    return out;
}

// Shorthands over a context with q and optionally z.
struct QZ {
    const TruncationContext &c;

    Monomial q(std::int64_t e, int sign = 1) const { return c.monomial({{"q", e}}, sign); }
    Monomial zq(std::int64_t a, std::int64_t e, int sign = 1) const
    {
        return c.monomial({{"z", a}, {"q", e}}, sign);
    }
};

std::int64_t binom2(std::int64_t n) { return n * (n - 1) / 2; }

LaurentPoly sum_of(const std::vector<InfiniteSum> &parts, ContextPtr ctx)
{
    LaurentPoly out(ctx);
    for (const auto &s : parts) {
        out += evaluate_sum(s, ctx);
    }
    return out;
}

// The term for n = 0 is 1, later terms come from f.
InfiniteSum one_plus_sum(std::function<SumExpr(std::int64_t)> f, const TruncationContext &c)
{
    return {0, [f = std::move(f), &c](std::int64_t n) -> SumExpr {
                if (n == 0) {
                    return Term(c);
                }
                return f(n);
            }};
}

std::vector<InfiniteSum> base_sum(IdentityId id, const TruncationContext &c)
{
    const QZ s{c};
    const auto q2 = s.q(2);
    const auto q4 = s.q(4);
    switch (id) {
    case IdentityId::lg1:
        return {{0, [&c, s, q2](std::int64_t n) -> SumExpr {
                     return Term(c).pre(s.q(n * n + n)).num(s.q(-1, -1), q2, n).den(q2, q2, n);
                 }}};
    case IdentityId::lg2:
        return {{0, [&c, s, q2](std::int64_t n) -> SumExpr {
                     return Term(c).pre(s.q(n * n + n)).num(s.q(1, -1), q2, n).den(q2, q2, n);
                 }}};
    case IdentityId::nlg1:
        return {{0, [&c, s, q2, q4](std::int64_t n) -> SumExpr {
                     return Term(c).pre(s.q(binom2(2 * n))).num(s.q(1, -1), q4, n).den(q2, q2, 2 * n);
                 }}};
    case IdentityId::nlg2:
        return {{0, [&c, s, q2, q4](std::int64_t n) -> SumExpr {
                     return Term(c).pre(s.q(binom2(2 * n + 1))).num(s.q(-1, -1), q4, n).den(q2, q2, 2 * n);
                 }}};
    case IdentityId::ap1:
        return {one_plus_sum(
            [&c, s, q2, q4](std::int64_t n) -> SumExpr {
                return Term(c).num(s.q(1, -1), q4, n - 1).pre(s.q(2 * n)).plus(s.q(2 * n - 3)).den(q2, q2, n);
            },
            c)};
    case IdentityId::ap2:
        return {one_plus_sum(
            [&c, s, q2, q4](std::int64_t n) -> SumExpr {
                return Term(c).num(s.q(3, -1), q4, n - 1).pre(s.q(2 * n)).plus(s.q(2 * n - 1)).den(q2, q2, n);
            },
            c)};
    case IdentityId::np1:
        return {{0,
                 [&c, s, q2, q4](std::int64_t n) -> SumExpr {
                     return Term(c).pre(s.q(4 * n)).num(s.q(-3, -1), q4, n).den(q2, q2, 2 * n);
                 }},
                {0, [&c, s, q2, q4](std::int64_t n) -> SumExpr {
                     return Term(c).pre(s.q(4 * n + 2)).num(s.q(1, -1), q4, n).den(q2, q2, 2 * n + 1);
                 }}};
    case IdentityId::np2:
        return {{0,
                 [&c, s, q2, q4](std::int64_t n) -> SumExpr {
                     return Term(c).pre(s.q(4 * n)).num(s.q(-1, -1), q4, n).den(q2, q2, 2 * n);
                 }},
                {0, [&c, s, q2, q4](std::int64_t n) -> SumExpr {
                     return Term(c).pre(s.q(4 * n + 2)).num(s.q(3, -1), q4, n).den(q2, q2, 2 * n + 1);
                 }}};
    default: break;
    }
    throw std::invalid_argument("not a base identity");
}

std::vector<InfPoch> base_product(IdentityId id, const TruncationContext &c)
{
    const QZ s{c};
    const auto q8 = s.q(8);
    std::vector<int> residues;
    switch (id) {
    case IdentityId::lg1:
    case IdentityId::nlg1: residues = {1, 5, 6}; break;
    case IdentityId::lg2:
    case IdentityId::nlg2: residues = {2, 3, 7}; break;
    case IdentityId::ap1:
    case IdentityId::np1: residues = {1, 4, 5, 6, 8}; break;
    case IdentityId::ap2:
    case IdentityId::np2: residues = {2, 3, 4, 7, 8}; break;
    default: throw std::invalid_argument("not a base identity");
    }
    std::vector<InfPoch> out;
    for (int r : residues) {
        out.push_back({s.q(r), q8, true});
    }
    return out;
}

// Verbatim sums of the bivariate displays.  ALT denominators are
// (q^4;q^4)_n (z^2q^2;q^4)_{n or n+1}, SCHMIDT ones (q^2;q^2)_n (z^2q^2;q^2)_{n or n+1}.
std::vector<InfiniteSum> biv_sum(IdentityId id, const TruncationContext &c, bool displayed)
{
    const QZ s{c};
    const auto q1 = s.q(1);
    const auto q2 = s.q(2);
    const auto q4 = s.q(4);
    const auto q8 = s.q(8);
    const auto z2q2 = s.zq(2, 2);
    const bool alt = entry(id).stat == StatKind::alt;
    const auto dq = alt ? q4 : q2;
    // Denominator with z-length n + extra.
    auto den = [dq, z2q2](Term &t, std::int64_t n, std::int64_t extra) -> Term & {
        return t.den(dq, dq, n).den(z2q2, dq, n + extra);
    };
    using F = std::function<SumExpr(std::int64_t)>;
    auto sum = [](F f) { return InfiniteSum{0, std::move(f)}; };

    switch (id) {
    case IdentityId::biv_g1_alt:
        return {sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2 * n, 2 * binom2(2 * n + 1))).num(s.zq(1, -1, -1), q2, 2 * n);
                    return den(t, n, 0);
                }),
                sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2 * n + 2, 2 * binom2(2 * n + 2))).num(s.zq(1, 1, -1), q2, 2 * n).plus(s.zq(-1, -1));
                    return den(t, n, 1);
                })};
    case IdentityId::biv_g2_alt:
        return {sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2 * n, 2 * binom2(2 * n + 1))).num(s.zq(1, 1, -1), q2, 2 * n);
                    return den(t, n, 0);
                }),
                sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2 * n + 2, 2 * binom2(2 * n + 2))).num(s.zq(1, 1, -1), q2, 2 * n + 1);
                    return den(t, n, 1);
                })};
    case IdentityId::biv_g1_schmidt:
        return {sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2 * n, 4 * binom2(n + 1))).num(s.zq(1, 0, -1), q1, 2 * n);
                    return den(t, n, 0);
                }),
                sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2 * n + 2, 2 * (n + 1) * (n + 1)))
                        .num(s.zq(1, 1, -1), q1, 2 * n)
                        .plus(displayed ? s.zq(-1, 0) : s.zq(-1, -1));
                    return den(t, n, 1);
                })};
    case IdentityId::biv_g2_schmidt:
        return {sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2 * n, 4 * binom2(n + 1))).num(s.zq(1, 1, -1), q1, 2 * n);
                    return den(t, n, 0);
                }),
                sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2 * n + 2, 2 * (n + 1) * (n + 1))).num(s.zq(1, 1, -1), q1, 2 * n + 1);
                    return den(t, n, 1);
                })};
    case IdentityId::biv_g1p_alt:
        return {sum([=, &c](std::int64_t n) -> SumExpr {
            Term t(c);
            t.pre(s.zq(n, binom2(2 * n))).num(s.zq(1, 1, -1), q4, n);
            return den(t, n, 0);
        })};
    case IdentityId::biv_g2p_alt:
        return {sum([=, &c](std::int64_t n) -> SumExpr {
            Term t(c);
            t.pre(s.zq(n, binom2(2 * n + 1))).num(s.zq(1, -1, -1), q4, n);
            return den(t, n, 0);
        })};
    case IdentityId::biv_g1p_schmidt:
        return {sum([=, &c](std::int64_t n) -> SumExpr {
            Term t(c);
            t.pre(s.zq(n, n * n)).num(s.zq(1, 1, -1), q2, n);
            return den(t, n, 0);
        })};
    case IdentityId::biv_g2p_schmidt:
        return {sum([=, &c](std::int64_t n) -> SumExpr {
            Term t(c);
            t.pre(s.zq(n, n * n + n)).num(displayed ? s.zq(1, -1, -1) : s.zq(1, 0, -1), q2, n);
            return den(t, n, 0);
        })};
    case IdentityId::biv_p1_alt:
        return {one_plus_sum(
                    [=, &c](std::int64_t n) -> SumExpr {
                        Term t(c);
                        t.pre(s.q(4 * n))
                            .num(s.zq(1, 1, -1), q8, n)
                            .num(s.zq(3, 5, -1), q8, n - 1)
                            .plus(s.zq(3, 4 * n - 3));
                        return den(t, n, 0);
                    },
                    c),
                sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2, 4 * n + 2))
                        .num(s.zq(1, 1, -1), q8, n)
                        .num(s.zq(3, 5, -1), q8, n)
                        .plus(s.zq(-1, 4 * n - 1));
                    return den(t, n, 1);
                })};
    case IdentityId::biv_p2_alt:
        return {one_plus_sum(
                    [=, &c](std::int64_t n) -> SumExpr {
                        Term t(c);
                        t.pre(s.q(4 * n))
                            .num(s.zq(3, 3, -1), q8, n)
                            .num(s.zq(1, 7, -1), q8, n - 1)
                            .plus(s.zq(1, 4 * n - 1));
                        return den(t, n, 0);
                    },
                    c),
                sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2, 4 * n + 2))
                        .num(s.zq(3, 3, -1), q8, n)
                        .num(s.zq(1, 7, -1), q8, n)
                        .plus(s.zq(1, 4 * n + 1));
                    return den(t, n, 1);
                })};
    case IdentityId::biv_p1_schmidt:
        return {one_plus_sum(
                    [=, &c](std::int64_t n) -> SumExpr {
                        Term t(c);
                        t.pre(s.q(2 * n))
                            .num(s.zq(1, 1, -1), q4, n)
                            .num(s.zq(3, 4, -1), q4, n - 1)
                            .plus(s.zq(3, 2 * n));
                        return den(t, n, 0);
                    },
                    c),
                sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2, 2 * n + 2))
                        .num(s.zq(1, 1, -1), q4, n)
                        .num(s.zq(3, 4, -1), q4, n)
                        .plus(s.zq(-1, displayed ? 2 * n : 2 * n - 1));
                    return den(t, n, 1);
                })};
    case IdentityId::biv_p2_schmidt:
        return {one_plus_sum(
                    [=, &c](std::int64_t n) -> SumExpr {
                        Term t(c);
                        t.pre(s.q(2 * n))
                            .num(s.zq(3, 3, -1), q4, n)
                            .num(s.zq(1, 4, -1), q4, n - 1)
                            .plus(s.zq(1, 2 * n));
                        return den(t, n, 0);
                    },
                    c),
                sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2, 2 * n + 2))
                        .num(s.zq(3, 3, -1), q4, n)
                        .num(s.zq(1, 4, -1), q4, n)
                        .plus(s.zq(1, 2 * n + 1));
                    return den(t, n, 1);
                })};
    case IdentityId::biv_p1p_alt:
        return {sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.q(4 * n)).num(s.zq(1, -3, -1), q4, n);
                    return den(t, n, 0);
                }),
                sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2, 4 * n + 2)).num(s.zq(1, 1, -1), q4, n);
                    return den(t, n, 1);
                })};
    case IdentityId::biv_p2p_alt:
        return {sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.q(4 * n)).num(s.zq(1, -1, -1), q4, n);
                    return den(t, n, 0);
                }),
                sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2, 4 * n + 2)).num(s.zq(1, 3, -1), q4, n);
                    return den(t, n, 1);
                })};
    case IdentityId::biv_p1p_schmidt:
        return {sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.q(2 * n)).num(s.zq(1, -1, -1), q2, n);
                    return den(t, n, 0);
                }),
                sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2, 2 * n + 2)).num(s.zq(1, 1, -1), q2, n);
                    return den(t, n, 1);
                })};
    case IdentityId::biv_p2p_schmidt:
        return {sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.q(2 * n)).num(s.zq(1, 0, -1), q2, n);
                    return den(t, n, 0);
                }),
                sum([=, &c](std::int64_t n) -> SumExpr {
                    Term t(c);
                    t.pre(s.zq(2, 2 * n + 2)).num(s.zq(1, 2, -1), q2, n);
                    return den(t, n, 1);
                })};
    default: break;
    }
    throw std::invalid_argument("not a bivariate identity");
}

std::optional<std::vector<InfPoch>> biv_product(IdentityId id, const TruncationContext &c, bool second)
{
    const QZ s{c};
    const auto q2 = s.q(2);
    const auto q4 = s.q(4);
    const auto q8 = s.q(8);
    const auto z2q2 = s.zq(2, 2);
    if (second) {
        switch (id) {
        case IdentityId::biv_g1p_alt: return std::vector<InfPoch>{{s.zq(1, 1), q4, true}, {s.zq(2, 6), q8, true}};
        case IdentityId::biv_g2p_alt: return std::vector<InfPoch>{{s.zq(1, 3), q4, true}, {z2q2, q8, true}};
        case IdentityId::biv_g1p_schmidt: return std::vector<InfPoch>{{s.zq(1, 1), q2, true}, {s.zq(2, 4), q4, true}};
        case IdentityId::biv_g2p_schmidt: return std::vector<InfPoch>{{s.zq(1, 2), q2, true}, {z2q2, q4, true}};
        default: return std::nullopt;
        }
    }
    switch (id) {
    case IdentityId::biv_g1p_alt: return std::vector<InfPoch>{{s.zq(1, 1, -1), q4, false}, {z2q2, q4, true}};
    case IdentityId::biv_g2p_alt: return std::vector<InfPoch>{{s.zq(1, 3, -1), q4, false}, {z2q2, q4, true}};
    case IdentityId::biv_g1p_schmidt: return std::vector<InfPoch>{{s.zq(1, 1, -1), q2, false}, {z2q2, q2, true}};
    case IdentityId::biv_g2p_schmidt: return std::vector<InfPoch>{{s.zq(1, 2, -1), q2, false}, {z2q2, q2, true}};
    case IdentityId::biv_p1_alt:
        return std::vector<InfPoch>{
            {s.zq(1, 1, -1), q8, false}, {s.zq(3, 5, -1), q8, false}, {z2q2, q4, true}, {q4, q4, true}};
    case IdentityId::biv_p2_alt:
        return std::vector<InfPoch>{
            {s.zq(3, 3, -1), q8, false}, {s.zq(1, 7, -1), q8, false}, {z2q2, q4, true}, {q4, q4, true}};
    case IdentityId::biv_p1_schmidt:
        return std::vector<InfPoch>{
            {s.zq(1, 1, -1), q4, false}, {s.zq(3, 4, -1), q4, false}, {z2q2, q2, true}, {q2, q2, true}};
    case IdentityId::biv_p2_schmidt:
        return std::vector<InfPoch>{
            {s.zq(3, 3, -1), q4, false}, {s.zq(1, 4, -1), q4, false}, {z2q2, q2, true}, {q2, q2, true}};
    case IdentityId::biv_p1p_alt:
        return std::vector<InfPoch>{{s.zq(1, 1, -1), q4, false}, {z2q2, q4, true}, {q4, q4, true}};
    case IdentityId::biv_p2p_alt:
        return std::vector<InfPoch>{{s.zq(1, 3, -1), q4, false}, {z2q2, q4, true}, {q4, q4, true}};
    case IdentityId::biv_p1p_schmidt:
        return std::vector<InfPoch>{{s.zq(1, 1, -1), q2, false}, {z2q2, q2, true}, {q2, q2, true}};
    case IdentityId::biv_p2p_schmidt:
        return std::vector<InfPoch>{{s.zq(1, 2, -1), q2, false}, {z2q2, q2, true}, {q2, q2, true}};
    default: return std::nullopt;
    }
}

std::vector<InfiniteSum> classical_sum(IdentityId id, const TruncationContext &c, bool displayed)
{
    const auto q = c.monomial({{"q", 1}});
    switch (id) {
    case IdentityId::qgauss: {
        const auto a = c.monomial({{"a", 1}});
        const auto b = c.monomial({{"b", 1}});
        const auto cc = c.monomial({{"c", 1}});
        const auto ratio = c.monomial({{"c", 1}, {"a", -1}, {"b", -1}});
        return {{0, [=, &c](std::int64_t n) -> SumExpr {
                     return Term(c).num(a, q, n).num(b, q, n).den(q, q, n).den(cc, q, n).pre(pow(ratio, n));
                 }}};
    }
    case IdentityId::qgauss_lim: {
        const auto b = c.monomial({{"b", 1}});
        const auto cc = c.monomial({{"c", 1}});
        const auto ratio = c.monomial({{"c", 1}, {"b", -1}});
        return {{0, [=, &c](std::int64_t n) -> SumExpr {
                     auto pre = pow(ratio, n) * pow(q, binom2(n));
                     pre.sign = n % 2 == 0 ? 1 : -1;
                     return Term(c).pre(pre).num(b, q, n).den(q, q, n).den(cc, q, n);
                 }}};
    }
    case IdentityId::qlebesgue: {
        const auto base = displayed ? c.monomial({{"a", 1}, {"q", 1}}, -1) : c.monomial({{"a", 1}}, -1);
        return {{0, [=, &c](std::int64_t n) -> SumExpr {
                     return Term(c).pre(pow(q, binom2(n + 1))).num(base, q, n).den(q, q, n);
                 }}};
    }
    default: break;
    }
    throw std::invalid_argument("not a classical identity");
}

std::vector<InfPoch> classical_product(IdentityId id, const TruncationContext &c, bool second)
{
    const auto q = c.monomial({{"q", 1}});
    switch (id) {
    case IdentityId::qgauss: {
        const auto cc = c.monomial({{"c", 1}});
        return {{c.monomial({{"c", 1}, {"a", -1}}), q, false},
                {c.monomial({{"c", 1}, {"b", -1}}), q, false},
                {cc, q, true},
                {c.monomial({{"c", 1}, {"a", -1}, {"b", -1}}), q, true}};
    }
    case IdentityId::qgauss_lim:
        return {{c.monomial({{"c", 1}, {"b", -1}}), q, false}, {c.monomial({{"c", 1}}), q, true}};
    case IdentityId::qlebesgue: {
        const auto q2 = c.monomial({{"q", 2}});
        const InfPoch odd_a{c.monomial({{"a", 1}, {"q", 1}}, -1), q2, false};
        if (second) {
            return {odd_a, {q, q2, true}};
        }
        return {odd_a, {c.monomial({{"q", 1}}, -1), q, false}};
    }
    default: break;
    }
    throw std::invalid_argument("not a classical identity");
}

// ---- refined forms ----

IdentityId refined_of(IdentityId id)
{
    switch (identity_kind(id)) {
    case IdentityKind::refined: return id;
    case IdentityKind::base:
    case IdentityKind::bivariate: {
        const auto f = identity_family(id);
        for (const auto &e : kEntries) {
            if (e.kind == IdentityKind::refined && e.family == f) {
                return e.id;
            }
        }
        break;
    }
    case IdentityKind::classical: break;
    }
    throw std::invalid_argument("identity has no refined form");
}

std::vector<Factor> denominators(const XMap &x, std::int64_t n)
{
    std::vector<Factor> f;
    for (std::int64_t i = 1; i <= n; ++i) {
        f.push_back(Factor::geom_inv(pow(x(i), 2)));
    }
    return f;
}

SumExpr single(Monomial pre, std::vector<Factor> factors, const XMap &x, std::int64_t len)
{
    auto d = denominators(x, len);
    factors.insert(factors.end(), d.begin(), d.end());
    return SumExpr{{ProductExpr(std::move(pre), std::move(factors))}};
}

Monomial one_plus_sign(Monomial m, bool minus) { return minus ? -m : m; }

} // namespace

const std::vector<IdentityId> &registered_identities()
{
    static const std::vector<IdentityId> ids = [] {
        std::vector<IdentityId> v;
        for (const auto &e : kEntries) {
            v.push_back(e.id);
        }
        return v;
    }();
    return ids;
}

std::string identity_name(IdentityId id) { return entry(id).name; }

std::optional<IdentityId> parse_identity(std::string_view s)
{
    std::string norm;
    for (char ch : s) {
        norm.push_back(ch == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    // Accept the primed spellings g1', p2' as well.
    std::string unprimed;
    for (char ch : norm) {
        if (ch == '\'') {
            unprimed.push_back('p');
        } else {
            unprimed.push_back(ch);
        }
    }
    for (const auto &e : kEntries) {
        if (unprimed == e.name) {
            return e.id;
        }
    }
    return std::nullopt;
}

IdentityKind identity_kind(IdentityId id) { return entry(id).kind; }

FamilyTag identity_family(IdentityId id)
{
    const auto &e = entry(id);
    if (e.kind == IdentityKind::classical) {
        throw std::invalid_argument(std::string(e.name) + " has no partition family");
    }
    return e.family;
}

StatKind identity_stat(IdentityId id) { return entry(id).stat; }

IdentityId base_identity(FamilyTag f)
{
    for (const auto &e : kEntries) {
        if (e.kind == IdentityKind::base && e.family == f) {
            return e.id;
        }
    }
    throw std::invalid_argument("no base identity for family " + family_name(f));
}

bool has_product_side(IdentityId id)
{
    switch (identity_kind(id)) {
    case IdentityKind::base:
    case IdentityKind::classical: return true;
    case IdentityKind::refined: return false;
    case IdentityKind::bivariate: {
        const auto f = identity_family(id);
        return f != FamilyTag::g1 && f != FamilyTag::g2;
    }
    }
    return false;
}

ContextPtr identity_context(IdentityId id, std::int64_t order)
{
    ContextBuilder b;
    b.var("q", 1);
    switch (identity_kind(id)) {
    case IdentityKind::base:
    case IdentityKind::refined: break;
    case IdentityKind::bivariate: b.var("z", 0); break;
    case IdentityKind::classical:
        if (id == IdentityId::qgauss) {
            b.var("c", 1).var("a", 0).var("b", 0);
        } else if (id == IdentityId::qgauss_lim) {
            b.var("c", 1).var("b", 0);
        } else {
            b.var("a", 0);
        }
        break;
    }
    return b.order(order).build();
}

std::int64_t expr_min_degree(const SumExpr &e, const TruncationContext &ctx)
{
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    for (const auto &t : e.terms) {
        lo = std::min(lo, product_min_degree(t, ctx));
    }
    return lo;
}

LaurentPoly evaluate_sum(const InfiniteSum &s, ContextPtr ctx, std::int64_t max_terms)
{
    LaurentPoly out(ctx);
    for (std::int64_t k = 0; s.start + k <= s.last; ++k) {
        if (k >= max_terms) {
            throw std::runtime_error("sum side did not terminate within " + std::to_string(max_terms) + " terms");
        }
        const auto term = s.term(s.start + k);
        if (expr_min_degree(term, *ctx) > ctx->order()) {
            break;
        }
        out += expand_expr(term, ctx);
    }
    return out;
}

bool has_display_correction(IdentityId id)
{
    switch (id) {
    case IdentityId::biv_g1_schmidt:
    case IdentityId::biv_g2p_schmidt:
    case IdentityId::biv_p1_schmidt:
    case IdentityId::qlebesgue: return true;
    default: return false;
    }
}

std::string display_correction(IdentityId id)
{
    switch (id) {
    case IdentityId::biv_g1_schmidt: return "second sum factor (1+1/z) read as (1+1/(zq))";
    case IdentityId::biv_g2p_schmidt: return "(-zq^{-1};q^2)_n read as (-z;q^2)_n";
    case IdentityId::biv_p1_schmidt: return "second sum factor (1+z^{-1}q^{2n}) read as (1+z^{-1}q^{2n-1})";
    case IdentityId::qlebesgue: return "(-aq;q)_n read as (-a;q)_n";
    default: return {};
    }
}

LaurentPoly sum_side(IdentityId id, ContextPtr ctx, Transcription t)
{
    const auto &c = *ctx;
    const bool displayed = t == Transcription::stated;
    switch (identity_kind(id)) {
    case IdentityKind::base: return sum_of(base_sum(id, c), ctx);
    case IdentityKind::bivariate: return sum_of(biv_sum(id, c, displayed), ctx);
    case IdentityKind::classical: return sum_of(classical_sum(id, c, displayed), ctx);
    case IdentityKind::refined: break;
    }
    throw std::invalid_argument(identity_name(id) + " has no q-series sum side; use refined_series");
}

LaurentPoly product_side(IdentityId id, ContextPtr ctx)
{
    const auto &c = *ctx;
    switch (identity_kind(id)) {
    case IdentityKind::base: return infinite_product(base_product(id, c), ctx);
    case IdentityKind::classical: return infinite_product(classical_product(id, c, false), ctx);
    case IdentityKind::bivariate:
        if (auto p = biv_product(id, c, false)) {
            return infinite_product(*p, ctx);
        }
        break;
    case IdentityKind::refined: break;
    }
    throw std::invalid_argument(identity_name(id) + " has no product side");
}

std::optional<LaurentPoly> second_product_side(IdentityId id, ContextPtr ctx)
{
    if (id == IdentityId::qlebesgue) {
        return infinite_product(classical_product(id, *ctx, true), ctx);
    }
    if (identity_kind(id) == IdentityKind::bivariate) {
        if (auto p = biv_product(id, *ctx, true)) {
            return infinite_product(*p, ctx);
        }
    }
    return std::nullopt;
}

Monomial XMap::operator()(std::int64_t i) const
{
    const auto &c = *ctx;
    if (i <= 0) {
        return c.one();
    }
    switch (scheme) {
    case XScheme::refined: {
        auto m = c.one();
        for (std::int64_t j = 1; j <= i; ++j) {
            auto idx = c.vars().find(refined_var(static_cast<std::size_t>(j)));
            if (!idx) {
                throw std::invalid_argument("insufficient variable count: X_" + std::to_string(i) + " needs "
                                            + refined_var(static_cast<std::size_t>(j)));
            }
            m.exponents[*idx] = 1;
        }
        return m;
    }
    case XScheme::plain: return c.monomial({{"q", i}});
    case XScheme::alt: return i % 2 == 1 ? c.monomial({{"z", 1}, {"q", i}}) : c.monomial({{"q", i}});
    case XScheme::schmidt:
        return i % 2 == 1 ? c.monomial({{"z", 1}, {"q", (i + 1) / 2}}) : c.monomial({{"q", i / 2}});
    }
    throw std::logic_error("unknown X scheme");
}

std::int64_t XMap::limit() const
{
    if (scheme != XScheme::refined) {
        return std::numeric_limits<std::int64_t>::max();
    }
    std::int64_t m = 0;
    while (ctx->vars().find(refined_var(static_cast<std::size_t>(m + 1)))) {
        ++m;
    }
    return m;
}

bool refined_has_stated_variant(IdentityId id, int n)
{
    switch (refined_of(id)) {
    case IdentityId::ref_g2p: return n >= 1;
    case IdentityId::ref_p1: return n >= 3;
    case IdentityId::ref_p1p: return n % 2 == 1;
    case IdentityId::ref_p2p: return n >= 2 && n % 2 == 0;
    default: return false;
    }
}

SumExpr refined_exact_length(IdentityId id, int n, const XMap &x, Transcription t)
{
    if (n < 1) {
        throw std::invalid_argument("length index must be at least 1");
    }
    const bool stated = t == Transcription::stated;
    const auto one = x.ctx->one();
    std::vector<Factor> f;
    switch (refined_of(id)) {
    case IdentityId::ref_g1:
    case IdentityId::ref_g2: {
        auto pre = one;
        for (int i = 1; i <= n; ++i) {
            pre = pre * pow(x(i), 2);
        }
        const bool g1 = refined_of(id) == IdentityId::ref_g1;
        for (int i = 1; i <= (g1 ? n - 1 : n); ++i) {
            f.push_back(Factor::one_plus(x(i - 1) * x(i)));
        }
        if (g1) {
            f.push_back(Factor::one_plus(x(n - 1) / x(n)));
        }
        return single(pre, f, x, n);
    }
    case IdentityId::ref_g1p: {
        auto pre = one;
        for (int i = 1; i <= 2 * n - 1; ++i) {
            pre = pre * x(i);
        }
        for (int i = 1; i <= n; ++i) {
            f.push_back(Factor::one_plus(x(2 * i - 2) * x(2 * i - 1)));
        }
        return single(pre, f, x, 2 * n);
    }
    case IdentityId::ref_g2p: {
        auto pre = one;
        for (int i = 1; i <= 2 * n; ++i) {
            pre = pre * x(i);
        }
        for (int i = 1; i <= n - 1; ++i) {
            f.push_back(Factor::one_plus(x(2 * i - 1) * x(2 * i)));
        }
        f.push_back(Factor::one_plus(one_plus_sign(x(2 * n - 1) / x(2 * n), stated)));
        return single(pre, f, x, 2 * n);
    }
    case IdentityId::ref_p1: {
        for (int i = 1; i <= n - 1; ++i) {
            const int power = stated && n >= 3 && i == n - 1 ? 2 : 3;
            f.push_back(Factor::one_plus(pow(x(i - 1), power) * x(i)));
        }
        f.push_back(Factor::one_plus(pow(x(n - 1), 3) / x(n)));
        return single(pow(x(n), 2), f, x, n);
    }
    case IdentityId::ref_p2: {
        for (int i = 1; i <= n - 1; ++i) {
            f.push_back(Factor::one_plus(x(i - 1) * pow(x(i), 3)));
        }
        f.push_back(Factor::one_plus(x(n - 1) * x(n)));
        return single(pow(x(n), 2), f, x, n);
    }
    case IdentityId::ref_p1p: {
        const int h = n / 2;
        for (int i = 1; i <= h; ++i) {
            f.push_back(Factor::one_plus(x(2 * i - 2) * x(2 * i - 1)));
        }
        if (n % 2 == 1) {
            f.push_back(Factor::one_plus(one_plus_sign(x(2 * h) / x(2 * h + 1), stated)));
        }
        return single(pow(x(n), 2), f, x, n);
    }
    case IdentityId::ref_p2p: {
        const int h = n / 2;
        if (n % 2 == 0) {
            for (int i = 1; i <= h - 1; ++i) {
                f.push_back(Factor::one_plus(x(2 * i - 1) * x(2 * i)));
            }
            f.push_back(Factor::one_plus(stated ? x(2 * h) / x(2 * h - 1) : x(2 * h - 1) / x(2 * h)));
        } else {
            for (int i = 1; i <= h; ++i) {
                f.push_back(Factor::one_plus(x(2 * i - 1) * x(2 * i)));
            }
        }
        return single(pow(x(n), 2), f, x, n);
    }
    default: break;
    }
    throw std::invalid_argument("inadmissible refined identity");
}

bool refined_has_bounded_product(IdentityId id)
{
    switch (refined_of(id)) {
    case IdentityId::ref_p1:
    case IdentityId::ref_p2:
    case IdentityId::ref_p1p:
    case IdentityId::ref_p2p: return true;
    default: return false;
    }
}

SumExpr refined_bounded_product(std::optional<IdentityId> id, int bound, const XMap &x, Transcription t)
{
    if (bound < 1) {
        throw std::invalid_argument("length bound must be at least 1");
    }
    std::vector<Factor> f;
    if (!id) {
        for (int i = 1; i <= bound; ++i) {
            f.push_back(Factor::geom_inv(x(i)));
        }
        return SumExpr{{ProductExpr(x.ctx->one(), f)}};
    }
    const auto r = refined_of(*id);
    for (int i = 1; i <= bound; ++i) {
        switch (r) {
        case IdentityId::ref_p1: {
            const int power = t == Transcription::stated && bound >= 3 && i == bound - 1 ? 2 : 3;
            f.push_back(Factor::one_plus(pow(x(i - 1), power) * x(i)));
            break;
        }
        case IdentityId::ref_p2: f.push_back(Factor::one_plus(x(i - 1) * pow(x(i), 3))); break;
        case IdentityId::ref_p1p:
            if (i % 2 == 1) {
                f.push_back(Factor::one_plus(x(i - 1) * x(i)));
            }
            break;
        case IdentityId::ref_p2p:
            if (i % 2 == 0) {
                f.push_back(Factor::one_plus(x(i - 1) * x(i)));
            }
            break;
        default: throw std::invalid_argument(identity_name(r) + " has no bounded-length product");
        }
    }
    return single(x.ctx->one(), f, x, bound);
}

LaurentPoly refined_series(IdentityId id, const XMap &x, Transcription t)
{
    const auto r = refined_of(id);
    const auto &c = *x.ctx;
    // Only the G2' theorem display differs from the canonical series.
    const auto tt = r == IdentityId::ref_g2p ? t : Transcription::canonical;
    const auto m = x.limit();
    std::vector<InfiniteSum> parts;
    if (r == IdentityId::ref_p1p) {
        parts.push_back(one_plus_sum(
            [x](std::int64_t n) -> SumExpr {
                std::vector<Factor> f;
                for (std::int64_t i = 1; i <= n - 1; ++i) {
                    f.push_back(Factor::one_plus(x(2 * i - 2) * x(2 * i - 1)));
                }
                f.push_back(Factor::one_plus(x(2 * n - 2) * x(2 * n - 1) / pow(x(2 * n), 2)));
                return single(pow(x(2 * n), 2), f, x, 2 * n);
            },
            c));
        parts.back().last = m / 2;
        parts.push_back({0, [x](std::int64_t n) -> SumExpr {
                             std::vector<Factor> f;
                             for (std::int64_t i = 1; i <= n; ++i) {
                                 f.push_back(Factor::one_plus(x(2 * i - 2) * x(2 * i - 1)));
                             }
                             return single(pow(x(2 * n + 1), 2), f, x, 2 * n + 1);
                         }});
        parts.back().last = (m - 1) / 2;
    } else {
        parts.push_back(one_plus_sum(
            [r, x, tt](std::int64_t n) { return refined_exact_length(r, static_cast<int>(n), x, tt); }, c));
        const bool paired = r == IdentityId::ref_g1p || r == IdentityId::ref_g2p;
        parts.back().last = paired ? m / 2 : m;
    }
    return sum_of(parts, x.ctx);
}

ContextPtr refined_context(int m, std::int64_t order, std::optional<Exponent> cap)
{
    if (m < 1) {
        throw std::invalid_argument("refined context needs at least one variable");
    }
    ContextBuilder b;
    for (int i = 1; i <= m; ++i) {
        b.var(refined_var(static_cast<std::size_t>(i)), 1, cap);
    }
    return b.order(order).build();
}

namespace {

std::string describe(const Mismatch &m)
{
    std::ostringstream os;
    bool first = true;
    for (const auto &[v, e] : m.monomial) {
        os << (first ? "" : "*") << v;
        if (e != 1) {
            os << '^' << e;
        }
        first = false;
    }
    if (first) {
        os << '1';
    }
    os << " (" << m.lhs << " vs " << m.rhs << ")";
    return os.str();
}

// Records a comparison between two series that need not share the report's
// main context.  Returns true when they agree.
bool compare_pair(Report &r, const std::string &what, const LaurentPoly &a, const LaurentPoly &b)
{
    auto m = first_difference(a, b);
    if (!m) {
        return true;
    }
    r.notes.push_back(what + " differ at " + describe(*m));
    if (!r.first_mismatch) {
        r.first_mismatch = std::move(m);
    }
    return false;
}

// Notes the outcome of a display kept only for the record.
void note_variant(Report &r, const std::string &what, const LaurentPoly &a, const LaurentPoly &b)
{
    if (auto m = first_difference(a, b)) {
        r.notes.push_back(what + " fails against brute force at " + describe(*m));
    } else if (b.is_zero()) {
        r.notes.push_back(what + " untested: no members below the truncation order");
    } else {
        r.notes.push_back(what + " agrees with brute force");
    }
}

std::string variant_name(IdentityId r, int n)
{
    switch (r) {
    case IdentityId::ref_g2p: return "stated (1-X_{2n-1}/X_{2n}) at n=" + std::to_string(n);
    case IdentityId::ref_p1: return "proof chain ending (1+X_{n-2}^2 X_{n-1}) at n=" + std::to_string(n);
    case IdentityId::ref_p1p: return "proof display (1-X_{2n}/X_{2n+1}) at length " + std::to_string(n);
    case IdentityId::ref_p2p: return "proof display (1+X_{2n}/X_{2n-1}) at length " + std::to_string(n);
    default: return "stated display at n=" + std::to_string(n);
    }
}

Report check_refined(IdentityId id, std::int64_t order, const CheckOptions &options)
{
    Report r;
    const auto degree = std::min(order, options.refined_degree);
    r.order = degree;
    const auto fam = identity_family(id);
    const bool paired = fam == FamilyTag::g1p || fam == FamilyTag::g2p;
    for (int n = 1; n <= options.max_index; ++n) {
        const auto filter = paired ? LengthFilter::paired(n) : LengthFilter::exact(n);
        const auto ctx = refined_context(*filter.max_length(), degree);
        const XMap x{XScheme::refined, ctx};
        const auto formula = expand_expr(refined_exact_length(id, n, x), ctx);
        const auto brute = brute_refined(fam, filter, ctx);
        compare_pair(r, "length index " + std::to_string(n) + ": formula and brute force", formula, brute);
        if (refined_has_stated_variant(id, n)) {
            note_variant(r, variant_name(id, n),
                         expand_expr(refined_exact_length(id, n, x, Transcription::stated), ctx), brute);
        }
    }
    r.sides = {"per-length formula", "per-length brute"};
    if (refined_has_bounded_product(id)) {
        r.sides.insert(r.sides.end(), {"bounded product", "bounded brute"});
        for (int l = 1; l <= options.max_index; ++l) {
            const auto ctx = refined_context(l, degree);
            const XMap x{XScheme::refined, ctx};
            const auto product = expand_expr(refined_bounded_product(id, l, x), ctx);
            const auto brute = brute_refined(fam, LengthFilter::bounded(l), ctx);
            compare_pair(r, "length bound " + std::to_string(l) + ": product and brute force", product, brute);
            if (id == IdentityId::ref_p1 && l >= 3) {
                note_variant(r, "bounded product with proof chain (1+X_{n-2}^2 X_{n-1}) at bound " + std::to_string(l),
                             expand_expr(refined_bounded_product(id, l, x, Transcription::stated), ctx), brute);
            }
        }
    }
    // Every member of these families has all parts >= 2 except possibly the
    // last, so degree/2 + 1 variables cover every length under the order.
    const int m = static_cast<int>(std::max<std::int64_t>(1, degree / 2 + 1));
    const auto ctx = refined_context(m, degree);
    const XMap x{XScheme::refined, ctx};
    const auto series = refined_series(id, x);
    const auto brute = brute_refined(fam, LengthFilter::unbounded(), ctx);
    compare_pair(r, "theorem series and brute force", series, brute);
    if (id == IdentityId::ref_g2p) {
        note_variant(r, "theorem series with the stated (1-X_{2n-1}/X_{2n})",
                     refined_series(id, x, Transcription::stated), brute);
        r.notes.push_back("adopted (1+X_{2n-1}/X_{2n}) as concluded in the proof");
    }
    const auto qctx = identity_context(base_identity(fam), degree);
    std::vector<std::pair<std::string, Monomial>> images;
    for (int i = 1; i <= m; ++i) {
        images.emplace_back(refined_var(static_cast<std::size_t>(i)), qctx->monomial({{"q", 1}}));
    }
    const auto resummed = substitute_monomial(series, images, qctx);
    compare_pair(r, "series at x_i=q and " + identity_name(base_identity(fam)) + " sum side", resummed,
                 sum_side(base_identity(fam), qctx));
    r.sides.insert(r.sides.end(), {"theorem series", "series brute", "series at x_i=q",
                                   identity_name(base_identity(fam)) + " sum"});
    r.params["refined_degree"] = degree;
    r.params["max_index"] = options.max_index;
    return r;
}

void note_display(Report &r, IdentityId id, const LaurentPoly &displayed, const LaurentPoly &reference)
{
    if (!has_display_correction(id)) {
        return;
    }
    if (auto m = first_difference(displayed, reference)) {
        r.notes.push_back("sum as displayed fails at " + describe(*m) + "; adopted " + display_correction(id));
    } else {
        r.notes.push_back("sum as displayed agrees; " + display_correction(id) + " not needed");
    }
}

Report check_bivariate(IdentityId id, std::int64_t order)
{
    Report r;
    r.order = order;
    const auto ctx = identity_context(id, order);
    const auto stat = identity_stat(id);
    const auto fam = identity_family(id);
    const auto sum = sum_side(id, ctx);
    const auto brute = brute_series(fam, stat, ctx);
    const XMap x{stat == StatKind::alt ? XScheme::alt : XScheme::schmidt, ctx};
    const auto refined = refined_series(id, x);
    std::vector<std::pair<std::string, const LaurentPoly *>> sides{{"sum", &sum}, {"brute", &brute}};
    std::optional<LaurentPoly> product;
    std::optional<LaurentPoly> product2;
    if (has_product_side(id)) {
        product = product_side(id, ctx);
        sides.emplace_back("product", &*product);
        if ((product2 = second_product_side(id, ctx))) {
            sides.emplace_back("second product", &*product2);
        }
    }
    sides.emplace_back("refined series", &refined);
    compare_sides(r, sides);
    note_display(r, id, sum_side(id, ctx, Transcription::stated), brute);
    if (stat == StatKind::alt) {
        const auto base = base_identity(fam);
        const auto qctx = identity_context(base, order);
        const auto at_one = substitute_monomial(sum, {{"z", qctx->one()}, {"q", qctx->monomial({{"q", 1}})}}, qctx);
        compare_pair(r, "sum at z=1 and " + identity_name(base) + " sum side", at_one, sum_side(base, qctx));
        r.sides.emplace_back("sum at z=1");
        r.sides.emplace_back(identity_name(base) + " sum");
    }
    return r;
}

} // namespace

Report check_identity(IdentityId id, std::int64_t order, const CheckOptions &options)
{
    if (order < 1) {
        throw std::invalid_argument("order must be at least 1");
    }
    const Stopwatch clock;
    Report r;
    switch (identity_kind(id)) {
    case IdentityKind::base: {
        r.order = order;
        const auto ctx = identity_context(id, order);
        const auto s = sum_side(id, ctx);
        const auto p = product_side(id, ctx);
        const auto b = brute_series(identity_family(id), StatKind::plain, ctx);
        compare_sides(r, {{"sum", &s}, {"product", &p}, {"brute", &b}});
        break;
    }
    case IdentityKind::refined: r = check_refined(id, order, options); break;
    case IdentityKind::bivariate: r = check_bivariate(id, order); break;
    case IdentityKind::classical: {
        r.order = order;
        const auto ctx = identity_context(id, order);
        const auto s = sum_side(id, ctx);
        const auto p = product_side(id, ctx);
        const auto p2 = second_product_side(id, ctx);
        std::vector<std::pair<std::string, const LaurentPoly *>> sides{{"sum", &s}, {"product", &p}};
        if (p2) {
            sides.emplace_back("second product", &*p2);
        }
        compare_sides(r, sides);
        note_display(r, id, sum_side(id, ctx, Transcription::stated), p);
        break;
    }
    }
    r.check = "identity";
    Json params = Json::object();
    params["id"] = identity_name(id);
    for (const auto &[k, v] : r.params.items()) {
        params[k] = v;
    }
    r.params = std::move(params);
    r.elapsed_ms = clock.elapsed_ms();
    return r;
}

Report check_conjecture(const std::set<int> &residues, int k, std::int64_t order, const ConjectureOptions &options)
{
    const auto family = FamilySpec::gen(residues, k);
    if (order < 1) {
        throw std::invalid_argument("order must be at least 1");
    }
    const Stopwatch clock;
    Report r;
    r.check = "conjecture";
    r.params["k"] = k;
    r.params["t"] = Json(std::vector<int>(residues.begin(), residues.end()));
    r.params["max_length"] = options.max_length;
    r.params["refined_degree"] = options.refined_degree;
    r.order = order;
    r.label = "evidence";
    const auto keeps = [&](std::int64_t n) { return !residues.contains(static_cast<int>(n % k)); };

    const auto qctx = ContextBuilder().var("q", 1).order(order).build();
    const auto q = qctx->monomial({{"q", 1}});
    std::vector<Factor> f;
    for (std::int64_t n = 1; 2 * n - 1 <= order; ++n) {
        if (2 * n <= order) {
            f.push_back(Factor::geom_inv(pow(q, 2 * n)));
        }
        if (keeps(n)) {
            f.push_back(Factor::one_plus(pow(q, 2 * n - 1)));
        }
    }
    const auto product = expand_product(ProductExpr(qctx->one(), f), qctx);
    const auto brute = brute_series(family, StatKind::plain, qctx);
    compare_pair(r, "specialized product and brute force", product, brute);

    for (int l = 1; l <= options.max_length; ++l) {
        const auto ctx = refined_context(l, options.refined_degree);
        const XMap x{XScheme::refined, ctx};
        std::vector<Factor> g;
        for (int n = 1; n <= l; ++n) {
            g.push_back(Factor::geom_inv(pow(x(n), 2)));
            if (keeps(n)) {
                g.push_back(Factor::one_plus(x(n - 1) * x(n)));
            }
        }
        const auto refined = expand_product(ProductExpr(ctx->one(), g), ctx);
        compare_pair(r, "length bound " + std::to_string(l) + ": refined product and brute force", refined,
                     brute_refined(family, LengthFilter::bounded(l), ctx));
    }
    r.sides = {"product at x_i=q", "brute", "refined bounded product", "refined bounded brute"};
    r.notes.push_back("finite evidence for the conjectured product, not a proof");
    r.elapsed_ms = clock.elapsed_ms();
    return r;
}

} // namespace mpa
