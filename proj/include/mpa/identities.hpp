#pragma once

// Registry of generating-function identities and their checkers.

#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mpa/omega.hpp"
#include "mpa/partitions.hpp"
#include "mpa/report.hpp"
#include "mpa/series.hpp"

namespace mpa {

enum class IdentityId {
    lg1, lg2, nlg1, nlg2, ap1, ap2, np1, np2,
    ref_g1, ref_g2, ref_g1p, ref_g2p, ref_p1, ref_p2, ref_p1p, ref_p2p,
    biv_g1_alt, biv_g1_schmidt, biv_g2_alt, biv_g2_schmidt,
    biv_g1p_alt, biv_g1p_schmidt, biv_g2p_alt, biv_g2p_schmidt,
    biv_p1_alt, biv_p1_schmidt, biv_p2_alt, biv_p2_schmidt,
    biv_p1p_alt, biv_p1p_schmidt, biv_p2p_alt, biv_p2p_schmidt,
    qgauss, qgauss_lim, qlebesgue,
};

enum class IdentityKind { base, refined, bivariate, classical };

// Every registered identity in a fixed order.
const std::vector<IdentityId> &registered_identities();

std::string identity_name(IdentityId id); // e.g. "lg1", "ref-g2p", "biv-p2p-schmidt"
// Case-insensitive; '_' and '-' are interchangeable.
std::optional<IdentityId> parse_identity(std::string_view s);

IdentityKind identity_kind(IdentityId id);
// The partition family behind a base, refined or bivariate identity.
FamilyTag identity_family(IdentityId id);
// ALT or SCHMIDT for bivariate identities.
StatKind identity_stat(IdentityId id);
// The base identity sharing the family of a refined or bivariate one.
IdentityId base_identity(FamilyTag f);

bool has_product_side(IdentityId id);

// The grading used by check_identity: base ids q; bivariate q (weight 1)
// and z (weight 0); QGAUSS q, c (1) and a, b (0); QGAUSS_LIM q, c (1) and
// b (0); QLEBESGUE q (1) and a (0).  Refined ids use q like base ids here.
ContextPtr identity_context(IdentityId id, std::int64_t order);

// Transcriptions of a display.  `canonical` is the adopted form; `stated`
// reproduces the display verbatim where it disagrees with the canonical one
// and equals canonical otherwise.
enum class Transcription { canonical, stated };

// Displays whose verbatim sum fails and which carry a one-factor correction.
bool has_display_correction(IdentityId id);
std::string display_correction(IdentityId id);

// Sum side (not available for refined ids).
LaurentPoly sum_side(IdentityId id, ContextPtr ctx, Transcription t = Transcription::canonical);
// Throws std::invalid_argument when the identity has no product side.
LaurentPoly product_side(IdentityId id, ContextPtr ctx);
// Classical identities with a second product form (QLEBESGUE) and bivariate
// G1'/G2' with their second product.
std::optional<LaurentPoly> second_product_side(IdentityId id, ContextPtr ctx);

// How X_i is realized: X_i = x1...xi, q^i, or the two bivariate schemes.
// X_i = 1 for i <= 0.
enum class XScheme { refined, plain, alt, schmidt };

struct XMap {
    XScheme scheme;
    ContextPtr ctx;

    Monomial operator()(std::int64_t i) const;
    // Largest i with X_i nonzero: m for x1..xm (x_j = 0 beyond), unbounded otherwise.
    std::int64_t limit() const;
};

// For refined forms `stated` selects the theorem statement or proof display
// that disagrees with the canonical form.
// Per-length generating function: length n (G1, G2, P1, P2), lengths
// {2n-1, 2n} (G1', G2'), or length l = n (P1', P2').
SumExpr refined_exact_length(IdentityId id, int n, const XMap &x, Transcription t = Transcription::canonical);
bool refined_has_stated_variant(IdentityId id, int n);

// Bounded-length products for P1, P2, P1', P2' and (with id = nullopt) all partitions.
SumExpr refined_bounded_product(std::optional<IdentityId> id, int bound, const XMap &x,
                                Transcription t = Transcription::canonical);
bool refined_has_bounded_product(IdentityId id);

// The full series of the refined theorem, evaluated under x.ctx.
LaurentPoly refined_series(IdentityId id, const XMap &x, Transcription t = Transcription::canonical);

// A refined context x1..xm, weight 1 each, total degree `order`.
ContextPtr refined_context(int m, std::int64_t order, std::optional<Exponent> cap = {});

struct CheckOptions {
    std::int64_t refined_degree = 16; // refined checks run at min(order, refined_degree)
    int max_index = 4;
};

Report check_identity(IdentityId id, std::int64_t order, const CheckOptions &options = {});

struct ConjectureOptions {
    int max_length = 4;
    std::int64_t refined_degree = 12;
};

// Throws std::invalid_argument for k < 2 or residues outside [0, k).
Report check_conjecture(const std::set<int> &residues, int k, std::int64_t order,
                        const ConjectureOptions &options = {});

// Terms of an infinite sum: term(n) for n = start, start+1, ... until the
// lower bound on the term's degree exceeds the order.
struct InfiniteSum {
    std::int64_t start = 0;
    std::function<SumExpr(std::int64_t)> term;
    std::int64_t last = std::numeric_limits<std::int64_t>::max(); // later terms are identically zero
};

// Lower bound on the weighted degree of every term in the expansion of e.
std::int64_t expr_min_degree(const SumExpr &e, const TruncationContext &ctx);

LaurentPoly evaluate_sum(const InfiniteSum &s, ContextPtr ctx, std::int64_t max_terms = 100000);

} // namespace mpa
