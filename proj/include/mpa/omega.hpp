#pragma once

// Crude-form expressions, the Omega operator, elimination rules and
// crude-form verification.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpa/partitions.hpp"
#include "mpa/report.hpp"
#include "mpa/series.hpp"

namespace mpa {

struct Factor {
    enum class Kind { mono, one_plus, geom_inv };
    Kind kind;
    Monomial m;

    static Factor mono(Monomial m) { return {Kind::mono, std::move(m)}; }
    static Factor one_plus(Monomial m) { return {Kind::one_plus, std::move(m)}; }
    static Factor geom_inv(Monomial m) { return {Kind::geom_inv, std::move(m)}; }
};

struct ProductExpr {
    Monomial prefactor;
    std::vector<Factor> factors;

    explicit ProductExpr(Monomial pre, std::vector<Factor> f = {}) : prefactor(std::move(pre)), factors(std::move(f)) {}
};

struct SumExpr {
    std::vector<ProductExpr> terms;
};

// Distributes (a)(b) into a sum of products.
SumExpr operator*(const SumExpr &a, const SumExpr &b);
SumExpr operator+(SumExpr a, const SumExpr &b);

LaurentPoly expand_product(const ProductExpr &e, ContextPtr ctx);
LaurentPoly expand_expr(const SumExpr &e, ContextPtr ctx);

// Lower bound on the weighted degree of every term of the expansion.
std::int64_t product_min_degree(const ProductExpr &e, const TruncationContext &ctx);

// Sets a variable to zero: products carrying it in a monomial prefactor
// vanish, and binomial or geometric factors containing it become 1.
SumExpr zero_variable(const SumExpr &e, std::size_t var);

// (1 + x lambda^{1-k}) / (1 - x^2 lambda^2), which expands to
// sum_{n>=0} x^n lambda^{n - k chi(n)}.
SumExpr chi_block(const Monomial &x, const std::string &lambda, int k, const TruncationContext &ctx);

// The context over the non-lambda variables of ctx (same weights, caps, order).
ContextPtr drop_lambda(const TruncationContext &ctx);

// Deletes every term with a negative lambda exponent and sets lambda = 1.
LaurentPoly omega_ge(const LaurentPoly &p);

enum class RuleKind { base, r0, r01, r1, r2, r3, r4, r5, r6, r7, r8, r9, chi };

struct RuleId {
    RuleKind kind;
    int param = 0; // A for base, k for chi
    std::set<std::string> zero_vars;

    std::string name() const;
};

// Lemma rules in order, without base and chi.
std::vector<RuleKind> lemma_rules();

Report check_rule(const RuleId &r, std::int64_t order);

// BASE collapsed over A = 0..max_a, every lemma rule, CHI(k) for k = 0..max_k.
std::vector<Report> all_rules(std::int64_t order, int max_a = 6, int max_k = 5);

enum class CrudeMode { exact, paired, bounded };

std::optional<CrudeMode> parse_crude_mode(std::string_view s);
std::string crude_mode_name(CrudeMode m);

// A crude form with the context it lives in: x1..xm of weight 1 (capped when
// cap is set) followed by one lambda per inequality.
struct CrudeForm {
    SumExpr expr;
    ContextPtr ctx;
    int parts = 0;
};

// Throws std::invalid_argument for unsupported (family, mode) pairs or n < 1.
CrudeForm crude_form(const FamilySpec &f, CrudeMode mode, int n, std::int64_t degree,
                     std::optional<Exponent> cap = {});

bool crude_supported(const FamilySpec &f, CrudeMode mode);

LengthFilter crude_length_filter(CrudeMode mode, int n);

Report verify_crude(const FamilySpec &f, CrudeMode mode, int n, std::int64_t degree = 8,
                    std::optional<Exponent> cap = Exponent{8});

} // namespace mpa
