#pragma once

// Sparse multivariate Laurent polynomials with exact integer coefficients,
// truncated by a per-variable weighted degree.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace mpa {

using Exponent = std::int32_t;
using Exponents = std::vector<Exponent>;
using Coeff = mpz_class;

// Raised when two series built under different contexts are combined.
class ContextMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a geometric expansion 1/(1-m) is requested for a base whose
// weighted degree is not strictly positive.
class NonContracting : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class VarRole { parameter, lambda };

class VarTable {
public:
    VarTable() = default;

    std::size_t add(std::string_view name, VarRole role = VarRole::parameter);

    std::size_t size() const noexcept { return names_.size(); }
    const std::string &name(std::size_t i) const { return names_.at(i); }
    VarRole role(std::size_t i) const { return roles_.at(i); }
    bool is_lambda(std::size_t i) const { return roles_.at(i) == VarRole::lambda; }

    std::optional<std::size_t> find(std::string_view name) const noexcept;
    // Throws std::out_of_range for unknown names.
    std::size_t index(std::string_view name) const;

    bool operator==(const VarTable &) const = default;

private:
    std::vector<std::string> names_;
    std::vector<VarRole> roles_;
};

// A signed monomial: sign * prod v_i^{e_i}.
struct Monomial {
    Exponents exponents;
    int sign = 1;

    Monomial() = default;
    explicit Monomial(Exponents e, int s = 1) : exponents(std::move(e)), sign(s) {}

    static Monomial one(std::size_t nvars) { return Monomial(Exponents(nvars, 0)); }

    bool is_unit() const noexcept;

    bool operator==(const Monomial &) const = default;
};

// Exponent arithmetic is checked; leaving the 32-bit range throws std::overflow_error.
Monomial operator*(const Monomial &a, const Monomial &b);
Monomial operator/(const Monomial &a, const Monomial &b);
Monomial pow(const Monomial &m, std::int64_t k);
Monomial operator-(const Monomial &m);

Exponent checked_exponent(std::int64_t e);

class TruncationContext;
using ContextPtr = std::shared_ptr<const TruncationContext>;

// Variable table, grading weights, truncation order and optional caps.
//
// A monomial is admitted when its weighted degree is at most `order()` and
// every capped variable satisfies -cap <= e <= cap.  Widened contexts (used
// for intermediate products) relax both limits by fixed slacks.
class TruncationContext {
public:
    TruncationContext(std::shared_ptr<const VarTable> vars, std::vector<std::int64_t> weights,
                      std::int64_t order, std::vector<std::optional<Exponent>> caps = {});

    const VarTable &vars() const noexcept { return *vars_; }
    const std::shared_ptr<const VarTable> &vars_ptr() const noexcept { return vars_; }
    std::size_t nvars() const noexcept { return vars_->size(); }
    std::int64_t weight(std::size_t i) const { return weights_.at(i); }
    const std::vector<std::int64_t> &weights() const noexcept { return weights_; }
    std::int64_t order() const noexcept { return order_; }
    std::optional<Exponent> cap(std::size_t i) const { return caps_.at(i); }
    bool has_caps() const noexcept;
    bool is_widened() const noexcept;

    std::int64_t degree(std::span<const Exponent> e) const;
    std::int64_t degree(const Monomial &m) const { return degree(m.exponents); }
    bool within_bounds(std::span<const Exponent> e) const;
    bool admits(std::span<const Exponent> e) const { return degree(e) <= order_ && within_bounds(e); }

    Monomial one() const { return Monomial::one(nvars()); }
    Monomial variable(std::string_view name) const;
    Monomial monomial(std::initializer_list<std::pair<std::string_view, std::int64_t>> powers,
                      int sign = 1) const;

    // A context over the same variables with the order raised by
    // `degree_slack` and capped variables allowed `below[i]` further below
    // -cap and `above[i]` further above +cap.
    ContextPtr widened(std::int64_t degree_slack, const std::vector<std::int64_t> &below,
                       const std::vector<std::int64_t> &above) const;
    // The same variables, weights and caps with every slack removed.
    ContextPtr base() const;

    bool operator==(const TruncationContext &other) const;

private:
    std::shared_ptr<const VarTable> vars_;
    std::vector<std::int64_t> weights_;
    std::int64_t order_;
    std::vector<std::optional<Exponent>> caps_;
    std::int64_t degree_slack_ = 0;
    std::vector<std::int64_t> below_;
    std::vector<std::int64_t> above_;
};

bool same_context(const TruncationContext &a, const TruncationContext &b);

// Fluent construction of a context.
class ContextBuilder {
public:
    ContextBuilder &var(std::string_view name, std::int64_t weight, std::optional<Exponent> cap = {});
    ContextBuilder &lambda(std::string_view name);
    ContextBuilder &order(std::int64_t n);
    ContextPtr build() const;

private:
    VarTable table_;
    std::vector<std::int64_t> weights_;
    std::vector<std::optional<Exponent>> caps_;
    std::int64_t order_ = 0;
};

struct ExponentsHash {
    std::size_t operator()(const Exponents &e) const noexcept;
};

using TermMap = std::unordered_map<Exponents, Coeff, ExponentsHash>;

class LaurentPoly {
public:
    explicit LaurentPoly(ContextPtr ctx);

    static LaurentPoly constant(ContextPtr ctx, const Coeff &c);
    static LaurentPoly from_monomial(ContextPtr ctx, const Monomial &m, const Coeff &c = 1);

    const TruncationContext &context() const noexcept { return *ctx_; }
    const ContextPtr &context_ptr() const noexcept { return ctx_; }
    const TermMap &terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    Coeff coeff(std::span<const Exponent> e) const;

    // Adds c * v^e when the context admits e; zero results are erased.
    void add_term(const Exponents &e, const Coeff &c);

    // Smallest weighted degree among stored terms (0 for the zero series).
    std::int64_t min_degree() const;

    // Terms ordered by weighted degree, then lexicographically by exponents.
    std::vector<std::pair<Exponents, Coeff>> sorted_terms() const;

    // Re-truncates under another context over an identical variable table.
    LaurentPoly retruncate(ContextPtr ctx) const;

    LaurentPoly &operator+=(const LaurentPoly &other);
    LaurentPoly &operator-=(const LaurentPoly &other);
    LaurentPoly &operator*=(const LaurentPoly &other);
    LaurentPoly operator-() const;

    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly &b) { return a += b; }
    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly &b) { return a -= b; }
    friend LaurentPoly operator*(const LaurentPoly &a, const LaurentPoly &b);

    bool operator==(const LaurentPoly &other) const;

    std::string to_string() const;

private:
    void require_same_context(const LaurentPoly &other, const char *op) const;

    ContextPtr ctx_;
    TermMap terms_;
};

std::string format_monomial(const VarTable &vars, std::span<const Exponent> e);

LaurentPoly poly_add(const LaurentPoly &p, const LaurentPoly &q);
LaurentPoly poly_mul(const LaurentPoly &p, const LaurentPoly &q);
Coeff poly_coeff(const LaurentPoly &p, const Monomial &m);

// p * m, truncated.
LaurentPoly mul_monomial(const LaurentPoly &p, const Monomial &m);
// p * (1 + m), truncated.  A sign on m gives (1 - |m|).
LaurentPoly mul_one_plus(const LaurentPoly &p, const Monomial &m);
// p / (1 - m) = p * (1 + m + m^2 + ...), truncated.  Requires degree(m) > 0.
LaurentPoly div_one_minus(const LaurentPoly &p, const Monomial &m);

// Monomial homomorphism: every source variable occurring in p is sent to
// images[i]; the image is truncated under `target`.
LaurentPoly substitute_monomial(const LaurentPoly &p, const std::vector<std::optional<Monomial>> &images,
                                ContextPtr target);
LaurentPoly substitute_monomial(const LaurentPoly &p,
                                const std::vector<std::pair<std::string, Monomial>> &images,
                                ContextPtr target);

LaurentPoly expand_geometric(const Monomial &m, ContextPtr ctx);

// prefactor * prod_i (1 + binomials[i]) * prod_j 1/(1 - geometrics[j]).
//
// Intermediate products are formed under a widened context so that factors
// of negative degree (such as 1 + q^{-1}) cannot resurrect terms that an
// earlier truncation dropped; the result is truncated under `ctx`.
LaurentPoly expand_factored(const Monomial &prefactor, std::span<const Monomial> binomials,
                            std::span<const Monomial> geometrics, ContextPtr ctx);

// A lower bound on the weighted degree of every term of the product above.
std::int64_t factored_min_degree(const Monomial &prefactor, std::span<const Monomial> binomials,
                                 const TruncationContext &ctx);

// prod_{i=0}^{n-1} (1 - base * step^i)
LaurentPoly pochhammer_finite(const Monomial &base, const Monomial &step, std::int64_t n, ContextPtr ctx);

// prod_{i>=0} (1 - base * step^i), or prod_{i>=0} 1/(1 - base * step^i) when invert is set.
LaurentPoly pochhammer_infinite(const Monomial &base, const Monomial &step, bool invert, ContextPtr ctx);

} // namespace mpa
