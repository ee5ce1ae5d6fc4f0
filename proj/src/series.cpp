#include "mpa/series.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace mpa {

// ---------------------------------------------------------------- VarTable

std::size_t VarTable::add(std::string_view name, VarRole role)
{
    if (name.empty()) {
        throw std::invalid_argument("variable names must be non-empty");
    }
    if (find(name)) {
        throw std::invalid_argument("duplicate variable name '" + std::string(name) + "'");
    }
    names_.emplace_back(name);
    roles_.push_back(role);
    return names_.size() - 1;
}

std::optional<std::size_t> VarTable::find(std::string_view name) const noexcept
{
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t VarTable::index(std::string_view name) const
{
    if (auto i = find(name)) {
        return *i;
    }
    throw std::out_of_range("unknown variable '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- Monomial

Exponent checked_exponent(std::int64_t e)
{
    if (e > std::numeric_limits<Exponent>::max() || e < std::numeric_limits<Exponent>::min()) {
        throw std::overflow_error("exponent overflow");
    }
    return static_cast<Exponent>(e);
}

bool Monomial::is_unit() const noexcept
{
    return std::all_of(exponents.begin(), exponents.end(), [](Exponent e) { return e == 0; });
}

namespace {

void require_same_arity(const Monomial &a, const Monomial &b)
{
    if (a.exponents.size() != b.exponents.size()) {
        throw ContextMismatch("monomials over different variable tables");
    }
}

} // namespace

Monomial operator*(const Monomial &a, const Monomial &b)
{
    require_same_arity(a, b);
    Exponents e(a.exponents.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = checked_exponent(std::int64_t{a.exponents[i]} + b.exponents[i]);
    }
    return Monomial(std::move(e), a.sign * b.sign);
}

Monomial operator/(const Monomial &a, const Monomial &b)
{
    require_same_arity(a, b);
    Exponents e(a.exponents.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = checked_exponent(std::int64_t{a.exponents[i]} - b.exponents[i]);
    }
    return Monomial(std::move(e), a.sign * b.sign);
}

Monomial pow(const Monomial &m, std::int64_t k)
{
    Exponents e(m.exponents.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const std::int64_t base = m.exponents[i];
        if (base != 0 && (k > std::numeric_limits<Exponent>::max() || k < std::numeric_limits<Exponent>::min())) {
            throw std::overflow_error("exponent overflow");
        }
        e[i] = checked_exponent(base * k);
    }
    const int sign = (m.sign < 0 && (k % 2 != 0)) ? -1 : 1;
    return Monomial(std::move(e), sign);
}

Monomial operator-(const Monomial &m)
{
    return Monomial(m.exponents, -m.sign);
}

// ------------------------------------------------------- TruncationContext

TruncationContext::TruncationContext(std::shared_ptr<const VarTable> vars, std::vector<std::int64_t> weights,
                                     std::int64_t order, std::vector<std::optional<Exponent>> caps)
    : vars_(std::move(vars)), weights_(std::move(weights)), order_(order), caps_(std::move(caps))
{
    if (!vars_) {
        throw std::invalid_argument("context requires a variable table");
    }
    const auto n = vars_->size();
    if (weights_.size() != n) {
        throw std::invalid_argument("one weight per variable is required");
    }
    if (caps_.empty()) {
        caps_.resize(n);
    }
    if (caps_.size() != n) {
        throw std::invalid_argument("caps must be empty or give one entry per variable");
    }
    if (order_ < 0) {
        throw std::invalid_argument("truncation order must be non-negative");
    }
    bool positive = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (weights_[i] < 0) {
            throw std::invalid_argument("weights must be non-negative");
        }
        if (vars_->is_lambda(i) && weights_[i] != 0) {
            throw std::invalid_argument("lambda variable '" + vars_->name(i) + "' must have weight 0");
        }
        if (caps_[i] && *caps_[i] < 0) {
            throw std::invalid_argument("caps must be non-negative");
        }
        positive = positive || weights_[i] > 0;
    }
    if (!positive) {
        throw std::invalid_argument("at least one variable needs a positive weight");
    }
    below_.assign(n, 0);
    above_.assign(n, 0);
}

bool TruncationContext::has_caps() const noexcept
{
    return std::any_of(caps_.begin(), caps_.end(), [](const auto &c) { return c.has_value(); });
}

bool TruncationContext::is_widened() const noexcept
{
    return degree_slack_ != 0 || std::any_of(below_.begin(), below_.end(), [](auto v) { return v != 0; })
           || std::any_of(above_.begin(), above_.end(), [](auto v) { return v != 0; });
}

std::int64_t TruncationContext::degree(std::span<const Exponent> e) const
{
    std::int64_t d = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        d += weights_[i] * e[i];
    }
    return d;
}

bool TruncationContext::within_bounds(std::span<const Exponent> e) const
{
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (!caps_[i]) {
            continue;
        }
        const std::int64_t cap = *caps_[i];
        if (e[i] > cap + above_[i] || e[i] < -cap - below_[i]) {
            return false;
        }
    }
    return true;
}

Monomial TruncationContext::variable(std::string_view name) const
{
    auto m = one();
    m.exponents[vars_->index(name)] = 1;
    return m;
}

Monomial TruncationContext::monomial(std::initializer_list<std::pair<std::string_view, std::int64_t>> powers,
                                     int sign) const
{
    auto m = one();
    m.sign = sign;
    for (const auto &[name, power] : powers) {
        auto &slot = m.exponents[vars_->index(name)];
        slot = checked_exponent(slot + power);
    }
    return m;
}

ContextPtr TruncationContext::widened(std::int64_t degree_slack, const std::vector<std::int64_t> &below,
                                      const std::vector<std::int64_t> &above) const
{
    auto out = std::make_shared<TruncationContext>(*this);
    out->degree_slack_ += degree_slack;
    out->order_ += degree_slack;
    for (std::size_t i = 0; i < nvars(); ++i) {
        if (i < below.size()) {
            out->below_[i] += below[i];
        }
        if (i < above.size()) {
            out->above_[i] += above[i];
        }
    }
    return out;
}

ContextPtr TruncationContext::base() const
{
    auto out = std::make_shared<TruncationContext>(*this);
    out->order_ -= degree_slack_;
    out->degree_slack_ = 0;
    std::fill(out->below_.begin(), out->below_.end(), 0);
    std::fill(out->above_.begin(), out->above_.end(), 0);
    return out;
}

bool TruncationContext::operator==(const TruncationContext &other) const
{
    return *vars_ == *other.vars_ && weights_ == other.weights_ && order_ == other.order_ && caps_ == other.caps_
           && degree_slack_ == other.degree_slack_ && below_ == other.below_ && above_ == other.above_;
}

bool same_context(const TruncationContext &a, const TruncationContext &b)
{
    return &a == &b || a == b;
}

ContextBuilder &ContextBuilder::var(std::string_view name, std::int64_t weight, std::optional<Exponent> cap)
{
    table_.add(name, VarRole::parameter);
    weights_.push_back(weight);
    caps_.push_back(cap);
    return *this;
}

ContextBuilder &ContextBuilder::lambda(std::string_view name)
{
    table_.add(name, VarRole::lambda);
    weights_.push_back(0);
    caps_.emplace_back();
    return *this;
}

ContextBuilder &ContextBuilder::order(std::int64_t n)
{
    order_ = n;
    return *this;
}

ContextPtr ContextBuilder::build() const
{
    return std::make_shared<TruncationContext>(std::make_shared<VarTable>(table_), weights_, order_, caps_);
}

std::size_t ExponentsHash::operator()(const Exponents &e) const noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto x : e) {
        h ^= static_cast<std::uint32_t>(x);
        h *= 0x100000001b3ULL;
        h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
}

// ------------------------------------------------------------ LaurentPoly

LaurentPoly::LaurentPoly(ContextPtr ctx) : ctx_(std::move(ctx))
{
    if (!ctx_) {
        throw std::invalid_argument("series require a truncation context");
    }
}

LaurentPoly LaurentPoly::constant(ContextPtr ctx, const Coeff &c)
{
    LaurentPoly p(std::move(ctx));
    p.add_term(Exponents(p.ctx_->nvars(), 0), c);
    return p;
}

LaurentPoly LaurentPoly::from_monomial(ContextPtr ctx, const Monomial &m, const Coeff &c)
{
    LaurentPoly p(std::move(ctx));
    if (m.exponents.size() != p.ctx_->nvars()) {
        throw ContextMismatch("monomial arity does not match the context");
    }
    p.add_term(m.exponents, m.sign < 0 ? Coeff(-c) : c);
    return p;
}

Coeff LaurentPoly::coeff(std::span<const Exponent> e) const
{
    auto it = terms_.find(Exponents(e.begin(), e.end()));
    return it == terms_.end() ? Coeff(0) : it->second;
}

void LaurentPoly::add_term(const Exponents &e, const Coeff &c)
{
    if (c == 0 || !ctx_->admits(e)) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) {
            terms_.erase(it);
        }
    }
}

std::int64_t LaurentPoly::min_degree() const
{
    if (terms_.empty()) {
        return 0;
    }
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto &[e, c] : terms_) {
        best = std::min(best, ctx_->degree(e));
    }
    return best;
}

std::vector<std::pair<Exponents, Coeff>> LaurentPoly::sorted_terms() const
{
    std::vector<std::pair<Exponents, Coeff>> out(terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end(), [this](const auto &a, const auto &b) {
        const auto da = ctx_->degree(a.first);
        const auto db = ctx_->degree(b.first);
        if (da != db) {
            return da < db;
        }
        return a.first < b.first;
    });
    return out;
}

LaurentPoly LaurentPoly::retruncate(ContextPtr ctx) const
{
    if (!(ctx->vars() == ctx_->vars())) {
        throw ContextMismatch("retruncate requires an identical variable table");
    }
    LaurentPoly out(std::move(ctx));
    for (const auto &[e, c] : terms_) {
        if (out.ctx_->admits(e)) {
            out.terms_.emplace(e, c);
        }
    }
    return out;
}

void LaurentPoly::require_same_context(const LaurentPoly &other, const char *op) const
{
    if (!same_context(*ctx_, *other.ctx_)) {
        throw ContextMismatch(std::string("context mismatch in ") + op);
    }
}

LaurentPoly &LaurentPoly::operator+=(const LaurentPoly &other)
{
    require_same_context(other, "addition");
    for (const auto &[e, c] : other.terms_) {
        add_term(e, c);
    }
    return *this;
}

LaurentPoly &LaurentPoly::operator-=(const LaurentPoly &other)
{
    require_same_context(other, "subtraction");
    for (const auto &[e, c] : other.terms_) {
        add_term(e, -c);
    }
    return *this;
}

LaurentPoly &LaurentPoly::operator*=(const LaurentPoly &other)
{
    *this = *this * other;
    return *this;
}

LaurentPoly LaurentPoly::operator-() const
{
    LaurentPoly out(ctx_);
    for (const auto &[e, c] : terms_) {
        out.terms_.emplace(e, -c);
    }
    return out;
}

LaurentPoly operator*(const LaurentPoly &a, const LaurentPoly &b)
{
    a.require_same_context(b, "multiplication");
    LaurentPoly out(a.ctx_);
    const auto n = a.ctx_->nvars();
    Exponents e(n);
    Coeff prod;
    for (const auto &[ea, ca] : a.terms_) {
        for (const auto &[eb, cb] : b.terms_) {
            for (std::size_t i = 0; i < n; ++i) {
                e[i] = checked_exponent(std::int64_t{ea[i]} + eb[i]);
            }
            if (!out.ctx_->admits(e)) {
                continue;
            }
            mpz_mul(prod.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
            out.add_term(e, prod);
        }
    }
    return out;
}

bool LaurentPoly::operator==(const LaurentPoly &other) const
{
    return same_context(*ctx_, *other.ctx_) && terms_ == other.terms_;
}

std::string format_monomial(const VarTable &vars, std::span<const Exponent> e)
{
    std::string out;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) {
            continue;
        }
        if (!out.empty()) {
            out += '*';
        }
        out += vars.name(i);
        if (e[i] != 1) {
            out += '^';
            out += std::to_string(e[i]);
        }
    }
    return out.empty() ? "1" : out;
}

std::string LaurentPoly::to_string() const
{
    if (terms_.empty()) {
        return "0";
    }
    std::ostringstream os;
    bool first = true;
    for (const auto &[e, c] : sorted_terms()) {
        const bool negative = c < 0;
        const Coeff mag = abs(c);
        if (first) {
            os << (negative ? "-" : "");
        } else {
            os << (negative ? " - " : " + ");
        }
        first = false;
        const auto mono = format_monomial(ctx_->vars(), e);
        if (mono == "1") {
            os << mag.get_str();
        } else if (mag == 1) {
            os << mono;
        } else {
            os << mag.get_str() << '*' << mono;
        }
    }
    return os.str();
}

// ------------------------------------------------------------- operations

LaurentPoly poly_add(const LaurentPoly &p, const LaurentPoly &q)
{
    return p + q;
}

LaurentPoly poly_mul(const LaurentPoly &p, const LaurentPoly &q)
{
    return p * q;
}

Coeff poly_coeff(const LaurentPoly &p, const Monomial &m)
{
    if (m.exponents.size() != p.context().nvars()) {
        throw ContextMismatch("monomial arity does not match the context");
    }
    return p.coeff(m.exponents);
}

namespace {

void require_arity(const LaurentPoly &p, const Monomial &m)
{
    if (m.exponents.size() != p.context().nvars()) {
        throw ContextMismatch("monomial arity does not match the context");
    }
}

// Accumulates c * m * p into out.
void accumulate_shift(LaurentPoly &out, const LaurentPoly &p, const Monomial &m)
{
    const auto n = m.exponents.size();
    Exponents e(n);
    for (const auto &[ep, cp] : p.terms()) {
        for (std::size_t i = 0; i < n; ++i) {
            e[i] = checked_exponent(std::int64_t{ep[i]} + m.exponents[i]);
        }
        out.add_term(e, m.sign < 0 ? Coeff(-cp) : cp);
    }
}

} // namespace

LaurentPoly mul_monomial(const LaurentPoly &p, const Monomial &m)
{
    require_arity(p, m);
    LaurentPoly out(p.context_ptr());
    accumulate_shift(out, p, m);
    return out;
}

LaurentPoly mul_one_plus(const LaurentPoly &p, const Monomial &m)
{
    require_arity(p, m);
    LaurentPoly out = p;
    accumulate_shift(out, p, m);
    return out;
}

LaurentPoly div_one_minus(const LaurentPoly &p, const Monomial &m)
{
    require_arity(p, m);
    const auto &ctx = p.context();
    const auto d = ctx.degree(m);
    if (d <= 0) {
        throw NonContracting("geometric expansion needs a base of positive weighted degree, got "
                             + format_monomial(ctx.vars(), m.exponents));
    }
    if (p.is_zero()) {
        return p;
    }
    // 1/(1-m) = (1+m)(1+m^2)(1+m^4)... truncated; every partial exponent lies
    // between a kept term and its final image, so intermediate truncation is exact.
    const auto low = p.min_degree();
    LaurentPoly out = p;
    Monomial power = m;
    std::int64_t power_degree = d;
    while (low + power_degree <= ctx.order()) {
        out = mul_one_plus(out, power);
        if (power_degree > ctx.order() - low) {
            break;
        }
        power = power * power;
        power_degree *= 2;
    }
    return out;
}

LaurentPoly substitute_monomial(const LaurentPoly &p, const std::vector<std::optional<Monomial>> &images,
                                ContextPtr target)
{
    const auto &src = p.context();
    if (images.size() != src.nvars()) {
        throw std::invalid_argument("substitution needs one (possibly empty) image per source variable");
    }
    for (const auto &img : images) {
        if (img && img->exponents.size() != target->nvars()) {
            throw ContextMismatch("substitution image is not over the target variable table");
        }
    }
    LaurentPoly out(target);
    for (const auto &[e, c] : p.terms()) {
        Monomial image = target->one();
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) {
                continue;
            }
            if (!images[i]) {
                throw std::invalid_argument("unmapped variable '" + src.vars().name(i) + "'");
            }
            image = image * pow(*images[i], e[i]);
        }
        out.add_term(image.exponents, image.sign < 0 ? Coeff(-c) : c);
    }
    return out;
}

LaurentPoly substitute_monomial(const LaurentPoly &p, const std::vector<std::pair<std::string, Monomial>> &images,
                                ContextPtr target)
{
    std::vector<std::optional<Monomial>> by_index(p.context().nvars());
    for (const auto &[name, m] : images) {
        by_index.at(p.context().vars().index(name)) = m;
    }
    return substitute_monomial(p, by_index, std::move(target));
}

LaurentPoly expand_geometric(const Monomial &m, ContextPtr ctx)
{
    return div_one_minus(LaurentPoly::constant(ctx, 1), m);
}

std::int64_t factored_min_degree(const Monomial &prefactor, std::span<const Monomial> binomials,
                                 const TruncationContext &ctx)
{
    std::int64_t low = ctx.degree(prefactor);
    for (const auto &b : binomials) {
        low += std::min<std::int64_t>(0, ctx.degree(b));
    }
    return low;
}

LaurentPoly expand_factored(const Monomial &prefactor, std::span<const Monomial> binomials,
                            std::span<const Monomial> geometrics, ContextPtr ctx)
{
    const auto n = ctx->nvars();
    for (const auto &g : geometrics) {
        if (ctx->degree(g) <= 0) {
            throw NonContracting("geometric factor with non-positive weighted degree: "
                                 + format_monomial(ctx->vars(), g.exponents));
        }
    }
    if (factored_min_degree(prefactor, binomials, *ctx) > ctx->order()) {
        return LaurentPoly(ctx);
    }

    // How far a partial product may sit outside the final window: a later
    // factor can lower the degree by at most its negative part, and move a
    // capped exponent by at most its own range.
    std::int64_t degree_slack = std::max<std::int64_t>(0, -ctx->degree(prefactor));
    std::vector<std::int64_t> below(n, 0);
    std::vector<std::int64_t> above(n, 0);
    auto account = [&](const Monomial &m, std::int64_t max_power) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::int64_t lo = std::min<std::int64_t>(0, m.exponents[i] * max_power);
            const std::int64_t hi = std::max<std::int64_t>(0, m.exponents[i] * max_power);
            above[i] += -lo;
            below[i] += hi;
        }
    };
    account(prefactor, 1);
    for (const auto &b : binomials) {
        degree_slack += std::max<std::int64_t>(0, -ctx->degree(b));
        account(b, 1);
    }
    if (ctx->has_caps()) {
        for (const auto &g : geometrics) {
            account(g, (ctx->order() + degree_slack) / ctx->degree(g));
        }
    }
    auto wide = ctx->widened(degree_slack, below, above);

    auto acc = LaurentPoly::from_monomial(wide, prefactor);
    for (const auto &b : binomials) {
        if (acc.is_zero()) {
            break;
        }
        acc = mul_one_plus(acc, b);
    }
    for (const auto &g : geometrics) {
        if (acc.is_zero()) {
            break;
        }
        acc = div_one_minus(acc, g);
    }
    return acc.retruncate(ctx);
}

LaurentPoly pochhammer_finite(const Monomial &base, const Monomial &step, std::int64_t n, ContextPtr ctx)
{
    if (n < 0) {
        throw std::invalid_argument("pochhammer length must be non-negative");
    }
    std::vector<Monomial> binomials;
    binomials.reserve(static_cast<std::size_t>(n));
    Monomial factor = base;
    for (std::int64_t i = 0; i < n; ++i) {
        binomials.push_back(-factor);
        factor = factor * step;
    }
    return expand_factored(ctx->one(), binomials, {}, ctx);
}

LaurentPoly pochhammer_infinite(const Monomial &base, const Monomial &step, bool invert, ContextPtr ctx)
{
    const auto step_degree = ctx->degree(step);
    const auto base_degree = ctx->degree(base);
    if (invert && base_degree <= 0) {
        throw NonContracting("inverted infinite product needs a base of positive weighted degree");
    }
    if (step_degree <= 0 && base_degree <= ctx->order()) {
        throw std::domain_error("infinite product does not terminate under this grading");
    }
    if (step_degree <= 0) {
        return LaurentPoly::constant(ctx, 1);
    }
    // Factors of negative degree can be finitely many only; their total
    // deficit bounds how far past the order a relevant factor may sit.
    std::int64_t deficit = 0;
    for (std::int64_t d = base_degree; d < 0; d += step_degree) {
        deficit -= d;
    }
    std::vector<Monomial> factors;
    Monomial factor = base;
    for (std::int64_t d = base_degree; d <= ctx->order() + deficit; d += step_degree) {
        factors.push_back(invert ? factor : -factor);
        factor = factor * step;
    }
    if (invert) {
        return expand_factored(ctx->one(), {}, factors, ctx);
    }
    return expand_factored(ctx->one(), factors, {}, ctx);
}

} // namespace mpa
