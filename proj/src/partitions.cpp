#include "mpa/partitions.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <sstream>

namespace mpa {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts))
{
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (parts_[i] < 1) {
            throw std::invalid_argument("partition parts must be positive");
        }
        if (i > 0 && parts_[i] > parts_[i - 1]) {
            throw std::invalid_argument("partition parts must be weakly decreasing");
        }
    }
}

std::int64_t Partition::weight() const noexcept
{
    return std::accumulate(parts_.begin(), parts_.end(), std::int64_t{0});
}

std::string Partition::to_string() const
{
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        os << (i ? "," : "") << parts_[i];
    }
    os << ')';
    return os.str();
}

// ---------------------------------------------------------- enumeration

PartitionStream::PartitionStream(int n, LengthPredicate filter, int bound) : n_(n), filter_(std::move(filter))
{
    if (n < 0) {
        throw std::invalid_argument("cannot partition a negative integer");
    }
    if (n > bound) {
        throw std::out_of_range("partition size " + std::to_string(n) + " exceeds the safety bound "
                                + std::to_string(bound));
    }
}

bool PartitionStream::advance()
{
    if (!started_) {
        started_ = true;
        if (n_ > 0) {
            current_ = {n_};
        }
        return true;
    }
    // Strip trailing ones, lower the last remaining part and refill greedily.
    int freed = 0;
    while (!current_.empty() && current_.back() == 1) {
        current_.pop_back();
        ++freed;
    }
    if (current_.empty()) {
        return false;
    }
    const int part = --current_.back();
    ++freed;
    while (freed > 0) {
        const int next = std::min(part, freed);
        current_.push_back(next);
        freed -= next;
    }
    return true;
}

std::optional<Partition> PartitionStream::next()
{
    while (!done_) {
        if (!advance()) {
            done_ = true;
            break;
        }
        if (!filter_ || filter_(current_.size())) {
            return Partition(current_);
        }
    }
    return std::nullopt;
}

std::vector<Partition> gen_partitions(int n, LengthPredicate filter, int bound)
{
    PartitionStream stream(n, std::move(filter), bound);
    std::vector<Partition> out;
    while (auto p = stream.next()) {
        out.push_back(std::move(*p));
    }
    return out;
}

// ----------------------------------------------------------- statistics

Partition conjugate(const Partition &p)
{
    if (p.empty()) {
        return {};
    }
    std::vector<int> out(static_cast<std::size_t>(p.part(1)), 0);
    for (int part : p.parts()) {
        for (int j = 0; j < part; ++j) {
            ++out[static_cast<std::size_t>(j)];
        }
    }
    return Partition(std::move(out));
}

std::int64_t alt_sum(const Partition &p)
{
    std::int64_t s = 0;
    for (std::size_t i = 0; i < p.length(); ++i) {
        s += (i % 2 == 0) ? p.parts()[i] : -p.parts()[i];
    }
    return s;
}

std::int64_t schmidt_weight(const Partition &p)
{
    std::int64_t s = 0;
    for (std::size_t i = 0; i < p.length(); i += 2) {
        s += p.parts()[i];
    }
    return s;
}

// ------------------------------------------------------------- families

FamilySpec FamilySpec::gen(std::set<int> residues, int k)
{
    if (k < 2) {
        throw std::invalid_argument("modulus must be at least 2");
    }
    for (int t : residues) {
        if (t < 0 || t >= k) {
            throw std::invalid_argument("residue " + std::to_string(t) + " is outside [0, " + std::to_string(k) + ")");
        }
    }
    FamilySpec f(FamilyTag::gen);
    f.residues = std::move(residues);
    f.modulus = k;
    return f;
}

std::string family_name(FamilyTag t)
{
    switch (t) {
    case FamilyTag::all: return "all";
    case FamilyTag::g1: return "g1";
    case FamilyTag::g2: return "g2";
    case FamilyTag::g1p: return "g1p";
    case FamilyTag::g2p: return "g2p";
    case FamilyTag::p1: return "p1";
    case FamilyTag::p2: return "p2";
    case FamilyTag::p1p: return "p1p";
    case FamilyTag::p2p: return "p2p";
    case FamilyTag::gen: return "gen";
    }
    return "?";
}

std::string FamilySpec::name() const
{
    if (tag != FamilyTag::gen) {
        return family_name(tag);
    }
    std::string out = "gen(";
    bool first = true;
    for (int t : residues) {
        out += (first ? "" : ",") + std::to_string(t);
        first = false;
    }
    return out + ";" + std::to_string(modulus) + ")";
}

std::optional<FamilyTag> parse_family(std::string_view s)
{
    std::string lower;
    for (char c : s) {
        lower += (c == '\'') ? 'p' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    for (auto t : {FamilyTag::all, FamilyTag::g1, FamilyTag::g2, FamilyTag::g1p, FamilyTag::g2p, FamilyTag::p1,
                   FamilyTag::p2, FamilyTag::p1p, FamilyTag::p2p}) {
        if (lower == family_name(t)) {
            return t;
        }
    }
    return std::nullopt;
}

namespace {

bool odd(int v)
{
    return v % 2 != 0;
}

// Conditions binding position i (1-based) to its successor; `a` = part i, `b` = part i+1.
bool pair_ok(const FamilySpec &f, int a, int b)
{
    const int d = a - b;
    switch (f.tag) {
    case FamilyTag::g1:
    case FamilyTag::g2: return d >= 2 && (!odd(a) || d >= 3);
    case FamilyTag::g1p:
    case FamilyTag::g2p: return d >= 1;
    case FamilyTag::p1: return !odd(b) || d >= 3;
    case FamilyTag::p2: return !odd(a) || d >= 3;
    default: return true;
    }
}

// Conditions on the part at position i alone.
bool position_ok(const FamilySpec &f, std::size_t i, int a)
{
    switch (f.tag) {
    case FamilyTag::g1p:
    case FamilyTag::p1p: return i % 2 == 1 || !odd(a);
    case FamilyTag::g2p:
    case FamilyTag::p2p: return i % 2 == 0 || !odd(a);
    case FamilyTag::gen: return f.residues.count(static_cast<int>(i % static_cast<std::size_t>(f.modulus))) == 0
                                || !odd(a);
    default: return true;
    }
}

bool last_ok(const FamilySpec &f, int last)
{
    return !(f.tag == FamilyTag::g2 || f.tag == FamilyTag::p2) || last >= 2;
}

} // namespace

bool admits_prefix(const FamilySpec &f, std::span<const int> prefix)
{
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (!position_ok(f, i + 1, prefix[i])) {
            return false;
        }
        if (i > 0 && !pair_ok(f, prefix[i - 1], prefix[i])) {
            return false;
        }
    }
    if (f.tag == FamilyTag::gen) {
        // Odd parts are distinct; parts are sorted, so equal odd parts are adjacent.
        for (std::size_t i = 1; i < prefix.size(); ++i) {
            if (prefix[i] == prefix[i - 1] && odd(prefix[i])) {
                return false;
            }
        }
    }
    return true;
}

bool is_member(const FamilySpec &f, const Partition &p)
{
    if (p.empty()) {
        return true;
    }
    return admits_prefix(f, p.parts()) && last_ok(f, p.parts().back());
}

// ------------------------------------------------------------- schemes

StatScheme StatScheme::refined(int m)
{
    if (m < 1) {
        throw std::invalid_argument("refined scheme needs at least one variable");
    }
    return {StatKind::refined, m};
}

std::optional<StatKind> parse_stat(std::string_view s)
{
    std::string lower;
    for (char c : s) {
        lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (lower == "plain") {
        return StatKind::plain;
    }
    if (lower == "alt") {
        return StatKind::alt;
    }
    if (lower == "schmidt") {
        return StatKind::schmidt;
    }
    return std::nullopt;
}

std::string refined_var(std::size_t i)
{
    return "x" + std::to_string(i);
}

namespace {

Monomial scheme_monomial(const std::vector<int> &parts, const StatScheme &scheme, const TruncationContext &ctx)
{
    Monomial m = ctx.one();
    if (parts.empty()) {
        return m;
    }
    const Partition p(parts);
    switch (scheme.kind) {
    case StatKind::plain: m.exponents[ctx.vars().index("q")] = checked_exponent(p.weight()); break;
    case StatKind::alt:
        m.exponents[ctx.vars().index("q")] = checked_exponent(p.weight());
        m.exponents[ctx.vars().index("z")] = checked_exponent(alt_sum(p));
        break;
    case StatKind::schmidt:
        m.exponents[ctx.vars().index("q")] = checked_exponent(schmidt_weight(p));
        m.exponents[ctx.vars().index("z")] = checked_exponent(alt_sum(p));
        break;
    case StatKind::refined:
        if (p.length() > static_cast<std::size_t>(scheme.m)) {
            throw std::invalid_argument("partition " + p.to_string() + " is longer than the "
                                        + std::to_string(scheme.m) + " refined variables");
        }
        for (std::size_t i = 1; i <= p.length(); ++i) {
            m.exponents[ctx.vars().index(refined_var(i))] = p.part(i);
        }
        break;
    }
    return m;
}

} // namespace

LaurentPoly refined_monomial(const Partition &p, const StatScheme &scheme, ContextPtr ctx)
{
    auto m = scheme_monomial(p.parts(), scheme, *ctx);
    return LaurentPoly::from_monomial(std::move(ctx), m);
}

namespace {

// Depth-first enumeration of members.  `part_cost(i, a)` is the weighted
// degree contributed by part a at position i (1-based).  It must be
// non-negative and non-decreasing in a; nullopt means a is too large for
// position i.  Under the Schmidt grading even positions cost nothing and are
// bounded by their predecessor only.
struct Enumerator {
    const FamilySpec &family;
    std::int64_t budget;
    std::function<std::optional<std::int64_t>(std::size_t, int)> part_cost;
    std::function<bool(std::size_t)> length_ok;
    std::size_t max_length;
    std::function<void(const std::vector<int> &)> emit;

    std::vector<int> parts;

    void run() { descend(0, std::numeric_limits<int>::max()); }

    void descend(std::int64_t spent, int ceiling)
    {
        if (length_ok(parts.size()) && (parts.empty() || last_ok(family, parts.back()))) {
            emit(parts);
        }
        if (parts.size() >= max_length) {
            return;
        }
        const std::size_t pos = parts.size() + 1;
        for (int a = 1; a <= ceiling; ++a) {
            const auto cost = part_cost(pos, a);
            if (!cost || spent + *cost > budget) {
                break;
            }
            parts.push_back(a);
            if (admits_prefix(family, parts)) {
                descend(spent + *cost, a);
            }
            parts.pop_back();
        }
    }
};

std::int64_t positive_order(const TruncationContext &ctx)
{
    return std::max<std::int64_t>(ctx.order(), 0);
}

} // namespace

LaurentPoly brute_series(const FamilySpec &f, StatKind scheme, ContextPtr ctx)
{
    if (scheme == StatKind::refined) {
        throw std::invalid_argument("brute_series takes plain, alt or schmidt; use brute_refined");
    }
    const auto &c = *ctx;
    const auto qi = c.vars().index("q");
    const std::int64_t wq = c.weight(qi);
    if (wq <= 0) {
        throw std::invalid_argument("brute_series needs q of positive weight");
    }
    const auto scheme_obj = StatScheme{scheme, 0};
    LaurentPoly out(ctx);
    // a(p) >= 0, so ignoring the weight of z only enlarges the enumeration.
    Enumerator e{f,
                 positive_order(c),
                 [&](std::size_t pos, int a) -> std::optional<std::int64_t> {
                     if (scheme == StatKind::schmidt && pos % 2 == 0) {
                         return 0;
                     }
                     return wq * a;
                 },
                 [](std::size_t) { return true; },
                 std::numeric_limits<std::size_t>::max(),
                 [&](const std::vector<int> &parts) {
                     auto m = scheme_monomial(parts, scheme_obj, c);
                     out.add_term(m.exponents, 1);
                 },
                 {}};
    e.run();
    return out;
}

bool LengthFilter::accepts(std::size_t length) const
{
    const auto l = static_cast<std::int64_t>(length);
    switch (kind) {
    case Kind::exact: return l == n;
    case Kind::paired: return l == 2 * n - 1 || l == 2 * n;
    case Kind::bounded: return l <= n;
    case Kind::unbounded: return true;
    }
    return false;
}

std::optional<int> LengthFilter::max_length() const
{
    switch (kind) {
    case Kind::exact:
    case Kind::bounded: return n;
    case Kind::paired: return 2 * n;
    case Kind::unbounded: return std::nullopt;
    }
    return std::nullopt;
}

LaurentPoly brute_refined(const FamilySpec &f, const LengthFilter &filter, ContextPtr ctx)
{
    const auto &c = *ctx;
    std::vector<std::size_t> index;
    for (std::size_t i = 1;; ++i) {
        auto found = c.vars().find(refined_var(i));
        if (!found) {
            break;
        }
        index.push_back(*found);
    }
    const std::size_t m = index.size();
    if (m == 0) {
        throw std::invalid_argument("insufficient variable count: context has no x1");
    }
    std::int64_t min_weight = std::numeric_limits<std::int64_t>::max();
    for (auto i : index) {
        min_weight = std::min(min_weight, c.weight(i));
    }
    if (min_weight <= 0) {
        throw std::invalid_argument("refined variables need positive weights");
    }
    if (auto limit = filter.max_length(); limit && static_cast<std::size_t>(*limit) > m) {
        throw std::invalid_argument("insufficient variable count: lengths up to " + std::to_string(*limit)
                                    + " need " + std::to_string(*limit) + " variables, context has "
                                    + std::to_string(m));
    }
    if (!filter.max_length()) {
        // Unbounded: no member longer than m may fit under the order.
        bool overflow = false;
        Enumerator probe{f,
                         positive_order(c),
                         [&](std::size_t, int a) -> std::optional<std::int64_t> { return min_weight * a; },
                         [&](std::size_t len) { return len > m; },
                         m + 1,
                         [&](const std::vector<int> &) { overflow = true; },
                         {}};
        probe.run();
        if (overflow) {
            throw std::invalid_argument("insufficient variable count: members longer than "
                                        + std::to_string(m) + " parts fit under order "
                                        + std::to_string(c.order()));
        }
    }
    LaurentPoly out(ctx);
    Exponents e(c.nvars(), 0);
    Enumerator en{f,
                  positive_order(c),
                  [&](std::size_t pos, int a) -> std::optional<std::int64_t> {
                      const auto cap = c.cap(index[pos - 1]);
                      if (cap && a > *cap) {
                          return std::nullopt;
                      }
                      return c.weight(index[pos - 1]) * a;
                  },
                  [&](std::size_t len) { return filter.accepts(len); },
                  filter.max_length() ? static_cast<std::size_t>(*filter.max_length()) : m,
                  [&](const std::vector<int> &parts) {
                      std::fill(e.begin(), e.end(), 0);
                      for (std::size_t i = 0; i < parts.size(); ++i) {
                          e[index[i]] = parts[i];
                      }
                      out.add_term(e, 1);
                  },
                  {}};
    en.run();
    return out;
}

} // namespace mpa
