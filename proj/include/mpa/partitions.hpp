#pragma once

// Integer partitions, the families studied here, partition statistics and
// brute-force generating-function oracles.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mpa/series.hpp"

namespace mpa {

class Partition {
public:
    Partition() = default;
    // Throws std::invalid_argument unless parts are positive and weakly decreasing.
    explicit Partition(std::vector<int> parts);

    const std::vector<int> &parts() const noexcept { return parts_; }
    std::size_t length() const noexcept { return parts_.size(); }
    bool empty() const noexcept { return parts_.empty(); }
    std::int64_t weight() const noexcept;
    // 1-based access.
    int part(std::size_t i) const { return parts_.at(i - 1); }

    std::string to_string() const;

    auto operator<=>(const Partition &) const = default;

private:
    std::vector<int> parts_;
};

inline constexpr int default_partition_bound = 60;

using LengthPredicate = std::function<bool(std::size_t)>;

// Partitions of n in descending lexicographic order.
class PartitionStream {
public:
    PartitionStream(int n, LengthPredicate filter = {}, int bound = default_partition_bound);

    // The next partition, or nullopt once exhausted.
    std::optional<Partition> next();

private:
    bool advance();

    int n_;
    LengthPredicate filter_;
    std::vector<int> current_;
    bool started_ = false;
    bool done_ = false;
};

std::vector<Partition> gen_partitions(int n, LengthPredicate filter = {}, int bound = default_partition_bound);

Partition conjugate(const Partition &p);
std::int64_t alt_sum(const Partition &p);
std::int64_t schmidt_weight(const Partition &p);

enum class FamilyTag { all, g1, g2, g1p, g2p, p1, p2, p1p, p2p, gen };

struct FamilySpec {
    FamilyTag tag = FamilyTag::all;
    std::set<int> residues;
    int modulus = 0;

    FamilySpec() = default;
    FamilySpec(FamilyTag t) : tag(t) {} // NOLINT(google-explicit-constructor)
    // Throws std::invalid_argument for k < 2 or a residue outside [0, k).
    static FamilySpec gen(std::set<int> residues, int k);

    std::string name() const;
};

// Accepts all, g1, g2, g1p (or g1'), g2p, p1, p2, p1p, p2p; case-insensitive.
std::optional<FamilyTag> parse_family(std::string_view s);
std::string family_name(FamilyTag t);

bool is_member(const FamilySpec &f, const Partition &p);

// True when some member of f could begin with the parts `prefix` (which need
// not be a member itself, e.g. because of a smallest-part condition).
bool admits_prefix(const FamilySpec &f, std::span<const int> prefix);

enum class StatKind { plain, alt, schmidt, refined };

struct StatScheme {
    StatKind kind = StatKind::plain;
    int m = 0; // variable count for refined

    static StatScheme plain() { return {StatKind::plain, 0}; }
    static StatScheme alt() { return {StatKind::alt, 0}; }
    static StatScheme schmidt() { return {StatKind::schmidt, 0}; }
    // Throws std::invalid_argument for m < 1.
    static StatScheme refined(int m);
};

std::optional<StatKind> parse_stat(std::string_view s);

// Names of the refined variables x1..xm.
std::string refined_var(std::size_t i);

// The scheme monomial of p: q^{|p|}, z^{a(p)} q^{|p|}, z^{a(p)} q^{S(p)}, or
// x1^{p_1} ... x_l^{p_l}.  Variables are looked up by name in ctx.
LaurentPoly refined_monomial(const Partition &p, const StatScheme &scheme, ContextPtr ctx);

// Sum of scheme monomials over members of f admitted by ctx.
LaurentPoly brute_series(const FamilySpec &f, StatKind scheme, ContextPtr ctx);

struct LengthFilter {
    enum class Kind { exact, paired, bounded, unbounded };
    Kind kind = Kind::unbounded;
    int n = 0;

    static LengthFilter exact(int l) { return {Kind::exact, l}; }
    // Lengths 2n-1 and 2n.
    static LengthFilter paired(int n) { return {Kind::paired, n}; }
    static LengthFilter bounded(int l) { return {Kind::bounded, l}; }
    static LengthFilter unbounded() { return {Kind::unbounded, 0}; }

    bool accepts(std::size_t length) const;
    // Largest accepted length, or nullopt when unbounded.
    std::optional<int> max_length() const;
};

// Sum of x^p over members of f whose length passes the filter.  The context
// must contain x1..xm; under an unbounded filter m caps the enumerated length,
// which is exact only when the context's degree order is at most m times the
// weight of x1.
LaurentPoly brute_refined(const FamilySpec &f, const LengthFilter &filter, ContextPtr ctx);

} // namespace mpa
