#pragma once

// Machine-readable verdicts of identity, rule and crude-form checks.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpa/series.hpp"

namespace mpa {

using Json = nlohmann::ordered_json;

struct Mismatch {
    std::map<std::string, std::int64_t> monomial; // variable -> exponent, zero exponents omitted
    std::string lhs;
    std::string rhs;
};

struct Report {
    std::string check;
    Json params = Json::object();
    std::int64_t order = 0;
    std::optional<Mismatch> first_mismatch;
    std::vector<std::string> sides;
    std::string label;
    std::vector<std::string> notes;
    std::int64_t elapsed_ms = 0;

    bool passed() const noexcept { return !first_mismatch; }
    std::string status() const { return passed() ? "pass" : "fail"; }

    Json to_json() const;
    static Report from_json(const Json &j);
    std::string to_text() const;
};

// The first monomial (by weighted degree, then exponent vector) where a and
// b differ, or nullopt when they agree.  Both must share a context.
std::optional<Mismatch> first_difference(const LaurentPoly &a, const LaurentPoly &b);

// Compares each side against the first one.  The reported mismatch is the
// first difference with the lowest-indexed disagreeing side; a note names it.
void compare_sides(Report &r, const std::vector<std::pair<std::string, const LaurentPoly *>> &sides);

// Wall-clock helper for filling elapsed_ms.
class Stopwatch {
public:
    Stopwatch();
    std::int64_t elapsed_ms() const;

private:
    std::int64_t start_ns_;
};

} // namespace mpa
