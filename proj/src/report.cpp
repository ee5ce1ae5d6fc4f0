#include "mpa/report.hpp"

#include <chrono>
#include <sstream>

namespace mpa {

Json Report::to_json() const
{
    Json j = Json::object();
    j["check"] = check;
    j["params"] = params;
    j["order"] = order;
    j["status"] = status();
    if (first_mismatch) {
        Json mono = Json::object();
        for (const auto &[v, e] : first_mismatch->monomial) {
            mono[v] = e;
        }
        j["first_mismatch"] = {{"monomial", mono}, {"lhs", first_mismatch->lhs}, {"rhs", first_mismatch->rhs}};
    } else {
        j["first_mismatch"] = nullptr;
    }
    j["elapsed_ms"] = elapsed_ms;
    j["sides"] = sides;
    if (!label.empty()) {
        j["label"] = label;
    }
    if (!notes.empty()) {
        j["notes"] = notes;
    }
    return j;
}

Report Report::from_json(const Json &j)
{
    Report r;
    r.check = j.at("check").get<std::string>();
    r.params = j.at("params");
    r.order = j.at("order").get<std::int64_t>();
    const auto &fm = j.at("first_mismatch");
    if (!fm.is_null()) {
        Mismatch m;
        for (const auto &[v, e] : fm.at("monomial").items()) {
            m.monomial[v] = e.get<std::int64_t>();
        }
        m.lhs = fm.at("lhs").get<std::string>();
        m.rhs = fm.at("rhs").get<std::string>();
        r.first_mismatch = std::move(m);
    }
    r.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
    if (j.contains("sides")) {
        r.sides = j.at("sides").get<std::vector<std::string>>();
    }
    if (j.contains("label")) {
        r.label = j.at("label").get<std::string>();
    }
    if (j.contains("notes")) {
        r.notes = j.at("notes").get<std::vector<std::string>>();
    }
    if (j.at("status").get<std::string>() != r.status()) {
        throw std::invalid_argument("report status disagrees with first_mismatch");
    }
    return r;
}

std::string Report::to_text() const
{
    std::ostringstream os;
    os << status() << "  " << check;
    if (!params.empty()) {
        os << ' ' << params.dump();
    }
    os << "  order=" << order << "  " << elapsed_ms << " ms";
    if (!label.empty()) {
        os << "  [" << label << ']';
    }
    if (!sides.empty()) {
        os << "\n    sides:";
        for (const auto &s : sides) {
            os << ' ' << s;
        }
    }
    if (first_mismatch) {
        os << "\n    first mismatch at ";
        if (first_mismatch->monomial.empty()) {
            os << '1';
        }
        bool first = true;
        for (const auto &[v, e] : first_mismatch->monomial) {
            os << (first ? "" : "*") << v;
            if (e != 1) {
                os << '^' << e;
            }
            first = false;
        }
        os << ": lhs=" << first_mismatch->lhs << " rhs=" << first_mismatch->rhs;
    }
    for (const auto &n : notes) {
        os << "\n    note: " << n;
    }
    return os.str();
}

std::optional<Mismatch> first_difference(const LaurentPoly &a, const LaurentPoly &b)
{
    const auto diff = a - b;
    if (diff.is_zero()) {
        return std::nullopt;
    }
    const auto terms = diff.sorted_terms();
    const auto &e = terms.front().first;
    Mismatch m;
    const auto &vars = a.context().vars();
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] != 0) {
            m.monomial[vars.name(i)] = e[i];
        }
    }
    m.lhs = a.coeff(e).get_str();
    m.rhs = b.coeff(e).get_str();
    return m;
}

void compare_sides(Report &r, const std::vector<std::pair<std::string, const LaurentPoly *>> &sides)
{
    for (const auto &[name, _] : sides) {
        r.sides.push_back(name);
    }
    if (sides.size() < 2) {
        return;
    }
    const auto &[ref_name, ref] = sides.front();
    for (std::size_t i = 1; i < sides.size(); ++i) {
        auto m = first_difference(*ref, *sides[i].second);
        if (!m) {
            continue;
        }
        r.notes.push_back(ref_name + " and " + sides[i].first + " differ");
        if (!r.first_mismatch) {
            r.first_mismatch = std::move(m);
        }
    }
}

Stopwatch::Stopwatch()
    : start_ns_(std::chrono::duration_cast<std::chrono::nanoseconds>(
                    std::chrono::steady_clock::now().time_since_epoch())
                    .count())
{
}

std::int64_t Stopwatch::elapsed_ms() const
{
    const auto now = std::chrono::duration_cast<std::chrono::nanoseconds>(
                         std::chrono::steady_clock::now().time_since_epoch())
                         .count();
    return (now - start_ns_) / 1'000'000;
}

} // namespace mpa
