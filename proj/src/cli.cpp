#include "mpa/cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mpa/identities.hpp"
#include "mpa/omega.hpp"
#include "mpa/partitions.hpp"

namespace mpa {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::int64_t parse_positive(const std::string &key, const std::string &value)
{
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &used);
    } catch (const std::exception &) {
        throw std::invalid_argument(key + " must be an integer, got '" + value + "'");
    }
    if (used != value.size() || v < 1) {
        throw std::invalid_argument(key + " must be a positive integer, got '" + value + "'");
    }
    return v;
}

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::set<int> parse_residues(const std::string &csv)
{
    std::set<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception &) {
            throw UsageError("residue '" + item + "' is not an integer");
        }
        if (used != item.size()) {
            throw UsageError("residue '" + item + "' is not an integer");
        }
        out.insert(v);
    }
    if (out.empty()) {
        throw UsageError("--t needs at least one residue");
    }
    return out;
}

// Writes text to the requested file, or to `out` when no path is given.
void emit(const std::string &text, const std::string &path, const RunConfig &cfg, std::ostream &out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::filesystem::path p(path);
    if (p.is_relative() && !cfg.output_dir.empty()) {
        p = cfg.output_dir / p;
    }
    std::ofstream f(p, std::ios::binary);
    if (!f) {
        throw UsageError("cannot write " + p.string());
    }
    f << text;
    if (!f) {
        throw UsageError("cannot write " + p.string());
    }
}

std::string csv_table(FamilyTag family, StatKind stat, std::int64_t order)
{
    ContextBuilder b;
    b.var("q", 1);
    if (stat != StatKind::plain) {
        b.var("z", 0);
    }
    const auto ctx = b.order(order).build();
    const auto series = brute_series(family, stat, ctx);
    std::ostringstream os;
    if (stat == StatKind::plain) {
        os << "n,coeff\n";
        for (std::int64_t n = 0; n <= order; ++n) {
            os << n << ',' << series.coeff(Exponents{static_cast<Exponent>(n)}).get_str() << '\n';
        }
        return os.str();
    }
    std::map<std::pair<std::int64_t, std::int64_t>, Coeff> rows;
    for (const auto &[e, c] : series.terms()) {
        rows[{e[0], e[1]}] = c;
    }
    os << "n,z,coeff\n";
    for (const auto &[k, c] : rows) {
        os << k.first << ',' << k.second << ',' << c.get_str() << '\n';
    }
    return os.str();
}

} // namespace

RunConfig parse_config(std::istream &in)
{
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const auto key = trim(std::string_view(t).substr(0, eq));
        const auto value = trim(std::string_view(t).substr(eq + 1));
        if (key == "default_order") {
            cfg.default_order = parse_positive(key, value);
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(std::min<std::int64_t>(parse_positive(key, value), 1024));
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path &path)
{
    std::ifstream f(path);
    if (!f) {
        throw std::invalid_argument("cannot read config " + path.string());
    }
    return parse_config(f);
}

std::vector<Report> run_parallel(const std::vector<std::function<Report()>> &jobs, int threads)
{
    std::vector<Report> out(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                out[i] = jobs[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto n = static_cast<std::size_t>(std::max(1, threads));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::min(n, jobs.size()); ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &th : pool) {
        th.join();
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

std::string reports_to_json(const std::vector<Report> &reports)
{
    if (reports.size() == 1) {
        return reports.front().to_json().dump(2) + "\n";
    }
    Json arr = Json::array();
    for (const auto &r : reports) {
        arr.push_back(r.to_json());
    }
    return arr.dump(2) + "\n";
}

std::string reports_to_text(const std::vector<Report> &reports)
{
    std::string s;
    for (const auto &r : reports) {
        s += r.to_text() + "\n";
    }
    return s;
}

int exit_code(const std::vector<Report> &reports)
{
    return std::all_of(reports.begin(), reports.end(), [](const Report &r) { return r.passed(); }) ? exit_pass
                                                                                                   : exit_fail;
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Partition identity checker: q-series, refined and bivariate generating functions"};
    app.name("mpa");
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "json";
    std::string out_path;
    std::string config_path;
    int threads = 0;
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--out", out_path, "Output file (default stdout)");
    app.add_option("--config", config_path, "Config file with default_order, threads, output_dir");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    auto *verify = app.add_subcommand("verify", "Check one identity or all of them");
    std::string id_name;
    std::int64_t order = 0;
    std::int64_t refined_degree = 16;
    int max_index = 4;
    verify->add_option("id", id_name, "Identity id, e.g. lg1, ref-g2p, biv-p2p-schmidt, all")->required();
    verify->add_option("--order", order, "Truncation order");
    verify->add_option("--refined-degree", refined_degree, "Total degree cap for refined checks")
        ->check(CLI::PositiveNumber);
    verify->add_option("--max-index", max_index, "Largest length index for refined checks")
        ->check(CLI::PositiveNumber);

    auto *rules = app.add_subcommand("rules", "Check the elimination rules");
    std::int64_t max_degree = 10;
    rules->add_option("--max-degree", max_degree, "Weighted degree");

    auto *crude = app.add_subcommand("crude", "Check a crude form against brute force");
    std::string family_str;
    std::string mode_str;
    int crude_n = 1;
    std::int64_t degree = 8;
    int cap = 8;
    crude->add_option("--family", family_str, "Partition family")->required();
    crude->add_option("--mode", mode_str, "exact, paired or bounded")->required();
    crude->add_option("--n", crude_n, "Length index")->required();
    crude->add_option("--degree", degree, "Total degree");
    crude->add_option("--cap", cap, "Per-variable cap (0 for none)");

    auto *table = app.add_subcommand("table", "Write a coefficient table as CSV");
    std::string table_family;
    std::string stat_str = "plain";
    std::int64_t table_order = 0;
    table->add_option("--family", table_family, "Partition family")->required();
    table->add_option("--stat", stat_str, "plain, alt or schmidt");
    table->add_option("--order", table_order, "Truncation order");

    auto *conj = app.add_subcommand("conjecture", "Collect evidence for the conjectured product");
    int k = 0;
    std::string residues;
    std::int64_t conj_order = 0;
    int conj_length = 4;
    std::int64_t conj_degree = 12;
    conj->add_option("--k", k, "Modulus")->required();
    conj->add_option("--t", residues, "Comma-separated residues")->required();
    conj->add_option("--order", conj_order, "Specialized q-order");
    conj->add_option("--length", conj_length, "Largest length for the refined check")->check(CLI::PositiveNumber);
    conj->add_option("--refined-degree", conj_degree, "Total degree for the refined check")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_pass : exit_usage;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
        }
        if (threads > 0) {
            cfg.threads = threads;
        }
        auto order_or_default = [&](std::int64_t given) {
            const auto n = given != 0 ? given : cfg.default_order;
            if (n < 1) {
                throw UsageError("order must be at least 1");
            }
            return n;
        };
        auto finish = [&](const std::vector<Report> &reports) {
            emit(format == "json" ? reports_to_json(reports) : reports_to_text(reports), out_path, cfg, out);
            return exit_code(reports);
        };

        if (verify->parsed()) {
            const auto n = order_or_default(order);
            std::vector<IdentityId> ids;
            std::string lower = id_name;
            std::transform(lower.begin(), lower.end(), lower.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (lower == "all") {
                ids = registered_identities();
            } else if (auto id = parse_identity(id_name)) {
                ids.push_back(*id);
            } else {
                throw UsageError("unknown identity '" + id_name + "'");
            }
            const CheckOptions options{refined_degree, max_index};
            std::vector<std::function<Report()>> jobs;
            for (auto id : ids) {
                jobs.emplace_back([id, n, options] { return check_identity(id, n, options); });
            }
            return finish(run_parallel(jobs, cfg.threads));
        }
        if (rules->parsed()) {
            if (max_degree < 1) {
                throw UsageError("--max-degree must be at least 1");
            }
            return finish(all_rules(max_degree));
        }
        if (crude->parsed()) {
            const auto fam = parse_family(family_str);
            if (!fam) {
                throw UsageError("unknown family '" + family_str + "'");
            }
            const auto mode = parse_crude_mode(mode_str);
            if (!mode) {
                throw UsageError("unknown mode '" + mode_str + "'");
            }
            if (!crude_supported(*fam, *mode)) {
                throw UsageError("unsupported crude form: family " + family_name(*fam) + " with mode " + mode_str);
            }
            if (crude_n < 1 || degree < 1 || cap < 0) {
                throw UsageError("--n and --degree must be positive, --cap non-negative");
            }
            const std::optional<Exponent> c = cap == 0 ? std::nullopt : std::optional<Exponent>(cap);
            return finish({verify_crude(*fam, *mode, crude_n, degree, c)});
        }
        if (table->parsed()) {
            const auto fam = parse_family(table_family);
            if (!fam) {
                throw UsageError("unknown family '" + table_family + "'");
            }
            const auto stat = parse_stat(stat_str);
            if (!stat || *stat == StatKind::refined) {
                throw UsageError("--stat must be plain, alt or schmidt");
            }
            emit(csv_table(*fam, *stat, order_or_default(table_order)), out_path, cfg, out);
            return exit_pass;
        }
        if (conj->parsed()) {
            const auto t = parse_residues(residues);
            if (k < 2) {
                throw UsageError("--k must be at least 2");
            }
            for (int r : t) {
                if (r < 0 || r >= k) {
                    throw UsageError("residue " + std::to_string(r) + " outside [0, k)");
                }
            }
            const ConjectureOptions options{conj_length, conj_degree};
            return finish({check_conjecture(t, k, order_or_default(conj_order), options)});
        }
    } catch (const UsageError &e) {
        err << "error: " << e.what() << "\n" << app.help();
        return exit_usage;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

} // namespace mpa
