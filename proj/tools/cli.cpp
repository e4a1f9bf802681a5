#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "frolov/error.hpp"
#include "frolov/frolov_matrix.hpp"
#include "frolov/integrands.hpp"
#include "frolov/randomized.hpp"
#include "frolov/study.hpp"
#include "frolov/transform.hpp"

namespace frolov::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 20170101;

struct RunConfig {
    std::string command;
    int d = 2;
    std::string construction = "general";
    std::string method = "frolov_rand_transformed";
    std::string integrand = "product_sine";
    double a = 0.0;
    std::int64_t budget = 0;
    std::vector<std::int64_t> budgets;
    int replications = 100;
    std::uint64_t seed = kDefaultSeed;
    std::string output;
    std::string format;
    bool deterministic = false;
    int workers = 0;  // 0: command default
    int radius = 30;
    int trials = 200;
    double tol = 1e-9;
};

struct Document {
    std::string text;
    std::string extension;
};

std::string fixed12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f", x);
    return buf;
}

void write_atomically(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        file << text;
        file.flush();
        if (!file) throw std::runtime_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

FrolovMatrix matrix_for(const RunConfig& cfg) {
    return build_frolov_matrix(construction_from_string(cfg.construction), cfg.d);
}

std::string seed_text(const RunConfig& cfg) { return "seed=" + std::to_string(cfg.seed); }

Document matrix_command(const RunConfig& cfg, std::string& summary) {
    const auto b = matrix_for(cfg);
    std::ostringstream line;
    line << "matrix d=" << b.dim << " construction=" << to_string(b.construction) << " entries=[";
    for (int i = 0; i < b.dim; ++i) {
        line << (i ? ",[" : "[");
        for (int j = 0; j < b.dim; ++j) line << (j ? ", " : "") << fixed12(b.entries(i, j));
        line << ']';
    }
    line << "] |det|=" << fixed12(b.abs_det) << " norm1=" << fixed12(b.one_norm);
    summary = line.str();

    if (cfg.format == "csv") {
        std::ostringstream csv;
        csv.precision(17);
        csv << "row";
        for (int j = 1; j <= b.dim; ++j) csv << ",b_" << j;
        csv << ",root\n";
        for (int i = 0; i < b.dim; ++i) {
            csv << i + 1;
            for (int j = 0; j < b.dim; ++j) csv << ',' << b.entries(i, j);
            csv << ',' << b.roots[i] << '\n';
        }
        return {csv.str(), "csv"};
    }
    return {to_json(b).dump(2) + "\n", "json"};
}

Document verify_command(const RunConfig& cfg, std::string& summary) {
    const auto b = matrix_for(cfg);
    const auto pb = verify_property_b(b.entries, cfg.radius, cfg.tol);
    const auto pc = verify_property_c(b.entries, cfg.trials, cfg.seed);
    std::ostringstream line;
    line.precision(12);
    line << "verify d=" << b.dim << " construction=" << to_string(b.construction)
         << " property_b=" << (pb.passed ? "pass" : "FAIL") << " min_abs_product=" << pb.min_abs_product
         << " property_c=" << (pc.passed ? "pass" : "FAIL") << " max_count_excess=" << pc.max_count_excess
         << ' ' << seed_text(cfg);
    summary = line.str();
    if (cfg.format == "csv") {
        std::ostringstream csv;
        csv.precision(17);
        csv << "check,d,construction,radius,box_trials,value,passed,seed\n";
        csv << "property_b," << b.dim << ',' << to_string(b.construction) << ',' << pb.radius << ",0,"
            << pb.min_abs_product << ',' << pb.passed << ',' << cfg.seed << '\n';
        csv << "property_c," << b.dim << ',' << to_string(b.construction) << ",0," << pc.box_trials << ','
            << pc.max_count_excess << ',' << pc.passed << ',' << cfg.seed << '\n';
        return {csv.str(), "csv"};
    }
    nlohmann::json j{{"matrix", to_json(b)},
                     {"property_b", to_json(pb)},
                     {"property_c", to_json(pc)},
                     {"tol", cfg.tol},
                     {"seed", cfg.seed}};
    return {j.dump(2) + "\n", "json"};
}

Document estimate_command(const RunConfig& cfg, std::string& summary) {
    const Method method = method_from_string(cfg.method);
    const auto f = corpus_integrand(cfg.integrand, cfg.d);
    if ((cfg.a > 0.0) == (cfg.budget > 0)) throw DomainError("estimate: give exactly one of --a or --budget");
    if (cfg.deterministic && method == Method::mc) {
        throw DomainError("estimate: --deterministic does not apply to mc");
    }
    const auto b = matrix_for(cfg);
    const double a = cfg.a > 0.0 ? cfg.a : (method == Method::mc ? 0.0 : choose_a_for_budget(cfg.budget, b));
    if (method == Method::mc && cfg.budget <= 0) throw DomainError("estimate: mc needs --budget");

    const bool pinned = cfg.deterministic || method == Method::frolov_det;
    const SingleDrawEstimator estimator = [&](std::uint64_t seed, std::uint64_t k) -> Estimate {
        const RandomDraw r = pinned ? deterministic_draw(cfg.d) : draw(seed, k, cfg.d);
        switch (method) {
            case Method::frolov_det:
            case Method::frolov_rand: return m_estimate(a, b, f, r);
            case Method::frolov_rand_transformed: return transformed_estimate(a, b, f, r);
            case Method::mc: return {mc_baseline(f, cfg.budget, seed, k), cfg.budget};
        }
        throw DomainError("unhandled method");
    };

    EstimateBatch batch;
    if (pinned) {
        const Estimate e = estimator(cfg.seed, 0);
        batch.estimates = {e.value};
        batch.node_counts = {e.node_count};
        batch.mean = e.value;
        batch.method = cfg.method;
    } else {
        if (cfg.replications < 2) throw DomainError("estimate: --K must be at least 2 for randomized methods");
        batch = replicate(estimator, cfg.replications, cfg.seed, cfg.method,
                          cfg.workers > 0 ? cfg.workers : 1);
    }
    batch.a = a;
    batch.dim = cfg.d;

    std::int64_t max_nodes = 0;
    for (auto c : batch.node_counts) max_nodes = std::max(max_nodes, c);
    std::ostringstream line;
    line.precision(15);
    line << "estimate method=" << cfg.method << " integrand=" << f.name << " d=" << cfg.d << " a=" << a
         << " K=" << batch.estimates.size() << " mean=" << batch.mean << " stderr=" << batch.stderr_of_mean
         << " exact=" << f.exact_integral << " max_nodes=" << max_nodes << ' ' << seed_text(cfg);
    summary = line.str();

    if (cfg.format == "csv") {
        std::ostringstream csv;
        csv.precision(17);
        csv << "method,integrand,d,a,K,mean,stderr,exact_integral,max_nodes,seed\n";
        csv << cfg.method << ',' << f.name << ',' << cfg.d << ',' << a << ',' << batch.estimates.size() << ','
            << batch.mean << ',' << batch.stderr_of_mean << ',' << f.exact_integral << ',' << max_nodes << ','
            << cfg.seed << '\n';
        return {csv.str(), "csv"};
    }
    nlohmann::json j = to_json(batch);
    j["integrand"] = f.name;
    j["exact_integral"] = f.exact_integral;
    j["construction"] = to_string(b.construction);
    j["deterministic"] = pinned;
    j["seed"] = cfg.seed;
    if (cfg.budget > 0) j["budget"] = cfg.budget;
    return {j.dump(2) + "\n", "json"};
}

Document study_command(const RunConfig& cfg, std::string& summary) {
    if (cfg.budgets.empty()) throw DomainError("study: --budgets must list at least one budget");
    const Method method = method_from_string(cfg.method);
    const auto f = corpus_integrand(cfg.integrand, cfg.d);
    const auto b = matrix_for(cfg);
    StudyConfig sc;
    sc.method = method;
    sc.budgets = cfg.budgets;
    sc.replications = cfg.replications;
    sc.seed = cfg.seed;
    sc.pin_draw = cfg.deterministic;
    sc.workers = cfg.workers > 0 ? cfg.workers
                                 : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const auto report = run_convergence(sc, f, b);

    std::ostringstream line;
    line.precision(6);
    line << "study method=" << cfg.method << " integrand=" << f.name << " d=" << cfg.d
         << " budgets=" << report.rows.size() << " K=" << report.replications << " final_error="
         << report.rows.back().mean_abs_error << " nodes_mean=" << report.rows.back().nodes_mean;
    if (report.slope_available) line << " slope=" << report.fit.slope;
    line << ' ' << seed_text(cfg);
    summary = line.str();

    if (cfg.format == "json") return {to_json(report).dump(2) + "\n", "json"};
    std::ostringstream csv;
    write_csv(report, csv);
    return {csv.str(), "csv"};
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message, int status) {
    err << nlohmann::json{{"error", kind}, {"message", message}, {"status", status}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Randomized Frolov cubature: matrices, estimates and convergence studies"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--d", cfg.d, "Dimension")->check(CLI::PositiveNumber);
        sub->add_option("--construction", cfg.construction, "general or chebyshev")
            ->check(CLI::IsMember({"general", "general_poly", "chebyshev"}));
        sub->add_option("--seed", cfg.seed, "Random seed (default " + std::to_string(kDefaultSeed) + ")");
        sub->add_option("-o,--output", cfg.output, "Output file (written atomically)");
        sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--workers", cfg.workers, "Worker threads (results do not depend on it)")
            ->check(CLI::NonNegativeNumber);
    };

    auto* matrix = app.add_subcommand("matrix", "Build a Frolov matrix");
    add_common(matrix);

    auto* verify = app.add_subcommand("verify", "Check lattice properties (b) and (c)");
    add_common(verify);
    verify->add_option("--radius", cfg.radius, "Search radius for property (b)")->check(CLI::PositiveNumber);
    verify->add_option("--trials", cfg.trials, "Random boxes for property (c)")->check(CLI::PositiveNumber);
    verify->add_option("--tol", cfg.tol, "Tolerance for property (b)");

    auto add_estimator = [&](CLI::App* sub) {
        sub->add_option("--method", cfg.method, "frolov_det, frolov_rand, frolov_rand_transformed or mc");
        sub->add_option("--integrand", cfg.integrand, "Corpus integrand name");
        sub->add_option("--K", cfg.replications, "Replications")->check(CLI::PositiveNumber);
        sub->add_flag("--deterministic", cfg.deterministic, "Pin u = 1, v = 0");
    };

    auto* estimate = app.add_subcommand("estimate", "Replicated estimate of one integral");
    add_common(estimate);
    add_estimator(estimate);
    estimate->add_option("--a", cfg.a, "Dilation a")->check(CLI::PositiveNumber);
    estimate->add_option("--budget", cfg.budget, "Function-value budget n")->check(CLI::PositiveNumber);

    auto* study = app.add_subcommand("study", "Convergence study over a budget grid");
    add_common(study);
    add_estimator(study);
    study->add_option("--budgets", cfg.budgets, "Comma-separated budgets")->delimiter(',');

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        emit_error(err, "usage", e.what(), kExitUsage);
        return kExitUsage;
    }

    try {
        std::string summary;
        Document doc;
        if (matrix->parsed()) {
            if (cfg.format.empty()) cfg.format = "json";
            doc = matrix_command(cfg, summary);
        } else if (verify->parsed()) {
            if (cfg.format.empty()) cfg.format = "json";
            doc = verify_command(cfg, summary);
        } else if (estimate->parsed()) {
            if (cfg.format.empty()) cfg.format = "json";
            doc = estimate_command(cfg, summary);
        } else {
            if (cfg.format.empty()) cfg.format = "csv";
            doc = study_command(cfg, summary);
        }

        std::string target = cfg.output;
        if (target.empty()) {
            if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
                const std::string name = app.get_subcommands().front()->get_name();
                target = (fs::path(dir) / (name + "." + doc.extension)).string();
            }
        }
        if (target.empty()) {
            out << doc.text;
            err << summary << '\n';
        } else {
            write_atomically(target, doc.text);
            out << summary << " output=" << target << '\n';
        }
        return kExitOk;
    } catch (const DomainError& e) {
        emit_error(err, "usage", e.what(), kExitUsage);
        return kExitUsage;
    } catch (const std::exception& e) {
        emit_error(err, "numerical", e.what(), kExitNumerical);
        return kExitNumerical;
    }
}

}  // namespace frolov::cli
