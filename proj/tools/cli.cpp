#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankspectra/criteria.hpp"
#include "rankspectra/csv.hpp"
#include "rankspectra/errors.hpp"
#include "rankspectra/gap_analyzer.hpp"
#include "rankspectra/h_spec.hpp"
#include "rankspectra/matrix_io.hpp"
#include "rankspectra/rmt_core.hpp"
#include "rankspectra/scenario.hpp"
#include "rankspectra/simgen.hpp"

namespace rankspectra::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// Thrown by command bodies to select an exit code.
struct Exit {
    int code;
    std::string message;
};

int classify(const std::exception& e) {
    if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const ConvergenceError*>(&e) ||
        dynamic_cast<const FitError*>(&e)) {
        return kExitNumeric;
    }
    return kExitValidation;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
    } else {
        write_file_atomic(path, text);
    }
}

std::string join_command(const std::vector<std::string>& args) {
    std::string s;
    for (const auto& a : args) {
        if (!s.empty()) {
            s.push_back(' ');
        }
        s += a;
    }
    return s;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string input;
    std::string methods = "all";
    std::optional<int> q;
    std::optional<double> sigma2;
    std::string divisor = "n-1";
    bool uncentered = false;
    bool from_eigenvalues = false;
    bool json_out = false;
    bool csv_out = false;
    std::string out_path;
    std::uint64_t bema_seed = 1;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
    const auto methods = parse_methods(a.methods);
    if (a.divisor != "n-1" && a.divisor != "n") {
        throw ConfigError("--cov-divisor must be 'n-1' or 'n'");
    }
    std::optional<EstimationInput> input;
    if (a.from_eigenvalues) {
        input.emplace(EstimationInput{read_eigenvalues(a.input), std::nullopt, std::nullopt});
    } else {
        const auto X = read_matrix(a.input);
        const Divisor d = a.divisor == "n" ? Divisor::n : Divisor::n_minus_1;
        input.emplace(EstimationInput{cov_eigenvalues(X, !a.uncentered, d), std::nullopt,
                                      cov_diagonal(X, !a.uncentered, d)});
        try {
            input->correlation = corr_eigenvalues(X);
        } catch (const DegenerateColumnError&) {
        }
    }
    EstimatorConfig cfg;
    cfg.q = a.q;
    cfg.noise_variance = a.sigma2;
    cfg.bema_seed = a.bema_seed;
    const auto res = estimate_all(*input, cfg, methods);
    if (res.estimates.empty() && !res.errors.empty()) {
        std::string msg;
        for (const auto& [m, e] : res.errors) {
            msg += std::string(method_name(m)) + ": " + e + "\n";
        }
        throw Exit{kExitValidation, msg};
    }
    std::string text;
    if (a.csv_out) {
        text = csv_row({"method", "r_hat", "q", "curve", "error"});
        for (Method m : methods) {
            if (auto it = res.estimates.find(m); it != res.estimates.end()) {
                std::string curve;
                for (const auto& pt : it->second.curve) {
                    if (!curve.empty()) {
                        curve.push_back(';');
                    }
                    curve += std::to_string(pt.r) + ":" + format_double(pt.value);
                }
                text += csv_row({std::string(method_name(m)), std::to_string(it->second.r_hat),
                                 std::to_string(it->second.q), curve, ""});
            } else {
                text += csv_row({std::string(method_name(m)), "", "", "", res.errors.at(m)});
            }
        }
    } else {
        json doc;
        doc["n"] = input->covariance.n();
        doc["p"] = input->covariance.p();
        doc["estimates"] = json::array();
        for (Method m : methods) {
            if (auto it = res.estimates.find(m); it != res.estimates.end()) {
                doc["estimates"].push_back(to_json(it->second));
            }
        }
        doc["errors"] = json::object();
        for (const auto& [m, e] : res.errors) {
            doc["errors"][std::string(method_name(m))] = e;
        }
        text = doc.dump(2) + "\n";
    }
    emit(text, a.out_path, out);
    return kExitOk;
}

// ---------------------------------------------------------------------- mp

struct MpArgs {
    double c = 0.0;
    std::string H;
    std::string query = "edges";
    std::string value;
};

int cmd_mp(const MpArgs& a, std::ostream& out) {
    const auto H = parse_h_spec(a.H);
    const MPModel model(a.c, H.distribution());
    json doc;
    doc["c"] = a.c;
    doc["H"] = H.to_string();
    doc["mu_H"] = mean_h(model.H());
    auto need_value = [&]() {
        if (a.value.empty()) {
            throw ConfigError("query '" + a.query + "' needs a value");
        }
        try {
            return std::stod(a.value);
        } catch (const std::exception&) {
            throw ConfigError("bad numeric value '" + a.value + "'");
        }
    };
    if (a.query == "edges") {
        const auto up = upper_edge(model);
        const auto lo = lower_edge(model);
        doc["b"] = up.edge;
        doc["lambda_b"] = up.lambda_star;
        doc["upper_stationary"] = up.stationary;
        doc["a"] = lo.edge;
        doc["a_bulk"] = lo.bulk_edge;
        doc["lambda_a"] = lo.lambda_star;
        doc["lower_stationary"] = lo.stationary;
        doc["mass_at_zero"] = lo.mass_at_zero;
    } else if (a.query == "psi") {
        const double lam = need_value();
        doc["lambda"] = lam;
        doc["psi"] = psi(model, lam);
        doc["psi_prime"] = psi_prime(model, lam);
    } else if (a.query == "kappa") {
        const double u = need_value();
        doc["u"] = u;
        doc["kappa"] = kappa(model, u);
    } else if (a.query == "density") {
        // grid "from:to:points"
        double from = 0.0;
        double to = 0.0;
        int points = 0;
        char c1 = 0;
        char c2 = 0;
        std::istringstream is(a.value);
        if (!(is >> from >> c1 >> to >> c2 >> points) || c1 != ':' || c2 != ':' || points < 2 || !(to > from) ||
            !(from > 0.0)) {
            throw ConfigError("density grid must be 'from:to:points' with 0 < from < to, points >= 2");
        }
        doc["density"] = json::array();
        for (int i = 0; i < points; ++i) {
            const double x = from + (to - from) * i / (points - 1);
            doc["density"].push_back({{"x", x}, {"f", mp_density(model, x)}});
        }
    } else {
        throw ConfigError("unknown mp query '" + a.query + "' (edges, psi, kappa, density)");
    }
    out << doc.dump(2) << "\n";
    return kExitOk;
}

// --------------------------------------------------------------------- gap

struct GapArgs {
    std::string setting_file;
    std::optional<double> c;
    std::string H;
    std::optional<std::size_t> n;
    std::optional<std::size_t> p;
    std::optional<double> lambda;
    std::string methods = "AIC,BIC,GIC,PC1,PC2,PC3,IC1,IC2,IC3";
    std::string out_path;
    std::string curves_path;
    std::optional<double> lambda_max;
};

int cmd_gap(const GapArgs& a, std::ostream& out, std::ostream& err) {
    const auto methods = parse_methods(a.methods);
    std::vector<GapSetting> settings;
    if (!a.setting_file.empty()) {
        settings = load_gap_settings(a.setting_file);
    } else {
        if (a.H.empty() || !a.n || !a.p || !a.lambda) {
            throw ConfigError("gap needs --setting FILE or all of --H --n --p --lambda");
        }
        if (*a.n < 1 || *a.p < 1) {
            throw ConfigError("--n and --p must be positive");
        }
        if (a.c && std::abs(*a.c - static_cast<double>(*a.p) / static_cast<double>(*a.n)) > 1e-9) {
            throw ConfigError("--c disagrees with --p / --n");
        }
        settings.push_back({"cli", *a.n, *a.p, parse_h_spec(a.H), *a.lambda});
    }
    const auto rows = gap_table(settings, methods);
    for (const auto& r : rows) {
        if (r.error) {
            err << "setting '" << r.setting.id << "': " << *r.error << "\n";
        }
    }
    std::string curves;
    if (!a.curves_path.empty()) {
        CurveBundle all;
        for (const auto& s : settings) {
            const MPModel model(static_cast<double>(s.p) / static_cast<double>(s.n), s.H.distribution());
            const double lmax = a.lambda_max.value_or(std::max(2.0 * s.lambda_r0, 2.0 * model.H().support_upper()));
            const auto grid = default_lambda_grid(model, lmax);
            auto bundle = gap_curves(model, grid, s.n, s.p, methods);
            for (auto& smp : bundle.samples) {
                if (settings.size() > 1) {
                    smp.series = s.id + ":" + smp.series;
                }
                all.samples.push_back(std::move(smp));
            }
        }
        curves = gap_curves_csv(all);
    }
    emit(gap_table_csv(rows, methods), a.out_path, out);
    if (!a.curves_path.empty()) {
        write_file_atomic(a.curves_path, curves);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string config;
    std::optional<int> T;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::string serial_reference;  // hidden: "1" runs the serial path
};

int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& argv, std::ostream& err) {
    auto doc = json::parse(read_file(a.config), nullptr, false);
    if (doc.is_discarded()) {
        throw ConfigError(a.config + ": invalid JSON");
    }
    if (a.T) {
        if (*a.T < 1) {
            throw ConfigError("--T must be >= 1");
        }
        doc["T"] = *a.T;
        for (auto& s : doc["settings"]) {
            s.erase("T");
        }
    }
    if (a.seed) {
        doc["master_seed"] = *a.seed;
    }
    const auto study = parse_study(doc);

    int threads = 0;
    if (a.threads) {
        threads = *a.threads;
    } else if (const char* env = std::getenv("RANKSPECTRA_THREADS")) {
        try {
            threads = std::stoi(env);
        } catch (const std::exception&) {
            throw ConfigError("RANKSPECTRA_THREADS must be an integer");
        }
    }
    if (threads < 0) {
        throw ConfigError("thread count must be >= 1");
    }
    if (threads > 0) {
        omp_set_num_threads(threads);
    }
    const fs::path dir(a.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory " + dir.string());
    }

    const auto start = std::chrono::steady_clock::now();
    std::vector<AccuracyTable> tables;
    json timings = json::object();
    std::vector<std::string> aborted;
    for (const auto& s : study.settings) {
        try {
            auto t = a.serial_reference == "1" ? run_study_serial(s, study.methods) : run_study(s, study.methods);
            timings[s.id] = t.seconds;
            tables.push_back(std::move(t));
        } catch (const std::exception& e) {
            err << "setting '" << s.id << "' aborted: " << e.what() << "\n";
            aborted.push_back(s.id);
        }
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto csv_path = dir / "accuracy.csv";
    write_file_atomic(csv_path, accuracy_csv(tables));
    json manifest;
    manifest["command_line"] = join_command(argv);
    manifest["config_digest"] = config_digest(doc);
    manifest["master_seed"] = study.master_seed;
    manifest["tool_version"] = kVersion;
    manifest["generator"] = kRngName;
    manifest["threads"] = threads > 0 ? threads : omp_get_max_threads();
    manifest["timings"] = {{"settings", timings}, {"total_seconds", total}};
    manifest["outputs"] = {csv_path.string()};
    manifest["aborted"] = aborted;
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    return aborted.empty() ? kExitOk : kExitStudyAbort;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rank estimation for high-dimensional covariance matrices", "rankspectra"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    EstimateArgs ea;
    auto* est = app.add_subcommand("estimate", "Estimate the rank from a data or eigenvalue file");
    est->add_option("input", ea.input, "CSV or .bin data matrix, or eigenvalue file")->required();
    est->add_option("--methods", ea.methods, "Comma-separated methods or 'all'");
    est->add_option("--q", ea.q, "Search upper bound (default floor(2 sqrt(min(n,p))))");
    est->add_option("--sigma2", ea.sigma2, "Noise variance for PC1-PC3 (default: tail mean at q)");
    est->add_option("--cov-divisor", ea.divisor, "n-1 or n");
    est->add_flag("--uncentered", ea.uncentered, "Do not center columns");
    est->add_flag("--from-eigenvalues", ea.from_eigenvalues, "Input is an eigenvalue file");
    auto* fj = est->add_flag("--json", ea.json_out, "JSON report (default)");
    auto* fc = est->add_flag("--csv", ea.csv_out, "CSV report");
    fj->excludes(fc);
    est->add_option("--out", ea.out_path, "Write the report here instead of stdout");
    est->add_option("--bema-seed", ea.bema_seed, "Seed for BEMA's Monte Carlo");

    MpArgs ma;
    auto* mp = app.add_subcommand("mp", "Marchenko-Pastur quantities for (c, H)");
    mp->add_option("--c", ma.c, "Aspect ratio p/n")->required();
    mp->add_option("--H", ma.H, "Population law, e.g. beta(3,3) or H2")->required();
    mp->add_option("query", ma.query, "edges | psi | kappa | density");
    mp->add_option("value", ma.value, "lambda (psi), u (kappa) or from:to:points (density)");

    GapArgs ga;
    auto* gap = app.add_subcommand("gap", "Evaluate the gap conditions");
    gap->add_option("--setting", ga.setting_file, "JSON settings file");
    gap->add_option("--c", ga.c, "Aspect ratio (checked against p/n)");
    gap->add_option("--H", ga.H, "Population law");
    gap->add_option("--n", ga.n, "Sample size");
    gap->add_option("--p", ga.p, "Dimension");
    gap->add_option("--lambda", ga.lambda, "lambda_r0");
    gap->add_option("--methods", ga.methods, "Information criteria to check");
    gap->add_option("--out", ga.out_path, "Gap table CSV (default stdout)");
    gap->add_option("--curves", ga.curves_path, "Long-format curve CSV");
    gap->add_option("--lambda-max", ga.lambda_max, "Upper end of the curve grid");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Run a simulation study");
    sim->add_option("--config", sa.config, "Study JSON")->required();
    sim->add_option("--T", sa.T, "Override replications per setting");
    sim->add_option("--threads", sa.threads, "Worker threads (fallback: RANKSPECTRA_THREADS)");
    sim->add_option("--seed", sa.seed, "Override master seed");
    sim->add_option("--out", sa.out_dir, "Output directory");
    sim->add_option("--serial-reference", sa.serial_reference)->group("");

    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (*est) {
            return cmd_estimate(ea, out);
        }
        if (*mp) {
            return cmd_mp(ma, out);
        }
        if (*gap) {
            return cmd_gap(ga, out, err);
        }
        if (*sim) {
            return cmd_simulate(sa, args, err);
        }
    } catch (const Exit& e) {
        err << "error: " << e.message;
        return e.code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return classify(e);
    }
    return kExitValidation;
}

}  // namespace rankspectra::cli
