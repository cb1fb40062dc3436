#include "ndasnr/cli.hpp"

#include "ndasnr/calibrate.hpp"
#include "ndasnr/crlb.hpp"
#include "ndasnr/estimators.hpp"
#include "ndasnr/format.hpp"
#include "ndasnr/harness.hpp"
#include "ndasnr/sample_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace ndasnr::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

double parse_number(std::string_view text) {
    double v = 0.0;
    if (!parse_double(trim(text), v) || !std::isfinite(v)) {
        throw UsageError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

void append_range(std::string_view item, std::vector<double>& out) {
    const auto c1 = item.find(':');
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string_view::npos || item.find(':', c2 + 1) != std::string_view::npos) {
        throw UsageError("range must read start:step:stop, got '" + std::string(item) + "'");
    }
    const double start = parse_number(item.substr(0, c1));
    const double step = parse_number(item.substr(c1 + 1, c2 - c1 - 1));
    const double stop = parse_number(item.substr(c2 + 1));
    if (step == 0.0 || (stop - start) * step < 0.0) {
        throw UsageError("range step must be non-zero and point from start to stop: '" + std::string(item) + "'");
    }
    const double span = (stop - start) / step;
    const auto count = static_cast<long long>(std::floor(span + 1e-9));
    if (count > 1000000) {
        throw UsageError("range '" + std::string(item) + "' expands to too many values");
    }
    for (long long k = 0; k <= count; ++k) {
        out.push_back(start + static_cast<double>(k) * step);
    }
}

void expand_progression(std::vector<double>& out, double last) {
    if (out.size() < 2) {
        throw UsageError("'...' needs two values before it");
    }
    const double a = out[out.size() - 2];
    const double b = out.back();
    const double tol = 1e-9 * std::max(std::abs(last), 1.0);
    if (b == a) {
        throw UsageError("cannot infer a progression from equal values");
    }
    // A third value before the ellipsis settles the kind; with two, arithmetic
    // wins when it lands on the end value exactly, otherwise geometric.
    bool arithmetic_ok = true;
    if (out.size() >= 3) {
        const double c = out[out.size() - 3];
        const bool same_diff = std::abs((b - a) - (a - c)) <= 1e-12 * std::max(std::abs(b), 1.0);
        const bool same_ratio = c != 0.0 && std::abs(b / a - a / c) <= 1e-12;
        if (!same_diff && !same_ratio) {
            throw UsageError("values before '...' are neither arithmetic nor geometric");
        }
        arithmetic_ok = same_diff;
    }
    const double diff = b - a;
    const double steps = (last - b) / diff;
    if (arithmetic_ok && steps >= 0.0 && std::abs(steps - std::round(steps)) < 1e-9) {
        const auto count = static_cast<long long>(std::round(steps));
        for (long long k = 1; k <= count; ++k) {
            out.push_back(b + static_cast<double>(k) * diff);
        }
        return;
    }
    if (a != 0.0 && b / a > 0.0 && b / a != 1.0) {
        const double ratio = b / a;
        double v = b;
        for (int guard = 0; guard < 10000; ++guard) {
            v *= ratio;
            if (std::abs(v - last) <= tol) {
                out.push_back(last);
                return;
            }
            if ((ratio > 1.0 && std::abs(v) > std::abs(last)) || (ratio < 1.0 && std::abs(v) < std::abs(last))) {
                break;
            }
            out.push_back(v);
        }
    }
    throw UsageError("progression does not reach " + format_double(last));
}

std::vector<Method> parse_methods(std::string_view text) {
    std::vector<Method> methods;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(',', start);
        const auto item = trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        const auto m = parse_method(item);
        if (!m) {
            throw UsageError("unknown method '" + std::string(item) + "' (expected cm, ml, mm, p2, am)");
        }
        if (std::find(methods.begin(), methods.end(), *m) != methods.end()) {
            throw UsageError("method '" + std::string(item) + "' listed twice");
        }
        methods.push_back(*m);
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return methods;
}

std::string join_args(std::string_view command, const std::vector<std::string>& args) {
    std::string s(command);
    for (const auto& a : args) {
        s += ' ';
        s += a;
    }
    return s;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    return f;
}

// ---------------------------------------------------------------------------

struct BenchFlags {
    std::string snr_db;
    std::string n = "64";
    std::size_t trials = 100000;
    std::string methods = "cm,ml,mm,p2,am";
    std::uint64_t seed = 1;
    int ml_iters = 10;
    double prior_q = 0.5;
    unsigned workers = 0;
    std::string out;
};

int cmd_bench(const BenchFlags& f, std::ostream& out, std::ostream& err) {
    const auto snrs = parse_value_list(f.snr_db);
    const auto ns = parse_count_list(f.n);
    const auto methods = parse_methods(f.methods);
    if (f.trials == 0) {
        throw UsageError("--trials must be at least 1");
    }
    if (f.ml_iters < 0) {
        throw UsageError("--ml-iters must be non-negative");
    }
    if (!(f.prior_q >= 0.0 && f.prior_q <= 1.0)) {
        throw UsageError("--q must lie in [0, 1]");
    }

    std::vector<CellConfig> cells;
    for (double snr : snrs) {
        for (std::size_t n : ns) {
            CellConfig c;
            c.gamma_db = snr;
            c.n = n;
            c.trials = f.trials;
            c.methods = methods;
            c.master_seed = f.seed;
            c.prior_q = f.prior_q;
            c.ml_iters = f.ml_iters;
            cells.push_back(std::move(c));
        }
    }

    auto file = open_output(f.out);
    const auto report = run_sweep(cells, f.workers);
    // Only settings that change the numbers; --workers and --out are left out
    // so equal experiments give byte-identical files.
    const std::vector<std::string> comments{"config: bench --snr-db " + f.snr_db + " --n " + f.n + " --trials " +
                                            std::to_string(f.trials) + " --methods " + f.methods + " --seed " +
                                            std::to_string(f.seed) + " --ml-iters " + std::to_string(f.ml_iters) +
                                            " --q " + format_double(f.prior_q)};
    write_sweep_csv(file, report, comments);
    file.close();
    if (!file) {
        throw std::runtime_error("write to '" + f.out + "' failed");
    }

    out << std::left << std::setw(8) << "snr_db" << std::setw(7) << "n" << std::setw(7) << "method" << std::setw(14)
        << "nmse" << std::setw(14) << "nb" << std::setw(12) << "clamp_rate" << "ncrlb_nda\n";
    for (const auto& r : to_rows(report)) {
        out << std::left << std::setw(8) << r.snr_db << std::setw(7) << r.n << std::setw(7) << to_string(r.method)
            << std::setw(14) << r.nmse << std::setw(14) << r.nb << std::setw(12) << r.clamp_rate << r.ncrlb_nda
            << '\n';
    }
    for (const auto& fail : report.failures) {
        err << "cell " << fail.cell_index << " (snr_db=" << fail.config.gamma_db << ", n=" << fail.config.n
            << ") failed: " << fail.message << '\n';
    }
    return report.ok() ? kSuccess : kRuntimeFailure;
}

// ---------------------------------------------------------------------------

struct CrlbFlags {
    std::string snr_db;
    std::size_t n = 64;
    std::string mode = "both";
    std::string out;
};

int cmd_crlb(const CrlbFlags& f, const std::vector<std::string>& raw, std::ostream& out) {
    const auto snrs = parse_value_list(f.snr_db);
    if (f.n < 1) {
        throw UsageError("--n must be at least 1");
    }
    std::vector<BoundMode> modes;
    if (f.mode == "nda") {
        modes = {BoundMode::nda};
    } else if (f.mode == "da") {
        modes = {BoundMode::da};
    } else if (f.mode == "both") {
        modes = {BoundMode::nda, BoundMode::da};
    } else {
        throw UsageError("--mode must be nda, da or both");
    }

    std::ofstream file;
    if (!f.out.empty()) {
        file = open_output(f.out);
    }
    std::ostream& dst = f.out.empty() ? out : file;
    dst << "# config: " << join_args("crlb", raw) << '\n';
    dst << "snr_db,gamma,n,mode,ncrlb_mu,ncrlb_sigma,ncrlb_gamma,ncrlb_lambda,ncrlb_ber,ncrlb_mi\n";
    for (double snr : snrs) {
        const double gamma = db_to_linear(snr);
        for (auto mode : modes) {
            const auto b = ncrlb_bundle(gamma, f.n, mode);
            dst << format_double(snr) << ',' << format_double(gamma) << ',' << f.n << ',' << to_string(mode) << ','
                << format_double(b.ncrlb_mu) << ',' << format_double(b.ncrlb_sigma) << ','
                << format_double(b.ncrlb_gamma) << ',' << format_double(b.ncrlb_lambda) << ','
                << format_double(b.ncrlb_ber) << ',' << format_double(b.ncrlb_mi) << '\n';
        }
    }
    if (!dst) {
        throw std::runtime_error("failed writing bound table");
    }
    return kSuccess;
}

// ---------------------------------------------------------------------------

struct EstimateFlags {
    std::string in;
    std::string methods = "cm,ml,mm,p2,am";
    // One block, so iterate to convergence; the early exit usually stops far sooner.
    int ml_iters = 1000;
    std::string symbol_out;
    std::string symbol_method;
};

int cmd_estimate(const EstimateFlags& f, std::ostream& out, std::ostream& err) {
    const auto methods = parse_methods(f.methods);
    if (f.ml_iters < 0) {
        throw UsageError("--ml-iters must be non-negative");
    }
    std::optional<Method> symbol_method;
    if (!f.symbol_out.empty()) {
        symbol_method = f.symbol_method.empty() ? methods.front() : parse_methods(f.symbol_method).front();
    }

    SampleBlock block = [&] {
        try {
            return read_samples(std::filesystem::path(f.in));
        } catch (const SampleFormatError& e) {
            throw UsageError(e.what());
        }
    }();
    const auto mom = sample_moments(block);
    EstimatorOptions opts;
    opts.max_iter = f.ml_iters;

    out << "# n=" << block.n() << " m1=" << format_double(mom.m1) << " m2=" << format_double(mom.m2)
        << " m4=" << format_double(mom.m4) << " A=" << format_double(mom.abs_moment) << '\n';
    out << "method,gamma_hat,gamma_hat_db,mu_hat,sigma_hat,lambda_hat,q_hat,clamped,q_flag,iterations\n";

    int status = kSuccess;
    std::optional<double> symbol_lambda;
    for (Method m : methods) {
        try {
            const auto est = estimate_snr(block.samples(), mom, m, opts);
            const auto d = mom.m2 > 0.0 ? derive_params(est.gamma_hat, mom.m1, mom.m2)
                                         : DerivedParams{0.0, 0.0, 0.0, 0.5, false, true};
            const char* q_flag = d.q_undefined ? "undefined" : (d.q_clamped ? "clamped" : "ok");
            out << to_string(m) << ',' << format_double(est.gamma_hat) << ','
                << format_double(est.gamma_hat > 0.0 ? linear_to_db(est.gamma_hat) : -INFINITY) << ','
                << format_double(d.mu_hat) << ',' << format_double(d.sigma_hat) << ',' << format_double(d.lambda_hat)
                << ',' << format_double(d.q_hat) << ',' << (est.clamped ? 1 : 0) << ',' << q_flag << ','
                << est.iterations_used << '\n';
            if (symbol_method && *symbol_method == m) {
                symbol_lambda = d.lambda_hat;
            }
        } catch (const EstimatorError& e) {
            err << "estimate: " << e.what() << '\n';
            out << to_string(m) << ",error,,,,,,,,\n";
            status = kRuntimeFailure;
        }
    }

    if (symbol_method) {
        if (!symbol_lambda) {
            err << "estimate: no reliability estimate from '" << to_string(*symbol_method)
                << "' for symbol metrics\n";
            return kRuntimeFailure;
        }
        auto file = open_output(f.symbol_out);
        file << "# lambda_hat=" << format_double(*symbol_lambda) << " method=" << to_string(*symbol_method) << '\n';
        file << "index,y,llr,inst_ber,inst_mi\n";
        const auto ys = block.samples();
        for (std::size_t i = 0; i < ys.size(); ++i) {
            const auto s = symbol_metrics(*symbol_lambda, ys[i]);
            file << i << ',' << format_double(ys[i]) << ',' << format_double(s.llr) << ','
                 << format_double(s.inst_ber) << ',' << format_double(s.inst_mi) << '\n';
        }
        if (!file) {
            throw std::runtime_error("failed writing symbol metrics");
        }
    }
    return status;
}

// ---------------------------------------------------------------------------

struct CalibrateFlags {
    double grid_min_db = -20.0;
    double grid_max_db = 20.0;
    std::size_t grid_points = 200;
    int max_evals = 10000;
};

int cmd_calibrate(const CalibrateFlags& f, std::ostream& out) {
    if (f.grid_points < 3) {
        throw UsageError("--grid-points must be at least 3 (three constants are fitted)");
    }
    if (!(f.grid_max_db > f.grid_min_db)) {
        throw UsageError("--grid-max-db must exceed --grid-min-db");
    }
    SimplexOptions opts;
    opts.max_evals = f.max_evals;
    opts.validate(3);
    const auto grid = FitGrid::log_spaced(db_to_linear(f.grid_min_db), db_to_linear(f.grid_max_db), f.grid_points);
    const auto fit = fit_h_constants(grid, opts);
    const auto& p = kPublishedHConstants;
    const auto dev = [](double a, double b) { return 100.0 * (a - b) / std::abs(b); };

    out << std::setprecision(10);
    out << "grid: " << f.grid_points << " points, " << f.grid_min_db << " dB to " << f.grid_max_db << " dB\n";
    out << "H1 = " << fit.constants.h1 << "  (published " << p.h1 << ", " << std::showpos
        << dev(fit.constants.h1, p.h1) << std::noshowpos << "%)\n";
    out << "H2 = " << fit.constants.h2 << "  (published " << p.h2 << ", " << std::showpos
        << dev(fit.constants.h2, p.h2) << std::noshowpos << "%)\n";
    out << "H3 = " << fit.constants.h3 << "  (published " << p.h3 << ", " << std::showpos
        << dev(fit.constants.h3, p.h3) << std::noshowpos << "%)\n";
    out << "mse = " << fit.mse << "  (published constants: " << fit.reference_mse << ")\n";
    out << "evaluations = " << fit.evals << (fit.converged ? "" : "  (budget exhausted)") << '\n';
    return kSuccess;
}

// ---------------------------------------------------------------------------

struct GenerateFlags {
    double snr_db = 0.0;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    double prior_q = 0.5;
    double m2 = 1.0;
    std::string out;
};

int cmd_generate(const GenerateFlags& f) {
    if (f.n < 1) {
        throw UsageError("--n must be at least 1");
    }
    const auto params = [&] {
        try {
            return params_from(DecibelSnr{f.snr_db, f.m2}, f.prior_q);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }();
    write_samples(std::filesystem::path(f.out), generate_block(params, f.n, f.seed));
    return kSuccess;
}

}  // namespace

std::vector<double> parse_value_list(std::string_view text) {
    std::vector<double> out;
    std::vector<std::string_view> items;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(',', start);
        items.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto item = items[i];
        if (item.empty()) {
            throw UsageError("empty entry in list '" + std::string(text) + "'");
        }
        if (item == "...") {
            if (i + 1 >= items.size() || items[i + 1] == "...") {
                throw UsageError("'...' must be followed by an end value");
            }
            expand_progression(out, parse_number(items[i + 1]));
            ++i;
        } else if (item.find(':') != std::string_view::npos) {
            append_range(item, out);
        } else {
            out.push_back(parse_number(item));
        }
    }
    return out;
}

std::vector<std::size_t> parse_count_list(std::string_view text) {
    std::vector<std::size_t> out;
    for (double v : parse_value_list(text)) {
        if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) {
            throw UsageError("expected a positive integer, got " + format_double(v));
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Non-data-aided SNR estimation for BPSK over AWGN"};
    app.require_subcommand(1);

    BenchFlags bench;
    auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo NMSE / NB of the SNR estimators");
    bench_cmd->add_option("--snr-db", bench.snr_db, "SNR list or start:step:stop range in dB")->required();
    bench_cmd->add_option("--n", bench.n, "samples per trial (list)")->capture_default_str();
    bench_cmd->add_option("--trials", bench.trials, "trials per cell")->capture_default_str();
    bench_cmd->add_option("--methods", bench.methods, "comma-separated subset of cm,ml,mm,p2,am")
        ->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed, "master seed")->capture_default_str();
    bench_cmd->add_option("--ml-iters", bench.ml_iters, "ML iterations K")->capture_default_str();
    bench_cmd->add_option("--q", bench.prior_q, "probability of +1 symbols")->capture_default_str();
    bench_cmd->add_option("--workers", bench.workers, "worker threads (0 = all cores)")->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "CSV output path")->required();

    CrlbFlags crlb;
    auto* crlb_cmd = app.add_subcommand("crlb", "Tabulate normalized Cramer-Rao bounds");
    crlb_cmd->add_option("--snr-db", crlb.snr_db, "SNR list or range in dB")->required();
    crlb_cmd->add_option("--n", crlb.n, "sample count")->capture_default_str();
    crlb_cmd->add_option("--mode", crlb.mode, "nda, da or both")->capture_default_str();
    crlb_cmd->add_option("--out", crlb.out, "CSV output path (stdout when omitted)");

    EstimateFlags est;
    auto* est_cmd = app.add_subcommand("estimate", "Estimate channel parameters from a sample file");
    est_cmd->add_option("--in", est.in, "sample file")->required();
    est_cmd->add_option("--methods", est.methods, "comma-separated subset of cm,ml,mm,p2,am")
        ->capture_default_str();
    est_cmd->add_option("--ml-iters", est.ml_iters, "ML iterations K")->capture_default_str();
    est_cmd->add_option("--emit-symbol-metrics", est.symbol_out, "write per-sample LLR / BER / MI CSV here");
    est_cmd->add_option("--symbol-method", est.symbol_method,
                        "method whose lambda feeds the symbol metrics (default: first of --methods)");

    CalibrateFlags cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "Refit the h approximation constants");
    cal_cmd->add_option("--grid-min-db", cal.grid_min_db, "lowest grid SNR in dB")->capture_default_str();
    cal_cmd->add_option("--grid-max-db", cal.grid_max_db, "highest grid SNR in dB")->capture_default_str();
    cal_cmd->add_option("--grid-points", cal.grid_points, "number of log-spaced grid points")->capture_default_str();
    cal_cmd->add_option("--max-evals", cal.max_evals, "objective evaluation budget")->capture_default_str();

    GenerateFlags gen;
    auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic sample file");
    gen_cmd->add_option("--snr-db", gen.snr_db, "SNR in dB")->capture_default_str();
    gen_cmd->add_option("--n", gen.n, "number of samples")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "seed")->capture_default_str();
    gen_cmd->add_option("--q", gen.prior_q, "probability of +1 symbols")->capture_default_str();
    gen_cmd->add_option("--m2", gen.m2, "second moment mu^2 + sigma^2")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "output path")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kValidationError;
    }

    const std::vector<std::string> raw(args.begin() + 1, args.end());
    try {
        if (bench_cmd->parsed()) {
            return cmd_bench(bench, out, err);
        }
        if (crlb_cmd->parsed()) {
            return cmd_crlb(crlb, raw, out);
        }
        if (est_cmd->parsed()) {
            return cmd_estimate(est, out, err);
        }
        if (cal_cmd->parsed()) {
            return cmd_calibrate(cal, out);
        }
        if (gen_cmd->parsed()) {
            return cmd_generate(gen);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kValidationError;
}

}  // namespace ndasnr::cli
