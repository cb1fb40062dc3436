#include "ndasnr/harness.hpp"

#include "ndasnr/crlb.hpp"
#include "ndasnr/format.hpp"
#include "ndasnr/rng.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace ndasnr {

namespace {

struct TrialFailure {
    std::size_t trial = std::numeric_limits<std::size_t>::max();
    std::string message;
};

unsigned resolve_workers(unsigned workers, std::size_t trials) {
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    return static_cast<unsigned>(std::min<std::size_t>(workers, trials));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_unsigned(std::string_view s, std::size_t line_no) {
    T value{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("sweep csv line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
    }
    return value;
}

double parse_real(std::string_view s, std::size_t line_no) {
    double v = 0.0;
    if (!parse_double(s, v)) {
        throw std::runtime_error("sweep csv line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

void CellConfig::validate() const {
    if (trials == 0) {
        throw std::invalid_argument("cell needs at least one trial");
    }
    if (n == 0) {
        throw std::invalid_argument("cell needs at least one sample per trial");
    }
    if (methods.empty()) {
        throw std::invalid_argument("cell has an empty method set");
    }
    for (std::size_t i = 0; i < methods.size(); ++i) {
        for (std::size_t j = i + 1; j < methods.size(); ++j) {
            if (methods[i] == methods[j]) {
                throw std::invalid_argument("cell lists method '" + std::string(to_string(methods[i])) + "' twice");
            }
        }
    }
    if (ml_iters < 0) {
        throw std::invalid_argument("ml_iters must be non-negative");
    }
    if (!(prior_q >= 0.0 && prior_q <= 1.0)) {
        throw std::invalid_argument("prior_q must lie in [0, 1]");
    }
    if (!std::isfinite(gamma_db)) {
        throw std::invalid_argument("gamma_db must be finite");
    }
}

ErrorMetrics metrics(std::span<const double> estimates, double gamma_true) {
    if (!(gamma_true > 0.0)) {
        throw std::invalid_argument("metrics: gamma_true must be positive");
    }
    if (estimates.empty()) {
        throw std::invalid_argument("metrics: no estimates");
    }
    CompensatedSum sq, lin;
    for (double g : estimates) {
        const double e = (g - gamma_true) / gamma_true;
        sq.add(e * e);
        lin.add(e);
    }
    const double inv_l = 1.0 / static_cast<double>(estimates.size());
    return {sq.value() * inv_l, lin.value() * inv_l};
}

std::uint64_t trial_seed(std::uint64_t master_seed, double gamma_db, std::size_t n, std::uint64_t trial) noexcept {
    std::uint64_t s = combine_seed(master_seed, std::bit_cast<std::uint64_t>(gamma_db));
    s = combine_seed(s, static_cast<std::uint64_t>(n));
    return combine_seed(s, trial);
}

CellResult run_cell(const CellConfig& config, unsigned workers) {
    config.validate();
    const auto params = params_from(DecibelSnr{config.gamma_db, config.m2_scale}, config.prior_q);
    const double gamma = params.gamma();
    const std::size_t trials = config.trials;
    const std::size_t n_methods = config.methods.size();

    EstimatorOptions opts;
    opts.max_iter = config.ml_iters;

    // estimates[m * trials + j]
    std::vector<double> estimates(n_methods * trials);
    std::vector<unsigned char> clamped(n_methods * trials);

    std::mutex failure_mutex;
    TrialFailure failure;

    const auto run_range = [&](std::size_t begin, std::size_t end) {
        std::vector<double> y(config.n);
        for (std::size_t j = begin; j < end; ++j) {
            try {
                generate_samples(params, trial_seed(config.master_seed, config.gamma_db, config.n, j), y);
                const auto mom = sample_moments(y);
                for (std::size_t m = 0; m < n_methods; ++m) {
                    const auto est = estimate_snr(y, mom, config.methods[m], opts);
                    estimates[m * trials + j] = est.gamma_hat;
                    clamped[m * trials + j] = est.clamped ? 1 : 0;
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_mutex);
                if (j < failure.trial) {
                    failure = {j, e.what()};
                }
                return;
            }
        }
    };

    const unsigned nw = resolve_workers(workers, trials);
    if (nw <= 1) {
        run_range(0, trials);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(nw);
        for (unsigned w = 0; w < nw; ++w) {
            const std::size_t begin = trials * w / nw;
            const std::size_t end = trials * (w + 1) / nw;
            pool.emplace_back(run_range, begin, end);
        }
    }
    if (failure.trial != std::numeric_limits<std::size_t>::max()) {
        throw CellError(failure.trial, failure.message);
    }

    CellResult result;
    result.config = config;
    result.methods.reserve(n_methods);
    for (std::size_t m = 0; m < n_methods; ++m) {
        const std::span<const double> est(estimates.data() + m * trials, trials);
        const auto em = metrics(est, gamma);
        CompensatedSum mean;
        std::size_t clamp_count = 0;
        for (std::size_t j = 0; j < trials; ++j) {
            mean.add(est[j]);
            clamp_count += clamped[m * trials + j];
        }
        const double inv_l = 1.0 / static_cast<double>(trials);
        result.methods.push_back(
            {config.methods[m], em.nmse, em.nb, mean.value() * inv_l, static_cast<double>(clamp_count) * inv_l});
    }
    result.ncrlb_nda = ncrlb_bundle(gamma, config.n, BoundMode::nda).ncrlb_gamma;
    result.ncrlb_da = ncrlb_bundle(gamma, config.n, BoundMode::da).ncrlb_gamma;
    return result;
}

SweepReport run_sweep(std::span<const CellConfig> configs, unsigned workers) {
    if (configs.empty()) {
        throw std::invalid_argument("run_sweep: no cells");
    }
    SweepReport report;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        try {
            report.cells.push_back(run_cell(configs[i], workers));
        } catch (const std::exception& e) {
            report.failures.push_back({i, configs[i], e.what()});
        }
    }
    return report;
}

std::vector<SweepRow> to_rows(const SweepReport& report) {
    std::vector<SweepRow> rows;
    for (const auto& cell : report.cells) {
        for (const auto& m : cell.methods) {
            rows.push_back({cell.config.gamma_db, cell.config.n, cell.config.trials, m.method, m.nmse, m.nb,
                            m.mean_gamma_hat, m.clamp_rate, cell.ncrlb_nda, cell.ncrlb_da});
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report, std::span<const std::string> comments) {
    for (const auto& c : comments) {
        out << "# " << c << '\n';
    }
    out << kSweepCsvHeader << '\n';
    for (const auto& r : to_rows(report)) {
        out << format_double(r.snr_db) << ',' << r.n << ',' << r.trials << ',' << to_string(r.method) << ','
            << format_double(r.nmse) << ',' << format_double(r.nb) << ',' << format_double(r.mean_gamma_hat) << ','
            << format_double(r.clamp_rate) << ',' << format_double(r.ncrlb_nda) << ','
            << format_double(r.ncrlb_da) << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::vector<SweepRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header_seen) {
            if (line != kSweepCsvHeader) {
                throw std::runtime_error("sweep csv: unexpected header '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 10) {
            throw std::runtime_error("sweep csv line " + std::to_string(line_no) + ": expected 10 fields");
        }
        const auto method = parse_method(f[3]);
        if (!method) {
            throw std::runtime_error("sweep csv line " + std::to_string(line_no) + ": unknown method '" +
                                     std::string(f[3]) + "'");
        }
        rows.push_back({parse_real(f[0], line_no), parse_unsigned<std::size_t>(f[1], line_no),
                        parse_unsigned<std::size_t>(f[2], line_no), *method, parse_real(f[4], line_no),
                        parse_real(f[5], line_no), parse_real(f[6], line_no), parse_real(f[7], line_no),
                        parse_real(f[8], line_no), parse_real(f[9], line_no)});
    }
    if (!header_seen) {
        throw std::runtime_error("sweep csv: missing header");
    }
    return rows;
}

}  // namespace ndasnr
