#include "ndasnr/sample_io.hpp"

#include "ndasnr/format.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>

namespace ndasnr {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

SampleBlock read_samples(std::istream& in) {
    std::vector<double> samples;
    std::map<std::string, std::string, std::less<>> meta;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) {
            continue;
        }
        if (text.front() == '#') {
            const auto body = trim(text.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string_view::npos) {
                meta.emplace(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
            }
            continue;
        }
        double value = 0.0;
        const auto res = parse_double(text, value);
        if (!res) {
            throw SampleFormatError("line " + std::to_string(line_no) + ": not a number: '" +
                                    std::string(text) + "'");
        }
        samples.push_back(value);
    }
    if (samples.empty()) {
        throw SampleFormatError("sample file holds no observables");
    }

    std::uint64_t seed = 0;
    if (auto it = meta.find("seed"); it != meta.end()) {
        const auto& s = it->second;
        std::from_chars(s.data(), s.data() + s.size(), seed);
    }
    std::optional<ChannelParams> truth;
    const auto mu = meta.find("mu");
    const auto sigma = meta.find("sigma");
    if (mu != meta.end() && sigma != meta.end()) {
        double m = 0.0, s = 0.0, q = 0.5;
        if (auto qi = meta.find("prior_q"); qi != meta.end()) {
            parse_double(qi->second, q);
        }
        if (parse_double(mu->second, m) && parse_double(sigma->second, s)) {
            try {
                truth = ChannelParams(m, s, q);
            } catch (const std::invalid_argument&) {
                throw SampleFormatError("invalid truth metadata in sample header");
            }
        }
    }
    try {
        return SampleBlock(std::move(samples), seed, truth);
    } catch (const std::invalid_argument& e) {
        throw SampleFormatError(e.what());
    }
}

SampleBlock read_samples(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw SampleFormatError("cannot open sample file '" + path.string() + "'");
    }
    return read_samples(in);
}

void write_samples(std::ostream& out, const SampleBlock& block) {
    out << "# n=" << block.n() << '\n';
    out << "# seed=" << block.seed() << '\n';
    if (const auto& t = block.truth()) {
        out << "# mu=" << format_double(t->mu()) << '\n';
        out << "# sigma=" << format_double(t->sigma()) << '\n';
        out << "# prior_q=" << format_double(t->prior_q()) << '\n';
        if (t->sigma() > 0.0) {
            out << "# gamma=" << format_double(t->gamma()) << '\n';
            out << "# gamma_db=" << format_double(t->gamma_db()) << '\n';
        }
    }
    for (double y : block.samples()) {
        out << format_double(y) << '\n';
    }
}

void write_samples(const std::filesystem::path& path, const SampleBlock& block) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    write_samples(out, block);
    if (!out) {
        throw std::runtime_error("write to '" + path.string() + "' failed");
    }
}

}  // namespace ndasnr
