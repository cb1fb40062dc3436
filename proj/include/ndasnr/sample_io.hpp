#pragma once

#include "ndasnr/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

namespace ndasnr {

struct SampleFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Plain text, one observable per line. Lines starting with '#' are comments;
// "# key=value" comments carry metadata (seed, mu, sigma, prior_q, ...).
// Blank lines are ignored.

/// Throws SampleFormatError on a non-numeric line or when no samples are present.
SampleBlock read_samples(std::istream& in);
SampleBlock read_samples(const std::filesystem::path& path);

/// Values are written in shortest round-trip form, so reading back is lossless.
void write_samples(std::ostream& out, const SampleBlock& block);
void write_samples(const std::filesystem::path& path, const SampleBlock& block);

}  // namespace ndasnr
