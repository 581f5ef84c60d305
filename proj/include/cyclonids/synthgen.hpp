#pragma once

#include "cyclonids/dataset.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace cyclonids {

struct SynthConfig {
    std::size_t n_samples = 500;
    std::size_t n_informative = 3;
    std::size_t n_noise = 7;
    std::size_t n_classes = 2;
    // Distance between adjacent class means, in units of the unit noise std.
    double class_separation = 5.0;
    std::uint64_t seed = 42;

    // Throws ConfigError unless n_informative >= 1, n_classes >= 2 and
    // n_samples >= 10 * n_classes.
    void validate() const;
};

// Parses "n=500,inf=3,noise=7,classes=2,sep=5,seed=1"; omitted keys keep their defaults.
SynthConfig parse_synth_config(std::string_view text);

struct SynthResult {
    Dataset data;
    // Columns 0..n_informative-1; noise columns follow.
    std::vector<std::size_t> informative;
};

// Row i has label i mod n_classes. On informative column j the class-c mean is
// sep * (((c + j) mod k) - (k - 1) / 2), so every pair of classes is at least
// sep apart on every informative column.
SynthResult gen_classification(const SynthConfig& cfg);

} // namespace cyclonids
