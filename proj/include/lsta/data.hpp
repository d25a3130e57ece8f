#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsta/linalg.hpp"

namespace lsta {

// Raised on malformed IDX input (bad magic, truncated payload).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

struct IdxImages {
    std::size_t count = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> pixels;  // count * height * width, row-major per image
};

struct LabeledSequences {
    std::vector<Matrix> sequences;  // each T x D
    std::vector<std::size_t> labels;
    std::size_t timesteps = 0;  // T
    std::size_t features = 0;   // D
    std::size_t classes = 0;    // K
};

struct SynthConfig {
    std::size_t timesteps = 50;   // T
    std::size_t features = 4;     // D
    std::size_t signal_len = 5;
    double noise_sigma = 0.3;
    std::size_t count = 1000;     // N
    std::uint64_t seed = 0;
};

// IDX files as used by the MNIST family: big-endian header, magic 0x00000803
// for images and 0x00000801 for labels. Gzip-compressed files are decompressed
// transparently.
IdxImages load_idx_images(const std::string& path);
std::vector<std::uint8_t> load_idx_labels(const std::string& path);

IdxImages parse_idx_images(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t>& bytes);

// Inverse of parse_idx_images; byte-exact round trip.
std::vector<std::uint8_t> serialize_idx_images(const IdxImages& imgs);
std::vector<std::uint8_t> serialize_idx_labels(const std::vector<std::uint8_t>& labels);

// Each image row becomes one timestep; pixels are scaled to [0,1] by /255.
LabeledSequences rows_as_sequence(const IdxImages& imgs, const std::vector<std::uint8_t>& labels,
                                  std::size_t classes);

// Seeded epoch permutation split into batches; the last batch may be short.
std::vector<std::vector<std::size_t>> make_batches(std::size_t count, std::size_t batch_size,
                                                   std::uint64_t seed);

// Seeded in-place Fisher-Yates shuffle of an index permutation, used for the
// shuffle-then-prefix subset rule.
std::vector<std::size_t> shuffled_indices(std::size_t count, std::uint64_t seed);

LabeledSequences take_subset(const LabeledSequences& data, const std::vector<std::size_t>& order,
                             std::size_t n);

// Two-class probe task: Gaussian noise everywhere except one random contiguous
// window of +1 in the class's feature (class 0 -> feature 0, class 1 -> feature 1).
LabeledSequences synth_signal_task(const SynthConfig& cfg);

}  // namespace lsta
