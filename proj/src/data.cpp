#include "lsta/data.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>

namespace lsta {
namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t off) {
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

void write_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    b.push_back(std::uint8_t(v >> 24));
    b.push_back(std::uint8_t(v >> 16));
    b.push_back(std::uint8_t(v >> 8));
    b.push_back(std::uint8_t(v));
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool is_gzip(const std::vector<std::uint8_t>& b) {
    return b.size() >= 2 && b[0] == 0x1f && b[1] == 0x8b;
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in) {
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 16) != Z_OK) throw FormatError("gzip: inflateInit failed");
    std::vector<std::uint8_t> out;
    out.reserve(in.size() * 4);
    std::uint8_t buf[1 << 16];
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    do {
        zs.next_out = buf;
        zs.avail_out = sizeof(buf);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw FormatError("gzip: corrupt stream");
        }
        out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
    } while (rc != Z_STREAM_END);
    inflateEnd(&zs);
    return out;
}

std::vector<std::uint8_t> read_maybe_gzip(const std::string& path) {
    std::vector<std::uint8_t> bytes = read_file(path);
    return is_gzip(bytes) ? gunzip(bytes) : bytes;
}

std::string hex_magic(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "0x%08x", v);
    return buf;
}

}  // namespace

IdxImages parse_idx_images(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16) throw FormatError("idx images: header truncated");
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != kImagesMagic)
        throw FormatError("idx images: bad magic " + hex_magic(magic) + ", expected " +
                          hex_magic(kImagesMagic));
    IdxImages out;
    out.count = read_be32(bytes, 4);
    out.height = read_be32(bytes, 8);
    out.width = read_be32(bytes, 12);
    const std::size_t expected = out.count * out.height * out.width;
    if (bytes.size() != 16 + expected)
        throw FormatError("idx images: payload length " + std::to_string(bytes.size() - 16) +
                          ", expected " + std::to_string(expected));
    out.pixels.assign(bytes.begin() + 16, bytes.end());
    return out;
}

std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8) throw FormatError("idx labels: header truncated");
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != kLabelsMagic)
        throw FormatError("idx labels: bad magic " + hex_magic(magic) + ", expected " +
                          hex_magic(kLabelsMagic));
    const std::size_t count = read_be32(bytes, 4);
    if (bytes.size() != 8 + count)
        throw FormatError("idx labels: payload length " + std::to_string(bytes.size() - 8) +
                          ", expected " + std::to_string(count));
    return {bytes.begin() + 8, bytes.end()};
}

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& imgs) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + imgs.pixels.size());
    write_be32(out, kImagesMagic);
    write_be32(out, std::uint32_t(imgs.count));
    write_be32(out, std::uint32_t(imgs.height));
    write_be32(out, std::uint32_t(imgs.width));
    out.insert(out.end(), imgs.pixels.begin(), imgs.pixels.end());
    return out;
}

std::vector<std::uint8_t> serialize_idx_labels(const std::vector<std::uint8_t>& labels) {
    std::vector<std::uint8_t> out;
    out.reserve(8 + labels.size());
    write_be32(out, kLabelsMagic);
    write_be32(out, std::uint32_t(labels.size()));
    out.insert(out.end(), labels.begin(), labels.end());
    return out;
}

IdxImages load_idx_images(const std::string& path) {
    return parse_idx_images(read_maybe_gzip(path));
}

std::vector<std::uint8_t> load_idx_labels(const std::string& path) {
    return parse_idx_labels(read_maybe_gzip(path));
}

LabeledSequences rows_as_sequence(const IdxImages& imgs, const std::vector<std::uint8_t>& labels,
                                  std::size_t classes) {
    if (labels.size() != imgs.count)
        throw FormatError("rows_as_sequence: " + std::to_string(imgs.count) + " images vs " +
                          std::to_string(labels.size()) + " labels");
    LabeledSequences out;
    out.timesteps = imgs.height;
    out.features = imgs.width;
    out.classes = classes;
    out.sequences.reserve(imgs.count);
    out.labels.reserve(imgs.count);
    const std::size_t stride = imgs.height * imgs.width;
    for (std::size_t n = 0; n < imgs.count; ++n) {
        Matrix seq(imgs.height, imgs.width);
        const std::uint8_t* px = imgs.pixels.data() + n * stride;
        for (std::size_t i = 0; i < stride; ++i) seq.values[i] = px[i] / 255.0;
        out.sequences.push_back(std::move(seq));
        out.labels.push_back(labels[n]);
    }
    return out;
}

std::vector<std::size_t> shuffled_indices(std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = i;
    Rng rng(seed);
    for (std::size_t i = count; i > 1; --i) {
        const std::size_t j = rng.below(i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t count, std::size_t batch_size,
                                                   std::uint64_t seed) {
    const std::vector<std::size_t> order = shuffled_indices(count, seed);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < count; start += batch_size) {
        const std::size_t end = std::min(count, start + batch_size);
        batches.emplace_back(order.begin() + start, order.begin() + end);
    }
    return batches;
}

LabeledSequences take_subset(const LabeledSequences& data, const std::vector<std::size_t>& order,
                             std::size_t n) {
    LabeledSequences out;
    out.timesteps = data.timesteps;
    out.features = data.features;
    out.classes = data.classes;
    n = std::min(n, order.size());
    for (std::size_t i = 0; i < n; ++i) {
        out.sequences.push_back(data.sequences[order[i]]);
        out.labels.push_back(data.labels[order[i]]);
    }
    return out;
}

LabeledSequences synth_signal_task(const SynthConfig& cfg) {
    if (cfg.signal_len >= cfg.timesteps)
        throw std::invalid_argument("synth_signal_task: signal_len must be < timesteps");
    LabeledSequences out;
    out.timesteps = cfg.timesteps;
    out.features = cfg.features;
    out.classes = 2;
    Rng rng(cfg.seed);
    for (std::size_t n = 0; n < cfg.count; ++n) {
        const std::size_t label = n % 2;  // balanced
        Matrix seq(cfg.timesteps, cfg.features);
        if (cfg.noise_sigma > 0.0) {
            for (double& v : seq.values) v = cfg.noise_sigma * rng.gaussian();
        }
        const std::size_t start = rng.below(cfg.timesteps - cfg.signal_len + 1);
        for (std::size_t t = start; t < start + cfg.signal_len; ++t) seq(t, label) = 1.0;
        out.sequences.push_back(std::move(seq));
        out.labels.push_back(label);
    }
    return out;
}

}  // namespace lsta
