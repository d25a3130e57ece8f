#include "lsta/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace lsta {
namespace {

constexpr char kMagic[5] = {'L', 'S', 'T', 'A', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v));
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_f64(std::ostream& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(out, bits);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& in) {
    const std::uint64_t lo = get_u32(in);
    const std::uint64_t hi = get_u32(in);
    return lo | (hi << 32);
}

double get_f64(std::istream& in) {
    const std::uint64_t bits = get_u64(in);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open for write: " + path);
    out.write(kMagic, sizeof(kMagic));
    out.put(static_cast<char>(ckpt.model.kind));
    out.put(static_cast<char>(ckpt.model.direction));
    put_u32(out, static_cast<std::uint32_t>(ckpt.model.hidden));
    put_u32(out, static_cast<std::uint32_t>(ckpt.model.input));
    put_u32(out, static_cast<std::uint32_t>(ckpt.model.classes));
    put_u64(out, ckpt.seed);
    put_u32(out, static_cast<std::uint32_t>(ckpt.config_echo.size()));
    out.write(ckpt.config_echo.data(), static_cast<std::streamsize>(ckpt.config_echo.size()));

    SequenceModel& model = const_cast<SequenceModel&>(ckpt.model);
    const std::vector<ParamBlock> blocks = param_blocks(model);
    put_u32(out, static_cast<std::uint32_t>(blocks.size()));
    for (const ParamBlock& b : blocks) {
        put_u32(out, static_cast<std::uint32_t>(b.name.size()));
        out.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
        put_u64(out, b.size);
        for (std::size_t j = 0; j < b.size; ++j) put_f64(out, b.data[j]);
    }
    if (!out) throw std::runtime_error("checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open: " + path);
    char magic[5];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);

    Checkpoint ckpt;
    const int kind = in.get();
    const int direction = in.get();
    if (kind < 0 || kind > 2 || direction < 0 || direction > 1)
        throw std::runtime_error("checkpoint: bad kind/direction bytes");
    const std::size_t H = get_u32(in);
    const std::size_t D = get_u32(in);
    const std::size_t K = get_u32(in);
    ckpt.seed = get_u64(in);
    const std::size_t echo_len = get_u32(in);
    ckpt.config_echo.resize(echo_len);
    in.read(ckpt.config_echo.data(), static_cast<std::streamsize>(echo_len));

    Rng scratch(0);
    ckpt.model = make_model(static_cast<CellKind>(kind), static_cast<Direction>(direction), H, D,
                            K, scratch);
    std::vector<ParamBlock> blocks = param_blocks(ckpt.model);

    const std::size_t nblocks = get_u32(in);
    if (nblocks != blocks.size())
        throw std::runtime_error("checkpoint: expected " + std::to_string(blocks.size()) +
                                 " blocks, found " + std::to_string(nblocks));
    for (ParamBlock& b : blocks) {
        const std::size_t name_len = get_u32(in);
        std::string name(name_len, '\0');
        in.read(name.data(), static_cast<std::streamsize>(name_len));
        if (name != b.name)
            throw std::runtime_error("checkpoint: block '" + name + "', expected '" + b.name + "'");
        const std::uint64_t count = get_u64(in);
        if (count != b.size)
            throw std::runtime_error("checkpoint: block '" + name + "' has " +
                                     std::to_string(count) + " scalars, expected " +
                                     std::to_string(b.size));
        for (std::size_t j = 0; j < b.size; ++j) b.data[j] = get_f64(in);
    }
    if (!in) throw std::runtime_error("checkpoint: truncated file: " + path);
    return ckpt;
}

}  // namespace lsta
