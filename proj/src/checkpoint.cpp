#include "fwi/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace fwi {
namespace nn {

namespace {

constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void write_checkpoint(const std::string& path, Network& net, const CheckpointMeta& meta) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ArtifactError("cannot write checkpoint " + path);
    const auto tensors = net.state();
    os.write("FWIC", 4);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        put<std::uint32_t>(os, static_cast<std::uint32_t>(t.dims.size()));
        for (int d : t.dims) put<std::uint32_t>(os, static_cast<std::uint32_t>(d));
        for (std::size_t i = 0; i < t.len; ++i) put<float>(os, static_cast<float>(t.data[i]));
    }
    put<std::uint64_t>(os, meta.seed);
    put<std::uint32_t>(os, meta.epoch);
    if (!os) throw ArtifactError("checkpoint write failed: " + path);
}

CheckpointMeta read_checkpoint(const std::string& path, Network& net) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ArtifactError("cannot read checkpoint " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "FWIC", 4) != 0)
        throw ArtifactError("bad checkpoint magic in " + path);
    if (get<std::uint32_t>(is) != kVersion)
        throw CheckpointMismatch("unsupported checkpoint version in " + path);
    const auto count = get<std::uint32_t>(is);
    auto tensors = net.state();
    if (count != tensors.size())
        throw CheckpointMismatch("checkpoint tensor count does not match architecture");
    for (auto& t : tensors) {
        const auto rank = get<std::uint32_t>(is);
        if (rank != t.dims.size())
            throw CheckpointMismatch("checkpoint tensor rank mismatch at " + t.name);
        std::size_t len = 1;
        for (std::uint32_t r = 0; r < rank; ++r) {
            const auto d = get<std::uint32_t>(is);
            if (static_cast<int>(d) != t.dims[r])
                throw CheckpointMismatch("checkpoint tensor shape mismatch at " + t.name);
            len *= d;
        }
        if (len != t.len) throw CheckpointMismatch("checkpoint tensor size mismatch at " + t.name);
        for (std::size_t i = 0; i < t.len; ++i) t.data[i] = get<float>(is);
    }
    CheckpointMeta meta;
    meta.seed = get<std::uint64_t>(is);
    meta.epoch = get<std::uint32_t>(is);
    if (!is) throw ArtifactError("truncated checkpoint " + path);
    return meta;
}

}  // namespace nn
}  // namespace fwi
