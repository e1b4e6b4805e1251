#include "refatom/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace refatom::num {

namespace {
constexpr char kMagic[8] = {'R', 'F', 'A', 'T', 'C', 'K', 'P', '1'};

template <typename T>
void write_pod(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("checkpoint: truncated file");
    return v;
}
}  // namespace

void save_checkpoint(const std::string& path, const CheckpointMap& entries) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("checkpoint: cannot open for write: " + path);
    os.write(kMagic, sizeof(kMagic));
    write_pod<std::uint64_t>(os, entries.size());
    for (const auto& [key, m] : entries) {
        write_pod<std::uint32_t>(os, std::uint32_t(key.size()));
        os.write(key.data(), std::streamsize(key.size()));
        write_pod<std::uint64_t>(os, m.rows());
        write_pod<std::uint64_t>(os, m.cols());
        os.write(reinterpret_cast<const char*>(m.data()),
                 std::streamsize(m.size() * sizeof(double)));
    }
    if (!os) throw std::runtime_error("checkpoint: write failed: " + path);
}

CheckpointMap load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    const auto count = read_pod<std::uint64_t>(is);
    CheckpointMap out;
    for (std::uint64_t e = 0; e < count; ++e) {
        const auto klen = read_pod<std::uint32_t>(is);
        std::string key(klen, '\0');
        is.read(key.data(), klen);
        const auto rows = read_pod<std::uint64_t>(is);
        const auto cols = read_pod<std::uint64_t>(is);
        Matrix m(std::size_t(rows), std::size_t(cols));
        is.read(reinterpret_cast<char*>(m.data()), std::streamsize(m.size() * sizeof(double)));
        if (!is) throw std::runtime_error("checkpoint: truncated entry '" + key + "'");
        out.emplace(std::move(key), std::move(m));
    }
    return out;
}

}  // namespace refatom::num
