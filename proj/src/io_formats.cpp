#include "fwi/io_formats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "fwi/errors.hpp"

namespace fwi {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_f32(std::ostream& os, float v) { os.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
double get_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
float get_f32(std::istream& is) {
    float v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

void check_magic(std::istream& is, const char* magic, const std::string& path) {
    char buf[4];
    is.read(buf, 4);
    if (!is || std::memcmp(buf, magic, 4) != 0)
        throw ArtifactError("bad magic in " + path + " (expected " + magic + ")");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ArtifactError("cannot write " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ArtifactError("cannot read " + path);
    return is;
}

}  // namespace

void write_fwit(const std::string& path, const std::vector<ShotRecord>& shots) {
    if (shots.empty()) throw ArtifactError("write_fwit: no shots");
    for (const auto& s : shots)
        if (!s.same_shape(shots.front())) throw ShapeMismatch("write_fwit: inconsistent shots");
    auto os = open_out(path);
    os.write("FWIT", 4);
    put_u32(os, static_cast<std::uint32_t>(shots.size()));
    put_u32(os, static_cast<std::uint32_t>(shots.front().nr));
    put_u32(os, static_cast<std::uint32_t>(shots.front().nt));
    put_f64(os, shots.front().dt);
    for (const auto& s : shots)
        for (double x : s.samples) put_f32(os, static_cast<float>(x));
    if (!os) throw ArtifactError("write_fwit: write failed for " + path);
}

std::vector<ShotRecord> read_fwit(const std::string& path) {
    auto is = open_in(path);
    check_magic(is, "FWIT", path);
    const auto ns = get_u32(is), nr = get_u32(is), nt = get_u32(is);
    const double dt = get_f64(is);
    std::vector<ShotRecord> shots;
    shots.reserve(ns);
    for (std::uint32_t s = 0; s < ns; ++s) {
        ShotRecord rec(static_cast<int>(s), static_cast<int>(nr), static_cast<int>(nt), dt);
        for (auto& x : rec.samples) x = get_f32(is);
        shots.push_back(std::move(rec));
    }
    if (!is) throw ArtifactError("read_fwit: truncated file " + path);
    return shots;
}

void write_fwif(const std::string& path, const Field2D& field) {
    auto os = open_out(path);
    os.write("FWIF", 4);
    put_u32(os, static_cast<std::uint32_t>(field.nx));
    put_u32(os, static_cast<std::uint32_t>(field.ny));
    for (int iy = 0; iy < field.ny; ++iy)
        for (int ix = 0; ix < field.nx; ++ix) put_f32(os, static_cast<float>(field.at(ix, iy)));
    if (!os) throw ArtifactError("write_fwif: write failed for " + path);
}

Field2D read_fwif(const std::string& path) {
    auto is = open_in(path);
    check_magic(is, "FWIF", path);
    const auto nx = get_u32(is), ny = get_u32(is);
    if (nx == 0 || ny == 0 || nx > (1u << 20) || ny > (1u << 20))
        throw ArtifactError("read_fwif: implausible dimensions in " + path);
    Field2D f(static_cast<int>(nx), static_cast<int>(ny));
    for (int iy = 0; iy < f.ny; ++iy)
        for (int ix = 0; ix < f.nx; ++ix) f.at(ix, iy) = get_f32(is);
    if (!is) throw ArtifactError("read_fwif: truncated file " + path);
    return f;
}

namespace {

int gray_level(double g) {
    const double c = std::clamp(g, 0.0, 1.0);
    return static_cast<int>(std::lround(c * 255.0));
}

}  // namespace

void write_pgm(const std::string& path, const Field2D& field) {
    auto os = open_out(path);
    os << "P5\n" << field.nx << " " << field.ny << "\n255\n";
    for (int iy = field.ny - 1; iy >= 0; --iy)
        for (int ix = 0; ix < field.nx; ++ix) {
            const unsigned char b = static_cast<unsigned char>(gray_level(field.at(ix, iy)));
            os.write(reinterpret_cast<const char*>(&b), 1);
        }
    if (!os) throw ArtifactError("write_pgm: write failed for " + path);
}

std::string render_ascii(const Field2D& field, int max_cols) {
    static const char ramp[] = " .:-=+*#%@";
    const int step = std::max(1, field.nx / max_cols);
    std::string out;
    for (int iy = field.ny - 1; iy >= 0; iy -= step) {
        for (int ix = 0; ix < field.nx; ix += step) {
            const int lvl = gray_level(field.at(ix, iy));
            out += ramp[9 - std::min(9, lvl * 10 / 256)];
        }
        out += '\n';
    }
    return out;
}

}  // namespace fwi
