#include "fwi/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "fwi/inversion.hpp"
#include "fwi/observe.hpp"
#include "fwi/parallel.hpp"
#include "fwi/scenario.hpp"

namespace fwi {

void normalize_max_abs(Field2D& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    if (m > 0.0)
        for (double& x : f.v) x /= m;
}

namespace {

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

constexpr std::uint32_t kVersion = 1;

void put_field(std::ostream& os, const Field2D& f) {
    for (int iy = 0; iy < f.ny; ++iy)
        for (int ix = 0; ix < f.nx; ++ix) put<float>(os, static_cast<float>(f.at(ix, iy)));
}

Field2D get_field(std::istream& is, int nx, int ny) {
    Field2D f(nx, ny);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) f.at(ix, iy) = get<float>(is);
    return f;
}

}  // namespace

void write_fwid(const std::string& path, const Dataset& ds) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ArtifactError("cannot write dataset " + path);
    os.write("FWID", 4);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(ds.records.size()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(ds.nx));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(ds.ny));
    put<std::uint8_t>(os, ds.norm_id);
    for (const auto& r : ds.records) {
        put_field(os, r.input);
        put_field(os, r.target);
        put<std::uint64_t>(os, r.seed);
    }
    if (!os) throw ArtifactError("dataset write failed: " + path);
}

Dataset read_fwid(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ArtifactError("cannot read dataset " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "FWID", 4) != 0)
        throw ArtifactError("bad dataset magic in " + path);
    if (get<std::uint32_t>(is) != kVersion)
        throw ArtifactError("unsupported dataset version in " + path);
    Dataset ds;
    const auto count = get<std::uint32_t>(is);
    ds.nx = static_cast<int>(get<std::uint32_t>(is));
    ds.ny = static_cast<int>(get<std::uint32_t>(is));
    ds.norm_id = get<std::uint8_t>(is);
    if (ds.norm_id != kNormMaxAbs)
        throw NormalizationMismatch("dataset " + path + " uses an unknown normalization id");
    for (std::uint32_t i = 0; i < count; ++i) {
        DatasetRecord r;
        r.input = get_field(is, ds.nx, ds.ny);
        r.target = get_field(is, ds.nx, ds.ny);
        r.seed = get<std::uint64_t>(is);
        ds.records.push_back(std::move(r));
    }
    if (!is) throw ArtifactError("truncated dataset " + path);
    return ds;
}

DatasetBuildResult build_pretrain_dataset(int n, std::uint64_t seed, const Acquisition& coarse,
                                          const GridSpec& fine, const Physics& physics,
                                          int threads) {
    if (n < 1) throw ConfigError("build_pretrain_dataset: n must be >= 1");
    DatasetBuildResult out;
    out.dataset.nx = coarse.grid.nx;
    out.dataset.ny = coarse.grid.ny;
    out.dataset.norm_id = kNormMaxAbs;

    struct Slot {
        bool ok = false;
        DatasetRecord rec;
        std::string note;
    };
    std::vector<Slot> slots(n);

    parallel_for(n, threads, [&](int i) {
        const std::uint64_t sample_seed = Rng::mix(seed, static_cast<std::uint64_t>(i));
        Rng rng(sample_seed);
        const Scenario sc = sample_scenario(rng, coarse.grid.Lx, coarse.grid.Ly);
        try {
            const MaterialField truth = rasterize(sc, coarse.grid);
            Problem p;
            p.physics = physics;
            p.acq = coarse;
            p.obs = generate_observation(sc, fine, coarse, physics, 1);
            GradientField g0 = first_iteration_gradient(p, 1);
            normalize_max_abs(g0.values);
            slots[i].rec = {std::move(g0.values), truth.values, sample_seed};
            slots[i].note = sc.describe();
            slots[i].ok = true;
        } catch (const SolverError& e) {
            slots[i].note = std::string("skipped: ") + e.what();
        }
    });

    for (int i = 0; i < n; ++i) {
        if (slots[i].ok) {
            out.manifest.push_back(std::to_string(i) + " seed=" + std::to_string(slots[i].rec.seed) +
                                   " " + slots[i].note);
            out.dataset.records.push_back(std::move(slots[i].rec));
        } else {
            out.manifest.push_back(std::to_string(i) + " " + slots[i].note);
            ++out.skipped;
        }
    }
    return out;
}

}  // namespace fwi
