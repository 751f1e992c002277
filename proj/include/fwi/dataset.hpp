#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fwi/grid.hpp"
#include "fwi/physics.hpp"

namespace fwi {

struct NormalizationMismatch : ArtifactError {
    explicit NormalizationMismatch(const std::string& msg) : ArtifactError(msg) {}
};

/// Per-sample max-abs normalization of the gradient input (id 1).
constexpr std::uint8_t kNormMaxAbs = 1;

/// Scales the field so max |value| is 1; identically-zero fields pass through.
void normalize_max_abs(Field2D& f);

struct DatasetRecord {
    Field2D input;   // normalized first-iteration gradient
    Field2D target;  // true density scaling field
    std::uint64_t seed = 0;
};

struct Dataset {
    int nx = 0, ny = 0;
    std::uint8_t norm_id = kNormMaxAbs;
    std::vector<DatasetRecord> records;
};

// Dataset container: magic FWID, u32 version, u32 count, u32 nx, u32 ny,
// u8 normalization id, then per record f32 input + f32 target (x fastest)
// and u64 seed. Little-endian.
void write_fwid(const std::string& path, const Dataset& ds);
Dataset read_fwid(const std::string& path);

struct DatasetBuildResult {
    Dataset dataset;
    std::vector<std::string> manifest;  // one scenario description per record
    int skipped = 0;
};

/// n seeded samples: random ellipse -> rasterized truth -> reference-grid
/// observations -> first-iteration adjoint gradient -> max-abs normalization.
/// Solver failures skip the sample with a note in the manifest.
DatasetBuildResult build_pretrain_dataset(int n, std::uint64_t seed, const Acquisition& coarse,
                                          const GridSpec& fine, const Physics& physics,
                                          int threads = 1);

}  // namespace fwi
