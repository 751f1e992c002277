#pragma once

#include <string>
#include <vector>

#include "fwi/grid.hpp"
#include "fwi/shot.hpp"

namespace fwi {

// Trace container: magic FWIT, u32 ns, u32 nr, u32 nt, f64 dt, then
// ns*nr*nt f32 samples in (shot, receiver, time) order, little-endian.
void write_fwit(const std::string& path, const std::vector<ShotRecord>& shots);
std::vector<ShotRecord> read_fwit(const std::string& path);

// Field container: magic FWIF, u32 nx, u32 ny, then nx*ny f32 values
// row-major with x fastest, little-endian.
void write_fwif(const std::string& path, const Field2D& field);
Field2D read_fwif(const std::string& path);

// 8-bit binary PGM, gamma mapped linearly from [0,1] to [0,255] (clamped).
// Row 0 is the top edge of the plate (iy = ny-1).
void write_pgm(const std::string& path, const Field2D& field);
std::string render_ascii(const Field2D& field, int max_cols = 96);

}  // namespace fwi
