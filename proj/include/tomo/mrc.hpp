#pragma once

#include <string>
#include <vector>

#include "tomo/grid.hpp"

namespace tomo {

/// MRC2014 volume IO, mode 2 (little-endian float32) only. cella is stored in
/// angstrom; grids use nm, so the voxel size is converted on the way through.
void write_mrc(const Grid3& g, const std::string& path);
Grid3 read_mrc(const std::string& path);

/// Image stacks: one 2D slab per section, shared pixel size.
void write_mrc_stack(const std::vector<Grid3>& slabs, const std::string& path);
std::vector<Grid3> read_mrc_stack(const std::string& path);

/// Label masks ride through the same float32 container (ids are exact below 2^24).
void write_mrc_labels(const IntGrid3& g, const std::string& path);
IntGrid3 read_mrc_labels(const std::string& path);

}  // namespace tomo
