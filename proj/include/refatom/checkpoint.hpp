#pragma once

#include "refatom/matrix.hpp"

#include <map>
#include <string>

// Parameter checkpoint container.
//
// Byte layout (all integers and floats little-endian):
//   magic   : 8 bytes, "RFATCKP1"
//   count   : u64, number of entries
//   entry*  : u32 key length, key bytes (no terminator),
//             u64 rows, u64 cols,
//             rows*cols f64 values, row-major
//
// Keys are flat strings; model manifests are stored as reserved "meta/..."
// keys holding 1x1 matrices.

namespace refatom::num {

using CheckpointMap = std::map<std::string, Matrix>;

void save_checkpoint(const std::string& path, const CheckpointMap& entries);
CheckpointMap load_checkpoint(const std::string& path);

}  // namespace refatom::num
