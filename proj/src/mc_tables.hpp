#pragma once

namespace voxseg::mc {

// Classic 256-case marching cubes tables; edge bitmask per corner
// configuration and triangle fans as edge-index triples terminated by -1.
extern const int kEdgeTable[256];
extern const int kTriTable[256][16];

} // namespace voxseg::mc
