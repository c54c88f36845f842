#pragma once

#include <filesystem>
#include <iosfwd>

#include "wbl/mesh.hpp"

namespace wbl {

// ASCII OBJ with `v` and `f` records only. Face records may use the
// `v/vt/vn` form; only the position index is kept. Boundary is never stored.
TriMesh read_obj(std::istream& in);
TriMesh read_obj(const std::filesystem::path& path);

// Positions are written with 17 significant digits so a read-back is
// bit-identical.
void write_obj(std::ostream& out, const TriMesh& mesh);
void write_obj(const std::filesystem::path& path, const TriMesh& mesh);

}  // namespace wbl
