#include "wbl/obj_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace wbl {

namespace {

int parse_index(const std::string& token, int num_vertices, int line_no) {
  const std::string head = token.substr(0, token.find('/'));
  int idx = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0) {
    throw Error(ErrorCode::InvalidInput,
                "line " + std::to_string(line_no) + ": bad face index '" + token + "'");
  }
  // Negative indices are relative to the current vertex count.
  return idx > 0 ? idx - 1 : num_vertices + idx;
}

}  // namespace

TriMesh read_obj(std::istream& in) {
  std::vector<Vec3> positions;
  std::vector<Face> faces;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) {
        throw Error(ErrorCode::InvalidInput, "line " + std::to_string(line_no) + ": bad vertex");
      }
      positions.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) idx.push_back(parse_index(tok, static_cast<int>(positions.size()), line_no));
      if (idx.size() < 3) {
        throw Error(ErrorCode::InvalidInput, "line " + std::to_string(line_no) + ": face needs 3 vertices");
      }
      // Polygons are fanned from their first vertex.
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) faces.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  return build_mesh(std::move(positions), std::move(faces));
}

TriMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in || std::filesystem::is_directory(path)) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_obj(in);
}

void write_obj(std::ostream& out, const TriMesh& mesh) {
  char buf[128];
  for (const auto& p : mesh.positions()) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out << buf;
  }
  for (const auto& f : mesh.faces()) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_obj(out, mesh);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace wbl
