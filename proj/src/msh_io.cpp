#include <fstream>
#include <sstream>

#include "dotrecon/errors.hpp"
#include "dotrecon/mesh.hpp"

namespace dotrecon {

namespace {

std::string next_nonempty(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (!line.empty()) return line;
  }
  return {};
}

}  // namespace

Mesh load_msh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_msh: cannot open '" + path + "'");

  Mesh mesh;
  std::string line;
  bool saw_nodes = false, saw_elements = false;
  while (!(line = next_nonempty(in)).empty()) {
    if (line == "$MeshFormat") {
      std::istringstream fmt(next_nonempty(in));
      double version = 0;
      int file_type = 0, data_size = 0;
      fmt >> version >> file_type >> data_size;
      if (!(version >= 2.0 && version < 3.0) || file_type != 0)
        throw IoError("load_msh: expected MSH 2.2 ASCII, got version " +
                      std::to_string(version));
      if (next_nonempty(in) != "$EndMeshFormat")
        throw IoError("load_msh: malformed $MeshFormat section");
    } else if (line == "$Nodes") {
      saw_nodes = true;
      std::size_t n = std::stoull(next_nonempty(in));
      mesh.vertices.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::istringstream ls(next_nonempty(in));
        long long id;
        double x, y, z;
        if (!(ls >> id >> x >> y >> z))
          throw IoError("load_msh: malformed node line");
        if (id < 1 || static_cast<std::size_t>(id) > n)
          throw IoError("load_msh: node ids must be 1..n");
        mesh.vertices[id - 1] = Eigen::Vector3d(x, y, z);
      }
      if (next_nonempty(in) != "$EndNodes")
        throw IoError("load_msh: missing $EndNodes");
    } else if (line == "$Elements") {
      saw_elements = true;
      std::size_t n = std::stoull(next_nonempty(in));
      for (std::size_t i = 0; i < n; ++i) {
        std::istringstream ls(next_nonempty(in));
        long long id;
        int type, ntags;
        if (!(ls >> id >> type >> ntags))
          throw IoError("load_msh: malformed element line");
        for (int t = 0; t < ntags; ++t) {
          long long tag;
          ls >> tag;
        }
        if (type == 4) {
          std::array<int, 4> tet;
          for (int& v : tet) {
            long long node;
            if (!(ls >> node)) throw IoError("load_msh: truncated tetrahedron");
            if (node < 1 || static_cast<std::size_t>(node) > mesh.vertices.size())
              throw IoError("load_msh: element references node " +
                            std::to_string(node) + " outside 1..n");
            v = static_cast<int>(node - 1);
          }
          mesh.tets.push_back(tet);
        } else if (type == 2) {
          // Boundary patch triangles; connectivity comes from the tets.
          long long node;
          for (int t = 0; t < 3; ++t) ls >> node;
        } else {
          throw IoError("load_msh: unsupported element type " + std::to_string(type) +
                        " (only tetrahedra and boundary triangles)");
        }
      }
      if (next_nonempty(in) != "$EndElements")
        throw IoError("load_msh: missing $EndElements");
    } else if (line[0] == '$') {
      // Skip unknown sections ($PhysicalNames etc.).
      const std::string end = "$End" + line.substr(1);
      while (!(line = next_nonempty(in)).empty() && line != end) {
      }
    }
  }
  if (!saw_nodes || !saw_elements)
    throw IoError("load_msh: file lacks $Nodes or $Elements");
  if (mesh.tets.empty()) throw IoError("load_msh: no tetrahedra in file");

  mesh.finalize();
  return mesh;
}

void write_msh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_msh: cannot open '" + path + "' for writing");
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n" << mesh.vertices.size() << "\n";
  out.precision(17);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& v = mesh.vertices[i];
    out << i + 1 << ' ' << v.x() << ' ' << v.y() << ' ' << v.z() << "\n";
  }
  out << "$EndNodes\n$Elements\n"
      << mesh.tets.size() + mesh.boundary_facets.size() << "\n";
  std::size_t eid = 1;
  for (const auto& f : mesh.boundary_facets) {
    out << eid++ << " 2 2 0 0 " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1
        << "\n";
  }
  for (const auto& t : mesh.tets) {
    out << eid++ << " 4 2 0 0 " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1
        << ' ' << t[3] + 1 << "\n";
  }
  out << "$EndElements\n";
  if (!out) throw IoError("write_msh: write failed for '" + path + "'");
}

}  // namespace dotrecon
