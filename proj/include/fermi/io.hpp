#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fermi/assembly.hpp"
#include "fermi/mesh.hpp"
#include "fermi/stepper.hpp"

namespace fermi {

/// Plain-text mesh: `vertices N triangles M`, N lines `y eta`, M lines `i j k`,
/// then `boundary B` and B lines `a b side tag`. Coordinates use %.17g, so
/// the round trip is bit-exact. The result has no refinement tree.
void write_mesh(std::ostream& out, const TriMesh& mesh);
TriMesh read_mesh(std::istream& in);
std::string format_mesh(const TriMesh& mesh);

/// Zero-based `row col value` lines.
std::string format_coordinates(const SparseMatrix& A);

/// One `y eta value` line per vertex.
std::string format_field(const TriMesh& mesh, const Eigen::VectorXd& values);

/// Write snapshot_<i>.txt per field and a manifest listing x levels.
void dump_snapshots(const std::filesystem::path& dir, const TriMesh& mesh,
                    const std::vector<NodalField>& snapshots);

/// One value per line, with a manifest giving both factor sizes and the ordering.
void dump_flat(const std::filesystem::path& path, const Eigen::VectorXd& values,
               int spatial_vertices, int velocity_vertices);

}  // namespace fermi
