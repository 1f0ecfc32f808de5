#ifndef HELMSCAT_IO_HPP
#define HELMSCAT_IO_HPP

#include <string>

#include "helmscat/field.hpp"
#include "helmscat/scattering.hpp"

namespace helmscat {

/// Shortest round-trip decimal representation (deterministic across runs on
/// the same build; all text outputs are bit-reproducible).
std::string format_double(double x);

/// Polyline as CSV rows `x,y`; a closed chain is implied (last vertex joins
/// the first, no repeated row).
void write_polyline_csv(const std::string& path, const Polyline& poly);
Polyline read_polyline_csv(const std::string& path);

/// Legacy-VTK ASCII unstructured grid: triangles, region tag as cell data.
void write_mesh_vtk(const std::string& path, const TransmissionMesh& mesh);

/// Mesh plus nodal point data (real, imaginary, magnitude).
void write_field_vtk(const std::string& path, const TransmissionMesh& mesh,
                     const Field& field);

/// One matrix per file, row-major, each cell as a `re,im` pair.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_matrix_csv(const std::string& path);

/// Rows `theta,re,im,abs2` with a header line.
void write_far_field_csv(const std::string& path, const FarField& ff);

} // namespace helmscat

#endif
