#include "helmscat/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace helmscat {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for reading: " + path);
    return f;
}

void finish(std::ofstream& f, const std::string& path) {
    f.flush();
    if (!f) throw ConfigError("write failed: " + path);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc()) throw ConfigError("malformed number: '" + s + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

} // namespace

std::string format_double(double x) {
    if (x == 0.0) x = 0.0;  // normalize -0
    char buf[40];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw ConfigError("number formatting failed");
    return std::string(buf, p);
}

void write_polyline_csv(const std::string& path, const Polyline& poly) {
    std::ofstream f = open_out(path);
    for (const Vec2& v : poly.vertices)
        f << format_double(v.x) << ',' << format_double(v.y) << '\n';
    finish(f, path);
}

Polyline read_polyline_csv(const std::string& path) {
    std::ifstream f = open_in(path);
    Polyline poly;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 2)
            throw ConfigError(path + ": expected `x,y` rows, got '" + line + "'");
        poly.vertices.push_back({parse_double(cells[0]), parse_double(cells[1])});
    }
    if (poly.vertices.size() < 3)
        throw ConfigError(path + ": a closed polyline needs at least 3 vertices");
    poly.closed = true;
    return poly;
}

namespace {

void write_vtk_grid(std::ofstream& f, const TransmissionMesh& mesh,
                    const std::string& title) {
    const int n = mesh.node_count();
    const int m = static_cast<int>(mesh.triangles.size());
    f << "# vtk DataFile Version 3.0\n" << title << "\nASCII\n";
    f << "DATASET UNSTRUCTURED_GRID\n";
    f << "POINTS " << n << " double\n";
    for (const Vec2& p : mesh.nodes)
        f << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
    f << "CELLS " << m << ' ' << 4 * m << '\n';
    for (const auto& t : mesh.triangles)
        f << "3 " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
    f << "CELL_TYPES " << m << '\n';
    for (int i = 0; i < m; ++i) f << "5\n";
    f << "CELL_DATA " << m << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
    for (const auto& t : mesh.triangles)
        f << (t.region == Region::interior ? 0 : 1) << '\n';
}

} // namespace

void write_mesh_vtk(const std::string& path, const TransmissionMesh& mesh) {
    std::ofstream f = open_out(path);
    write_vtk_grid(f, mesh, "transmission mesh");
    finish(f, path);
}

void write_field_vtk(const std::string& path, const TransmissionMesh& mesh,
                     const Field& field) {
    if (field.values.size() != mesh.node_count())
        throw PreconditionError("write_field_vtk: field size mismatch");
    std::ofstream f = open_out(path);
    write_vtk_grid(f, mesh, "nodal field");
    const int n = mesh.node_count();
    f << "POINT_DATA " << n << '\n';
    f << "SCALARS re double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) f << format_double(field.values(i).real()) << '\n';
    f << "SCALARS im double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) f << format_double(field.values(i).imag()) << '\n';
    f << "SCALARS magnitude double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i)
        f << format_double(std::abs(field.values(i))) << '\n';
    finish(f, path);
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXcd& m) {
    std::ofstream f = open_out(path);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) f << ',';
            f << format_double(m(r, c).real()) << ','
              << format_double(m(r, c).imag());
        }
        f << '\n';
    }
    finish(f, path);
}

Eigen::MatrixXcd read_matrix_csv(const std::string& path) {
    std::ifstream f = open_in(path);
    std::vector<std::vector<cplx>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() % 2 != 0)
            throw ConfigError(path + ": expected re,im cell pairs");
        std::vector<cplx> row;
        for (std::size_t i = 0; i < cells.size(); i += 2)
            row.emplace_back(parse_double(cells[i]), parse_double(cells[i + 1]));
        if (!rows.empty() && row.size() != rows.front().size())
            throw ConfigError(path + ": ragged rows");
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXcd m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    return m;
}

void write_far_field_csv(const std::string& path, const FarField& ff) {
    std::ofstream f = open_out(path);
    f << "theta,re,im,abs2\n";
    for (std::size_t i = 0; i < ff.theta.size(); ++i) {
        const cplx a = ff.amplitude(static_cast<Eigen::Index>(i));
        f << format_double(ff.theta[i]) << ',' << format_double(a.real()) << ','
          << format_double(a.imag()) << ',' << format_double(std::norm(a))
          << '\n';
    }
    finish(f, path);
}

} // namespace helmscat
