#ifndef HELMSCAT_COMMON_HPP
#define HELMSCAT_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace helmscat {

using cplx = std::complex<double>;

constexpr double pi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const;
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace helmscat

#endif
