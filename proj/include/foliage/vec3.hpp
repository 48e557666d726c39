#pragma once

#include <array>
#include <cmath>

namespace foliage {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

/// Returns v scaled to unit length; the zero vector is returned unchanged.
inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    return n > 0.0 ? v / n : v;
}

/// Row-major 3x3 matrix; just enough for the rigid placements used here.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    static Mat3 identity() { return Mat3{}; }

    /// Rotation by `angle` radians about a unit axis (Rodrigues form).
    static Mat3 axis_angle(const Vec3& axis, double angle) {
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        const double t = 1.0 - c;
        const double x = axis.x, y = axis.y, z = axis.z;
        Mat3 r;
        r.m = {t * x * x + c,     t * x * y - s * z, t * x * z + s * y,
               t * x * y + s * z, t * y * y + c,     t * y * z - s * x,
               t * x * z - s * y, t * y * z + s * x, t * z * z + c};
        return r;
    }

    static Mat3 rotation_z(double angle) { return axis_angle({0, 0, 1}, angle); }

    /// Minimal rotation carrying unit vector `from` onto unit vector `to`.
    static Mat3 rotation_between(const Vec3& from, const Vec3& to) {
        const Vec3 axis = cross(from, to);
        const double s = norm(axis);
        const double c = dot(from, to);
        if (s < 1e-12) {
            if (c > 0.0) return identity();
            // Antiparallel: rotate half a turn about any perpendicular axis.
            Vec3 perp = std::abs(from.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
            perp = normalized(perp - from * dot(perp, from));
            return axis_angle(perp, std::acos(-1.0));
        }
        return axis_angle(axis / s, std::atan2(s, c));
    }
};

} // namespace foliage
