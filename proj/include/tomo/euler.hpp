#pragma once

#include <array>
#include <cmath>

#include "tomo/grid.hpp"

namespace tomo {

inline constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Row-major 3x3 rotation matrix.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double operator()(int r, int c) const { return m[r * 3 + c]; }
    double& operator()(int r, int c) { return m[r * 3 + c]; }

    Vec3 apply(const Vec3& v) const {
        return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
                m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
                m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
    }
    Mat3 transposed() const {
        Mat3 t;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
        return t;
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 p;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += (*this)(r, k) * o(k, c);
                p(r, c) = s;
            }
        return p;
    }
    double trace() const { return m[0] + m[4] + m[8]; }
};

Mat3 rot_x(double rad);
Mat3 rot_y(double rad);
Mat3 rot_z(double rad);

/// Intrinsic Z-X-Z Euler angles in degrees: R = Rz(phi) * Rx(theta) * Rz(psi).
struct EulerZXZ {
    double phi = 0.0;
    double theta = 0.0;
    double psi = 0.0;

    Mat3 matrix() const;
    EulerZXZ inverse() const { return {-psi, -theta, -phi}; }
};

EulerZXZ euler_from_matrix(const Mat3& r);

/// Tilt by `deg` about the y axis, expressed in the ZXZ convention.
EulerZXZ tilt_about_y(double deg);

/// Unit quaternion (w, x, y, z) -> rotation matrix.
Mat3 quat_to_matrix(double w, double x, double y, double z);

/// Angle of the rotation in degrees, from the matrix trace.
double rotation_angle_deg(const Mat3& r);

/// Max absolute elementwise difference between two matrices.
double matrix_distance(const Mat3& a, const Mat3& b);

}  // namespace tomo
