#include "tomo/euler.hpp"

#include <algorithm>

namespace tomo {

Mat3 rot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r.m = {1, 0, 0, 0, c, -s, 0, s, c};
    return r;
}

Mat3 rot_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r.m = {c, 0, s, 0, 1, 0, -s, 0, c};
    return r;
}

Mat3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
    return r;
}

Mat3 EulerZXZ::matrix() const {
    return rot_z(deg2rad(phi)) * rot_x(deg2rad(theta)) * rot_z(deg2rad(psi));
}

EulerZXZ euler_from_matrix(const Mat3& r) {
    // R = Rz(phi) Rx(theta) Rz(psi); r(2,2) = cos(theta).
    const double ct = std::clamp(r(2, 2), -1.0, 1.0);
    const double theta = std::acos(ct);
    double phi, psi;
    if (std::abs(ct) > 1.0 - 1e-12) {
        // Gimbal lock: only phi -+ psi is determined; put it all in phi.
        psi = 0.0;
        phi = std::atan2(r(1, 0), r(0, 0));
    } else {
        phi = std::atan2(r(0, 2), -r(1, 2));
        psi = std::atan2(r(2, 0), r(2, 1));
    }
    return {rad2deg(phi), rad2deg(theta), rad2deg(psi)};
}

EulerZXZ tilt_about_y(double deg) { return {90.0, deg, -90.0}; }

Mat3 quat_to_matrix(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n; x /= n; y /= n; z /= n;
    Mat3 r;
    r.m = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
           2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
           2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
    return r;
}

double rotation_angle_deg(const Mat3& r) {
    const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
    return rad2deg(std::acos(c));
}

double matrix_distance(const Mat3& a, const Mat3& b) {
    double d = 0.0;
    for (int i = 0; i < 9; ++i) d = std::max(d, std::abs(a.m[i] - b.m[i]));
    return d;
}

}  // namespace tomo
