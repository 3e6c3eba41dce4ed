#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tomo {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Regular 3D grid with physical voxel size. Lengths are in nm project-wide.
/// Voxel index (i,j,k) maps to the physical point origin + (index + 0.5) * voxel_size
/// (voxel-center convention); `origin` is the lower corner of the box.
/// Data is stored x-fastest, matching MRC section order.
template <typename T>
class Grid3T {
public:
    Grid3T() = default;
    Grid3T(int nx, int ny, int nz, double voxel_size, Vec3 origin = {0, 0, 0}, T fill = T{})
        : nx_(nx), ny_(ny), nz_(nz), voxel_size_(voxel_size), origin_(origin),
          data_(static_cast<size_t>(nx) * ny * nz, fill) {
        if (nx <= 0 || ny <= 0 || nz <= 0)
            throw std::invalid_argument("Grid3: dims must be positive");
        if (!(voxel_size > 0))
            throw std::invalid_argument("Grid3: voxel_size must be positive");
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    size_t size() const { return data_.size(); }
    double voxel_size() const { return voxel_size_; }
    const Vec3& origin() const { return origin_; }
    void set_origin(const Vec3& o) { origin_ = o; }
    void set_voxel_size(double h) {
        if (!(h > 0)) throw std::invalid_argument("Grid3: voxel_size must be positive");
        voxel_size_ = h;
    }

    T& at(int i, int j, int k) { return data_[index(i, j, k)]; }
    const T& at(int i, int j, int k) const { return data_[index(i, j, k)]; }
    T& operator[](size_t n) { return data_[n]; }
    const T& operator[](size_t n) const { return data_[n]; }

    size_t index(int i, int j, int k) const {
        return static_cast<size_t>(k) * ny_ * nx_ + static_cast<size_t>(j) * nx_ + i;
    }
    bool contains(int i, int j, int k) const {
        return i >= 0 && i < nx_ && j >= 0 && j < ny_ && k >= 0 && k < nz_;
    }

    Vec3 voxel_center(int i, int j, int k) const {
        return {origin_[0] + (i + 0.5) * voxel_size_,
                origin_[1] + (j + 0.5) * voxel_size_,
                origin_[2] + (k + 0.5) * voxel_size_};
    }
    /// Physical center of the whole box.
    Vec3 box_center() const {
        return {origin_[0] + 0.5 * nx_ * voxel_size_,
                origin_[1] + 0.5 * ny_ * voxel_size_,
                origin_[2] + 0.5 * nz_ * voxel_size_};
    }
    Vec3 extent() const { return {nx_ * voxel_size_, ny_ * voxel_size_, nz_ * voxel_size_}; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    bool same_shape(const Grid3T& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && nz_ == o.nz_;
    }

private:
    int nx_ = 0, ny_ = 0, nz_ = 0;
    double voxel_size_ = 1.0;
    Vec3 origin_{0, 0, 0};
    std::vector<T> data_;
};

using Grid3 = Grid3T<double>;
using ComplexGrid3 = Grid3T<std::complex<double>>;
using IntGrid3 = Grid3T<int32_t>;

enum class PasteMode { Add, Replace };

/// Block-mean downsampling. Each output voxel is the mean of the factor^3 input
/// block (factor^2 for single-slice slabs); voxel_size is multiplied by factor.
Grid3 bin(const Grid3& g, int factor);

/// Copy `sub` into `into` with its voxel (0,0,0) at `offset`. Out-of-bounds pastes throw.
void paste(const Grid3& sub, Grid3& into, std::array<int, 3> offset, PasteMode mode);

double min_value(const Grid3& g);
double max_value(const Grid3& g);
double mean_value(const Grid3& g);
/// Population variance over all voxels.
double variance(const Grid3& g);

}  // namespace tomo
