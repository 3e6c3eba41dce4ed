#pragma once

#include "tomo/grid.hpp"

namespace tomo {

/// Geometric descriptors of a thresholded particle volume. Units nm/nm^2/nm^3.
struct ShapeDescriptors {
    double volume = 0;       // voxel count above threshold x voxel volume
    double area = 0;         // triangulated isosurface area
    double sphericity = 0;   // pi^(1/3) (6V)^(2/3) / A
    double eff_radius = 0;   // 3V / A
    double weight_kDa = 0;   // metadata, not derived from the grid
};

/// Sphericity from volume (nm^3) and area (nm^2).
double sphericity(double volume, double area);
/// Radius of the sphere with the same surface-to-volume ratio.
double effective_radius(double volume, double area);

/// Descriptors of the density blob above `threshold` (applied to the grid
/// normalized to unit maximum). Volume counts voxels above threshold; the area
/// comes from a linear-interpolation isosurface triangulated per tetrahedron,
/// closed at the grid boundary. Raises if nothing exceeds the threshold.
ShapeDescriptors shape_descriptors(const Grid3& g, double threshold = 0.5);

/// Isosurface area of `g` at `level` in physical units (no normalization).
double isosurface_area(const Grid3& g, double level);

}  // namespace tomo
