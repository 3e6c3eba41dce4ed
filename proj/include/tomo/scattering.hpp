#pragma once

#include <array>
#include <map>
#include <string>

namespace tomo {

/// Five-Gaussian elastic scattering parameterization of one element plus its
/// Van der Waals radius. f(s) = sum_i a_i exp(-b_i s^2), a in angstrom,
/// b in angstrom^2, vdw_radius in angstrom.
struct ElementFactors {
    std::array<double, 5> a{};
    std::array<double, 5> b{};
    double vdw_radius = 1.5;
};

class ScatteringTable {
public:
    static ScatteringTable load(const std::string& path);
    /// Bundled table from the data directory.
    static const ScatteringTable& bundled();

    bool covers(const std::string& element) const { return table_.count(element) > 0; }
    const ElementFactors& factors(const std::string& element) const;

    /// Real-space electrostatic potential of one atom at distance r_A
    /// (angstrom), in volts: the 3D Fourier pair of the factor parameterization,
    /// V(r) = C sum_i a_i (4 pi / b_i)^{3/2} exp(-4 pi^2 r^2 / b_i)
    /// with C = h^2 / (2 pi m0 e) = 47.878 V A^2.
    double potential(const std::string& element, double r_A) const;

    size_t size() const { return table_.size(); }

private:
    std::map<std::string, ElementFactors> table_;
};

/// Per-material absorption-potential constants (dimensionless inelastic
/// scattering fractions), loaded from absorption_constants.txt.
class AbsorptionConstants {
public:
    static AbsorptionConstants load(const std::string& path);
    static const AbsorptionConstants& bundled();

    double value(const std::string& kind) const;

private:
    std::map<std::string, double> table_;
};

}  // namespace tomo
