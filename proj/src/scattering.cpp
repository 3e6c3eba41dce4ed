#include "tomo/scattering.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tomo/datadir.hpp"

namespace tomo {

namespace {
constexpr double kPotentialPrefactor = 47.878;  // h^2 / (2 pi m0 e), V A^2
}

ScatteringTable ScatteringTable::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("ScatteringTable: cannot open " + path);
    ScatteringTable t;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string sym;
        ElementFactors ef;
        ls >> sym;
        for (auto& v : ef.a) ls >> v;
        for (auto& v : ef.b) ls >> v;
        ls >> ef.vdw_radius;
        if (!ls) throw std::runtime_error("ScatteringTable: malformed row '" + line + "'");
        for (int i = 0; i < 5; ++i)
            if (!(ef.a[i] > 0) || !(ef.b[i] > 0))
                throw std::runtime_error("ScatteringTable: non-positive factor for " + sym);
        t.table_[sym] = ef;
    }
    if (t.table_.empty()) throw std::runtime_error("ScatteringTable: empty table " + path);
    return t;
}

const ScatteringTable& ScatteringTable::bundled() {
    static const ScatteringTable t = load(data_file("scattering_factors.txt"));
    return t;
}

const ElementFactors& ScatteringTable::factors(const std::string& element) const {
    auto it = table_.find(element);
    if (it == table_.end())
        throw std::runtime_error("ScatteringTable: unknown element '" + element + "'");
    return it->second;
}

double ScatteringTable::potential(const std::string& element, double r_A) const {
    const ElementFactors& ef = factors(element);
    const double r2 = r_A * r_A;
    double v = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double w = 4.0 * M_PI / ef.b[i];
        v += ef.a[i] * w * std::sqrt(w) * std::exp(-4.0 * M_PI * M_PI * r2 / ef.b[i]);
    }
    return kPotentialPrefactor * v;
}

AbsorptionConstants AbsorptionConstants::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("AbsorptionConstants: cannot open " + path);
    AbsorptionConstants c;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kind;
        double v;
        ls >> kind >> v;
        if (!ls) throw std::runtime_error("AbsorptionConstants: malformed row '" + line + "'");
        c.table_[kind] = v;
    }
    return c;
}

const AbsorptionConstants& AbsorptionConstants::bundled() {
    static const AbsorptionConstants c = load(data_file("absorption_constants.txt"));
    return c;
}

double AbsorptionConstants::value(const std::string& kind) const {
    auto it = table_.find(kind);
    if (it == table_.end())
        throw std::runtime_error("AbsorptionConstants: unknown material '" + kind + "'");
    return it->second;
}

}  // namespace tomo
