#include "tomo/mrc.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tomo {

namespace {

struct MrcHeader {
    int32_t nx = 0, ny = 0, nz = 0;
    int32_t mode = 2;
    int32_t nxstart = 0, nystart = 0, nzstart = 0;
    int32_t mx = 0, my = 0, mz = 0;
    float cella[3] = {0, 0, 0};
    float cellb[3] = {90, 90, 90};
    int32_t mapc = 1, mapr = 2, maps = 3;
    float dmin = 0, dmax = 0, dmean = 0;
    int32_t ispg = 1;
    int32_t nsymbt = 0;
    char extra[8] = {0};
    char exttyp[4] = {0};
    int32_t nversion = 20140;
    char extra2[84] = {0};
    float origin[3] = {0, 0, 0};
    char map[4] = {'M', 'A', 'P', ' '};
    unsigned char machst[4] = {0x44, 0x44, 0x00, 0x00};
    float rms = 0;
    int32_t nlabl = 0;
    char labels[800] = {0};
};
static_assert(sizeof(MrcHeader) == 1024, "MRC header must be 1024 bytes");

void write_volume(const float* data, size_t n, int nx, int ny, int nz, double voxel_nm,
                  const Vec3& origin_nm, int ispg, const std::string& path) {
    MrcHeader h;
    h.nx = nx;
    h.ny = ny;
    h.nz = nz;
    h.mx = nx;
    h.my = ny;
    h.mz = nz;
    const float apix = static_cast<float>(voxel_nm * 10.0);  // nm -> angstrom
    h.cella[0] = apix * nx;
    h.cella[1] = apix * ny;
    h.cella[2] = apix * nz;
    h.ispg = ispg;
    for (int a = 0; a < 3; ++a) h.origin[a] = static_cast<float>(origin_nm[a] * 10.0);

    double sum = 0, sum2 = 0;
    float mn = data[0], mx2 = data[0];
    for (size_t i = 0; i < n; ++i) {
        mn = std::min(mn, data[i]);
        mx2 = std::max(mx2, data[i]);
        sum += data[i];
        sum2 += static_cast<double>(data[i]) * data[i];
    }
    h.dmin = mn;
    h.dmax = mx2;
    h.dmean = static_cast<float>(sum / static_cast<double>(n));
    const double var = sum2 / static_cast<double>(n) - (sum / n) * (sum / n);
    h.rms = static_cast<float>(var > 0 ? std::sqrt(var) : 0.0);
    h.nlabl = 1;
    std::memcpy(h.labels, "tomosim", 7);

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_mrc: cannot open " + path);
    f.write(reinterpret_cast<const char*>(&h), sizeof(h));
    f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * 4));
    if (!f) throw std::runtime_error("write_mrc: write failed for " + path);
}

MrcHeader read_header(std::ifstream& f, const std::string& path) {
    MrcHeader h;
    f.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (!f) throw std::runtime_error("read_mrc: truncated header in " + path);
    if (std::memcmp(h.map, "MAP ", 4) != 0)
        throw std::runtime_error("read_mrc: missing MAP tag in " + path);
    if (h.machst[0] != 0x44)
        throw std::runtime_error("read_mrc: big-endian files are not supported: " + path);
    if (h.mode != 2)
        throw std::runtime_error("read_mrc: only mode 2 is supported, got mode " +
                                 std::to_string(h.mode) + " in " + path);
    if (h.nx <= 0 || h.ny <= 0 || h.nz <= 0)
        throw std::runtime_error("read_mrc: bad dims in " + path);
    return h;
}

std::vector<float> read_sections(std::ifstream& f, const MrcHeader& h, const std::string& path) {
    f.seekg(1024 + h.nsymbt, std::ios::beg);
    const size_t n = static_cast<size_t>(h.nx) * h.ny * h.nz;
    std::vector<float> buf(n);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 4));
    if (!f) throw std::runtime_error("read_mrc: truncated data in " + path);
    return buf;
}

double voxel_nm_of(const MrcHeader& h) {
    const double mx = h.mx > 0 ? h.mx : h.nx;
    return (h.cella[0] > 0 ? h.cella[0] / mx : 1.0) / 10.0;
}

}  // namespace

void write_mrc(const Grid3& g, const std::string& path) {
    std::vector<float> buf(g.size());
    for (size_t i = 0; i < g.size(); ++i) buf[i] = static_cast<float>(g[i]);
    write_volume(buf.data(), buf.size(), g.nx(), g.ny(), g.nz(), g.voxel_size(), g.origin(),
                 g.nz() > 1 ? 1 : 0, path);
}

Grid3 read_mrc(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_mrc: cannot open " + path);
    const MrcHeader h = read_header(f, path);
    const auto buf = read_sections(f, h, path);
    Grid3 g(h.nx, h.ny, h.nz, voxel_nm_of(h),
            {h.origin[0] / 10.0, h.origin[1] / 10.0, h.origin[2] / 10.0});
    for (size_t i = 0; i < buf.size(); ++i) g[i] = buf[i];
    return g;
}

void write_mrc_stack(const std::vector<Grid3>& slabs, const std::string& path) {
    if (slabs.empty()) throw std::invalid_argument("write_mrc_stack: empty stack");
    const int nx = slabs[0].nx(), ny = slabs[0].ny();
    std::vector<float> buf;
    buf.reserve(static_cast<size_t>(nx) * ny * slabs.size());
    for (const auto& s : slabs) {
        if (s.nx() != nx || s.ny() != ny || s.nz() != 1)
            throw std::invalid_argument("write_mrc_stack: inconsistent slab dims");
        for (size_t i = 0; i < s.size(); ++i) buf.push_back(static_cast<float>(s[i]));
    }
    write_volume(buf.data(), buf.size(), nx, ny, static_cast<int>(slabs.size()),
                 slabs[0].voxel_size(), slabs[0].origin(), 0, path);
}

std::vector<Grid3> read_mrc_stack(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_mrc: cannot open " + path);
    const MrcHeader h = read_header(f, path);
    const auto buf = read_sections(f, h, path);
    std::vector<Grid3> slabs;
    const size_t plane = static_cast<size_t>(h.nx) * h.ny;
    for (int k = 0; k < h.nz; ++k) {
        Grid3 s(h.nx, h.ny, 1, voxel_nm_of(h),
                {h.origin[0] / 10.0, h.origin[1] / 10.0, h.origin[2] / 10.0});
        for (size_t i = 0; i < plane; ++i) s[i] = buf[k * plane + i];
        slabs.push_back(std::move(s));
    }
    return slabs;
}

void write_mrc_labels(const IntGrid3& g, const std::string& path) {
    std::vector<float> buf(g.size());
    for (size_t i = 0; i < g.size(); ++i) buf[i] = static_cast<float>(g[i]);
    write_volume(buf.data(), buf.size(), g.nx(), g.ny(), g.nz(), g.voxel_size(), g.origin(), 1,
                 path);
}

IntGrid3 read_mrc_labels(const std::string& path) {
    const Grid3 g = read_mrc(path);
    IntGrid3 out(g.nx(), g.ny(), g.nz(), g.voxel_size(), g.origin());
    for (size_t i = 0; i < g.size(); ++i) out[i] = static_cast<int32_t>(std::lround(g[i]));
    return out;
}

}  // namespace tomo
