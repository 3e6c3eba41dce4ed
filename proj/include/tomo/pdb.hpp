#pragma once

#include <string>
#include <vector>

namespace tomo {

/// One atom from a structure file. Coordinates in angstrom.
struct AtomRecord {
    std::string element;
    double x = 0, y = 0, z = 0;
    double occupancy = 1.0;
};

struct ParseOptions {
    bool filter_solvent = true;  // drop HOH/WAT/DOD residues
};

struct ParseResult {
    std::vector<AtomRecord> atoms;
    std::vector<std::string> warnings;          // empty file, odd records
    std::vector<std::string> unknown_elements;  // symbols not in the scattering table scope
};

/// Parse PDB fixed-column ATOM/HETATM records, or the simple XYZ fallback
/// ("element x y z" per line, '#' comments). The format is auto-detected from
/// the record names. Malformed coordinate fields raise with the line number.
ParseResult parse_structure(const std::string& text, const ParseOptions& opt = {});

}  // namespace tomo
