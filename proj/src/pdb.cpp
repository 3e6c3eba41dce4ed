#include "tomo/pdb.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace tomo {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string capitalize_symbol(std::string s) {
    if (s.empty()) return s;
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    for (size_t i = 1; i < s.size(); ++i)
        s[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
    return s;
}

double parse_coord(const std::string& field, int line_no, const char* what) {
    const std::string t = trim(field);
    try {
        size_t pos = 0;
        const double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("parse_structure: malformed " + std::string(what) +
                                 " field '" + t + "' on line " + std::to_string(line_no));
    }
}

std::string column(const std::string& line, size_t start1, size_t end1) {
    // 1-based inclusive PDB column range
    if (line.size() < start1) return "";
    return line.substr(start1 - 1, std::min(end1, line.size()) - start1 + 1);
}

/// Element from the atom-name columns when 77-78 are absent: skip leading
/// digits, take the leading alphabetic run; two-letter symbols (FE, AU, ...)
/// occupy column 13, one-letter names start at 14.
std::string element_from_name(const std::string& name_field) {
    std::string s = trim(name_field);
    size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    std::string alpha;
    while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) alpha += s[i++];
    if (alpha.empty()) return "";
    // A name flush at column 13 (no leading space in the raw field) is a
    // two-letter element; otherwise single letter.
    if (!name_field.empty() && name_field[0] != ' ' && alpha.size() >= 2)
        return capitalize_symbol(alpha.substr(0, 2));
    return capitalize_symbol(alpha.substr(0, 1));
}

bool looks_like_pdb(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("ATOM", 0) == 0 || line.rfind("HETATM", 0) == 0 ||
            line.rfind("HEADER", 0) == 0 || line.rfind("REMARK", 0) == 0 ||
            line.rfind("CRYST1", 0) == 0)
            return true;
    }
    return false;
}

ParseResult parse_xyz(const std::string& text) {
    ParseResult res;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ls(t);
        std::string sym;
        std::string xs, ys, zs;
        ls >> sym >> xs >> ys >> zs;
        if (sym.empty() || zs.empty())
            throw std::runtime_error("parse_structure: incomplete xyz line " +
                                     std::to_string(line_no));
        AtomRecord a;
        a.element = capitalize_symbol(sym);
        a.x = parse_coord(xs, line_no, "x");
        a.y = parse_coord(ys, line_no, "y");
        a.z = parse_coord(zs, line_no, "z");
        res.atoms.push_back(a);
    }
    return res;
}

}  // namespace

ParseResult parse_structure(const std::string& text, const ParseOptions& opt) {
    if (trim(text).empty()) {
        ParseResult res;
        res.warnings.push_back("empty structure file");
        return res;
    }
    if (!looks_like_pdb(text)) return parse_xyz(text);

    ParseResult res;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const bool is_atom = line.rfind("ATOM", 0) == 0 && line.rfind("ATOMS", 0) != 0;
        const bool is_het = line.rfind("HETATM", 0) == 0;
        if (!is_atom && !is_het) continue;

        const std::string res_name = trim(column(line, 18, 20));
        if (opt.filter_solvent && (res_name == "HOH" || res_name == "WAT" || res_name == "DOD"))
            continue;
        // altLoc: keep blank or 'A' conformers only
        const std::string alt = column(line, 17, 17);
        if (!alt.empty() && alt != " " && alt != "A") continue;

        AtomRecord a;
        a.x = parse_coord(column(line, 31, 38), line_no, "x");
        a.y = parse_coord(column(line, 39, 46), line_no, "y");
        a.z = parse_coord(column(line, 47, 54), line_no, "z");
        const std::string occ = trim(column(line, 55, 60));
        if (!occ.empty()) a.occupancy = parse_coord(occ, line_no, "occupancy");

        std::string elem = trim(column(line, 77, 78));
        // strip charge digits like "C1+" and normalize case
        elem.erase(std::remove_if(elem.begin(), elem.end(),
                                  [](unsigned char c) { return !std::isalpha(c); }),
                   elem.end());
        if (elem.empty()) elem = element_from_name(column(line, 13, 16));
        if (elem.empty()) {
            res.warnings.push_back("line " + std::to_string(line_no) +
                                   ": element could not be determined, record kept as 'X'");
            elem = "X";
        }
        a.element = capitalize_symbol(elem);
        res.atoms.push_back(a);
    }
    if (res.atoms.empty()) res.warnings.push_back("no atom records found");
    return res;
}

}  // namespace tomo
