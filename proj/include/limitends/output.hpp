#pragma once

// Artifact writers: OBJ meshes, CSV tables, and the shared float/hash conventions.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "limitends/graph_solver.hpp"

namespace limitends {

inline constexpr const char* kToolName = "limitends";
inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest decimal string that reads back to the same double; "nan", "inf", "-inf".
std::string format_double(double v);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t h);

struct Provenance {
    std::string command;
    std::string config_hash;
};

/// One comment line "# limitends <version> <command> config=<hash>".
std::string provenance_line(const Provenance& p, std::string_view comment = "#");

struct ObjOptions {
    bool mirrored = false;  // append the copy with u -> -u (reversed faces)
    bool disk = false;      // map (x, y) to the Poincare disk
    /// Per-vertex scalar used for vertex colours (e.g. h*); empty for none.
    std::vector<double> color;
};

void write_obj(std::ostream& os, const TriMesh& mesh, const std::vector<double>& height, const Provenance& prov,
               const ObjOptions& opt = {});

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(std::ostream& os, const CsvTable& table, const Provenance& prov);

}  // namespace limitends
