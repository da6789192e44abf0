#pragma once

// On-disk formats.
//
// FamilyFile: JSON object with keys in the fixed order layout, unitaries,
// metadata. Each unitary is an array of rows, each entry a [real, imaginary]
// pair printed with 17 significant digits, in the canonical ordering (code
// space first). Serializing a loaded file reproduces it byte for byte.
//
// Matrix files (states and attack operators): JSON object with keys kind,
// dim, matrix, using the same entry encoding.
//
// SweepFile: CSV with the fixed header
// s,overlap,optimal_p_forge,commutant_dimension,p_unitary_block_bound
// and an empty last field where no block bound applies.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qauth/family.hpp"
#include "qauth/protocol.hpp"

namespace qauth {

inline constexpr const char* kToolVersion = "0.1.0";

struct FamilyMetadata {
  std::string kind;
  std::optional<std::uint64_t> seed;
  std::string seed_schedule;
  std::string tool_version = kToolVersion;
};

struct FamilyFile {
  CodingSet family;
  FamilyMetadata metadata;
};

/// Throws qauth::Error (DomainError/DimensionError/LayoutError) on malformed
/// content or when the decoded family violates CodingSet invariants.
FamilyFile parse_family(const std::string& text,
                        const Tolerances& tol = Tolerances{});
std::string format_family(const CodingSet& family, const FamilyMetadata& meta);

struct MatrixFile {
  std::string kind;  // "state" or "operator"
  ComplexMatrix matrix;
};

MatrixFile parse_matrix_file(const std::string& text);
std::string format_matrix_file(const std::string& kind, const ComplexMatrix& m);

std::string format_sweep_csv(const std::vector<SweepPoint>& points);

/// Whole-file helpers; throw qauth::Error when the file cannot be read or
/// written.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qauth
