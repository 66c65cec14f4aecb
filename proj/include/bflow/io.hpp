#pragma once

#include <string>

#include "bflow/sections.hpp"

namespace bflow {

/// Reads a basis file with schema
///   {"k": int, "coeffs": [[{"re": x, "im": y}, …], …]}
/// where row α holds the coordinates of the α-th section over the
/// weighted-monomial reference frame. Missing keys, malformed JSON, or a
/// shape that does not match k raise InputError; ill-conditioned coefficient
/// matrices propagate BasisSingular from the basis validator.
SectionBasis read_basis(const std::string& path);

/// Writes the basis in the same JSON schema. Round-trips exactly (numbers
/// are emitted with shortest round-trip precision).
void write_basis(const std::string& path, const SectionBasis& b);

/// Shortest-width decimal representation that round-trips a double (%.17g).
std::string fmt_double(double v);

/// UTC timestamp, e.g. 2026-08-15T12:00:00Z. Reports isolate it to a single
/// line/key so byte-comparisons can drop it.
std::string iso_timestamp();

/// Whole-file read/write; failures raise InputError (treated as a validation
/// problem by the command-line tool).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bflow
