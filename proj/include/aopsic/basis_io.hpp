#pragma once

#include <map>
#include <string>

#include "aopsic/orthopoly.hpp"

namespace aopsic {

/// MCS identifier -> precomputed basis.
using McsLut = std::map<std::string, OrthonormalBasis>;

// Document layout: {family, P, effective_rank, coeffs, moments}.
std::string basis_to_json(const OrthonormalBasis& basis, int indent = 2);
OrthonormalBasis basis_from_json(const std::string& text);

std::string lut_to_json(const McsLut& lut, int indent = 2);

/// Parses and validates every entry (unit norm under its own moments).
McsLut lut_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace aopsic
