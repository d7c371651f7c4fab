#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "strbill/classification.hpp"
#include "strbill/dynamics.hpp"
#include "strbill/verification.hpp"

namespace strbill {

// Structured (JSON) and plain-text renderings of run results. Structured
// output depends only on inputs and seeds: wall times are left out and the
// key order is fixed, so equal runs give byte-identical documents.

std::string to_json(const VerifyReport& r);
std::string to_json(const std::vector<VerifyReport>& reports);
std::string to_json(const Trajectory& t);
std::string to_json(const PointClass& c);
std::string to_json(const RegionScan& s);
std::string to_json(const IlluminationMap& m);

std::string to_text(const Trajectory& t);
std::string to_text(const PointClass& c);
std::string to_text(const RegionScan& s);
std::string to_text(const IlluminationMap& m);

// FNV-1a over the little-endian bytes of the visit counts.
std::uint64_t counts_digest(const std::vector<std::uint32_t>& counts);

}  // namespace strbill
