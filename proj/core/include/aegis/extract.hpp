#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aegis/domain.hpp"
#include "aegis/tables.hpp"
#include "aegis/validation.hpp"

namespace aegis {

/// Lifts every recognizable table out of the stage outputs (pipeline order,
/// oldest first) and coerces rows into domain artifacts. Tables classify by
/// header fingerprint; cells that fail to coerce fall back to safe defaults
/// with a diagnostic, so imperfect model output still reaches the validator.
/// report is filled either way; UnparsedError is thrown when no table
/// classifies at all, with the diagnostics already in report.
WorkProduct extract_workproduct(
    const std::vector<std::pair<std::string, std::string>>& stage_outputs,
    const ValidationConfig& config, ParseReport& report);

/// "50 ms" -> 50, "2 s" -> 2000, bare "120" -> 120 (ms assumed).
/// nullopt for empty or unparseable cells.
std::optional<std::int64_t> parse_ftti_cell(const std::string& cell);

/// Splits on commas/semicolons/whitespace, then sorts and dedupes.
std::vector<std::string> split_id_list(const std::string& cell);

/// Splits on <br> variants and semicolons, stripping "1." / "-" prefixes.
/// A separator-free cell becomes a single step.
std::vector<std::string> split_steps(const std::string& cell);

}  // namespace aegis
