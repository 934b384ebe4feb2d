#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace aegis {

/// Pipe-delimited table lifted out of free text. Every row has exactly
/// header-width cells; mis-sized rows are rejected into diagnostics.
struct MarkdownTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;  // 1-based source line per kept row
    std::size_t start_line = 0;          // 1-based line span in the source text
    std::size_t end_line = 0;

    std::size_t width() const { return header.size(); }
};

struct ParseDiagnostic {
    std::string location;  // "line 12" or "table 2 row 3"
    std::string message;
};

struct ParseReport {
    std::size_t tables_found = 0;
    std::size_t rows_parsed = 0;
    std::size_t rows_rejected = 0;
    std::vector<ParseDiagnostic> diagnostics;

    void merge(const ParseReport& other);
};

/// Finds every pipe table with a header row followed by a delimiter row
/// (|---|---|). Leading/trailing pipes and cell padding are tolerated;
/// "\|" escapes a literal pipe inside a cell. Total over any input.
std::vector<MarkdownTable> extract_tables(const std::string& text, ParseReport& report);

/// Canonical text form: "| a | b |" rows with a "| --- |" delimiter.
/// extract_tables(render_table(t)) reproduces t for normalized tables.
std::string render_table(const MarkdownTable& table);

}  // namespace aegis
