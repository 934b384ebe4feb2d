#include "aegis/tables.hpp"

#include "aegis/util.hpp"

namespace aegis {

namespace {

bool is_table_line(const std::string& line) {
    const std::string t = util::trim(line);
    return !t.empty() && t.find('|') != std::string::npos;
}

// Splits a table line on unescaped pipes, dropping the empty edge cells a
// leading/trailing pipe produces. "\|" becomes a literal pipe.
std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string current;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\\' && i + 1 < line.size() && line[i + 1] == '|') {
            current.push_back('|');
            ++i;
        } else if (line[i] == '|') {
            cells.push_back(util::trim(current));
            current.clear();
        } else {
            current.push_back(line[i]);
        }
    }
    cells.push_back(util::trim(current));
    if (!cells.empty() && cells.front().empty()) cells.erase(cells.begin());
    if (!cells.empty() && cells.back().empty()) cells.pop_back();
    return cells;
}

bool is_delimiter_row(const std::vector<std::string>& cells) {
    if (cells.empty()) return false;
    for (const auto& cell : cells) {
        if (cell.size() < 1) return false;
        for (char c : cell) {
            if (c != '-' && c != ':') return false;
        }
        if (cell.find('-') == std::string::npos) return false;
    }
    return true;
}

std::string escape_cell(const std::string& cell) {
    std::string out;
    out.reserve(cell.size());
    for (char c : cell) {
        if (c == '|') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

void ParseReport::merge(const ParseReport& other) {
    tables_found += other.tables_found;
    rows_parsed += other.rows_parsed;
    rows_rejected += other.rows_rejected;
    diagnostics.insert(diagnostics.end(), other.diagnostics.begin(), other.diagnostics.end());
}

std::vector<MarkdownTable> extract_tables(const std::string& text, ParseReport& report) {
    std::vector<MarkdownTable> tables;
    const auto lines = util::split_lines(text);

    std::size_t i = 0;
    while (i < lines.size()) {
        if (!is_table_line(lines[i]) || i + 1 >= lines.size() || !is_table_line(lines[i + 1])) {
            ++i;
            continue;
        }
        const auto header = split_cells(lines[i]);
        const auto delimiter = split_cells(lines[i + 1]);
        if (header.empty() || !is_delimiter_row(delimiter)) {
            ++i;
            continue;
        }
        if (delimiter.size() != header.size()) {
            report.diagnostics.push_back(
                {"line " + std::to_string(i + 2),
                 "delimiter width " + std::to_string(delimiter.size()) +
                     " does not match header width " + std::to_string(header.size())});
            ++i;
            continue;
        }

        MarkdownTable table;
        table.header = header;
        table.start_line = i + 1;
        std::size_t j = i + 2;
        for (; j < lines.size() && is_table_line(lines[j]); ++j) {
            auto cells = split_cells(lines[j]);
            if (cells.size() == table.width()) {
                table.rows.push_back(std::move(cells));
                table.row_lines.push_back(j + 1);
                ++report.rows_parsed;
            } else {
                ++report.rows_rejected;
                report.diagnostics.push_back(
                    {"line " + std::to_string(j + 1),
                     "row has " + std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(table.width())});
            }
        }
        table.end_line = j;
        ++report.tables_found;
        tables.push_back(std::move(table));
        i = j;
    }
    return tables;
}

std::string render_table(const MarkdownTable& table) {
    std::string out;
    auto render_row = [&out](const std::vector<std::string>& cells) {
        out.push_back('|');
        for (const auto& cell : cells) {
            out.push_back(' ');
            out += escape_cell(cell);
            out += " |";
        }
        out.push_back('\n');
    };
    render_row(table.header);
    out.push_back('|');
    for (std::size_t i = 0; i < table.width(); ++i) out += " --- |";
    out.push_back('\n');
    for (const auto& row : table.rows) render_row(row);
    return out;
}

}  // namespace aegis
