#include "aegis/extract.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

#include "aegis/errors.hpp"
#include "aegis/util.hpp"

namespace aegis {

namespace {

/// Header cells and schema aliases meet on this form: lowercase with
/// punctuation folded to single spaces, so "FTTI (ms)" matches "ftti ms".
std::string normalize_header(const std::string& raw) {
    std::string out;
    bool pending_space = false;
    for (char ch : raw) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else {
            pending_space = true;
        }
    }
    return out;
}

bool is_none_marker(const std::string& cell) {
    const std::string t = util::to_lower(util::trim(cell));
    return t.empty() || t == "-" || t == "n/a" || t == "na" || t == "none";
}

/// field -> header position for one classified table; -1 marks a column the
/// schema knows but the table lacks.
struct ColumnMap {
    const TableSchema* schema = nullptr;
    std::map<std::string, int> index;

    std::string cell(const std::vector<std::string>& row, const std::string& field) const {
        auto it = index.find(field);
        if (it == index.end() || it->second < 0) return "";
        return row[static_cast<std::size_t>(it->second)];
    }
};

std::optional<ColumnMap> classify_table(const MarkdownTable& table,
                                        const ValidationConfig& config) {
    std::vector<std::string> headers;
    headers.reserve(table.header.size());
    for (const auto& h : table.header) headers.push_back(normalize_header(h));

    for (const auto& schema : config.table_schemas) {
        ColumnMap map;
        map.schema = &schema;
        bool fingerprint_ok = true;
        for (const auto& col : schema.columns) {
            int found = -1;
            for (std::size_t i = 0; i < headers.size() && found < 0; ++i) {
                for (const auto& alias : col.aliases) {
                    if (headers[i] == alias) {
                        found = static_cast<int>(i);
                        break;
                    }
                }
            }
            map.index[col.field] = found;
            if (col.fingerprint && found < 0) {
                fingerprint_ok = false;
                break;
            }
        }
        if (fingerprint_ok) return map;
    }
    return std::nullopt;
}

class Extractor {
  public:
    Extractor(const ValidationConfig& config, WorkProduct& product, ParseReport& report)
        : config_(config), product_(product), report_(report) {}

    void consume(const std::string& role, const std::string& text) {
        ParseReport stage_report;
        const auto tables = extract_tables(text, stage_report);
        for (auto& diag : stage_report.diagnostics) {
            diag.location = role + ":" + diag.location;
        }
        report_.merge(stage_report);

        for (const auto& table : tables) {
            const auto map = classify_table(table, config_);
            if (!map) {
                report_.diagnostics.push_back(
                    {role + ":line " + std::to_string(table.start_line),
                     "unrecognized table with columns: " + util::join(table.header, " | ")});
                continue;
            }
            ++classified_;
            note_missing_columns(role, table, *map);
            for (std::size_t r = 0; r < table.rows.size(); ++r) {
                const std::string where =
                    role + ":line " + std::to_string(table.row_lines[r]);
                switch (map->schema->kind) {
                    case TableKind::hara: add_hazard(table.rows[r], *map, where); break;
                    case TableKind::safety_goals: add_safety_goal(table.rows[r], *map, where); break;
                    case TableKind::fsr: add_fsr(table.rows[r], *map, where); break;
                    case TableKind::test_cases: add_test_case(table.rows[r], *map, where); break;
                    case TableKind::fta_events: add_fta_event(table.rows[r], *map, where); break;
                }
            }
        }
    }

    std::size_t classified() const { return classified_; }

  private:
    void diag(const std::string& where, const std::string& message) {
        report_.diagnostics.push_back({where, message});
    }

    void note_missing_columns(const std::string& role, const MarkdownTable& table,
                              const ColumnMap& map) {
        for (const auto& col : map.schema->columns) {
            if (map.index.at(col.field) < 0) {
                diag(role + ":line " + std::to_string(table.start_line),
                     to_string(map.schema->kind) + " table missing column " + col.field);
            }
        }
    }

    template <typename Enum>
    Enum coerce(const std::string& cell, const std::string& where, const std::string& what,
                std::optional<Enum> (*parse)(const std::string&), Enum fallback) {
        const std::string t = util::trim(cell);
        if (t.empty()) return fallback;
        if (auto value = parse(t)) return *value;
        diag(where, "cannot read " + what + " value '" + t + "', using " + to_string(fallback));
        return fallback;
    }

    std::int64_t coerce_ftti(const std::string& cell, const std::string& where) {
        const std::string t = util::trim(cell);
        if (is_none_marker(t)) return 0;
        if (auto ms = parse_ftti_cell(t)) return *ms;
        diag(where, "cannot read ftti value '" + t + "', using 0");
        return 0;
    }

    void add_hazard(const std::vector<std::string>& row, const ColumnMap& map,
                    const std::string& where) {
        HazardEntry h;
        h.hazard_id = map.cell(row, "hazard_id");
        h.name = map.cell(row, "name");
        h.failure_mode = map.cell(row, "failure_mode");
        h.scenario = map.cell(row, "scenario");
        h.severity = coerce(map.cell(row, "severity"), where, "severity", severity_from_string,
                            Severity::S0);
        h.exposure = coerce(map.cell(row, "exposure"), where, "exposure", exposure_from_string,
                            Exposure::E0);
        h.controllability = coerce(map.cell(row, "controllability"), where, "controllability",
                                   controllability_from_string, Controllability::C0);
        h.asil = coerce(map.cell(row, "asil"), where, "asil", asil_from_string, AsilLevel::QM);
        h.ftti_ms = coerce_ftti(map.cell(row, "ftti_ms"), where);
        h.safety_goal_id = map.cell(row, "safety_goal_id");
        product_.hazards.push_back(std::move(h));
    }

    void add_safety_goal(const std::vector<std::string>& row, const ColumnMap& map,
                         const std::string& where) {
        SafetyGoal g;
        g.sg_id = map.cell(row, "sg_id");
        g.description = map.cell(row, "description");
        g.asil = coerce(map.cell(row, "asil"), where, "asil", asil_from_string, AsilLevel::QM);
        g.ftti_ms = coerce_ftti(map.cell(row, "ftti_ms"), where);
        g.source_hazard_ids = split_id_list(map.cell(row, "source_hazard_ids"));
        product_.safety_goals.push_back(std::move(g));
    }

    void add_fsr(const std::vector<std::string>& row, const ColumnMap& map,
                 const std::string& where) {
        FunctionalSafetyRequirement f;
        f.fsr_id = map.cell(row, "fsr_id");
        f.description = map.cell(row, "description");
        f.traced_sg_ids = split_id_list(map.cell(row, "traced_sg_ids"));
        f.asil = coerce(map.cell(row, "asil"), where, "asil", asil_from_string, AsilLevel::QM);
        f.safe_state = map.cell(row, "safe_state");
        f.ftti_ms = coerce_ftti(map.cell(row, "ftti_ms"), where);
        f.subsystem = map.cell(row, "subsystem");
        f.safety_mechanism = map.cell(row, "safety_mechanism");
        product_.fsrs.push_back(std::move(f));
    }

    void add_test_case(const std::vector<std::string>& row, const ColumnMap& map,
                       const std::string& where) {
        TestCase t;
        t.tc_id = map.cell(row, "tc_id");
        t.traced_fsr_id = map.cell(row, "traced_fsr_id");
        t.asil = coerce(map.cell(row, "asil"), where, "asil", asil_from_string, AsilLevel::QM);
        t.test_method = map.cell(row, "test_method");
        t.derivation_method = map.cell(row, "derivation_method");
        t.steps = split_steps(map.cell(row, "steps"));
        t.expected_result = map.cell(row, "expected_result");
        const std::string fault = map.cell(row, "injected_fault");
        if (!is_none_marker(fault)) t.injected_fault = util::trim(fault);
        product_.test_cases.push_back(std::move(t));
    }

    void add_fta_event(const std::vector<std::string>& row, const ColumnMap& map,
                       const std::string& where) {
        FaultTreeEvent e;
        e.event_id = map.cell(row, "event_id");
        e.description = map.cell(row, "description");
        const std::string cell = util::trim(map.cell(row, "category"));
        if (cell.empty()) {
            e.category = FaultCategory::other;
        } else if (auto cat = fault_category_from_string(cell)) {
            e.category = *cat;
        } else {
            // Free-text categories fall back to the same keyword classifier
            // the fault-coverage rule uses, keeping both sides consistent.
            e.category = classify_fault_text(cell, config_);
            if (e.category == FaultCategory::other) {
                diag(where, "cannot read category value '" + cell + "', using other");
            }
        }
        e.covering_fsr_ids = split_id_list(map.cell(row, "covering_fsr_ids"));
        product_.fta_events.push_back(std::move(e));
    }

    const ValidationConfig& config_;
    WorkProduct& product_;
    ParseReport& report_;
    std::size_t classified_ = 0;
};

}  // namespace

std::optional<std::int64_t> parse_ftti_cell(const std::string& cell) {
    const std::string t = util::trim(cell);
    if (t.empty()) return std::nullopt;

    const char* begin = t.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) return std::nullopt;

    std::string unit = util::to_lower(util::trim(std::string(end)));
    double scale = 1.0;
    if (unit.empty() || unit == "ms" || unit == "millisecond" || unit == "milliseconds") {
        scale = 1.0;
    } else if (unit == "s" || unit == "sec" || unit == "secs" || unit == "second" ||
               unit == "seconds") {
        scale = 1000.0;
    } else {
        return std::nullopt;
    }
    return static_cast<std::int64_t>(std::llround(value * scale));
}

std::vector<std::string> split_id_list(const std::string& cell) {
    std::string t = util::trim(cell);
    if (is_none_marker(t)) return {};

    std::vector<std::string> ids;
    std::string current;
    auto flush = [&] {
        const std::string id = util::trim(current);
        current.clear();
        if (!id.empty()) ids.push_back(id);
    };
    for (char ch : t) {
        if (ch == ',' || ch == ';' || ch == ' ' || ch == '\t' || ch == '[' || ch == ']') {
            flush();
        } else {
            current.push_back(ch);
        }
    }
    flush();
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

std::vector<std::string> split_steps(const std::string& cell) {
    // Fold the <br> spellings into one separator, then split on it and ';'.
    std::string folded;
    folded.reserve(cell.size());
    for (std::size_t i = 0; i < cell.size();) {
        bool matched = false;
        for (const char* tag : {"<br/>", "<br />", "<br>", "<BR/>", "<BR />", "<BR>"}) {
            const std::size_t len = std::char_traits<char>::length(tag);
            if (cell.compare(i, len, tag) == 0) {
                folded.push_back('\x01');
                i += len;
                matched = true;
                break;
            }
        }
        if (!matched) {
            folded.push_back(cell[i]);
            ++i;
        }
    }

    std::vector<std::string> steps;
    std::string current;
    auto flush = [&] {
        std::string step = util::trim(current);
        current.clear();
        // strip "1." / "2)" / "-" / "*" enumerators
        std::size_t pos = 0;
        while (pos < step.size() && std::isdigit(static_cast<unsigned char>(step[pos]))) ++pos;
        if (pos > 0 && pos < step.size() && (step[pos] == '.' || step[pos] == ')')) {
            step = util::trim(step.substr(pos + 1));
        } else if (!step.empty() && (step[0] == '-' || step[0] == '*')) {
            step = util::trim(step.substr(1));
        }
        if (!step.empty()) steps.push_back(std::move(step));
    };
    for (char ch : folded) {
        if (ch == '\x01' || ch == ';') {
            flush();
        } else {
            current.push_back(ch);
        }
    }
    flush();

    if (steps.empty()) {
        const std::string whole = util::trim(cell);
        if (!whole.empty()) steps.push_back(whole);
    }
    return steps;
}

WorkProduct extract_workproduct(
    const std::vector<std::pair<std::string, std::string>>& stage_outputs,
    const ValidationConfig& config, ParseReport& report) {
    WorkProduct product;
    Extractor extractor(config, product, report);
    for (const auto& [role, text] : stage_outputs) {
        extractor.consume(role, text);
    }
    if (extractor.classified() == 0) {
        throw UnparsedError("no recognizable artifact tables in any stage output");
    }
    return product;
}

}  // namespace aegis
