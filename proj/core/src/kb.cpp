#include "aegis/kb.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "aegis/errors.hpp"
#include "aegis/util.hpp"

namespace aegis {

namespace {

using nlohmann::json;

constexpr double kBm25K1 = 1.2;
constexpr double kBm25B = 0.75;

}  // namespace

std::string to_string(DocKind kind) {
    switch (kind) {
        case DocKind::regulation: return "regulation";
        case DocKind::best_practice: return "best_practice";
        case DocKind::case_study: return "case_study";
    }
    return "regulation";
}

DocKind doc_kind_from_string(const std::string& text) {
    const std::string t = util::trim(util::to_lower(text));
    if (t == "regulation") return DocKind::regulation;
    if (t == "best_practice") return DocKind::best_practice;
    if (t == "case_study") return DocKind::case_study;
    throw ConfigError("unknown document kind: " + text);
}

std::vector<DocumentChunk> chunk_document(const std::string& doc_id, const std::string& text,
                                          const ChunkingParams& params) {
    if (params.overlap >= params.size) {
        throw ConfigError("chunk overlap (" + std::to_string(params.overlap) +
                          ") must be smaller than chunk size (" + std::to_string(params.size) +
                          ")");
    }
    std::vector<DocumentChunk> chunks;
    const auto offsets = util::utf8_offsets(text);
    const std::size_t length = offsets.size() - 1;  // in code points
    if (length == 0) return chunks;

    const std::size_t step = params.size - params.overlap;
    for (std::size_t index = 0;; ++index) {
        const std::size_t start = index * step;
        if (start >= length) break;
        const std::size_t end = std::min(start + params.size, length);
        DocumentChunk chunk;
        chunk.doc_id = doc_id;
        chunk.chunk_index = index;
        chunk.start_offset = start;
        chunk.end_offset = end;
        chunk.text = text.substr(offsets[start], offsets[end] - offsets[start]);
        chunks.push_back(std::move(chunk));
        if (end == length) break;
    }
    return chunks;
}

void KnowledgeBase::ingest(const std::string& doc_id, DocKind kind, const std::string& title,
                           const std::string& text) {
    if (documents_.count(doc_id) != 0) {
        throw ConfigError("duplicate document id: " + doc_id);
    }
    documents_[doc_id] = DocumentMeta{title, kind, text};
    for (auto& chunk : chunk_document(doc_id, text, chunking_)) {
        chunks_.push_back(std::move(chunk));
        index_chunk(chunks_.size() - 1);
    }
}

void KnowledgeBase::index_chunk(std::size_t chunk_pos) {
    const auto tokens = util::tokenize(chunks_[chunk_pos].text);
    chunk_token_counts_.push_back(tokens.size());
    total_tokens_ += tokens.size();
    for (const auto& token : tokens) {
        postings_[token][chunk_pos] += 1;
    }
}

std::vector<RetrievalHit> KnowledgeBase::retrieve(const std::string& query,
                                                  std::size_t k) const {
    std::vector<RetrievalHit> hits;
    if (k == 0 || chunks_.empty()) return hits;
    const auto query_tokens = util::tokenize(query);
    if (query_tokens.empty()) return hits;

    const double chunk_total = static_cast<double>(chunks_.size());
    const double avg_len = total_tokens_ > 0 ? static_cast<double>(total_tokens_) / chunk_total
                                             : 0.0;

    std::map<std::size_t, double> scores;
    for (const auto& term : query_tokens) {
        const auto posting = postings_.find(term);
        if (posting == postings_.end()) continue;
        const double df = static_cast<double>(posting->second.size());
        const double idf = std::log(1.0 + (chunk_total - df + 0.5) / (df + 0.5));
        for (const auto& [chunk_pos, tf_count] : posting->second) {
            const double tf = static_cast<double>(tf_count);
            const double len = static_cast<double>(chunk_token_counts_[chunk_pos]);
            const double denom = tf + kBm25K1 * (1.0 - kBm25B + kBm25B * len / avg_len);
            scores[chunk_pos] += idf * tf * (kBm25K1 + 1.0) / denom;
        }
    }

    hits.reserve(scores.size());
    for (const auto& [chunk_pos, score] : scores) {
        hits.push_back(RetrievalHit{chunks_[chunk_pos], score});
    }
    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.chunk.doc_id != b.chunk.doc_id) return a.chunk.doc_id < b.chunk.doc_id;
        return a.chunk.chunk_index < b.chunk.chunk_index;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

std::string KnowledgeBase::to_json() const {
    json j;
    j["chunking"] = json{{"size", chunking_.size}, {"overlap", chunking_.overlap}};
    j["documents"] = json::array();
    for (const auto& [doc_id, meta] : documents_) {
        j["documents"].push_back(json{{"doc_id", doc_id},
                                      {"title", meta.title},
                                      {"kind", to_string(meta.kind)},
                                      {"text", meta.text}});
    }
    return j.dump(2) + "\n";
}

KnowledgeBase KnowledgeBase::from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("knowledge base JSON parse error: ") + e.what());
    }
    try {
        ChunkingParams params;
        params.size = j.at("chunking").at("size").get<std::size_t>();
        params.overlap = j.at("chunking").at("overlap").get<std::size_t>();
        KnowledgeBase kb(params);
        for (const auto& doc : j.at("documents")) {
            kb.ingest(doc.at("doc_id").get<std::string>(),
                      doc_kind_from_string(doc.at("kind").get<std::string>()),
                      doc.at("title").get<std::string>(), doc.at("text").get<std::string>());
        }
        return kb;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("knowledge base JSON shape error: ") + e.what());
    }
}

void KnowledgeBase::save(const std::string& path) const {
    util::write_file_atomic(path, to_json());
}

KnowledgeBase KnowledgeBase::load(const std::string& path) {
    return from_json(util::read_file(path));
}

KnowledgeBase ingest_directory(const std::string& dir_path, const std::string& manifest_name,
                               const ChunkingParams& params) {
    namespace fs = std::filesystem;
    const fs::path dir(dir_path);
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir_path);
    const fs::path manifest_path = dir / manifest_name;
    if (!fs::exists(manifest_path)) {
        throw ConfigError("manifest not found: " + manifest_path.string());
    }

    KnowledgeBase kb(params);
    const auto manifest = util::read_file(manifest_path.string());
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(manifest)) {
        ++line_no;
        const std::string trimmed = util::trim(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= trimmed.size(); ++i) {
            if (i == trimmed.size() || trimmed[i] == '\t') {
                fields.push_back(util::trim(trimmed.substr(start, i - start)));
                start = i + 1;
            }
        }
        if (fields.size() != 4) {
            throw ConfigError("manifest line " + std::to_string(line_no) +
                              ": expected <filename>\\t<doc_id>\\t<kind>\\t<title>");
        }
        const fs::path file = dir / fields[0];
        if (!fs::exists(file)) {
            throw ConfigError("manifest line " + std::to_string(line_no) +
                              ": file not found: " + file.string());
        }
        kb.ingest(fields[1], doc_kind_from_string(fields[2]), fields[3],
                  util::read_file(file.string()));
    }
    return kb;
}

}  // namespace aegis
