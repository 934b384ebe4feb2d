#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace aegis {

enum class DocKind { regulation, best_practice, case_study };

std::string to_string(DocKind kind);
DocKind doc_kind_from_string(const std::string& text);

/// One retrieval window over a source document. Offsets are in Unicode
/// code points so multi-byte text slices stay well formed.
struct DocumentChunk {
    std::string doc_id;
    std::size_t chunk_index = 0;
    std::size_t start_offset = 0;
    std::size_t end_offset = 0;
    std::string text;

    bool operator==(const DocumentChunk&) const = default;
};

struct RetrievalHit {
    DocumentChunk chunk;
    double score = 0.0;
};

struct DocumentMeta {
    std::string title;
    DocKind kind = DocKind::regulation;
    std::string text;
};

struct ChunkingParams {
    std::size_t size = 2000;
    std::size_t overlap = 10;
};

/// Fixed sliding windows: chunk i starts at character i*(size-overlap) and
/// spans min(size, remaining) characters. Empty text yields no chunks; no
/// chunk starts at or beyond the text length.
/// Throws ConfigError when overlap >= size.
std::vector<DocumentChunk> chunk_document(const std::string& doc_id, const std::string& text,
                                          const ChunkingParams& params = {});

/// Lexical retrieval index over chunked documents. Immutable once built;
/// reads are safe from concurrent callers. BM25 scoring with k1 = 1.2,
/// b = 0.75 over case-folded alphanumeric tokens, ties broken by
/// (doc_id, chunk_index).
class KnowledgeBase {
public:
    KnowledgeBase() = default;
    explicit KnowledgeBase(ChunkingParams params) : chunking_(params) {}

    /// Chunks and indexes one document. Throws ConfigError on a duplicate id.
    void ingest(const std::string& doc_id, DocKind kind, const std::string& title,
                const std::string& text);

    /// At most k hits in non-increasing score order. Chunks that share no
    /// query term are not returned. An empty query yields an empty result.
    std::vector<RetrievalHit> retrieve(const std::string& query, std::size_t k) const;

    std::size_t document_count() const { return documents_.size(); }
    std::size_t chunk_count() const { return chunks_.size(); }
    const std::map<std::string, DocumentMeta>& documents() const { return documents_; }
    const std::vector<DocumentChunk>& chunks() const { return chunks_; }

    /// Single-file JSON index persistence.
    std::string to_json() const;
    static KnowledgeBase from_json(const std::string& json_text);
    void save(const std::string& path) const;
    static KnowledgeBase load(const std::string& path);

private:
    void index_chunk(std::size_t chunk_pos);

    ChunkingParams chunking_;
    std::map<std::string, DocumentMeta> documents_;
    std::vector<DocumentChunk> chunks_;
    // Term statistics: term -> (chunk position -> term frequency).
    std::map<std::string, std::map<std::size_t, std::size_t>> postings_;
    std::vector<std::size_t> chunk_token_counts_;
    std::size_t total_tokens_ = 0;
};

/// Ingests every *.txt / *.md file in a directory. The manifest file
/// (default "manifest.tsv") lists one document per line as
/// "<filename>\t<doc_id>\t<kind>\t<title>"; files absent from the manifest
/// are skipped.
KnowledgeBase ingest_directory(const std::string& dir_path,
                               const std::string& manifest_name = "manifest.tsv",
                               const ChunkingParams& params = {});

}  // namespace aegis
