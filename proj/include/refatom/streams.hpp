#pragma once

#include "refatom/linear.hpp"
#include "refatom/matrix.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace refatom::streams {

using num::LinearLayer;
using num::Matrix;

enum class StreamId { VT, RT, LS };
constexpr int kNumStreams = 3;
const char* stream_name(StreamId s);

struct TokenMatrix {
    StreamId stream;
    Matrix tokens;  // N_t x d
};

struct DetectionRecord {
    double box[4];  // normalized corners x1,y1,x2,y2 in [0,1], x1<x2, y1<y2
    std::string category;
    double confidence = 0.0;

    bool valid() const {
        return box[0] < box[2] && box[1] < box[3] && confidence >= 0.0 && confidence <= 1.0;
    }
};

// Deterministic category-name -> d_e vector. Default policy draws a seeded
// unit vector from the name's hash; a table loaded from file can replace or
// precede it. With the fallback disabled, unknown names are rejected.
class CategoryEmbedder {
public:
    CategoryEmbedder(std::size_t dim, std::uint64_t seed, bool hash_fallback = true)
        : dim_(dim), seed_(seed), hash_fallback_(hash_fallback) {}

    std::size_t dim() const { return dim_; }
    Matrix embed(const std::string& category) const;  // 1 x d_e
    void load_table(const std::string& path);         // jsonl {category, embedding}
    void set_entry(const std::string& category, Matrix v);

private:
    std::size_t dim_;
    std::uint64_t seed_;
    bool hash_fallback_;
    mutable std::map<std::string, Matrix> table_;
};

struct EmbeddingRecord {
    std::int64_t id = 0;
    Matrix vt;
    Matrix rt;
};

struct DetectionSet {
    std::int64_t id = 0;
    std::vector<DetectionRecord> detections;
};

struct RejectedRecord {
    std::size_t line = 0;  // 1-based line number in the source file
    std::string reason;
};

// One record per line: {"id": ..., "vt": [[...]], "rt": [[...]]}. Records
// whose matrices are ragged or clash with the expected source dims (0 = any)
// are rejected individually, never the whole file.
std::vector<EmbeddingRecord> load_embedding_file(const std::string& path,
                                                 std::size_t expect_vt_dim,
                                                 std::size_t expect_rt_dim,
                                                 std::vector<RejectedRecord>* rejected);

// One record per line: {"id": ..., "detections": [{box, category, confidence}]}.
std::vector<DetectionSet> load_detection_file(const std::string& path,
                                              std::vector<RejectedRecord>* rejected);

std::vector<DetectionRecord> filter_by_confidence(const std::vector<DetectionRecord>& dets,
                                                  double min_confidence);

// Per-detection rows of concat[embed(category), box] -> (N_o x (d_e+4)).
Matrix ls_concat_features(const std::vector<DetectionRecord>& dets,
                          const CategoryEmbedder& embedder);

// Zero-pads (or truncates) token rows to n_rows.
Matrix pad_rows(const Matrix& m, std::size_t n_rows);

// Location-semantic tokens: concat -> single projection -> token resampling.
// No detections yield an exactly zero token matrix. The resampler is a
// token-axis map whose input width fixes the pre-resample token count.
TokenMatrix build_location_semantic_tokens(const std::vector<DetectionRecord>& dets,
                                           const CategoryEmbedder& embedder,
                                           const LinearLayer& projection,
                                           const LinearLayer* resampler);

// Channel projection followed by token resampling; shared by VT and RT
// ingestion. Either layer may be null to skip that step.
Matrix project_and_resample(const Matrix& src, const LinearLayer* projection,
                            const LinearLayer* resampler);

}  // namespace refatom::streams
