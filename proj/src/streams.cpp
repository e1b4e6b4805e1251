#include "refatom/streams.hpp"

#include "refatom/kernels.hpp"
#include "refatom/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace refatom::streams {

using nlohmann::json;

const char* stream_name(StreamId s) {
    switch (s) {
        case StreamId::VT: return "VT";
        case StreamId::RT: return "RT";
        case StreamId::LS: return "LS";
    }
    return "?";
}

Matrix CategoryEmbedder::embed(const std::string& category) const {
    auto it = table_.find(category);
    if (it != table_.end()) return it->second;
    if (!hash_fallback_)
        throw std::runtime_error("CategoryEmbedder: unknown category '" + category +
                                 "' and hash fallback disabled");
    Rng rng = make_rng(seed_, fnv1a64(category));
    Matrix v(1, dim_);
    std::normal_distribution<double> normal(0.0, 1.0);
    double norm2 = 0.0;
    for (auto& x : v.vec()) {
        x = normal(rng);
        norm2 += x * x;
    }
    const double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
    for (auto& x : v.vec()) x *= inv;
    table_.emplace(category, v);
    return v;
}

void CategoryEmbedder::set_entry(const std::string& category, Matrix v) {
    if (v.rows() != 1 || v.cols() != dim_)
        throw num::ShapeError("CategoryEmbedder: entry for '" + category + "' is " +
                              v.shape_str() + ", want (1x" + std::to_string(dim_) + ")");
    table_[category] = std::move(v);
}

void CategoryEmbedder::load_table(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("CategoryEmbedder: cannot open " + path);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        std::vector<double> vals = j.at("embedding").get<std::vector<double>>();
        set_entry(j.at("category").get<std::string>(), Matrix::row(std::move(vals)));
    }
}

namespace {

Matrix parse_matrix(const json& j, const char* field) {
    if (!j.is_array() || j.empty())
        throw std::runtime_error(std::string(field) + ": expected non-empty 2D array");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw std::runtime_error(std::string(field) + ": ragged row " + std::to_string(i));
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    num::require_finite(m, field);
    return m;
}

}  // namespace

std::vector<EmbeddingRecord> load_embedding_file(const std::string& path,
                                                 std::size_t expect_vt_dim,
                                                 std::size_t expect_rt_dim,
                                                 std::vector<RejectedRecord>* rejected) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_embedding_file: cannot open " + path);
    std::vector<EmbeddingRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            EmbeddingRecord rec;
            rec.id = j.at("id").get<std::int64_t>();
            rec.vt = parse_matrix(j.at("vt"), "vt");
            rec.rt = parse_matrix(j.at("rt"), "rt");
            if (expect_vt_dim && rec.vt.cols() != expect_vt_dim)
                throw std::runtime_error("vt dim " + std::to_string(rec.vt.cols()) +
                                         " != declared " + std::to_string(expect_vt_dim));
            if (expect_rt_dim && rec.rt.cols() != expect_rt_dim)
                throw std::runtime_error("rt dim " + std::to_string(rec.rt.cols()) +
                                         " != declared " + std::to_string(expect_rt_dim));
            out.push_back(std::move(rec));
        } catch (const std::exception& e) {
            if (rejected) rejected->push_back({lineno, e.what()});
        }
    }
    return out;
}

std::vector<DetectionSet> load_detection_file(const std::string& path,
                                              std::vector<RejectedRecord>* rejected) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_detection_file: cannot open " + path);
    std::vector<DetectionSet> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            DetectionSet set;
            set.id = j.at("id").get<std::int64_t>();
            for (const auto& dj : j.at("detections")) {
                DetectionRecord d;
                const auto& bj = dj.at("box");
                if (!bj.is_array() || bj.size() != 4)
                    throw std::runtime_error("box must have 4 coordinates");
                for (std::size_t k = 0; k < 4; ++k) d.box[k] = bj[k].get<double>();
                d.category = dj.at("category").get<std::string>();
                d.confidence = dj.at("confidence").get<double>();
                if (!d.valid())
                    throw std::runtime_error("invalid detection (corner order or confidence)");
                set.detections.push_back(std::move(d));
            }
            out.push_back(std::move(set));
        } catch (const std::exception& e) {
            if (rejected) rejected->push_back({lineno, e.what()});
        }
    }
    return out;
}

std::vector<DetectionRecord> filter_by_confidence(const std::vector<DetectionRecord>& dets,
                                                  double min_confidence) {
    std::vector<DetectionRecord> out;
    for (const auto& d : dets)
        if (d.confidence >= min_confidence) out.push_back(d);
    return out;
}

Matrix ls_concat_features(const std::vector<DetectionRecord>& dets,
                          const CategoryEmbedder& embedder) {
    const std::size_t de = embedder.dim();
    Matrix m(dets.size(), de + 4);
    for (std::size_t i = 0; i < dets.size(); ++i) {
        const Matrix e = embedder.embed(dets[i].category);
        for (std::size_t j = 0; j < de; ++j) m(i, j) = e(0, j);
        for (std::size_t j = 0; j < 4; ++j) m(i, de + j) = dets[i].box[j];
    }
    return m;
}

Matrix pad_rows(const Matrix& m, std::size_t n_rows) {
    Matrix out(n_rows, m.cols());
    const std::size_t keep = std::min(n_rows, m.rows());
    for (std::size_t i = 0; i < keep; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

TokenMatrix build_location_semantic_tokens(const std::vector<DetectionRecord>& dets,
                                           const CategoryEmbedder& embedder,
                                           const LinearLayer& projection,
                                           const LinearLayer* resampler) {
    const std::size_t d = projection.d_out();
    if (dets.empty()) {
        const std::size_t nt = resampler ? resampler->d_out() : 0;
        return {StreamId::LS, Matrix::zeros(nt, d)};
    }
    Matrix projected = projection.apply_plain(ls_concat_features(dets, embedder));
    if (!resampler) return {StreamId::LS, std::move(projected)};
    return {StreamId::LS,
            resampler->apply_tokens_plain(pad_rows(projected, resampler->d_in()))};
}

Matrix project_and_resample(const Matrix& src, const LinearLayer* projection,
                            const LinearLayer* resampler) {
    Matrix m = projection ? projection->apply_plain(src) : src;
    if (resampler) m = resampler->apply_tokens_plain(pad_rows(m, resampler->d_in()));
    return m;
}

}  // namespace refatom::streams
