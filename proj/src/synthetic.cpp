#include "refatom/synthetic.hpp"

#include "refatom/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace refatom::streams {

using nlohmann::json;

std::string coarse_category(const std::vector<double>& attributes) {
    std::string name = "person_";
    name += attributes.size() > 0 && attributes[0] >= 0.0 ? 'p' : 'n';
    name += attributes.size() > 1 && attributes[1] >= 0.0 ? 'p' : 'n';
    return name;
}

namespace {

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

void clamp_box(double* b) {
    for (int k = 0; k < 4; ++k) b[k] = std::clamp(b[k], 0.0, 1.0);
    if (b[0] > b[2]) std::swap(b[0], b[2]);
    if (b[1] > b[3]) std::swap(b[1], b[3]);
    if (b[2] - b[0] < 1e-3) b[2] = std::min(1.0, b[0] + 1e-3);
    if (b[3] - b[1] < 1e-3) b[3] = std::min(1.0, b[1] + 1e-3);
}

}  // namespace

SyntheticScene generate_scene(const SceneConfig& cfg, std::int64_t id) {
    if (cfg.persons < 1) throw std::invalid_argument("generate_scene: need K >= 1");
    if (cfg.n_classes < 2) throw std::invalid_argument("generate_scene: need N_c >= 2");
    if (cfg.persons > cfg.max_persons)
        throw std::invalid_argument("generate_scene: K=" + std::to_string(cfg.persons) +
                                    " exceeds max tokens " + std::to_string(cfg.max_persons));
    // Reference uniqueness: the jitter ball must stay inside half the enforced
    // attribute separation, so the target is always the nearest person.
    if (cfg.ref_jitter * std::sqrt(double(cfg.attr_dim)) >= 0.5 * cfg.attr_min_dist)
        throw std::invalid_argument("generate_scene: ref_jitter too large for attr_min_dist");

    Rng rng = make_rng(cfg.seed, std::uint64_t(id));
    SyntheticScene scene;
    scene.persons.resize(cfg.persons);

    for (std::size_t p = 0; p < cfg.persons; ++p) {
        auto& person = scene.persons[p];
        // rejection-sample attributes until separated from all earlier persons
        const double min_d2 = cfg.attr_min_dist * cfg.attr_min_dist;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            person.attributes.assign(cfg.attr_dim, 0.0);
            for (auto& a : person.attributes) a = uniform(rng, -1.0, 1.0);
            bool ok = true;
            for (std::size_t q = 0; q < p; ++q)
                if (dist2(person.attributes, scene.persons[q].attributes) < min_d2) {
                    ok = false;
                    break;
                }
            if (ok) break;
            if (attempt == 999)
                throw std::runtime_error("generate_scene: failed to separate attributes");
        }
        const double cx = uniform(rng, 0.18, 0.82);
        const double cy = uniform(rng, 0.18, 0.82);
        const double w = uniform(rng, 0.15, 0.3);
        const double h = uniform(rng, 0.15, 0.3);
        person.box[0] = cx - w / 2;
        person.box[1] = cy - h / 2;
        person.box[2] = cx + w / 2;
        person.box[3] = cy + h / 2;
        clamp_box(person.box);

        person.actions.assign(cfg.n_classes, 0);
        std::size_t active = 0;
        for (auto& a : person.actions) {
            a = uniform(rng, 0.0, 1.0) < cfg.action_rate ? 1 : 0;
            active += a;
        }
        if (active == 0)
            person.actions[std::uniform_int_distribution<std::size_t>(
                0, cfg.n_classes - 1)(rng)] = 1;
    }

    scene.target_index =
        std::uniform_int_distribution<std::size_t>(0, cfg.persons - 1)(rng);
    const auto& t = scene.persons[scene.target_index];
    scene.reference.resize(cfg.attr_dim);
    for (std::size_t i = 0; i < cfg.attr_dim; ++i)
        scene.reference[i] = t.attributes[i] + uniform(rng, -cfg.ref_jitter, cfg.ref_jitter);
    return scene;
}

Instance materialize_instance(const SceneConfig& cfg, const SyntheticScene& scene,
                              std::int64_t id) {
    Rng rng = make_rng(cfg.seed, splitmix64(std::uint64_t(id)) ^ 0x7061696e74ULL);
    std::normal_distribution<double> normal(0.0, 1.0);

    Instance inst;
    inst.id = id;
    const std::size_t K = scene.persons.size();
    inst.vt = Matrix(cfg.frames * K, cfg.vt_dim());
    for (std::size_t f = 0; f < cfg.frames; ++f) {
        for (std::size_t p = 0; p < K; ++p) {
            const auto& person = scene.persons[p];
            const std::size_t r = f * K + p;
            std::size_t c = 0;
            for (std::size_t i = 0; i < cfg.attr_dim; ++i)
                inst.vt(r, c++) = person.attributes[i] + cfg.noise_attr * normal(rng);
            for (std::size_t i = 0; i < cfg.n_classes; ++i)
                inst.vt(r, c++) = double(person.actions[i]) + cfg.noise_act * normal(rng);
            for (int i = 0; i < 4; ++i)
                inst.vt(r, c++) = person.box[i] + cfg.noise_box * normal(rng);
        }
    }

    inst.rt = Matrix(cfg.rt_tokens, cfg.rt_dim());
    for (std::size_t r = 0; r < cfg.rt_tokens; ++r)
        for (std::size_t i = 0; i < cfg.attr_dim; ++i) inst.rt(r, i) = scene.reference[i];

    for (const auto& person : scene.persons) {
        DetectionRecord d;
        for (int k = 0; k < 4; ++k) d.box[k] = person.box[k] + uniform(rng, -0.02, 0.02);
        clamp_box(d.box);
        d.category = coarse_category(person.attributes);
        d.confidence = uniform(rng, 0.55, 0.95);
        inst.detections.push_back(std::move(d));
    }
    // low-confidence clutter, meant to be dropped by the confidence filter
    const std::size_t clutter = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
    for (std::size_t i = 0; i < clutter; ++i) {
        DetectionRecord d;
        d.box[0] = uniform(rng, 0.0, 0.7);
        d.box[1] = uniform(rng, 0.0, 0.7);
        d.box[2] = d.box[0] + uniform(rng, 0.05, 0.3);
        d.box[3] = d.box[1] + uniform(rng, 0.05, 0.3);
        clamp_box(d.box);
        d.category = "clutter";
        d.confidence = uniform(rng, 0.05, 0.45);
        inst.detections.push_back(std::move(d));
    }

    const auto& target = scene.persons[scene.target_index];
    inst.labels = target.actions;
    for (int k = 0; k < 4; ++k) inst.gt_box[k] = target.box[k];
    return inst;
}

Instance generate_instance(const SceneConfig& cfg, std::int64_t id) {
    return materialize_instance(cfg, generate_scene(cfg, id), id);
}

std::vector<Instance> generate_dataset(const SceneConfig& cfg, std::size_t count,
                                       std::int64_t first_id) {
    std::vector<Instance> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(generate_instance(cfg, first_id + std::int64_t(i)));
    return out;
}

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

void write_dataset(const std::string& dir, const std::vector<Instance>& instances) {
    std::ofstream emb(dir + "/embeddings.jsonl", std::ios::trunc);
    std::ofstream det(dir + "/detections.jsonl", std::ios::trunc);
    std::ofstream lab(dir + "/labels.jsonl", std::ios::trunc);
    if (!emb || !det || !lab)
        throw std::runtime_error("write_dataset: cannot open output files in " + dir);
    for (const auto& inst : instances) {
        json je{{"id", inst.id}, {"vt", matrix_to_json(inst.vt)}, {"rt", matrix_to_json(inst.rt)}};
        emb << je.dump() << "\n";

        json dets = json::array();
        for (const auto& d : inst.detections)
            dets.push_back(json{{"box", {d.box[0], d.box[1], d.box[2], d.box[3]}},
                                {"category", d.category},
                                {"confidence", d.confidence}});
        json jd{{"id", inst.id}, {"detections", std::move(dets)}};
        det << jd.dump() << "\n";

        json jl{{"id", inst.id},
                {"labels", inst.labels},
                {"box", {inst.gt_box[0], inst.gt_box[1], inst.gt_box[2], inst.gt_box[3]}}};
        lab << jl.dump() << "\n";
    }
}

std::vector<Instance> load_dataset(const std::string& dir, std::size_t expect_vt_dim,
                                   std::size_t expect_rt_dim) {
    std::vector<RejectedRecord> rejected;
    auto embeddings =
        load_embedding_file(dir + "/embeddings.jsonl", expect_vt_dim, expect_rt_dim, &rejected);
    auto detections = load_detection_file(dir + "/detections.jsonl", &rejected);
    if (!rejected.empty())
        throw std::runtime_error("load_dataset: " + std::to_string(rejected.size()) +
                                 " rejected records, first at line " +
                                 std::to_string(rejected[0].line) + ": " + rejected[0].reason);

    std::map<std::int64_t, DetectionSet*> det_by_id;
    for (auto& d : detections) det_by_id[d.id] = &d;

    std::map<std::int64_t, std::pair<std::vector<std::uint8_t>, std::array<double, 4>>> labels;
    std::ifstream lab(dir + "/labels.jsonl");
    if (!lab) throw std::runtime_error("load_dataset: cannot open " + dir + "/labels.jsonl");
    std::string line;
    while (std::getline(lab, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        auto& entry = labels[j.at("id").get<std::int64_t>()];
        entry.first = j.at("labels").get<std::vector<std::uint8_t>>();
        for (int k = 0; k < 4; ++k) entry.second[k] = j.at("box")[k].get<double>();
    }

    std::vector<Instance> out;
    for (auto& e : embeddings) {
        Instance inst;
        inst.id = e.id;
        inst.vt = std::move(e.vt);
        inst.rt = std::move(e.rt);
        if (auto it = det_by_id.find(e.id); it != det_by_id.end())
            inst.detections = it->second->detections;
        auto lit = labels.find(e.id);
        if (lit == labels.end())
            throw std::runtime_error("load_dataset: no labels for id " + std::to_string(e.id));
        inst.labels = lit->second.first;
        for (int k = 0; k < 4; ++k) inst.gt_box[k] = lit->second.second[k];
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace refatom::streams
