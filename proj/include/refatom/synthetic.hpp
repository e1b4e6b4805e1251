#pragma once

#include "refatom/streams.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace refatom::streams {

struct ScenePerson {
    std::vector<double> attributes;       // appearance vector, U(-1,1)^d_attr
    double box[4];                        // normalized corners
    std::vector<std::uint8_t> actions;    // multi-hot over n_classes
};

struct SyntheticScene {
    std::vector<ScenePerson> persons;
    std::size_t target_index = 0;
    std::vector<double> reference;  // noisy copy of the target's attributes
};

struct SceneConfig {
    std::size_t persons = 5;  // K
    std::size_t n_classes = 10;
    std::size_t attr_dim = 8;
    std::size_t frames = 8;     // temporal visual-token blocks
    std::size_t rt_tokens = 4;  // reference rows emitted
    std::size_t max_persons = 16;
    double noise_attr = 0.7;  // additive noise on VT attribute channels
    double noise_act = 0.45;  // additive noise on VT action channels
    double noise_box = 0.1;   // additive noise on VT box channels
    double action_rate = 0.25;
    double ref_jitter = 0.15;     // per-dim reference perturbation bound
    double attr_min_dist = 1.0;   // enforced pairwise attribute separation
    std::uint64_t seed = 1;

    std::size_t vt_dim() const { return attr_dim + n_classes + 4; }
    std::size_t rt_dim() const { return attr_dim; }
    std::size_t vt_tokens() const { return frames * persons; }
};

// One fully materialized training/eval instance: raw stream sources plus the
// supervision targets. Streams are resampled/projected by the model, not here.
struct Instance {
    std::int64_t id = 0;
    Matrix vt;  // (frames*K) x (attr+classes+4)
    Matrix rt;  // rt_tokens x attr
    std::vector<DetectionRecord> detections;
    std::vector<std::uint8_t> labels;  // target action multi-hot
    double gt_box[4] = {0, 0, 0, 0};
};

// Deterministic under (config.seed, id): the per-scene generator stream is
// derived from both, so scenes are reproducible in any order.
SyntheticScene generate_scene(const SceneConfig& cfg, std::int64_t id);
Instance materialize_instance(const SceneConfig& cfg, const SyntheticScene& scene,
                              std::int64_t id);
Instance generate_instance(const SceneConfig& cfg, std::int64_t id);

std::vector<Instance> generate_dataset(const SceneConfig& cfg, std::size_t count,
                                       std::int64_t first_id = 0);

// embeddings.jsonl / detections.jsonl / labels.jsonl under dir.
void write_dataset(const std::string& dir, const std::vector<Instance>& instances);
std::vector<Instance> load_dataset(const std::string& dir, std::size_t expect_vt_dim = 0,
                                   std::size_t expect_rt_dim = 0);

// Coarse appearance bucket used as the detection category name.
std::string coarse_category(const std::vector<double>& attributes);

}  // namespace refatom::streams
