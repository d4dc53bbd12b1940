#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "agot/errors.hpp"
#include "agot/rng.hpp"

namespace agot {

inline constexpr const char* kDatasetFormatTag = "SYNCLIP v1";
inline constexpr const char* kManifestFormatTag = "SYNCLIP-MANIFEST v1";

struct LabeledExample {
    std::vector<double> image_feature;
    std::string caption;
    int class_id = 0;

    bool operator==(const LabeledExample&) const = default;
};

struct Dataset {
    std::size_t raw_dim = 0;
    std::size_t num_classes = 0;
    std::vector<LabeledExample> examples;

    bool operator==(const Dataset&) const = default;
};

// Everything needed to regenerate a dataset and its base/new split.
struct DatasetManifest {
    std::size_t num_classes = 8;
    std::size_t raw_dim = 32;
    double noise_sigma = 0.15;
    std::uint64_t prototype_seed = 1;
    std::uint64_t generator_seed = 2;
    std::uint64_t split_seed = 3;
    std::vector<std::string> caption_templates;  // "{}" marks the class name
    std::vector<std::string> class_names;        // one per class
    std::vector<bool> base_class;                // split assignment, one per class

    static DatasetManifest make(std::size_t classes, std::size_t raw_dim, double sigma,
                                std::uint64_t prototype_seed, std::uint64_t generator_seed,
                                std::uint64_t split_seed, bool multi_template);
    void validate() const;
};

std::vector<std::string> default_class_names(std::size_t count);
std::vector<std::string> default_caption_templates(bool multi_template);

// Deterministic 50/50 partition of class ids into (base, new).
std::pair<std::set<int>, std::set<int>> split_base_new(const DatasetManifest& manifest);

// Unit-sphere prototype per class plus Gaussian noise; captions instantiate
// the manifest templates. A pure function of (manifest, n_per_class).
Dataset generate_synthetic(const DatasetManifest& manifest, std::size_t n_per_class);

// Exactly k examples per class present in `dataset`, sampled without
// replacement; output preserves dataset order.
Dataset sample_few_shot(const Dataset& dataset, std::size_t shots, std::uint64_t seed);
// The same draw, returning (selected, remaining).
std::pair<Dataset, Dataset> few_shot_partition(const Dataset& dataset, std::size_t shots,
                                               std::uint64_t seed);

Dataset filter_classes(const Dataset& dataset, const std::set<int>& keep);

void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

// <stem>.manifest next to the dataset file.
std::string manifest_path_for(const std::string& dataset_path);

// Caption of a class under the first (canonical) template.
std::string canonical_caption(const DatasetManifest& manifest, int class_id);

}  // namespace agot
