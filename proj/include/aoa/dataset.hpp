#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aoa/covariance.hpp"
#include "aoa/keyvalue_config.hpp"
#include "aoa/nn/labels.hpp"
#include "aoa/nn/train.hpp"
#include "aoa/signal_sim.hpp"

namespace aoa {

// Per-feature affine normalization fit on the training split only and applied
// identically everywhere else, including inference.
struct Scaler {
    std::vector<double> mean;
    std::vector<double> stddev;

    bool fitted() const { return !mean.empty(); }
    void apply(std::vector<double>& features) const;
    template <typename T>
    void apply(T* features, std::size_t n) const {
        if (n != mean.size()) throw config_error("scaler width mismatch");
        for (std::size_t i = 0; i < n; ++i)
            features[i] = static_cast<T>((static_cast<double>(features[i]) - mean[i]) / stddev[i]);
    }
};

Scaler fit_scaler(const std::vector<const std::vector<double>*>& rows);

struct RecordMeta {
    double snr_db = 0.0;
    bool noiseless = false;
    std::string scenario;
    std::string aug;
    std::uint64_t seed = 0;
    std::string split;                     // train | val | test
    std::vector<std::uint64_t> frames;     // parent raw-frame ids (1 or 2)
};

struct FeatureRecord {
    std::vector<double> features; // 128 values
    nn::LabelTriple label;
    RecordMeta meta;

    std::array<double, 2> true_angles_deg() const {
        return {nn::decode_angle(label.z1), nn::decode_angle(label.z2)};
    }
};

void write_records_jsonl(const std::string& path, const std::vector<FeatureRecord>& records);
std::vector<FeatureRecord> read_records_jsonl(const std::string& path);

// One synthetic propagation scenario: a named baseband waveform family.
struct ScenarioSpec {
    std::string name;
    BasebandKind kind = BasebandKind::random_qpsk;
    double tone_offset_hz = 25e3;
    double chirp_sweep_hz = 125e3;
    double symbol_rate_hz = 62.5e3;
};

std::vector<ScenarioSpec> default_scenarios(int count);

struct DatasetBuildConfig {
    int scenario_count = 5;
    int reps_per_angle = 16; // raw frames per (scenario, base angle)
    double angle_min_deg = -70.0;
    double angle_max_deg = 70.0;
    double angle_step_deg = 10.0;
    std::vector<double> phase_shifts_deg{-4.0, -2.0, 2.0, 4.0};
    std::vector<double> snr_levels_db{0.0, 5.0, 10.0};
    bool include_noiseless = true;  // keep the raw and phase-shifted records
    double two_source_ratio = 1.0;  // two-source records per single-source record
    double min_pair_separation_deg = 10.0; // between base angles of a pair
    std::array<double, 3> split_fractions{0.6, 0.3, 0.1};
    std::size_t frame_length = kDefaultFrameLength;
    std::size_t window_length = kDefaultWindowLength;
    std::size_t window_count = kDefaultWindowCount;
    double sample_rate = 2e6;
    std::uint64_t seed = 1;

    static DatasetBuildConfig from_config(const KeyValueConfig& kv);
    void validate() const;
};

struct SplitCounts {
    std::size_t single = 0;
    std::size_t two = 0;
    std::size_t total() const { return single + two; }
};

struct DatasetManifest {
    std::string records_file = "records.jsonl";
    Scaler scaler;
    std::array<double, 3> split_fractions{0.6, 0.3, 0.1};
    std::map<std::string, SplitCounts> counts; // per split
    DatasetBuildConfig config;
    std::uint64_t seed = 0;
};

// Generates frames, applies the augmentation cascade, serializes features,
// fits the scaler on the train split and writes records.jsonl plus
// manifest.json under out_dir.
DatasetManifest build_dataset(const DatasetBuildConfig& config, const std::string& out_dir);

void save_manifest(const DatasetManifest& manifest, const std::string& dir);
DatasetManifest load_manifest(const std::string& dir);
std::vector<FeatureRecord> load_records(const DatasetManifest& manifest, const std::string& dir);

// Model-ready split with the manifest scaler applied.
template <typename T>
nn::LabeledMatrix<T> to_labeled_matrix(const std::vector<FeatureRecord>& records,
                                       const Scaler& scaler, const std::string& split) {
    std::vector<const FeatureRecord*> chosen;
    for (const FeatureRecord& r : records)
        if (split.empty() || r.meta.split == split) chosen.push_back(&r);
    nn::LabeledMatrix<T> out;
    out.features = Matrix<T>(chosen.size(), kFeatureLength);
    out.class_two.resize(chosen.size());
    out.z1.resize(chosen.size());
    out.z2.resize(chosen.size());
    out.truth.resize(chosen.size());
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        const FeatureRecord& r = *chosen[i];
        if (r.features.size() != kFeatureLength)
            throw data_error("record feature width is not 128");
        T* row = out.features.row(i);
        for (std::size_t j = 0; j < kFeatureLength; ++j) row[j] = static_cast<T>(r.features[j]);
        scaler.apply(row, kFeatureLength);
        out.class_two[i] = static_cast<T>(r.label.class_two_sources);
        out.z1[i] = static_cast<T>(r.label.z1);
        out.z2[i] = static_cast<T>(r.label.z2);
        EvalRecord& t = out.truth[i];
        t.true_count = r.label.class_two_sources ? 2 : 1;
        t.true_angles_deg = r.true_angles_deg();
        t.snr_db = r.meta.snr_db;
    }
    return out;
}

} // namespace aoa
