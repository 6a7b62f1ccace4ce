#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "aoa/dataset.hpp"
#include "aoa/nn/checkpoint.hpp"

using namespace aoa;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

DatasetBuildConfig small_config() {
    DatasetBuildConfig c;
    c.scenario_count = 3;
    c.reps_per_angle = 3;
    c.angle_step_deg = 20.0; // 8 base angles
    c.snr_levels_db = {0.0};
    c.two_source_ratio = 0.25;
    c.frame_length = 1u << 13;
    c.window_length = 1u << 10;
    c.seed = 42;
    return c;
}

std::string file_bytes(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("raw-only build counts 15 angles x 5 scenarios") {
    DatasetBuildConfig c;
    c.scenario_count = 5;
    c.reps_per_angle = 1;
    c.phase_shifts_deg = {};
    c.snr_levels_db = {};
    c.include_noiseless = true;
    c.two_source_ratio = 0.0;
    c.frame_length = 1u << 13;
    c.window_length = 1u << 10;
    const auto dir = temp_dir("aoa_ds_raw");
    const DatasetManifest m = build_dataset(c, dir.string());
    std::size_t total = 0;
    for (const auto& [split, counts] : m.counts) total += counts.total();
    CHECK(total == 75);

    // phase-shift expansion multiplies the raw count by 5
    c.phase_shifts_deg = {-4.0, -2.0, 2.0, 4.0};
    const auto dir2 = temp_dir("aoa_ds_shift");
    const DatasetManifest m2 = build_dataset(c, dir2.string());
    std::size_t total2 = 0;
    for (const auto& [split, counts] : m2.counts) total2 += counts.total();
    CHECK(total2 == 375);
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("dataset build invariants") {
    const auto dir = temp_dir("aoa_ds_small");
    const DatasetBuildConfig c = small_config();
    const DatasetManifest manifest = build_dataset(c, dir.string());
    const std::vector<FeatureRecord> records = load_records(manifest, dir.string());
    REQUIRE(!records.empty());

    std::set<std::string> splits;
    for (const FeatureRecord& r : records) {
        REQUIRE(r.features.size() == kFeatureLength);
        splits.insert(r.meta.split);
        // labels stay inside the FOV, two-source labels ascending
        const auto angles = r.true_angles_deg();
        CHECK(angles[0] >= kFovMinDeg);
        CHECK(angles[1] <= kFovMaxDeg);
        if (r.label.class_two_sources) {
            CHECK(angles[0] < angles[1]);
            // two distinct scenarios recorded in the meta
            CHECK(r.meta.scenario.find('+') != std::string::npos);
            const auto plus = r.meta.scenario.find('+');
            CHECK(r.meta.scenario.substr(0, plus) != r.meta.scenario.substr(plus + 1));
        }
        // per-block unit norm survives the round trip
        for (std::size_t b = 0; b < kFeatureLength / kFeatureBlock; ++b) {
            double norm = 0.0;
            for (std::size_t k = 0; k < kFeatureBlock; ++k)
                norm += r.features[b * kFeatureBlock + k] * r.features[b * kFeatureBlock + k];
            CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    CHECK(splits == std::set<std::string>{"train", "val", "test"});

    // leakage control: every record of a raw frame lives in exactly one
    // split, and both parents of a pair share it
    std::map<std::uint64_t, std::set<std::string>> frame_splits;
    for (const FeatureRecord& r : records) {
        REQUIRE(!r.meta.frames.empty());
        for (std::uint64_t f : r.meta.frames) frame_splits[f].insert(r.meta.split);
    }
    for (const auto& [frame, owners] : frame_splits) CHECK(owners.size() == 1);

    // scaler was fit on train only: train features re-normalize to ~N(0,1)
    std::vector<std::vector<double>> train_scaled;
    for (const FeatureRecord& r : records)
        if (r.meta.split == "train") {
            std::vector<double> f = r.features;
            manifest.scaler.apply(f);
            train_scaled.push_back(f);
        }
    for (std::size_t j = 0; j < kFeatureLength; ++j) {
        double mean = 0.0, var = 0.0;
        for (const auto& f : train_scaled) mean += f[j];
        mean /= static_cast<double>(train_scaled.size());
        for (const auto& f : train_scaled) var += (f[j] - mean) * (f[j] - mean);
        var /= static_cast<double>(train_scaled.size());
        CHECK(std::abs(mean) < 1e-6);
        if (var > 1e-20) CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-6));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("dataset builds are byte-identical") {
    const auto dir1 = temp_dir("aoa_ds_rep1");
    const auto dir2 = temp_dir("aoa_ds_rep2");
    const DatasetBuildConfig c = small_config();
    build_dataset(c, dir1.string());
    build_dataset(c, dir2.string());
    CHECK(file_bytes(dir1 / "records.jsonl") == file_bytes(dir2 / "records.jsonl"));
    CHECK(file_bytes(dir1 / "manifest.json") == file_bytes(dir2 / "manifest.json"));

    DatasetBuildConfig other = c;
    other.seed = 43;
    const auto dir3 = temp_dir("aoa_ds_rep3");
    build_dataset(other, dir3.string());
    CHECK(file_bytes(dir1 / "records.jsonl") != file_bytes(dir3 / "records.jsonl"));
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    std::filesystem::remove_all(dir3);
}

TEST_CASE("jsonl round trip and labeled matrix") {
    const auto dir = temp_dir("aoa_ds_rt");
    const DatasetManifest manifest = build_dataset(small_config(), dir.string());
    const std::vector<FeatureRecord> records = load_records(manifest, dir.string());

    const auto path = dir / "copy.jsonl";
    write_records_jsonl(path.string(), records);
    const std::vector<FeatureRecord> again = read_records_jsonl(path.string());
    REQUIRE(again.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(again[i].features == records[i].features);
        CHECK(again[i].label.z1 == records[i].label.z1);
        CHECK(again[i].meta.aug == records[i].meta.aug);
        CHECK(again[i].meta.split == records[i].meta.split);
    }

    const auto train = to_labeled_matrix<float>(records, manifest.scaler, "train");
    const auto val = to_labeled_matrix<float>(records, manifest.scaler, "val");
    const auto test = to_labeled_matrix<float>(records, manifest.scaler, "test");
    CHECK(train.size() + val.size() + test.size() == records.size());
    CHECK(train.size() == manifest.counts.at("train").total());
    REQUIRE(train.features.cols() == kFeatureLength);

    CHECK_THROWS_AS(read_records_jsonl("/nonexistent/records.jsonl"), data_error);

    // an untrained model scores at chance on a balanced split
    std::vector<FeatureRecord> balanced;
    std::size_t singles = 0, twos = 0;
    for (const FeatureRecord& r : records) {
        if (r.label.class_two_sources) {
            if (twos < 200) {
                balanced.push_back(r);
                ++twos;
            }
        } else if (singles < 200) {
            balanced.push_back(r);
            ++singles;
        }
    }
    REQUIRE(singles == twos);
    nn::DeepAoANet<float> fresh = nn::DeepAoANet<float>::make_fc(99);
    const auto split_all = to_labeled_matrix<float>(balanced, manifest.scaler, "");
    const auto results = nn::evaluate_split(fresh, split_all);
    const double acc = nn::classification_accuracy<float>(results);
    CHECK(acc >= 0.45);
    CHECK(acc <= 0.55);
    std::filesystem::remove_all(dir);
}

TEST_CASE("config parsing") {
    const KeyValueConfig kv = KeyValueConfig::parse_string(
        "scenarios = 4\n"
        "# comment line\n"
        "snr_levels = 0, 5, 10\n"
        "include_noiseless = false\n"
        "angle_step = 5.0\n");
    DatasetBuildConfig c = DatasetBuildConfig::from_config(kv);
    CHECK(c.scenario_count == 4);
    CHECK(c.snr_levels_db == std::vector<double>{0.0, 5.0, 10.0});
    CHECK_FALSE(c.include_noiseless);
    CHECK(c.angle_step_deg == 5.0);
    CHECK(c.reps_per_angle == 16); // untouched default

    CHECK_THROWS_AS(KeyValueConfig::parse_string("not a key value line"), config_error);
    CHECK_THROWS_AS(KeyValueConfig::parse_file("/nonexistent/config"), data_error);

    DatasetBuildConfig bad;
    bad.split_fractions = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), config_error);
    DatasetBuildConfig fov;
    fov.angle_max_deg = 74.0; // +4 shift would leave the FOV
    CHECK_THROWS_AS(fov.validate(), config_error);
}

TEST_CASE("checkpoint round trip") {
    nn::DeepAoANet<float> model = nn::DeepAoANet<float>::make_cnn(7);
    Scaler scaler;
    scaler.mean.assign(kFeatureLength, 0.25);
    scaler.stddev.assign(kFeatureLength, 2.0);

    Matrix<float> x(3, kFeatureLength);
    Rng rng(3);
    for (float& v : x.values()) v = static_cast<float>(rng.gaussian());
    const auto before = model.infer(x);

    const auto dir = temp_dir("aoa_ckpt");
    const std::string path = (dir / "model.ckpt").string();
    nn::save_checkpoint(model, scaler, path, 0.6);
    const nn::Checkpoint loaded = nn::load_checkpoint(path);
    CHECK(loaded.model.kind() == nn::ArchKind::cnn);
    CHECK(loaded.threshold == 0.6);
    CHECK(loaded.scaler.mean == scaler.mean);

    const auto after = loaded.model.infer(x);
    CHECK(before.p == after.p);
    CHECK(before.z1 == after.z1);
    CHECK(before.z2 == after.z2);

    // corrupted file is rejected
    std::ofstream os(path, std::ios::binary);
    os << "garbage";
    os.close();
    CHECK_THROWS_AS(nn::load_checkpoint(path), data_error);
    CHECK_THROWS_AS(nn::load_checkpoint("/nonexistent/model.ckpt"), data_error);
    std::filesystem::remove_all(dir);
}
