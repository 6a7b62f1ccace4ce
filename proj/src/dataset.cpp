#include "aoa/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "aoa/augment.hpp"
#include "aoa/parallel.hpp"
#include "aoa/rng.hpp"

namespace aoa {

using nlohmann::json;

void Scaler::apply(std::vector<double>& features) const {
    apply(features.data(), features.size());
}

Scaler fit_scaler(const std::vector<const std::vector<double>*>& rows) {
    if (rows.empty()) throw std::invalid_argument("scaler needs at least one row");
    const std::size_t width = rows.front()->size();
    Scaler scaler;
    scaler.mean.assign(width, 0.0);
    scaler.stddev.assign(width, 0.0);
    for (const auto* row : rows) {
        if (row->size() != width) throw std::invalid_argument("inconsistent feature widths");
        for (std::size_t j = 0; j < width; ++j) scaler.mean[j] += (*row)[j];
    }
    for (double& m : scaler.mean) m /= static_cast<double>(rows.size());
    for (const auto* row : rows)
        for (std::size_t j = 0; j < width; ++j) {
            const double d = (*row)[j] - scaler.mean[j];
            scaler.stddev[j] += d * d;
        }
    for (double& s : scaler.stddev) {
        s = std::sqrt(s / static_cast<double>(rows.size()));
        if (s < 1e-12) s = 1.0; // constant feature: leave it centered only
    }
    return scaler;
}

namespace {

json record_to_json(const FeatureRecord& r) {
    json j;
    j["features"] = r.features;
    j["label"] = {r.label.class_two_sources, r.label.z1, r.label.z2};
    json meta;
    if (r.meta.noiseless)
        meta["snr_db"] = nullptr;
    else
        meta["snr_db"] = r.meta.snr_db;
    meta["scenario"] = r.meta.scenario;
    meta["aug"] = r.meta.aug;
    meta["seed"] = r.meta.seed;
    meta["split"] = r.meta.split;
    meta["frames"] = r.meta.frames;
    j["meta"] = meta;
    return j;
}

FeatureRecord record_from_json(const json& j) {
    FeatureRecord r;
    r.features = j.at("features").get<std::vector<double>>();
    const json& label = j.at("label");
    r.label.class_two_sources = label.at(0).get<int>();
    r.label.z1 = label.at(1).get<double>();
    r.label.z2 = label.at(2).get<double>();
    const json& meta = j.at("meta");
    if (meta.at("snr_db").is_null()) {
        r.meta.noiseless = true;
        r.meta.snr_db = 0.0;
    } else {
        r.meta.snr_db = meta.at("snr_db").get<double>();
    }
    r.meta.scenario = meta.at("scenario").get<std::string>();
    r.meta.aug = meta.at("aug").get<std::string>();
    r.meta.seed = meta.at("seed").get<std::uint64_t>();
    r.meta.split = meta.value("split", "");
    if (meta.contains("frames"))
        r.meta.frames = meta.at("frames").get<std::vector<std::uint64_t>>();
    return r;
}

} // namespace

void write_records_jsonl(const std::string& path, const std::vector<FeatureRecord>& records) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    for (const FeatureRecord& r : records) os << record_to_json(r).dump() << '\n';
    if (!os) throw data_error("failed writing records: " + path);
}

std::vector<FeatureRecord> read_records_jsonl(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open records file: " + path);
    std::vector<FeatureRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw data_error("bad record on line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

std::vector<ScenarioSpec> default_scenarios(int count) {
    if (count < 1) throw config_error("at least one scenario is required");
    // waveform families with low cross-correlation over one window, mirroring
    // recordings taken in distinct environments
    std::vector<ScenarioSpec> all{
        {"los-qpsk", BasebandKind::random_qpsk, 0.0, 0.0, 62.5e3},
        {"reflector-chirp", BasebandKind::linear_chirp, 0.0, 125e3, 0.0},
        {"office-qpsk", BasebandKind::random_qpsk, 0.0, 0.0, 31.25e3},
        {"corridor-tone", BasebandKind::complex_tone, 25e3, 0.0, 0.0},
        {"outdoor-qpsk", BasebandKind::random_qpsk, 0.0, 0.0, 125e3},
    };
    std::vector<ScenarioSpec> out;
    for (int i = 0; i < count; ++i) {
        ScenarioSpec s = all[static_cast<std::size_t>(i) % all.size()];
        if (i >= static_cast<int>(all.size())) {
            s.name += "-" + std::to_string(i / static_cast<int>(all.size()));
            s.tone_offset_hz += 7e3 * static_cast<double>(i);
            s.symbol_rate_hz *= 1.0 + 0.1 * static_cast<double>(i % 7);
        }
        out.push_back(s);
    }
    return out;
}

DatasetBuildConfig DatasetBuildConfig::from_config(const KeyValueConfig& kv) {
    DatasetBuildConfig c;
    c.scenario_count = static_cast<int>(kv.get_int("scenarios", c.scenario_count));
    c.reps_per_angle = static_cast<int>(kv.get_int("reps_per_angle", c.reps_per_angle));
    c.angle_min_deg = kv.get_double("angle_min", c.angle_min_deg);
    c.angle_max_deg = kv.get_double("angle_max", c.angle_max_deg);
    c.angle_step_deg = kv.get_double("angle_step", c.angle_step_deg);
    c.phase_shifts_deg = kv.get_double_list("phase_shifts", c.phase_shifts_deg);
    c.snr_levels_db = kv.get_double_list("snr_levels", c.snr_levels_db);
    c.include_noiseless = kv.get_bool("include_noiseless", c.include_noiseless);
    c.two_source_ratio = kv.get_double("two_source_ratio", c.two_source_ratio);
    c.min_pair_separation_deg = kv.get_double("min_pair_separation", c.min_pair_separation_deg);
    const auto split = kv.get_double_list(
        "split_fractions",
        {c.split_fractions[0], c.split_fractions[1], c.split_fractions[2]});
    if (split.size() != 3) throw config_error("split_fractions needs three values");
    c.split_fractions = {split[0], split[1], split[2]};
    c.frame_length = static_cast<std::size_t>(
        kv.get_u64("frame_length", static_cast<unsigned long long>(c.frame_length)));
    c.window_length = static_cast<std::size_t>(
        kv.get_u64("window_length", static_cast<unsigned long long>(c.window_length)));
    c.window_count = static_cast<std::size_t>(
        kv.get_u64("window_count", static_cast<unsigned long long>(c.window_count)));
    c.sample_rate = kv.get_double("sample_rate", c.sample_rate);
    c.seed = kv.get_u64("seed", c.seed);
    return c;
}

void DatasetBuildConfig::validate() const {
    if (scenario_count < 1) throw config_error("scenario count must be positive");
    if (reps_per_angle < 1) throw config_error("reps_per_angle must be positive");
    if (angle_step_deg <= 0.0) throw config_error("angle step must be positive");
    if (angle_min_deg > angle_max_deg) throw config_error("angle range is empty");
    double max_shift = 0.0;
    for (double phi : phase_shifts_deg) max_shift = std::max(max_shift, std::abs(phi));
    if (angle_min_deg - max_shift < kFovMinDeg || angle_max_deg + max_shift > kFovMaxDeg)
        throw config_error("base angles plus phase shifts leave the [-74, 74] FOV");
    const double fsum = split_fractions[0] + split_fractions[1] + split_fractions[2];
    if (std::abs(fsum - 1.0) > 1e-9) throw config_error("split fractions must sum to 1");
    if (frame_length < window_length * window_count)
        throw config_error("frame shorter than window_length * window_count");
    if (two_source_ratio > 0.0 && scenario_count < 2)
        throw config_error("two-source records need at least two scenarios");
    if (!include_noiseless && snr_levels_db.empty())
        throw config_error("no records to build: noiseless excluded and no SNR levels");
}

namespace {

struct RawFrame {
    std::size_t id = 0;
    int scenario = 0;
    double base_angle_deg = 0.0;
    std::uint64_t baseband_seed = 0;
    std::string split;
};

struct VariantRef {
    std::size_t raw = 0;  // index into raws
    double phi_deg = 0.0; // 0 for the unshifted frame
};

struct RecordTask {
    bool pair = false;
    VariantRef a;
    VariantRef b;                // pair only
    std::uint64_t dphi_seed = 0; // pair only
    std::optional<double> snr_db;
    std::uint64_t noise_seed = 0;
    std::string split;
};

std::string format_phi(double phi) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+g", phi);
    return buf;
}

std::string format_snr(double snr) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%gdB", snr);
    return buf;
}

} // namespace

DatasetManifest build_dataset(const DatasetBuildConfig& config, const std::string& out_dir) {
    config.validate();
    std::filesystem::create_directories(out_dir);
    const std::vector<ScenarioSpec> scenarios = default_scenarios(config.scenario_count);

    std::vector<double> base_angles;
    for (double a = config.angle_min_deg; a <= config.angle_max_deg + 1e-9;
         a += config.angle_step_deg)
        base_angles.push_back(a);

    // raw frames; every augmented descendant inherits the raw frame's split
    std::vector<RawFrame> raws;
    const std::uint64_t raw_stream = Rng::derive(config.seed, 0x72617721); // 'raw!'
    for (int s = 0; s < config.scenario_count; ++s)
        for (double angle : base_angles)
            for (int rep = 0; rep < config.reps_per_angle; ++rep) {
                RawFrame raw;
                raw.id = raws.size();
                raw.scenario = s;
                raw.base_angle_deg = angle;
                raw.baseband_seed = Rng::derive(raw_stream, raw.id);
                raws.push_back(raw);
            }

    {
        std::vector<std::size_t> order(raws.size());
        std::iota(order.begin(), order.end(), 0);
        Rng split_rng(Rng::derive(config.seed, 0x73706c74)); // 'splt'
        deterministic_shuffle(order, split_rng);
        const std::size_t n = raws.size();
        const std::size_t n_val = static_cast<std::size_t>(
            std::llround(config.split_fractions[1] * static_cast<double>(n)));
        const std::size_t n_test = static_cast<std::size_t>(
            std::llround(config.split_fractions[2] * static_cast<double>(n)));
        for (std::size_t i = 0; i < n; ++i) {
            const char* split = i < n_val            ? "val"
                                : i < n_val + n_test ? "test"
                                                     : "train";
            raws[order[i]].split = split;
        }
    }

    std::vector<double> variants{0.0};
    variants.insert(variants.end(), config.phase_shifts_deg.begin(),
                    config.phase_shifts_deg.end());

    // single-source tasks
    std::vector<RecordTask> tasks;
    const std::uint64_t noise_stream = Rng::derive(config.seed, 0x6e736531); // 'nse1'
    for (const RawFrame& raw : raws)
        for (std::size_t v = 0; v < variants.size(); ++v) {
            if (config.include_noiseless) {
                RecordTask t;
                t.a = {raw.id, variants[v]};
                t.noise_seed = Rng::derive(noise_stream, raw.id * 64 + v);
                t.split = raw.split;
                tasks.push_back(t);
            }
            for (std::size_t l = 0; l < config.snr_levels_db.size(); ++l) {
                RecordTask t;
                t.a = {raw.id, variants[v]};
                t.snr_db = config.snr_levels_db[l];
                t.noise_seed = Rng::derive(noise_stream, (raw.id * 64 + v) * 64 + l + 1);
                t.split = raw.split;
                tasks.push_back(t);
            }
        }
    std::map<std::string, std::size_t> singles_per_split;
    for (const RecordTask& t : tasks) ++singles_per_split[t.split];

    // two-source tasks: sample raw-frame pairs inside one split, distinct
    // scenarios, separated base angles; the valid combinations are
    // enumerated up front so sparse splits cannot stall the sampler
    for (const std::string split : {"train", "val", "test"}) {
        const auto want = static_cast<std::size_t>(std::llround(
            config.two_source_ratio * static_cast<double>(singles_per_split[split])));
        if (want == 0) continue;
        std::vector<std::size_t> members;
        for (const RawFrame& raw : raws)
            if (raw.split == split) members.push_back(raw.id);
        std::vector<std::pair<std::size_t, std::size_t>> valid;
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                const RawFrame& ra = raws[members[i]];
                const RawFrame& rb = raws[members[j]];
                if (ra.scenario == rb.scenario) continue;
                if (std::abs(ra.base_angle_deg - rb.base_angle_deg) <
                    config.min_pair_separation_deg - 1e-9)
                    continue;
                valid.emplace_back(members[i], members[j]);
            }
        if (valid.empty())
            throw config_error("split " + std::string(split) +
                               " admits no valid two-source pair; increase reps_per_angle or "
                               "relax min_pair_separation");
        Rng pair_rng(Rng::derive(config.seed, 0x70616972 + (split == "train" ? 0u
                                                            : split == "val" ? 1u
                                                                             : 2u))); // 'pair'
        for (std::size_t made = 0; made < want; ++made) {
            auto [ia, ib] = valid[pair_rng.below(valid.size())];
            if (pair_rng.below(2) == 1) std::swap(ia, ib);
            RecordTask t;
            t.pair = true;
            t.a = {ia, variants[pair_rng.below(variants.size())]};
            t.b = {ib, variants[pair_rng.below(variants.size())]};
            t.dphi_seed = pair_rng.next_u64();
            if (!config.snr_levels_db.empty())
                t.snr_db = config.snr_levels_db[pair_rng.below(config.snr_levels_db.size())];
            t.noise_seed = pair_rng.next_u64();
            t.split = split;
            tasks.push_back(t);
        }
    }

    // generate features in parallel; tasks are fully resolved so any order
    // of execution yields the same records
    std::vector<FeatureRecord> records(tasks.size());
    std::vector<std::string> errors(tasks.size());
    auto make_single_frame = [&](const VariantRef& v) {
        // tasks arrive grouped by raw frame, so a one-slot cache per thread
        // avoids re-synthesizing the same noiseless frame for every variant
        thread_local std::size_t cached_id = SIZE_MAX;
        thread_local IQFrame cached_frame;
        const RawFrame& raw = raws[v.raw];
        if (cached_id != raw.id) {
            const ScenarioSpec& scenario = scenarios[static_cast<std::size_t>(raw.scenario)];
            SourceSpec src;
            src.angle_deg = raw.base_angle_deg;
            src.kind = scenario.kind;
            src.tone_offset_hz = scenario.tone_offset_hz;
            src.chirp_sweep_hz = scenario.chirp_sweep_hz;
            src.symbol_rate_hz = scenario.symbol_rate_hz;
            src.baseband_seed = raw.baseband_seed;
            cached_frame = synthesize_frame({src}, ArrayConfig{}, config.frame_length,
                                            std::nullopt, config.sample_rate, raw.baseband_seed);
            cached_id = raw.id;
        }
        if (v.phi_deg == 0.0) return cached_frame;
        return phase_shift(cached_frame, raw.base_angle_deg, v.phi_deg);
    };

    par::parallel_for(static_cast<std::int64_t>(tasks.size()), [&](std::int64_t ti) {
        const RecordTask& task = tasks[static_cast<std::size_t>(ti)];
        try {
            IQFrame frame = make_single_frame(task.a);
            FeatureRecord record;
            std::string aug;
            if (task.a.phi_deg != 0.0) aug = "phase:" + format_phi(task.a.phi_deg);
            if (task.pair) {
                const IQFrame other = make_single_frame(task.b);
                const double dphi = draw_carrier_phase(task.dphi_seed);
                frame = superimpose_with_phase(frame, other, dphi);
                if (task.b.phi_deg != 0.0)
                    aug += (aug.empty() ? "" : ";") + std::string("phase:") +
                           format_phi(task.b.phi_deg);
                char buf[48];
                std::snprintf(buf, sizeof(buf), "superpose:Δφ=%.3f", dphi);
                aug += (aug.empty() ? "" : ";") + std::string(buf);
            }
            if (task.snr_db) {
                frame = add_awgn(frame, *task.snr_db, task.noise_seed);
                aug += (aug.empty() ? "" : ";") + std::string("awgn:") + format_snr(*task.snr_db);
            }
            if (aug.empty()) aug = "raw";

            const CovarianceStack stack =
                stack_covariances(frame, config.window_length, config.window_count);
            record.features = serialize_features(stack).values;

            const RawFrame& ra = raws[task.a.raw];
            const double theta_a = ra.base_angle_deg + task.a.phi_deg;
            if (task.pair) {
                const RawFrame& rb = raws[task.b.raw];
                const double theta_b = rb.base_angle_deg + task.b.phi_deg;
                record.label = nn::encode_label(theta_a, theta_b);
                record.meta.scenario = scenarios[static_cast<std::size_t>(ra.scenario)].name +
                                       "+" +
                                       scenarios[static_cast<std::size_t>(rb.scenario)].name;
                record.meta.seed = task.dphi_seed;
            } else {
                record.label = nn::encode_label(theta_a, std::nullopt);
                record.meta.scenario = scenarios[static_cast<std::size_t>(ra.scenario)].name;
                record.meta.seed = task.snr_db ? task.noise_seed : ra.baseband_seed;
            }
            record.meta.aug = aug;
            record.meta.split = task.split;
            record.meta.frames.push_back(task.a.raw);
            if (task.pair) record.meta.frames.push_back(task.b.raw);
            if (task.snr_db) {
                record.meta.snr_db = *task.snr_db;
            } else {
                record.meta.noiseless = true;
            }
            records[static_cast<std::size_t>(ti)] = std::move(record);
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(ti)] = e.what();
        }
    });
    for (const std::string& err : errors)
        if (!err.empty()) throw data_error("record generation failed: " + err);

    // scaler sees the training split only
    std::vector<const std::vector<double>*> train_rows;
    for (const FeatureRecord& r : records)
        if (r.meta.split == "train") train_rows.push_back(&r.features);
    if (train_rows.empty()) throw config_error("training split is empty; widen the fractions");

    DatasetManifest manifest;
    manifest.scaler = fit_scaler(train_rows);
    manifest.split_fractions = config.split_fractions;
    manifest.config = config;
    manifest.seed = config.seed;
    for (const FeatureRecord& r : records) {
        SplitCounts& c = manifest.counts[r.meta.split];
        if (r.label.class_two_sources)
            ++c.two;
        else
            ++c.single;
    }

    write_records_jsonl((std::filesystem::path(out_dir) / manifest.records_file).string(),
                        records);
    save_manifest(manifest, out_dir);
    return manifest;
}

namespace {

json config_to_json(const DatasetBuildConfig& c) {
    json j;
    j["scenarios"] = c.scenario_count;
    j["reps_per_angle"] = c.reps_per_angle;
    j["angle_min"] = c.angle_min_deg;
    j["angle_max"] = c.angle_max_deg;
    j["angle_step"] = c.angle_step_deg;
    j["phase_shifts"] = c.phase_shifts_deg;
    j["snr_levels"] = c.snr_levels_db;
    j["include_noiseless"] = c.include_noiseless;
    j["two_source_ratio"] = c.two_source_ratio;
    j["min_pair_separation"] = c.min_pair_separation_deg;
    j["split_fractions"] = c.split_fractions;
    j["frame_length"] = c.frame_length;
    j["window_length"] = c.window_length;
    j["window_count"] = c.window_count;
    j["sample_rate"] = c.sample_rate;
    j["seed"] = c.seed;
    return j;
}

DatasetBuildConfig config_from_json(const json& j) {
    DatasetBuildConfig c;
    c.scenario_count = j.at("scenarios").get<int>();
    c.reps_per_angle = j.at("reps_per_angle").get<int>();
    c.angle_min_deg = j.at("angle_min").get<double>();
    c.angle_max_deg = j.at("angle_max").get<double>();
    c.angle_step_deg = j.at("angle_step").get<double>();
    c.phase_shifts_deg = j.at("phase_shifts").get<std::vector<double>>();
    c.snr_levels_db = j.at("snr_levels").get<std::vector<double>>();
    c.include_noiseless = j.at("include_noiseless").get<bool>();
    c.two_source_ratio = j.at("two_source_ratio").get<double>();
    c.min_pair_separation_deg = j.at("min_pair_separation").get<double>();
    const auto split = j.at("split_fractions").get<std::vector<double>>();
    c.split_fractions = {split[0], split[1], split[2]};
    c.frame_length = j.at("frame_length").get<std::size_t>();
    c.window_length = j.at("window_length").get<std::size_t>();
    c.window_count = j.at("window_count").get<std::size_t>();
    c.sample_rate = j.at("sample_rate").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

} // namespace

void save_manifest(const DatasetManifest& manifest, const std::string& dir) {
    json j;
    j["records"] = manifest.records_file;
    j["scaler"] = {{"mean", manifest.scaler.mean}, {"std", manifest.scaler.stddev}};
    j["split_fractions"] = manifest.split_fractions;
    json counts;
    for (const auto& [split, c] : manifest.counts)
        counts[split] = {{"single", c.single}, {"two", c.two}};
    j["counts"] = counts;
    j["config"] = config_to_json(manifest.config);
    j["seed"] = manifest.seed;
    std::ofstream os(std::filesystem::path(dir) / "manifest.json", std::ios::binary);
    if (!os) throw data_error("cannot write manifest under " + dir);
    os << j.dump(2) << '\n';
}

DatasetManifest load_manifest(const std::string& dir) {
    const auto path = std::filesystem::path(dir) / "manifest.json";
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open manifest: " + path.string());
    json j;
    try {
        is >> j;
        DatasetManifest m;
        m.records_file = j.at("records").get<std::string>();
        m.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
        m.scaler.stddev = j.at("scaler").at("std").get<std::vector<double>>();
        const auto split = j.at("split_fractions").get<std::vector<double>>();
        m.split_fractions = {split[0], split[1], split[2]};
        for (const auto& [key, value] : j.at("counts").items()) {
            SplitCounts c;
            c.single = value.at("single").get<std::size_t>();
            c.two = value.at("two").get<std::size_t>();
            m.counts[key] = c;
        }
        m.config = config_from_json(j.at("config"));
        m.seed = j.at("seed").get<std::uint64_t>();
        return m;
    } catch (const json::exception& e) {
        throw data_error("malformed manifest: " + std::string(e.what()));
    }
}

std::vector<FeatureRecord> load_records(const DatasetManifest& manifest, const std::string& dir) {
    return read_records_jsonl((std::filesystem::path(dir) / manifest.records_file).string());
}

} // namespace aoa
