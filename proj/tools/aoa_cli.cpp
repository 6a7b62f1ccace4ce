// Command-line surface over the toolkit: simulation, dataset builds,
// training, evaluation, the MUSIC baseline, latency benchmarks and CSV plot
// series.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <unistd.h>

#include "aoa/augment.hpp"
#include "aoa/covariance.hpp"
#include "aoa/dataset.hpp"
#include "aoa/metrics.hpp"
#include "aoa/music.hpp"
#include "aoa/nn/checkpoint.hpp"
#include "aoa/nn/train.hpp"
#include "aoa/signal_sim.hpp"

using namespace aoa;
using nlohmann::json;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kData = 3, kNumeric = 4 };

struct ArrayFlags {
    int elements = 4;
    double alpha = 0.2;

    ArrayConfig config() const {
        ArrayConfig c;
        c.num_elements = elements;
        c.spacing_factor = alpha;
        return c;
    }
};

void add_array_flags(CLI::App* cmd, ArrayFlags& flags) {
    cmd->add_option("--elements", flags.elements, "Array element count")->capture_default_str();
    cmd->add_option("--alpha", flags.alpha, "Inter-element spacing factor")
        ->capture_default_str();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    return os;
}

// single-instance training guard
class LockFile {
public:
    explicit LockFile(const std::string& path) : path_(path) {
        fd_ = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw config_error("another training run holds " + path +
                               " (remove the lock file if that run is gone)");
    }
    ~LockFile() {
        if (fd_ >= 0) {
            ::close(fd_);
            std::filesystem::remove(path_);
        }
    }

private:
    std::string path_;
    int fd_ = -1;
};

struct SimulateArgs {
    std::vector<double> angles;
    std::string kind = "qpsk";
    std::vector<double> powers;
    double snr = 0.0;
    bool noiseless = false;
    std::size_t length = kDefaultFrameLength;
    double sample_rate = 2e6;
    std::uint64_t seed = 1;
    std::string out;
    ArrayFlags array;
};

int cmd_simulate(const SimulateArgs& args) {
    if (args.angles.size() > 2) throw config_error("at most two source angles");
    std::vector<SourceSpec> sources;
    for (std::size_t i = 0; i < args.angles.size(); ++i) {
        SourceSpec src;
        src.angle_deg = args.angles[i];
        src.kind = baseband_kind_from_string(args.kind);
        src.power = i < args.powers.size() ? args.powers[i] : 1.0;
        src.baseband_seed = Rng::derive(args.seed, 100 + i);
        sources.push_back(src);
    }
    const std::optional<double> snr =
        args.noiseless ? std::nullopt : std::optional<double>(args.snr);
    const IQFrame frame = synthesize_frame(sources, args.array.config(), args.length, snr,
                                           args.sample_rate, args.seed);
    save_frame(frame, args.out);
    std::cout << "wrote " << args.out << ": " << frame.num_channels() << " channels x "
              << frame.num_samples() << " samples\n";
    return kOk;
}

struct BuildArgs {
    std::string out;
    std::string config_file;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int cmd_build_dataset(const BuildArgs& args) {
    DatasetBuildConfig config;
    if (!args.config_file.empty())
        config = DatasetBuildConfig::from_config(KeyValueConfig::parse_file(args.config_file));
    if (args.seed_set) config.seed = args.seed;
    const auto t0 = std::chrono::steady_clock::now();
    const DatasetManifest manifest = build_dataset(config, args.out);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "dataset written to " << args.out << " in " << secs << " s\n";
    for (const auto& [split, counts] : manifest.counts)
        std::cout << "  " << split << ": " << counts.single << " single + " << counts.two
                  << " two-source = " << counts.total() << "\n";
    return kOk;
}

struct TrainArgs {
    std::string dataset;
    std::string arch = "fc";
    std::string out;
    std::string config_file;
    std::uint64_t seed = 1;
    int stage1_epochs = 40;
    int stage2_epochs = 10;
    double threshold = 0.5;
    bool quiet = false;
};

int cmd_train(TrainArgs args) {
    if (!args.config_file.empty()) {
        const KeyValueConfig kv = KeyValueConfig::parse_file(args.config_file);
        args.arch = kv.get_string("arch", args.arch);
        args.seed = kv.get_u64("seed", args.seed);
        args.stage1_epochs = static_cast<int>(kv.get_int("stage1_epochs", args.stage1_epochs));
        args.stage2_epochs = static_cast<int>(kv.get_int("stage2_epochs", args.stage2_epochs));
        args.threshold = kv.get_double("threshold", args.threshold);
    }
    std::filesystem::create_directories(args.out);
    const DatasetManifest manifest = load_manifest(args.dataset);
    const std::vector<FeatureRecord> records = load_records(manifest, args.dataset);
    const auto train = to_labeled_matrix<float>(records, manifest.scaler, "train");
    const auto val = to_labeled_matrix<float>(records, manifest.scaler, "val");
    if (train.size() == 0) throw data_error("dataset has no training records");

    const std::string ckpt_path = (std::filesystem::path(args.out) / "model.ckpt").string();
    LockFile lock(ckpt_path + ".lock");

    nn::DeepAoANet<float> model =
        nn::DeepAoANet<float>::make(nn::arch_from_string(args.arch), args.seed);
    nn::TrainConfig config;
    config.seed = args.seed;
    config.classification_threshold = args.threshold;
    config.schedule = {{args.stage1_epochs, {0.1, 1.0, 1.0}},
                       {args.stage2_epochs, {0.001, 1.0, 1.0}}};
    if (!args.quiet)
        config.on_epoch = [](const nn::EpochStats& s) {
            std::cout << "epoch " << s.epoch << ": L_c=" << s.loss_classification
                      << " L_r1=" << s.loss_regression1 << " L_r2=" << s.loss_regression2
                      << " val_rmse=" << s.val_rmse << " val_acc=" << s.val_accuracy << std::endl;
        };

    const auto t0 = std::chrono::steady_clock::now();
    const auto history = nn::train_model(model, train, val, config);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nn::save_checkpoint(model, manifest.scaler, ckpt_path, args.threshold);
    auto hist = open_out((std::filesystem::path(args.out) / "history.csv").string());
    hist << "epoch,loss_c,loss_r1,loss_r2,val_rmse,val_acc\n";
    for (const nn::EpochStats& s : history)
        hist << s.epoch << ',' << s.loss_classification << ',' << s.loss_regression1 << ','
             << s.loss_regression2 << ',' << s.val_rmse << ',' << s.val_accuracy << '\n';
    std::cout << "trained " << args.arch << " (" << model.parameter_count() << " parameters) in "
              << secs << " s; checkpoint at " << ckpt_path << "\n";
    return kOk;
}

struct EvalArgs {
    std::string dataset;
    std::string checkpoint;
    std::string split = "test";
    std::string out;
};

int cmd_eval(const EvalArgs& args) {
    std::filesystem::create_directories(args.out);
    const DatasetManifest manifest = load_manifest(args.dataset);
    const std::vector<FeatureRecord> records = load_records(manifest, args.dataset);
    nn::Checkpoint ckpt = nn::load_checkpoint(args.checkpoint);
    const auto split = to_labeled_matrix<float>(records, ckpt.scaler, args.split);
    if (split.size() == 0) throw data_error("no records in split " + args.split);

    const std::vector<EvalRecord> results =
        nn::evaluate_split(ckpt.model, split, ckpt.threshold);
    const PenalizedErrors errors = penalized_errors(results);
    const ConfusionMatrix cm = confusion_matrix(results);

    auto metrics = open_out((std::filesystem::path(args.out) / "metrics.csv").string());
    metrics << "metric,value\n";
    metrics << "penalized_rmse_deg," << errors.rmse << "\n";
    metrics << "penalized_mae_deg," << errors.mae << "\n";
    metrics << "per_angle_rmse_deg," << errors.rmse_per_angle << "\n";
    metrics << "per_angle_mae_deg," << errors.mae_per_angle << "\n";
    metrics << "classification_accuracy," << cm.accuracy() << "\n";

    auto confusion = open_out((std::filesystem::path(args.out) / "confusion.txt").string());
    confusion << cm.formatted();

    auto rows = open_out((std::filesystem::path(args.out) / "records.csv").string());
    rows << "true_count,true_theta1,true_theta2,pred_count,pred_theta1,pred_theta2,snr_db\n";
    for (const EvalRecord& r : results)
        rows << r.true_count << ',' << r.true_angles_deg[0] << ',' << r.true_angles_deg[1] << ','
             << r.pred_count << ',' << r.pred_angles_deg[0] << ',' << r.pred_angles_deg[1] << ','
             << r.snr_db << '\n';

    std::cout << "split " << args.split << ": penalized RMSE " << errors.rmse << " deg, MAE "
              << errors.mae << " deg, accuracy " << cm.accuracy() * 100.0 << "%\n"
              << cm.formatted();
    return kOk;
}

struct InferArgs {
    std::string checkpoint;
    std::string frame;
    double detect_rel = 0.1;
    bool detect_abs = false;
    double detect_abs_threshold = 1e-4;
    ArrayFlags array;
};

int cmd_infer(const InferArgs& args) {
    nn::Checkpoint ckpt = nn::load_checkpoint(args.checkpoint);
    const IQFrame frame = load_frame(args.frame, args.array.config());
    const std::size_t window = frame.num_samples() / kDefaultWindowCount;
    const CovarianceStack stack = stack_covariances(frame, window, kDefaultWindowCount);
    const CxMatrix avg = average_covariance(stack);

    // signal-presence gate before the network sees anything
    const double threshold = args.detect_abs ? args.detect_abs_threshold
                                             : relative_detection_threshold(avg, args.detect_rel);
    json out;
    if (!detect_signal(avg, threshold)) {
        out["L"] = 0;
        out["angles_deg"] = json::array();
        out["p"] = nullptr;
        std::cout << out.dump() << "\n";
        return kOk;
    }

    std::vector<double> features = serialize_features(stack).values;
    Matrix<float> x(1, kFeatureLength);
    for (std::size_t i = 0; i < kFeatureLength; ++i) x(0, i) = static_cast<float>(features[i]);
    ckpt.scaler.apply(x.row(0), kFeatureLength);
    const nn::HeadOutputs<float> heads = ckpt.model.infer(x);
    const nn::Prediction pred = nn::decode_prediction(heads.p[0], heads.z1[0], heads.z2[0],
                                                      ckpt.threshold);
    out["L"] = pred.num_sources;
    out["angles_deg"] = pred.angles_deg;
    out["p"] = pred.p_two;
    std::cout << out.dump() << "\n";
    return kOk;
}

struct MusicArgs {
    std::string frame;
    int num_sources = 1;
    double grid_step = 0.1;
    std::string out;
    ArrayFlags array;
};

int cmd_music(const MusicArgs& args) {
    const ArrayConfig config = args.array.config();
    if (args.num_sources < 1 || args.num_sources >= config.num_elements)
        throw config_error("number of sources must satisfy 1 <= L < M");
    const IQFrame frame = load_frame(args.frame, config);
    const std::size_t window = frame.num_samples() / kDefaultWindowCount;
    const CovarianceStack stack = stack_covariances(frame, window, kDefaultWindowCount);
    const CxMatrix avg = average_covariance(stack);

    if (!args.out.empty()) {
        std::vector<double> grid;
        for (double a = -90.0; a <= 90.0 + 1e-9; a += args.grid_step)
            grid.push_back(std::min(a, 90.0));
        const MusicSpectrum spec = music_spectrum(avg, args.num_sources, grid, config);
        auto os = open_out(args.out);
        os << "angle_deg,power\n";
        for (std::size_t i = 0; i < spec.grid_deg.size(); ++i)
            os << spec.grid_deg[i] << ',' << spec.power[i] << '\n';
    }

    const MusicEstimate est = estimate_aoa_music(avg, args.num_sources, config, args.grid_step);
    json out;
    out["angles_deg"] = est.angles_deg;
    out["ambiguous"] = est.ambiguous;
    std::cout << out.dump() << "\n";
    return kOk;
}

struct BenchArgs {
    std::string arch = "both";
    int runs = 1000;
    std::string checkpoint;
    std::string out;
    bool with_music = false;
    std::uint64_t seed = 1;
};

double bench_model(nn::DeepAoANet<float>& model, const Scaler& scaler, int runs,
                   std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> features(kFeatureLength);
    // end to end: scale, forward, decode
    const auto t0 = std::chrono::steady_clock::now();
    double sink = 0.0;
    for (int i = 0; i < runs; ++i) {
        for (double& v : features) v = rng.uniform(-1.0, 1.0);
        Matrix<float> x(1, kFeatureLength);
        for (std::size_t j = 0; j < kFeatureLength; ++j) x(0, j) = static_cast<float>(features[j]);
        scaler.apply(x.row(0), kFeatureLength);
        const nn::HeadOutputs<float> heads = model.infer(x);
        const nn::Prediction pred =
            nn::decode_prediction(heads.p[0], heads.z1[0], heads.z2[0]);
        sink += pred.angles_deg[0];
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (sink == 12345.678) std::cerr << "";
    return secs * 1e3 / runs;
}

int cmd_bench(const BenchArgs& args) {
    Scaler scaler;
    scaler.mean.assign(kFeatureLength, 0.0);
    scaler.stddev.assign(kFeatureLength, 1.0);

    struct Row {
        std::string name;
        std::size_t params;
        double latency_ms;
    };
    std::vector<Row> rows;

    auto add_model = [&](nn::ArchKind kind) {
        nn::DeepAoANet<float> model = nn::DeepAoANet<float>::make(kind, args.seed);
        if (!args.checkpoint.empty()) {
            nn::Checkpoint ckpt = nn::load_checkpoint(args.checkpoint);
            if (ckpt.model.kind() == kind) model = std::move(ckpt.model);
        }
        rows.push_back({"DeepAoANet-" + std::string(kind == nn::ArchKind::fc ? "FC" : "CNN"),
                        model.parameter_count(),
                        bench_model(model, scaler, args.runs, args.seed)});
    };
    if (args.arch == "fc" || args.arch == "both") add_model(nn::ArchKind::fc);
    if (args.arch == "cnn" || args.arch == "both") add_model(nn::ArchKind::cnn);

    if (args.with_music) {
        SourceSpec src;
        src.angle_deg = 20.0;
        src.baseband_seed = 9;
        const IQFrame frame =
            synthesize_frame({src}, ArrayConfig{}, kDefaultFrameLength, 10.0, 2e6, 3);
        const CovarianceStack stack = stack_covariances(frame);
        const CxMatrix avg = average_covariance(stack);
        const int music_runs = std::max(1, args.runs / 10);
        const auto t0 = std::chrono::steady_clock::now();
        for (int i = 0; i < music_runs; ++i) estimate_aoa_music(avg, 1, frame.config);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back({"MUSIC (0.1 deg grid)", 0, secs * 1e3 / music_runs});
    }

    std::cout << "model                    parameters   latency (ms/sample over "
              << args.runs << " runs)\n";
    for (const Row& r : rows) {
        std::printf("%-24s %10zu   %.3f\n", r.name.c_str(), r.params, r.latency_ms);
    }
    if (!args.out.empty()) {
        auto os = open_out(args.out);
        os << "model,parameters,latency_ms\n";
        for (const Row& r : rows) os << r.name << ',' << r.params << ',' << r.latency_ms << '\n';
    }
    return kOk;
}

struct PlotArgs {
    std::string what;
    std::string records;
    std::string out;
    double steer = 0.0;
    double grid_step = 0.1;
    ArrayFlags array{4, 0.25};
};

std::vector<EvalRecord> read_records_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw data_error("cannot open records csv: " + path);
    std::vector<EvalRecord> records;
    std::string line;
    std::getline(is, line); // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        EvalRecord r;
        std::array<double, 7> v{};
        std::size_t pos = 0;
        for (std::size_t i = 0; i < 7; ++i) {
            const auto comma = line.find(',', pos);
            v[i] = std::stod(line.substr(pos, comma - pos));
            pos = comma == std::string::npos ? line.size() : comma + 1;
        }
        r.true_count = static_cast<int>(v[0]);
        r.true_angles_deg = {v[1], v[2]};
        r.pred_count = static_cast<int>(v[3]);
        r.pred_angles_deg = {v[4], v[5]};
        r.snr_db = v[6];
        records.push_back(r);
    }
    return records;
}

int cmd_plot(const PlotArgs& args) {
    auto os = open_out(args.out);
    if (args.what == "array-factor") {
        std::vector<double> grid;
        for (double a = -90.0; a <= 90.0 + 1e-9; a += args.grid_step)
            grid.push_back(std::min(a, 90.0));
        const auto pattern = array_factor_db(args.steer, grid, args.array.config());
        os << "angle_deg,power_db\n";
        for (std::size_t i = 0; i < grid.size(); ++i) os << grid[i] << ',' << pattern[i] << '\n';
    } else if (args.what == "cdf") {
        const auto records = read_records_csv(args.records);
        std::vector<double> grid;
        for (double e = 0.0; e <= 30.0 + 1e-9; e += 0.1) grid.push_back(e);
        os << "error_deg,fraction\n";
        for (const CdfPoint& p : error_cdf(records, grid))
            os << p.error_deg << ',' << p.fraction << '\n';
    } else if (args.what == "snr-sweep") {
        const auto records = read_records_csv(args.records);
        os << "snr_db,rmse_deg,log10_rmse,count\n";
        for (const SnrSweepPoint& p : snr_sweep(records))
            os << p.snr_db << ',' << p.rmse_deg << ',' << p.log10_rmse << ',' << p.count << '\n';
    } else {
        throw config_error("unknown plot kind: " + args.what +
                           " (expected array-factor, cdf or snr-sweep)");
    }
    std::cout << "wrote " << args.out << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DeepAoANet desk-scale toolkit: simulate, featurize, train, evaluate"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Synthesize a multichannel IQ frame");
    simulate->add_option("--angle", sim.angles, "Source angle in degrees (repeatable, up to 2)");
    simulate->add_option("--kind", sim.kind, "Baseband kind: tone|chirp|qpsk")
        ->capture_default_str();
    simulate->add_option("--power", sim.powers, "Per-source linear power");
    simulate->add_option("--snr", sim.snr, "SNR in dB")->capture_default_str();
    simulate->add_flag("--noiseless", sim.noiseless, "Skip the AWGN stage");
    simulate->add_option("--length", sim.length, "Samples per channel")->capture_default_str();
    simulate->add_option("--fs", sim.sample_rate, "Sample rate in Hz")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    simulate->add_option("--out", sim.out, "Output frame container")->required();
    add_array_flags(simulate, sim.array);

    BuildArgs build;
    CLI::App* builder = app.add_subcommand("build-dataset", "Generate a labeled feature dataset");
    builder->add_option("--out", build.out, "Output directory")->required();
    builder->add_option("--config", build.config_file, "Key-value generation config");
    builder->add_option("--seed", build.seed, "Override the config seed")
        ->each([&](const std::string&) { build.seed_set = true; });

    TrainArgs train;
    CLI::App* trainer = app.add_subcommand("train", "Train DeepAoANet on a dataset");
    trainer->add_option("--dataset", train.dataset, "Dataset directory")->required();
    trainer->add_option("--arch", train.arch, "Architecture: fc|cnn")->capture_default_str();
    trainer->add_option("--out", train.out, "Output directory")->required();
    trainer->add_option("--config", train.config_file, "Key-value training config");
    trainer->add_option("--seed", train.seed, "Random seed")->capture_default_str();
    trainer->add_option("--stage1-epochs", train.stage1_epochs, "Epochs at tau=[0.1,1,1]")
        ->capture_default_str();
    trainer->add_option("--stage2-epochs", train.stage2_epochs, "Epochs at tau=[0.001,1,1]")
        ->capture_default_str();
    trainer->add_option("--threshold", train.threshold, "Two-source decision threshold")
        ->capture_default_str();
    trainer->add_flag("--quiet", train.quiet, "Suppress per-epoch output");

    EvalArgs eval;
    CLI::App* evaluator = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
    evaluator->add_option("--dataset", eval.dataset, "Dataset directory")->required();
    evaluator->add_option("--checkpoint", eval.checkpoint, "Model checkpoint")->required();
    evaluator->add_option("--split", eval.split, "Split name")->capture_default_str();
    evaluator->add_option("--out", eval.out, "Output directory")->required();

    InferArgs infer;
    CLI::App* inferrer = app.add_subcommand("infer", "Detect and estimate AoAs in one frame");
    inferrer->add_option("--checkpoint", infer.checkpoint, "Model checkpoint")->required();
    inferrer->add_option("--frame", infer.frame, "Frame container")->required();
    inferrer->add_option("--detect-rel", infer.detect_rel,
                         "Detection threshold relative to trace(R)/M")
        ->capture_default_str();
    inferrer->add_flag("--detect-abs", infer.detect_abs,
                       "Use the absolute magnitude threshold instead");
    inferrer->add_option("--detect-abs-threshold", infer.detect_abs_threshold,
                         "Absolute off-diagonal magnitude threshold")
        ->capture_default_str();
    add_array_flags(inferrer, infer.array);

    MusicArgs music;
    CLI::App* musician = app.add_subcommand("music", "Run the MUSIC baseline on a frame");
    musician->add_option("--frame", music.frame, "Frame container")->required();
    musician->add_option("--num-sources", music.num_sources, "Assumed source count L")
        ->capture_default_str();
    musician->add_option("--grid-step", music.grid_step, "Scan grid step in degrees")
        ->capture_default_str();
    musician->add_option("--out", music.out, "Optional spectrum CSV path");
    add_array_flags(musician, music.array);

    BenchArgs bench;
    CLI::App* bencher = app.add_subcommand("bench", "Measure single-sample inference latency");
    bencher->add_option("--arch", bench.arch, "fc|cnn|both")->capture_default_str();
    bencher->add_option("--runs", bench.runs, "Inference repetitions")->capture_default_str();
    bencher->add_option("--checkpoint", bench.checkpoint, "Optional trained checkpoint");
    bencher->add_option("--out", bench.out, "Optional CSV path");
    bencher->add_flag("--music", bench.with_music, "Also time the MUSIC baseline");
    bencher->add_option("--seed", bench.seed, "Random seed")->capture_default_str();

    PlotArgs plot;
    CLI::App* plotter = app.add_subcommand("plot", "Emit CSV series for figures");
    plotter->add_option("what", plot.what, "array-factor|cdf|snr-sweep")->required();
    plotter->add_option("--records", plot.records, "records.csv from eval");
    plotter->add_option("--out", plot.out, "Output CSV path")->required();
    plotter->add_option("--steer", plot.steer, "Steering angle for array-factor")
        ->capture_default_str();
    plotter->add_option("--grid-step", plot.grid_step, "Scan step in degrees")
        ->capture_default_str();
    add_array_flags(plotter, plot.array);

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return cmd_simulate(sim);
        if (builder->parsed()) return cmd_build_dataset(build);
        if (trainer->parsed()) return cmd_train(train);
        if (evaluator->parsed()) return cmd_eval(eval);
        if (inferrer->parsed()) return cmd_infer(infer);
        if (musician->parsed()) return cmd_music(music);
        if (bencher->parsed()) return cmd_bench(bench);
        if (plotter->parsed()) return cmd_plot(plot);
        return kUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}
