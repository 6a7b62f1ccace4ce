#include "aoa/nn/checkpoint.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>

namespace aoa::nn {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'A', 'O', 'A', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw data_error("truncated checkpoint");
    return v;
}

void write_blob(std::ostream& os, const std::string& name, const std::vector<float>& data) {
    write_pod(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod(os, static_cast<std::uint64_t>(data.size()));
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(float)));
}

std::pair<std::string, std::vector<float>> read_blob(std::istream& is) {
    const auto name_len = read_pod<std::uint32_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    const auto count = read_pod<std::uint64_t>(is);
    std::vector<float> data(count);
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (!is) throw data_error("truncated checkpoint blob");
    return {name, std::move(data)};
}

} // namespace

void save_checkpoint(DeepAoANet<float>& model, const Scaler& scaler, const std::string& path,
                     double threshold) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open checkpoint for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    write_pod(os, kVersion);

    json desc;
    desc["arch"] = to_string(model.kind());
    desc["input_dim"] = model.input_dim();
    desc["channels"] = model.channels();
    desc["dropout"] = model.dropout_rate();
    desc["threshold"] = threshold;
    desc["scaler"] = {{"mean", scaler.mean}, {"std", scaler.stddev}};
    const std::string header = desc.dump();
    write_pod(os, static_cast<std::uint64_t>(header.size()));
    os.write(header.data(), static_cast<std::streamsize>(header.size()));

    const auto params = model.params();
    const auto buffers = model.buffers();
    write_pod(os, static_cast<std::uint64_t>(params.size() + buffers.size()));
    for (const ParamRef<float>& p : params) write_blob(os, p.name, *p.value);
    for (const BufferRef<float>& b : buffers) write_blob(os, b.name, *b.value);
    if (!os) throw data_error("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open checkpoint: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw data_error("not a checkpoint file: " + path);
    if (read_pod<std::uint32_t>(is) != kVersion)
        throw data_error("unsupported checkpoint version");

    const auto header_len = read_pod<std::uint64_t>(is);
    std::string header(header_len, '\0');
    is.read(header.data(), static_cast<std::streamsize>(header_len));
    if (!is) throw data_error("truncated checkpoint header");

    Checkpoint out;
    try {
        const json desc = json::parse(header);
        const ArchKind kind = arch_from_string(desc.at("arch").get<std::string>());
        const double dropout = desc.at("dropout").get<double>();
        if (kind == ArchKind::fc)
            out.model = DeepAoANet<float>::make_fc(0, desc.at("input_dim").get<std::size_t>(),
                                                   dropout);
        else
            out.model =
                DeepAoANet<float>::make_cnn(0, desc.at("channels").get<std::size_t>(), dropout);
        out.threshold = desc.at("threshold").get<double>();
        out.scaler.mean = desc.at("scaler").at("mean").get<std::vector<double>>();
        out.scaler.stddev = desc.at("scaler").at("std").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw data_error("malformed checkpoint header: " + std::string(e.what()));
    }

    const auto blob_count = read_pod<std::uint64_t>(is);
    std::map<std::string, std::vector<float>> blobs;
    for (std::uint64_t i = 0; i < blob_count; ++i) blobs.insert(read_blob(is));

    for (ParamRef<float>& p : out.model.params()) {
        const auto it = blobs.find(p.name);
        if (it == blobs.end()) throw data_error("checkpoint is missing tensor " + p.name);
        if (it->second.size() != p.value->size())
            throw data_error("checkpoint tensor " + p.name + " has the wrong size");
        *p.value = it->second;
    }
    for (BufferRef<float>& b : out.model.buffers()) {
        const auto it = blobs.find(b.name);
        if (it == blobs.end()) throw data_error("checkpoint is missing buffer " + b.name);
        if (it->second.size() != b.value->size())
            throw data_error("checkpoint buffer " + b.name + " has the wrong size");
        *b.value = it->second;
    }
    return out;
}

} // namespace aoa::nn
