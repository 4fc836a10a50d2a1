#include "revs/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <set>
#include <nlohmann/json.hpp>

#include "revs/io.hpp"

namespace revs {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

using nlohmann::json;

namespace {

json config_json(const ModelConfig& c) {
    return json{{"vocab_size", c.vocab_size}, {"d_model", c.d_model}, {"d_ff", c.d_ff},
                {"n_layers", c.n_layers},     {"n_heads", c.n_heads}, {"context_len", c.context_len}};
}

ModelConfig config_from(const json& j, ErrorKind kind) {
    static const std::set<std::string> keys = {"vocab_size", "d_model", "d_ff", "n_layers", "n_heads", "context_len"};
    require(j.is_object(), kind, "model config must be an object");
    for (const auto& [k, v] : j.items()) {
        require(keys.contains(k), kind, "unknown model config field '" + k + "'");
        require(v.is_number_unsigned(), kind, "model config field '" + k + "' must be a non-negative integer");
    }
    ModelConfig c;
    auto get = [&](const char* k, std::size_t& out) {
        if (j.contains(k)) out = j.at(k).get<std::size_t>();
    };
    get("vocab_size", c.vocab_size);
    get("d_model", c.d_model);
    get("d_ff", c.d_ff);
    get("n_layers", c.n_layers);
    get("n_heads", c.n_heads);
    get("context_len", c.context_len);
    return c;
}

[[noreturn]] void corrupt(const std::string& msg) { fail(ErrorKind::corrupt_checkpoint, msg); }

}  // namespace

std::string model_config_to_json(const ModelConfig& config) { return config_json(config).dump(2) + "\n"; }

ModelConfig model_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::config, std::string("model config: ") + e.what());
    }
    return config_from(j, ErrorKind::config);
}

void save_checkpoint(const ModelState& state, const std::string& dir) {
    std::vector<std::uint8_t> blob;
    json tensors = json::array();
    for (const auto& t : state.tensors()) {
        const std::size_t offset = blob.size();
        blob.resize(offset + t.values.size() * sizeof(float));
        for (std::size_t i = 0; i < t.values.size(); ++i) {
            const float f = static_cast<float>(t.values[i]);
            std::memcpy(blob.data() + offset + i * sizeof(float), &f, sizeof(float));
        }
        const std::size_t nbytes = blob.size() - offset;
        tensors.push_back(json{{"name", t.name},
                               {"shape", t.shape},
                               {"offset", offset},
                               {"nbytes", nbytes},
                               {"crc32c", crc32c(std::span(blob).subspan(offset, nbytes))}});
    }
    json manifest{{"format", kCheckpointFormat},
                  {"config", config_json(state.config)},
                  {"tensors", tensors},
                  {"total_bytes", blob.size()}};
    std::filesystem::create_directories(dir);
    write_binary_file(dir + "/tensors.bin", blob);
    write_text_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

ModelState load_checkpoint(const std::string& dir) {
    const std::string manifest_path = dir + "/manifest.json";
    require(std::filesystem::exists(manifest_path), ErrorKind::io, "missing " + manifest_path);
    json m;
    try {
        m = json::parse(read_text_file(manifest_path));
    } catch (const json::exception& e) {
        corrupt(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!m.is_object()) corrupt("manifest must be an object");
    for (const auto& [k, v] : m.items())
        if (k != "format" && k != "config" && k != "tensors" && k != "total_bytes")
            corrupt("unexpected manifest field '" + k + "'");
    if (m.value("format", "") != kCheckpointFormat) corrupt("unsupported checkpoint format");
    if (!m.contains("config") || !m.contains("tensors") || !m.contains("total_bytes"))
        corrupt("manifest missing required fields");

    ModelConfig config = config_from(m.at("config"), ErrorKind::corrupt_checkpoint);
    try {
        config.validate();
    } catch (const Error& e) {
        corrupt(std::string("invalid model config: ") + e.what());
    }
    ModelState state = ModelState::zeros(config);
    auto expected = state.tensors();

    const json& listed = m.at("tensors");
    if (!listed.is_array()) corrupt("tensor directory must be an array");
    std::set<std::string> known;
    for (const auto& t : expected) known.insert(t.name);
    for (const auto& t : listed) {
        const std::string name = t.is_object() ? t.value("name", "") : "";
        if (!known.contains(name)) corrupt("strict mode: unexpected tensor '" + name + "'");
    }
    if (listed.size() != expected.size()) corrupt("tensor directory has wrong number of entries");

    // Manifest must be fully consistent before any tensor bytes are read.
    std::size_t offset = 0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const json& t = listed[i];
        if (t.size() != 5 || t.value("name", "") != expected[i].name) corrupt("tensor directory out of order at " + expected[i].name);
        if (t.at("shape").get<std::vector<std::size_t>>() != expected[i].shape)
            corrupt("shape mismatch for " + expected[i].name);
        const std::size_t nbytes = expected[i].values.size() * sizeof(float);
        if (t.at("offset").get<std::size_t>() != offset || t.at("nbytes").get<std::size_t>() != nbytes)
            corrupt("bad offset or size for " + expected[i].name);
        offset += nbytes;
    }
    if (m.at("total_bytes").get<std::size_t>() != offset) corrupt("total_bytes disagrees with tensor directory");

    const auto blob = read_binary_file(dir + "/tensors.bin");
    if (blob.size() != offset)
        corrupt("tensors.bin has " + std::to_string(blob.size()) + " bytes, expected " + std::to_string(offset));
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const json& t = listed[i];
        const std::size_t off = t.at("offset").get<std::size_t>();
        const auto bytes = std::span(blob).subspan(off, t.at("nbytes").get<std::size_t>());
        if (crc32c(bytes) != t.at("crc32c").get<std::uint32_t>()) corrupt("checksum mismatch for " + expected[i].name);
        for (std::size_t k = 0; k < expected[i].values.size(); ++k) {
            float f;
            std::memcpy(&f, bytes.data() + k * sizeof(float), sizeof(float));
            if (!std::isfinite(f)) corrupt("non-finite value in " + expected[i].name);
            expected[i].values[k] = static_cast<double>(f);
        }
    }
    return state;
}

}  // namespace revs
