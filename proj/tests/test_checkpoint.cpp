#include <gtest/gtest.h>

#include <filesystem>

#include <nlohmann/json.hpp>
#include "revs/checkpoint.hpp"
#include "revs/io.hpp"
#include "test_support.hpp"

using namespace revs;
using revs::testing::scratch_dir;

namespace {

ModelState sample_state() {
    ModelConfig c;
    c.vocab_size = 30;
    c.d_model = 8;
    c.d_ff = 16;
    c.n_layers = 2;
    c.n_heads = 2;
    c.context_len = 12;
    ModelState s = ModelState::initialize(c, 9, 0.05);
    s.round_to_storage_precision();
    return s;
}

void expect_corrupt(const std::string& dir) {
    try {
        load_checkpoint(dir);
        FAIL() << "expected a corrupt-checkpoint error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::corrupt_checkpoint) << e.what();
    }
}

void edit_manifest(const std::string& dir, const std::function<void(nlohmann::json&)>& f) {
    auto j = nlohmann::json::parse(read_text_file(dir + "/manifest.json"));
    f(j);
    write_text_file(dir + "/manifest.json", j.dump(2) + "\n");
}

}  // namespace

TEST(Checkpoint, RoundTripIsBitExact) {
    const std::string dir = scratch_dir("ckpt_roundtrip");
    const ModelState s = sample_state();
    save_checkpoint(s, dir);
    const ModelState back = load_checkpoint(dir);
    EXPECT_TRUE(back == s);
}

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
    const std::string a = scratch_dir("ckpt_a"), b = scratch_dir("ckpt_b");
    save_checkpoint(sample_state(), a);
    save_checkpoint(load_checkpoint(a), b);
    for (const char* f : {"/manifest.json", "/tensors.bin"}) EXPECT_EQ(sha256_file(a + f), sha256_file(b + f)) << f;
}

TEST(Checkpoint, ManifestListsEveryTensorWithChecksum) {
    const std::string dir = scratch_dir("ckpt_manifest");
    const ModelState s = sample_state();
    save_checkpoint(s, dir);
    const auto j = nlohmann::json::parse(read_text_file(dir + "/manifest.json"));
    EXPECT_EQ(j.at("format"), kCheckpointFormat);
    const auto names = s.tensors();
    ASSERT_EQ(j.at("tensors").size(), names.size());
    std::size_t offset = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto& t = j.at("tensors")[i];
        EXPECT_EQ(t.at("name"), names[i].name);
        EXPECT_EQ(t.at("offset").get<std::size_t>(), offset);
        EXPECT_EQ(t.at("nbytes").get<std::size_t>(), names[i].values.size() * 4);
        EXPECT_TRUE(t.contains("crc32c"));
        offset += names[i].values.size() * 4;
    }
    EXPECT_EQ(std::filesystem::file_size(dir + "/tensors.bin"), offset);
}

TEST(Checkpoint, TruncatedBlobIsCorrupt) {
    const std::string dir = scratch_dir("ckpt_trunc");
    save_checkpoint(sample_state(), dir);
    std::filesystem::resize_file(dir + "/tensors.bin", std::filesystem::file_size(dir + "/tensors.bin") - 4);
    expect_corrupt(dir);
}

TEST(Checkpoint, FlippedByteFailsCrc) {
    const std::string dir = scratch_dir("ckpt_flip");
    save_checkpoint(sample_state(), dir);
    auto bytes = read_binary_file(dir + "/tensors.bin");
    bytes[bytes.size() / 2] ^= 0x40;
    write_binary_file(dir + "/tensors.bin", bytes);
    expect_corrupt(dir);
}

TEST(Checkpoint, UnexpectedTensorIsRejected) {
    const std::string dir = scratch_dir("ckpt_extra");
    save_checkpoint(sample_state(), dir);
    edit_manifest(dir, [](nlohmann::json& j) {
        auto extra = j["tensors"].back();
        extra["name"] = "blocks.0.mlp.bias";
        j["tensors"].push_back(extra);
    });
    expect_corrupt(dir);
}

TEST(Checkpoint, ManifestTamperingIsRejected) {
    const std::string dir = scratch_dir("ckpt_tamper");
    const ModelState s = sample_state();
    save_checkpoint(s, dir);
    const std::string original = read_text_file(dir + "/manifest.json");
    auto restore = [&] { write_text_file(dir + "/manifest.json", original); };

    edit_manifest(dir, [](nlohmann::json& j) { j["format"] = "other"; });
    expect_corrupt(dir);
    restore();
    edit_manifest(dir, [](nlohmann::json& j) { j["tensors"][2]["shape"] = {9}; });
    expect_corrupt(dir);
    restore();
    edit_manifest(dir, [](nlohmann::json& j) { j["tensors"][1]["offset"] = 4; });
    expect_corrupt(dir);
    restore();
    edit_manifest(dir, [](nlohmann::json& j) { std::swap(j["tensors"][0], j["tensors"][1]); });
    expect_corrupt(dir);
    restore();
    edit_manifest(dir, [](nlohmann::json& j) { j["surprise"] = 1; });
    expect_corrupt(dir);
    restore();
    write_text_file(dir + "/manifest.json", "{not json");
    expect_corrupt(dir);
    restore();
    EXPECT_TRUE(load_checkpoint(dir) == s);
}

TEST(Checkpoint, MissingDirectoryIsAnError) {
    EXPECT_THROW(load_checkpoint(scratch_dir("ckpt_empty") + "/nothing"), Error);
}

TEST(Checkpoint, ConfigJsonIsStrict) {
    ModelConfig c;
    c.vocab_size = 99;
    EXPECT_EQ(model_config_from_json(model_config_to_json(c)), c);
    EXPECT_THROW(model_config_from_json(R"({"d_model": 8, "bogus": 1})"), Error);
    EXPECT_THROW(model_config_from_json(R"({"d_model": -8})"), Error);
}
