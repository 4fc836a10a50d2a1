// Batch driver for the experiment stages. Talks to the library only through
// the C interface in revs/revs.h.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>
#include "revs/revs.h"

namespace {

using nlohmann::json;

struct Owned {
    char* p = nullptr;
    ~Owned() { revs_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string checkpoint;
    bool print_config = false;
};

int report_failure(revs_status s) {
    std::fprintf(stderr, "error (%s): %s\n", revs_status_name(s), revs_last_error());
    return static_cast<int>(s);
}

/// Config file (or defaults) with the command-line overrides applied, in
/// canonical form.
revs_status resolve_config(const Options& opt, std::string& out) {
    json cfg = json::object();
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path, std::ios::binary);
        if (!in) {
            std::fprintf(stderr, "error (io): cannot open config %s\n", opt.config_path.c_str());
            return REVS_ERR_IO;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            cfg = json::parse(ss.str());
        } catch (const json::exception& e) {
            std::fprintf(stderr, "error (config): %s: %s\n", opt.config_path.c_str(), e.what());
            return REVS_ERR_CONFIG;
        }
        if (!cfg.is_object()) {
            std::fprintf(stderr, "error (config): %s must hold a JSON object\n", opt.config_path.c_str());
            return REVS_ERR_CONFIG;
        }
    }
    if (opt.seed) {
        cfg["dataset_seed"] = *opt.seed;
        cfg["model_seed"] = *opt.seed;
        if (!cfg.contains("trainer") || !cfg["trainer"].is_object()) cfg["trainer"] = json::object();
        cfg["trainer"]["seed"] = *opt.seed;
    }
    if (!opt.out.empty()) {
        if (!cfg.contains("paths") || !cfg["paths"].is_object()) cfg["paths"] = json::object();
        cfg["paths"]["run_dir"] = opt.out;
    }
    Owned normalized;
    const revs_status s = revs_config_normalize(cfg.dump().c_str(), &normalized.p);
    if (s != REVS_OK) return s;
    out = normalized.str();
    return REVS_OK;
}

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path, "Experiment config (JSON); defaults when omitted")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opt.seed, "Seed for dataset generation, initialization and training");
    cmd->add_option("--out", opt.out, "Run directory (overrides paths.run_dir)");
    cmd->add_flag("--print-config", opt.print_config, "Print the resolved config with all defaults and exit");
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* level = std::getenv("REVS_LOG_LEVEL")) {
        if (revs_set_log_level(level) != REVS_OK) return report_failure(REVS_ERR_INVALID_ARGUMENT);
    }

    CLI::App app{"Rank editing in the vocabulary space: unlearning experiments on a synthetic SSN corpus"};
    app.set_version_flag("--version", std::string(revs_version()));

    Options opt;
    bool top_print = false;
    app.add_flag("--print-config", top_print, "Print the default config and exit");

    const char* stages[][2] = {
        {"gen-data", "Generate the synthetic dataset"},
        {"train", "Train the model until every target is memorized"},
        {"check-mem", "Report which targets the checkpoint reproduces"},
        {"unlearn", "Apply REVS to the forget targets of every split"},
        {"evaluate", "Efficacy, generalization, specificity and unlearning score per split"},
        {"attack", "Extraction attacks against pre- and post-edit models"},
        {"report", "Consolidated JSON and CSV across splits"},
    };
    for (const auto& [name, help] : stages) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_common(cmd, opt);
        if (std::string(name) == "check-mem")
            cmd->add_option("--checkpoint", opt.checkpoint, "Checkpoint directory to inspect instead of the run's");
    }
    // --print-config alone is enough; no stage needed.
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return REVS_ERR_INVALID_ARGUMENT;
    }

    if (top_print) {
        Owned defaults;
        const revs_status s = revs_config_default(&defaults.p);
        if (s != REVS_OK) return report_failure(s);
        std::cout << defaults.str();
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return REVS_ERR_INVALID_ARGUMENT;
    }

    const std::string stage = app.get_subcommands().front()->get_name();
    std::string config;
    if (const revs_status s = resolve_config(opt, config); s != REVS_OK) {
        if (revs_last_error()[0] != '\0') return report_failure(s);
        return static_cast<int>(s);
    }
    if (opt.print_config) {
        std::cout << config;
        return 0;
    }
    const revs_status s =
        revs_run_stage(stage.c_str(), config.c_str(), opt.checkpoint.empty() ? nullptr : opt.checkpoint.c_str());
    if (s != REVS_OK) return report_failure(s);
    return 0;
}
