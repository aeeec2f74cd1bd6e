#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "entroplace/errors.hpp"
#include "entroplace/pipeline.hpp"

namespace {

// Exit codes: 0 ok, 2 config error, 3 data error, 4 numeric error.
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kDataError = 3;
constexpr int kNumericError = 4;

struct Options {
    std::string config_path;
    std::string out_dir;
    std::string data_path;
    std::string method;
    std::string init;
    long long seed = -1;
    int sensors = -1;
    int scale = -1;
};

entroplace::RunConfig resolve(const Options& opt) {
    entroplace::RunConfig config;
    if (!opt.config_path.empty()) config = entroplace::parse_run_config(opt.config_path);
    if (!opt.out_dir.empty()) config.out_dir = opt.out_dir;
    if (!opt.data_path.empty()) config.data_path = opt.data_path;
    if (opt.seed >= 0) config.seed = static_cast<std::uint64_t>(opt.seed);
    if (opt.sensors > 0) config.sensors = opt.sensors;
    if (opt.scale > 0) config.entropy.scale = opt.scale;
    if (!opt.init.empty()) config.mask_init = opt.init;
    config.validate();
    return config;
}

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path, "key=value run configuration file");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--data", opt.data_path, "FSR1 input dataset (default: generated)");
    cmd->add_option("--seed", opt.seed, "global seed; stages derive sub-seeds by name");
    cmd->add_option("--sensors", opt.sensors, "sensor budget");
    cmd->add_option("--scale", opt.scale, "entropy evaluation scale L'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"entroplace: entropy-guided sensor placement and field reconstruction"};
    app.require_subcommand(1);
    Options opt;

    auto* gen = app.add_subcommand("gen", "synthesize a dataset and write FSR1");
    auto* entropy = app.add_subcommand("entropy", "estimate the entropy field on the train split");
    auto* place = app.add_subcommand("place", "derive the sensor prior and initial mask");
    auto* train_cmd = app.add_subcommand("train", "optimize mask and decoder");
    auto* baseline = app.add_subcommand("baseline", "fit climatology or PCA-QR");
    auto* eval = app.add_subcommand("eval", "reconstruct the test split and score a method");
    auto* report = app.add_subcommand("report", "collate per-method scores into report.{txt,csv}");
    auto* run = app.add_subcommand("run", "full pipeline with MANIFEST");
    auto* verify = app.add_subcommand("verify", "recheck MANIFEST checksums");

    for (auto* cmd : {gen, entropy, place, train_cmd, baseline, eval, report, run, verify})
        add_common(cmd, opt);
    place->add_option("--init", opt.init, "mask init: entropy | random");
    run->add_option("--init", opt.init, "mask init: entropy | random");
    train_cmd->add_option("--method", opt.method, "st-mask | concrete")->required();
    baseline->add_option("--method", opt.method, "climate | pca-qr")->required();
    eval->add_option("--method", opt.method, "climate | pca-qr | st-mask | concrete")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const entroplace::RunConfig config = resolve(opt);
        if (gen->parsed()) {
            std::printf("wrote %s\n", entroplace::stage_gen(config).c_str());
        } else if (entropy->parsed()) {
            entroplace::stage_entropy(config);
        } else if (place->parsed()) {
            entroplace::stage_place(config);
        } else if (train_cmd->parsed()) {
            entroplace::stage_train(config, opt.method);
        } else if (baseline->parsed()) {
            const int budget = opt.method == "pca-qr"
                                   ? entroplace::sensor_budget_from_artifacts(config)
                                   : 0;
            entroplace::stage_baseline(config, opt.method, budget);
        } else if (eval->parsed()) {
            entroplace::stage_eval(config, opt.method);
        } else if (report->parsed()) {
            entroplace::stage_report(config);
        } else if (run->parsed()) {
            entroplace::run_pipeline(config);
            std::printf("pipeline complete; artifacts under %s\n", config.out_dir.c_str());
        } else if (verify->parsed()) {
            std::string mismatch;
            if (!entroplace::verify_manifest(config.out_dir, &mismatch)) {
                std::fprintf(stderr, "checksum mismatch: %s\n", mismatch.c_str());
                return kDataError;
            }
            std::printf("MANIFEST ok\n");
        }
    } catch (const entroplace::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const entroplace::data_error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kDataError;
    } catch (const entroplace::numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kNumericError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNumericError;
    }
    return kOk;
}
