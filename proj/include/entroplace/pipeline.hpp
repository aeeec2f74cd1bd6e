#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entroplace/baselines.hpp"
#include "entroplace/checkpoint.hpp"
#include "entroplace/entropy.hpp"
#include "entroplace/selector.hpp"
#include "entroplace/synth.hpp"

namespace entroplace {

// Plain-text key=value run configuration.  Every stage derives its own
// sub-seed from `seed` by stage name, so stages rerun independently yet
// reproducibly and the composed subcommands match the one-shot pipeline.
struct RunConfig {
    std::string data_path;  // empty: synthesize into <out>/data.fsr
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    double split_fraction = 0.8;
    std::vector<std::string> methods = {"climate", "pca-qr", "st-mask"};
    int sensors = 24;       // initial mask budget / concrete k / pca-qr fallback
    double tau = 0.2;
    std::string mask_init = "entropy"; // or "random"
    SynthConfig synth;
    EntropyConfig entropy;
    TrainConfig train;

    void validate() const;
};

RunConfig parse_run_config(const std::string& path);
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

// Stage entry points.  Each reads its inputs from files under out_dir and
// writes its artifacts there.
std::string stage_gen(const RunConfig& config);
void stage_entropy(const RunConfig& config);
void stage_place(const RunConfig& config);
void stage_train(const RunConfig& config, const std::string& method);
void stage_baseline(const RunConfig& config, const std::string& method, int sensor_budget);
void stage_eval(const RunConfig& config, const std::string& method);
void stage_report(const RunConfig& config);

// Budget shared by pca-qr: the trained mask's final sensor count when a
// trained method ran, the configured count otherwise.
int sensor_budget_from_artifacts(const RunConfig& config);

// Uniform-random counterpart of the entropy-prior mask initialization: k0
// cells drawn uniformly over sea, slightly on; the rest slightly off.
MaskParams random_mask_init(const FieldSeries& series, int k0, std::uint64_t seed);

// Full pipeline; writes MANIFEST with per-artifact checksums (partial on
// failure, with the failing stage recorded) and rethrows stage errors.
void run_pipeline(const RunConfig& config);

// Recomputes checksums of everything MANIFEST lists.
bool verify_manifest(const std::string& out_dir, std::string* mismatch = nullptr);

// Checkpoint packing for the trained selector and the baselines.
Checkpoint make_selector_checkpoint(const TrainReport& report);
TrainReport load_selector_checkpoint(const Checkpoint& ck);
Checkpoint make_pod_checkpoint(const PODBasis& basis);
PODBasis load_pod_checkpoint(const Checkpoint& ck, GridShape shape);
Checkpoint make_climatology_checkpoint(const Climatology& clim, GridShape shape);
Climatology load_climatology_checkpoint(const Checkpoint& ck, GridShape shape);

std::uint64_t fnv1a64_file(const std::string& path);

} // namespace entroplace
