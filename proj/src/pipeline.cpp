#include "entroplace/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "entroplace/errors.hpp"
#include "entroplace/fsr_io.hpp"
#include "entroplace/metrics.hpp"
#include "entroplace/prior.hpp"
#include "entroplace/rng.hpp"
#include "entroplace/table_io.hpp"

namespace fs = std::filesystem;

namespace entroplace {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw config_error("expected a boolean, got: " + v);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string path_in(const RunConfig& config, const std::string& name) {
    return (fs::path(config.out_dir) / name).string();
}

std::string data_file(const RunConfig& config) {
    return config.data_path.empty() ? path_in(config, "data.fsr") : config.data_path;
}

FieldSeries load_train(const RunConfig& config) {
    return read_fsr(data_file(config)).split(config.split_fraction).first;
}

Field grid_from_matrix(const Eigen::MatrixXd& m) {
    Field f(GridShape{static_cast<int>(m.rows()), static_cast<int>(m.cols())});
    for (int r = 0; r < f.shape.rows; ++r)
        for (int c = 0; c < f.shape.cols; ++c) {
            f.at(r, c) = m(r, c);
            if (std::isnan(m(r, c))) f.land[static_cast<size_t>(r) * f.shape.cols + c] = 1;
        }
    return f;
}

Eigen::MatrixXd matrix_from_grid(const Field& f) {
    Eigen::MatrixXd m(f.shape.rows, f.shape.cols);
    for (int r = 0; r < f.shape.rows; ++r)
        for (int c = 0; c < f.shape.cols; ++c)
            m(r, c) = f.is_land(r, c) ? kLandSentinel : f.at(r, c);
    return m;
}

std::vector<std::pair<int, int>> mask_cells(const Field& mask) {
    std::vector<std::pair<int, int>> cells;
    for (int r = 0; r < mask.shape.rows; ++r)
        for (int c = 0; c < mask.shape.cols; ++c)
            if (!mask.is_land(r, c) && mask.at(r, c) >= 0.5) cells.emplace_back(r, c);
    return cells;
}

} // namespace

MaskParams random_mask_init(const FieldSeries& series, int k0, std::uint64_t seed) {
    // Uniform-random counterpart of the entropy initialization: k0 cells
    // drawn uniformly over sea, +0.1 on, -0.1 off.
    EntropyField flat;
    flat.H = Field(series.shape(), 0.0);
    flat.H.land = series.land();
    for (int i = 0; i < series.shape().cells(); ++i)
        if (series.is_land(i)) flat.H.values[static_cast<size_t>(i)] = kLandSentinel;
    const PriorField uniform = sensor_prior(flat, 1.0);
    const SensorSet chosen = sample_sensors(uniform, k0, seed);

    MaskParams params;
    params.w = Field(series.shape(), -0.1);
    params.w.land = series.land();
    const double neg_inf = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < series.shape().cells(); ++i)
        if (series.is_land(i)) params.w.values[static_cast<size_t>(i)] = neg_inf;
    for (const auto& [r, c] : chosen.locations) params.w.at(r, c) = 0.1;
    return params;
}

namespace {

void write_eval_summary(const RunConfig& config, const EvalReport& report) {
    std::ofstream os(path_in(config, "eval_" + report.method + ".txt"));
    os << "method=" << report.method << '\n'
       << "sensors=" << report.sensor_count << '\n'
       << "med_bias=" << format_double(report.med_bias) << '\n'
       << "med_rmse=" << format_double(report.med_rmse) << '\n';
}

struct EvalSummary {
    std::string method;
    int sensors = 0;
    double med_bias = 0.0;
    double med_rmse = 0.0;
};

EvalSummary read_eval_summary(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw data_error("cannot open: " + path);
    EvalSummary s;
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "method") s.method = value;
        else if (key == "sensors") s.sensors = std::stoi(value);
        else if (key == "med_bias") s.med_bias = std::stod(value);
        else if (key == "med_rmse") s.med_rmse = std::stod(value);
    }
    return s;
}

} // namespace

void RunConfig::validate() const {
    if (!(split_fraction > 0.0 && split_fraction < 1.0))
        throw config_error("split_fraction must lie in (0, 1)");
    if (sensors < 1) throw config_error("sensors must be >= 1");
    if (!(tau > 0)) throw config_error("tau must be > 0");
    if (mask_init != "entropy" && mask_init != "random")
        throw config_error("init must be 'entropy' or 'random'");
    if (methods.empty()) throw config_error("methods must not be empty");
    for (const auto& m : methods)
        if (m != "climate" && m != "pca-qr" && m != "st-mask" && m != "concrete")
            throw config_error("unknown method: " + m);
    try {
        synth.validate();
        entropy.validate();
        train.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }
}

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
    try {
        if (key == "data") config.data_path = value;
        else if (key == "out") config.out_dir = value;
        else if (key == "seed") config.seed = std::stoull(value);
        else if (key == "split_fraction") config.split_fraction = std::stod(value);
        else if (key == "methods") config.methods = split_list(value);
        else if (key == "sensors") config.sensors = std::stoi(value);
        else if (key == "tau") config.tau = std::stod(value);
        else if (key == "init") config.mask_init = value;
        else if (key == "synth.rows") config.synth.shape.rows = std::stoi(value);
        else if (key == "synth.cols") config.synth.shape.cols = std::stoi(value);
        else if (key == "synth.years") config.synth.years = std::stoi(value);
        else if (key == "synth.rank") config.synth.rank = std::stoi(value);
        else if (key == "synth.mode_amp") config.synth.mode_amp = std::stod(value);
        else if (key == "synth.seasonal_amp") config.synth.seasonal_amp = std::stod(value);
        else if (key == "synth.drift_amp") config.synth.drift_amp = std::stod(value);
        else if (key == "synth.front_lo") config.synth.front_row_lo = std::stoi(value);
        else if (key == "synth.front_hi") config.synth.front_row_hi = std::stoi(value);
        else if (key == "synth.noise_sigma") config.synth.noise_sigma = std::stod(value);
        else if (key == "synth.land_fraction") config.synth.land_fraction = std::stod(value);
        else if (key == "entropy.patch_size") config.entropy.patch_size = std::stoi(value);
        else if (key == "entropy.scale") config.entropy.scale = std::stoi(value);
        else if (key == "entropy.bin_stride") config.entropy.bin_stride = std::stoi(value);
        else if (key == "entropy.min_samples") config.entropy.min_samples = std::stoi(value);
        else if (key == "entropy.shrinkage") config.entropy.shrinkage_rel = std::stod(value);
        else if (key == "entropy.ensemble") config.entropy.ensemble = std::stoi(value);
        else if (key == "entropy.mc_samples") config.entropy.mc_samples = std::stoi(value);
        else if (key == "entropy.bootstrap") config.entropy.bootstrap = parse_bool(value);
        else if (key == "entropy.smooth_window") config.entropy.smooth_window = std::stoi(value);
        else if (key == "entropy.ordering") config.entropy.ordering = ordering_from_name(value);
        else if (key == "train.lambda_max") config.train.lambda_max = std::stod(value);
        else if (key == "train.ramp_epochs") config.train.lambda_ramp_epochs = std::stoi(value);
        else if (key == "train.epochs") config.train.epochs = std::stoi(value);
        else if (key == "train.batch_size") config.train.batch_size = std::stoi(value);
        else if (key == "train.step_size") config.train.step_size = std::stod(value);
        else if (key == "train.step_decay") config.train.step_decay = std::stod(value);
        else if (key == "train.concrete_t_start") config.train.concrete_t_start = std::stod(value);
        else if (key == "train.concrete_t_end") config.train.concrete_t_end = std::stod(value);
        else if (key == "train.decoder") {
            if (value == "linear") config.train.decoder = DecoderKind::linear;
            else if (value == "mlp1") config.train.decoder = DecoderKind::mlp1;
            else throw config_error("decoder must be 'linear' or 'mlp1'");
        } else if (key == "train.hidden_width") {
            config.train.hidden_width = std::stoi(value);
        } else {
            throw config_error("unknown config key: " + key);
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception&) {
        throw config_error("bad value for " + key + ": " + value);
    }
}

RunConfig parse_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config: " + path);
    RunConfig config;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        apply_override(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

std::string stage_gen(const RunConfig& config) {
    fs::create_directories(config.out_dir);
    const std::string path = data_file(config);
    if (!config.data_path.empty()) {
        if (!fs::exists(config.data_path))
            throw data_error("input data file does not exist: " + config.data_path);
        return path;
    }
    SynthConfig synth = config.synth;
    synth.seed = derive_seed(config.seed, "gen");
    write_fsr(path, generate(synth));
    return path;
}

void stage_entropy(const RunConfig& config) {
    fs::create_directories(config.out_dir);
    const FieldSeries train = load_train(config);
    EntropyConfig ec = config.entropy;
    ec.seed = derive_seed(config.seed, "entropy");
    const EntropyField H = entropy_field(train, ec);
    write_field_csv(path_in(config, "entropy.csv"), H.H);
    write_field_pgm(path_in(config, "entropy.pgm"), H.H);
}

void stage_place(const RunConfig& config) {
    const FieldSeries train = load_train(config);
    EntropyField H;
    H.H = read_field_csv(path_in(config, "entropy.csv"));
    H.scale = config.entropy.scale;
    H.ensemble_size = config.entropy.ensemble;

    const PriorField prior = sensor_prior(H, config.tau);
    write_field_csv(path_in(config, "prior.csv"), prior.p);
    write_field_pgm(path_in(config, "prior.pgm"), prior.p);
    const SensorSet proposal =
        sample_sensors(prior, config.sensors, derive_seed(config.seed, "place"));
    write_sensor_csv(path_in(config, "sensors_prior.csv"), proposal.locations);

    // The trainable mask starts at the proposed locations; sampling from the
    // prior spreads the budget across the informative region, where the
    // quantile rule would pile everything onto the entropy peak.
    MaskParams init;
    if (config.mask_init == "entropy") {
        init.w = Field(train.shape(), -0.1);
        init.w.land = train.land();
        const double neg_inf = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < train.shape().cells(); ++i)
            if (train.is_land(i)) init.w.values[static_cast<size_t>(i)] = neg_inf;
        for (const auto& [r, c] : proposal.locations) init.w.at(r, c) = 0.1;
    } else {
        init = random_mask_init(train, config.sensors,
                                derive_seed(config.seed, "init-random"));
    }
    Checkpoint ck;
    ck["MASK"] = matrix_from_grid(init.w);
    write_checkpoint(path_in(config, "mask_init.ckp"), ck);
}

void stage_train(const RunConfig& config, const std::string& method) {
    if (method != "st-mask" && method != "concrete")
        throw config_error("trainable methods are st-mask and concrete");
    const FieldSeries train_split = load_train(config);

    const Checkpoint init_ck = read_checkpoint(path_in(config, "mask_init.ckp"));
    const auto it = init_ck.find("MASK");
    if (it == init_ck.end()) throw data_error("mask_init.ckp lacks a MASK section");
    MaskParams init;
    init.w = grid_from_matrix(it->second);
    init.w.land = train_split.land();

    TrainConfig tc = config.train;
    tc.seed = derive_seed(config.seed, "train-" + method);
    tc.selector =
        method == "concrete" ? SelectorKind::concrete : SelectorKind::straight_through;
    if (tc.selector == SelectorKind::concrete) tc.concrete_k = config.sensors;

    const TrainReport report = train(train_split, init, tc);
    write_checkpoint(path_in(config, "train_" + method + ".ckp"),
                     make_selector_checkpoint(report));
    write_sensor_csv(path_in(config, "sensors_" + method + ".csv"),
                     mask_cells(report.binary_mask));

    std::ofstream os(path_in(config, "train_report_" + method + ".csv"));
    os << "epoch,mse,sparsity,sensors\n";
    for (size_t e = 0; e < report.curve.size(); ++e) {
        const auto& log = report.curve[e];
        os << e << ',' << format_double(log.mse_term) << ',' << format_double(log.sparsity_term)
           << ',' << log.sensors << '\n';
    }
}

void stage_baseline(const RunConfig& config, const std::string& method, int sensor_budget) {
    const FieldSeries train_split = load_train(config);
    if (method == "climate") {
        const Climatology clim = fit_climatology(train_split);
        write_checkpoint(path_in(config, "climate.ckp"),
                         make_climatology_checkpoint(clim, train_split.shape()));
    } else if (method == "pca-qr") {
        PODBasis basis = fit_pod(train_split, sensor_budget);
        qr_pivot_sensors(basis);
        write_checkpoint(path_in(config, "pod.ckp"), make_pod_checkpoint(basis));
        std::vector<std::pair<int, int>> locations;
        for (int cell : basis.sensors)
            locations.emplace_back(cell / train_split.shape().cols,
                                   cell % train_split.shape().cols);
        write_sensor_csv(path_in(config, "sensors_pca-qr.csv"), locations);
    } else {
        throw config_error("baseline methods are climate and pca-qr");
    }
}

void stage_eval(const RunConfig& config, const std::string& method) {
    const FieldSeries all = read_fsr(data_file(config));
    const auto [train_split, test] = all.split(config.split_fraction);

    FieldSeries recon(test.shape(), test.land());
    int sensor_count = 0;

    if (method == "climate") {
        const Climatology clim = load_climatology_checkpoint(
            read_checkpoint(path_in(config, "climate.ckp")), test.shape());
        for (int t = 0; t < test.times(); ++t)
            recon.append(climatology_at(clim, test.stamp(t).day).values, test.stamp(t));
    } else if (method == "pca-qr") {
        const PODBasis basis =
            load_pod_checkpoint(read_checkpoint(path_in(config, "pod.ckp")), test.shape());
        sensor_count = static_cast<int>(basis.sensors.size());
        for (int t = 0; t < test.times(); ++t) {
            const Field snap = test.field(t);
            recon.append(pod_reconstruct(basis, measure_at_sensors(basis, snap)).values,
                         test.stamp(t));
        }
    } else { // st-mask / concrete
        const TrainReport model = load_selector_checkpoint(
            read_checkpoint(path_in(config, "train_" + method + ".ckp")));
        const Field mask = step_mask(model.mask);
        sensor_count = static_cast<int>(mask_cells(mask).size());
        for (int t = 0; t < test.times(); ++t) {
            const Field snap = test.field(t);
            recon.append(reconstruct(model.decoder, model.stats, mask, snap).values,
                         test.stamp(t));
        }
    }

    const EvalReport report = summarize(method, sensor_count, recon, test);
    write_field_csv(path_in(config, "bias_" + method + ".csv"), report.bias_field);
    write_field_pgm(path_in(config, "bias_" + method + ".pgm"), report.bias_field);
    write_field_csv(path_in(config, "rmse_" + method + ".csv"), report.rmse_field);
    write_field_pgm(path_in(config, "rmse_" + method + ".pgm"), report.rmse_field);

    std::ofstream os(path_in(config, "series_" + method + ".csv"));
    os << "t,year,day,bias,rmse\n";
    for (int t = 0; t < test.times(); ++t)
        os << t << ',' << test.stamp(t).year << ',' << test.stamp(t).day << ','
           << format_double(report.bias_series[static_cast<size_t>(t)]) << ','
           << format_double(report.rmse_series[static_cast<size_t>(t)]) << '\n';
    write_eval_summary(config, report);
}

void stage_report(const RunConfig& config) {
    std::vector<EvalReport> reports;
    for (const auto& method : config.methods) {
        const EvalSummary s = read_eval_summary(path_in(config, "eval_" + method + ".txt"));
        EvalReport r;
        r.method = s.method;
        r.sensor_count = s.sensors;
        r.med_bias = s.med_bias;
        r.med_rmse = s.med_rmse;
        reports.push_back(std::move(r));
    }
    std::ofstream txt(path_in(config, "report.txt"));
    txt << format_report_table(reports);
    std::ofstream csv(path_in(config, "report.csv"));
    csv << format_report_csv(reports);
}

int sensor_budget_from_artifacts(const RunConfig& config) {
    for (const auto& method : {std::string("st-mask"), std::string("concrete")}) {
        const std::string path = path_in(config, "sensors_" + method + ".csv");
        if (std::find(config.methods.begin(), config.methods.end(), method) !=
                config.methods.end() &&
            fs::exists(path)) {
            const int n = static_cast<int>(read_sensor_csv(path).size());
            if (n < 1) throw data_error("trained mask ended with zero sensors");
            return n;
        }
    }
    return config.sensors;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open: " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof(buf));
        for (std::streamsize i = 0; i < is.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

namespace {

bool wants(const RunConfig& config, const std::string& method) {
    return std::find(config.methods.begin(), config.methods.end(), method) !=
           config.methods.end();
}

void write_manifest(const RunConfig& config, const std::string& status) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(config.out_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name == "MANIFEST") continue;
        names.push_back(name);
    }
    std::sort(names.begin(), names.end());

    std::ofstream os((fs::path(config.out_dir) / "MANIFEST").string());
    os << "status: " << status << '\n';
    char hex[24];
    for (const auto& name : names) {
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(
                          fnv1a64_file((fs::path(config.out_dir) / name).string())));
        os << hex << "  " << name << '\n';
    }
}

} // namespace

void run_pipeline(const RunConfig& config) {
    config.validate();
    fs::create_directories(config.out_dir);
    std::string stage = "gen";
    try {
        stage_gen(config);
        stage = "entropy";
        stage_entropy(config);
        stage = "place";
        stage_place(config);
        for (const auto& method : {std::string("st-mask"), std::string("concrete")})
            if (wants(config, method)) {
                stage = "train " + method;
                stage_train(config, method);
            }
        const int budget = sensor_budget_from_artifacts(config);
        if (wants(config, "climate")) {
            stage = "baseline climate";
            stage_baseline(config, "climate", 0);
        }
        if (wants(config, "pca-qr")) {
            stage = "baseline pca-qr";
            stage_baseline(config, "pca-qr", budget);
        }
        for (const auto& method : config.methods) {
            stage = "eval " + method;
            stage_eval(config, method);
        }
        stage = "report";
        stage_report(config);
    } catch (const std::exception& e) {
        write_manifest(config, "failed at " + stage + ": " + e.what());
        throw;
    }
    write_manifest(config, "ok");
}

bool verify_manifest(const std::string& out_dir, std::string* mismatch) {
    std::ifstream is((fs::path(out_dir) / "MANIFEST").string());
    if (!is) throw data_error("no MANIFEST under " + out_dir);
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind("status:", 0) == 0 || line.empty()) continue;
        const auto sep = line.find("  ");
        if (sep == std::string::npos) continue;
        const std::string hex = line.substr(0, sep);
        const std::string name = line.substr(sep + 2);
        char expect[24];
        std::snprintf(expect, sizeof(expect), "%016llx",
                      static_cast<unsigned long long>(
                          fnv1a64_file((fs::path(out_dir) / name).string())));
        if (hex != expect) {
            if (mismatch) *mismatch = name;
            return false;
        }
    }
    return true;
}

Checkpoint make_selector_checkpoint(const TrainReport& report) {
    Checkpoint ck;
    ck["MASK"] = matrix_from_grid(report.mask.w);
    ck["MU"] = matrix_from_grid(report.stats.mu);
    ck["SD"] = matrix_from_grid(report.stats.sigma);
    const Decoder& d = report.decoder;
    if (d.kind == DecoderKind::linear) {
        ck["DEC_W"] = d.W;
        ck["DEC_B"] = d.b.transpose();
    } else {
        ck["DEC_W1"] = d.W1;
        ck["DEC_B1"] = d.b1.transpose();
        ck["DEC_W2"] = d.W2;
        ck["DEC_B2"] = d.b2.transpose();
    }
    return ck;
}

TrainReport load_selector_checkpoint(const Checkpoint& ck) {
    auto need = [&](const char* name) -> const Eigen::MatrixXd& {
        const auto it = ck.find(name);
        if (it == ck.end())
            throw data_error(std::string("checkpoint lacks section ") + name);
        return it->second;
    };
    TrainReport report;
    report.stats.mu = grid_from_matrix(need("MU"));
    report.stats.sigma = grid_from_matrix(need("SD"));
    report.mask.w = grid_from_matrix(need("MASK"));
    report.mask.w.land = report.stats.mu.land; // -inf stays sea, NaN is land
    for (int i = 0; i < report.mask.w.shape.cells(); ++i)
        if (report.mask.w.land[static_cast<size_t>(i)])
            report.mask.w.values[static_cast<size_t>(i)] =
                -std::numeric_limits<double>::infinity();

    if (ck.count("DEC_W")) {
        report.decoder.kind = DecoderKind::linear;
        report.decoder.W = need("DEC_W");
        report.decoder.b = need("DEC_B").row(0).transpose();
    } else {
        report.decoder.kind = DecoderKind::mlp1;
        report.decoder.W1 = need("DEC_W1");
        report.decoder.b1 = need("DEC_B1").row(0).transpose();
        report.decoder.W2 = need("DEC_W2");
        report.decoder.b2 = need("DEC_B2").row(0).transpose();
        report.decoder.hidden_width = static_cast<int>(report.decoder.W1.rows());
    }
    report.binary_mask = step_mask(report.mask);
    return report;
}

Checkpoint make_pod_checkpoint(const PODBasis& basis) {
    Checkpoint ck;
    ck["MU"] = matrix_from_grid(basis.mu);
    ck["W"] = basis.modes;
    ck["SV"] = basis.singular_values.transpose();
    Eigen::MatrixXd sensors(1, static_cast<Eigen::Index>(basis.sensors.size()));
    for (size_t i = 0; i < basis.sensors.size(); ++i)
        sensors(0, static_cast<Eigen::Index>(i)) = basis.sensors[i];
    ck["SENSORS"] = sensors;
    return ck;
}

PODBasis load_pod_checkpoint(const Checkpoint& ck, GridShape shape) {
    auto need = [&](const char* name) -> const Eigen::MatrixXd& {
        const auto it = ck.find(name);
        if (it == ck.end())
            throw data_error(std::string("checkpoint lacks section ") + name);
        return it->second;
    };
    PODBasis basis;
    basis.mu = grid_from_matrix(need("MU"));
    if (!(basis.mu.shape == shape)) throw data_error("pod checkpoint grid mismatch");
    basis.modes = need("W");
    basis.singular_values = need("SV").row(0).transpose();
    const auto& s = need("SENSORS");
    for (Eigen::Index i = 0; i < s.cols(); ++i)
        basis.sensors.push_back(static_cast<int>(s(0, i)));
    return basis;
}

Checkpoint make_climatology_checkpoint(const Climatology& clim, GridShape shape) {
    Checkpoint ck;
    Eigen::MatrixXd days(kDaysPerYear, shape.cells());
    for (int d = 0; d < kDaysPerYear; ++d)
        for (int i = 0; i < shape.cells(); ++i)
            days(d, i) = clim.day_mean[static_cast<size_t>(d)].values[static_cast<size_t>(i)];
    ck["CLIM"] = days;
    return ck;
}

Climatology load_climatology_checkpoint(const Checkpoint& ck, GridShape shape) {
    const auto it = ck.find("CLIM");
    if (it == ck.end()) throw data_error("checkpoint lacks section CLIM");
    const Eigen::MatrixXd& days = it->second;
    if (days.rows() != kDaysPerYear || days.cols() != shape.cells())
        throw data_error("climatology checkpoint grid mismatch");

    Climatology clim;
    clim.day_mean.assign(kDaysPerYear, Field(shape, 0.0));
    clim.day_counts.assign(kDaysPerYear,
                           std::vector<int>(static_cast<size_t>(shape.cells()), 1));
    for (int d = 0; d < kDaysPerYear; ++d) {
        auto& f = clim.day_mean[static_cast<size_t>(d)];
        for (int i = 0; i < shape.cells(); ++i) {
            f.values[static_cast<size_t>(i)] = days(d, i);
            if (std::isnan(days(d, i))) f.land[static_cast<size_t>(i)] = 1;
        }
    }
    return clim;
}

} // namespace entroplace
