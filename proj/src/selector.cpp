#include "entroplace/selector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "entroplace/errors.hpp"
#include "entroplace/rng.hpp"

namespace entroplace {

namespace {

// Standardized train matrix over sea cells, with the active (sd > 0) weights.
struct StdData {
    SeaIndex sea;
    Eigen::MatrixXd X;       // n_sea x T, standardized; inactive rows zero
    Eigen::VectorXd active;  // 1 where sd > 0
    int n_active = 0;

    StdData(const FieldSeries& series, const PixelStats& stats)
        : sea(series.land()) {
        const int n = sea.count();
        const int T = series.times();
        X.resize(n, T);
        active.resize(n);
        for (int i = 0; i < n; ++i) {
            const int cell = sea.cell_of[static_cast<size_t>(i)];
            const double mu = stats.mu.values[static_cast<size_t>(cell)];
            const double sd = stats.sigma.values[static_cast<size_t>(cell)];
            active(i) = sd > 0 ? 1.0 : 0.0;
            for (int t = 0; t < T; ++t)
                X(i, t) = sd > 0 ? (series.slab(t)[static_cast<size_t>(cell)] - mu) / sd : 0.0;
        }
        n_active = static_cast<int>(active.sum());
    }
};

Eigen::VectorXd standardize_field(const Field& observed, const PixelStats& stats,
                                  const SeaIndex& sea) {
    Eigen::VectorXd x(sea.count());
    for (int i = 0; i < sea.count(); ++i) {
        const int cell = sea.cell_of[static_cast<size_t>(i)];
        const double mu = stats.mu.values[static_cast<size_t>(cell)];
        const double sd = stats.sigma.values[static_cast<size_t>(cell)];
        x(i) = sd > 0 ? (observed.values[static_cast<size_t>(cell)] - mu) / sd : 0.0;
    }
    return x;
}

Eigen::VectorXd mask_vector(const Field& mask, const SeaIndex& sea) {
    Eigen::VectorXd m(sea.count());
    for (int i = 0; i < sea.count(); ++i)
        m(i) = mask.values[static_cast<size_t>(sea.cell_of[static_cast<size_t>(i)])];
    return m;
}

struct Forward {
    Eigen::MatrixXd out;
    Eigen::MatrixXd hidden; // mlp1 only
};

Forward decoder_forward(const Decoder& dec, const Eigen::MatrixXd& xin) {
    Forward f;
    if (dec.kind == DecoderKind::linear) {
        f.out = dec.W * xin;
        f.out.colwise() += dec.b;
    } else {
        f.hidden = dec.W1 * xin;
        f.hidden.colwise() += dec.b1;
        f.hidden = f.hidden.array().tanh();
        f.out = dec.W2 * f.hidden;
        f.out.colwise() += dec.b2;
    }
    return f;
}

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// Adam with per-parameter moments.  Matrices and the mask share the same
// update rule through an Eigen map.
class Adam {
public:
    explicit Adam(Eigen::Index size)
        : m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

    void step(Eigen::Map<Eigen::VectorXd> theta, const Eigen::Map<const Eigen::VectorXd> grad,
              double lr) {
        ++t_;
        const double bc1 = 1.0 - std::pow(kBeta1, t_);
        const double bc2 = 1.0 - std::pow(kBeta2, t_);
        m_ = kBeta1 * m_ + (1.0 - kBeta1) * grad;
        v_ = kBeta2 * v_.array() + (1.0 - kBeta2) * grad.array().square();
        theta.array() -=
            lr * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + kEps);
    }

private:
    static constexpr double kEps = kAdamEps;
    Eigen::VectorXd m_, v_;
    long t_ = 0;
};

// Column-wise Adam for weight matrices driven by a sparse binary mask: only
// columns whose input is live carry gradient, so moments exist per touched
// column.  A column that never fires has zero gradient and zero state, which
// is exactly what dense Adam would hold for it.
class ColumnAdam {
public:
    explicit ColumnAdam(Eigen::Index rows) : rows_(rows) {}

    void step(Eigen::Ref<Eigen::VectorXd> column, const Eigen::VectorXd& grad, int col,
              double lr) {
        State& s = cols_.try_emplace(col, rows_).first->second;
        ++s.t;
        const double bc1 = 1.0 - std::pow(kBeta1, s.t);
        const double bc2 = 1.0 - std::pow(kBeta2, s.t);
        s.m = kBeta1 * s.m + (1.0 - kBeta1) * grad;
        s.v = kBeta2 * s.v.array() + (1.0 - kBeta2) * grad.array().square();
        column.array() -=
            lr * (s.m.array() / bc1) / ((s.v.array() / bc2).sqrt() + kAdamEps);
    }

private:
    struct State {
        explicit State(Eigen::Index rows)
            : m(Eigen::VectorXd::Zero(rows)), v(Eigen::VectorXd::Zero(rows)) {}
        Eigen::VectorXd m, v;
        long t = 0;
    };
    Eigen::Index rows_;
    std::unordered_map<int, State> cols_;
};

Eigen::Map<Eigen::VectorXd> flat(Eigen::MatrixXd& m) {
    return {m.data(), m.size()};
}
Eigen::Map<Eigen::VectorXd> flat(Eigen::VectorXd& v) {
    return {v.data(), v.size()};
}
Eigen::Map<const Eigen::VectorXd> cflat(const Eigen::MatrixXd& m) {
    return {m.data(), m.size()};
}
Eigen::Map<const Eigen::VectorXd> cflat(const Eigen::VectorXd& v) {
    return {v.data(), v.size()};
}

Decoder init_decoder(const TrainConfig& config, int n_sea) {
    Decoder dec;
    dec.kind = config.decoder;
    if (config.decoder == DecoderKind::linear) {
        dec.W = Eigen::MatrixXd::Zero(n_sea, n_sea);
        dec.b = Eigen::VectorXd::Zero(n_sea);
    } else {
        const int h = config.hidden_width;
        dec.hidden_width = h;
        const CounterRng rng(derive_seed(config.seed, "decoder-init"));
        const double s1 = std::sqrt(6.0 / (n_sea + h));
        const double s2 = std::sqrt(6.0 / (h + n_sea));
        dec.W1.resize(h, n_sea);
        dec.W2.resize(n_sea, h);
        std::uint64_t ctr = 0;
        for (Eigen::Index i = 0; i < dec.W1.size(); ++i)
            dec.W1.data()[i] = s1 * (2.0 * rng.uniform(ctr++) - 1.0);
        for (Eigen::Index i = 0; i < dec.W2.size(); ++i)
            dec.W2.data()[i] = s2 * (2.0 * rng.uniform(ctr++) - 1.0);
        dec.b1 = Eigen::VectorXd::Zero(h);
        dec.b2 = Eigen::VectorXd::Zero(n_sea);
    }
    return dec;
}

} // namespace

void TrainConfig::validate() const {
    if (lambda_max < 0) throw std::invalid_argument("train: lambda_max must be >= 0");
    if (lambda_ramp_epochs < 0)
        throw std::invalid_argument("train: lambda_ramp_epochs must be >= 0");
    if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (!(step_size > 0)) throw std::invalid_argument("train: step_size must be > 0");
    if (!(step_decay > 0 && step_decay <= 1))
        throw std::invalid_argument("train: step_decay must lie in (0, 1]");
    if (selector == SelectorKind::concrete) {
        if (concrete_k < 1) throw std::invalid_argument("train: concrete_k must be >= 1");
        if (!(concrete_t_end > 0 && concrete_t_end <= concrete_t_start))
            throw std::invalid_argument("train: need 0 < T_end <= T_start");
    }
    if (decoder == DecoderKind::mlp1 && hidden_width < 1)
        throw std::invalid_argument("train: hidden_width must be >= 1");
}

Field step_mask(const MaskParams& params) {
    Field mask(params.w.shape, 0.0);
    mask.land = params.w.land;
    for (int i = 0; i < params.w.shape.cells(); ++i) {
        if (params.w.is_land(i)) continue;
        mask.values[static_cast<size_t>(i)] =
            params.w.values[static_cast<size_t>(i)] >= 0.0 ? 1.0 : 0.0;
    }
    return mask;
}

Field straight_through_grad(const MaskParams& params, const Field& upstream) {
    if (!(upstream.shape == params.w.shape))
        throw std::invalid_argument("straight-through: shape mismatch");
    Field grad = upstream;
    grad.land = params.w.land;
    for (int i = 0; i < grad.shape.cells(); ++i)
        if (params.w.is_land(i)) grad.values[static_cast<size_t>(i)] = 0.0;
    return grad;
}

Eigen::VectorXd concrete_select(const Eigen::MatrixXd& logits, double temperature,
                                const Eigen::MatrixXd& noise) {
    if (!(temperature > 0)) throw std::invalid_argument("concrete: temperature must be > 0");
    if (noise.rows() != logits.rows() || noise.cols() != logits.cols())
        throw std::invalid_argument("concrete: noise shape mismatch");

    Eigen::VectorXd weights = Eigen::VectorXd::Zero(logits.cols());
    for (Eigen::Index h = 0; h < logits.rows(); ++h) {
        Eigen::VectorXd z = (logits.row(h) + noise.row(h)).transpose() / temperature;
        const double zmax = z.maxCoeff();
        Eigen::VectorXd e = (z.array() - zmax).exp();
        weights += e / e.sum();
    }
    return weights;
}

std::vector<int> concrete_eval_cells(const Eigen::MatrixXd& logits) {
    std::vector<int> cells;
    std::vector<char> taken(static_cast<size_t>(logits.cols()), 0);
    for (Eigen::Index h = 0; h < logits.rows(); ++h) {
        // Argmax among cells not yet taken; duplicates fall to the runner-up.
        int best = -1;
        double best_v = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < logits.cols(); ++j) {
            if (taken[static_cast<size_t>(j)]) continue;
            if (logits(h, j) > best_v) {
                best_v = logits(h, j);
                best = static_cast<int>(j);
            }
        }
        if (best < 0) throw std::invalid_argument("concrete: more heads than cells");
        taken[static_cast<size_t>(best)] = 1;
        cells.push_back(best);
    }
    return cells;
}

LossParts decoder_loss(const Decoder& decoder, const PixelStats& stats, const Field& mask,
                       const FieldSeries& batch, double lambda) {
    if (batch.times() == 0) throw std::invalid_argument("loss: empty batch");
    const StdData data(batch, stats);
    const int n = data.sea.count();
    if (decoder.kind == DecoderKind::linear && decoder.W.cols() != n)
        throw std::invalid_argument("loss: decoder does not match grid");

    const Eigen::VectorXd m = mask_vector(mask, data.sea);
    Eigen::MatrixXd xin = data.X.array().colwise() * m.array();
    const Forward f = decoder_forward(decoder, xin);
    Eigen::MatrixXd err = (f.out - data.X).array().colwise() * data.active.array();

    LossParts parts;
    parts.mse = err.squaredNorm() / (static_cast<double>(data.n_active) * batch.times());
    parts.sparsity = lambda * m.sum() / n;
    parts.total = parts.mse + parts.sparsity;
    return parts;
}

DecoderGradients decoder_gradients(const Decoder& decoder, const PixelStats& stats,
                                   const Field& mask, const FieldSeries& batch,
                                   double lambda) {
    if (batch.times() == 0) throw std::invalid_argument("gradients: empty batch");
    const StdData data(batch, stats);
    const int n = data.sea.count();
    const int bs = batch.times();

    const Eigen::VectorXd m = mask_vector(mask, data.sea);
    Eigen::MatrixXd xin = data.X.array().colwise() * m.array();
    const Forward f = decoder_forward(decoder, xin);
    Eigen::MatrixXd err = (f.out - data.X).array().colwise() * data.active.array();
    Eigen::MatrixXd gout = 2.0 / (static_cast<double>(data.n_active) * bs) * err;

    DecoderGradients g;
    Eigen::MatrixXd gxin;
    if (decoder.kind == DecoderKind::linear) {
        g.W = gout * xin.transpose();
        g.b = gout.rowwise().sum();
        gxin = decoder.W.transpose() * gout;
    } else {
        Eigen::MatrixXd gh = decoder.W2.transpose() * gout;
        Eigen::MatrixXd gpre = gh.array() * (1.0 - f.hidden.array().square());
        g.W2 = gout * f.hidden.transpose();
        g.b2 = gout.rowwise().sum();
        g.W1 = gpre * xin.transpose();
        g.b1 = gpre.rowwise().sum();
        gxin = decoder.W1.transpose() * gpre;
    }
    g.mask = (gxin.array() * data.X.array()).rowwise().sum();
    g.mask.array() += lambda / n;
    return g;
}

TrainReport train(const FieldSeries& train_series, const MaskParams& init,
                  const TrainConfig& config) {
    config.validate();
    if (train_series.times() == 0) throw std::invalid_argument("train: empty series");
    if (!(init.w.shape == train_series.shape()))
        throw std::invalid_argument("train: mask shape does not match series");
    const auto t_start = std::chrono::steady_clock::now();

    const PixelStats stats = fit_pixel_gaussian(train_series);
    const StdData data(train_series, stats);
    const int n = data.sea.count();
    const int T = train_series.times();
    if (data.n_active == 0) throw data_error("train: no cell has positive variance");

    Decoder dec = init_decoder(config, n);
    const bool st = config.selector == SelectorKind::straight_through;

    // Mask parameters: w logits for straight-through, k-head logits otherwise.
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i)
        w(i) = init.w.values[static_cast<size_t>(data.sea.cell_of[static_cast<size_t>(i)])];
    Eigen::MatrixXd logits;
    if (!st) {
        logits.resize(config.concrete_k, n);
        for (int h = 0; h < config.concrete_k; ++h)
            for (int i = 0; i < n; ++i)
                logits(h, i) = std::isfinite(w(i)) ? w(i) : -60.0;
    }

    Adam opt_w(st ? n : logits.size());
    // Straight-through runs column-restricted: the binary mask zeroes all but
    // its support, so W (and W1) only ever receive gradient on those columns.
    ColumnAdam opt_W_cols(dec.kind == DecoderKind::linear ? n : config.hidden_width);
    Adam opt_W(st ? 0 : (dec.kind == DecoderKind::linear ? dec.W.size() : dec.W1.size()));
    Adam opt_b(dec.kind == DecoderKind::linear ? dec.b.size() : dec.b1.size());
    Adam opt_W2(dec.kind == DecoderKind::mlp1 ? dec.W2.size() : 0);
    Adam opt_b2(dec.kind == DecoderKind::mlp1 ? dec.b2.size() : 0);

    const CounterRng gumbel_rng(derive_seed(config.seed, "concrete-noise"));
    const int n_batches = (T + config.batch_size - 1) / config.batch_size;

    TrainReport report;
    report.stats = stats;
    std::vector<int> order(static_cast<size_t>(T));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double lr = config.step_size * std::pow(config.step_decay, epoch);
        const double lambda =
            config.lambda_ramp_epochs > 0
                ? config.lambda_max *
                      std::min(1.0, static_cast<double>(epoch) / config.lambda_ramp_epochs)
                : config.lambda_max;
        const double temperature =
            st ? 1.0
               : config.concrete_t_start *
                     std::pow(config.concrete_t_end / config.concrete_t_start,
                              config.epochs > 1
                                  ? static_cast<double>(epoch) / (config.epochs - 1)
                                  : 1.0);

        // Per-epoch shuffle, seeded independently of everything else.
        SplitMix shuffle(derive_seed(config.seed, "shuffle-" + std::to_string(epoch)));
        for (int i = T - 1; i > 0; --i)
            std::swap(order[static_cast<size_t>(i)],
                      order[static_cast<size_t>(shuffle.below(static_cast<std::uint64_t>(i) + 1))]);

        double epoch_mse = 0.0;
        double epoch_sparsity = 0.0;

        for (int batch = 0; batch < n_batches; ++batch) {
            const int lo = batch * config.batch_size;
            const int bs = std::min(config.batch_size, T - lo);

            Eigen::MatrixXd xb(n, bs);
            for (int i = 0; i < bs; ++i)
                xb.col(i) = data.X.col(order[static_cast<size_t>(lo + i)]);

            double mse = 0.0, sparsity = 0.0;

            if (st) {
                // Support of the binary mask; everything off it carries zero
                // input and therefore zero decoder gradient.
                std::vector<int> support;
                for (int i = 0; i < n; ++i)
                    if (w(i) >= 0.0) support.push_back(i);
                const int k = static_cast<int>(support.size());

                Eigen::MatrixXd xs(k, bs);
                for (int j = 0; j < k; ++j)
                    xs.row(j) = xb.row(support[static_cast<size_t>(j)]);

                Eigen::MatrixXd err, gout, gxs; // gxs: d loss / d masked input
                if (dec.kind == DecoderKind::linear) {
                    Eigen::MatrixXd Ws(n, k);
                    for (int j = 0; j < k; ++j)
                        Ws.col(j) = dec.W.col(support[static_cast<size_t>(j)]);
                    Eigen::MatrixXd out = Ws * xs;
                    out.colwise() += dec.b;
                    err = (out - xb).array().colwise() * data.active.array();
                    gout = 2.0 / (static_cast<double>(data.n_active) * bs) * err;
                    gxs = Ws.transpose() * gout;
                    Eigen::MatrixXd gWs = gout * xs.transpose();
                    Eigen::VectorXd gb = gout.rowwise().sum();
                    for (int j = 0; j < k; ++j)
                        opt_W_cols.step(dec.W.col(support[static_cast<size_t>(j)]), gWs.col(j),
                                        support[static_cast<size_t>(j)], lr);
                    opt_b.step(flat(dec.b), cflat(gb), lr);
                } else {
                    Eigen::MatrixXd W1s(config.hidden_width, k);
                    for (int j = 0; j < k; ++j)
                        W1s.col(j) = dec.W1.col(support[static_cast<size_t>(j)]);
                    Eigen::MatrixXd hidden = W1s * xs;
                    hidden.colwise() += dec.b1;
                    hidden = hidden.array().tanh();
                    Eigen::MatrixXd out = dec.W2 * hidden;
                    out.colwise() += dec.b2;
                    err = (out - xb).array().colwise() * data.active.array();
                    gout = 2.0 / (static_cast<double>(data.n_active) * bs) * err;
                    Eigen::MatrixXd gh = dec.W2.transpose() * gout;
                    Eigen::MatrixXd gpre = gh.array() * (1.0 - hidden.array().square());
                    Eigen::MatrixXd gW2 = gout * hidden.transpose();
                    Eigen::VectorXd gb2 = gout.rowwise().sum();
                    Eigen::MatrixXd gW1s = gpre * xs.transpose();
                    Eigen::VectorXd gb1 = gpre.rowwise().sum();
                    gxs = W1s.transpose() * gpre;
                    for (int j = 0; j < k; ++j)
                        opt_W_cols.step(dec.W1.col(support[static_cast<size_t>(j)]), gW1s.col(j),
                                        support[static_cast<size_t>(j)], lr);
                    opt_b.step(flat(dec.b1), cflat(gb1), lr);
                    opt_W2.step(flat(dec.W2), cflat(gW2), lr);
                    opt_b2.step(flat(dec.b2), cflat(gb2), lr);
                }

                mse = err.squaredNorm() / (static_cast<double>(data.n_active) * bs);
                sparsity = lambda * k / n;
                if (!std::isfinite(mse))
                    throw numeric_error("train: loss diverged at epoch " +
                                        std::to_string(epoch));

                if (!config.freeze_mask) {
                    // Straight-through: d loss / d w = d loss / d mask, with
                    // frozen (-inf) cells held in place.
                    Eigen::VectorXd gw = Eigen::VectorXd::Constant(n, lambda / n);
                    for (int j = 0; j < k; ++j) {
                        const int i = support[static_cast<size_t>(j)];
                        gw(i) += gxs.row(j).dot(xb.row(i));
                    }
                    for (int i = 0; i < n; ++i)
                        if (!std::isfinite(w(i))) gw(i) = 0.0;
                    Eigen::VectorXd w_before = w;
                    opt_w.step(flat(w), cflat(gw), lr);
                    for (int i = 0; i < n; ++i)
                        if (!std::isfinite(w_before(i))) w(i) = w_before(i);
                }
            } else {
                // Concrete relaxation: weights are dense, so the decoder sees
                // every cell and the full matrices update each batch.
                Eigen::MatrixXd noise(config.concrete_k, n);
                const std::uint64_t base =
                    (static_cast<std::uint64_t>(epoch) * n_batches + batch) *
                    static_cast<std::uint64_t>(config.concrete_k) * n;
                for (int h = 0; h < config.concrete_k; ++h)
                    for (int i = 0; i < n; ++i)
                        noise(h, i) =
                            gumbel_rng.gumbel(base + static_cast<std::uint64_t>(h) * n + i);
                Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
                std::vector<Eigen::VectorXd> softmaxes;
                softmaxes.reserve(static_cast<size_t>(config.concrete_k));
                for (int h = 0; h < config.concrete_k; ++h) {
                    Eigen::VectorXd z =
                        (logits.row(h).transpose() + noise.row(h).transpose()) / temperature;
                    const double zmax = z.maxCoeff();
                    Eigen::VectorXd e = (z.array() - zmax).exp();
                    softmaxes.push_back(e / e.sum());
                    m += softmaxes.back();
                }

                Eigen::MatrixXd xin = xb.array().colwise() * m.array();
                const Forward f = decoder_forward(dec, xin);
                Eigen::MatrixXd err = (f.out - xb).array().colwise() * data.active.array();
                mse = err.squaredNorm() / (static_cast<double>(data.n_active) * bs);
                sparsity = lambda * m.sum() / n;
                if (!std::isfinite(mse + sparsity))
                    throw numeric_error("train: loss diverged at epoch " +
                                        std::to_string(epoch));

                Eigen::MatrixXd gout = 2.0 / (static_cast<double>(data.n_active) * bs) * err;
                Eigen::MatrixXd gxin;
                if (dec.kind == DecoderKind::linear) {
                    Eigen::MatrixXd gW = gout * xin.transpose();
                    Eigen::VectorXd gb = gout.rowwise().sum();
                    gxin = dec.W.transpose() * gout;
                    opt_W.step(flat(dec.W), cflat(gW), lr);
                    opt_b.step(flat(dec.b), cflat(gb), lr);
                } else {
                    Eigen::MatrixXd gh = dec.W2.transpose() * gout;
                    Eigen::MatrixXd gpre = gh.array() * (1.0 - f.hidden.array().square());
                    Eigen::MatrixXd gW2 = gout * f.hidden.transpose();
                    Eigen::VectorXd gb2 = gout.rowwise().sum();
                    Eigen::MatrixXd gW1 = gpre * xin.transpose();
                    Eigen::VectorXd gb1 = gpre.rowwise().sum();
                    gxin = dec.W1.transpose() * gpre;
                    opt_W.step(flat(dec.W1), cflat(gW1), lr);
                    opt_b.step(flat(dec.b1), cflat(gb1), lr);
                    opt_W2.step(flat(dec.W2), cflat(gW2), lr);
                    opt_b2.step(flat(dec.b2), cflat(gb2), lr);
                }

                if (!config.freeze_mask) {
                    Eigen::VectorXd gm = (gxin.array() * xb.array()).rowwise().sum();
                    gm.array() += lambda / n;
                    Eigen::MatrixXd glog(config.concrete_k, n);
                    for (int h = 0; h < config.concrete_k; ++h) {
                        const auto& s = softmaxes[static_cast<size_t>(h)];
                        const double dot = s.dot(gm);
                        glog.row(h) =
                            ((s.array() * (gm.array() - dot)) / temperature).transpose();
                    }
                    opt_w.step(flat(logits), cflat(glog), lr);
                }
            }

            epoch_mse += mse * bs;
            epoch_sparsity += sparsity * bs;
        }

        EpochLog log;
        log.mse_term = epoch_mse / T;
        log.sparsity_term = epoch_sparsity / T;
        log.total = log.mse_term + log.sparsity_term;
        if (st) {
            log.sensors = static_cast<int>((w.array() >= 0.0).count());
        } else {
            log.sensors = config.concrete_k;
        }
        report.curve.push_back(log);
    }

    // Final artifacts.
    report.mask.w = Field(train_series.shape(), 0.0);
    report.mask.w.land = train_series.land();
    report.binary_mask = Field(train_series.shape(), 0.0);
    report.binary_mask.land = train_series.land();
    const double neg_inf = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < train_series.shape().cells(); ++i)
        if (train_series.is_land(i)) {
            report.mask.w.values[static_cast<size_t>(i)] = neg_inf;
            report.binary_mask.values[static_cast<size_t>(i)] = 0.0;
        }
    if (st) {
        for (int i = 0; i < n; ++i) {
            const int cell = data.sea.cell_of[static_cast<size_t>(i)];
            report.mask.w.values[static_cast<size_t>(cell)] = w(i);
            report.binary_mask.values[static_cast<size_t>(cell)] = w(i) >= 0.0 ? 1.0 : 0.0;
        }
    } else {
        for (int i = 0; i < n; ++i)
            report.mask.w.values[static_cast<size_t>(data.sea.cell_of[static_cast<size_t>(i)])] =
                -1.0;
        for (int cell_idx : concrete_eval_cells(logits)) {
            const int cell = data.sea.cell_of[static_cast<size_t>(cell_idx)];
            report.mask.w.values[static_cast<size_t>(cell)] = 1.0;
            report.binary_mask.values[static_cast<size_t>(cell)] = 1.0;
        }
    }
    report.decoder = std::move(dec);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

Field reconstruct(const Decoder& decoder, const PixelStats& stats, const Field& mask,
                  const Field& observed) {
    if (!(observed.shape == stats.mu.shape) || !(mask.shape == observed.shape))
        throw std::invalid_argument("reconstruct: shape mismatch");
    const SeaIndex sea(stats.mu.land);
    const int n = sea.count();
    const Eigen::Index expect =
        decoder.kind == DecoderKind::linear ? decoder.W.cols() : decoder.W1.cols();
    if (expect != n) throw std::invalid_argument("reconstruct: decoder does not match grid");

    Eigen::VectorXd x = standardize_field(observed, stats, sea);
    const Eigen::VectorXd m = mask_vector(mask, sea);

    // Only the mask support feeds the decoder; gathering those columns keeps
    // a snapshot reconstruction at O(n * k) rather than O(n^2).
    std::vector<int> support;
    for (int i = 0; i < n; ++i)
        if (m(i) != 0.0) support.push_back(i);
    const int k = static_cast<int>(support.size());
    Eigen::VectorXd xs(k);
    for (int j = 0; j < k; ++j)
        xs(j) = m(support[static_cast<size_t>(j)]) * x(support[static_cast<size_t>(j)]);

    Eigen::VectorXd out_vec;
    if (decoder.kind == DecoderKind::linear) {
        Eigen::MatrixXd Ws(n, k);
        for (int j = 0; j < k; ++j) Ws.col(j) = decoder.W.col(support[static_cast<size_t>(j)]);
        out_vec = Ws * xs + decoder.b;
    } else {
        Eigen::MatrixXd W1s(decoder.W1.rows(), k);
        for (int j = 0; j < k; ++j)
            W1s.col(j) = decoder.W1.col(support[static_cast<size_t>(j)]);
        Eigen::VectorXd hidden = ((W1s * xs + decoder.b1).array().tanh()).matrix();
        out_vec = decoder.W2 * hidden + decoder.b2;
    }

    Field out(observed.shape, 0.0);
    out.land = stats.mu.land;
    for (int i = 0; i < out.shape.cells(); ++i)
        if (out.is_land(i)) out.values[static_cast<size_t>(i)] = kLandSentinel;
    for (int i = 0; i < n; ++i) {
        const int cell = sea.cell_of[static_cast<size_t>(i)];
        const double mu = stats.mu.values[static_cast<size_t>(cell)];
        const double sd = stats.sigma.values[static_cast<size_t>(cell)];
        out.values[static_cast<size_t>(cell)] = mu + (sd > 0 ? sd * out_vec(i) : 0.0);
    }
    return out;
}

} // namespace entroplace
