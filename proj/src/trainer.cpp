#include "lsta/trainer.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lsta/checkpoint.hpp"

namespace lsta {
namespace {

using Clock = std::chrono::steady_clock;

std::size_t to_count(const std::string& v, const std::string& key) {
    try {
        return static_cast<std::size_t>(std::stoull(v));
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad count for '" + key + "': " + v);
    }
}

double to_real(const std::string& v, const std::string& key) {
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for '" + key + "': " + v);
    }
}

bool to_flag(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw std::invalid_argument("config: bad flag for '" + key + "': " + v);
}

}  // namespace

void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "model") cfg.model = value;
    else if (key == "hidden") cfg.hidden = to_count(value, key);
    else if (key == "classes") cfg.classes = to_count(value, key);
    else if (key == "dataset") cfg.dataset = value;
    else if (key == "data_dir") cfg.data_dir = value;
    else if (key == "train_n") cfg.train_n = to_count(value, key);
    else if (key == "test_n") cfg.test_n = to_count(value, key);
    else if (key == "epochs") cfg.epochs = to_count(value, key);
    else if (key == "batch") cfg.batch = to_count(value, key);
    else if (key == "optimizer") cfg.optimizer = value;
    else if (key == "lr") cfg.lr = to_real(value, key);
    else if (key == "momentum") cfg.momentum = to_real(value, key);
    else if (key == "beta1") cfg.beta1 = to_real(value, key);
    else if (key == "beta2") cfg.beta2 = to_real(value, key);
    else if (key == "epsilon") cfg.epsilon = to_real(value, key);
    else if (key == "clip_norm") cfg.clip_norm = to_real(value, key);
    else if (key == "seed") cfg.seed = to_count(value, key);
    else if (key == "warm_start_as_lstm") cfg.warm_start_as_lstm = to_flag(value, key);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "synth_timesteps") cfg.synth_timesteps = to_count(value, key);
    else if (key == "synth_features") cfg.synth_features = to_count(value, key);
    else if (key == "synth_signal_len") cfg.synth_signal_len = to_count(value, key);
    else if (key == "synth_noise_sigma") cfg.synth_noise_sigma = to_real(value, key);
    else if (key == "synth_train_n") cfg.synth_train_n = to_count(value, key);
    else if (key == "synth_test_n") cfg.synth_test_n = to_count(value, key);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value: " + line);
        auto trim = [](std::string s) {
            const std::size_t a = s.find_first_not_of(" \t\r");
            const std::size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

std::string config_to_text(const RunConfig& cfg) {
    std::ostringstream out;
    out << "model=" << cfg.model << "\n"
        << "hidden=" << cfg.hidden << "\n"
        << "classes=" << cfg.classes << "\n"
        << "dataset=" << cfg.dataset << "\n"
        << "data_dir=" << cfg.data_dir << "\n"
        << "train_n=" << cfg.train_n << "\n"
        << "test_n=" << cfg.test_n << "\n"
        << "epochs=" << cfg.epochs << "\n"
        << "batch=" << cfg.batch << "\n"
        << "optimizer=" << cfg.optimizer << "\n"
        << "lr=" << cfg.lr << "\n"
        << "momentum=" << cfg.momentum << "\n"
        << "beta1=" << cfg.beta1 << "\n"
        << "beta2=" << cfg.beta2 << "\n"
        << "epsilon=" << cfg.epsilon << "\n"
        << "clip_norm=" << cfg.clip_norm << "\n"
        << "seed=" << cfg.seed << "\n"
        << "warm_start_as_lstm=" << (cfg.warm_start_as_lstm ? 1 : 0) << "\n"
        << "out_dir=" << cfg.out_dir << "\n"
        << "synth_timesteps=" << cfg.synth_timesteps << "\n"
        << "synth_features=" << cfg.synth_features << "\n"
        << "synth_signal_len=" << cfg.synth_signal_len << "\n"
        << "synth_noise_sigma=" << cfg.synth_noise_sigma << "\n"
        << "synth_train_n=" << cfg.synth_train_n << "\n"
        << "synth_test_n=" << cfg.synth_test_n << "\n";
    return out.str();
}

void validate_config(const RunConfig& cfg) {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("config: field '" + field + "' " + why);
    };
    if (cfg.model != "lstm" && cfg.model != "lsta" && cfg.model != "gru" &&
        cfg.model != "bilstm")
        fail("model", "must be lstm, lsta, gru, or bilstm; got '" + cfg.model + "'");
    if (cfg.hidden < 1) fail("hidden", "must be >= 1");
    if (cfg.classes < 2) fail("classes", "must be >= 2");
    if (cfg.dataset != "mnist" && cfg.dataset != "fashion" && cfg.dataset != "synth")
        fail("dataset", "must be mnist, fashion, or synth; got '" + cfg.dataset + "'");
    if (cfg.epochs < 1) fail("epochs", "must be >= 1");
    if (cfg.batch < 1) fail("batch", "must be >= 1");
    if (cfg.optimizer != "adam" && cfg.optimizer != "sgd")
        fail("optimizer", "must be adam or sgd; got '" + cfg.optimizer + "'");
    if (cfg.lr <= 0.0) fail("lr", "must be > 0");
    if (cfg.dataset != "synth" && !std::filesystem::exists(cfg.data_dir))
        fail("data_dir", "path does not exist: " + cfg.data_dir);
}

CellKind cell_kind_of(const std::string& model_name) {
    if (model_name == "lstm" || model_name == "bilstm") return CellKind::lstm;
    if (model_name == "lsta") return CellKind::lsta;
    if (model_name == "gru") return CellKind::gru;
    throw std::invalid_argument("unknown model name: " + model_name);
}

Direction direction_of(const std::string& model_name) {
    return model_name == "bilstm" ? Direction::bidirectional : Direction::forward;
}

EvalResult evaluate(const SequenceModel& model, const LabeledSequences& data) {
    if (data.sequences.empty()) throw std::invalid_argument("evaluate: empty dataset");
    if (data.features != model.input)
        throw ShapeError("evaluate: dataset feature dim " + std::to_string(data.features) +
                         " vs model input " + std::to_string(model.input));
    EvalResult out;
    double loss_sum = 0.0;
    for (std::size_t n = 0; n < data.sequences.size(); ++n) {
        const ForwardTrace trace = unroll_forward(model, data.sequences[n]);
        loss_sum += softmax_cross_entropy(trace.logits, data.labels[n]).loss;
        std::size_t best = 0;
        for (std::size_t k = 1; k < trace.probabilities.dim(); ++k)
            if (trace.probabilities[k] > trace.probabilities[best]) best = k;
        if (best == data.labels[n]) ++out.correct;
    }
    out.total = data.sequences.size();
    out.accuracy = static_cast<double>(out.correct) / static_cast<double>(out.total);
    out.mean_loss = loss_sum / static_cast<double>(out.total);
    return out;
}

DatasetPair load_dataset(const RunConfig& cfg) {
    DatasetPair out;
    if (cfg.dataset == "synth") {
        SynthConfig sc;
        sc.timesteps = cfg.synth_timesteps;
        sc.features = cfg.synth_features;
        sc.signal_len = cfg.synth_signal_len;
        sc.noise_sigma = cfg.synth_noise_sigma;
        sc.count = cfg.synth_train_n;
        sc.seed = cfg.seed * 2 + 1;
        out.train = synth_signal_task(sc);
        sc.count = cfg.synth_test_n;
        sc.seed = cfg.seed * 2 + 2;
        out.test = synth_signal_task(sc);
        return out;
    }

    const std::filesystem::path dir(cfg.data_dir);
    auto pick = [&](const char* stem) {
        const std::filesystem::path plain = dir / stem;
        if (std::filesystem::exists(plain)) return plain.string();
        return (dir / (std::string(stem) + ".gz")).string();
    };
    const IdxImages train_imgs = load_idx_images(pick("train-images-idx3-ubyte"));
    const auto train_labels = load_idx_labels(pick("train-labels-idx1-ubyte"));
    const IdxImages test_imgs = load_idx_images(pick("t10k-images-idx3-ubyte"));
    const auto test_labels = load_idx_labels(pick("t10k-labels-idx1-ubyte"));

    const LabeledSequences train_all = rows_as_sequence(train_imgs, train_labels, cfg.classes);
    const LabeledSequences test_all = rows_as_sequence(test_imgs, test_labels, cfg.classes);

    // Subset rule: first n after a seeded shuffle of the split.
    const std::size_t train_n =
        cfg.train_n == 0 ? train_all.sequences.size() : cfg.train_n;
    const std::size_t test_n = cfg.test_n == 0 ? test_all.sequences.size() : cfg.test_n;
    out.train = take_subset(train_all, shuffled_indices(train_all.sequences.size(), cfg.seed),
                            train_n);
    out.test =
        take_subset(test_all, shuffled_indices(test_all.sequences.size(), cfg.seed + 1), test_n);
    return out;
}

TrainResult train(const RunConfig& cfg, std::ostream* log) {
    validate_config(cfg);
    const DatasetPair data = load_dataset(cfg);

    Rng rng(cfg.seed);
    SequenceModel model =
        make_model(cell_kind_of(cfg.model), direction_of(cfg.model), cfg.hidden,
                   data.train.features, data.train.classes, rng, cfg.warm_start_as_lstm);

    OptimizerConfig ocfg;
    ocfg.kind = cfg.optimizer == "sgd" ? OptimizerKind::sgd : OptimizerKind::adam;
    ocfg.learning_rate = cfg.lr;
    ocfg.momentum = cfg.momentum;
    ocfg.beta1 = cfg.beta1;
    ocfg.beta2 = cfg.beta2;
    ocfg.epsilon = cfg.epsilon;
    ocfg.clip_norm = cfg.clip_norm;
    OptimizerState ostate = make_optimizer_state(ocfg, model);

    std::filesystem::create_directories(cfg.out_dir);
    const std::string metrics_path = (std::filesystem::path(cfg.out_dir) / "metrics.csv").string();
    std::ofstream metrics(metrics_path, std::ios::trunc);
    if (!metrics) throw std::runtime_error("train: cannot open " + metrics_path);
    metrics << "epoch,step,split,loss,accuracy,wall_ms\n" << std::flush;
    metrics.precision(17);

    const auto t0 = Clock::now();
    auto wall_ms = [&]() {
        return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
    };

    TrainResult result;
    std::size_t global_step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto batches =
            make_batches(data.train.sequences.size(), cfg.batch, cfg.seed + 1000 * (epoch + 1));
        double epoch_loss_sum = 0.0;
        for (const auto& batch : batches) {
            ModelGrads total = zero_grads(model);
            std::vector<ParamBlock> total_blocks = param_blocks(total);
            double batch_loss = 0.0;
            std::size_t batch_correct = 0;
            // Fixed ascending order keeps the reduction bit-reproducible.
            for (const std::size_t idx : batch) {
                const Matrix& seq = data.train.sequences[idx];
                const std::size_t label = data.train.labels[idx];
                const ForwardTrace trace = unroll_forward(model, seq);
                batch_loss += softmax_cross_entropy(trace.logits, label).loss;
                std::size_t best = 0;
                for (std::size_t k = 1; k < trace.probabilities.dim(); ++k)
                    if (trace.probabilities[k] > trace.probabilities[best]) best = k;
                if (best == label) ++batch_correct;
                ModelGrads g = bptt_backward(model, seq, trace, label);
                std::vector<ParamBlock> gb = param_blocks(g);
                for (std::size_t b = 0; b < gb.size(); ++b)
                    for (std::size_t j = 0; j < gb[b].size; ++j)
                        total_blocks[b].data[j] += gb[b].data[j];
            }
            const double inv = 1.0 / static_cast<double>(batch.size());
            for (const ParamBlock& b : total_blocks)
                for (std::size_t j = 0; j < b.size; ++j) b.data[j] *= inv;
            batch_loss *= inv;
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", step " +
                                         std::to_string(global_step));
            apply_update(model, total, ostate, ocfg);
            epoch_loss_sum += batch_loss;
            ++global_step;
            metrics << epoch << ',' << global_step << ",train," << batch_loss << ','
                    << (static_cast<double>(batch_correct) / static_cast<double>(batch.size()))
                    << ',' << wall_ms() << '\n'
                    << std::flush;
        }
        result.epoch_train_loss.push_back(epoch_loss_sum /
                                          static_cast<double>(batches.size()));

        const EvalResult ev = evaluate(model, data.test);
        metrics << epoch << ',' << global_step << ",test," << ev.mean_loss << ',' << ev.accuracy
                << ',' << wall_ms() << '\n'
                << std::flush;
        result.final_test_accuracy = ev.accuracy;
        if (log)
            *log << "epoch " << epoch << ": train_loss=" << result.epoch_train_loss.back()
                 << " test_accuracy=" << ev.accuracy << " (" << wall_ms() << " ms)\n";
    }

    Checkpoint ckpt;
    ckpt.model = std::move(model);
    ckpt.seed = cfg.seed;
    ckpt.config_echo = config_to_text(cfg);
    result.checkpoint_path =
        (std::filesystem::path(cfg.out_dir) / "checkpoint.lsta").string();
    save_checkpoint(ckpt, result.checkpoint_path);
    result.metrics_path = metrics_path;
    if (log) *log << "final_test_accuracy=" << result.final_test_accuracy << "\n";
    return result;
}

}  // namespace lsta
