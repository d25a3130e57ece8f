#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lsta/data.hpp"
#include "lsta/network.hpp"
#include "lsta/optim.hpp"

namespace lsta {

struct RunConfig {
    std::string model = "lstm";  // lstm | lsta | gru | bilstm
    std::size_t hidden = 64;
    std::size_t classes = 10;
    std::string dataset = "mnist";  // mnist | fashion | synth
    std::string data_dir = "data/mnist";
    std::size_t train_n = 0;  // 0 = all
    std::size_t test_n = 0;
    std::size_t epochs = 5;
    std::size_t batch = 64;
    std::string optimizer = "adam";  // adam | sgd
    double lr = 1e-3;
    double momentum = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double clip_norm = 5.0;
    std::uint64_t seed = 1;
    bool warm_start_as_lstm = false;
    std::string out_dir = "out";
    // synth task parameters
    std::size_t synth_timesteps = 50;
    std::size_t synth_features = 4;
    std::size_t synth_signal_len = 5;
    double synth_noise_sigma = 0.3;
    std::size_t synth_train_n = 4000;
    std::size_t synth_test_n = 1000;
};

// Flat key=value config text, one pair per line, '#' comments. Unknown keys are
// rejected with the key name.
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value);
void load_config_file(RunConfig& cfg, const std::string& path);
std::string config_to_text(const RunConfig& cfg);
void validate_config(const RunConfig& cfg);

CellKind cell_kind_of(const std::string& model_name);
Direction direction_of(const std::string& model_name);

struct EvalResult {
    double accuracy = 0.0;
    double mean_loss = 0.0;
    std::size_t correct = 0;
    std::size_t total = 0;
};

EvalResult evaluate(const SequenceModel& model, const LabeledSequences& data);

struct TrainResult {
    double final_test_accuracy = 0.0;
    std::vector<double> epoch_train_loss;  // mean over batches, one per epoch
    std::string metrics_path;
    std::string checkpoint_path;
};

struct DatasetPair {
    LabeledSequences train;
    LabeledSequences test;
};

// Loads the configured dataset, applying the seeded shuffle-then-prefix subset
// rule to file-backed datasets.
DatasetPair load_dataset(const RunConfig& cfg);

// Trains per config, writing metrics.csv and a final checkpoint under
// cfg.out_dir. log receives the per-epoch summary lines (pass nullptr to
// silence).
TrainResult train(const RunConfig& cfg, std::ostream* log);

}  // namespace lsta
