#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "lsta/checkpoint.hpp"
#include "lsta/curves.hpp"
#include "lsta/trainer.hpp"

namespace {

void add_config_options(CLI::App* cmd, lsta::RunConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "flat key=value config file; flags override it");
    cmd->add_option("--model", cfg.model, "lstm | lsta | gru | bilstm");
    cmd->add_option("--hidden", cfg.hidden, "hidden units H");
    cmd->add_option("--classes", cfg.classes, "number of classes K");
    cmd->add_option("--dataset", cfg.dataset, "mnist | fashion | synth");
    cmd->add_option("--data-dir", cfg.data_dir, "directory holding the IDX files");
    cmd->add_option("--train-n", cfg.train_n, "train subset size (0 = all)");
    cmd->add_option("--test-n", cfg.test_n, "test subset size (0 = all)");
    cmd->add_option("--epochs", cfg.epochs);
    cmd->add_option("--batch", cfg.batch);
    cmd->add_option("--optimizer", cfg.optimizer, "adam | sgd");
    cmd->add_option("--lr", cfg.lr);
    cmd->add_option("--momentum", cfg.momentum);
    cmd->add_option("--clip-norm", cfg.clip_norm, "global-norm clip (<= 0 disables)");
    cmd->add_option("--seed", cfg.seed);
    cmd->add_flag("--warm-start-as-lstm", cfg.warm_start_as_lstm,
                  "zero-init the attention candidate path so LSTA starts as an exact LSTM");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--synth-timesteps", cfg.synth_timesteps);
    cmd->add_option("--synth-features", cfg.synth_features);
    cmd->add_option("--synth-signal-len", cfg.synth_signal_len);
    cmd->add_option("--synth-noise-sigma", cfg.synth_noise_sigma);
    cmd->add_option("--synth-train-n", cfg.synth_train_n);
    cmd->add_option("--synth-test-n", cfg.synth_test_n);
}

int run_gradcheck(bool inject_fault) {
    using namespace lsta;
    // Pinned small shapes.
    const std::size_t H = 4, D = 3, K = 3, T = 5;
    const double step = 1e-6, threshold = 1e-4;

    bool all_pass = true;
    int check_index = 0;
    for (const auto& [kind, direction, name] :
         {std::tuple{CellKind::lstm, Direction::forward, "lstm"},
          std::tuple{CellKind::lsta, Direction::forward, "lsta"},
          std::tuple{CellKind::gru, Direction::forward, "gru"},
          std::tuple{CellKind::lstm, Direction::bidirectional, "bilstm"}}) {
        Rng rng(42 + check_index);
        SequenceModel model = make_model(kind, direction, H, D, K, rng);
        Matrix seq(T, D);
        for (double& v : seq.values) v = rng.uniform(-1.0, 1.0);
        const std::size_t target = check_index % K;

        GradCheckReport report = grad_check(model, seq, target, step, threshold);
        if (inject_fault && check_index == 0) {
            // Test hook: pretend one block's analytic gradient was doubled.
            report.blocks.front().max_rel_err = 1.0;
            report.global_max = std::max(report.global_max, 1.0);
            report.pass = false;
        }
        std::printf("%s (%s): global max rel err %.3e -> %s\n", name, to_string(direction),
                    report.global_max, report.pass ? "PASS" : "FAIL");
        for (const GradCheckBlock& blk : report.blocks)
            std::printf("  %-12s %.3e\n", blk.name.c_str(), blk.max_rel_err);
        all_pass = all_pass && report.pass;
        ++check_index;
    }
    std::printf("gradcheck: %s (threshold %.1e)\n", all_pass ? "PASS" : "FAIL", threshold);
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequence classifier with an attention-gated LSTM cell"};
    app.require_subcommand(1);

    lsta::RunConfig train_cfg;
    std::string train_config_path;
    CLI::App* train_cmd = app.add_subcommand("train", "train a model and write metrics/checkpoint");
    add_config_options(train_cmd, train_cfg, train_config_path);

    std::string eval_ckpt;
    lsta::RunConfig eval_cfg;
    std::string eval_config_path;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    eval_cmd->add_option("checkpoint", eval_ckpt, "checkpoint file")->required();
    add_config_options(eval_cmd, eval_cfg, eval_config_path);

    bool inject_fault = false;
    CLI::App* gradcheck_cmd =
        app.add_subcommand("gradcheck", "finite-difference check of all cell kinds");
    gradcheck_cmd->add_flag("--inject-fault", inject_fault,
                            "test hook: corrupt one gradient so the check must fail");

    std::string curves_in, curves_out = "curves";
    CLI::App* curves_cmd =
        app.add_subcommand("curves", "export accuracy/loss-vs-step series from metrics.csv");
    curves_cmd->add_option("metrics", curves_in, "metrics.csv path")->required();
    curves_cmd->add_option("--out", curves_out, "output file prefix");

    // Config file first, then flags on top.
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*train_cmd) {
            // File values fill every field the user did not pass as a flag.
            lsta::RunConfig merged;
            if (!train_config_path.empty()) lsta::load_config_file(merged, train_config_path);
            auto passed = [&](const char* name) { return train_cmd->count(name) > 0; };
            if (passed("--model")) merged.model = train_cfg.model;
            if (passed("--hidden")) merged.hidden = train_cfg.hidden;
            if (passed("--classes")) merged.classes = train_cfg.classes;
            if (passed("--dataset")) merged.dataset = train_cfg.dataset;
            if (passed("--data-dir")) merged.data_dir = train_cfg.data_dir;
            if (passed("--train-n")) merged.train_n = train_cfg.train_n;
            if (passed("--test-n")) merged.test_n = train_cfg.test_n;
            if (passed("--epochs")) merged.epochs = train_cfg.epochs;
            if (passed("--batch")) merged.batch = train_cfg.batch;
            if (passed("--optimizer")) merged.optimizer = train_cfg.optimizer;
            if (passed("--lr")) merged.lr = train_cfg.lr;
            if (passed("--momentum")) merged.momentum = train_cfg.momentum;
            if (passed("--clip-norm")) merged.clip_norm = train_cfg.clip_norm;
            if (passed("--seed")) merged.seed = train_cfg.seed;
            if (passed("--warm-start-as-lstm"))
                merged.warm_start_as_lstm = train_cfg.warm_start_as_lstm;
            if (passed("--out")) merged.out_dir = train_cfg.out_dir;
            if (passed("--synth-timesteps")) merged.synth_timesteps = train_cfg.synth_timesteps;
            if (passed("--synth-features")) merged.synth_features = train_cfg.synth_features;
            if (passed("--synth-signal-len"))
                merged.synth_signal_len = train_cfg.synth_signal_len;
            if (passed("--synth-noise-sigma"))
                merged.synth_noise_sigma = train_cfg.synth_noise_sigma;
            if (passed("--synth-train-n")) merged.synth_train_n = train_cfg.synth_train_n;
            if (passed("--synth-test-n")) merged.synth_test_n = train_cfg.synth_test_n;

            lsta::train(merged, &std::cout);
            return 0;
        }
        if (*eval_cmd) {
            lsta::Checkpoint ckpt = lsta::load_checkpoint(eval_ckpt);
            if (!eval_config_path.empty()) lsta::load_config_file(eval_cfg, eval_config_path);
            eval_cfg.classes = ckpt.model.classes;
            const lsta::DatasetPair data = lsta::load_dataset(eval_cfg);
            const lsta::EvalResult r = lsta::evaluate(ckpt.model, data.test);
            std::printf("accuracy=%.6f (%zu/%zu)\nmean_loss=%.6f\n", r.accuracy, r.correct,
                        r.total, r.mean_loss);
            return 0;
        }
        if (*gradcheck_cmd) return run_gradcheck(inject_fault);
        if (*curves_cmd) {
            const auto rows = lsta::parse_metrics_csv(curves_in);
            for (const std::string& path : lsta::export_curves(rows, curves_out))
                std::printf("wrote %s\n", path.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
