// Command-line front end: data generation, pretraining, inversion runs,
// method comparisons, pretraining sweeps and field rendering.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fwi/checkpoint.hpp"
#include "fwi/config.hpp"
#include "fwi/dataset.hpp"
#include "fwi/inversion.hpp"
#include "fwi/io_formats.hpp"
#include "fwi/observe.hpp"
#include "fwi/parallel.hpp"
#include "fwi/pretrain.hpp"

namespace fs = std::filesystem;
using namespace fwi;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string profile = "desk";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool deterministic = false;
    int threads = default_threads();
};

ExperimentConfig resolve_config(const GlobalOpts& g) {
    ExperimentConfig cfg = profile_config(g.profile);
    if (!g.config_path.empty()) cfg = load_config_file(g.config_path, cfg);
    if (g.seed_set) cfg.seed = g.seed;
    cfg.validate();
    return cfg;
}

/// --out wins; otherwise land under the configured output directory.
std::string resolve_out(const CLI::Option* opt, const std::string& value,
                        const ExperimentConfig& cfg, const char* leaf) {
    if (opt->count() > 0) return value;
    return (fs::path(cfg.out_dir) / leaf).string();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_text(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw ArtifactError("cannot write " + p.string());
    return os;
}

void write_metrics_csv(const fs::path& path, const InversionRun& run) {
    auto os = open_text(path);
    os << "iteration,cost_scaled,cost_raw,mse,wall_ms\n";
    for (const auto& m : run.metrics)
        os << m.iteration << "," << fmt(m.cost_scaled) << "," << fmt(m.cost_raw) << ","
           << fmt(m.mse) << "," << fmt(m.wall_ms) << "\n";
}

std::vector<int> snapshot_schedule(int iters) {
    std::vector<int> s = {0};
    for (int i : {1, 5, 10, 15, 20, 25, 30, 35})
        if (i <= iters) s.push_back(i);
    return s;
}

Scenario case_scenario(const std::string& name, const ExperimentConfig& cfg) {
    if (name.rfind("sample:", 0) == 0) {
        Rng rng(std::stoull(name.substr(7)));
        return sample_scenario(rng, cfg.lx, cfg.ly);
    }
    if (name.rfind("case", 0) == 0 && name.size() == 5)
        return study_case(name[4] - '0', cfg.lx, cfg.ly);
    throw ConfigError("unknown case '" + name + "' (case1..case4 or sample:<seed>)");
}

Problem make_problem(const Scenario& sc, const ExperimentConfig& cfg, int threads) {
    Problem p;
    p.acq = cfg.acquisition();
    p.physics = cfg.physics();
    p.truth = rasterize(sc, p.acq.grid).values;
    p.obs = generate_observation(sc, cfg.fine_grid(), p.acq, p.physics, threads);
    return p;
}

nn::UNet load_unet(const std::string& path, const ExperimentConfig& cfg) {
    if (!fs::exists(path)) throw ArtifactError("checkpoint not found: " + path);
    nn::UNet net = nn::UNet::paper_arch(cfg.nx, cfg.ny);
    nn::read_checkpoint(path, net);
    return net;
}

void corrupt_params(nn::Network& net, double stddev, std::uint64_t seed) {
    Rng rng(seed);
    auto params = net.flat_params();
    for (auto& p : params) p += stddev * rng.normal();
    net.set_flat_params(params);
}

InversionRun dispatch_run(Method m, const Problem& p, const ExperimentConfig& cfg,
                          InversionConfig run_cfg, const std::string& checkpoint,
                          double corrupt_std) {
    switch (m) {
        case Method::conventional: {
            MaterialField ones(p.acq.grid);
            return run_conventional(p, run_cfg, ones);
        }
        case Method::nn_based:
            return run_nn_based(p, run_cfg);
        case Method::transfer: {
            nn::UNet net = load_unet(checkpoint, cfg);
            if (corrupt_std > 0.0) corrupt_params(net, corrupt_std, Rng::mix(run_cfg.seed, 0xbad));
            return run_transfer(p, net, run_cfg);
        }
        case Method::conventional_with_init: {
            nn::UNet net = load_unet(checkpoint, cfg);
            if (corrupt_std > 0.0) corrupt_params(net, corrupt_std, Rng::mix(run_cfg.seed, 0xbad));
            return run_conventional_with_init(p, net, run_cfg);
        }
    }
    throw ConfigError("unhandled method");
}

int cmd_generate_data(const GlobalOpts& g, int n, const std::string& out) {
    const ExperimentConfig cfg = resolve_config(g);
    fs::create_directories(out);
    const DatasetBuildResult res =
        build_pretrain_dataset(n, cfg.seed, cfg.acquisition(), cfg.fine_grid(), cfg.physics(),
                               g.threads);
    write_fwid((fs::path(out) / "dataset.fwid").string(), res.dataset);
    auto manifest = open_text(fs::path(out) / "manifest.txt");
    for (const auto& line : res.manifest) manifest << line << "\n";
    std::cout << "wrote " << res.dataset.records.size() << " records ("
              << res.skipped << " skipped) to " << out << "\n";
    return res.dataset.records.empty() ? 3 : 0;
}

int cmd_pretrain(const GlobalOpts& g, const std::string& dataset_path, int epochs, int batch,
                 const std::string& out) {
    const ExperimentConfig cfg = resolve_config(g);
    if (!fs::exists(dataset_path)) throw ArtifactError("dataset not found: " + dataset_path);
    const Dataset ds = read_fwid(dataset_path);
    if (ds.nx != cfg.nx || ds.ny != cfg.ny)
        throw ConfigError("dataset grid does not match the configured grid");
    fs::create_directories(out);

    nn::UNet net = nn::UNet::paper_arch(cfg.nx, cfg.ny);
    TrainConfig tc = cfg.train_config();
    if (epochs >= 0) tc.epochs = epochs;
    if (batch > 0) tc.batch = batch;
    const TrainResult res = train_unet(net, ds, tc);

    auto log = open_text(fs::path(out) / "train_log.csv");
    log << "epoch,train_mse,val_mse,lr_factor\n";
    for (const auto& e : res.log)
        log << e.epoch << "," << fmt(e.train_mse) << "," << fmt(e.val_mse) << ","
            << fmt(e.lr_factor) << "\n";
    nn::write_checkpoint((fs::path(out) / "unet.fwic").string(), net,
                         {tc.seed, static_cast<std::uint32_t>(tc.epochs)});
    std::cout << "trained " << tc.epochs << " epochs; checkpoint at " << out << "/unet.fwic\n";
    return 0;
}

int cmd_invert(const GlobalOpts& g, const std::string& method, const std::string& case_name,
               int iters, const std::string& checkpoint, double corrupt_std,
               const std::string& out) {
    const ExperimentConfig cfg = resolve_config(g);
    const Method m = method_from_name(method);
    const Scenario sc = case_scenario(case_name, cfg);
    const Problem p = make_problem(sc, cfg, g.threads);
    fs::create_directories(out);

    InversionConfig run_cfg = cfg.inversion_config(m);
    run_cfg.iters = iters;
    run_cfg.deterministic = g.deterministic;
    run_cfg.threads = g.threads;
    run_cfg.snapshot_iters = snapshot_schedule(iters);
    const InversionRun run = dispatch_run(m, p, cfg, run_cfg, checkpoint, corrupt_std);

    write_metrics_csv(fs::path(out) / "metrics.csv", run);
    write_fwit((fs::path(out) / "obs.fwit").string(), p.obs);
    write_fwif((fs::path(out) / "truth.fwif").string(), *p.truth);
    write_fwif((fs::path(out) / "final.fwif").string(), run.final_field.values);
    write_pgm((fs::path(out) / "final.pgm").string(), run.final_field.values);
    for (const auto& [it, field] : run.snapshots) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%03d", it);
        write_fwif((fs::path(out) / (std::string(name) + ".fwif")).string(), field);
        write_pgm((fs::path(out) / (std::string(name) + ".pgm")).string(), field);
    }
    std::cout << method << " " << case_name << ": cost " << fmt(run.metrics.front().cost_scaled)
              << " -> " << fmt(run.metrics.back().cost_scaled) << ", mse "
              << fmt(run.metrics.front().mse) << " -> " << fmt(run.metrics.back().mse) << "\n";
    return 0;
}

int cmd_compare(const GlobalOpts& g, int cases, int iters, const std::string& checkpoint,
                const std::vector<std::string>& methods, const std::string& out) {
    const ExperimentConfig cfg = resolve_config(g);
    std::vector<Method> ms;
    for (const auto& s : methods) ms.push_back(method_from_name(s));
    const bool needs_ckpt =
        std::any_of(ms.begin(), ms.end(), [](Method m) {
            return m == Method::transfer || m == Method::conventional_with_init;
        });
    if (needs_ckpt && !fs::exists(checkpoint))
        throw ArtifactError("checkpoint not found: " + checkpoint);
    fs::create_directories(out);

    struct CaseResult {
        std::string status = "ok";
        std::vector<InversionRun> runs;  // per method
    };
    std::vector<CaseResult> results(cases);

    for (int k = 0; k < cases; ++k) {
        Rng rng(Rng::mix(cfg.seed, 9000 + k));
        const Scenario sc = sample_scenario(rng, cfg.lx, cfg.ly);
        try {
            const Problem p = make_problem(sc, cfg, g.threads);
            for (Method m : ms) {
                InversionConfig run_cfg = cfg.inversion_config(m);
                run_cfg.iters = iters;
                run_cfg.deterministic = g.deterministic;
                run_cfg.threads = g.threads;
                run_cfg.seed = Rng::mix(cfg.seed, 100 + k);
                results[k].runs.push_back(dispatch_run(m, p, cfg, run_cfg, checkpoint, 0.0));
            }
        } catch (const SolverError& e) {
            results[k].status = std::string("solver: ") + e.what();
            results[k].runs.clear();
        }
        std::cout << "case " << k << ": " << results[k].status << "\n";
    }

    auto finals = open_text(fs::path(out) / "finals.csv");
    finals << "case,method,status,final_cost_scaled,final_mse\n";
    for (int k = 0; k < cases; ++k)
        for (std::size_t mi = 0; mi < ms.size(); ++mi) {
            finals << k << "," << method_name(ms[mi]) << "," << results[k].status;
            if (results[k].status == "ok") {
                const auto& last = results[k].runs[mi].metrics.back();
                finals << "," << fmt(last.cost_scaled) << "," << fmt(last.mse);
            } else {
                finals << ",,";
            }
            finals << "\n";
        }

    auto agg = open_text(fs::path(out) / "aggregate.csv");
    agg << "method,iteration,mean_log10_cost_scaled,mean_log10_mse\n";
    const auto log10s = [](double v) { return std::log10(std::max(v, 1e-300)); };
    for (std::size_t mi = 0; mi < ms.size(); ++mi)
        for (int it = 0; it < iters; ++it) {
            double lc = 0.0, lm = 0.0;
            int n_ok = 0;
            for (int k = 0; k < cases; ++k) {
                if (results[k].status != "ok") continue;
                const auto& row = results[k].runs[mi].metrics[it];
                lc += log10s(row.cost_scaled);
                lm += log10s(row.mse);
                ++n_ok;
            }
            if (n_ok == 0) continue;
            agg << method_name(ms[mi]) << "," << (it + 1) << "," << fmt(lc / n_ok) << ","
                << fmt(lm / n_ok) << "\n";
        }
    const bool all_failed = std::all_of(results.begin(), results.end(),
                                        [](const CaseResult& r) { return r.status != "ok"; });
    return all_failed ? 3 : 0;
}

int cmd_sweep(const GlobalOpts& g, const std::string& axis, const std::vector<int>& values,
              const std::string& dataset_path, int test_cases, int iters, int epochs,
              const std::string& out) {
    const ExperimentConfig cfg = resolve_config(g);
    if (!fs::exists(dataset_path)) throw ArtifactError("dataset not found: " + dataset_path);
    const Dataset full = read_fwid(dataset_path);
    if (axis != "epochs" && axis != "samples")
        throw ConfigError("sweep axis must be 'epochs' or 'samples'");
    fs::create_directories(out);

    // fixed held-out evaluation set
    std::vector<Problem> tests;
    for (int k = 0; k < test_cases; ++k) {
        Rng rng(Rng::mix(cfg.seed, 7000 + k));
        tests.push_back(make_problem(sample_scenario(rng, cfg.lx, cfg.ly), cfg, g.threads));
    }

    auto csv = open_text(fs::path(out) / "sweep.csv");
    csv << "axis,value,iteration,mean_mse\n";
    for (int value : values) {
        Dataset ds = full;
        TrainConfig tc = cfg.train_config();
        tc.epochs = epochs;
        if (axis == "epochs") {
            tc.epochs = value;
        } else {
            if (value > static_cast<int>(full.records.size()))
                throw ConfigError("sweep: sample count exceeds dataset size");
            ds.records.assign(full.records.begin(), full.records.begin() + value);
            tc.batch = std::max(1, value / 10);
        }
        nn::UNet net = nn::UNet::paper_arch(cfg.nx, cfg.ny);
        train_unet(net, ds, tc);

        std::vector<double> mse_sum(iters, 0.0);
        for (auto& p : tests) {
            InversionConfig run_cfg = cfg.inversion_config(Method::transfer);
            run_cfg.iters = iters;
            run_cfg.deterministic = g.deterministic;
            run_cfg.threads = g.threads;
            const InversionRun run = run_transfer(p, net, run_cfg);
            for (int it = 0; it < iters; ++it) mse_sum[it] += run.metrics[it].mse;
        }
        for (int it = 0; it < iters; ++it)
            csv << axis << "," << value << "," << (it + 1) << ","
                << fmt(mse_sum[it] / test_cases) << "\n";
        std::cout << axis << "=" << value << " done\n";
    }
    return 0;
}

int cmd_render(const std::string& in, const std::string& out, bool ascii) {
    Field2D f;
    try {
        f = read_fwif(in);
    } catch (const ArtifactError& e) {
        throw ConfigError(e.what());  // malformed input counts as a usage error
    }
    if (ascii) {
        std::cout << render_ascii(f);
    } else {
        write_pgm(out, f);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ultrasonic full-waveform-inversion laboratory"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "key=value config file overriding the profile");
    app.add_option("--profile", g.profile, "parameter profile: desk|paper")->capture_default_str();
    app.add_option("--seed", g.seed, "master seed")->each([&](const std::string&) {
        g.seed_set = true;
    });
    app.add_flag("--deterministic", g.deterministic, "byte-stable outputs (zeroed wall times)");
    app.add_option("--threads", g.threads, "worker threads")->capture_default_str();

    auto* gen = app.add_subcommand("generate-data", "build a pretraining dataset");
    int gen_n = 10;
    std::string gen_out = "out/data";
    gen->add_option("--n", gen_n, "number of samples")->capture_default_str();
    gen->add_option("--out", gen_out, "output directory")->capture_default_str();

    auto* pre = app.add_subcommand("pretrain", "train the gradient-to-material network");
    std::string pre_dataset, pre_out = "out/pretrain";
    int pre_epochs = -1, pre_batch = 0;
    pre->add_option("--dataset", pre_dataset, "dataset file")->required();
    pre->add_option("--epochs", pre_epochs, "training epochs (default from config)");
    pre->add_option("--batch", pre_batch, "batch size (default: samples/10)");
    pre->add_option("--out", pre_out, "output directory")->capture_default_str();

    auto* inv = app.add_subcommand("invert", "run one inversion");
    std::string inv_method = "conventional", inv_case = "case1", inv_ckpt, inv_out = "out/invert";
    int inv_iters = 35;
    double inv_corrupt = 0.0;
    inv->add_option("--method", inv_method, "conventional|nn|conv_init|transfer")
        ->capture_default_str();
    inv->add_option("--case", inv_case, "case1..case4 or sample:<seed>")->capture_default_str();
    inv->add_option("--iters", inv_iters, "iteration budget")->capture_default_str();
    inv->add_option("--checkpoint", inv_ckpt, "U-Net checkpoint (transfer/conv_init)");
    inv->add_option("--corrupt-init", inv_corrupt,
                    "perturb checkpoint weights with this noise std before inverting");
    inv->add_option("--out", inv_out, "output directory")->capture_default_str();

    auto* cmp = app.add_subcommand("compare", "run all methods over sampled cases");
    int cmp_cases = 10, cmp_iters = 35;
    std::string cmp_ckpt, cmp_out = "out/compare";
    std::vector<std::string> cmp_methods = {"conventional", "nn", "conv_init", "transfer"};
    cmp->add_option("--cases", cmp_cases, "number of sampled cases")->capture_default_str();
    cmp->add_option("--iters", cmp_iters, "iterations per run")->capture_default_str();
    cmp->add_option("--checkpoint", cmp_ckpt, "U-Net checkpoint");
    cmp->add_option("--methods", cmp_methods, "subset of methods")->delimiter(',');
    cmp->add_option("--out", cmp_out, "output directory")->capture_default_str();

    auto* swp = app.add_subcommand("sweep", "pretraining sweeps over epochs or samples");
    std::string swp_axis = "epochs", swp_dataset, swp_out = "out/sweep";
    std::vector<int> swp_values;
    int swp_tests = 5, swp_iters = 35, swp_epochs = 100;
    swp->add_option("--axis", swp_axis, "epochs|samples")->capture_default_str();
    swp->add_option("--values", swp_values, "axis values")->delimiter(',')->required();
    swp->add_option("--dataset", swp_dataset, "dataset file")->required();
    swp->add_option("--test-cases", swp_tests, "held-out evaluation cases")->capture_default_str();
    swp->add_option("--iters", swp_iters, "transfer iterations per evaluation")
        ->capture_default_str();
    swp->add_option("--epochs", swp_epochs, "epochs when sweeping samples")->capture_default_str();
    swp->add_option("--out", swp_out, "output directory")->capture_default_str();

    auto* ren = app.add_subcommand("render", "render a field container to PGM or ASCII");
    std::string ren_in, ren_out = "out.pgm";
    bool ren_ascii = false;
    ren->add_option("--in", ren_in, "field file")->required();
    ren->add_option("--out", ren_out, "output image")->capture_default_str();
    ren->add_flag("--ascii", ren_ascii, "print an ASCII render instead");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate_data(g, gen_n, gen_out);
        if (pre->parsed()) return cmd_pretrain(g, pre_dataset, pre_epochs, pre_batch, pre_out);
        if (inv->parsed())
            return cmd_invert(g, inv_method, inv_case, inv_iters, inv_ckpt, inv_corrupt, inv_out);
        if (cmp->parsed())
            return cmd_compare(g, cmp_cases, cmp_iters, cmp_ckpt, cmp_methods, cmp_out);
        if (swp->parsed())
            return cmd_sweep(g, swp_axis, swp_values, swp_dataset, swp_tests, swp_iters,
                             swp_epochs, swp_out);
        if (ren->parsed()) return cmd_render(ren_in, ren_out, ren_ascii);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ArtifactError& e) {
        std::cerr << "artifact error: " << e.what() << "\n";
        return 4;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
