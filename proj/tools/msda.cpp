#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msda/data/io.hpp"
#include "msda/data/synthetic.hpp"
#include "msda/error.hpp"
#include "msda/eval/experiment.hpp"
#include "msda/eval/pad.hpp"
#include "msda/eval/wilcoxon.hpp"
#include "msda/mdan/checkpoint.hpp"
#include "msda/mdan/train.hpp"
#include "msda/rng.hpp"
#include "msda/theory/divergence.hpp"

namespace fs = std::filesystem;
using namespace msda;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Matrix load_points(const std::string& path, bool labeled) {
    const data::LoadedDomain d = data::load_dense_csv(path, labeled);
    return d.x;
}

Matrix subsample(const Matrix& x, std::size_t cap, std::uint64_t seed, std::uint64_t slot) {
    if (x.rows() <= cap) {
        return x;
    }
    std::vector<std::size_t> idx(x.rows());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(Rng::derive(seed, slot));
    rng.shuffle(idx);
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    return take_rows(x, idx);
}

struct TrainOverrides {
    std::optional<std::string> mode;
    std::optional<double> gamma, mu, lr, dropout;
    std::optional<int> batch, epochs;
    std::optional<std::uint64_t> seed;

    void apply(mdan::TrainConfig& tc) const {
        if (mode) tc.mode = mdan::mode_from_string(*mode);
        if (gamma) tc.gamma = *gamma;
        if (mu) tc.mu = *mu;
        if (lr) tc.learning_rate = *lr;
        if (dropout) tc.dropout = *dropout;
        if (batch) tc.batch_size = *batch;
        if (epochs) tc.epochs = *epochs;
        if (seed) tc.seed = *seed;
    }
};

void add_train_flags(CLI::App* cmd, TrainOverrides& o) {
    cmd->add_option("--mode", o.mode, "Training mode: hard or soft");
    cmd->add_option("--gamma", o.gamma, "Soft-max sharpness (> 0)");
    cmd->add_option("--mu", o.mu, "Domain-adversary weight (>= 0)");
    cmd->add_option("--lr", o.lr, "Learning rate");
    cmd->add_option("--dropout", o.dropout, "Dropout rate in [0, 1)");
    cmd->add_option("--batch", o.batch, "Rows per domain per step");
    cmd->add_option("--epochs", o.epochs, "Training epochs");
    cmd->add_option("--seed", o.seed, "Run seed");
}

int cmd_generate(const std::string& family, int k, std::size_t n, double noise,
                 std::uint64_t seed, const std::vector<double>& angles_deg,
                 const std::string& shifts_text, const std::string& out_dir) {
    data::SyntheticSpec spec;
    spec.k = k;
    spec.n_per_domain = n;
    spec.noise = noise;
    spec.seed = seed;
    if (family == "rotated_moons") {
        spec.family = data::SyntheticFamily::RotatedMoons;
        spec.angles.clear();
        for (double deg : angles_deg) {
            spec.angles.push_back(deg * std::numbers::pi / 180.0);
        }
    } else if (family == "gaussian_shift") {
        spec.family = data::SyntheticFamily::GaussianShift;
        spec.shifts.clear();
        std::istringstream groups(shifts_text);
        std::string group;
        while (std::getline(groups, group, ';')) {
            std::istringstream vals(group);
            std::vector<double> shift;
            double v = 0.0;
            while (vals >> v) {
                shift.push_back(v);
            }
            if (!shift.empty()) {
                spec.shifts.push_back(shift);
            }
        }
    } else {
        throw InputError("unknown family '" + family + "'");
    }

    const data::SyntheticData d = data::generate(spec);
    fs::create_directories(out_dir);

    data::DomainManifest manifest;
    manifest.dim = d.target.dim();
    for (std::size_t i = 0; i < d.sources.size(); ++i) {
        const std::string name = "source" + std::to_string(i) + ".csv";
        data::save_dense_csv((fs::path(out_dir) / name).string(), d.sources[i].x,
                             &d.sources[i].y);
        manifest.entries.push_back({name, data::DomainRole::Source,
                                    data::FileFormat::DenseCsv, true});
    }
    data::save_dense_csv((fs::path(out_dir) / "target.csv").string(), d.target.x(),
                         d.target.oracle_labels());
    manifest.entries.push_back({"target.csv", data::DomainRole::Target,
                                data::FileFormat::DenseCsv,
                                d.target.has_oracle_labels()});
    data::save_manifest((fs::path(out_dir) / "dataset.manifest").string(), manifest);
    std::cout << "wrote " << d.sources.size() << " sources + target under " << out_dir
              << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const TrainOverrides& overrides,
              const std::string& out_dir) {
    eval::ExperimentConfig config =
        eval::ExperimentConfig::from_ini(eval::IniFile::parse_file(config_path));
    overrides.apply(config.train);
    config.train.validate();

    data::ManifestData md;
    if (config.use_manifest) {
        md = data::load_manifest_domains(config.manifest_path);
    } else {
        data::SyntheticData s = data::generate(config.synthetic);
        md.sources = std::move(s.sources);
        md.target = std::move(s.target);
    }

    mdan::ModelSpec ms;
    ms.input_dim = md.target.dim();
    ms.extractor_hidden = config.hidden;
    ms.head_hidden = config.head_hidden;
    ms.disc_hidden = config.disc_hidden;
    ms.num_classes = config.num_classes;
    ms.k = static_cast<int>(md.sources.size());
    Rng rng(Rng::derive(config.train.seed, 2));
    mdan::MdanModel model = mdan::make_mdan(ms, rng);

    const mdan::TrainResult history = mdan::train(model, md.sources, md.target, config.train);

    fs::create_directories(out_dir);
    std::ofstream trace(fs::path(out_dir) / "trace.log");
    for (const mdan::StepTrace& t : history.history) {
        trace << mdan::format_step_trace(t, config.train.mode) << "\n";
    }
    mdan::save_model_file((fs::path(out_dir) / "model.ckpt").string(), model);

    std::ofstream metrics(fs::path(out_dir) / "metrics.txt");
    metrics << "metric = " << (config.metric == mdan::Metric::Accuracy ? "accuracy" : "mae")
            << "\n";
    for (std::size_t i = 0; i < md.sources.size(); ++i) {
        metrics << "source_" << i << " = "
                << fmt(mdan::evaluate(model, md.sources[i], config.metric)) << "\n";
    }
    if (md.target.has_oracle_labels()) {
        metrics << "target = "
                << fmt(mdan::evaluate(model, md.target.as_labeled_oracle(), config.metric))
                << "\n";
    }
    std::cout << "model, trace, and metrics written under " << out_dir << "\n";
    return 0;
}

int cmd_divergence(const std::string& a_path, const std::string& b_path, bool labeled,
                   bool symdiff, std::size_t max_points, std::uint64_t seed) {
    const Matrix a = subsample(load_points(a_path, labeled), max_points, seed, 0);
    const Matrix b = subsample(load_points(b_path, labeled), max_points, seed, 1);
    const theory::FiniteHypothesisClass cls = theory::enumerate_stumps(vstack(a, b));
    const double value = symdiff ? theory::h_divergence(theory::SymDiffClass(cls), a, b)
                                 : theory::h_divergence(cls, a, b);
    std::cout << fmt(value) << "\n";
    return 0;
}

int cmd_bound(const std::string& config_path, std::optional<double> delta,
              const std::string& out_dir) {
    eval::ExperimentConfig config =
        eval::ExperimentConfig::from_ini(eval::IniFile::parse_file(config_path));
    if (delta) {
        config.delta = *delta;
    }
    const theory::BoundReport report = eval::bound_report_for(config);
    const std::string text = theory::format_bound_report(report);
    std::cout << text;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream out(fs::path(out_dir) / "bound.txt");
        out << text;
    }
    return 0;
}

int cmd_pad(const std::string& a_path, const std::string& b_path, bool labeled,
            std::uint64_t seed) {
    eval::PadConfig pc;
    pc.seed = seed;
    std::cout << fmt(eval::pad(load_points(a_path, labeled), load_points(b_path, labeled), pc))
              << "\n";
    return 0;
}

int cmd_wilcoxon(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) {
        throw InputError("cannot open '" + csv_path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(csv_path + ":1: empty file");
    }
    std::vector<double> a, b;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError(csv_path + ":" + std::to_string(lineno) +
                             ": expected two comma-separated values");
        }
        try {
            a.push_back(std::stod(line.substr(0, comma)));
            b.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ParseError(csv_path + ":" + std::to_string(lineno) + ": bad number");
        }
    }
    const eval::WilcoxonResult w = eval::wilcoxon_signed_rank(a, b);
    std::cout << "statistic = " << fmt(w.statistic) << "\n";
    std::cout << "p = " << fmt(w.p_two_sided) << "\n";
    return 0;
}

int cmd_experiment(const std::string& config_path, const TrainOverrides& overrides,
                   std::optional<std::uint64_t> seed_override, const std::string& out_dir) {
    eval::ExperimentConfig config =
        eval::ExperimentConfig::from_ini(eval::IniFile::parse_file(config_path));
    overrides.apply(config.train);
    if (seed_override) {
        config.seeds = {*seed_override};
    }
    config.validate();
    const eval::ExperimentResult result = eval::run_experiment(config, out_dir);
    for (const eval::MethodOutcome& o : result.outcomes) {
        std::cout << eval::to_string(o.method) << " median = " << fmt(o.median) << "\n";
    }
    std::cout << result.files.size() << " files under " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multisource domain adaptation laboratory"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic multi-domain dataset");
    std::string gen_family = "rotated_moons";
    int gen_k = 3;
    std::size_t gen_n = 200;
    double gen_noise = 0.1;
    std::uint64_t gen_seed = 0;
    std::vector<double> gen_angles = {0.0, 15.0, 30.0, 40.0};
    std::string gen_shifts = "0 0; 1 0";
    std::string gen_out;
    gen->add_option("--family", gen_family, "rotated_moons or gaussian_shift");
    gen->add_option("--k", gen_k, "Number of source domains");
    gen->add_option("--n", gen_n, "Points per domain");
    gen->add_option("--noise", gen_noise, "Noise sigma");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--angles-deg", gen_angles, "Domain rotations, k sources then target");
    gen->add_option("--shifts", gen_shifts, "Mean shifts 'x y; x y; ...', sources then target");
    gen->add_option("--out", gen_out, "Output directory")->required();

    // train
    auto* tr = app.add_subcommand("train", "Train one adversarial model");
    std::string tr_config, tr_out;
    TrainOverrides tr_over;
    tr->add_option("--config", tr_config, "Config file")->required();
    add_train_flags(tr, tr_over);
    tr->add_option("--out", tr_out, "Output directory")->required();

    // divergence
    auto* dv = app.add_subcommand("divergence", "Stump-class divergence between two samples");
    std::string dv_a, dv_b;
    bool dv_labeled = false, dv_symdiff = false;
    std::size_t dv_cap = 512;
    std::uint64_t dv_seed = 0;
    dv->add_option("a", dv_a, "First sample (dense csv)")->required();
    dv->add_option("b", dv_b, "Second sample (dense csv)")->required();
    dv->add_flag("--labeled", dv_labeled, "Files carry a trailing label column");
    dv->add_flag("--symdiff", dv_symdiff, "Scan XOR pairs instead of the base class");
    dv->add_option("--max-points", dv_cap, "Per-sample row cap before scanning");
    dv->add_option("--seed", dv_seed, "Subsample seed");

    // bound
    auto* bd = app.add_subcommand("bound", "Finite-sample target-risk bound report");
    std::string bd_config, bd_out;
    std::optional<double> bd_delta;
    bd->add_option("--config", bd_config, "Config file")->required();
    bd->add_option("--delta", bd_delta, "Confidence parameter in (0, 1)");
    bd->add_option("--out", bd_out, "Directory for bound.txt (optional)");

    // pad
    auto* pd = app.add_subcommand("pad", "Proxy A-distance between two samples");
    std::string pd_a, pd_b;
    bool pd_labeled = false;
    std::uint64_t pd_seed = 0;
    pd->add_option("a", pd_a, "First sample (dense csv)")->required();
    pd->add_option("b", pd_b, "Second sample (dense csv)")->required();
    pd->add_flag("--labeled", pd_labeled, "Files carry a trailing label column");
    pd->add_option("--seed", pd_seed, "Probe seed");

    // wilcoxon
    auto* wx = app.add_subcommand("wilcoxon", "Paired signed-rank test on a two-column csv");
    std::string wx_csv;
    wx->add_option("csv", wx_csv, "CSV with header and rows 'a,b'")->required();

    // experiment
    auto* ex = app.add_subcommand("experiment", "Run the full method-comparison pipeline");
    std::string ex_config, ex_out;
    TrainOverrides ex_over;
    std::optional<std::uint64_t> ex_seed;
    ex->add_option("--config", ex_config, "Config file")->required();
    ex->add_option("--mode", ex_over.mode, "Training mode override");
    ex->add_option("--gamma", ex_over.gamma, "Gamma override");
    ex->add_option("--mu", ex_over.mu, "Domain weight override");
    ex->add_option("--batch", ex_over.batch, "Batch size override");
    ex->add_option("--epochs", ex_over.epochs, "Epochs override");
    ex->add_option("--seed", ex_seed, "Replace the seed list with one seed");
    ex->add_option("--out", ex_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << app.get_name() << ": " << e.what() << "\n";
        return 2;
    }

    try {
        if (gen->parsed()) {
            return cmd_generate(gen_family, gen_k, gen_n, gen_noise, gen_seed, gen_angles,
                                gen_shifts, gen_out);
        }
        if (tr->parsed()) {
            return cmd_train(tr_config, tr_over, tr_out);
        }
        if (dv->parsed()) {
            return cmd_divergence(dv_a, dv_b, dv_labeled, dv_symdiff, dv_cap, dv_seed);
        }
        if (bd->parsed()) {
            return cmd_bound(bd_config, bd_delta, bd_out);
        }
        if (pd->parsed()) {
            return cmd_pad(pd_a, pd_b, pd_labeled, pd_seed);
        }
        if (wx->parsed()) {
            return cmd_wilcoxon(wx_csv);
        }
        if (ex->parsed()) {
            return cmd_experiment(ex_config, ex_over, ex_seed, ex_out);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
