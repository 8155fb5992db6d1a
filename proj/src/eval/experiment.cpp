#include "msda/eval/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>

#include "msda/data/sampler.hpp"
#include "msda/error.hpp"
#include "msda/eval/pad.hpp"
#include "msda/eval/wilcoxon.hpp"
#include "msda/theory/bound.hpp"
#include "msda/theory/divergence.hpp"

namespace msda::eval {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string metric_name(mdan::Metric m) {
    return m == mdan::Metric::Accuracy ? "accuracy" : "mae";
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct RunData {
    std::vector<data::LabeledDomain> sources;
    data::UnlabeledDomain target;
    bool target_labeled_available = false;
    data::LabeledDomain target_labeled; // valid only when available
};

RunData load_data(const ExperimentConfig& config) {
    RunData d;
    if (config.use_manifest) {
        data::ManifestData m = data::load_manifest_domains(config.manifest_path);
        d.sources = std::move(m.sources);
        d.target = std::move(m.target);
    } else {
        data::SyntheticData s = data::generate(config.synthetic);
        d.sources = std::move(s.sources);
        d.target = std::move(s.target);
    }
    if (d.target.has_oracle_labels()) {
        d.target_labeled_available = true;
        d.target_labeled = d.target.as_labeled_oracle();
    }
    return d;
}

data::LabeledDomain pool_sources(const std::vector<data::LabeledDomain>& sources) {
    data::LabeledDomain merged;
    merged.id = 0;
    std::size_t rows = 0;
    for (const auto& s : sources) {
        rows += s.size();
    }
    merged.x = Matrix(rows, sources.front().dim());
    merged.y.reserve(rows);
    std::size_t r = 0;
    for (const auto& s : sources) {
        for (std::size_t i = 0; i < s.size(); ++i, ++r) {
            for (std::size_t c = 0; c < s.dim(); ++c) {
                merged.x(r, c) = s.x(i, c);
            }
            merged.y.push_back(s.y[i]);
        }
    }
    return merged;
}

mdan::ModelSpec model_spec(const ExperimentConfig& config, std::size_t dim, int k) {
    mdan::ModelSpec ms;
    ms.input_dim = dim;
    ms.extractor_hidden = config.hidden;
    ms.head_hidden = config.head_hidden;
    ms.disc_hidden = config.disc_hidden;
    ms.num_classes = config.num_classes;
    ms.k = k;
    return ms;
}

struct CellResult {
    double value = 0.0;
    std::vector<mdan::StepTrace> history;
    mdan::Mode trace_mode = mdan::Mode::Soft;
};

// Plain supervised training on one labeled set; no adversarial machinery.
CellResult supervised_cell(const ExperimentConfig& config, const data::LabeledDomain& source,
                           const RunData& data, std::uint64_t cell_seed) {
    Rng rng(Rng::derive(cell_seed, 2));
    mdan::MdanModel model = mdan::make_mdan(model_spec(config, source.dim(), 1), rng);

    const auto m = static_cast<std::size_t>(config.train.batch_size);
    const std::size_t steps_per_epoch = (source.size() + m - 1) / m;
    const std::vector<data::LabeledDomain> single{source};
    data::MinibatchIterator batches(single, data.target, m, Rng::derive(cell_seed, 3));

    nn::AdamConfig opt;
    opt.learning_rate = config.train.learning_rate;
    nn::AdamState ext_state = nn::AdamState::init(model.extractor, opt);
    nn::AdamState head_state = nn::AdamState::init(model.task_head, opt);

    CellResult cell;
    int step = 0;
    for (int e = 0; e < config.train.epochs; ++e) {
        for (std::size_t s = 0; s < steps_per_epoch; ++s, ++step) {
            const data::BatchTuple tuple = batches.next();
            const std::uint64_t drop_seed =
                Rng::derive(cell_seed, 0xd70ULL + static_cast<std::uint64_t>(step));
            const nn::ForwardCache ext =
                nn::forward(model.extractor, tuple.sources[0].features, config.train.dropout,
                            Rng::derive(drop_seed, 1));
            const nn::ForwardCache head =
                nn::forward(model.task_head, ext.output(), config.train.dropout,
                            Rng::derive(drop_seed, 2));
            const nn::LossResult l =
                nn::loss(head.output(), *tuple.sources[0].labels, nn::LossKind::SoftmaxXent);
            Matrix feat_grad;
            const nn::Gradients head_g =
                nn::backward(model.task_head, head, l.grad, &feat_grad);
            const nn::Gradients ext_g = nn::backward(model.extractor, ext, feat_grad);
            nn::opt_step(model.task_head, head_g, head_state);
            nn::opt_step(model.extractor, ext_g, ext_state);

            mdan::StepTrace trace;
            trace.step = step;
            trace.task_losses = {l.value};
            trace.domain_losses = {0.0};
            trace.scores = {l.value};
            trace.weights = {1.0};
            trace.chosen = 0;
            trace.objective = l.value;
            cell.history.push_back(trace);
        }
    }
    cell.value = mdan::evaluate(model, data.target_labeled, config.metric);
    return cell;
}

CellResult adversarial_cell(const ExperimentConfig& config,
                            const std::vector<data::LabeledDomain>& sources,
                            const RunData& data, mdan::Mode mode, std::uint64_t cell_seed) {
    Rng rng(Rng::derive(cell_seed, 2));
    mdan::MdanModel model = mdan::make_mdan(
        model_spec(config, sources.front().dim(), static_cast<int>(sources.size())), rng);
    mdan::TrainConfig tc = config.train;
    tc.mode = mode;
    tc.seed = Rng::derive(cell_seed, 3);
    CellResult cell;
    cell.trace_mode = mode;
    cell.history = mdan::train(model, sources, data.target, tc).history;
    cell.value = mdan::evaluate(model, data.target_labeled, config.metric);
    return cell;
}

bool better(double a, double b, mdan::Metric metric) {
    return metric == mdan::Metric::Accuracy ? a > b : a < b;
}

CellResult run_cell(const ExperimentConfig& config, const RunData& data, Method method,
                    std::uint64_t run_seed) {
    auto sub_seed = [&](std::size_t subrun) {
        return Rng::derive(run_seed, 0x100ULL + subrun);
    };
    switch (method) {
        case Method::SourceOnlyCombined:
            return supervised_cell(config, pool_sources(data.sources), data, sub_seed(0));
        case Method::BestSingleSource: {
            CellResult best;
            for (std::size_t i = 0; i < data.sources.size(); ++i) {
                CellResult c = supervised_cell(config, data.sources[i], data, sub_seed(i));
                if (i == 0 || better(c.value, best.value, config.metric)) {
                    best = std::move(c);
                }
            }
            return best;
        }
        case Method::DannSingleBest: {
            CellResult best;
            for (std::size_t i = 0; i < data.sources.size(); ++i) {
                CellResult c = adversarial_cell(config, {data.sources[i]}, data,
                                                mdan::Mode::Soft, sub_seed(i));
                if (i == 0 || better(c.value, best.value, config.metric)) {
                    best = std::move(c);
                }
            }
            return best;
        }
        case Method::DannCombined:
            return adversarial_cell(config, {pool_sources(data.sources)}, data,
                                    mdan::Mode::Soft, sub_seed(0));
        case Method::MdanHard:
            return adversarial_cell(config, data.sources, data, mdan::Mode::Hard, sub_seed(0));
        case Method::MdanSoft:
            return adversarial_cell(config, data.sources, data, mdan::Mode::Soft, sub_seed(0));
    }
    throw InputError("unknown method");
}

theory::BoundReport compute_bound_report(const ExperimentConfig& config, const RunData& data) {
    // Cap every domain at bound_points rows so the XOR-pair scan stays
    // affordable; the report echoes the capped m.
    const std::uint64_t seed = Rng::derive(config.seeds.front(), 0xb0d);
    auto cap = [&](const Matrix& x, std::uint64_t slot) {
        std::vector<std::size_t> idx(x.rows());
        std::iota(idx.begin(), idx.end(), 0);
        if (x.rows() > config.bound_points) {
            Rng rng(Rng::derive(seed, slot));
            rng.shuffle(idx);
            idx.resize(config.bound_points);
            std::sort(idx.begin(), idx.end());
        }
        return idx;
    };

    const std::vector<std::size_t> t_idx = cap(data.target.x(), 0);
    const Matrix target_x = take_rows(data.target.x(), t_idx);
    std::optional<data::LabeledDomain> target_labeled;
    if (data.target_labeled_available) {
        data::LabeledDomain t;
        t.x = target_x;
        for (std::size_t i : t_idx) {
            t.y.push_back(data.target_labeled.y[i]);
        }
        target_labeled = std::move(t);
    }

    std::vector<data::LabeledDomain> sources;
    Matrix pooled = target_x;
    for (std::size_t si = 0; si < data.sources.size(); ++si) {
        const std::vector<std::size_t> idx = cap(data.sources[si].x, si + 1);
        data::LabeledDomain s;
        s.id = data.sources[si].id;
        s.x = take_rows(data.sources[si].x, idx);
        for (std::size_t i : idx) {
            s.y.push_back(data.sources[si].y[i]);
        }
        pooled = vstack(pooled, s.x);
        sources.push_back(std::move(s));
    }

    const theory::FiniteHypothesisClass cls = theory::enumerate_stumps(pooled);
    // Fix h at the stump with the best worst-case source risk.
    std::size_t best_h = 0;
    double best_risk = std::numeric_limits<double>::infinity();
    for (std::size_t hi = 0; hi < cls.size(); ++hi) {
        double worst = 0.0;
        for (const auto& s : sources) {
            worst = std::max(worst, theory::empirical_risk_01(cls.hypotheses[hi], s));
        }
        if (worst < best_risk) {
            best_risk = worst;
            best_h = hi;
        }
    }
    return theory::assemble_bound(cls, cls.hypotheses[best_h], target_x, sources,
                                  target_labeled, config.delta);
}

} // namespace

Method method_from_string(const std::string& s) {
    if (s == "source_only_combined") return Method::SourceOnlyCombined;
    if (s == "best_single_source") return Method::BestSingleSource;
    if (s == "dann_single_best") return Method::DannSingleBest;
    if (s == "dann_combined") return Method::DannCombined;
    if (s == "mdan_hard") return Method::MdanHard;
    if (s == "mdan_soft") return Method::MdanSoft;
    throw ConfigError("unknown method '" + s + "'");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::SourceOnlyCombined: return "source_only_combined";
        case Method::BestSingleSource: return "best_single_source";
        case Method::DannSingleBest: return "dann_single_best";
        case Method::DannCombined: return "dann_combined";
        case Method::MdanHard: return "mdan_hard";
        case Method::MdanSoft: return "mdan_soft";
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    if (methods.empty()) {
        throw ConfigError("select at least one method");
    }
    if (seeds.empty()) {
        throw ConfigError("provide at least one seed");
    }
    if (hidden.empty()) {
        throw ConfigError("model needs at least one hidden width");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ConfigError("delta must lie in (0, 1)");
    }
    if (bound_points < 1) {
        throw ConfigError("bound_points must be positive");
    }
    if (use_manifest && manifest_path.empty()) {
        throw ConfigError("manifest path is empty");
    }
    train.validate();
}

ExperimentConfig ExperimentConfig::from_ini(const IniFile& ini) {
    ExperimentConfig c;

    const std::string kind = ini.get_or("data", "kind", "synthetic");
    if (kind == "manifest") {
        c.use_manifest = true;
        c.manifest_path = ini.get("data", "manifest");
    } else if (kind == "synthetic") {
        const std::string family = ini.get_or("data", "family", "rotated_moons");
        if (family == "rotated_moons") {
            c.synthetic.family = data::SyntheticFamily::RotatedMoons;
        } else if (family == "gaussian_shift") {
            c.synthetic.family = data::SyntheticFamily::GaussianShift;
        } else {
            throw ConfigError("unknown synthetic family '" + family + "'");
        }
        c.synthetic.k = static_cast<int>(ini.get_int_or("data", "k", 1));
        if (ini.has("data", "angles_deg")) {
            c.synthetic.angles.clear();
            for (double deg : ini.get_double_list("data", "angles_deg")) {
                c.synthetic.angles.push_back(deg * std::numbers::pi / 180.0);
            }
        }
        if (ini.has("data", "shifts")) {
            c.synthetic.shifts = ini.get_vector_list("data", "shifts");
        }
        c.synthetic.n_per_domain =
            static_cast<std::size_t>(ini.get_int_or("data", "n_per_domain", 200));
        c.synthetic.noise = ini.get_double_or("data", "noise", 0.1);
        c.synthetic.seed = static_cast<std::uint64_t>(ini.get_int_or("data", "seed", 0));
    } else {
        throw ConfigError("unknown data kind '" + kind + "'");
    }

    const auto read_widths = [&ini](const char* key, std::vector<std::size_t>& out) {
        if (!ini.has("model", key)) {
            return;
        }
        out.clear();
        for (double w : ini.get_double_list("model", key)) {
            if (w < 1) {
                throw ConfigError(std::string(key) + " widths must be positive");
            }
            out.push_back(static_cast<std::size_t>(w));
        }
    };
    read_widths("hidden", c.hidden);
    read_widths("head_hidden", c.head_hidden);
    read_widths("disc_hidden", c.disc_hidden);
    c.num_classes = static_cast<int>(ini.get_int_or("model", "num_classes", 2));

    c.train.mode = mdan::mode_from_string(ini.get_or("train", "mode", "soft"));
    c.train.gamma = ini.get_double_or("train", "gamma", 10.0);
    c.train.mu = ini.get_double_or("train", "mu", 0.1);
    c.train.learning_rate = ini.get_double_or("train", "learning_rate", 1e-3);
    c.train.batch_size = static_cast<int>(ini.get_int_or("train", "batch", 16));
    c.train.epochs = static_cast<int>(ini.get_int_or("train", "epochs", 1));
    c.train.dropout = ini.get_double_or("train", "dropout", 0.0);

    if (ini.has("experiment", "methods")) {
        c.methods.clear();
        for (const std::string& name : ini.get_list("experiment", "methods")) {
            c.methods.push_back(method_from_string(name));
        }
    }
    c.metric = mdan::metric_from_string(ini.get_or("experiment", "metric", "accuracy"));
    if (ini.has("experiment", "seeds")) {
        c.seeds.clear();
        for (const std::string& tok : ini.get_list("experiment", "seeds")) {
            c.seeds.push_back(static_cast<std::uint64_t>(
                std::stoull(tok)));
        }
    }
    c.bound_points =
        static_cast<std::size_t>(ini.get_int_or("experiment", "bound_points", 200));
    c.delta = ini.get_double_or("experiment", "delta", 0.1);
    c.emit_pad = ini.get_or("experiment", "pad", "on") != "off";
    c.emit_bound = ini.get_or("experiment", "bound", "on") != "off";
    c.validate();
    return c;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
    config.validate();
    const RunData data = load_data(config);
    if (!data.target_labeled_available) {
        throw ConfigError("target oracle labels are required to score methods");
    }
    for (const auto& s : data.sources) {
        if (s.dim() != data.target.dim()) {
            throw ConfigError("source and target dimensions differ");
        }
    }

    fs::create_directories(fs::path(out_dir) / "trace");
    ExperimentResult result;

    std::ofstream metrics(fs::path(out_dir) / "metrics.csv");
    if (!metrics) {
        throw InputError("cannot open metrics.csv for writing");
    }
    metrics << "method,seed,metric,value\n";

    for (Method method : config.methods) {
        MethodOutcome outcome;
        outcome.method = method;
        for (std::uint64_t seed : config.seeds) {
            const CellResult cell = run_cell(config, data, method, seed);
            outcome.per_seed.push_back(cell.value);
            metrics << to_string(method) << "," << seed << ","
                    << metric_name(config.metric) << "," << fmt(cell.value) << "\n";

            const std::string trace_name =
                "trace/" + to_string(method) + "-" + std::to_string(seed) + ".log";
            std::ofstream trace(fs::path(out_dir) / trace_name);
            for (const mdan::StepTrace& t : cell.history) {
                trace << mdan::format_step_trace(t, cell.trace_mode) << "\n";
            }
            result.files.push_back(trace_name);
        }
        outcome.median = median_of(outcome.per_seed);
        metrics << to_string(method) << ",median," << metric_name(config.metric) << ","
                << fmt(outcome.median) << "\n";
        result.outcomes.push_back(std::move(outcome));
    }
    metrics.close();
    result.files.push_back("metrics.csv");

    if (config.emit_pad) {
        std::vector<Matrix> source_x;
        for (const auto& s : data.sources) {
            source_x.push_back(s.x);
        }
        PadConfig pc;
        pc.seed = Rng::derive(config.seeds.front(), 0xfadULL);
        const PadReport pr = pad_report(source_x, data.target.x(), pc);
        std::ofstream padf(fs::path(out_dir) / "pad.csv");
        padf << "source,pad,rank\n";
        for (std::size_t i = 0; i < pr.pads.size(); ++i) {
            const std::size_t pos =
                std::find(pr.ranking.begin(), pr.ranking.end(), i) - pr.ranking.begin();
            padf << i << "," << fmt(pr.pads[i]) << "," << pos << "\n";
        }
        result.files.push_back("pad.csv");
    }

    if (config.emit_bound) {
        const theory::BoundReport report = compute_bound_report(config, data);
        std::ofstream bf(fs::path(out_dir) / "bound.txt");
        if (!bf) {
            throw InputError("cannot open bound.txt for writing");
        }
        bf << theory::format_bound_report(report);
        result.files.push_back("bound.txt");
    }

    if (config.methods.size() >= 2) {
        std::ofstream wf(fs::path(out_dir) / "wilcoxon.csv");
        wf << "pair,statistic,p\n";
        for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
            for (std::size_t j = i + 1; j < result.outcomes.size(); ++j) {
                const WilcoxonResult w = wilcoxon_signed_rank(result.outcomes[i].per_seed,
                                                              result.outcomes[j].per_seed);
                wf << to_string(result.outcomes[i].method) << "-vs-"
                   << to_string(result.outcomes[j].method) << "," << fmt(w.statistic) << ","
                   << fmt(w.p_two_sided) << "\n";
            }
        }
        result.files.push_back("wilcoxon.csv");
    }
    return result;
}

theory::BoundReport bound_report_for(const ExperimentConfig& config) {
    config.validate();
    return compute_bound_report(config, load_data(config));
}

} // namespace msda::eval
