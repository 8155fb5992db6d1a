#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msda/data/io.hpp"
#include "msda/data/synthetic.hpp"
#include "msda/eval/ini.hpp"
#include "msda/mdan/train.hpp"
#include "msda/theory/bound.hpp"

namespace msda::eval {

enum class Method {
    SourceOnlyCombined, // one supervised model on all sources pooled
    BestSingleSource,   // supervised per source, best target score kept
    DannSingleBest,     // single-source adversarial per source, best kept
    DannCombined,       // single-source adversarial on pooled sources
    MdanHard,
    MdanSoft,
};

Method method_from_string(const std::string& s);
std::string to_string(Method m);

struct ExperimentConfig {
    bool use_manifest = false;
    std::string manifest_path;
    data::SyntheticSpec synthetic;

    std::vector<std::size_t> hidden = {64, 32, 16}; // extractor widths
    std::vector<std::size_t> head_hidden;           // task head widths (empty: linear)
    std::vector<std::size_t> disc_hidden;           // discriminator widths (empty: linear)
    int num_classes = 2;

    mdan::TrainConfig train; // per-run seed is overridden from `seeds`

    std::vector<Method> methods = {Method::MdanSoft};
    mdan::Metric metric = mdan::Metric::Accuracy;
    std::vector<std::uint64_t> seeds = {1};
    std::size_t bound_points = 200; // per-domain cap for the bound report
    double delta = 0.1;
    bool emit_pad = true;
    bool emit_bound = true;

    void validate() const;
    static ExperimentConfig from_ini(const IniFile& ini);
};

struct MethodOutcome {
    Method method = Method::SourceOnlyCombined;
    std::vector<double> per_seed;
    double median = 0.0;
};

struct ExperimentResult {
    std::vector<MethodOutcome> outcomes;
    std::vector<std::string> files; // everything written, relative to out_dir
};

// Runs every (method, seed) cell on one shared dataset and writes
// metrics.csv, pad.csv, wilcoxon.csv, bound.txt, and per-cell trace logs
// under out_dir. Identical config + seeds give byte-identical metrics.csv.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir);

// Stump-class bound report for the configured dataset, capped per domain at
// bound_points rows; the joint-risk term is flagged unavailable when the
// target carries no oracle labels.
theory::BoundReport bound_report_for(const ExperimentConfig& config);

} // namespace msda::eval
