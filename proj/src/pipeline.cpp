#include "shapemend/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "shapemend/nifti_io.hpp"

namespace shapemend {

bool PipelineConfig::step_enabled(const std::string& name) const {
    for (const auto& s : enabled_steps)
        if (s == name) return true;
    return false;
}

void PipelineConfig::validate() const {
    for (const auto& name : enabled_steps) step_from_name(name);
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (d_merge_mm < 0) throw ConfigError("d_merge_mm must be >= 0");
    if (r_bridge_voxels < 0) throw ConfigError("r_bridge_voxels must be >= 0");
    if (lateral_axis_fallback < 0 || lateral_axis_fallback > 2)
        throw ConfigError("lateral_axis_fallback must be 0, 1 or 2");
    if (merged_split_fraction < 0 || merged_split_fraction > 1)
        throw ConfigError("merged_split_fraction must be in [0,1]");
}

PipelineConfig PipelineConfig::from_yaml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_yaml_string(buf.str());
}

PipelineConfig PipelineConfig::from_yaml_string(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config YAML parse error: ") + e.what());
    }
    PipelineConfig c;
    if (root["steps"]) {
        c.enabled_steps.clear();
        for (const auto& s : root["steps"])
            c.enabled_steps.push_back(s.as<std::string>());
    }
    const YAML::Node d = root["defaults"];
    if (d) {
        if (d["connectivity"])
            c.connectivity = connectivity_from_int(d["connectivity"].as<int>());
        if (d["check_size_threshold"])
            c.check_size_threshold = d["check_size_threshold"].as<std::size_t>();
        if (d["d_merge_mm"]) c.d_merge_mm = d["d_merge_mm"].as<double>();
        if (d["r_bridge_voxels"])
            c.r_bridge_voxels = d["r_bridge_voxels"].as<int>();
        if (d["lateral_axis_fallback"])
            c.lateral_axis_fallback = d["lateral_axis_fallback"].as<int>();
        if (d["merged_split_fraction"])
            c.merged_split_fraction = d["merged_split_fraction"].as<double>();
    }
    if (root["workers"]) c.workers = root["workers"].as<int>();
    if (root["strict_labels"]) c.strict_labels = root["strict_labels"].as<bool>();
    if (root["report_format"]) {
        const auto f = root["report_format"].as<std::string>();
        if (f == "csv") c.report_format = ReportFormat::Csv;
        else if (f == "json") c.report_format = ReportFormat::Json;
        else throw ConfigError("report_format must be csv or json");
    }
    if (root["overrides"]) {
        for (const auto& kv : root["overrides"]) {
            OrganOverride ov;
            const YAML::Node n = kv.second;
            if (n["keep_top"]) ov.keep_top = n["keep_top"].as<int>();
            if (n["min_component_voxels"])
                ov.min_component_voxels = n["min_component_voxels"].as<int>();
            if (n["mergeable"]) ov.mergeable = n["mergeable"].as<bool>();
            c.overrides[kv.first.as<std::string>()] = ov;
        }
    }
    c.validate();
    return c;
}

void PipelineConfig::apply_env_overrides() {
    if (const char* w = std::getenv("SHAPEMEND_WORKERS")) {
        try {
            workers = std::stoi(w);
        } catch (...) {
            throw ConfigError("SHAPEMEND_WORKERS is not an integer");
        }
    }
    validate();
}

std::pair<SegmentationCase, CaseReport> process_case(const SegmentationCase& seg,
                                                     const RulePlan& plan,
                                                     const PipelineConfig& config) {
    (void)config;
    CaseReport report;
    report.case_id = seg.case_id();
    const auto t0 = std::chrono::steady_clock::now();
    auto [corrected, records] = apply_organ_rules(seg, plan);
    report.step_log = std::move(records);
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return {std::move(corrected), std::move(report)};
}

namespace {

/// Index-sliced pool: results land in slots keyed by input order, so the
/// outcome is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (n == 0) return;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int count = std::min<std::size_t>(workers, n);
    pool.reserve(count);
    for (int w = 0; w < count; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                fn(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace

BatchReport run_batch(const std::vector<BatchInput>& inputs,
                      const OrganSchema& schema, const PipelineConfig& config) {
    config.validate();
    const RulePlan plan = compile_plan(schema, config);
    BatchReport report;
    report.workers = config.workers;
    report.cases.resize(inputs.size());
    const auto t0 = std::chrono::steady_clock::now();

    parallel_for(inputs.size(), config.workers, [&](std::size_t i) {
        const BatchInput& in = inputs[i];
        CaseReport& rep = report.cases[i];
        rep.case_id = in.case_id;
        try {
            const LabelVolume volume = read_label_volume(in.input.string());
            SegmentationCase seg =
                decompose(volume, schema, config.strict_labels, in.case_id,
                          in.input.string());
            auto [corrected, case_rep] = process_case(seg, plan, config);
            case_rep.case_id = in.case_id;
            rep = std::move(case_rep);
            if (!in.output.empty())
                write_label_volume(recompose(corrected, schema),
                                   in.output.string(),
                                   in.output.string().ends_with(".gz"));
        } catch (const std::exception& e) {
            rep.failed = true;
            rep.failure_reason = e.what();
        }
    });

    for (const CaseReport& c : report.cases)
        (c.failed ? report.failures : report.successes) += 1;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return report;
}

std::vector<std::pair<SegmentationCase, CaseReport>> run_batch_cases(
    const std::vector<SegmentationCase>& cases, const OrganSchema& schema,
    const PipelineConfig& config) {
    config.validate();
    const RulePlan plan = compile_plan(schema, config);
    std::vector<std::pair<SegmentationCase, CaseReport>> out;
    out.reserve(cases.size());
    for (const auto& c : cases) out.emplace_back(c, CaseReport{});
    parallel_for(cases.size(), config.workers, [&](std::size_t i) {
        out[i] = process_case(cases[i], plan, config);
    });
    return out;
}

} // namespace shapemend
