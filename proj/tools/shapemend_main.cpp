// shapemend CLI: process / batch / eval / synth / inspect.
//
// Exit codes: 0 success, 1 runtime or case failure, 2 usage error.
// Logs go to stderr; data only to files/stdout reports.

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "shapemend/eval.hpp"
#include "shapemend/nifti_io.hpp"
#include "shapemend/pipeline.hpp"
#include "shapemend/synth.hpp"

namespace fs = std::filesystem;
using namespace shapemend;

namespace {

bool log_enabled() {
    const char* v = std::getenv("SHAPEMEND_LOG");
    return v && *v && std::string(v) != "0" && std::string(v) != "quiet";
}

void log_line(const std::string& msg) {
    if (log_enabled()) std::cerr << "[shapemend] " << msg << "\n";
}

PipelineConfig load_config(const std::string& path) {
    std::string p = path;
    if (p.empty())
        if (const char* env = std::getenv("SHAPEMEND_CONFIG")) p = env;
    PipelineConfig cfg =
        p.empty() ? PipelineConfig{} : PipelineConfig::from_yaml_file(p);
    cfg.apply_env_overrides();
    cfg.validate();
    if (!p.empty()) log_line("config: " + p);
    return cfg;
}

OrganSchema load_schema(const std::string& path) {
    if (path.empty()) {
        log_line("schema: built-in reference schema");
        return reference_schema();
    }
    log_line("schema: " + path);
    return OrganSchema::from_yaml_file(path);
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << text;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

bool is_nifti_name(const fs::path& p) {
    const std::string n = p.filename().string();
    auto ends = [&](const char* s) {
        const std::size_t l = std::strlen(s);
        return n.size() > l && n.compare(n.size() - l, l, s) == 0;
    };
    return ends(".nii") || ends(".nii.gz");
}

std::string case_id_of(const fs::path& p) {
    std::string n = p.filename().string();
    for (const char* suf : {".nii.gz", ".nii"}) {
        const std::size_t l = std::strlen(suf);
        if (n.size() > l && n.compare(n.size() - l, l, suf) == 0)
            return n.substr(0, n.size() - l);
    }
    return n;
}

std::vector<fs::path> list_cases(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && is_nifti_name(e.path()))
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------

int cmd_process(const std::string& input, const std::string& output,
                const std::string& config_path, const std::string& schema_path) {
    const PipelineConfig cfg = load_config(config_path);
    const OrganSchema schema = load_schema(schema_path);
    const RulePlan plan = compile_plan(schema, cfg);

    const LabelVolume vol = read_label_volume(input);
    const SegmentationCase seg =
        decompose(vol, schema, cfg.strict_labels, case_id_of(input), input);
    auto [fixed, report] = process_case(seg, plan, cfg);
    const LabelVolume out_vol = recompose(fixed, schema);
    const bool gz = output.size() > 3 &&
                    output.compare(output.size() - 3, 3, ".gz") == 0;
    write_label_volume(out_vol, output, gz);
    std::cout << render_report({report}, cfg.report_format);
    log_line("wrote " + output);
    return 0;
}

int cmd_batch(const std::string& input_dir, const std::string& output_dir,
              const std::string& config_path, const std::string& schema_path,
              int workers, const std::string& report_path) {
    PipelineConfig cfg = load_config(config_path);
    if (workers > 0) cfg.workers = workers;
    cfg.validate();
    const OrganSchema schema = load_schema(schema_path);

    if (!fs::is_directory(input_dir))
        throw IoError("input directory not found: " + input_dir);
    fs::create_directories(output_dir);

    std::vector<BatchInput> inputs;
    for (const fs::path& p : list_cases(input_dir))
        inputs.push_back(
            {case_id_of(p), p, fs::path(output_dir) / p.filename()});
    log_line("batch: " + std::to_string(inputs.size()) + " case(s), " +
             std::to_string(cfg.workers) + " worker(s)");

    const BatchReport rep = run_batch(inputs, schema, cfg);
    const std::string rendered = render_report(rep.cases, cfg.report_format);
    if (!report_path.empty())
        write_text_atomic(report_path, rendered);
    else
        std::cout << rendered;

    for (const CaseReport& c : rep.cases)
        if (c.failed)
            std::cerr << "FAILED " << c.case_id << ": " << c.failure_reason
                      << "\n";
    return rep.failures == 0 ? 0 : 1;
}

int cmd_eval(const std::string& pred_dir, const std::string& gt_dir,
             const std::string& schema_path, const std::string& out_path) {
    const OrganSchema schema = load_schema(schema_path);
    if (!fs::is_directory(gt_dir))
        throw IoError("ground-truth directory not found: " + gt_dir);
    if (!fs::is_directory(pred_dir))
        throw IoError("prediction directory not found: " + pred_dir);

    const auto gt_files = list_cases(gt_dir);
    const auto pred_files = list_cases(pred_dir);
    if (gt_files.empty()) throw IoError("no ground-truth cases in " + gt_dir);

    auto names = [](const std::vector<fs::path>& v) {
        std::vector<std::string> out;
        for (const auto& p : v) out.push_back(p.filename().string());
        return out;
    };
    const auto gt_names = names(gt_files), pred_names = names(pred_files);
    std::vector<std::string> unmatched;
    for (const auto& n : gt_names)
        if (!std::count(pred_names.begin(), pred_names.end(), n))
            unmatched.push_back(n + " (missing prediction)");
    for (const auto& n : pred_names)
        if (!std::count(gt_names.begin(), gt_names.end(), n))
            unmatched.push_back(n + " (no ground truth)");
    if (!unmatched.empty()) {
        for (const auto& n : unmatched) std::cerr << "unmatched: " << n << "\n";
        return 1;
    }

    std::vector<CaseReport> reports;
    for (const fs::path& gt_path : gt_files) {
        const fs::path pred_path = fs::path(pred_dir) / gt_path.filename();
        const SegmentationCase gt = decompose(
            read_label_volume(gt_path.string()), schema, false,
            case_id_of(gt_path));
        const SegmentationCase pred = decompose(
            read_label_volume(pred_path.string()), schema, false,
            case_id_of(pred_path));
        CaseReport rep;
        rep.case_id = case_id_of(gt_path);
        // One comparison per organ: before == after == dsc(pred, gt).
        for (const auto& [organ, v] : case_dsc(pred, gt))
            rep.organ_dsc[organ] = OrganDsc{v, v};
        reports.push_back(std::move(rep));
    }
    const std::string rendered = render_report(reports, ReportFormat::Csv);
    if (!out_path.empty())
        write_text_atomic(out_path, rendered);
    else
        std::cout << rendered;
    return 0;
}

int cmd_synth(std::uint64_t seed, int count, int dim,
              const std::string& recipe_path, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const OrganSchema schema = reference_schema();

    for (int n = 0; n < count; ++n) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(n);
        const Phantom ph = generate_phantom(s, {dim, dim, dim});

        InjectionRecipe recipe;
        if (!recipe_path.empty()) {
            recipe = InjectionRecipe::from_yaml_file(recipe_path);
            recipe.seed = s;
        } else {
            recipe.seed = s;
            recipe.injections = {
                ArtifactInjection{5, 1, 20, ""},
                FalsePositiveInjection{"stomach", "liver", 200},
                RedundantInjection{"lung_right", 600},
                FragmentInjection{"colon", 3},
                LateralitySwapInjection{"kidney"},
            };
        }
        const SegmentationCase corrupted = inject(ph, recipe);

        const std::string stem = "phantom-" + std::to_string(s);
        const fs::path base = fs::path(out_dir);
        write_label_volume(recompose(ph.clean, schema),
                           (base / (stem + "-clean.nii.gz")).string(), true);
        write_label_volume(recompose(corrupted, schema),
                           (base / (stem + "-corrupted.nii.gz")).string(),
                           true);
        write_text_atomic(base / (stem + "-recipe.yaml"), recipe.to_yaml());
        log_line("emitted " + stem);
    }
    return 0;
}

int cmd_inspect(const std::string& input, int slice, int axis,
                const std::string& out_path) {
    if (axis < 0 || axis > 2) throw ConfigError("axis must be 0, 1, or 2");
    const LabelVolume vol = read_label_volume(input);
    const auto& dims = vol.meta().dims;
    if (slice < 0 || slice >= dims[axis])
        throw OutOfBounds("slice " + std::to_string(slice) +
                          " outside axis extent " +
                          std::to_string(dims[axis]));

    // Fixed 16-entry palette; label 0 is black, others cycle through 15
    // saturated colors deterministically.
    static const unsigned char palette[16][3] = {
        {0, 0, 0},       {230, 25, 75},   {60, 180, 75},   {255, 225, 25},
        {0, 130, 200},   {245, 130, 48},  {145, 30, 180},  {70, 240, 240},
        {240, 50, 230},  {210, 245, 60},  {250, 190, 190}, {0, 128, 128},
        {170, 110, 40},  {128, 0, 0},     {170, 255, 195}, {128, 128, 0}};

    const int a1 = axis == 0 ? 1 : 0;
    const int a2 = axis == 2 ? 1 : 2;
    const int w = dims[a2], h = dims[a1];
    std::string body;
    body.reserve(static_cast<std::size_t>(w) * h * 3);
    std::array<int, 3> c{};
    c[axis] = slice;
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            c[a1] = i;
            c[a2] = j;
            const std::int32_t label = vol.at(vol.meta().index(c[0], c[1], c[2]));
            const unsigned char* rgb =
                label == 0 ? palette[0] : palette[1 + (label - 1) % 15];
            body.append(reinterpret_cast<const char*>(rgb), 3);
        }
    std::string ppm = "P6\n" + std::to_string(w) + " " + std::to_string(h) +
                      "\n255\n" + body;
    write_text_atomic(out_path, ppm);
    log_line("wrote " + out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"shapemend: anatomical shape correction for multi-organ "
                 "segmentation masks"};
    app.require_subcommand(1);

    std::string input, output, config_path, schema_path;
    std::string input_dir, output_dir, report_path;
    std::string pred_dir, gt_dir, out_path, recipe_path;
    int workers = 0, slice = 0, axis = 2, count = 1, dim = 64;
    std::uint64_t seed = 0;

    auto* process = app.add_subcommand("process", "Correct a single volume");
    process->add_option("--input", input, "Input .nii/.nii.gz")->required();
    process->add_option("--output", output, "Output .nii/.nii.gz")->required();
    process->add_option("--config", config_path, "Pipeline config YAML");
    process->add_option("--schema", schema_path, "Organ schema YAML");

    auto* batch = app.add_subcommand("batch", "Correct a directory of volumes");
    batch->add_option("--input-dir", input_dir)->required();
    batch->add_option("--output-dir", output_dir)->required();
    batch->add_option("--config", config_path, "Pipeline config YAML");
    batch->add_option("--schema", schema_path, "Organ schema YAML");
    batch->add_option("--workers", workers, "Worker count (>=1)");
    batch->add_option("--report", report_path, "Report file (default: stdout)");

    auto* eval_cmd = app.add_subcommand("eval", "Organ-wise DSC report");
    eval_cmd->add_option("--pred-dir", pred_dir)->required();
    eval_cmd->add_option("--gt-dir", gt_dir)->required();
    eval_cmd->add_option("--schema", schema_path, "Organ schema YAML");
    eval_cmd->add_option("--out", out_path, "Report file (default: stdout)");

    auto* synth = app.add_subcommand(
        "synth", "Emit phantom + corrupted volume + recipe");
    synth->add_option("--seed", seed, "Base seed")->required();
    synth->add_option("--count", count, "Number of consecutive seeds");
    synth->add_option("--dims", dim, "Cubic grid size (>=32)");
    synth->add_option("--recipe", recipe_path,
                      "Recipe YAML (default: one of each error class)");
    synth->add_option("--out-dir", out_path)->required();

    auto* inspect = app.add_subcommand("inspect", "Render a slice as PPM");
    inspect->add_option("--input", input, "Input .nii/.nii.gz")->required();
    inspect->add_option("--slice", slice, "Slice index")->required();
    inspect->add_option("--axis", axis, "Slice axis (0/1/2, default 2)");
    inspect->add_option("--out", output, "Output .ppm")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (process->parsed())
            return cmd_process(input, output, config_path, schema_path);
        if (batch->parsed())
            return cmd_batch(input_dir, output_dir, config_path, schema_path,
                             workers, report_path);
        if (eval_cmd->parsed())
            return cmd_eval(pred_dir, gt_dir, schema_path, out_path);
        if (synth->parsed())
            return cmd_synth(seed, count, dim, recipe_path, out_path);
        if (inspect->parsed()) return cmd_inspect(input, slice, axis, output);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
