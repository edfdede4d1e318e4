#include "aerosynth/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "aerosynth/dataset_builder.hpp"
#include "aerosynth/error.hpp"
#include "aerosynth/image_io.hpp"

namespace aerosynth::cli {

namespace fs = std::filesystem;

namespace {

enum class Command { generate, stats, validate, preview };

struct RunConfig {
  Command command = Command::generate;
  fs::path config_path;
  fs::path output_dir;
  fs::path dataset_dir;
  std::int64_t total_images = 1000;
  int workers = 1;
  std::uint64_t master_seed = 0;
  std::optional<std::pair<int, int>> resolution;
  PlanProfile profile = PlanProfile::reference_proportions;
  std::vector<CompositionTarget> custom_targets;
  RigConfig rig;
  bool write_masks = true;
  bool write_depth = false;
  double val_fraction = kDefaultValFraction;
  int preview_count = 8;
};

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::config_parse, message);
}

template <typename T>
T config_value(const Json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    config_error(where + ": key '" + key + "': " + e.what());
  }
}

template <typename T>
void maybe_set(const Json& j, const std::string& key, const std::string& where, T& target) {
  if (j.contains(key)) target = config_value<T>(j, key, where);
}

std::pair<int, int> parse_resolution(const std::string& text, const std::string& where) {
  int w = 0;
  int h = 0;
  char x = 0;
  std::istringstream in(text);
  if (!(in >> w >> x >> h) || x != 'x' || !in.eof() || w < 16 || h < 16) {
    config_error(where + ": resolution '" + text + "' must look like 1920x1080");
  }
  return {w, h};
}

CompositionTarget target_from_json(const Json& j, const std::string& where) {
  CompositionTarget t;
  const auto subset = parse_subset(config_value<std::string>(j, "subset", where));
  const auto bucket = parse_bucket(config_value<std::string>(j, "bucket", where));
  const auto scene = parse_profile(config_value<std::string>(j, "scene", where));
  const auto condition =
      parse_condition(j.contains("condition") ? config_value<std::string>(j, "condition", where)
                                              : std::string("clear"));
  if (!subset) config_error(where + ": key 'subset': expected nonvfx, vfx or weather");
  if (!bucket) config_error(where + ": key 'bucket': unknown bucket");
  if (!scene) config_error(where + ": key 'scene': unknown scene profile");
  if (!condition) config_error(where + ": key 'condition': expected clear, fog, snow or other");
  t.subset = *subset;
  t.bucket = *bucket;
  t.scene = *scene;
  t.condition = *condition;
  t.count = config_value<std::int64_t>(j, "count", where);
  if (j.contains("severity_percent")) t.severity_percent = config_value<int>(j, "severity_percent", where);
  if (j.contains("snow_severity_percent")) {
    t.snow_severity_percent = config_value<int>(j, "snow_severity_percent", where);
  }
  return t;
}

void apply_config_file(RunConfig& cfg) {
  const std::string where = cfg.config_path.string();
  std::ifstream in(cfg.config_path);
  if (!in) throw Error(ErrorCode::io, "cannot read config " + where);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    config_error(where + ": " + e.what());
  }
  if (!j.is_object()) config_error(where + ": top level must be an object");

  static const std::vector<std::string> known{
      "out",     "total",       "workers",      "seed",          "profile",       "resolution",
      "targets", "rig",         "write_masks",  "write_depth",   "val_fraction",  "preview_count"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      config_error(where + ": unknown key '" + key + "'");
    }
  }
  if (j.contains("out")) cfg.output_dir = config_value<std::string>(j, "out", where);
  maybe_set(j, "total", where, cfg.total_images);
  maybe_set(j, "workers", where, cfg.workers);
  maybe_set(j, "seed", where, cfg.master_seed);
  maybe_set(j, "write_masks", where, cfg.write_masks);
  maybe_set(j, "write_depth", where, cfg.write_depth);
  maybe_set(j, "val_fraction", where, cfg.val_fraction);
  maybe_set(j, "preview_count", where, cfg.preview_count);
  if (j.contains("profile")) {
    const auto p = parse_plan_profile(config_value<std::string>(j, "profile", where));
    if (!p) config_error(where + ": key 'profile': expected reference_proportions or custom");
    cfg.profile = *p;
  }
  if (j.contains("resolution")) {
    cfg.resolution = parse_resolution(config_value<std::string>(j, "resolution", where), where);
  }
  if (j.contains("rig")) {
    const Json& rig = j["rig"];
    const std::string rw = where + ": rig";
    maybe_set(rig, "camera_count", rw, cfg.rig.camera_count);
    maybe_set(rig, "hfov_deg", rw, cfg.rig.hfov_deg);
    maybe_set(rig, "elevation_deg", rw, cfg.rig.elevation_deg);
    if (rig.contains("height")) cfg.rig.position.z = config_value<double>(rig, "height", rw);
  }
  if (j.contains("targets")) {
    if (!j["targets"].is_array()) config_error(where + ": key 'targets': expected an array");
    for (std::size_t i = 0; i < j["targets"].size(); ++i) {
      cfg.custom_targets.push_back(
          target_from_json(j["targets"][i], where + ": targets[" + std::to_string(i) + "]"));
    }
  }
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config_parse:
    case ErrorCode::invalid_targets:
    case ErrorCode::invalid_fov:
    case ErrorCode::out_of_range:
    case ErrorCode::severity_range:
      return kConfigParse;
    case ErrorCode::io:
      return kIo;
    case ErrorCode::validation_failed:
    case ErrorCode::layout_invalid:
      return kValidationFailed;
    case ErrorCode::generation_failed:
    case ErrorCode::rejection_exhausted:
      return kGenerationFailed;
    default:
      return kOther;
  }
}

std::string pad(const std::string& s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

void print_table(std::ostream& out, const std::string& title, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out << (c ? "  " : "") << pad(cells[c], widths[c], c == 0);
    }
    out << '\n';
  };
  out << title << '\n';
  line(header);
  std::size_t total_width = 0;
  for (auto w : widths) total_width += w + 2;
  out << std::string(total_width - 2, '-') << '\n';
  for (const auto& r : rows) line(r);
  out << '\n';
}

std::string count_or_dash(std::int64_t n) { return n == 0 ? "--" : std::to_string(n); }

void print_stats(std::ostream& out, const DatasetSummary& s) {
  const std::array<std::string, 3> subset_names{"Non-VFX", "VFX", "Weather"};
  std::vector<std::vector<std::string>> rows;
  std::array<std::int64_t, 4> column_totals{};
  for (std::size_t i = 0; i < kAllSubsets.size(); ++i) {
    const Subset subset = kAllSubsets[i];
    const std::int64_t drone = s.bucket_count(subset, ContentBucket::drone_only) +
                               s.bucket_count(subset, ContentBucket::vfx_drone);
    const std::int64_t bird = s.bucket_count(subset, ContentBucket::bird_only);
    const std::int64_t both = s.bucket_count(subset, ContentBucket::both);
    const std::int64_t total = s.subset_total(subset);
    column_totals[0] += drone;
    column_totals[1] += bird;
    column_totals[2] += both;
    column_totals[3] += total;
    rows.push_back({subset_names[i], std::to_string(drone), std::to_string(bird),
                    std::to_string(both), std::to_string(total)});
  }
  rows.push_back({"Total", std::to_string(column_totals[0]), std::to_string(column_totals[1]),
                  std::to_string(column_totals[2]), std::to_string(column_totals[3])});
  print_table(out, "Image-level composition", {"Subset", "Drone-only", "Bird-only", "Both", "Total"},
              rows);

  rows.clear();
  for (ProfileId scene : kAllProfiles) {
    rows.push_back({std::string(to_string(scene)),
                    count_or_dash(s.scene_count(Subset::non_vfx, scene)),
                    count_or_dash(s.scene_count(Subset::vfx, scene)),
                    count_or_dash(s.scene_count(Subset::weather, scene))});
  }
  print_table(out, "Scene distribution", {"Scene", "Non-VFX", "VFX", "Weather"}, rows);

  rows.clear();
  const std::array<std::pair<WeatherCondition, std::string>, 3> conditions{
      {{WeatherCondition::fog, "Fog"}, {WeatherCondition::snow, "Snow"}, {WeatherCondition::other, "Other"}}};
  for (const auto& [condition, name] : conditions) {
    rows.push_back({name, std::to_string(s.condition_count(condition, ContentBucket::drone_only)),
                    std::to_string(s.condition_count(condition, ContentBucket::bird_only)),
                    std::to_string(s.condition_count(condition, ContentBucket::both)),
                    std::to_string(s.condition_count(condition))});
  }
  print_table(out, "Weather conditions", {"Condition", "Drone-only", "Bird-only", "Both", "Total"},
              rows);

  rows.clear();
  for (std::size_t i = 0; i < kBoxHistogramEdges.size(); ++i) {
    const std::string upper =
        i + 1 < kBoxHistogramEdges.size() ? std::to_string(kBoxHistogramEdges[i + 1]) : "";
    rows.push_back({"[" + std::to_string(kBoxHistogramEdges[i]) + ", " + upper + ")",
                    std::to_string(s.box_histogram[i])});
  }
  print_table(out, "Box max side (px)", {"Range", "Boxes"}, rows);

  out << "images " << s.images << ", drones " << s.class_instances[0] << ", birds "
      << s.class_instances[1] << ", box max side " << s.min_box_side << ".." << s.max_box_side
      << " px, train/val " << s.train_images << "/" << s.val_images << '\n';
}

void draw_box(Image<Rgb8>& img, const PixelBox& box, Rgb8 color, int thickness) {
  for (int t = 0; t < thickness; ++t) {
    const int x0 = box.x_min - 1 - t;
    const int y0 = box.y_min - 1 - t;
    const int x1 = box.x_max + t;
    const int y1 = box.y_max + t;
    for (int x = x0; x <= x1; ++x) {
      if (img.contains(x, y0)) img.at(x, y0) = color;
      if (img.contains(x, y1)) img.at(x, y1) = color;
    }
    for (int y = y0; y <= y1; ++y) {
      if (img.contains(x0, y)) img.at(x0, y) = color;
      if (img.contains(x1, y)) img.at(x1, y) = color;
    }
  }
}

int run_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.output_dir.empty()) config_error("generate: --out (or config key 'out') is required");
  if (cfg.total_images < 1) config_error("generate: --total must be at least 1");
  DatasetPlan plan = plan_dataset(cfg.total_images, cfg.profile, cfg.custom_targets);
  plan.master_seed = cfg.master_seed;
  plan.rig = cfg.rig;
  plan.write_masks = cfg.write_masks;
  plan.write_depth = cfg.write_depth;
  plan.val_fraction = cfg.val_fraction;
  if (cfg.resolution) std::tie(plan.width, plan.height) = *cfg.resolution;

  GenerateOptions options;
  options.log = [&err](std::string_view line) { err << "warning: " << line << '\n'; };
  const DatasetSummary summary = generate_dataset(plan, cfg.output_dir, cfg.workers, options);
  out << "wrote " << summary.images << " images to " << cfg.output_dir.string() << " in "
      << std::fixed << std::setprecision(1) << summary.wall_seconds << " s ("
      << std::setprecision(2) << summary.images / std::max(summary.wall_seconds, 1e-9)
      << " frames/s, " << cfg.workers << " workers)\n";
  return kOk;
}

int run_stats(const RunConfig& cfg, std::ostream& out) {
  const DatasetSummary summary = compute_stats(cfg.dataset_dir);
  print_stats(out, summary);
  if (!cfg.output_dir.empty()) {
    std::ofstream file(cfg.output_dir);
    file << to_json(summary).dump(2) << '\n';
    if (!file) throw Error(ErrorCode::io, "cannot write " + cfg.output_dir.string());
  }
  return kOk;
}

int run_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ValidationReport report = validate_dataset(cfg.dataset_dir);
  for (const auto& p : report.problems) err << p << '\n';
  if (!report.ok()) {
    err << "VALIDATION_FAILED: " << report.problems.size() << " problem(s) in "
        << cfg.dataset_dir.string() << '\n';
    return kValidationFailed;
  }
  out << cfg.dataset_dir.string() << ": ok\n";
  return kOk;
}

int run_preview(const RunConfig& cfg, std::ostream& out) {
  const auto entries = scan_dataset(cfg.dataset_dir);
  fs::path target = cfg.output_dir;
  if (target.empty()) {
    fs::path base = cfg.dataset_dir;
    if (base.filename().empty()) base = base.parent_path();
    target = base.string() + "_preview";
  }
  std::error_code ec;
  fs::create_directories(target, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + target.string());
  if (cfg.preview_count < 1) config_error("preview: --preview-count must be at least 1");
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(cfg.preview_count), entries.size());
  for (std::size_t k = 0; k < n; ++k) {
    const DatasetEntry& e = entries[k * entries.size() / n];
    Image<Rgb8> img = read_png_rgb(cfg.dataset_dir / e.image);
    const int thickness = std::max(1, e.width / 640);
    for (const auto& r : e.records) {
      const Rgb8 color = r.cls == ClassId::drone ? Rgb8{255, 40, 40} : Rgb8{40, 220, 255};
      draw_box(img, from_yolo(r, e.width, e.height), color, thickness);
    }
    const fs::path dest = target / (e.basename + "_preview.png");
    write_png_rgb(dest, img);
    out << dest.string() << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Procedural drone and bird detection dataset generator", "aerosynth"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  std::string out_path;
  std::string dataset_dir;
  std::string profile_name;
  std::string resolution;
  std::int64_t total = 0;
  int workers = 0;
  std::uint64_t seed = 0;
  double val_fraction = 0.0;
  int preview_count = 0;

  auto* generate = app.add_subcommand("generate", "Plan and render a dataset");
  auto* stats = app.add_subcommand("stats", "Composition tables recomputed from the files");
  auto* validate = app.add_subcommand("validate", "Check layout, labels and manifest");
  auto* preview = app.add_subcommand("preview", "Copies of sample images with boxes drawn");

  generate->add_option("--config", config_path, "JSON config file");
  auto* out_opt = generate->add_option("--out", out_path, "Output directory");
  auto* total_opt = generate->add_option("--total", total, "Number of images");
  auto* workers_opt = generate->add_option("--workers", workers, "Worker threads");
  auto* seed_opt = generate->add_option("--seed", seed, "Master seed");
  auto* profile_opt =
      generate->add_option("--profile", profile_name, "reference_proportions or custom");
  auto* val_opt = generate->add_option("--val-fraction", val_fraction, "Validation share");
  auto* res_opt = generate->add_option("--resolution", resolution, "WIDTHxHEIGHT");

  stats->add_option("dataset", dataset_dir, "Dataset directory")->required();
  auto* stats_out = stats->add_option("--out", out_path, "Write the summary as JSON");
  validate->add_option("dataset", dataset_dir, "Dataset directory")->required();
  preview->add_option("dataset", dataset_dir, "Dataset directory")->required();
  auto* preview_out = preview->add_option("--out", out_path, "Preview directory");
  auto* count_opt = preview->add_option("--preview-count", preview_count, "Images to preview");
  preview->add_option("--config", config_path, "JSON config file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "CONFIG_PARSE: " << e.what() << " (see --help)\n";
    return kConfigParse;
  }

  try {
    if (generate->parsed()) cfg.command = Command::generate;
    if (stats->parsed()) cfg.command = Command::stats;
    if (validate->parsed()) cfg.command = Command::validate;
    if (preview->parsed()) cfg.command = Command::preview;

    if (!config_path.empty()) {
      cfg.config_path = config_path;
      apply_config_file(cfg);
    }
    if (const char* env = std::getenv(kWorkersEnv); env && *env) {
      try {
        std::size_t used = 0;
        cfg.workers = std::stoi(env, &used);
        if (env[used] != '\0') throw std::invalid_argument(env);
      } catch (const std::exception&) {
        config_error(std::string(kWorkersEnv) + ": '" + env + "' is not an integer");
      }
    }
    if (out_opt->count() || stats_out->count() || preview_out->count()) cfg.output_dir = out_path;
    if (total_opt->count()) cfg.total_images = total;
    if (workers_opt->count()) cfg.workers = workers;
    if (seed_opt->count()) cfg.master_seed = seed;
    if (val_opt->count()) cfg.val_fraction = val_fraction;
    if (count_opt->count()) cfg.preview_count = preview_count;
    if (res_opt->count()) cfg.resolution = parse_resolution(resolution, "--resolution");
    if (profile_opt->count()) {
      const auto p = parse_plan_profile(profile_name);
      if (!p) config_error("--profile: expected reference_proportions or custom");
      cfg.profile = *p;
    }
    if (cfg.workers < 1) config_error("workers must be at least 1");
    cfg.dataset_dir = dataset_dir;

    switch (cfg.command) {
      case Command::generate:
        return run_generate(cfg, out, err);
      case Command::stats:
        return run_stats(cfg, out);
      case Command::validate:
        return run_validate(cfg, out, err);
      case Command::preview:
        return run_preview(cfg, out);
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace aerosynth::cli
