#include "aerosynth/dataset_builder.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <thread>
#include <utility>

#include "aerosynth/apportion.hpp"
#include "aerosynth/error.hpp"
#include "aerosynth/image_io.hpp"
#include "aerosynth/rng.hpp"
#include "aerosynth/weather.hpp"

namespace aerosynth {

namespace fs = std::filesystem;

namespace {

// Reference composition. Buckets are ordered drone_only, bird_only, both; scenes
// follow kAllProfiles, with 0 where a scene does not occur in a subset.
constexpr std::array<std::int64_t, 3> kSubsetTotals{112899, 46086, 19654};
constexpr std::array<std::int64_t, 3> kNonVfxBuckets{32366, 48097, 32436};
constexpr std::array<std::int64_t, 7> kNonVfxScenes{5353, 21361, 13221, 4918, 35556, 32490, 0};
constexpr std::array<std::int64_t, 7> kVfxScenes{3331, 3364, 4870, 12741, 8531, 0, 13249};
// Rows fog, snow, other; columns drone_only, bird_only, both.
constexpr std::array<std::array<std::int64_t, 3>, 3> kWeatherCells{{
    {3163, 1926, 5121},
    {3047, 865, 2830},
    {904, 148, 1650},
}};

constexpr std::array<ContentBucket, 3> kPlainBuckets{ContentBucket::drone_only,
                                                     ContentBucket::bird_only, ContentBucket::both};
constexpr std::array<WeatherCondition, 3> kWeatherConditions{
    WeatherCondition::fog, WeatherCondition::snow, WeatherCondition::other};

bool scene_allowed(Subset subset, ProfileId scene) {
  const auto i = static_cast<std::size_t>(scene);
  switch (subset) {
    case Subset::vfx:
      return kVfxScenes[i] > 0;
    case Subset::non_vfx:
    case Subset::weather:
      return kNonVfxScenes[i] > 0;
  }
  return false;
}

[[noreturn]] void bad_target(const CompositionTarget& t, const std::string& why) {
  throw Error(ErrorCode::invalid_targets,
              std::string(to_string(t.subset)) + "/" + std::string(to_string(t.bucket)) + "/" +
                  std::string(to_string(t.scene)) + "/" + std::string(to_string(t.condition)) +
                  ": " + why);
}

bool bucket_satisfied(ContentBucket bucket, const AnnotationResult& result) {
  bool drone = false;
  bool bird = false;
  for (const auto& a : result.annotations) {
    (a.record.cls == ClassId::drone ? drone : bird) = true;
  }
  switch (bucket) {
    case ContentBucket::drone_only:
    case ContentBucket::vfx_drone:
      return drone && !bird;
    case ContentBucket::bird_only:
      return bird && !drone;
    case ContentBucket::both:
      return drone && bird;
  }
  return false;
}

std::string describe(const FrameJob& job) {
  return "frame " + std::to_string(job.index) + " (" + std::string(to_string(job.subset)) + "/" +
         std::string(to_string(job.bucket)) + "/" + std::string(to_string(job.scene)) + "/" +
         std::string(to_string(job.weather.condition)) + ")";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
}

struct FrameOutcome {
  Json entry;
  CompositionKey key;
  std::vector<PixelBox> boxes;
  std::vector<AnnotationRecord> records;
  std::vector<std::string> warnings;
};

FrameOutcome run_job(const GenerationContext& context, const FrameJob& job,
                     const fs::path& root) {
  FrameProduct product = produce_frame(context, job);
  const DatasetPlan& plan = context.plan;
  const std::string subset(to_string(job.subset));
  const std::string image_rel = "images/" + subset + "/" + job.basename + ".png";
  const std::string label_rel = "labels/" + subset + "/" + job.basename + ".txt";
  const std::string mask_rel = "masks/" + subset + "/" + job.basename + ".png";
  const std::string depth_rel = "depth/" + subset + "/" + job.basename + ".f32";

  FrameOutcome out;
  out.records = records_of(product.annotation);
  for (const auto& a : product.annotation.annotations) out.boxes.push_back(a.box);
  out.key = {job.subset, job.bucket, job.scene, job.weather.condition};

  write_png_rgb(root / image_rel, product.frame.rgb);
  write_text(root / label_rel, serialize_labels(out.records));
  if (plan.write_masks) write_png_ids(root / mask_rel, product.frame.segmap);
  if (plan.write_depth) write_depth_f32(root / depth_rel, product.frame.depth);

  Json boxes = Json::array();
  for (const auto& a : product.annotation.annotations) {
    boxes.push_back({{"instance_id", a.instance_id},
                     {"class", static_cast<int>(a.record.cls)},
                     {"box", {a.box.x_min, a.box.y_min, a.box.x_max, a.box.y_max}}});
  }
  Json instances = Json::array();
  for (const auto& inst : product.scene.instances) {
    instances.push_back(to_json(inst, context.library));
  }
  Json& e = out.entry;
  e["frame_index"] = job.index;
  e["image"] = image_rel;
  e["label"] = label_rel;
  if (plan.write_masks) e["mask"] = mask_rel;
  if (plan.write_depth) e["depth"] = depth_rel;
  e["subset"] = subset;
  e["bucket"] = std::string(to_string(job.bucket));
  e["scene"] = std::string(to_string(job.scene));
  e["condition"] = std::string(to_string(job.weather.condition));
  e["severity_percent"] = job.fog_percent;
  e["snow_severity_percent"] = job.snow_percent;
  e["camera"] = job.camera;
  e["frame_seed"] = job.frame_seed;
  e["scene_seed"] = job.scene_seed;
  e["paired_with"] = job.paired_with ? Json(*job.paired_with) : Json(nullptr);
  e["attempts"] = product.attempts;
  e["labels"] = out.records.size();
  e["fragments"] = product.annotation.fragments;
  e["flock_particles_drawn"] = product.render_stats.flock_particles_drawn;
  e["environment"] = to_json(product.scene.environment);
  e["time"] = product.scene.time;
  e["duration"] = product.scene.duration;
  e["boxes"] = std::move(boxes);
  e["instances"] = std::move(instances);

  if (product.attempts > 1) {
    out.warnings.push_back(describe(job) + ": accepted after " +
                           std::to_string(product.attempts) + " attempts");
  }
  return out;
}

Json plan_json(const DatasetPlan& plan) {
  Json targets = Json::array();
  for (const auto& t : plan.targets) {
    Json j = {{"subset", std::string(to_string(t.subset))},
              {"bucket", std::string(to_string(t.bucket))},
              {"scene", std::string(to_string(t.scene))},
              {"condition", std::string(to_string(t.condition))},
              {"count", t.count}};
    if (t.severity_percent) j["severity_percent"] = *t.severity_percent;
    if (t.snow_severity_percent) j["snow_severity_percent"] = *t.snow_severity_percent;
    targets.push_back(std::move(j));
  }
  const PlacementConfig& p = plan.placement;
  return {
      {"layout_version", plan.layout_version},
      {"profile", std::string(to_string(plan.profile))},
      {"total", plan.total()},
      {"width", plan.width},
      {"height", plan.height},
      {"master_seed", plan.master_seed},
      {"val_fraction", plan.val_fraction},
      {"rig",
       {{"camera_count", plan.rig.camera_count},
        {"hfov_deg", plan.rig.hfov_deg},
        {"position", to_json(plan.rig.position)},
        {"elevation_deg", plan.rig.elevation_deg}}},
      {"placement",
       {{"min_range", p.min_range},
        {"max_range", p.max_range},
        {"min_altitude", p.min_altitude},
        {"max_altitude", p.max_altitude},
        {"max_attempts", p.max_attempts},
        {"sequence_duration", p.sequence_duration},
        {"min_projected_extent", p.min_projected_extent},
        {"max_projected_area_fraction", p.max_projected_area_fraction}}},
      {"targets", std::move(targets)},
  };
}

}  // namespace

std::string_view to_string(Subset subset) {
  switch (subset) {
    case Subset::non_vfx:
      return "nonvfx";
    case Subset::vfx:
      return "vfx";
    case Subset::weather:
      return "weather";
  }
  return "?";
}

std::optional<Subset> parse_subset(std::string_view token) {
  for (Subset s : kAllSubsets) {
    if (to_string(s) == token) return s;
  }
  return std::nullopt;
}

std::string_view to_string(PlanProfile profile) {
  return profile == PlanProfile::custom ? "custom" : "reference_proportions";
}

std::optional<PlanProfile> parse_plan_profile(std::string_view name) {
  if (name == "reference_proportions") return PlanProfile::reference_proportions;
  if (name == "custom") return PlanProfile::custom;
  return std::nullopt;
}

void CompositionTarget::validate() const {
  if (count < 0) bad_target(*this, "count must be nonnegative");
  const bool clear = condition == WeatherCondition::clear;
  switch (subset) {
    case Subset::vfx:
      if (bucket != ContentBucket::vfx_drone) bad_target(*this, "vfx frames use bucket vfx_drone");
      if (!clear) bad_target(*this, "vfx frames are clear");
      break;
    case Subset::non_vfx:
      if (bucket == ContentBucket::vfx_drone) bad_target(*this, "vfx_drone is reserved for vfx");
      if (!clear) bad_target(*this, "nonvfx frames are clear");
      break;
    case Subset::weather:
      if (bucket == ContentBucket::vfx_drone) bad_target(*this, "vfx_drone is reserved for vfx");
      if (clear) bad_target(*this, "weather frames need fog, snow or other");
      break;
  }
  if (!scene_allowed(subset, scene)) bad_target(*this, "scene does not occur in this subset");
  if (severity_percent) {
    if (clear) bad_target(*this, "clear frames take no severity");
    if (*severity_percent <= 0 || *severity_percent > 100) {
      bad_target(*this, "severity_percent must lie in (0, 100]");
    }
  }
  if (snow_severity_percent) {
    if (condition != WeatherCondition::other) {
      bad_target(*this, "snow_severity_percent applies to 'other' only");
    }
    if (*snow_severity_percent <= 0 || *snow_severity_percent > 100) {
      bad_target(*this, "snow_severity_percent must lie in (0, 100]");
    }
  }
}

Rig RigConfig::build(int width, int height) const {
  return build_rig(camera_count, deg_to_rad(hfov_deg), width, height, position,
                   deg_to_rad(elevation_deg));
}

std::int64_t DatasetPlan::total() const {
  std::int64_t sum = 0;
  for (const auto& t : targets) sum += t.count;
  return sum;
}

DatasetPlan plan_dataset(std::int64_t total_images, PlanProfile profile,
                         std::span<const CompositionTarget> custom_targets) {
  if (total_images < 10) {
    throw Error(ErrorCode::invalid_targets, "total_images must be at least 10");
  }
  DatasetPlan plan;
  plan.profile = profile;

  if (profile == PlanProfile::custom) {
    if (custom_targets.empty()) throw Error(ErrorCode::invalid_targets, "no custom targets");
    for (const auto& t : custom_targets) {
      t.validate();
      plan.targets.push_back(t);
    }
    if (plan.total() != total_images) {
      throw Error(ErrorCode::invalid_targets,
                  "custom target counts sum to " + std::to_string(plan.total()) + ", expected " +
                      std::to_string(total_images));
    }
    return plan;
  }

  auto add = [&](Subset subset, ContentBucket bucket, std::size_t scene,
                 WeatherCondition condition, std::int64_t count) {
    if (count > 0) {
      CompositionTarget t;
      t.subset = subset;
      t.bucket = bucket;
      t.scene = kAllProfiles[scene];
      t.condition = condition;
      t.count = count;
      plan.targets.push_back(t);
    }
  };

  const auto subsets = largest_remainder(kSubsetTotals, total_images);

  const auto buckets = largest_remainder(kNonVfxBuckets, subsets[0]);
  const auto scenes = largest_remainder(kNonVfxScenes, subsets[0]);
  const auto non_vfx = controlled_round(buckets, scenes);
  for (std::size_t b = 0; b < kPlainBuckets.size(); ++b) {
    for (std::size_t s = 0; s < kAllProfiles.size(); ++s) {
      add(Subset::non_vfx, kPlainBuckets[b], s, WeatherCondition::clear, non_vfx[b][s]);
    }
  }

  const auto vfx = largest_remainder(kVfxScenes, subsets[1]);
  for (std::size_t s = 0; s < kAllProfiles.size(); ++s) {
    add(Subset::vfx, ContentBucket::vfx_drone, s, WeatherCondition::clear, vfx[s]);
  }

  std::vector<std::int64_t> cell_weights;
  for (const auto& row : kWeatherCells) cell_weights.insert(cell_weights.end(), row.begin(), row.end());
  const auto cells = largest_remainder(cell_weights, subsets[2]);
  for (std::size_t c = 0; c < kWeatherConditions.size(); ++c) {
    for (std::size_t b = 0; b < kPlainBuckets.size(); ++b) {
      std::vector<std::int64_t> weights(non_vfx[b].begin(), non_vfx[b].end());
      if (std::all_of(weights.begin(), weights.end(), [](std::int64_t w) { return w == 0; })) {
        weights.assign(kNonVfxScenes.begin(), kNonVfxScenes.end());
      }
      const auto split = largest_remainder(weights, cells[c * 3 + b]);
      for (std::size_t s = 0; s < kAllProfiles.size(); ++s) {
        add(Subset::weather, kPlainBuckets[b], s, kWeatherConditions[c], split[s]);
      }
    }
  }
  return plan;
}

std::vector<FrameJob> schedule_frames(const DatasetPlan& plan) {
  if (plan.rig.camera_count < 1) throw Error(ErrorCode::invalid_targets, "rig has no cameras");
  std::vector<FrameJob> jobs;
  jobs.reserve(static_cast<std::size_t>(plan.total()));
  for (const auto& t : plan.targets) {
    for (std::int64_t k = 0; k < t.count; ++k) {
      FrameJob job;
      job.index = jobs.size();
      job.subset = t.subset;
      job.bucket = t.bucket;
      job.scene = t.scene;
      job.frame_seed = mix_seed(plan.master_seed, job.index);
      job.scene_seed = stream_seed(job.frame_seed, "scene");
      job.camera = static_cast<int>(job.index % static_cast<std::size_t>(plan.rig.camera_count));

      Rng level(job.frame_seed, "weather-level");
      auto draw = [&level](const auto& grid, std::optional<int> fixed) {
        return fixed ? *fixed : grid[level.below(grid.size())];
      };
      switch (t.condition) {
        case WeatherCondition::clear:
          break;
        case WeatherCondition::fog:
          job.fog_percent = draw(kFogGridPercent, t.severity_percent);
          break;
        case WeatherCondition::snow:
          job.snow_percent = draw(kSnowGridPercent, t.severity_percent);
          break;
        case WeatherCondition::other:
          job.fog_percent = draw(kFogGridPercent, t.severity_percent);
          job.snow_percent = draw(kSnowGridPercent, t.snow_severity_percent);
          break;
      }
      job.weather.condition = t.condition;
      if (t.condition == WeatherCondition::snow) {
        job.weather.severity = job.snow_percent / 100.0;
      } else if (t.condition != WeatherCondition::clear) {
        job.weather.severity = job.fog_percent / 100.0;
      }
      if (t.condition == WeatherCondition::other) job.weather.snow_severity = job.snow_percent / 100.0;
      jobs.push_back(std::move(job));
    }
  }

  std::map<std::pair<ContentBucket, ProfileId>, std::vector<std::size_t>> clear_frames;
  for (const auto& job : jobs) {
    if (job.subset == Subset::non_vfx) clear_frames[{job.bucket, job.scene}].push_back(job.index);
  }
  std::map<std::pair<ContentBucket, ProfileId>, std::size_t> used;
  for (auto& job : jobs) {
    if (job.subset != Subset::weather) continue;
    const auto it = clear_frames.find({job.bucket, job.scene});
    if (it == clear_frames.end()) continue;
    const std::size_t k = used[{job.bucket, job.scene}]++;
    const FrameJob& partner = jobs[it->second[k % it->second.size()]];
    job.paired_with = partner.index;
    job.scene_seed = partner.scene_seed;
    job.camera = partner.camera;
  }

  for (auto& job : jobs) {
    job.basename = format_basename({job.scene, job.subset, job.weather.condition, job.fog_percent,
                                    job.snow_percent, job.index, job.camera});
  }
  return jobs;
}

GenerationContext::GenerationContext(DatasetPlan p)
    : plan(std::move(p)),
      rig(plan.rig.build(plan.width, plan.height)),
      library(build_asset_library(stream_seed(plan.master_seed, "library"))) {}

FrameProduct produce_frame(const GenerationContext& context, const FrameJob& job) {
  const CameraView& camera = context.rig[static_cast<std::size_t>(job.camera)];
  const EnvironmentProfile& base = environment_profile(job.scene);
  for (int attempt = 0; attempt < kMaxFrameAttempts; ++attempt) {
    const std::uint64_t seed =
        attempt == 0 ? job.scene_seed : mix_seed(job.scene_seed, static_cast<std::uint64_t>(attempt));
    const EnvironmentProfile env = randomize_environment(base, stream_seed(seed, "environment"));
    FrameProduct product;
    try {
      product.scene = sample_scene(job.bucket, env, job.weather, context.library, seed, camera,
                                   context.plan.placement);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::rejection_exhausted) throw;
      throw Error(ErrorCode::generation_failed, describe(job) + ": " + e.what());
    }
    product.frame = render_frame(product.scene, camera, context.library, &product.render_stats);
    product.annotation =
        annotate_segmap(product.frame.segmap, annotatable_classes(product.scene, context.library));
    if (!product.annotation.oversize.empty() || !bucket_satisfied(job.bucket, product.annotation)) {
      continue;
    }
    product.frame =
        apply_weather(product.frame, job.weather, stream_seed(job.frame_seed, "weather"));
    product.attempts = attempt + 1;
    return product;
  }
  throw Error(ErrorCode::generation_failed,
              describe(job) + ": no layout met the bucket and size band after " +
                  std::to_string(kMaxFrameAttempts) + " attempts");
}

DatasetSummary generate_dataset(const DatasetPlan& plan, const fs::path& output_dir, int workers,
                                const GenerateOptions& options) {
  if (workers < 1) throw Error(ErrorCode::out_of_range, "workers must be at least 1");
  const auto started = std::chrono::steady_clock::now();
  std::error_code ec;
  if (fs::exists(output_dir, ec) && !fs::is_empty(output_dir, ec)) {
    throw Error(ErrorCode::io, "output directory is not empty: " + output_dir.string());
  }
  for (Subset s : kAllSubsets) {
    const std::string token(to_string(s));
    fs::create_directories(output_dir / "images" / token, ec);
    fs::create_directories(output_dir / "labels" / token, ec);
    if (plan.write_masks) fs::create_directories(output_dir / "masks" / token, ec);
    if (plan.write_depth) fs::create_directories(output_dir / "depth" / token, ec);
  }
  fs::create_directories(output_dir / "meta", ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + output_dir.string() + ": " + ec.message());

  const GenerationContext context(plan);
  const std::vector<FrameJob> jobs = schedule_frames(plan);
  std::vector<std::optional<FrameOutcome>> outcomes(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size() || failed.load()) return;
      try {
        outcomes[i] = run_job(context, jobs[i], output_dir);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const std::size_t pool_size =
      std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < pool_size; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  DatasetSummary summary;
  Json images = Json::array();
  for (auto& o : outcomes) {
    summary.add_image(o->key, o->boxes, o->records);
    if (options.log) {
      for (const auto& w : o->warnings) options.log(w);
    }
    images.push_back(std::move(o->entry));
  }

  try {
    const SplitListing split =
        split_dataset(output_dir, plan.val_fraction, stream_seed(plan.master_seed, "split"));
    summary.train_images = static_cast<std::int64_t>(split.train.size());
    summary.val_images = static_cast<std::int64_t>(split.val.size());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::empty_stratum) throw;
    if (options.log) options.log(std::string("split skipped: ") + e.what());
  }

  Json manifest;
  manifest["generator"] = "aerosynth";
  manifest["plan"] = plan_json(plan);
  manifest["rig"] = to_json(context.rig);
  manifest["summary"] = to_json(summary);
  manifest["images"] = std::move(images);
  write_text(output_dir / "meta" / "manifest.json", manifest.dump(1) + "\n");

  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return summary;
}

}  // namespace aerosynth
