#include <gtest/gtest.h>

#include <algorithm>
#include <memory>
#include <set>
#include <sstream>

#include "aerosynth/annotation.hpp"
#include "aerosynth/dataset_builder.hpp"
#include "aerosynth/error.hpp"
#include "aerosynth/image_io.hpp"
#include "fake_dataset.hpp"
#include "test_support.hpp"

using namespace aerosynth;
using namespace testing_support;

namespace {

CompositionTarget target(Subset s, ContentBucket b, ProfileId p, WeatherCondition c, std::int64_t n) {
  CompositionTarget t;
  t.subset = s;
  t.bucket = b;
  t.scene = p;
  t.condition = c;
  t.count = n;
  return t;
}

DatasetPlan small_plan(std::uint64_t seed) {
  const std::vector<CompositionTarget> targets{
      target(Subset::non_vfx, ContentBucket::both, ProfileId::park, WeatherCondition::clear, 3),
      target(Subset::non_vfx, ContentBucket::drone_only, ProfileId::downtown, WeatherCondition::clear, 2),
      target(Subset::non_vfx, ContentBucket::bird_only, ProfileId::city_blocks, WeatherCondition::clear, 2),
      target(Subset::vfx, ContentBucket::vfx_drone, ProfileId::rural_terrain, WeatherCondition::clear, 2),
      target(Subset::vfx, ContentBucket::vfx_drone, ProfileId::urban_towers, WeatherCondition::clear, 1),
      target(Subset::weather, ContentBucket::both, ProfileId::park, WeatherCondition::fog, 2),
      target(Subset::weather, ContentBucket::both, ProfileId::park, WeatherCondition::snow, 1),
      target(Subset::weather, ContentBucket::drone_only, ProfileId::downtown, WeatherCondition::other, 1),
  };
  DatasetPlan plan = plan_dataset(14, PlanProfile::custom, targets);
  plan.width = 640;
  plan.height = 360;
  plan.master_seed = seed;
  plan.write_depth = true;
  return plan;
}

class Generated : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<TempDir>("gen");
    summary_ = generate_dataset(small_plan(5), dir_->path() / "ds", 1);
  }
  static void TearDownTestSuite() { dir_.reset(); }
  static fs::path root() { return dir_->path() / "ds"; }

  static std::unique_ptr<TempDir> dir_;
  static DatasetSummary summary_;
};

std::unique_ptr<TempDir> Generated::dir_;
DatasetSummary Generated::summary_;

}  // namespace

TEST_F(Generated, LayoutHasEveryArtifact) {
  const auto jobs = schedule_frames(small_plan(5));
  for (const auto& j : jobs) {
    const std::string s(to_string(j.subset));
    EXPECT_TRUE(fs::is_regular_file(root() / "images" / s / (j.basename + ".png"))) << j.basename;
    EXPECT_TRUE(fs::is_regular_file(root() / "labels" / s / (j.basename + ".txt")));
    EXPECT_TRUE(fs::is_regular_file(root() / "masks" / s / (j.basename + ".png")));
    EXPECT_EQ(fs::file_size(root() / "depth" / s / (j.basename + ".f32")), 640u * 360u * 4u);
    EXPECT_EQ(read_png_size(root() / "images" / s / (j.basename + ".png")), std::make_pair(640, 360));
  }
  EXPECT_TRUE(fs::is_regular_file(root() / "meta" / "manifest.json"));
  EXPECT_EQ(summary_.images, 14);
}

TEST_F(Generated, LabelsMatchBucketsAndBand) {
  for (const auto& e : scan_dataset(root())) {
    ASSERT_FALSE(e.records.empty()) << e.basename;
    bool drone = false, bird = false;
    for (const auto& r : e.records) {
      const PixelBox b = from_yolo(r, e.width, e.height);
      EXPECT_GE(b.max_side(), kMinBoxSide) << e.basename;
      EXPECT_LE(static_cast<double>(b.area()) / (e.width * e.height), kMaxBoxAreaFraction);
      (r.cls == ClassId::drone ? drone : bird) = true;
    }
    if (e.subset == Subset::vfx) {
      EXPECT_FALSE(bird) << e.basename;
      EXPECT_TRUE(drone);
    }
  }
  EXPECT_GE(summary_.min_box_side, kMinBoxSide);
}

TEST_F(Generated, StatsFromFilesEqualSummary) {
  const DatasetSummary from_disk = compute_stats(root());
  EXPECT_TRUE(from_disk.same_content(summary_));
  EXPECT_EQ(from_disk.bucket_count(Subset::non_vfx, ContentBucket::both), 3);
  EXPECT_EQ(from_disk.scene_count(Subset::vfx, ProfileId::rural_terrain), 2);
  EXPECT_EQ(from_disk.condition_count(WeatherCondition::fog), 2);
  EXPECT_EQ(from_disk.condition_count(WeatherCondition::other, ContentBucket::drone_only), 1);
  const auto manifest = Json::parse(read_file(root() / "meta" / "manifest.json"));
  EXPECT_TRUE(summary_from_json(manifest.at("summary")).same_content(summary_));
  EXPECT_EQ(manifest.at("images").size(), 14u);
}

TEST_F(Generated, ValidatorAcceptsFreshDataset) {
  const auto report = validate_dataset(root());
  for (const auto& p : report.problems) ADD_FAILURE() << p;
}

TEST_F(Generated, WeatherFramesReuseClearLabels) {
  const auto jobs = schedule_frames(small_plan(5));
  int paired = 0;
  for (const auto& j : jobs) {
    if (!j.paired_with) continue;
    ++paired;
    const FrameJob& p = jobs[*j.paired_with];
    auto path = [&](const char* dir, const FrameJob& f, const char* ext) {
      return root() / dir / std::string(to_string(f.subset)) / (f.basename + ext);
    };
    EXPECT_EQ(read_file(path("labels", j, ".txt")), read_file(path("labels", p, ".txt"))) << j.basename;
    EXPECT_EQ(read_file(path("masks", j, ".png")), read_file(path("masks", p, ".png")));
    EXPECT_NE(read_file(path("images", j, ".png")), read_file(path("images", p, ".png")));
  }
  EXPECT_EQ(paired, 4);
}

TEST_F(Generated, ValidatorFlagsDeletedLabelLine) {
  TempDir copy("gen_copy");
  fs::copy(root(), copy / "ds", fs::copy_options::recursive);
  fs::path victim;
  for (const auto& e : fs::directory_iterator(copy / "ds" / "labels" / "nonvfx")) {
    const std::string text = read_file(e.path());
    if (std::count(text.begin(), text.end(), '\n') >= 2) {
      victim = e.path();
      write_file(victim, text.substr(text.find('\n') + 1));
      break;
    }
  }
  ASSERT_FALSE(victim.empty());
  const auto report = validate_dataset(copy / "ds");
  ASSERT_FALSE(report.ok());
  const std::string name = victim.stem().string();
  EXPECT_TRUE(std::any_of(report.problems.begin(), report.problems.end(),
                          [&](const std::string& p) { return p.find(name) != std::string::npos; }));
}

TEST_F(Generated, ValidatorFlagsBirdInVfx) {
  TempDir copy("gen_bird");
  fs::copy(root(), copy / "ds", fs::copy_options::recursive);
  const auto it = fs::directory_iterator(copy / "ds" / "labels" / "vfx");
  const fs::path label = it->path();
  write_file(label, read_file(label) + "1 0.500000 0.500000 0.020000 0.030000\n");
  const auto report = validate_dataset(copy / "ds");
  EXPECT_FALSE(report.ok());
}

TEST(Generation, WorkerCountDoesNotChangeBytes) {
  TempDir dir("workers");
  DatasetPlan plan = plan_dataset(12, PlanProfile::reference_proportions);
  plan.width = 480;
  plan.height = 270;
  plan.master_seed = 99;
  generate_dataset(plan, dir / "one", 1);
  generate_dataset(plan, dir / "four", 4);
  EXPECT_EQ(tree_hash(dir / "one"), tree_hash(dir / "four"));
  EXPECT_EQ(tree_contents(dir / "one").size(), tree_contents(dir / "four").size());
}

TEST(Generation, RefusesNonEmptyOutput) {
  TempDir dir("nonempty");
  write_file(dir / "keep.txt", "x");
  try {
    generate_dataset(small_plan(1), dir.path(), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io);
  }
  EXPECT_EQ(read_file(dir / "keep.txt"), "x");
}

TEST(Generation, ProduceFrameIsDeterministic) {
  const DatasetPlan plan = small_plan(3);
  const GenerationContext context(plan);
  const auto jobs = schedule_frames(plan);
  const FrameProduct a = produce_frame(context, jobs[0]);
  const FrameProduct b = produce_frame(context, jobs[0]);
  EXPECT_EQ(a.frame, b.frame);
  EXPECT_EQ(records_of(a.annotation), records_of(b.annotation));
  EXPECT_GE(a.attempts, 1);
}

TEST(Split, ApportionsValidationByStratum) {
  TempDir dir("split");
  const DatasetPlan plan = plan_dataset(1000, PlanProfile::reference_proportions);
  write_fake_dataset(plan, dir.path());
  const SplitListing a = split_dataset(dir.path(), kDefaultValFraction, 7);
  EXPECT_EQ(a.val.size(), 122u);
  EXPECT_EQ(a.train.size(), 878u);

  std::set<std::string> all(a.train.begin(), a.train.end());
  for (const auto& v : a.val) EXPECT_TRUE(all.insert(v).second) << v;
  EXPECT_EQ(all.size(), 1000u);
  EXPECT_TRUE(std::is_sorted(a.train.begin(), a.train.end()));

  // Per-stratum validation counts follow an independent apportionment.
  const auto jobs = schedule_frames(plan);
  std::map<std::pair<Subset, ContentBucket>, long long> sizes, val;
  for (const auto& j : jobs) ++sizes[{j.subset, j.bucket}];
  for (const auto& v : a.val) {
    const auto parsed = parse_basename(fs::path(v).stem().string());
    ASSERT_TRUE(parsed);
    ++val[{parsed->subset, jobs[parsed->frame_index].bucket}];
  }
  std::vector<long long> weights;
  for (const auto& [k, n] : sizes) weights.push_back(n);
  const auto expect = hamilton(weights, 122);
  std::size_t i = 0;
  for (const auto& [k, n] : sizes) EXPECT_EQ(val[k], expect[i++]);

  EXPECT_FALSE(read_file(dir / "splits/val.txt").empty());
  const SplitListing again = split_dataset(dir.path(), kDefaultValFraction, 7);
  EXPECT_EQ(again.val, a.val);
  const SplitListing other = split_dataset(dir.path(), kDefaultValFraction, 8);
  EXPECT_NE(other.val, a.val);
  EXPECT_EQ(other.val.size(), 122u);
}

TEST(Split, EmptyStratumIsReported) {
  TempDir dir("split_empty");
  std::vector<CompositionTarget> targets{
      target(Subset::non_vfx, ContentBucket::drone_only, ProfileId::park, WeatherCondition::clear, 9),
      target(Subset::non_vfx, ContentBucket::bird_only, ProfileId::park, WeatherCondition::clear, 1)};
  write_fake_dataset(plan_dataset(10, PlanProfile::custom, targets), dir.path());
  try {
    split_dataset(dir.path(), 0.2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_stratum);
    EXPECT_NE(std::string(e.what()).find("bird_only"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(dir / "splits"));
  EXPECT_THROW(split_dataset(dir.path(), 1.0, 1), Error);
}

TEST(Scan, RejectsUnrecognizedNames) {
  TempDir dir("scan");
  std::vector<CompositionTarget> targets{
      target(Subset::non_vfx, ContentBucket::drone_only, ProfileId::park, WeatherCondition::clear, 10)};
  write_fake_dataset(plan_dataset(10, PlanProfile::custom, targets), dir.path());
  EXPECT_EQ(scan_dataset(dir.path()).size(), 10u);
  write_png_rgb(dir / "images/nonvfx/bogus.png", Image<Rgb8>(4, 4));
  EXPECT_THROW(scan_dataset(dir.path()), Error);
}
