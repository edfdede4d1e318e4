#include <gtest/gtest.h>

#include <algorithm>

#include "aerosynth/error.hpp"
#include "aerosynth/rng.hpp"
#include "aerosynth/scene_model.hpp"
#include "aerosynth/serialization.hpp"

using namespace aerosynth;

namespace {

const CameraView& camera() {
  static const Rig rig = build_rig(6, deg_to_rad(60.0), 1920, 1080, {0, 0, 1.8});
  return rig[0];
}

const AssetLibrary& library() {
  static const AssetLibrary lib = build_asset_library(0);
  return lib;
}

constexpr std::array<ContentBucket, 4> kBuckets{ContentBucket::drone_only, ContentBucket::bird_only,
                                                ContentBucket::both, ContentBucket::vfx_drone};

}  // namespace

TEST(AssetLibrary, CardinalitiesHoldForEverySeed) {
  for (std::uint64_t seed : {0ull, 1ull, 2ull, 99ull, 123456789ull}) {
    const AssetLibrary lib = build_asset_library(seed);
    ASSERT_EQ(lib.size(), 23u);
    const auto drones = std::count_if(lib.begin(), lib.end(),
                                      [](const AssetModel& a) { return a.cls == ClassId::drone; });
    const auto payload = std::count_if(lib.begin(), lib.end(), [](const AssetModel& a) {
      return a.payload != PayloadKind::none;
    });
    const auto birds = std::count_if(lib.begin(), lib.end(),
                                     [](const AssetModel& a) { return a.cls == ClassId::bird; });
    EXPECT_EQ(drones, 15);
    EXPECT_EQ(payload, 8);
    EXPECT_EQ(drones - payload, 7);
    EXPECT_EQ(birds, 8);
    for (const auto& a : lib) {
      if (a.cls == ClassId::bird) EXPECT_EQ(a.payload, PayloadKind::none) << a.asset_id;
      EXPECT_FALSE(a.mesh.empty()) << a.asset_id;
      EXPECT_LE(a.scale_range.min, 1.0);
      EXPECT_GE(a.scale_range.max, 1.0);
    }
  }
}

TEST(AssetLibrary, PayloadKindsAreAllRepresented) {
  const AssetLibrary& lib = library();
  for (PayloadKind k : {PayloadKind::box, PayloadKind::bag, PayloadKind::gun, PayloadKind::spray_kit}) {
    EXPECT_TRUE(std::any_of(lib.begin(), lib.end(), [k](const AssetModel& a) { return a.payload == k; }))
        << to_string(k);
  }
}

TEST(AssetLibrary, DeterministicPerSeed) {
  EXPECT_EQ(build_asset_library(0), build_asset_library(0));
  EXPECT_EQ(serialize(build_asset_library(0)), serialize(build_asset_library(0)));
}

TEST(AssetLibrary, SeedChangesAppearanceNotTopology) {
  const AssetLibrary a = build_asset_library(0);
  const AssetLibrary b = build_asset_library(1);
  EXPECT_EQ(topology_hash(a), topology_hash(b));
  EXPECT_NE(color_hash(a), color_hash(b));
  bool scale_differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mesh, b[i].mesh);
    scale_differs |= !(a[i].scale_range == b[i].scale_range);
  }
  EXPECT_TRUE(scale_differs);
}

TEST(AssetLibrary, PhysicalSizesArePlausible) {
  for (const auto& a : library()) {
    const double span = bounds(a.mesh).diagonal();
    if (a.cls == ClassId::drone) {
      EXPECT_GT(span, 0.2) << a.asset_id;
      EXPECT_LT(span, 3.0) << a.asset_id;
    } else {
      EXPECT_GT(span, 0.1) << a.asset_id;
      EXPECT_LT(span, 3.0) << a.asset_id;
    }
  }
}

TEST(EnvironmentProfile, NamesRoundTrip) {
  for (ProfileId id : kAllProfiles) {
    EXPECT_EQ(parse_profile(to_string(id)), id);
    EXPECT_EQ(environment_profile(id).id, id);
  }
  EXPECT_FALSE(parse_profile("moon_base"));
}

TEST(EnvironmentProfile, RuralHasNoDenseSkyline) {
  EXPECT_LT(environment_profile(ProfileId::rural_terrain).structure_density,
            environment_profile(ProfileId::urban_towers).structure_density);
  EXPECT_GT(environment_profile(ProfileId::rural_terrain).terrain_amplitude,
            environment_profile(ProfileId::downtown).terrain_amplitude);
}

TEST(EnvironmentProfile, RandomizationIsDeterministicAndKeepsIdentity) {
  const auto& base = environment_profile(ProfileId::park);
  const auto a = randomize_environment(base, 5);
  EXPECT_EQ(a, randomize_environment(base, 5));
  EXPECT_NE(a, randomize_environment(base, 6));
  EXPECT_EQ(a.id, base.id);
  EXPECT_EQ(a.structure_density, base.structure_density);
  EXPECT_GT(a.sun_elevation, 0.0);
}

TEST(WeatherParams, ValidationMatchesCondition) {
  EXPECT_NO_THROW(WeatherParams::clear().validate());
  EXPECT_NO_THROW((WeatherParams{WeatherCondition::fog, 0.06, 0.0}.validate()));
  EXPECT_NO_THROW((WeatherParams{WeatherCondition::other, 0.04, 0.25}.validate()));
  EXPECT_THROW((WeatherParams{WeatherCondition::fog, 1.5, 0.0}.validate()), Error);
  EXPECT_THROW((WeatherParams{WeatherCondition::other, 0.04, 0.0}.validate()), Error);
  EXPECT_THROW((WeatherParams{WeatherCondition::snow, 0.25, 0.1}.validate()), Error);
}

TEST(SampleScene, BucketContractHoldsForRandomSeeds) {
  Rng rng(77);
  const auto env = environment_profile(ProfileId::park);
  for (int trial = 0; trial < 1000; ++trial) {
    const ContentBucket bucket = kBuckets[rng.below(4)];
    const std::uint64_t seed = rng.next();
    const Scene scene = sample_scene(bucket, env, WeatherParams::clear(), library(), seed, camera());
    int drones = 0, birds = 0, particles = 0;
    for (const auto& inst : scene.instances) {
      if (inst.is_flock_particle()) {
        ++particles;
        EXPECT_FALSE(inst.annotatable);
        continue;
      }
      EXPECT_TRUE(inst.annotatable);
      (library()[*inst.asset_index].cls == ClassId::drone ? drones : birds) += 1;
    }
    switch (bucket) {
      case ContentBucket::drone_only:
        EXPECT_GE(drones, 1);
        EXPECT_EQ(birds, 0);
        EXPECT_EQ(particles, 0);
        break;
      case ContentBucket::bird_only:
        EXPECT_EQ(drones, 0);
        EXPECT_GE(birds, 1);
        EXPECT_EQ(particles, 0);
        break;
      case ContentBucket::both:
        EXPECT_GE(drones, 1);
        EXPECT_GE(birds, 1);
        break;
      case ContentBucket::vfx_drone:
        EXPECT_GE(drones, 1);
        EXPECT_EQ(birds, 0);
        EXPECT_GE(particles, kMinFlockSize);
        break;
    }
  }
}

TEST(SampleScene, InstancesHaveUniqueNonzeroIdsAndValidPoses) {
  const auto env = environment_profile(ProfileId::downtown);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Scene scene = sample_scene(ContentBucket::vfx_drone, env, WeatherParams::clear(),
                                     library(), seed, camera());
    std::vector<std::uint32_t> ids;
    for (const auto& inst : scene.instances) {
      EXPECT_NE(inst.instance_id, 0u);
      EXPECT_TRUE(inst.pose.valid());
      ids.push_back(inst.instance_id);
      const Pose p = pose_at(inst.trajectory, scene.time, scene.duration);
      EXPECT_LT(norm(p.position - inst.pose.position), 1e-9);
    }
    std::sort(ids.begin(), ids.end());
    EXPECT_EQ(std::adjacent_find(ids.begin(), ids.end()), ids.end());
  }
}

TEST(SampleScene, AnnotatableObjectsRespectAirspace) {
  const PlacementConfig cfg;
  const auto env = environment_profile(ProfileId::bridge_water);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Scene scene = sample_scene(ContentBucket::both, env, WeatherParams::clear(), library(),
                                     seed, camera());
    for (const auto& inst : scene.instances) {
      const double range = norm(inst.pose.position - camera().position());
      EXPECT_GE(range, cfg.min_range - 1.0);
      EXPECT_LE(range, cfg.max_range + 1.0);
      EXPECT_GE(inst.pose.position.z, cfg.min_altitude - 0.5);
      EXPECT_LE(inst.pose.position.z, cfg.max_altitude + 0.5);
    }
  }
}

TEST(SampleScene, SerializationIsAPureFunctionOfInputs) {
  const auto env = environment_profile(ProfileId::city_blocks);
  const WeatherParams fog{WeatherCondition::fog, 0.06, 0.0};
  const Scene a = sample_scene(ContentBucket::drone_only, env, fog, library(), 31, camera());
  const Scene b = sample_scene(ContentBucket::drone_only, env, fog, library(), 31, camera());
  EXPECT_EQ(serialize(a, library()), serialize(b, library()));
  const Scene c = sample_scene(ContentBucket::drone_only, env, fog, library(), 32, camera());
  EXPECT_NE(serialize(a, library()), serialize(c, library()));
}

TEST(SampleScene, WeatherDoesNotChangeLayout) {
  const auto env = environment_profile(ProfileId::park);
  const Scene clear =
      sample_scene(ContentBucket::both, env, WeatherParams::clear(), library(), 8, camera());
  const Scene snow = sample_scene(ContentBucket::both, env,
                                  WeatherParams{WeatherCondition::snow, 0.45, 0.0}, library(), 8,
                                  camera());
  EXPECT_EQ(clear.instances, snow.instances);
}

TEST(SampleScene, ImpossibleBandExhaustsRejection) {
  PlacementConfig cfg;
  cfg.min_projected_extent = 5000.0;
  cfg.max_attempts = 50;
  try {
    sample_scene(ContentBucket::drone_only, environment_profile(ProfileId::park),
                 WeatherParams::clear(), library(), 1, camera(), cfg);
    FAIL() << "expected REJECTION_EXHAUSTED";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::rejection_exhausted);
  }
}

TEST(SampleScene, ClassTableListsOnlyAnnotatableAssets) {
  const Scene scene = sample_scene(ContentBucket::vfx_drone, environment_profile(ProfileId::park),
                                   WeatherParams::clear(), library(), 4, camera());
  const auto table = annotatable_classes(scene, library());
  for (const auto& inst : scene.instances) {
    EXPECT_EQ(table.count(inst.instance_id) == 1, inst.annotatable);
  }
  for (const auto& [id, cls] : table) EXPECT_EQ(cls, ClassId::drone);
}
