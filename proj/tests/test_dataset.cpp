#include "detbench/dataset.hpp"

#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "testutil.hpp"

using detbench::Region;
using testutil::TempDir;
using testutil::write_text;

namespace {

TEST(ManifestLoad, RoundTripThroughTaskList) {
  TempDir dir;
  std::vector<Eigen::Matrix3d> homs;
  for (int t = 2; t <= 6; ++t) homs.push_back(testutil::translation_h(t * 2.0, -t));
  const auto path = testutil::write_manifest(dir.path(), "toy",
                                             {{"graf", "viewpoint", 800, 640, homs}});

  const auto manifest = detbench::load_manifest(path);
  EXPECT_EQ(manifest.name, "toy");
  EXPECT_EQ(manifest.base_dir, dir.path());
  ASSERT_EQ(manifest.sequences.size(), 1u);
  EXPECT_EQ(manifest.sequences[0].id, "graf");
  EXPECT_EQ(manifest.sequences[0].nuisance, "viewpoint");
  EXPECT_EQ(manifest.image_count(), 6);
  EXPECT_EQ(manifest.pair_count(), 5);

  const auto tasks = detbench::load_tasks(manifest);
  ASSERT_EQ(tasks.size(), 5u);
  EXPECT_EQ(tasks[0].id, "graf/1-2");
  EXPECT_EQ(tasks[4].id, "graf/1-6");
  EXPECT_EQ(tasks[2].sequence, "graf");
  EXPECT_EQ(tasks[2].nuisance, "viewpoint");
  EXPECT_EQ(tasks[2].ref_image.id, "graf/1");
  EXPECT_EQ(tasks[2].target_image.id, "graf/4");
  EXPECT_EQ(tasks[2].ref_image.width, 800);
  EXPECT_EQ(tasks[2].target_image.height, 640);
  const Eigen::Vector2d mapped = tasks[2].ref_to_target.apply({10.0, 10.0});
  EXPECT_NEAR(mapped.x(), 18.0, 1e-12);
  EXPECT_NEAR(mapped.y(), 6.0, 1e-12);
}

TEST(ManifestLoad, StoredInverseDirectionIsNormalized) {
  TempDir dir;
  const Eigen::Matrix3d forward = testutil::translation_h(7.0, 3.0);
  const std::string hom_text = "1 0 -7\n0 1 -3\n0 0 1\n";  // target -> ref
  write_text(dir.path() / "s/H_1_2", hom_text);
  write_text(dir.path() / "manifest.json", R"({
    "schema": "detbench-manifest/1",
    "name": "inv",
    "sequences": [{
      "id": "s", "nuisance": "illumination",
      "images": [{"file": "s/1.ppm", "width": 100, "height": 100},
                 {"file": "s/2.ppm", "width": 100, "height": 100}],
      "homographies": [{"file": "s/H_1_2", "from": 1, "to": 2,
                        "direction": "target-to-ref"}]
    }]
  })");
  const auto tasks = detbench::load_tasks(detbench::load_manifest(dir.path() / "manifest.json"));
  ASSERT_EQ(tasks.size(), 1u);
  const Eigen::Vector2d mapped = tasks[0].ref_to_target.apply({1.0, 2.0});
  const Eigen::Vector2d expected = detbench::Homography(forward).apply({1.0, 2.0});
  EXPECT_NEAR(mapped.x(), expected.x(), 1e-9);
  EXPECT_NEAR(mapped.y(), expected.y(), 1e-9);
}

std::string manifest_with(const std::string& sequences_json) {
  return std::string(R"({"schema": "detbench-manifest/1", "name": "bad", "sequences": )") +
         sequences_json + "}";
}

TEST(ManifestLoad, RejectsMalformedManifests) {
  TempDir dir;
  const auto expect_invalid = [&](const std::string& text, const std::string& needle) {
    const auto path = dir.path() / "m.json";
    write_text(path, text);
    try {
      detbench::load_manifest(path);
      FAIL() << "expected rejection for: " << needle;
    } catch (const detbench::ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
          << "message was: " << e.what();
    }
  };

  expect_invalid(R"({"schema": "something-else/9", "sequences": []})", "schema");
  expect_invalid(manifest_with(R"([{"id": "s", "images": [], "homographies": []}])"), "images");
  expect_invalid(manifest_with(R"([{
      "id": "s",
      "images": [{"file": "a", "width": 0, "height": 10}],
      "homographies": []}])"),
                 "non-positive");
  expect_invalid(manifest_with(R"([{
      "id": "s",
      "images": [{"file": "a", "width": 5, "height": 5},
                 {"file": "b", "width": 5, "height": 5}],
      "homographies": [{"file": "h", "from": 1, "to": 7}]}])"),
                 "references image 7 of 2");
  expect_invalid(manifest_with(R"([{
      "id": "s",
      "images": [{"file": "a", "width": 5, "height": 5},
                 {"file": "b", "width": 5, "height": 5},
                 {"file": "c", "width": 5, "height": 5}],
      "homographies": [{"file": "h", "from": 1, "to": 2},
                       {"file": "h2", "from": 1, "to": 2}]}])"),
                 "duplicate");
  expect_invalid(manifest_with(R"([{
      "id": "s",
      "images": [{"file": "a", "width": 5, "height": 5},
                 {"file": "b", "width": 5, "height": 5}],
      "homographies": [{"file": "h", "from": 2, "to": 2}]}])"),
                 "from = 1");
  expect_invalid(manifest_with(R"([{
      "id": "s",
      "images": [{"file": "a", "width": 5, "height": 5},
                 {"file": "b", "width": 5, "height": 5}],
      "homographies": [{"file": "h", "from": 1, "to": 2, "direction": "sideways"}]}])"),
                 "direction");
  expect_invalid(manifest_with(R"([{
      "id": "s",
      "images": [{"file": "a", "width": 5, "height": 5},
                 {"file": "b", "width": 5, "height": 5},
                 {"file": "c", "width": 5, "height": 5}],
      "homographies": [{"file": "h", "from": 1, "to": 2}]}])"),
                 "expected 2 homographies");

  const auto missing = dir.path() / "nope.json";
  EXPECT_THROW(detbench::load_manifest(missing), detbench::ParseError);
  write_text(dir.path() / "m.json", "{not json");
  EXPECT_THROW(detbench::load_manifest(dir.path() / "m.json"), detbench::ParseError);
}

TEST(HomographyFile, ParsesNineNumbers) {
  TempDir dir;
  write_text(dir.path() / "h_id", "1 0 0\n0 1 0\n0 0 1\n");
  const auto h = detbench::load_homography(dir.path() / "h_id");
  const Eigen::Vector2d p = h.apply({3.0, 4.0});
  EXPECT_EQ(p.x(), 3.0);
  EXPECT_EQ(p.y(), 4.0);

  // A homography is a projective object: a global scale changes nothing.
  write_text(dir.path() / "h_a", "0.9 0.08 12\n-0.05 1.05 -7\n0.0001 -0.0002 1\n");
  write_text(dir.path() / "h_b", "4.5 0.4 60\n-0.25 5.25 -35\n0.0005 -0.001 5\n");
  const auto ha = detbench::load_homography(dir.path() / "h_a");
  const auto hb = detbench::load_homography(dir.path() / "h_b");
  const Eigen::Vector2d pa = ha.apply({50.0, 60.0});
  const Eigen::Vector2d pb = hb.apply({50.0, 60.0});
  EXPECT_NEAR(pa.x(), pb.x(), 1e-9);
  EXPECT_NEAR(pa.y(), pb.y(), 1e-9);
}

TEST(HomographyFile, RejectsBadContents) {
  TempDir dir;
  write_text(dir.path() / "short", "1 0 0 0 1 0 0 0\n");
  EXPECT_THROW(detbench::load_homography(dir.path() / "short"), detbench::ParseError);

  write_text(dir.path() / "alpha", "1 0 0 0 x 0 0 0 1\n");
  try {
    detbench::load_homography(dir.path() / "alpha");
    FAIL() << "expected a parse error";
  } catch (const detbench::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
  }

  write_text(dir.path() / "rank2", "1 0 0\n0 1 0\n0 0 0\n");
  try {
    detbench::load_homography(dir.path() / "rank2");
    FAIL() << "expected a validation error";
  } catch (const detbench::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("singular"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("rank2"), std::string::npos);
  }

  EXPECT_THROW(detbench::load_homography(dir.path() / "absent"), detbench::ParseError);
}

TEST(DetectionFile, CanonicalFormatReadsShapeAndScore) {
  TempDir dir;
  write_text(dir.path() / "a.det",
             "detbench-det/1\n2\n100 50 0.01 0 0.01 7.5\n10 20 0.04 0.01 0.05 3\n");
  const auto regions = detbench::load_detections(dir.path() / "a.det");
  ASSERT_EQ(regions.size(), 2u);
  EXPECT_EQ(regions[0].center.x(), 100.0);
  EXPECT_EQ(regions[0].center.y(), 50.0);
  EXPECT_EQ(regions[0].score, 7.5);
  EXPECT_NEAR(detbench::area(regions[0]), M_PI * 100.0, 1e-9);       // circle of radius 10
  EXPECT_NEAR(detbench::excircle_radius(regions[0]), 10.0, 1e-12);
  EXPECT_EQ(regions[1].shape(0, 1), 0.01);
  EXPECT_EQ(regions[1].shape(1, 0), 0.01);

  write_text(dir.path() / "empty.det", "detbench-det/1\n0\n");
  EXPECT_TRUE(detbench::load_detections(dir.path() / "empty.det").empty());
}

TEST(DetectionFile, LegacyFiveColumnFormat) {
  TempDir dir;
  // No header: rows are "u v a b c" with M = [[a, b], [b, c]], strongest
  // first; ranks become the scores.
  write_text(dir.path() / "legacy.det", "10 20 0.25 0.1 0.5\n\n30 40 0.2 0 0.2\n");
  const auto regions = detbench::load_detections(dir.path() / "legacy.det");
  ASSERT_EQ(regions.size(), 2u);
  EXPECT_EQ(regions[0].center.x(), 10.0);
  EXPECT_EQ(regions[0].shape(0, 0), 0.25);
  EXPECT_EQ(regions[0].shape(0, 1), 0.1);
  EXPECT_EQ(regions[0].shape(1, 1), 0.5);
  EXPECT_EQ(regions[0].score, 2.0);
  EXPECT_EQ(regions[1].score, 1.0);
}

TEST(DetectionFile, WriteThenReadIsBitExact) {
  TempDir dir;
  std::mt19937_64 rng(2024);
  std::vector<Region> regions;
  for (int i = 0; i < 10000; ++i) regions.push_back(testutil::random_region(rng, 1000.0, 0.5, 40.0));
  const auto path = dir.path() / "rt.det";
  detbench::write_detections(path, regions);
  const auto loaded = detbench::load_detections(path);
  ASSERT_EQ(loaded.size(), regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    ASSERT_EQ(loaded[i].center.x(), regions[i].center.x()) << i;
    ASSERT_EQ(loaded[i].center.y(), regions[i].center.y()) << i;
    ASSERT_EQ(loaded[i].shape(0, 0), regions[i].shape(0, 0)) << i;
    ASSERT_EQ(loaded[i].shape(0, 1), regions[i].shape(0, 1)) << i;
    ASSERT_EQ(loaded[i].shape(1, 1), regions[i].shape(1, 1)) << i;
    ASSERT_EQ(loaded[i].score, regions[i].score) << i;
  }

  // Writing the same regions twice gives byte-identical files.
  const auto path2 = dir.path() / "rt2.det";
  detbench::write_detections(path2, regions);
  EXPECT_EQ(testutil::read_text(path), testutil::read_text(path2));
}

TEST(DetectionFile, RejectsDamagedFiles) {
  TempDir dir;
  write_text(dir.path() / "count.det", "detbench-det/1\n3\n1 1 0.1 0 0.1 5\n2 2 0.1 0 0.1 4\n");
  try {
    detbench::load_detections(dir.path() / "count.det");
    FAIL() << "expected a parse error";
  } catch (const detbench::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("declares 3"), std::string::npos);
  }

  write_text(dir.path() / "badnum.det", "detbench-det/1\n1\n1 1 0.1 zero 0.1 5\n");
  EXPECT_THROW(detbench::load_detections(dir.path() / "badnum.det"), detbench::ParseError);

  write_text(dir.path() / "fields.det", "detbench-det/1\n1\n1 1 0.1 0 0.1\n");
  EXPECT_THROW(detbench::load_detections(dir.path() / "fields.det"), detbench::ParseError);

  write_text(dir.path() / "garbage.det", "hello world\n");
  EXPECT_THROW(detbench::load_detections(dir.path() / "garbage.det"), detbench::ParseError);

  EXPECT_THROW(detbench::load_detections(dir.path() / "absent.det"), detbench::ParseError);

  // Bad count token: floats are not feature counts.
  write_text(dir.path() / "floatcount.det", "detbench-det/1\n2.5\n1 1 0.1 0 0.1 5\n");
  EXPECT_THROW(detbench::load_detections(dir.path() / "floatcount.det"), detbench::ParseError);
}

TEST(DetectionFile, ListsEveryNonSpdLine) {
  TempDir dir;
  write_text(dir.path() / "spd.det",
             "detbench-det/1\n3\n1 1 -0.1 0 0.1 3\n2 2 0.1 0 0.1 2\n3 3 0.1 0.5 0.1 1\n");
  try {
    detbench::load_detections(dir.path() / "spd.det");
    FAIL() << "expected rejection of non-SPD rows";
  } catch (const detbench::InvalidRegionError& e) {
    const std::string message = e.what();
    EXPECT_NE(message.find("lines 3 5"), std::string::npos) << "message was: " << message;
  }
}

TEST(ImageId, ComposesSequenceAndIndex) {
  EXPECT_EQ(detbench::image_id("graf", 3), "graf/3");
  EXPECT_EQ(detbench::image_id("v_wall", 1), "v_wall/1");
}

}  // namespace
