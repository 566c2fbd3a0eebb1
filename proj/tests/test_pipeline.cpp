#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "c2c/csv.hpp"
#include "c2c/errors.hpp"
#include "c2c/gz_io.hpp"
#include "c2c/h5_io.hpp"
#include "c2c/nifti.hpp"
#include "c2c/phantom.hpp"
#include "c2c/pipeline.hpp"
#include "c2c/validation.hpp"

namespace fs = std::filesystem;
using namespace c2c;

namespace {

fs::path temp_dir(const char* tag) {
  fs::path p = fs::temp_directory_path() / (std::string("c2c_pl_") + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

SpinePhantomSpec spine_spec() {
  SpinePhantomSpec sp;
  sp.nx = 96;
  sp.ny = 96;
  sp.nz = 60;
  sp.spacing = {1.0, 1.0, 1.5};
  PhantomLevel a;
  a.level = Level::L2;
  a.cx = 48;
  a.cy = 36;
  a.cz = 60.0;
  a.body_radius = 12;
  a.shell_thickness = 2;
  a.half_height = 9;
  a.trabecular_hu = 163;
  a.process_offset = 22;
  a.process_half_w = 4;
  a.process_half_d = 4;
  a.process_half_h = 8;
  PhantomLevel b = a;
  b.level = Level::L3;
  b.cz = 24.0;
  b.trabecular_hu = 149;
  sp.levels = {a, b};
  return sp;
}

SlicePhantomSpec slice_spec() {
  SlicePhantomSpec sl;
  sl.nx = 96;
  sl.ny = 96;
  sl.spacing = {1.0, 1.0, 1.0};
  sl.body_cx = 48;
  sl.body_cy = 78;
  sl.body_a = 30;
  sl.body_b = 15;
  sl.sat_thickness = 5;
  sl.muscle_thickness = 6;
  return sl;
}

void write_corpus(const fs::path& root, int n_series) {
  SeriesFixture fx = make_series_fixture(spine_spec(), slice_spec());
  for (int i = 0; i < n_series; ++i) {
    std::string name = "series_" + std::string(1, static_cast<char>('a' + i));
    write_series_fixture(fx, root / name, root / "masks", {});
  }
}

RunConfig base_config(const fs::path& input, const fs::path& outroot) {
  RunConfig cfg;
  cfg.input_path = input;
  cfg.output_root = outroot;
  cfg.provider.mask_root = input / "masks";
  cfg.series_file_threshold = 30;
  return cfg;
}

}  // namespace

TEST_CASE("pick_axial_index rounds to nearest, ties inferior") {
  CHECK(pick_axial_index(10.0, 100) == 10);
  CHECK(pick_axial_index(10.4, 100) == 10);
  CHECK(pick_axial_index(10.6, 100) == 11);
  CHECK(pick_axial_index(10.5, 100) == 10);  // exact tie -> inferior
  CHECK(pick_axial_index(-2.0, 100) == 0);
  CHECK(pick_axial_index(250.0, 100) == 99);
}

TEST_CASE("output root resolution: config beats env beats default") {
  RunConfig cfg;
  ::setenv("C2C_OUTPUT_ROOT", "/tmp/c2c_env_root", 1);
  cfg.output_root = "/tmp/explicit";
  CHECK(resolve_output_root(cfg) == fs::path("/tmp/explicit"));
  cfg.output_root.clear();
  CHECK(resolve_output_root(cfg) == fs::path("/tmp/c2c_env_root"));
  ::unsetenv("C2C_OUTPUT_ROOT");
  CHECK(resolve_output_root(cfg) == fs::path("outputs"));
}

TEST_CASE("run dir names follow the date-time format and dodge collisions") {
  auto root = temp_dir("rundir");
  fs::path a = create_run_dir(root);
  std::string name = a.filename().string();
  REQUIRE(name.size() == 19);
  CHECK(name[4] == '-');
  CHECK(name[7] == '-');
  CHECK(name[10] == '_');
  CHECK(name[13] == '-');
  CHECK(name[16] == '-');
  fs::path b = create_run_dir(root);  // same second -> suffix
  CHECK(a != b);
  CHECK(b.filename().string().substr(0, 19) == name);
  CHECK(b.filename().string().substr(19) == "-2");
}

TEST_CASE("metrics csv headers match the output contract") {
  CHECK(metrics_csv_header_3d() ==
        "level,dicom_path,spine_roi_hu,muscle_area_cm2,muscle_mean_hu,imat_area_cm2,"
        "imat_mean_hu,vat_area_cm2,vat_mean_hu,sat_area_cm2,sat_mean_hu\r\n");
  CHECK(metrics_csv_header_2d() ==
        "dicom_path,muscle_area_cm2,muscle_mean_hu,imat_area_cm2,imat_mean_hu,"
        "vat_area_cm2,vat_mean_hu,sat_area_cm2,sat_mean_hu\r\n");

  LevelMetricsRow row;
  row.level = Level::L3;
  row.dicom_path = "/x/y.dcm";
  row.spine_roi_hu = 150.0;
  for (Tissue t : kTissues) {
    TissueMetrics m;
    m.tissue = t;
    m.area_cm2 = 1.0;
    if (t != Tissue::imat) m.mean_hu = -5.0;
    row.tissue.push_back(m);
  }
  std::string text = metrics_csv_3d({row});
  CHECK(text == metrics_csv_header_3d() +
                    "L3,/x/y.dcm,150.000000,1.000000,-5.000000,1.000000,,1.000000,-5.000000,"
                    "1.000000,-5.000000\r\n");
}

TEST_CASE("tissue_masks_from splits labels and drops unnamed ones") {
  SegmentationMask m;
  m.labels.nx = 4;
  m.labels.ny = 1;
  m.labels.nz = 1;
  m.labels.v = {1, 2, 3, 9};
  m.label_map = {{1, "muscle"}, {2, "vat"}, {3, "sat"}, {9, "bone"}};
  TissueMasks masks = tissue_masks_from(m);
  CHECK(masks.count(Tissue::muscle) == 1);
  CHECK(masks.count(Tissue::imat) == 0);
  CHECK(masks.at(Tissue::muscle)(0, 0) == 1);
  CHECK(masks.at(Tissue::vat)(1, 0) == 1);
  CHECK(masks.at(Tissue::sat)(2, 0) == 1);
}

TEST_CASE("3d pipeline writes the full output tree per series") {
  auto root = temp_dir("p3_tree");
  auto outroot = temp_dir("p3_tree_out");
  write_corpus(root, 1);
  RunManifest mf = run_pipeline_3d(base_config(root, outroot));

  CHECK(mf.all_ok());
  REQUIRE(mf.records.size() == 1);
  const auto& rec = mf.records[0];
  CHECK(rec.subdir == "series_a");
  CHECK(rec.status == "ok-with-warnings");  // 4 levels absent from the phantom

  fs::path sdir = mf.run_path / "series_a";
  CHECK(fs::exists(sdir / "images" / "L2.png"));
  CHECK(fs::exists(sdir / "images" / "L3.png"));
  CHECK(fs::exists(sdir / "images" / "spine_sagittal.png"));
  CHECK(fs::exists(sdir / "images" / "spine_coronal.png"));
  CHECK(fs::exists(sdir / "segmentations" / "spine.nii.gz"));
  CHECK(fs::exists(sdir / "segmentations" / "L2_seg.h5"));
  CHECK(fs::exists(sdir / "segmentations" / "L3_seg.h5"));
  CHECK(fs::exists(sdir / "metrics" / "metrics.csv"));
  CHECK(fs::exists(mf.run_path / "run_manifest.json"));

  // emitted paths are run-dir relative and sorted
  CHECK(std::is_sorted(rec.emitted.begin(), rec.emitted.end()));
  for (const auto& p : rec.emitted) CHECK(fs::exists(mf.run_path / p));

  // csv: header + one row per analyzed level; trabecular HU recovered
  auto rows = parse_csv(std::string(
      reinterpret_cast<const char*>(read_file_bytes(sdir / "metrics" / "metrics.csv").data()),
      read_file_bytes(sdir / "metrics" / "metrics.csv").size()));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "L2");
  CHECK(rows[1][2] == "163.000000");
  CHECK(rows[2][0] == "L3");
  CHECK(rows[2][2] == "149.000000");
  // dicom_path points at the si-center slice of the series
  CHECK(rows[1][1].find("series_a") != std::string::npos);

  // h5 layout: group = model id, datasets per tissue
  TissueMasks h5 = read_level_seg_h5(sdir / "segmentations" / "L2_seg.h5", "stanford_v0.0.1");
  CHECK(h5.size() == 4);
}

TEST_CASE("per-series failures do not stop the run") {
  auto root = temp_dir("p3_fail");
  auto outroot = temp_dir("p3_fail_out");
  write_corpus(root, 2);
  // break series_b: delete its spine mask
  fs::remove(root / "masks" / "series_b" / "spine.nii.gz");

  RunManifest mf = run_pipeline_3d(base_config(root, outroot));
  REQUIRE(mf.records.size() == 2);
  CHECK(mf.records[0].status == "ok-with-warnings");
  CHECK(mf.records[1].status == "failed");
  CHECK(mf.records[1].reason.find("MaskNotFound") != std::string::npos);
  CHECK(!mf.all_ok());

  // the failed series still has its record and no partial csv is left behind
  CHECK(fs::exists(mf.run_path / "run_manifest.json"));
}

TEST_CASE("discovery gate: too-few-file series are not processed") {
  auto root = temp_dir("p3_gate");
  auto outroot = temp_dir("p3_gate_out");
  write_corpus(root, 1);
  RunConfig cfg = base_config(root, outroot);
  cfg.series_file_threshold = 300;  // 60 slices < default threshold
  RunManifest mf = run_pipeline_3d(cfg);
  CHECK(mf.records.empty());
  CHECK(!mf.all_ok());
}

TEST_CASE("2d pipeline: per-file outputs named by the dicom stem") {
  auto root = temp_dir("p2_files");
  auto outroot = temp_dir("p2_out");
  write_corpus(root, 1);
  // pick one slice as a standalone 2d input with its own mask naming
  fs::create_directories(root / "flat");
  fs::copy_file(root / "series_a" / "slice_0040.dcm", root / "flat" / "abcd.dcm");
  fs::create_directories(root / "masks" / "flat");
  fs::copy_file(root / "masks" / "series_a" / "slice_0040_tissue.nii.gz",
                root / "masks" / "flat" / "abcd_tissue.nii.gz");

  RunConfig cfg;
  cfg.mode = RunConfig::Mode::process_2d;
  cfg.input_path = root / "flat";
  cfg.output_root = outroot;
  cfg.provider.mask_root = root / "masks";
  RunManifest mf = run_pipeline_2d(cfg);

  CHECK(mf.all_ok());
  REQUIRE(mf.records.size() == 1);
  fs::path gdir = mf.run_path / "flat";
  CHECK(fs::exists(gdir / "images" / "abcd.png"));
  CHECK(fs::exists(gdir / "segmentations" / "abcd_seg.h5"));
  CHECK(fs::exists(gdir / "metrics" / "metrics.csv"));

  auto bytes = read_file_bytes(gdir / "metrics" / "metrics.csv");
  auto rows = parse_csv(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "dicom_path");
  CHECK(rows[1][0].find("abcd.dcm") != std::string::npos);
}

TEST_CASE("duplicate series basenames get numbered output subdirs") {
  auto root = temp_dir("p3_dup");
  auto outroot = temp_dir("p3_dup_out");
  SeriesFixture fx = make_series_fixture(spine_spec(), slice_spec());
  write_series_fixture(fx, root / "x" / "study", root / "masks", {});
  write_series_fixture(fx, root / "y" / "study", root / "masks", {});
  // both series share the mask key "study", so one mask dir serves both
  RunManifest mf = run_pipeline_3d(base_config(root, outroot));
  REQUIRE(mf.records.size() == 2);
  CHECK(mf.records[0].subdir == "study");
  CHECK(mf.records[1].subdir == "study-2");
  CHECK(fs::exists(mf.run_path / "study" / "metrics" / "metrics.csv"));
  CHECK(fs::exists(mf.run_path / "study-2" / "metrics" / "metrics.csv"));
}

TEST_CASE("compare_spine: identity is all zeros, shifts measure in mm") {
  SeriesFixture fx = make_series_fixture(spine_spec(), slice_spec());

  ValidationReport self = compare_spine(fx.spine_mask, fx.spine_mask, fx.volume);
  REQUIRE(self.levels.size() == 2);
  for (const auto& lc : self.levels) {
    CHECK(lc.vertical_center_error_mm == doctest::Approx(0.0));
    CHECK(lc.roi_hu_error == doctest::Approx(0.0));
  }
  CHECK(self.mean_vertical_error_mm == doctest::Approx(0.0));

  // +2 slice shift at sz=1.5 -> exactly 3.0 mm per level
  SegmentationMask shifted = fx.spine_mask;
  for (auto& v : shifted.labels.v) v = 0;
  for (int z = 0; z < fx.spine_mask.labels.nz - 2; ++z)
    for (int y = 0; y < fx.spine_mask.labels.ny; ++y)
      for (int x = 0; x < fx.spine_mask.labels.nx; ++x)
        shifted.labels(x, y, z + 2) = fx.spine_mask.labels(x, y, z);

  ValidationReport rep = compare_spine(shifted, fx.spine_mask, fx.volume);
  REQUIRE(rep.levels.size() == 2);
  for (const auto& lc : rep.levels)
    CHECK(lc.vertical_center_error_mm == doctest::Approx(3.0));
  CHECK(rep.mean_vertical_error_mm == doctest::Approx(3.0));
  CHECK(rep.median_vertical_error_mm == doctest::Approx(3.0));

  // a level present on one side only is an error
  SegmentationMask missing = fx.spine_mask;
  for (auto& v : missing.labels.v)
    if (v == level_label_id(Level::L3)) v = 0;
  CHECK_THROWS_AS(compare_spine(missing, fx.spine_mask, fx.volume), Error);
}

TEST_CASE("dice: unit cases and tissue comparison") {
  Array2<uint8_t> a(4, 4), b(4, 4);
  CHECK(dice(a, b) == doctest::Approx(1.0));  // both empty
  a(0, 0) = 1;
  CHECK(dice(a, b) == doctest::Approx(0.0));
  b(0, 0) = 1;
  CHECK(dice(a, b) == doctest::Approx(1.0));
  // half overlap: |a|=2, |b|=2, inter=1 -> 2*1/4
  a(1, 0) = 1;
  b(0, 1) = 1;
  CHECK(dice(a, b) == doctest::Approx(0.5));

  TissueMasks pa, pb;
  pa[Tissue::muscle] = a;
  pb[Tissue::muscle] = b;
  pb[Tissue::vat] = Array2<uint8_t>(4, 4);
  ValidationReport rep = compare_tissue(pa, pb);
  CHECK(rep.tissue_dice.at(Tissue::muscle) == doctest::Approx(0.5));
  CHECK(rep.tissue_dice.at(Tissue::vat) == doctest::Approx(0.0));  // one side only

  std::string csv = validation_report_csv(rep);
  CHECK(csv.find("tissue,muscle") != std::string::npos);
}

TEST_CASE("manifest json lists every record with status and emissions") {
  auto root = temp_dir("p3_json");
  auto outroot = temp_dir("p3_json_out");
  write_corpus(root, 1);
  RunManifest mf = run_pipeline_3d(base_config(root, outroot));
  auto bytes = read_file_bytes(mf.run_path / "run_manifest.json");
  std::string text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  CHECK(text.find("\"mode\": \"process_3d\"") != std::string::npos);
  CHECK(text.find("\"subdir\": \"series_a\"") != std::string::npos);
  CHECK(text.find("\"status\": \"ok-with-warnings\"") != std::string::npos);
  CHECK(text.find("L2_seg.h5") != std::string::npos);
}
