#include "c2c/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "c2c/dicom.hpp"
#include "c2c/errors.hpp"
#include "c2c/gz_io.hpp"
#include "c2c/nifti.hpp"
#include "c2c/phantom.hpp"
#include "c2c/pipeline.hpp"
#include "c2c/seg_provider.hpp"
#include "c2c/validation.hpp"

namespace c2c {

namespace {

struct PipelineArgs {
  std::string input_path;
  std::vector<std::string> positionals;
  std::string output_root;
  std::string roi_shape = "sphere";
  double roi_diameter_mm = 10.0;
  std::string stat = "median";
  std::string provider = "mask_files";
  std::string mask_root;
  std::string model = "stanford_v0.0.1";
  std::string spine_model = "totalsegmentator_spine";
  int workers = 1;
  std::string save_images = "on";
  int series_threshold = 300;
};

void add_pipeline_options(CLI::App* cmd, PipelineArgs& a) {
  cmd->add_option("--input-path", a.input_path, "Input folder");
  cmd->add_option("paths", a.positionals,
                  "Input folder (a literal INPUT_PATH token before it is accepted)");
  cmd->add_option("--output-root", a.output_root,
                  "Output root (default $C2C_OUTPUT_ROOT, then ./outputs)");
  cmd->add_option("--roi-shape", a.roi_shape, "sphere|cube")
      ->check(CLI::IsMember({"sphere", "cube"}));
  cmd->add_option("--roi-diameter-mm", a.roi_diameter_mm, "ROI diameter in mm")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--stat", a.stat, "median|mean")->check(CLI::IsMember({"median", "mean"}));
  cmd->add_option("--provider", a.provider, "mask_files|onnx")
      ->check(CLI::IsMember({"mask_files", "onnx"}));
  cmd->add_option("--mask-root", a.mask_root,
                  "Mask file root for the mask_files provider (default <input>/masks)");
  cmd->add_option("--model", a.model, "Tissue model id");
  cmd->add_option("--spine-model", a.spine_model, "Spine model id");
  cmd->add_option("--workers", a.workers, "Parallel series workers")->check(CLI::PositiveNumber);
  cmd->add_option("--save-images", a.save_images, "on|off")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--series-threshold", a.series_threshold,
                  "Minimum file count for a 3D-eligible series")
      ->check(CLI::NonNegativeNumber);
}

RunConfig to_config(const PipelineArgs& a, RunConfig::Mode mode) {
  RunConfig cfg;
  cfg.mode = mode;

  std::string input = a.input_path;
  for (const auto& p : a.positionals) {
    if (p == "INPUT_PATH") continue;  // the documented command style spells this token out
    if (input.empty())
      input = p;
    else if (p != input)
      fail(Err::UsageError, "conflicting input paths: '" + input + "' and '" + p + "'");
  }
  if (input.empty()) fail(Err::UsageError, "no input path given");
  cfg.input_path = input;

  cfg.output_root = a.output_root;
  cfg.roi.shape = a.roi_shape == "cube" ? RoiShape::cube : RoiShape::sphere;
  cfg.roi.diameter_mm = a.roi_diameter_mm;
  cfg.roi.statistic = a.stat == "mean" ? RoiStat::mean : RoiStat::median;
  cfg.provider.kind = a.provider == "onnx" ? ProviderKind::onnx_runtime : ProviderKind::mask_files;
  cfg.provider.mask_root =
      a.mask_root.empty() ? cfg.input_path / "masks" : std::filesystem::path(a.mask_root);
  cfg.workers = a.workers;
  cfg.tissue_model_id = a.model;
  cfg.spine_model_id = a.spine_model;
  cfg.save_images = a.save_images == "on";
  cfg.series_file_threshold = a.series_threshold;
  return cfg;
}

int finish(const RunManifest& m) {
  int ok = 0, failed = 0;
  for (const auto& r : m.records)
    (r.status == "failed" ? failed : ok)++;
  std::printf("run dir: %s\n", m.run_path.string().c_str());
  std::printf("processed: %d ok, %d failed, %zu total\n", ok, failed, m.records.size());
  return m.all_ok() ? 0 : 1;
}

int run_phantom(const std::string& spine_spec_path, const std::string& slice_spec_path,
                const std::string& out_dir, const std::string& mask_root, bool all_slices) {
  const auto spine_text = read_file_bytes(spine_spec_path);
  const auto slice_text = read_file_bytes(slice_spec_path);
  const auto spine_spec =
      parse_spine_phantom_spec(std::string(spine_text.begin(), spine_text.end()));
  const auto slice_spec =
      parse_slice_phantom_spec(std::string(slice_text.begin(), slice_text.end()));
  const SeriesFixture fx = make_series_fixture(spine_spec, slice_spec);

  std::vector<int> tissue_slices;
  if (!all_slices)
    for (const auto& t : fx.spine_truth)
      for (int dz = -1; dz <= 1; ++dz) {
        const int z = t.si_center_z + dz;
        if (z >= 0 && z < fx.volume.nz()) tissue_slices.push_back(z);
      }
  write_series_fixture(fx, out_dir, mask_root, tissue_slices);
  std::printf("wrote %d slices to %s\n", fx.volume.nz(), out_dir.c_str());
  for (const auto& t : fx.spine_truth)
    std::printf("truth %s trabecular_hu=%.6f si_center_z=%d rl_center_x=%d\n",
                level_name(t.level), t.trabecular_hu, t.si_center_z, t.rl_center_x);
  return 0;
}

int run_compare_spine(const std::string& pred_path, const std::string& ref_path,
                      const std::string& dicom_dir, int roi_px, const std::string& out_csv) {
  const CTVolume vol = load_dicom_series(dicom_dir);
  const SegmentationMask pred = load_nifti_mask(pred_path, default_spine_label_map());
  const SegmentationMask ref = load_nifti_mask(ref_path, default_spine_label_map());
  const ValidationReport rep = compare_spine(pred, ref, vol, roi_px);
  const std::string csv = validation_report_csv(rep);
  if (out_csv.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_file_bytes(out_csv, std::vector<uint8_t>(csv.begin(), csv.end()));
    std::printf("wrote %s\n", out_csv.c_str());
  }
  return 0;
}

int run_providers(const std::string& model_path) {
  for (const auto& p : available_providers(model_path)) {
    if (p.ready)
      std::printf("%s: ready\n", p.kind.c_str());
    else
      std::printf("%s: unavailable (%s)\n", p.kind.c_str(), p.reason.c_str());
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"CT body composition measures from abdominal series"};
  app.require_subcommand(0, 1);

  PipelineArgs args3d, args2d;
  CLI::App* p3 = app.add_subcommand("process_3d", "Run the series pipeline on DICOM series");
  add_pipeline_options(p3, args3d);
  CLI::App* p2 = app.add_subcommand("process_2d", "Run tissue analysis on individual slices");
  add_pipeline_options(p2, args2d);

  std::string ph_spine, ph_slice, ph_out, ph_mask_root;
  bool ph_all_slices = false;
  CLI::App* ph = app.add_subcommand("phantom", "Write a synthetic series plus provider masks");
  ph->add_option("--spine-spec", ph_spine, "Spine phantom spec file")->required();
  ph->add_option("--slice-spec", ph_slice, "Slice phantom spec file")->required();
  ph->add_option("--out", ph_out, "Series output directory")->required();
  ph->add_option("--mask-root", ph_mask_root, "Mask root directory")->required();
  ph->add_flag("--all-tissue-slices", ph_all_slices,
               "Write tissue masks for every slice, not just level centers");

  std::string cs_pred, cs_ref, cs_dicom, cs_out;
  int cs_roi_px = 10;
  CLI::App* cs = app.add_subcommand("compare-spine", "Compare two spine masks over one series");
  cs->add_option("--pred", cs_pred, "Predicted mask (nii/nii.gz)")->required();
  cs->add_option("--ref", cs_ref, "Reference mask (nii/nii.gz)")->required();
  cs->add_option("--dicom", cs_dicom, "DICOM series directory")->required();
  cs->add_option("--roi-px", cs_roi_px, "Cubic ROI side in voxels")->check(CLI::PositiveNumber);
  cs->add_option("--out", cs_out, "Report CSV path (stdout when omitted)");

  std::string pr_model;
  CLI::App* pr = app.add_subcommand("providers", "List segmentation provider readiness");
  pr->add_option("--model-path", pr_model, "Optional model file to probe");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (p3->parsed()) return finish(run_pipeline_3d(to_config(args3d, RunConfig::Mode::process_3d)));
    if (p2->parsed()) return finish(run_pipeline_2d(to_config(args2d, RunConfig::Mode::process_2d)));
    if (ph->parsed()) return run_phantom(ph_spine, ph_slice, ph_out, ph_mask_root, ph_all_slices);
    if (cs->parsed()) return run_compare_spine(cs_pred, cs_ref, cs_dicom, cs_roi_px, cs_out);
    if (pr->parsed()) return run_providers(pr_model);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == Err::UsageError || e.code() == Err::RootNotFound ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  std::fputs(app.help().c_str(), stderr);
  return 2;
}

}  // namespace c2c
