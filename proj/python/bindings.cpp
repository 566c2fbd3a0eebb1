#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "c2c/errors.hpp"
#include "c2c/types.hpp"
#include "c2c/spine.hpp"
#include "c2c/tissue.hpp"
#include "c2c/resample.hpp"
#include "c2c/phantom.hpp"
#include "c2c/validation.hpp"
#include "c2c/pipeline.hpp"
#include "c2c/nifti.hpp"

namespace py = pybind11;
using namespace c2c;

namespace {

Array3<float> hu_from_array(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 3) throw Error(Err::ShapeMismatch, "expected a 3-d array ordered (z, y, x)");
  Array3<float> out;
  out.nz = static_cast<int>(a.shape(0));
  out.ny = static_cast<int>(a.shape(1));
  out.nx = static_cast<int>(a.shape(2));
  out.v.assign(a.data(), a.data() + a.size());
  return out;
}

Array3<int16_t> labels_from_array(
    const py::array_t<int16_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 3) throw Error(Err::ShapeMismatch, "expected a 3-d array ordered (z, y, x)");
  Array3<int16_t> out;
  out.nz = static_cast<int>(a.shape(0));
  out.ny = static_cast<int>(a.shape(1));
  out.nx = static_cast<int>(a.shape(2));
  out.v.assign(a.data(), a.data() + a.size());
  return out;
}

Array2<uint8_t> mask_from_array(
    const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw Error(Err::ShapeMismatch, "expected a 2-d array ordered (y, x)");
  Array2<uint8_t> out;
  out.h = static_cast<int>(a.shape(0));
  out.w = static_cast<int>(a.shape(1));
  out.v.assign(a.data(), a.data() + a.size());
  return out;
}

py::array_t<uint8_t> mask_to_array(const Array2<uint8_t>& m) {
  py::array_t<uint8_t> out({m.h, m.w});
  std::copy(m.v.begin(), m.v.end(), out.mutable_data());
  return out;
}

Spacing spacing_from_tuple(const std::array<double, 3>& s) { return Spacing{s[0], s[1], s[2]}; }

RoiSpec roi_from_args(const std::string& shape, double diameter_mm, const std::string& statistic) {
  RoiSpec roi;
  if (shape == "sphere") roi.shape = RoiShape::sphere;
  else if (shape == "cube") roi.shape = RoiShape::cube;
  else throw Error(Err::UsageError, "roi_shape must be sphere or cube");
  roi.diameter_mm = diameter_mm;
  if (statistic == "median") roi.statistic = RoiStat::median;
  else if (statistic == "mean") roi.statistic = RoiStat::mean;
  else throw Error(Err::UsageError, "statistic must be median or mean");
  return roi;
}

py::dict metrics_dict(const std::vector<TissueMetrics>& rows) {
  py::dict d;
  for (const auto& m : rows) {
    py::dict e;
    e["area_cm2"] = m.area_cm2;
    e["pixel_count"] = static_cast<long long>(m.pixel_count);
    if (m.mean_hu) e["mean_hu"] = *m.mean_hu;
    else e["mean_hu"] = py::none();
    d[tissue_name(m.tissue)] = e;
  }
  return d;
}

RunConfig config_from_kwargs(RunConfig::Mode mode, const std::string& input,
                             const std::optional<std::string>& output_root,
                             const std::optional<std::string>& mask_root,
                             const std::string& roi_shape, double roi_diameter_mm,
                             const std::string& statistic, int workers, bool save_images) {
  RunConfig cfg;
  cfg.mode = mode;
  cfg.input_path = input;
  if (output_root) cfg.output_root = *output_root;
  cfg.roi = roi_from_args(roi_shape, roi_diameter_mm, statistic);
  cfg.provider.kind = ProviderKind::mask_files;
  cfg.provider.mask_root = mask_root ? std::filesystem::path(*mask_root)
                                     : std::filesystem::path(input) / "masks";
  cfg.workers = workers;
  cfg.save_images = save_images;
  return cfg;
}

py::dict manifest_dict(const RunManifest& m) {
  py::dict d;
  d["run_dir"] = m.run_dir;
  d["run_path"] = m.run_path.string();
  d["ok"] = m.all_ok();
  py::list recs;
  for (const auto& r : m.records) {
    py::dict e;
    e["input"] = r.input;
    e["subdir"] = r.subdir;
    e["status"] = r.status;
    e["reason"] = r.reason;
    e["warnings"] = r.warnings;
    e["emitted"] = r.emitted;
    recs.append(e);
  }
  d["series"] = recs;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CT body-composition analysis core";

  py::register_exception<Error>(m, "C2CError");

  m.def("spline_eval",
        [](const std::vector<double>& y, const std::vector<double>& xs) {
          return spline_eval_1d(y, xs);
        },
        py::arg("y"), py::arg("xs"),
        "Evaluate a not-a-knot cubic spline through y (uniform unit grid) at xs.");

  m.def("resample_volume",
        [](py::array_t<float, py::array::c_style | py::array::forcecast> hu,
           std::array<double, 3> spacing) {
          CTVolume vol;
          vol.hu = hu_from_array(hu);
          vol.spacing = spacing_from_tuple(spacing);
          CTVolume iso = resample_isotropic(vol);
          py::array_t<float> out({iso.hu.nz, iso.hu.ny, iso.hu.nx});
          std::copy(iso.hu.v.begin(), iso.hu.v.end(), out.mutable_data());
          return py::make_tuple(out, py::make_tuple(iso.spacing.x, iso.spacing.y, iso.spacing.z));
        },
        py::arg("hu"), py::arg("spacing"),
        "Resample a (z, y, x) HU volume to isotropic spacing; returns (volume, spacing).");

  m.def("analyze_spine",
        [](py::array_t<float, py::array::c_style | py::array::forcecast> hu,
           py::array_t<int16_t, py::array::c_style | py::array::forcecast> labels,
           std::array<double, 3> spacing, const std::string& roi_shape,
           double roi_diameter_mm, const std::string& statistic) {
          CTVolume vol;
          vol.hu = hu_from_array(hu);
          vol.spacing = spacing_from_tuple(spacing);
          SegmentationMask mask;
          mask.labels = labels_from_array(labels);
          mask.spacing = vol.spacing;
          mask.label_map = default_spine_label_map();
          SpineAnalysis an =
              analyze_spine(vol, mask, roi_from_args(roi_shape, roi_diameter_mm, statistic));
          py::dict d;
          py::list results;
          for (const auto& r : an.results) {
            py::dict e;
            e["level"] = level_name(r.level);
            e["rl_center_index"] = r.rl_center_index;
            e["roi_center"] = py::make_tuple(r.roi_center.x, r.roi_center.y, r.roi_center.z);
            e["roi_voxel_count"] = static_cast<int>(r.roi_voxels.size());
            e["hu"] = r.hu_statistic;
            e["si_center_z"] = r.si_center_z;
            e["single_component"] = r.single_component;
            results.append(e);
          }
          py::list skipped;
          for (const auto& s : an.skipped) {
            py::dict e;
            e["level"] = level_name(s.level);
            e["reason"] = s.reason;
            skipped.append(e);
          }
          d["results"] = results;
          d["skipped"] = skipped;
          return d;
        },
        py::arg("hu"), py::arg("labels"), py::arg("spacing"),
        py::arg("roi_shape") = "sphere", py::arg("roi_diameter_mm") = 10.0,
        py::arg("statistic") = "median",
        "Run trabecular-ROI analysis over a labeled spine volume.");

  m.def("process_slice",
        [](py::array_t<float, py::array::c_style | py::array::forcecast> hu,
           const std::map<std::string,
                          py::array_t<uint8_t, py::array::c_style | py::array::forcecast>>& masks,
           std::array<double, 2> pixel_spacing) {
          Array2<float> hu2;
          if (hu.ndim() != 2) throw Error(Err::ShapeMismatch, "expected a 2-d HU array");
          hu2.h = static_cast<int>(hu.shape(0));
          hu2.w = static_cast<int>(hu.shape(1));
          hu2.v.assign(hu.data(), hu.data() + hu.size());
          TissueMasks in;
          for (const auto& [name, arr] : masks) {
            auto t = tissue_from_name(name);
            if (!t) throw Error(Err::UnknownLabel, "unknown tissue name: " + name);
            in[*t] = mask_from_array(arr);
          }
          SliceResult res = process_slice(hu2, in, Spacing{pixel_spacing[0], pixel_spacing[1], 1.0},
                                          PostProcessConfig{});
          py::dict d;
          py::dict out_masks;
          for (const auto& [t, msk] : res.masks) out_masks[tissue_name(t)] = mask_to_array(msk);
          d["masks"] = out_masks;
          d["metrics"] = metrics_dict(res.metrics);
          return d;
        },
        py::arg("hu"), py::arg("masks"), py::arg("pixel_spacing"),
        "Post-process tissue masks for one axial slice and compute metrics.");

  m.def("run_3d",
        [](const std::string& input, std::optional<std::string> output_root,
           std::optional<std::string> mask_root, const std::string& roi_shape,
           double roi_diameter_mm, const std::string& statistic, int workers,
           bool save_images) {
          RunConfig cfg = config_from_kwargs(RunConfig::Mode::process_3d, input, output_root,
                                             mask_root, roi_shape, roi_diameter_mm, statistic,
                                             workers, save_images);
          return manifest_dict(run_pipeline_3d(cfg));
        },
        py::arg("input"), py::arg("output_root") = py::none(),
        py::arg("mask_root") = py::none(), py::arg("roi_shape") = "sphere",
        py::arg("roi_diameter_mm") = 10.0, py::arg("statistic") = "median",
        py::arg("workers") = 1, py::arg("save_images") = true,
        "Process every eligible DICOM series under input; returns the run manifest.");

  m.def("run_2d",
        [](const std::string& input, std::optional<std::string> output_root,
           std::optional<std::string> mask_root, int workers, bool save_images) {
          RunConfig cfg = config_from_kwargs(RunConfig::Mode::process_2d, input, output_root,
                                             mask_root, "sphere", 10.0, "median", workers,
                                             save_images);
          return manifest_dict(run_pipeline_2d(cfg));
        },
        py::arg("input"), py::arg("output_root") = py::none(),
        py::arg("mask_root") = py::none(), py::arg("workers") = 1,
        py::arg("save_images") = true,
        "Process standalone axial DICOM files under input; returns the run manifest.");

  m.def("write_phantom_fixture",
        [](const std::string& spine_spec_text, const std::string& slice_spec_text,
           const std::string& out_dir, std::optional<std::string> mask_root,
           bool all_tissue_slices) {
          SpinePhantomSpec sp = parse_spine_phantom_spec(spine_spec_text);
          SlicePhantomSpec sl = parse_slice_phantom_spec(slice_spec_text);
          SeriesFixture fx = make_series_fixture(sp, sl);
          std::vector<int> slices;
          if (!all_tissue_slices) {
            for (const auto& t : fx.spine_truth) {
              for (int dz = -1; dz <= 1; ++dz) {
                int z = t.si_center_z + dz;
                if (z >= 0 && z < fx.volume.nz()) slices.push_back(z);
              }
            }
          }
          std::filesystem::path out = out_dir;
          std::filesystem::path masks = mask_root ? std::filesystem::path(*mask_root)
                                                  : out.parent_path() / "masks";
          write_series_fixture(fx, out, masks, slices);
          py::dict d;
          d["series_dir"] = out.string();
          d["mask_root"] = masks.string();
          py::list truth;
          for (const auto& t : fx.spine_truth) {
            py::dict e;
            e["level"] = level_name(t.level);
            e["trabecular_hu"] = t.trabecular_hu;
            e["si_center_z"] = t.si_center_z;
            truth.append(e);
          }
          d["spine_truth"] = truth;
          return d;
        },
        py::arg("spine_spec"), py::arg("slice_spec"), py::arg("out_dir"),
        py::arg("mask_root") = py::none(), py::arg("all_tissue_slices") = false,
        "Generate a synthetic DICOM series plus masks from phantom spec text.");

  m.def("compare_spine_masks",
        [](const std::string& pred_path, const std::string& ref_path,
           std::array<double, 3> spacing, int roi_px) {
          SegmentationMask pred = load_nifti_mask(pred_path, default_spine_label_map());
          SegmentationMask ref = load_nifti_mask(ref_path, default_spine_label_map());
          CTVolume vol;
          vol.hu.nx = ref.labels.nx;
          vol.hu.ny = ref.labels.ny;
          vol.hu.nz = ref.labels.nz;
          vol.hu.v.assign(static_cast<size_t>(vol.hu.nx) * vol.hu.ny * vol.hu.nz, 0.0f);
          vol.spacing = spacing_from_tuple(spacing);
          ValidationReport rep = compare_spine(pred, ref, vol, roi_px);
          py::list rows;
          for (const auto& lc : rep.levels) {
            py::dict e;
            e["level"] = level_name(lc.level);
            e["vertical_center_error_mm"] = lc.vertical_center_error_mm;
            e["roi_hu_error"] = lc.roi_hu_error;
            e["roi_hu_pct_error"] = lc.roi_hu_pct_error;
            rows.append(e);
          }
          py::dict d;
          d["levels"] = rows;
          d["mean_vertical_center_error_mm"] = rep.mean_vertical_error_mm;
          d["median_vertical_center_error_mm"] = rep.median_vertical_error_mm;
          return d;
        },
        py::arg("pred"), py::arg("ref"), py::arg("spacing"), py::arg("roi_px") = 10,
        "Compare two spine segmentations (vertical center error per level).");
}
