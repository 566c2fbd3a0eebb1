#include "c2c/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <thread>

#include <json.hpp>

#include "c2c/cpr.hpp"
#include "c2c/csv.hpp"
#include "c2c/dicom.hpp"
#include "c2c/discovery.hpp"
#include "c2c/errors.hpp"
#include "c2c/gz_io.hpp"
#include "c2c/h5_io.hpp"
#include "c2c/nifti.hpp"
#include "c2c/png_io.hpp"
#include "c2c/render.hpp"
#include "c2c/resample.hpp"

namespace c2c {

namespace fs = std::filesystem;

std::filesystem::path resolve_output_root(const RunConfig& cfg) {
  if (!cfg.output_root.empty()) return cfg.output_root;
  if (const char* env = std::getenv("C2C_OUTPUT_ROOT"); env && *env) return fs::path(env);
  return fs::path("outputs");
}

std::filesystem::path create_run_dir(const std::filesystem::path& root) {
  fs::create_directories(root);
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  localtime_r(&now, &tm);
  char base[64];
  std::strftime(base, sizeof(base), "%Y-%m-%d_%H-%M-%S", &tm);

  for (int attempt = 1; attempt < 1000; ++attempt) {
    fs::path dir = root / (attempt == 1 ? std::string(base)
                                        : std::string(base) + "-" + std::to_string(attempt));
    std::error_code ec;
    if (fs::create_directory(dir, ec)) return dir;
    if (ec && ec != std::errc::file_exists)
      fail(Err::IoError, "cannot create run dir " + dir.string() + ": " + ec.message());
  }
  fail(Err::IoError, "run dir collision limit reached under " + root.string());
}

int pick_axial_index(double mean_z, int nz) {
  // nearest slice; a half-way tie goes to the lower (inferior) index
  int idx = static_cast<int>(std::ceil(mean_z - 0.5));
  return std::clamp(idx, 0, nz - 1);
}

std::string metrics_csv_header_3d() {
  std::vector<std::string> cols = {"level", "dicom_path", "spine_roi_hu"};
  for (Tissue t : kTissues) {
    cols.push_back(std::string(tissue_name(t)) + "_area_cm2");
    cols.push_back(std::string(tissue_name(t)) + "_mean_hu");
  }
  return csv_line(cols);
}

std::string metrics_csv_header_2d() {
  std::vector<std::string> cols = {"dicom_path"};
  for (Tissue t : kTissues) {
    cols.push_back(std::string(tissue_name(t)) + "_area_cm2");
    cols.push_back(std::string(tissue_name(t)) + "_mean_hu");
  }
  return csv_line(cols);
}

namespace {

std::vector<std::string> tissue_cells(const std::vector<TissueMetrics>& metrics) {
  std::vector<std::string> cells;
  for (Tissue t : kTissues) {
    const TissueMetrics* m = nullptr;
    for (const auto& x : metrics)
      if (x.tissue == t) m = &x;
    if (!m) {
      cells.push_back(csv_float(0.0));
      cells.push_back("");
      continue;
    }
    cells.push_back(csv_float(m->area_cm2));
    cells.push_back(m->mean_hu ? csv_float(*m->mean_hu) : "");
  }
  return cells;
}

}  // namespace

std::string metrics_csv_3d(const std::vector<LevelMetricsRow>& rows) {
  std::string out = metrics_csv_header_3d();
  for (const auto& r : rows) {
    std::vector<std::string> cells = {level_name(r.level), r.dicom_path,
                                      csv_float(r.spine_roi_hu)};
    for (auto& c : tissue_cells(r.tissue)) cells.push_back(std::move(c));
    out += csv_line(cells);
  }
  return out;
}

TissueMasks tissue_masks_from(const SegmentationMask& mask) {
  TissueMasks out;
  for (const auto& [id, name] : mask.label_map) {
    const auto t = tissue_from_name(name);
    if (!t) continue;  // bone and other channels are not consumed
    Array2<uint8_t> m(mask.nx(), mask.ny());
    for (int y = 0; y < mask.ny(); ++y)
      for (int x = 0; x < mask.nx(); ++x)
        m(x, y) = mask.labels(x, y, 0) == static_cast<int16_t>(id) ? 1 : 0;
    out[*t] = std::move(m);
  }
  return out;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::vector<uint8_t> bytes(text.begin(), text.end());
  write_file_bytes(path, bytes);
}

std::string error_string(const std::exception& e) { return e.what(); }

Array2<float> axial_slice_of(const CTVolume& vol, int z) {
  Array2<float> s(vol.nx(), vol.ny());
  for (int y = 0; y < vol.ny(); ++y)
    for (int x = 0; x < vol.nx(); ++x) s(x, y) = vol.hu(x, y, z);
  return s;
}

CTVolume single_slice_volume(const CTVolume& vol, int z) {
  CTVolume s;
  s.hu = Array3<float>(vol.nx(), vol.ny(), 1);
  for (int y = 0; y < vol.ny(); ++y)
    for (int x = 0; x < vol.nx(); ++x) s.hu(x, y, 0) = vol.hu(x, y, z);
  s.spacing = vol.spacing;
  s.origin = {vol.origin.x, vol.origin.y, vol.origin.z + z * vol.spacing.z};
  if (z < static_cast<int>(vol.source_paths.size()))
    s.source_paths = {vol.source_paths[static_cast<size_t>(z)]};
  return s;
}

// Per-series body of pipeline 1. Throws on series-fatal problems.
SeriesRecord process_series_3d(const fs::path& series_dir, const std::string& subdir,
                               const fs::path& run_path, const RunConfig& cfg) {
  SeriesRecord rec;
  rec.input = series_dir.string();
  rec.subdir = subdir;

  const fs::path out_dir = run_path / subdir;
  const fs::path images = out_dir / "images";
  const fs::path segmentations = out_dir / "segmentations";
  const fs::path metrics_dir = out_dir / "metrics";

  auto emit = [&](const fs::path& p) { rec.emitted.push_back(fs::relative(p, run_path).string()); };

  try {
    const CTVolume vol = load_dicom_series(series_dir);

    SegmentationRequest spine_req;
    spine_req.target = SegTarget::spine_3d;
    spine_req.volume = &vol;
    spine_req.model_id = cfg.spine_model_id;
    spine_req.series_dir_name = series_dir.filename().string();
    const SegmentationMask spine_mask = segment(spine_req, cfg.provider);

    const SpineAnalysis analysis = analyze_spine(vol, spine_mask, cfg.roi);
    for (const auto& s : analysis.skipped)
      rec.warnings.push_back(std::string(level_name(s.level)) + " skipped: " + s.reason);
    if (analysis.results.empty())
      fail(Err::EmptyMask, "no vertebral level produced a result");

    fs::create_directories(images);
    fs::create_directories(segmentations);
    fs::create_directories(metrics_dir);

    save_nifti_mask(segmentations / "spine.nii.gz", spine_mask, vol.origin);
    emit(segmentations / "spine.nii.gz");

    std::vector<LevelMetricsRow> rows;
    for (const auto& r : analysis.results) {
      const int z = pick_axial_index(r.si_mean_z, vol.nz());
      const fs::path slice_path = z < static_cast<int>(vol.source_paths.size())
                                      ? vol.source_paths[static_cast<size_t>(z)]
                                      : fs::path();
      try {
        CTVolume slice_vol = single_slice_volume(vol, z);
        SegmentationRequest treq;
        treq.target = SegTarget::tissue_2d;
        treq.volume = &slice_vol;
        treq.model_id = cfg.tissue_model_id;
        treq.series_dir_name = series_dir.filename().string();
        treq.slice_stem = slice_path.empty() ? std::string() : slice_path.stem().string();
        const SegmentationMask traw = segment(treq, cfg.provider);

        const Array2<float> hu2d = axial_slice_of(vol, z);
        const SliceResult sres = process_slice(hu2d, tissue_masks_from(traw), vol.spacing, cfg.post);

        const fs::path h5_path =
            segmentations / (std::string(level_name(r.level)) + "_seg.h5");
        write_level_seg_h5(h5_path, cfg.tissue_model_id, sres.masks);
        emit(h5_path);

        if (cfg.save_images) {
          const fs::path png_path = images / (std::string(level_name(r.level)) + ".png");
          write_png(png_path,
                    render_axial_overlay(hu2d, sres.masks, sres.metrics, r.level, {}));
          emit(png_path);
        }

        LevelMetricsRow row;
        row.level = r.level;
        row.dicom_path = slice_path.string();
        row.spine_roi_hu = r.hu_statistic;
        row.tissue = sres.metrics;
        rows.push_back(std::move(row));
      } catch (const std::exception& e) {
        rec.warnings.push_back(std::string(level_name(r.level)) +
                               " skipped: " + error_string(e));
      }
    }

    if (rows.empty()) fail(Err::EmptyMask, "tissue analysis failed on every level");

    write_text(metrics_dir / "metrics.csv", metrics_csv_3d(rows));
    emit(metrics_dir / "metrics.csv");

    if (cfg.save_images && analysis.results.size() >= 2) {
      const CTVolume iso = resample_isotropic(vol);
      const double kx = vol.spacing.x / iso.spacing.x;
      const double ky = vol.spacing.y / iso.spacing.y;
      const double kz = vol.spacing.z / iso.spacing.z;

      std::vector<Vec3> centers;
      std::vector<CprAnnotation> annos;
      for (const auto& r : analysis.results) {
        Vec3 c{r.roi_center.x * kx, r.roi_center.y * ky, r.roi_center.z * kz};
        centers.push_back(c);
        CprAnnotation a;
        a.level = r.level;
        a.roi_center = c;
        a.roi_radius_px = cfg.roi.diameter_mm / 2.0 / iso.spacing.x;
        a.shape = cfg.roi.shape;
        a.si_center_z = r.si_center_z * kz;
        a.hu_statistic = r.hu_statistic;
        annos.push_back(a);
      }
      const CprPath path = build_cpr_path(centers, iso.nz());
      write_png(images / "spine_sagittal.png",
                render_cpr(iso, path, annos, {}, CprPlane::sagittal));
      emit(images / "spine_sagittal.png");
      write_png(images / "spine_coronal.png",
                render_cpr(iso, path, annos, {}, CprPlane::coronal));
      emit(images / "spine_coronal.png");
    } else if (cfg.save_images) {
      rec.warnings.push_back("cpr skipped: fewer than two level results");
    }

    std::sort(rec.emitted.begin(), rec.emitted.end());
    rec.status = rec.warnings.empty() ? "ok" : "ok-with-warnings";
  } catch (const std::exception& e) {
    rec.status = "failed";
    rec.reason = error_string(e);
    std::fprintf(stderr, "[c2c] series %s failed: %s\n", series_dir.string().c_str(),
                 rec.reason.c_str());
  }
  return rec;
}

// Output subdirectory names: input basenames, deduplicated in input order.
std::vector<std::string> assign_subdirs(const std::vector<fs::path>& inputs) {
  std::vector<std::string> names;
  for (const auto& p : inputs) {
    std::string base = p.filename().string();
    if (base.empty()) base = "series";
    std::string name = base;
    int n = 2;
    while (std::find(names.begin(), names.end(), name) != names.end())
      name = base + "-" + std::to_string(n++);
    names.push_back(name);
  }
  return names;
}

template <typename Fn>
void run_workers(size_t jobs, int workers, Fn&& body) {
  if (workers <= 1 || jobs <= 1) {
    for (size_t i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto loop = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= jobs) break;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(workers, static_cast<int>(jobs));
  pool.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
}

}  // namespace

RunManifest run_pipeline_3d(const RunConfig& cfg) {
  if (cfg.workers < 1) fail(Err::UsageError, "workers must be >= 1");
  const auto series = discover_series(cfg.input_path, cfg.series_file_threshold);

  std::vector<fs::path> eligible;
  for (const auto& s : series)
    if (s.is_3d_eligible) eligible.push_back(s.directory);

  const fs::path root = resolve_output_root(cfg);
  const fs::path run_path = create_run_dir(root);

  RunManifest m;
  m.run_dir = run_path.filename().string();
  m.run_path = run_path;
  m.mode = "process_3d";

  const auto subdirs = assign_subdirs(eligible);
  m.records.resize(eligible.size());
  run_workers(eligible.size(), cfg.workers, [&](size_t i) {
    m.records[i] = process_series_3d(eligible[i], subdirs[i], run_path, cfg);
  });

  write_manifest_json(run_path / "run_manifest.json", m);
  return m;
}

RunManifest run_pipeline_2d(const RunConfig& cfg) {
  if (cfg.workers < 1) fail(Err::UsageError, "workers must be >= 1");
  const auto files = discover_dicom_files(cfg.input_path);

  const fs::path root = resolve_output_root(cfg);
  const fs::path run_path = create_run_dir(root);

  RunManifest m;
  m.run_dir = run_path.filename().string();
  m.run_path = run_path;
  m.mode = "process_2d";

  std::string group = cfg.input_path.filename().string();
  if (group.empty()) group = "slices";
  const fs::path out_dir = run_path / group;
  const fs::path images = out_dir / "images";
  const fs::path segmentations = out_dir / "segmentations";
  const fs::path metrics_dir = out_dir / "metrics";
  if (!files.empty()) {
    fs::create_directories(images);
    fs::create_directories(segmentations);
    fs::create_directories(metrics_dir);
  }

  // Output stems: file basenames, deduplicated in sorted input order.
  std::vector<std::string> stems;
  for (const auto& f : files) {
    std::string base = f.stem().string();
    std::string name = base;
    int n = 2;
    while (std::find(stems.begin(), stems.end(), name) != stems.end())
      name = base + "-" + std::to_string(n++);
    stems.push_back(name);
  }

  m.records.resize(files.size());
  std::vector<std::string> csv_rows(files.size());
  run_workers(files.size(), cfg.workers, [&](size_t i) {
    SeriesRecord rec;
    rec.input = files[i].string();
    rec.subdir = group;
    try {
      const CTVolume slice_vol = load_axial_dicom(files[i]);
      SegmentationRequest treq;
      treq.target = SegTarget::tissue_2d;
      treq.volume = &slice_vol;
      treq.model_id = cfg.tissue_model_id;
      treq.series_dir_name = files[i].parent_path().filename().string();
      treq.slice_stem = files[i].stem().string();
      const SegmentationMask traw = segment(treq, cfg.provider);

      Array2<float> hu2d(slice_vol.nx(), slice_vol.ny());
      for (int y = 0; y < slice_vol.ny(); ++y)
        for (int x = 0; x < slice_vol.nx(); ++x) hu2d(x, y) = slice_vol.hu(x, y, 0);

      const SliceResult sres =
          process_slice(hu2d, tissue_masks_from(traw), slice_vol.spacing, cfg.post);

      const fs::path h5_path = segmentations / (stems[i] + "_seg.h5");
      write_level_seg_h5(h5_path, cfg.tissue_model_id, sres.masks);
      rec.emitted.push_back(fs::relative(h5_path, run_path).string());

      if (cfg.save_images) {
        const fs::path png_path = images / (stems[i] + ".png");
        write_png(png_path,
                  render_axial_overlay(hu2d, sres.masks, sres.metrics, std::nullopt, {}));
        rec.emitted.push_back(fs::relative(png_path, run_path).string());
      }

      std::vector<std::string> cells = {files[i].string()};
      for (auto& c : tissue_cells(sres.metrics)) cells.push_back(std::move(c));
      csv_rows[i] = csv_line(cells);

      std::sort(rec.emitted.begin(), rec.emitted.end());
      rec.status = "ok";
    } catch (const std::exception& e) {
      rec.status = "failed";
      rec.reason = error_string(e);
      std::fprintf(stderr, "[c2c] slice %s failed: %s\n", files[i].string().c_str(),
                   rec.reason.c_str());
    }
    m.records[i] = std::move(rec);
  });

  if (!files.empty()) {
    std::string csv = metrics_csv_header_2d();
    for (const auto& row : csv_rows) csv += row;
    write_text(metrics_dir / "metrics.csv", csv);
    for (auto& rec : m.records)
      if (rec.status == "ok")
        rec.emitted.push_back(fs::relative(metrics_dir / "metrics.csv", run_path).string());
  }

  write_manifest_json(run_path / "run_manifest.json", m);
  return m;
}

void write_manifest_json(const std::filesystem::path& path, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["run_dir"] = m.run_dir;
  j["mode"] = m.mode;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : m.records) {
    nlohmann::ordered_json rec;
    rec["input"] = r.input;
    rec["subdir"] = r.subdir;
    rec["status"] = r.status;
    if (!r.reason.empty()) rec["reason"] = r.reason;
    rec["warnings"] = r.warnings;
    rec["emitted"] = r.emitted;
    j["records"].push_back(rec);
  }
  write_text(path, j.dump(2) + "\n");
}

}  // namespace c2c
