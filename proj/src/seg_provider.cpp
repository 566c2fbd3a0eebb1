#include "c2c/seg_provider.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "c2c/errors.hpp"
#include "c2c/gz_io.hpp"
#include "c2c/nifti.hpp"

namespace c2c {

namespace {

std::string derive_series_dir_name(const SegmentationRequest& req) {
  if (!req.series_dir_name.empty()) return req.series_dir_name;
  if (req.volume && !req.volume->source_paths.empty()) {
    auto parent = req.volume->source_paths.front().parent_path();
    if (!parent.filename().empty()) return parent.filename().string();
  }
  fail(Err::MaskNotFound, "cannot derive series directory name for mask lookup");
}

std::string derive_slice_stem(const SegmentationRequest& req) {
  if (!req.slice_stem.empty()) return req.slice_stem;
  if (req.volume && !req.volume->source_paths.empty())
    return req.volume->source_paths.front().stem().string();
  fail(Err::MaskNotFound, "cannot derive slice stem for mask lookup");
}

// Relabels the raw mask through class_map; every nonzero label present must
// map, and no two present labels may share a name.
void apply_class_map(SegmentationMask& mask, const std::map<int, std::string>& class_map) {
  std::set<int16_t> present;
  for (int16_t v : mask.labels.v)
    if (v != 0) present.insert(v);

  std::set<std::string> seen_names;
  std::map<int, std::string> out_map;
  for (int16_t id : present) {
    auto it = class_map.find(id);
    if (it == class_map.end())
      fail(Err::UnknownLabel, "mask label " + std::to_string(id) + " not in class map");
    if (!seen_names.insert(it->second).second)
      fail(Err::UnknownLabel, "class map sends two present labels to '" + it->second + "'");
    out_map[id] = it->second;
  }
  mask.label_map = std::move(out_map);
}

SegmentationMask segment_mask_files(const SegmentationRequest& req, const ProviderConfig& cfg) {
  namespace fs = std::filesystem;
  const std::string series = derive_series_dir_name(req);
  fs::path mask_path;
  if (req.target == SegTarget::spine_3d) {
    mask_path = cfg.mask_root / series / "spine.nii.gz";
  } else {
    mask_path = cfg.mask_root / series / (derive_slice_stem(req) + "_tissue.nii.gz");
  }
  if (!fs::exists(mask_path)) fail(Err::MaskNotFound, mask_path.string());

  const auto class_map = cfg.class_map.empty()
                             ? (req.target == SegTarget::spine_3d ? default_spine_label_map()
                                                                  : default_tissue_label_map())
                             : cfg.class_map;

  SegmentationMask mask = load_nifti_mask(mask_path, {});
  const auto& v = *req.volume;
  if (mask.labels.nx != v.nx() || mask.labels.ny != v.ny() || mask.labels.nz != v.nz())
    fail(Err::ShapeMismatch, "mask " + std::to_string(mask.labels.nx) + "x" +
                                 std::to_string(mask.labels.ny) + "x" +
                                 std::to_string(mask.labels.nz) + " vs volume " +
                                 std::to_string(v.nx()) + "x" + std::to_string(v.ny()) + "x" +
                                 std::to_string(v.nz()) + " (" + mask_path.string() + ")");
  apply_class_map(mask, class_map);

  if (req.target == SegTarget::tissue_2d)
    for (const char* need : {"muscle", "vat", "sat"})
      if (std::none_of(class_map.begin(), class_map.end(),
                       [&](const auto& kv) { return kv.second == need; }))
        fail(Err::UnknownLabel, std::string("tissue class map lacks '") + need + "'");

  mask.spacing = v.spacing;
  return mask;
}

}  // namespace

SegmentationMask segment(const SegmentationRequest& req, const ProviderConfig& cfg) {
  if (!req.volume) fail(Err::UsageError, "segment: request has no volume");
  if (req.target == SegTarget::spine_3d && req.volume->nz() < 2)
    fail(Err::UsageError, "spine_3d request needs >= 2 slices");
  if (req.target == SegTarget::tissue_2d && req.volume->nz() != 1)
    fail(Err::UsageError, "tissue_2d request takes a single axial slice");

  switch (cfg.kind) {
    case ProviderKind::mask_files:
      return segment_mask_files(req, cfg);
    case ProviderKind::onnx_runtime:
      // The optional runtime is not part of this build; the provider slot
      // exists so configs referencing it fail loudly instead of silently.
      fail(Err::RuntimeUnavailable, "onnx runtime backend not compiled into this build");
  }
  fail(Err::UsageError, "unknown provider kind");
}

std::vector<ProviderStatus> available_providers(const std::filesystem::path& model_path) {
  std::vector<ProviderStatus> out;
  out.push_back({"mask_files", true, ""});

  ProviderStatus onnx{"onnx_runtime", false, "runtime not compiled into this build"};
  if (!model_path.empty() && !std::filesystem::exists(model_path))
    onnx.reason = "model file not found: " + model_path.string();
  out.push_back(onnx);
  return out;
}

ModelManifest parse_model_manifest_text(const std::string& text) {
  ModelManifest m;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(Err::UnparseableFile, "manifest line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    try {
      if (key == "input_rows")
        m.input_rows = std::stoi(val);
      else if (key == "input_cols")
        m.input_cols = std::stoi(val);
      else if (key == "hu_low")
        m.hu_low = std::stod(val);
      else if (key == "hu_high")
        m.hu_high = std::stod(val);
      else if (key.rfind("channel.", 0) == 0)
        m.channels[std::stoi(key.substr(8))] = val;
      else
        fail(Err::UnparseableFile, "manifest line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(Err::UnparseableFile, "manifest line " + std::to_string(lineno) + ": bad value '" + val + "'");
    }
  }
  if (m.input_rows <= 0 || m.input_cols <= 0)
    fail(Err::UnparseableFile, "manifest: input_rows/input_cols must be positive");
  if (m.hu_low >= m.hu_high) fail(Err::UnparseableFile, "manifest: hu_low must be < hu_high");
  if (m.channels.empty()) fail(Err::UnparseableFile, "manifest: no channels declared");
  return m;
}

ModelManifest load_model_manifest(const std::filesystem::path& file) {
  const auto bytes = read_file_bytes(file);
  return parse_model_manifest_text(std::string(bytes.begin(), bytes.end()));
}

}  // namespace c2c
