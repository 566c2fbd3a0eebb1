#include "c2c/h5_io.hpp"

#include <hdf5.h>

#include "c2c/errors.hpp"

namespace c2c {

namespace {

struct Hid {
  hid_t id = H5I_INVALID_HID;
  herr_t (*closer)(hid_t) = nullptr;
  Hid(hid_t i, herr_t (*c)(hid_t)) : id(i), closer(c) {}
  ~Hid() {
    if (id >= 0 && closer) closer(id);
  }
  Hid(const Hid&) = delete;
  Hid& operator=(const Hid&) = delete;
  operator hid_t() const { return id; }
};

// Failed opens otherwise dump the library's error stack to stderr.
void quiet_errors() {
  static const bool done = [] {
    H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);
    return true;
  }();
  (void)done;
}

}  // namespace

void write_level_seg_h5(const std::filesystem::path& path, const std::string& model_id,
                        const TissueMasks& masks) {
  quiet_errors();
  Hid file(H5Fcreate(path.string().c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT), H5Fclose);
  if (file < 0) fail(Err::IoError, "h5: cannot create " + path.string());

  Hid gcpl(H5Pcreate(H5P_GROUP_CREATE), H5Pclose);
  H5Pset_obj_track_times(gcpl, false);
  Hid group(H5Gcreate2(file, model_id.c_str(), H5P_DEFAULT, gcpl, H5P_DEFAULT), H5Gclose);
  if (group < 0) fail(Err::IoError, "h5: cannot create group " + model_id);

  for (Tissue t : kTissues) {
    auto it = masks.find(t);
    if (it == masks.end()) fail(Err::EmptyMask, std::string("h5: missing ") + tissue_name(t));
    const auto& m = it->second;
    hsize_t dims[2] = {static_cast<hsize_t>(m.h), static_cast<hsize_t>(m.w)};
    Hid space(H5Screate_simple(2, dims, nullptr), H5Sclose);
    Hid dcpl(H5Pcreate(H5P_DATASET_CREATE), H5Pclose);
    H5Pset_obj_track_times(dcpl, false);
    Hid dset(H5Dcreate2(group, tissue_name(t), H5T_NATIVE_UINT8, space, H5P_DEFAULT, dcpl,
                        H5P_DEFAULT),
             H5Dclose);
    if (dset < 0) fail(Err::IoError, std::string("h5: cannot create dataset ") + tissue_name(t));
    if (H5Dwrite(dset, H5T_NATIVE_UINT8, H5S_ALL, H5S_ALL, H5P_DEFAULT, m.v.data()) < 0)
      fail(Err::IoError, std::string("h5: write failed for ") + tissue_name(t));
  }
}

TissueMasks read_level_seg_h5(const std::filesystem::path& path, const std::string& model_id) {
  quiet_errors();
  Hid file(H5Fopen(path.string().c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose);
  if (file < 0) fail(Err::IoError, "h5: cannot open " + path.string());
  Hid group(H5Gopen2(file, model_id.c_str(), H5P_DEFAULT), H5Gclose);
  if (group < 0) fail(Err::IoError, "h5: no group " + model_id);

  TissueMasks out;
  for (Tissue t : kTissues) {
    Hid dset(H5Dopen2(group, tissue_name(t), H5P_DEFAULT), H5Dclose);
    if (dset < 0) fail(Err::IoError, std::string("h5: no dataset ") + tissue_name(t));
    Hid space(H5Dget_space(dset), H5Sclose);
    hsize_t dims[2] = {0, 0};
    if (H5Sget_simple_extent_ndims(space) != 2)
      fail(Err::UnsupportedDatatype, "h5: dataset not 2D");
    H5Sget_simple_extent_dims(space, dims, nullptr);
    Array2<uint8_t> m(static_cast<int>(dims[1]), static_cast<int>(dims[0]));
    if (H5Dread(dset, H5T_NATIVE_UINT8, H5S_ALL, H5S_ALL, H5P_DEFAULT, m.v.data()) < 0)
      fail(Err::IoError, std::string("h5: read failed for ") + tissue_name(t));
    out[t] = std::move(m);
  }
  return out;
}

}  // namespace c2c
