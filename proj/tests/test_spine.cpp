#include <doctest.h>

#include <algorithm>
#include <random>

#include "c2c/errors.hpp"
#include "c2c/spine.hpp"
#include "c2c/types.hpp"

using namespace c2c;

namespace {

CTVolume flat_volume(int nx, int ny, int nz, float hu = 0.0f, Spacing sp = {1.0, 1.0, 1.0}) {
  CTVolume v;
  v.hu.nx = nx;
  v.hu.ny = ny;
  v.hu.nz = nz;
  v.hu.v.assign(static_cast<size_t>(nx) * ny * nz, hu);
  v.spacing = sp;
  return v;
}

SegmentationMask empty_mask(int nx, int ny, int nz, Spacing sp = {1.0, 1.0, 1.0}) {
  SegmentationMask m;
  m.labels.nx = nx;
  m.labels.ny = ny;
  m.labels.nz = nz;
  m.labels.v.assign(static_cast<size_t>(nx) * ny * nz, 0);
  m.spacing = sp;
  m.label_map = default_spine_label_map();
  return m;
}

// Independent oracle: scan the whole volume and keep voxels inside the shape.
std::vector<IVec3> roi_oracle(const CTVolume& vol, IVec3 c, const RoiSpec& spec) {
  const double r = spec.diameter_mm / 2.0;
  std::vector<IVec3> out;
  for (int z = 0; z < vol.nz(); ++z)
    for (int y = 0; y < vol.ny(); ++y)
      for (int x = 0; x < vol.nx(); ++x) {
        const double dx = (x - c.x) * vol.spacing.x;
        const double dy = (y - c.y) * vol.spacing.y;
        const double dz = (z - c.z) * vol.spacing.z;
        bool in = spec.shape == RoiShape::sphere
                      ? dx * dx + dy * dy + dz * dz <= r * r
                      : std::abs(dx) <= r && std::abs(dy) <= r && std::abs(dz) <= r;
        if (in) out.push_back({x, y, z});
      }
  return out;
}

// True when the shape, centered at c, pokes past the volume bounds anywhere.
bool oracle_exceeds(const CTVolume& vol, IVec3 c, const RoiSpec& spec) {
  const double r = spec.diameter_mm / 2.0;
  auto axis_hits_edge = [&](int ci, int n, double s) {
    const int reach = static_cast<int>(std::floor(r / s));
    return ci - reach < 0 || ci + reach >= n;
  };
  if (spec.shape == RoiShape::cube)
    return axis_hits_edge(c.x, vol.nx(), vol.spacing.x) ||
           axis_hits_edge(c.y, vol.ny(), vol.spacing.y) ||
           axis_hits_edge(c.z, vol.nz(), vol.spacing.z);
  // sphere: check every candidate offset combination inside the ball
  const int rx = static_cast<int>(std::floor(r / vol.spacing.x));
  const int ry = static_cast<int>(std::floor(r / vol.spacing.y));
  const int rz = static_cast<int>(std::floor(r / vol.spacing.z));
  for (int dz = -rz; dz <= rz; ++dz)
    for (int dy = -ry; dy <= ry; ++dy)
      for (int dx = -rx; dx <= rx; ++dx) {
        const double px = dx * vol.spacing.x, py = dy * vol.spacing.y, pz = dz * vol.spacing.z;
        if (px * px + py * py + pz * pz > r * r) continue;
        const int x = c.x + dx, y = c.y + dy, z = c.z + dz;
        if (x < 0 || x >= vol.nx() || y < 0 || y >= vol.ny() || z < 0 || z >= vol.nz())
          return true;
      }
  return false;
}

}  // namespace

TEST_CASE("round_half_away matches its name on signed halves") {
  CHECK(round_half_away(2.5) == 3);
  CHECK(round_half_away(-2.5) == -3);
  CHECK(round_half_away(2.4) == 2);
  CHECK(round_half_away(-2.4) == -2);
  CHECK(round_half_away(0.5) == 1);
  CHECK(round_half_away(-0.5) == -1);
}

TEST_CASE("frozen roi voxel counts") {
  // d=10 mm sphere at 1 mm isotropic: 515 lattice points in a radius-5 ball
  CTVolume iso = flat_volume(32, 32, 32);
  RoiSpec sphere;
  CHECK(build_roi(iso, {16, 16, 16}, sphere).size() == 515);

  // same sphere with 2.5 mm slices: 81 + 2*61 + 2*1
  CTVolume aniso = flat_volume(32, 32, 32, 0.0f, {1.0, 1.0, 2.5});
  CHECK(build_roi(aniso, {16, 16, 16}, sphere).size() == 205);

  // d=10 mm cube at 1 mm isotropic: 11^3
  RoiSpec cube;
  cube.shape = RoiShape::cube;
  CHECK(build_roi(iso, {16, 16, 16}, cube).size() == 1331);
}

TEST_CASE("build_roi matches the brute-force oracle on random configurations") {
  std::mt19937 rng(20260818);
  std::uniform_real_distribution<double> usp(0.5, 3.0);
  std::uniform_real_distribution<double> udiam(4.0, 16.0);
  std::uniform_int_distribution<int> udim(18, 40);

  for (int trial = 0; trial < 50; ++trial) {
    Spacing sp{usp(rng), usp(rng), usp(rng)};
    CTVolume vol = flat_volume(udim(rng), udim(rng), udim(rng), 0.0f, sp);
    RoiSpec spec;
    spec.shape = (trial % 2 == 0) ? RoiShape::sphere : RoiShape::cube;
    spec.diameter_mm = udiam(rng);
    std::uniform_int_distribution<int> ux(0, vol.nx() - 1), uy(0, vol.ny() - 1),
        uz(0, vol.nz() - 1);
    IVec3 c{ux(rng), uy(rng), uz(rng)};

    if (oracle_exceeds(vol, c, spec)) {
      CHECK_THROWS_AS(build_roi(vol, c, spec), Error);
      continue;
    }
    auto got = build_roi(vol, c, spec);
    auto want = roi_oracle(vol, c, spec);
    std::sort(want.begin(), want.end());
    CHECK(got == want);

    // a sphere fits inside the cube of the same diameter
    RoiSpec cubed = spec;
    cubed.shape = RoiShape::cube;
    if (!oracle_exceeds(vol, c, cubed)) {
      auto cube_vox = build_roi(vol, c, cubed);
      RoiSpec sph = spec;
      sph.shape = RoiShape::sphere;
      auto sph_vox = build_roi(vol, c, sph);
      CHECK(std::includes(cube_vox.begin(), cube_vox.end(), sph_vox.begin(), sph_vox.end()));
    }
  }
}

TEST_CASE("roi boundary behavior: inclusive surface, no clamping") {
  CTVolume vol = flat_volume(21, 21, 21);
  RoiSpec spec;  // sphere d=10
  // center at 5: voxel x=0 is exactly 5 mm away -> included, still in bounds
  auto vox = build_roi(vol, {5, 10, 10}, spec);
  CHECK(std::find(vox.begin(), vox.end(), IVec3{0, 10, 10}) != vox.end());
  // center at 4: candidate x=-1 leaves the volume -> error, not clamp
  CHECK_THROWS_AS(build_roi(vol, {4, 10, 10}, spec), Error);
  try {
    build_roi(vol, {4, 10, 10}, spec);
  } catch (const Error& e) {
    CHECK(e.code() == Err::RoiExceedsVolume);
  }
  // center outside the volume entirely
  try {
    build_roi(vol, {-1, 10, 10}, spec);
  } catch (const Error& e) {
    CHECK(e.code() == Err::CenterOutOfBounds);
  }
}

TEST_CASE("roi statistic: median of even counts averages the middle pair") {
  CTVolume vol = flat_volume(8, 1, 1);
  for (int x = 0; x < 8; ++x) vol.hu(x, 0, 0) = static_cast<float>(x * 10);  // 0..70
  std::vector<IVec3> four = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};    // 0 10 20 30
  CHECK(roi_statistic(vol, four, RoiStat::median) == doctest::Approx(15.0));
  std::vector<IVec3> three = {{1, 0, 0}, {4, 0, 0}, {7, 0, 0}};  // 10 40 70
  CHECK(roi_statistic(vol, three, RoiStat::median) == doctest::Approx(40.0));
  CHECK(roi_statistic(vol, three, RoiStat::mean) == doctest::Approx(40.0));
  std::vector<IVec3> pair = {{0, 0, 0}, {7, 0, 0}};
  CHECK(roi_statistic(vol, pair, RoiStat::mean) == doctest::Approx(35.0));
}

TEST_CASE("rl center of mass rounds half away from zero") {
  auto m = empty_mask(10, 4, 4);
  // two voxels at x=2 and x=3 -> mean 2.5 -> rounds to 3
  m.labels(2, 1, 1) = 1;
  m.labels(3, 1, 1) = 1;
  CHECK(rl_center_of_mass(m, Level::T12) == 3);
  CHECK_THROWS_AS(rl_center_of_mass(m, Level::L5), Error);
}

TEST_CASE("vertebral body isolation keeps the anterior of the two largest") {
  // plane indexed (y, z); y grows posterior
  Array2<uint8_t> plane(20, 20);
  // anterior blob (y=2..6), 25 px
  for (int z = 4; z < 9; ++z)
    for (int y = 2; y < 7; ++y) plane(y, z) = 1;
  // posterior blob (y=12..16), 25 px: same size, should lose as posterior
  for (int z = 4; z < 9; ++z)
    for (int y = 12; y < 17; ++y) plane(y, z) = 1;
  // a third tiny blob, largest-2 selection must ignore it
  plane(18, 18) = 1;

  BodyIsolation iso = isolate_vertebral_body(plane);
  CHECK(!iso.single_component);
  long long area = 0;
  double cy = 0;
  for (int z = 0; z < 20; ++z)
    for (int y = 0; y < 20; ++y)
      if (iso.body(y, z)) {
        ++area;
        cy += y;
      }
  CHECK(area == 25);
  CHECK(cy / area == doctest::Approx(4.0));  // the anterior blob survived

  // single component passes through untouched
  Array2<uint8_t> lone(10, 10);
  lone(3, 3) = 1;
  lone(3, 4) = 1;
  BodyIsolation solo = isolate_vertebral_body(lone);
  CHECK(solo.single_component);
  CHECK(solo.body(3, 3) == 1);
  CHECK(solo.body(3, 4) == 1);

  CHECK_THROWS_AS(isolate_vertebral_body(Array2<uint8_t>(5, 5)), Error);
}

TEST_CASE("body_center_2d rounds the centroid half away from zero") {
  Array2<uint8_t> m(10, 10);
  m(2, 3) = 1;
  m(3, 4) = 1;  // centroid (2.5, 3.5) -> (3, 4)
  auto [cy, cz] = body_center_2d(m);
  CHECK(cy == 3);
  CHECK(cz == 4);
}

TEST_CASE("full level analysis on a synthetic vertebra") {
  const int nx = 64, ny = 64, nz = 40;
  CTVolume vol = flat_volume(nx, ny, nz, -800.0f);
  auto mask = empty_mask(nx, ny, nz);

  // L3 body: cylinder r=8 at (30, 25), z in [14, 26]; trabecular core r<=6 at 123 HU
  for (int z = 14; z <= 26; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        int d2 = (x - 30) * (x - 30) + (y - 25) * (y - 25);
        if (d2 <= 64) {
          mask.labels(x, y, z) = level_label_id(Level::L3);
          vol.hu(x, y, z) = d2 <= 36 ? 123.0f : 444.0f;
        }
      }
  // posterior process block, same label
  for (int z = 16; z <= 24; ++z)
    for (int y = 37; y <= 43; ++y)
      for (int x = 27; x <= 33; ++x) {
        mask.labels(x, y, z) = level_label_id(Level::L3);
        vol.hu(x, y, z) = 444.0f;
      }

  SpineAnalysis an = analyze_spine(vol, mask, RoiSpec{});
  REQUIRE(an.results.size() == 1);
  const auto& r = an.results[0];
  CHECK(r.level == Level::L3);
  CHECK(r.rl_center_index == 30);
  CHECK(r.body_center_yz.first == 25);
  CHECK(r.body_center_yz.second == 20);
  CHECK(r.roi_center == IVec3{30, 25, 20});
  CHECK(r.roi_voxels.size() == 515);
  CHECK(r.hu_statistic == doctest::Approx(123.0));
  CHECK(r.si_center_z == 20);
  CHECK(!r.single_component);
  CHECK(an.skipped.size() == 5);  // the other levels are absent

  // volume/mask grids must agree
  auto small = empty_mask(nx - 1, ny, nz);
  CHECK_THROWS_AS(analyze_spine(vol, small, RoiSpec{}), Error);
}

TEST_CASE("analysis records skips when the roi cannot be placed") {
  const int nx = 16, ny = 16, nz = 8;
  CTVolume vol = flat_volume(nx, ny, nz, 10.0f);
  auto mask = empty_mask(nx, ny, nz);
  // a tiny L1 island close to the volume edge: d=10 sphere cannot fit
  mask.labels(2, 2, 2) = level_label_id(Level::L1);
  SpineAnalysis an = analyze_spine(vol, mask, RoiSpec{});
  CHECK(an.results.empty());
  REQUIRE(an.skipped.size() == 6);
  bool found = false;
  for (const auto& s : an.skipped)
    if (s.level == Level::L1) {
      found = true;
      CHECK(s.reason.find("RoiExceedsVolume") != std::string::npos);
    }
  CHECK(found);
}

TEST_CASE("sagittal_level_slice extracts the (y,z) plane for one level") {
  auto mask = empty_mask(6, 5, 4);
  mask.labels(2, 1, 3) = level_label_id(Level::T12);
  mask.labels(2, 4, 0) = level_label_id(Level::T12);
  mask.labels(2, 2, 2) = level_label_id(Level::L1);  // other level, ignored
  mask.labels(3, 1, 1) = level_label_id(Level::T12);  // other plane, ignored
  Array2<uint8_t> plane = sagittal_level_slice(mask, Level::T12, 2);
  CHECK(plane.w == 5);  // y axis
  CHECK(plane.h == 4);  // z axis
  CHECK(plane(1, 3) == 1);
  CHECK(plane(4, 0) == 1);
  CHECK(plane(2, 2) == 0);
  CHECK(plane(1, 1) == 0);
}
