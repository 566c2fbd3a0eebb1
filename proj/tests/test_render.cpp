#include <doctest.h>

#include <cmath>
#include <random>

#include "c2c/cpr.hpp"
#include "c2c/errors.hpp"
#include "c2c/font.hpp"
#include "c2c/png_io.hpp"
#include "c2c/render.hpp"
#include "c2c/resample.hpp"
#include "c2c/types.hpp"

using namespace c2c;

namespace {

CTVolume ramp_volume(int nx, int ny, int nz, Spacing sp) {
  CTVolume v;
  v.hu.nx = nx;
  v.hu.ny = ny;
  v.hu.nz = nz;
  v.hu.v.resize(static_cast<size_t>(nx) * ny * nz);
  v.spacing = sp;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x)
        v.hu(x, y, z) = static_cast<float>(2.0 * x - 3.0 * y + 5.0 * z + 1.0);
  return v;
}

// Reference trilinear interpolation with edge clamping.
double trilinear_oracle(const Array3<float>& a, double x, double y, double z) {
  auto clampi = [](int v, int n) { return v < 0 ? 0 : (v >= n ? n - 1 : v); };
  int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y)),
      z0 = static_cast<int>(std::floor(z));
  double fx = x - x0, fy = y - y0, fz = z - z0;
  double acc = 0.0;
  for (int dz = 0; dz <= 1; ++dz)
    for (int dy = 0; dy <= 1; ++dy)
      for (int dx = 0; dx <= 1; ++dx) {
        double wgt = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy) * (dz ? fz : 1 - fz);
        acc += wgt * a(clampi(x0 + dx, a.nx), clampi(y0 + dy, a.ny), clampi(z0 + dz, a.nz));
      }
  return acc;
}

}  // namespace

TEST_CASE("resample_isotropic preserves a linear ramp within 1e-6") {
  CTVolume vol = ramp_volume(12, 10, 8, {2.0, 1.0, 1.5});
  CTVolume iso = resample_isotropic(vol);
  CHECK(iso.spacing.x == doctest::Approx(1.0));
  CHECK(iso.spacing.y == doctest::Approx(1.0));
  CHECK(iso.spacing.z == doctest::Approx(1.0));
  // new_n = floor((old_n-1)/ratio)+1: x ratio 0.5 -> 23, y stays 10, z -> 11
  CHECK(iso.nx() == 23);
  CHECK(iso.ny() == 10);
  CHECK(iso.nz() == 11);
  for (int z = 0; z < iso.nz(); ++z)
    for (int y = 0; y < iso.ny(); ++y)
      for (int x = 0; x < iso.nx(); ++x) {
        // physical mm position -> expected ramp value
        double mmx = x * iso.spacing.x, mmy = y * iso.spacing.y, mmz = z * iso.spacing.z;
        double want = 2.0 * (mmx / vol.spacing.x) - 3.0 * (mmy / vol.spacing.y) +
                      5.0 * (mmz / vol.spacing.z) + 1.0;
        CHECK(iso.hu(x, y, z) == doctest::Approx(want).epsilon(1e-6));
      }
}

TEST_CASE("already-isotropic volumes pass through untouched") {
  CTVolume vol = ramp_volume(6, 6, 6, {1.0, 1.0, 1.0});
  CTVolume iso = resample_isotropic(vol);
  CHECK(iso.hu.v == vol.hu.v);
}

TEST_CASE("trilinear_sample matches the oracle and clamps at edges") {
  CTVolume vol = ramp_volume(9, 7, 5, {1, 1, 1});
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> ux(-1.0, 9.5), uy(-1.0, 7.5), uz(-1.0, 5.5);
  for (int i = 0; i < 300; ++i) {
    double x = ux(rng), y = uy(rng), z = uz(rng);
    CHECK(trilinear_sample(vol.hu, x, y, z) ==
          doctest::Approx(trilinear_oracle(vol.hu, x, y, z)).epsilon(1e-6));
  }
}

TEST_CASE("cpr path: one row per slice, straight extension, dedupe") {
  std::vector<Vec3> centers = {{10, 12, 30}, {14, 16, 20}, {14, 16, 20}, {18, 20, 10}};
  CprPath path = build_cpr_path(centers, 40);
  REQUIRE(path.samples.size() == 40);
  // row 0 = z 39 (superior), constant x,y above the first center
  CHECK(path.samples[0].z == doctest::Approx(39.0));
  CHECK(path.samples[0].x == doctest::Approx(10.0));
  CHECK(path.samples[0].y == doctest::Approx(12.0));
  // at a control point exactly
  CHECK(path.samples[39 - 30].x == doctest::Approx(10.0));
  CHECK(path.samples[39 - 20].x == doctest::Approx(14.0));
  CHECK(path.samples[39 - 10].x == doctest::Approx(18.0));
  // halfway between z=20 and z=10 -> x=16
  CHECK(path.samples[39 - 15].x == doctest::Approx(16.0));
  // below the last center: constant again
  CHECK(path.samples[39].x == doctest::Approx(18.0));
  CHECK(path.samples[39].y == doctest::Approx(20.0));
  // z monotone decreasing top->bottom
  for (size_t i = 1; i < path.samples.size(); ++i)
    CHECK(path.samples[i].z < path.samples[i - 1].z);

  CHECK_THROWS_AS(build_cpr_path({{1, 1, 5}}, 10), Error);
  CHECK_THROWS_AS(build_cpr_path({{1, 1, 5}, {2, 2, 5}}, 10), Error);  // dedupe -> 1 center
}

TEST_CASE("straight-path cpr equals the orthogonal plane") {
  CTVolume vol = ramp_volume(16, 12, 20, {1, 1, 1});
  std::vector<Vec3> centers = {{8, 6, 15}, {8, 6, 5}};
  CprPath path = build_cpr_path(centers, 20);

  Array2<float> cor = sample_cpr(vol, path, CprPlane::coronal);
  CHECK(cor.w == 16);
  CHECK(cor.h == 20);
  for (int row = 0; row < 20; ++row)
    for (int x = 0; x < 16; ++x) {
      int z = 19 - row;
      CHECK(cor(x, row) == doctest::Approx(vol.hu(x, 6, z)).epsilon(1e-9));
    }

  Array2<float> sag = sample_cpr(vol, path, CprPlane::sagittal);
  CHECK(sag.w == 12);
  for (int row = 0; row < 20; ++row)
    for (int y = 0; y < 12; ++y) {
      int z = 19 - row;
      CHECK(sag(y, row) == doctest::Approx(vol.hu(8, y, z)).epsilon(1e-9));
    }
}

TEST_CASE("curved cpr pixels match per-pixel path sampling") {
  CTVolume vol = ramp_volume(24, 18, 30, {1, 1, 1});
  // bend the path
  std::vector<Vec3> centers = {{6, 4, 25}, {12, 9, 15}, {18, 14, 5}};
  CprPath path = build_cpr_path(centers, 30);
  Array2<float> img = sample_cpr(vol, path, CprPlane::coronal);

  std::mt19937 rng(7);
  std::uniform_int_distribution<int> ur(0, 29), uc(0, 23);
  for (int i = 0; i < 100; ++i) {
    int row = ur(rng), x = uc(rng);
    const Vec3& s = path.samples[row];
    CHECK(img(x, row) ==
          doctest::Approx(trilinear_oracle(vol.hu, x, s.y, s.z)).epsilon(1e-6));
  }
}

TEST_CASE("hu windowing clamps and quantizes") {
  // W=400 L=50 -> [-150, 250]
  CHECK(window_hu(-150.0, 400, 50) == 0);
  CHECK(window_hu(250.0, 400, 50) == 255);
  CHECK(window_hu(-1000.0, 400, 50) == 0);
  CHECK(window_hu(1000.0, 400, 50) == 255);
  CHECK(window_hu(50.0, 400, 50) == 128);  // (0.5 -> 127.5 -> rounds 128)
}

TEST_CASE("palette colors are fixed") {
  CHECK(tissue_color(Tissue::muscle) == RGB{255, 0, 0});
  CHECK(tissue_color(Tissue::imat) == RGB{0, 0, 255});
  CHECK(tissue_color(Tissue::vat) == RGB{0, 255, 0});
  CHECK(tissue_color(Tissue::sat) == RGB{255, 255, 0});
  CHECK(level_color(Level::T12) == RGB{255, 0, 255});
  CHECK(level_color(Level::L1) == RGB{0, 255, 255});
  CHECK(level_color(Level::L2) == RGB{255, 165, 0});
  CHECK(level_color(Level::L3) == RGB{255, 255, 0});
  CHECK(level_color(Level::L4) == RGB{0, 255, 0});
  CHECK(level_color(Level::L5) == RGB{255, 255, 255});
}

TEST_CASE("axial overlay blends masked pixels only") {
  const int w = 24, h = 24;
  Array2<float> hu(w, h);
  for (auto& v : hu.v) v = 50.0f;  // windows to 128 gray
  TissueMasks masks;
  Array2<uint8_t> vat(w, h);
  vat(5, 5) = 1;
  masks[Tissue::vat] = vat;

  OverlayStyle style;
  ImageRGB img = render_axial_overlay(hu, masks, {}, std::nullopt, style);
  REQUIRE(img.w == w);
  REQUIRE(img.h == h);
  // unmasked pixel: pure windowed gray
  const uint8_t* p = img.px(10, 10);
  CHECK(p[0] == 128);
  CHECK(p[1] == 128);
  CHECK(p[2] == 128);
  // masked pixel: round(0.5*128 + 0.5*color)
  const uint8_t* q = img.px(5, 5);
  CHECK(q[0] == 64);
  CHECK(q[1] == doctest::Approx(192).epsilon(0.01));
  CHECK(q[2] == 64);

  OverlayStyle bad;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(render_axial_overlay(hu, masks, {}, std::nullopt, bad), Error);

  // with a level: border pixels take the level color
  ImageRGB lv = render_axial_overlay(hu, masks, {}, Level::L5, style);
  const uint8_t* b = lv.px(0, 0);
  CHECK(b[0] == 255);
  CHECK(b[1] == 255);
  CHECK(b[2] == 255);
}

TEST_CASE("metrics lines formatting") {
  TissueMetrics m;
  m.tissue = Tissue::muscle;
  m.area_cm2 = 123.456;
  m.mean_hu = 45.67;
  m.pixel_count = 10;
  TissueMetrics e;
  e.tissue = Tissue::imat;
  e.area_cm2 = 0.0;
  e.pixel_count = 0;
  auto lines = format_metrics_lines({m, e});
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "muscle 123.46 cm2 45.7 HU");
  CHECK(lines[1] == "imat 0.00 cm2");
}

TEST_CASE("text rendering covers the charset and advances correctly") {
  CHECK(text_width("abc", 1) == 3 * 6 - 1);
  CHECK(text_width("abc", 2) == (3 * 6 - 1) * 2);
  ImageRGB img(60, 12);
  draw_text(img, 1, 2, "L3 -42.5 HU(%)", RGB{255, 0, 0}, 1);
  bool any = false;
  for (size_t i = 0; i < img.v.size(); i += 3) any |= img.v[i] != 0;
  CHECK(any);
}

TEST_CASE("cpr render carries annotations and survives png round trip") {
  CTVolume vol = ramp_volume(32, 24, 48, {1, 1, 1});
  std::vector<Vec3> centers = {{16, 12, 40}, {16, 12, 8}};
  CprPath path = build_cpr_path(centers, 48);
  CprAnnotation ann;
  ann.level = Level::L2;
  ann.roi_center = {16, 12, 24};
  ann.roi_radius_px = 5.0;
  ann.si_center_z = 24;
  ann.hu_statistic = 167.3;
  OverlayStyle style;
  ImageRGB img = render_cpr(vol, path, {ann}, style, CprPlane::coronal);
  CHECK(img.w == 32);
  CHECK(img.h == 48);
  // the dashed si line row holds L2 orange somewhere
  int row = 47 - 24;
  bool orange = false;
  for (int x = 0; x < img.w; ++x) {
    const uint8_t* p = img.px(x, row);
    orange |= (p[0] == 255 && p[1] == 165 && p[2] == 0);
  }
  CHECK(orange);
  CHECK(decode_png(encode_png(img)) == img);
}
