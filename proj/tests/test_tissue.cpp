#include <doctest.h>

#include <deque>
#include <random>

#include "c2c/errors.hpp"
#include "c2c/tissue.hpp"
#include "c2c/types.hpp"

using namespace c2c;

namespace {

// ---- naive reference implementations (kept deliberately independent) -------

// Flood fill from every border background pixel (4-connected); interior
// background regions below the threshold flip to foreground.
Array2<uint8_t> naive_fill_holes(const Array2<uint8_t>& mask, int max_px) {
  const int w = mask.w, h = mask.h;
  std::vector<int> region(static_cast<size_t>(w) * h, -1);
  int next = 0;
  std::vector<long long> area;
  std::vector<bool> border;
  for (int sy = 0; sy < h; ++sy)
    for (int sx = 0; sx < w; ++sx) {
      if (mask(sx, sy) || region[static_cast<size_t>(sy) * w + sx] != -1) continue;
      int id = next++;
      area.push_back(0);
      border.push_back(false);
      std::deque<std::pair<int, int>> q{{sx, sy}};
      region[static_cast<size_t>(sy) * w + sx] = id;
      while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop_front();
        ++area[id];
        if (x == 0 || y == 0 || x == w - 1 || y == h - 1) border[id] = true;
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          int nx2 = x + dx[k], ny2 = y + dy[k];
          if (nx2 < 0 || ny2 < 0 || nx2 >= w || ny2 >= h) continue;
          if (mask(nx2, ny2) || region[static_cast<size_t>(ny2) * w + nx2] != -1) continue;
          region[static_cast<size_t>(ny2) * w + nx2] = id;
          q.emplace_back(nx2, ny2);
        }
      }
    }
  Array2<uint8_t> out = mask;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int id = region[static_cast<size_t>(y) * w + x];
      if (id >= 0 && !border[id] && area[id] < max_px) out(x, y) = 1;
    }
  return out;
}

// 8-connected components of (muscle && in-window); >= min_px become imat.
void naive_relabel(const Array2<uint8_t>& muscle, const Array2<float>& hu, double lo, double hi,
                   int min_px, Array2<uint8_t>& out_muscle, Array2<uint8_t>& out_imat) {
  const int w = muscle.w, h = muscle.h;
  out_muscle = muscle;
  out_imat = Array2<uint8_t>(w, h);
  std::vector<int> comp(static_cast<size_t>(w) * h, -1);
  for (int sy = 0; sy < h; ++sy)
    for (int sx = 0; sx < w; ++sx) {
      auto cand = [&](int x, int y) {
        return muscle(x, y) && hu(x, y) > lo && hu(x, y) < hi;
      };
      if (!cand(sx, sy) || comp[static_cast<size_t>(sy) * w + sx] != -1) continue;
      std::vector<std::pair<int, int>> px;
      std::deque<std::pair<int, int>> q{{sx, sy}};
      comp[static_cast<size_t>(sy) * w + sx] = 1;
      while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop_front();
        px.emplace_back(x, y);
        for (int dy2 = -1; dy2 <= 1; ++dy2)
          for (int dx2 = -1; dx2 <= 1; ++dx2) {
            if (!dx2 && !dy2) continue;
            int nx2 = x + dx2, ny2 = y + dy2;
            if (nx2 < 0 || ny2 < 0 || nx2 >= w || ny2 >= h) continue;
            if (!cand(nx2, ny2) || comp[static_cast<size_t>(ny2) * w + nx2] != -1) continue;
            comp[static_cast<size_t>(ny2) * w + nx2] = 1;
            q.emplace_back(nx2, ny2);
          }
      }
      if (static_cast<int>(px.size()) >= min_px)
        for (auto [x, y] : px) {
          out_muscle(x, y) = 0;
          out_imat(x, y) = 1;
        }
    }
}

Array2<uint8_t> random_mask(std::mt19937& rng, int w, int h, double p) {
  std::bernoulli_distribution bit(p);
  Array2<uint8_t> m(w, h);
  for (auto& v : m.v) v = bit(rng) ? 1 : 0;
  return m;
}

}  // namespace

TEST_CASE("hole filling honors per-tissue thresholds") {
  PostProcessConfig cfg;
  // SAT: 14x14 hole (196 px < 200) fills; muscle: same hole (196 >= 20) stays
  Array2<uint8_t> m(32, 32);
  for (int y = 4; y < 28; ++y)
    for (int x = 4; x < 28; ++x) m(x, y) = 1;
  for (int y = 8; y < 22; ++y)
    for (int x = 8; x < 22; ++x) m(x, y) = 0;

  auto sat = fill_holes(m, Tissue::sat, cfg);
  long long sat_count = 0;
  for (auto v : sat.v) sat_count += v;
  CHECK(sat_count == 24 * 24);

  auto mus = fill_holes(m, Tissue::muscle, cfg);
  CHECK(mus.v == m.v);

  // a 16-px hole fills for muscle too (16 < 20)
  Array2<uint8_t> m2(16, 16);
  for (int y = 2; y < 14; ++y)
    for (int x = 2; x < 14; ++x) m2(x, y) = 1;
  for (int y = 6; y < 10; ++y)
    for (int x = 6; x < 10; ++x) m2(x, y) = 0;
  auto mus2 = fill_holes(m2, Tissue::muscle, cfg);
  long long c2 = 0;
  for (auto v : mus2.v) c2 += v;
  CHECK(c2 == 12 * 12);

  // background touching the border never fills, however small
  Array2<uint8_t> m3(8, 8);
  for (auto& v : m3.v) v = 1;
  m3(0, 0) = 0;
  auto f3 = fill_holes(m3, Tissue::sat, cfg);
  CHECK(f3(0, 0) == 0);
}

TEST_CASE("imat relabel uses the open hu interval and the size floor") {
  PostProcessConfig cfg;
  Array2<uint8_t> muscle(24, 8);
  Array2<float> hu(24, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 24; ++x) {
      muscle(x, y) = 1;
      hu(x, y) = 50.0f;
    }
  // 12-px in-window blob -> imat
  for (int x = 2; x < 8; ++x)
    for (int y = 2; y < 4; ++y) hu(x, y) = -100.0f;
  // 9-px in-window blob -> reverts (9 < 10)
  for (int x = 12; x < 15; ++x)
    for (int y = 2; y < 5; ++y) hu(x, y) = -100.0f;
  // boundary values are excluded: exactly -30 and -190 stay muscle
  hu(20, 2) = -30.0f;
  hu(20, 4) = -190.0f;

  ImatSplit split = relabel_imat(muscle, hu, cfg);
  long long imat_n = 0;
  for (auto v : split.imat.v) imat_n += v;
  CHECK(imat_n == 12);
  CHECK(split.imat(2, 2) == 1);
  CHECK(split.muscle(2, 2) == 0);
  CHECK(split.imat(12, 2) == 0);
  CHECK(split.muscle(12, 2) == 1);
  CHECK(split.imat(20, 2) == 0);
  CHECK(split.imat(20, 4) == 0);

  // partition: muscle' and imat tile the original muscle exactly
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 24; ++x) {
      CHECK(static_cast<int>(split.muscle(x, y)) + split.imat(x, y) ==
            static_cast<int>(muscle(x, y)));
    }
}

TEST_CASE("post-processing chain matches the naive reference on random slices") {
  std::mt19937 rng(99);
  PostProcessConfig cfg;
  std::uniform_real_distribution<float> uhu(-250.0f, 150.0f);

  for (int trial = 0; trial < 200; ++trial) {
    const int w = 64, h = 64;
    auto muscle = random_mask(rng, w, h, 0.55);
    Array2<float> hu(w, h);
    for (auto& v : hu.v) v = uhu(rng);

    auto filled = fill_holes(muscle, Tissue::muscle, cfg);
    CHECK(filled.v == naive_fill_holes(muscle, cfg.other_hole_max_px).v);

    ImatSplit split = relabel_imat(filled, hu, cfg);
    Array2<uint8_t> nm, ni;
    naive_relabel(filled, hu, cfg.imat_hu_low, cfg.imat_hu_high, cfg.imat_min_component_px, nm,
                  ni);
    CHECK(split.muscle.v == nm.v);
    CHECK(split.imat.v == ni.v);

    // every surviving imat component has >= 10 px, and the partition holds
    auto small = filter_small_components(split.imat, cfg.imat_min_component_px);
    CHECK(small.v == split.imat.v);
    for (size_t i = 0; i < filled.v.size(); ++i)
      CHECK(static_cast<int>(split.muscle.v[i]) + split.imat.v[i] ==
            static_cast<int>(filled.v[i]));

    // sat threshold variant
    auto sat = random_mask(rng, w, h, 0.7);
    CHECK(fill_holes(sat, Tissue::sat, cfg).v == naive_fill_holes(sat, cfg.sat_hole_max_px).v);
  }
}

TEST_CASE("metrics: exact areas, mean hu, empty handling") {
  Array2<float> hu(10, 10);
  for (auto& v : hu.v) v = -90.0f;
  TissueMasks masks;
  Array2<uint8_t> vat(10, 10);
  for (int x = 0; x < 6; ++x) vat(x, 0) = 1;
  masks[Tissue::vat] = vat;

  auto rows = compute_metrics(masks, hu, Spacing{0.7, 0.8, 1.0});
  REQUIRE(rows.size() == 4);  // one row per tissue, kTissues order
  CHECK(rows[0].tissue == Tissue::muscle);
  CHECK(rows[0].pixel_count == 0);
  CHECK(!rows[0].mean_hu.has_value());
  CHECK(rows[0].area_cm2 == 0.0);
  CHECK(rows[2].tissue == Tissue::vat);
  CHECK(rows[2].pixel_count == 6);
  CHECK(rows[2].area_cm2 == doctest::Approx(6 * 0.7 * 0.8 / 100.0).epsilon(1e-12));
  CHECK(rows[2].mean_hu.has_value());
  CHECK(*rows[2].mean_hu == doctest::Approx(-90.0));
}

TEST_CASE("overlapping input masks are rejected") {
  Array2<float> hu(4, 4);
  TissueMasks masks;
  Array2<uint8_t> a(4, 4), b(4, 4);
  a(1, 1) = 1;
  b(1, 1) = 1;
  masks[Tissue::muscle] = a;
  masks[Tissue::vat] = b;
  CHECK_THROWS_AS(compute_metrics(masks, hu, Spacing{}), Error);
  try {
    compute_metrics(masks, hu, Spacing{});
  } catch (const Error& e) {
    CHECK(e.code() == Err::MasksOverlap);
  }
}

TEST_CASE("process_slice: fills, relabels, and keeps tissues disjoint") {
  const int w = 64, h = 64;
  Array2<float> hu(w, h);
  for (auto& v : hu.v) v = -1000.0f;
  Array2<uint8_t> muscle(w, h), vat(w, h), sat(w, h);

  for (int y = 10; y < 30; ++y)
    for (int x = 10; x < 30; ++x) {
      muscle(x, y) = 1;
      hu(x, y) = 50.0f;
    }
  for (int y = 15; y < 17; ++y)
    for (int x = 12; x < 20; ++x) hu(x, y) = -100.0f;  // 16 px imat pocket
  for (int y = 22; y < 25; ++y)
    for (int x = 22; x < 25; ++x) {
      muscle(x, y) = 0;  // 9-px hole, fills (< 20)
      hu(x, y) = 77.0f;
    }
  for (int y = 40; y < 52; ++y)
    for (int x = 8; x < 20; ++x) {
      sat(x, y) = 1;
      hu(x, y) = -105.0f;
    }
  for (int y = 43; y < 49; ++y)
    for (int x = 10; x < 16; ++x) {
      sat(x, y) = 0;  // 36-px hole, fills (< 200)
      hu(x, y) = -33.0f;
    }
  for (int y = 40; y < 45; ++y)
    for (int x = 40; x < 48; ++x) {
      vat(x, y) = 1;
      hu(x, y) = -92.0f;
    }

  TissueMasks raw;
  raw[Tissue::muscle] = muscle;
  raw[Tissue::vat] = vat;
  raw[Tissue::sat] = sat;
  SliceResult res = process_slice(hu, raw, Spacing{2.0, 0.5, 1.0}, PostProcessConfig{});

  std::map<Tissue, const TissueMetrics*> by;
  for (const auto& m : res.metrics) by[m.tissue] = &m;
  CHECK(by[Tissue::muscle]->pixel_count == 384);
  CHECK(by[Tissue::muscle]->area_cm2 == doctest::Approx(384 * 2.0 * 0.5 / 100.0).epsilon(1e-12));
  CHECK(*by[Tissue::muscle]->mean_hu == doctest::Approx((375 * 50.0 + 9 * 77.0) / 384.0));
  CHECK(by[Tissue::imat]->pixel_count == 16);
  CHECK(*by[Tissue::imat]->mean_hu == doctest::Approx(-100.0));
  CHECK(by[Tissue::vat]->pixel_count == 40);
  CHECK(by[Tissue::sat]->pixel_count == 144);
  CHECK(*by[Tissue::sat]->mean_hu == doctest::Approx((108 * -105.0 + 36 * -33.0) / 144.0));

  // output masks stay pairwise disjoint
  for (size_t i = 0; i < hu.v.size(); ++i) {
    int cover = 0;
    for (const auto& [t, m] : res.masks) cover += m.v[i];
    CHECK(cover <= 1);
  }

  // the muscle compartment is preserved: muscle' ∪ imat == filled muscle input
  auto filled = fill_holes(muscle, Tissue::muscle, PostProcessConfig{});
  for (size_t i = 0; i < filled.v.size(); ++i)
    CHECK(static_cast<int>(res.masks.at(Tissue::muscle).v[i]) +
              res.masks.at(Tissue::imat).v[i] ==
          static_cast<int>(filled.v[i]));

  // missing a core tissue is an error
  TissueMasks missing = raw;
  missing.erase(Tissue::sat);
  CHECK_THROWS_AS(process_slice(hu, missing, Spacing{}, PostProcessConfig{}), Error);
}

TEST_CASE("process_slice with native imat skips the hu relabel") {
  const int w = 32, h = 32;
  Array2<float> hu(w, h);
  for (auto& v : hu.v) v = 50.0f;  // everything muscle-like
  Array2<uint8_t> muscle(w, h), vat(w, h), sat(w, h), imat(w, h);
  for (int y = 2; y < 12; ++y)
    for (int x = 2; x < 12; ++x) muscle(x, y) = 1;
  // native imat: one 12-px blob and one 4-px blob; HU is out of window
  // everywhere, so any relabel pass would erase them
  for (int x = 14; x < 26; ++x) imat(x, 4) = 1;
  imat(14, 20) = imat(15, 20) = imat(14, 21) = imat(15, 21) = 1;
  vat(20, 28) = 1;
  sat(24, 28) = 1;

  TissueMasks raw;
  raw[Tissue::muscle] = muscle;
  raw[Tissue::vat] = vat;
  raw[Tissue::sat] = sat;
  raw[Tissue::imat] = imat;
  SliceResult res = process_slice(hu, raw, Spacing{1.0, 1.0, 1.0}, PostProcessConfig{});

  std::map<Tissue, const TissueMetrics*> by;
  for (const auto& m : res.metrics) by[m.tissue] = &m;
  CHECK(by[Tissue::imat]->pixel_count == 12);  // small blob filtered, big kept
  CHECK(by[Tissue::muscle]->pixel_count == 100);  // untouched by relabel
}

TEST_CASE("filled pixels never annex another tissue's original pixels") {
  // muscle ring around a vat pixel: the muscle hole covers a vat original;
  // filling must leave the vat pixel with vat
  const int w = 16, h = 16;
  Array2<float> hu(w, h);
  for (auto& v : hu.v) v = 40.0f;
  Array2<uint8_t> muscle(w, h), vat(w, h), sat(w, h);
  for (int y = 4; y < 11; ++y)
    for (int x = 4; x < 11; ++x) muscle(x, y) = 1;
  muscle(7, 7) = 0;  // 1-px hole
  vat(7, 7) = 1;     // but vat owns it
  sat(0, 0) = 1;
  hu(7, 7) = -92.0f;

  TissueMasks raw;
  raw[Tissue::muscle] = muscle;
  raw[Tissue::vat] = vat;
  raw[Tissue::sat] = sat;
  SliceResult res = process_slice(hu, raw, Spacing{1.0, 1.0, 1.0}, PostProcessConfig{});
  CHECK(res.masks.at(Tissue::vat)(7, 7) == 1);
  CHECK(res.masks.at(Tissue::muscle)(7, 7) == 0);

  std::map<Tissue, const TissueMetrics*> by;
  for (const auto& m : res.metrics) by[m.tissue] = &m;
  CHECK(by[Tissue::vat]->pixel_count == 1);
  CHECK(by[Tissue::muscle]->pixel_count == 48);  // 49 ring px minus none; hole stays vat
}
