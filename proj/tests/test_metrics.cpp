#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "bevflow/metrics.hpp"
#include "bevflow/rng.hpp"

using namespace bevflow;

namespace {

InstanceGrid block(int h, int w, std::uint32_t id, int r0, int r1, int c0, int c1) {
  InstanceGrid g(h, w);
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) g.at(r, c) = id;
  return g;
}

SegGrid mask_of(const InstanceGrid& g) {
  SegGrid s(g.h, g.w);
  for (std::size_t i = 0; i < g.id.size(); ++i) s.v[i] = g.id[i] ? 1.0f : 0.0f;
  return s;
}

InstanceGrid relabeled(const InstanceGrid& g, const std::map<std::uint32_t, std::uint32_t>& perm) {
  InstanceGrid out = g;
  for (auto& id : out.id)
    if (id != 0) id = perm.at(id);
  return out;
}

}  // namespace

TEST_CASE("iou_seq fixtures") {
  const InstanceGrid gt = block(4, 4, 1, 1, 2, 1, 2);  // 4 cells
  CHECK(iou_seq({mask_of(gt)}, {mask_of(gt)}, 0.5) == doctest::Approx(1.0));

  const InstanceGrid disjoint = block(4, 4, 1, 0, 0, 0, 3);
  CHECK(iou_seq({mask_of(disjoint)}, {mask_of(gt)}, 0.5) == doctest::Approx(0.0));

  // Prediction covers 2 of the 4 ground-truth cells, no false positives.
  InstanceGrid half(4, 4);
  half.at(1, 1) = 1;
  half.at(1, 2) = 1;
  CHECK(iou_seq({mask_of(half)}, {mask_of(gt)}, 0.5) == doctest::Approx(0.5));

  CHECK_THROWS_AS(iou_seq({mask_of(gt)}, {}, 0.5), std::invalid_argument);
  // Both empty counts as perfect agreement.
  CHECK(iou_seq({SegGrid(4, 4)}, {SegGrid(4, 4)}, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("panoptic_match fixtures") {
  const InstanceGrid gt = block(8, 8, 3, 1, 2, 1, 2);

  SUBCASE("identical maps match with IoU 1") {
    const PanopticMatch m = panoptic_match(gt, gt);
    REQUIRE(m.tp.size() == 1);
    CHECK(m.tp[0].iou == doctest::Approx(1.0));
    CHECK(m.fp_pred.empty());
    CHECK(m.fn_gt.empty());
  }

  SUBCASE("an overlap of 2 of 5 cells (IoU 0.4) does not match") {
    InstanceGrid gt5(8, 8);
    for (int c = 1; c <= 5; ++c) gt5.at(1, c) = 2;  // 5 cells
    InstanceGrid pred(8, 8);
    pred.at(1, 4) = 9;
    pred.at(1, 5) = 9;  // 2 cells, both inside gt
    const PanopticMatch m = panoptic_match(pred, gt5);
    CHECK(m.tp.empty());
    REQUIRE(m.fp_pred.size() == 1);
    REQUIRE(m.fn_gt.size() == 1);
    CHECK(m.fp_pred[0] == 9);
    CHECK(m.fn_gt[0] == 2);
  }

  SUBCASE("empty prediction leaves one false negative") {
    const PanopticMatch m = panoptic_match(InstanceGrid(8, 8), gt);
    CHECK(m.tp.empty());
    CHECK(m.fp_pred.empty());
    REQUIRE(m.fn_gt.size() == 1);
  }
}

TEST_CASE("vpq_seq: perfect consistent prediction scores 1") {
  std::vector<InstanceGrid> seq;
  for (int t = 0; t < 4; ++t) seq.push_back(block(16, 16, 1, 2 + t, 5 + t, 2, 5));
  const VpqResult v = vpq_seq(seq, seq);
  CHECK(v.vpq == doctest::Approx(1.0));
}

TEST_CASE("vpq_seq: the hand-derived ID swap scores exactly one half") {
  // Perfect masks; the two agents' predicted IDs swap from frame 2 on.
  const InstanceGrid a = block(32, 32, 1, 2, 5, 2, 5);
  InstanceGrid both = a;
  for (int r = 20; r <= 23; ++r)
    for (int c = 20; c <= 23; ++c) both.at(r, c) = 2;

  const std::map<std::uint32_t, std::uint32_t> swap = {{1, 2}, {2, 1}};
  const InstanceGrid swapped = relabeled(both, swap);

  const std::vector<InstanceGrid> gt(4, both);
  const std::vector<InstanceGrid> pred = {both, both, swapped, swapped};
  const VpqResult v = vpq_seq(pred, gt);
  CHECK(v.vpq == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(v.per_frame[0].tp == 2);
  CHECK(v.per_frame[2].tp == 0);
  CHECK(v.per_frame[2].fp == 2);
  CHECK(v.per_frame[2].fn == 2);
}

TEST_CASE("vpq_seq: a single frame equals panoptic quality") {
  const InstanceGrid gt = block(16, 16, 1, 2, 5, 2, 5);
  InstanceGrid pred = block(16, 16, 7, 2, 5, 2, 5);
  pred.at(9, 9) = 8;  // spurious instance
  const VpqResult v = vpq_seq({pred}, {gt});
  const PanopticMatch m = panoptic_match(pred, gt);
  REQUIRE(m.tp.size() == 1);
  CHECK(v.vpq == doctest::Approx(m.tp[0].iou / (1.0 + 0.5 * 1.0)));
}

TEST_CASE("vpq_seq: empty frames count as perfect") {
  const VpqResult v = vpq_seq({InstanceGrid(8, 8)}, {InstanceGrid(8, 8)});
  CHECK(v.vpq == doctest::Approx(1.0));
}

TEST_CASE("vpq_seq: correspondences persist across gaps") {
  const InstanceGrid present = block(16, 16, 3, 4, 7, 4, 7);
  const InstanceGrid absent(16, 16);

  // The instance disappears for a frame; returning with the original ID is
  // still consistent, returning with a new one is not.
  const std::vector<InstanceGrid> gt = {present, absent, present};
  const VpqResult same = vpq_seq({present, absent, present}, gt);
  CHECK(same.vpq == doctest::Approx(1.0));

  InstanceGrid renamed = present;
  for (auto& id : renamed.id)
    if (id != 0) id = 9;
  const VpqResult changed = vpq_seq({present, absent, renamed}, gt);
  CHECK(changed.per_frame[2].tp == 0);
  CHECK(changed.per_frame[2].fp == 1);
  CHECK(changed.per_frame[2].fn == 1);
}

TEST_CASE("metrics are invariant under global ID permutations") {
  Rng rng(404);
  std::vector<InstanceGrid> gt, pred;
  for (int t = 0; t < 3; ++t) {
    InstanceGrid g(24, 24);
    for (auto& v : g.id) v = static_cast<std::uint32_t>(rng.uniform_int(4));
    InstanceGrid p(24, 24);
    for (std::size_t i = 0; i < p.id.size(); ++i)
      p.id[i] = rng.uniform01() < 0.9 ? g.id[i] : static_cast<std::uint32_t>(rng.uniform_int(4));
    gt.push_back(g);
    pred.push_back(p);
  }
  const double base = vpq_seq(pred, gt).vpq;

  const std::map<std::uint32_t, std::uint32_t> perm = {{1, 2}, {2, 3}, {3, 1}};
  std::vector<InstanceGrid> pred_perm, gt_perm;
  for (const auto& p : pred) pred_perm.push_back(relabeled(p, perm));
  for (const auto& g : gt) gt_perm.push_back(relabeled(g, perm));
  CHECK(vpq_seq(pred_perm, gt).vpq == doctest::Approx(base).epsilon(1e-12));
  CHECK(vpq_seq(pred, gt_perm).vpq == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("vpq never exceeds the frame-averaged panoptic quality") {
  Rng rng(405);
  for (int iter = 0; iter < 10; ++iter) {
    std::vector<InstanceGrid> gt, pred;
    for (int t = 0; t < 4; ++t) {
      InstanceGrid g(20, 20), p(20, 20);
      for (std::size_t i = 0; i < g.id.size(); ++i) {
        g.id[i] = static_cast<std::uint32_t>(rng.uniform_int(3));
        p.id[i] = rng.uniform01() < 0.8 ? g.id[i] : static_cast<std::uint32_t>(rng.uniform_int(3));
      }
      gt.push_back(g);
      pred.push_back(p);
    }
    double framewise = 0.0;
    for (int t = 0; t < 4; ++t) framewise += vpq_seq({pred[t]}, {gt[t]}).vpq;
    framewise /= 4.0;
    CHECK(vpq_seq(pred, gt).vpq <= framewise + 1e-12);
  }
}

TEST_CASE("adding a pure false positive never raises VPQ") {
  const InstanceGrid gt = block(24, 24, 1, 2, 6, 2, 6);
  const InstanceGrid clean = block(24, 24, 1, 2, 6, 2, 6);
  InstanceGrid with_fp = clean;
  for (int r = 15; r <= 17; ++r)
    for (int c = 15; c <= 17; ++c) with_fp.at(r, c) = 5;

  const std::vector<InstanceGrid> gts(3, gt);
  const double base = vpq_seq({clean, clean, clean}, gts).vpq;
  const double worse = vpq_seq({clean, with_fp, clean}, gts).vpq;
  CHECK(worse <= base + 1e-12);
  CHECK(worse < base);
}

TEST_CASE("report text is stable") {
  MetricsReport r;
  r.iou = 0.987654;
  r.vpq = 0.5;
  r.per_frame.push_back({2, 1, 0, 1.8});
  const std::string text = r.to_text();
  CHECK(text.find("iou=0.9877\n") != std::string::npos);
  CHECK(text.find("vpq=0.5000\n") != std::string::npos);
  CHECK(text.find("frame=0 tp=2 fp=1 fn=0") != std::string::npos);
}
