#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "pedflow/errors.hpp"
#include "pedflow/rng.hpp"
#include "pedflow/tracker/tracker.hpp"

using namespace pedflow;
using namespace pedflow::tracker;
using V = Eigen::Vector2d;

namespace {

DescriptorTable blank_table() {
  DescriptorTable t;
  t.feature_names = {"X", "Y", "area", "perimeter"};
  return t;
}

DescriptorRow row(Frame s, int slot, double x, double y, double area = 0.2,
                  double perimeter = 1.6) {
  return DescriptorRow{s, slot, {x, y, area, perimeter}, {}, false};
}

/// One object moving 1 m per slice along X, with some slices removed.
DescriptorTable walker(int slices, std::set<Frame> hidden = {}) {
  auto t = blank_table();
  for (Frame s = 0; s < slices; ++s) {
    if (!hidden.count(s)) t.rows.push_back(row(s, 1, static_cast<double>(s), 0.0));
  }
  return t;
}

TrackerParams growing(double threshold, int n = 3) {
  TrackerParams p;
  p.n = n;
  p.depth_rule = DepthRule::growing;
  p.distance_threshold = threshold;
  p.similarity_threshold = 0.9;
  return p;
}

std::size_t count(const std::vector<TrackEvent>& events, EventKind kind) {
  std::size_t n = 0;
  for (const auto& e : events) n += e.kind == kind;
  return n;
}

/// Straight parallel walkers, 0.1 m per frame, 2 m apart.
AtxyDatabase lanes_of_walkers(int walkers, int frames) {
  std::vector<AtxyRecord> recs;
  for (int w = 0; w < walkers; ++w) {
    for (Frame t = 0; t < frames; ++t) {
      recs.push_back({w + 1, t, 1.0 + 2.0 * w, 0.1 * static_cast<double>(t) + 0.3 * w});
    }
  }
  return AtxyDatabase(std::move(recs), 1.0 / 15.0);
}

void check_unique_ids_per_slice(const DescriptorTable& table) {
  std::map<Frame, std::set<ObjectId>> seen;
  for (const auto& r : table.rows) {
    REQUIRE(r.object_id.has_value());
    CHECK(seen[r.slice].insert(*r.object_id).second);
  }
}

}  // namespace

TEST_CASE("similarity index") {
  DescriptorRow a{0, 1, {0, 0, 2, -1, 4}, {}, false};
  DescriptorRow b{0, 1, {0, 0, 2, 7, 0}, {}, false};
  const std::vector<std::size_t> feats = {2, 3, 4};

  CHECK(*similarity_index(a, a, feats) == doctest::Approx(1.0));
  // Missing second feature is skipped: (1 + (1 - 4/4)) / 2.
  CHECK(*similarity_index(a, b, feats) == doctest::Approx(0.5));
  CHECK(*similarity_index(a, b, feats) == *similarity_index(b, a, feats));

  DescriptorRow one{0, 1, {0, 0, 1, 0, 0}, {}, false};
  DescriptorRow three{0, 1, {0, 0, 3, 0, 0}, {}, false};
  CHECK(*similarity_index(one, three, {2}) == doctest::Approx(0.5));
  CHECK_FALSE(similarity_index(a, b, {3}).has_value());

  DescriptorRow short_row{0, 1, {0, 0}, {}, false};
  CHECK_THROWS_AS(similarity_index(a, short_row, feats), DomainError);
  CHECK_THROWS_AS(similarity_index(a, b, {9}), DomainError);
}

TEST_CASE("similarity index is symmetric and bounded") {
  RandomStream rng(11, 0);
  for (int i = 0; i < 200; ++i) {
    DescriptorRow a{0, 1, {0, 0, rng.uniform(0.01, 5), rng.uniform(0.01, 5)}, {}, false};
    DescriptorRow b{0, 1, {0, 0, rng.uniform(0.01, 5), rng.uniform(0.01, 5)}, {}, false};
    const double ab = *similarity_index(a, b, {2, 3});
    CHECK(ab == doctest::Approx(*similarity_index(b, a, {2, 3})));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("match in frame") {
  const auto layout = blank_table();
  TrackerParams p;
  p.distance_threshold = 1.0;
  p.similarity_threshold = 0.8;
  const DescriptorRow base = row(0, 1, 0, 0);

  SUBCASE("identical candidate at zero distance") {
    const DescriptorRow c = row(1, 1, 0, 0);
    CHECK(match_in_frame(base, {&c}, 1, p, layout) == std::optional<std::size_t>(0));
  }
  SUBCASE("shrinking threshold is strict") {
    const DescriptorRow on = row(1, 1, 0.5, 0);
    const DescriptorRow in = row(1, 1, 0.49, 0);
    CHECK_FALSE(match_in_frame(base, {&on}, 2, p, layout).has_value());
    CHECK(match_in_frame(base, {&in}, 2, p, layout).has_value());
  }
  SUBCASE("growing threshold is strict") {
    p.depth_rule = DepthRule::growing;
    const DescriptorRow on = row(1, 1, 2.0, 0);
    const DescriptorRow in = row(1, 1, 1.99, 0);
    CHECK_FALSE(match_in_frame(base, {&on}, 2, p, layout).has_value());
    CHECK(match_in_frame(base, {&in}, 2, p, layout).has_value());
  }
  SUBCASE("similarity must exceed the threshold") {
    p.similarity_features = {2};
    // 1 - |0.2 - 0.3| / 0.5 = 0.8 exactly.
    const DescriptorRow c = row(1, 1, 0, 0, 0.3);
    CHECK_FALSE(match_in_frame(base, {&c}, 1, p, layout).has_value());
  }
  SUBCASE("most similar wins over nearest") {
    p.similarity_features = {2};
    const DescriptorRow b10 = row(0, 1, 0, 0, 10.0);
    const DescriptorRow near = row(1, 1, 0.1, 0, 8.0);  // 1 - 2/18
    const DescriptorRow far = row(1, 2, 0.6, 0, 9.0);   // 1 - 1/19
    CHECK(match_in_frame(b10, {&near, &far}, 1, p, layout) == std::optional<std::size_t>(1));
  }
  SUBCASE("same object id wins") {
    DescriptorRow b = base;
    b.object_id = 7;
    DescriptorRow near = row(1, 1, 0, 0);
    DescriptorRow owned = row(1, 2, 50, 50, 9.0);
    owned.object_id = 7;
    CHECK(match_in_frame(b, {&near, &owned}, 1, p, layout) == std::optional<std::size_t>(1));
  }
  SUBCASE("assigned candidates are skipped") {
    DescriptorRow taken = row(1, 1, 0, 0);
    taken.object_id = 3;
    CHECK_FALSE(match_in_frame(base, {&taken}, 1, p, layout).has_value());
  }
  SUBCASE("exact tie goes to the lower slot") {
    const DescriptorRow right = row(1, 2, 0.5, 0);
    const DescriptorRow left = row(1, 1, -0.5, 0);
    CHECK(match_in_frame(base, {&right, &left}, 1, p, layout) == std::optional<std::size_t>(1));
  }
  CHECK_THROWS_AS(match_in_frame(base, {}, 0, p, layout), DomainError);
}

TEST_CASE("tracker params validation") {
  TrackerParams p;
  CHECK_NOTHROW(p.validate());
  p.n = 1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.similarity_threshold = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.min_rows = 2;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.distance_threshold = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("trace follows a single walker") {
  const auto res = trace(walker(10), growing(1.5));
  std::set<ObjectId> ids;
  for (const auto& r : res.table.rows) ids.insert(*r.object_id);
  CHECK(ids.size() == 1);
  CHECK(count(res.events, EventKind::continue_) == 9);
  CHECK(count(res.events, EventKind::enter) == 1);
  CHECK(count(res.events, EventKind::exit) == 0);
}

TEST_CASE("trace bridges a short occlusion") {
  const auto res = trace(walker(10, {4, 5}), growing(1.5, 3));
  std::set<ObjectId> ids;
  for (const auto& r : res.table.rows) ids.insert(*r.object_id);
  CHECK(ids.size() == 1);
  REQUIRE(count(res.events, EventKind::occlusion_bridged) == 1);
  for (const auto& e : res.events) {
    if (e.kind != EventKind::occlusion_bridged) continue;
    CHECK(e.first == 4);
    CHECK(e.last == 5);
  }
  int bridged = 0;
  for (const auto& r : res.table.rows) {
    if (!r.interpolated) continue;
    ++bridged;
    CHECK(r.features[0] == doctest::Approx(static_cast<double>(r.slice)));
    CHECK(r.features[1] == doctest::Approx(0.0));
    CHECK(r.features[2] == doctest::Approx(0.2));
  }
  CHECK(bridged == 2);
  CHECK(res.table.rows.size() == 10);
  check_unique_ids_per_slice(res.table);
}

TEST_CASE("trace splits a gap longer than the search depth") {
  const auto res = trace(walker(10, {4, 5, 6}), growing(1.5, 3));
  std::set<ObjectId> ids;
  for (const auto& r : res.table.rows) ids.insert(*r.object_id);
  CHECK(ids.size() == 2);
  CHECK(count(res.events, EventKind::exit) == 1);
  CHECK(count(res.events, EventKind::enter) == 2);
  CHECK(count(res.events, EventKind::occlusion_bridged) == 0);
  for (const auto& e : res.events) {
    if (e.kind == EventKind::exit) CHECK(e.first == 4);
    if (e.kind == EventKind::enter && e.object_id == 2) CHECK(e.first == 7);
  }
}

TEST_CASE("trace never assigns one id twice in a slice") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthOptions o;
    o.seed = seed;
    o.noise_sigma = 0.03;
    o.clutter = 4;
    o.occlusions = {{1, 10, 11}, {3, 20, 22}};
    const auto synth = synthesize_descriptors(lanes_of_walkers(6, 40), o);
    const auto res = trace(synth.table, growing(0.4));
    check_unique_ids_per_slice(res.table);
  }
}

TEST_CASE("trace is deterministic") {
  SynthOptions o;
  o.seed = 4;
  o.noise_sigma = 0.02;
  o.clutter = 3;
  const auto synth = synthesize_descriptors(lanes_of_walkers(5, 30), o);
  const auto a = trace(synth.table, growing(0.4));
  const auto b = trace(synth.table, growing(0.4));
  std::ostringstream sa, sb;
  write_descriptors(sa, a.table);
  write_descriptors(sb, b.table);
  CHECK(sa.str() == sb.str());
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].object_id == b.events[i].object_id);
    CHECK(a.events[i].first == b.events[i].first);
  }
  for (std::size_t i = 0; i < a.table.rows.size(); ++i) {
    CHECK(a.table.rows[i].object_id == b.table.rows[i].object_id);
  }
}

TEST_CASE("motion index anchors") {
  const double c1 = MotionConstants{}.c1;
  CHECK(c1 == doctest::Approx(-std::log(0.95) / 2.0).epsilon(1e-12));
  // delta/d1 = 2 with no turn.
  CHECK(motion_score(2.0, 1.0, 3.0, 0.0) == doctest::Approx(0.95).epsilon(1e-9));
  CHECK(motion_index(V(0, 0), V(1, 0), V(4, 0)) == doctest::Approx(0.95).epsilon(1e-9));
  // delta = 2, d2 = 1, a right-angle turn, delta/d1 = 2.
  CHECK(std::abs(motion_score(2.0, 1.0, 1.0, std::numbers::pi / 2) - 0.85) <= 1e-3);
  CHECK(motion_index(V(0, 0), V(1, 1), V(2, 2)) == 1.0);
  CHECK(motion_index(V(0, 0), V(0, 0), V(1, 0)) == 0.0);
  CHECK(motion_index(V(0, 0), V(1, 0), V(1, 0)) == 0.0);
}

TEST_CASE("motion score falls as the deviation grows") {
  RandomStream rng(5, 0);
  for (int i = 0; i < 200; ++i) {
    const double d1 = rng.uniform(0.05, 2.0), d2 = rng.uniform(0.05, 2.0);
    const double beta = rng.uniform(0.0, 3.0);
    double prev = 1.0;
    for (double delta = 0.0; delta < 4.0; delta += 0.25) {
      const double p = motion_score(delta, d1, d2, beta);
      CHECK(p <= prev);
      CHECK(p >= 0.0);
      prev = p;
    }
  }
}

TEST_CASE("recognize filters short and jittery tracks") {
  auto t = blank_table();
  auto add = [&](ObjectId id, Frame s, double x, double y) {
    DescriptorRow r = row(s, static_cast<int>(id), x, y);
    r.object_id = id;
    t.rows.push_back(r);
  };
  for (Frame s = 0; s < 4; ++s) add(1, s, 0.1 * s, 5.0);
  for (Frame s = 0; s < 20; ++s) add(2, s, 2.0, 0.1 * s);
  RandomStream rng(3, 0);
  for (Frame s = 0; s < 20; ++s) add(3, s, 8.0 + 0.01 * rng.normal(), 8.0 + 0.01 * rng.normal());

  TrackerParams p;
  const auto res = recognize(t, p);
  CHECK(res.renumbered.size() == 1);
  CHECK(res.renumbered.at(2) == 1);
  CHECK(res.mean_motion_index.at(1) == doctest::Approx(1.0));
  CHECK(res.mean_motion_index.at(2) == doctest::Approx(1.0));
  CHECK(res.mean_motion_index.at(3) < p.min_motion_index);
  CHECK(res.db.size() == 20);
  CHECK(res.db.dt_seconds() == doctest::Approx(p.dt));
  for (const auto& r : res.db.records()) {
    CHECK(r.ped_id == 1);
    CHECK(r.x == 2.0);
  }
}

TEST_CASE("zero-noise synthesis round trips exactly") {
  const auto truth = lanes_of_walkers(5, 40);
  SynthOptions o;
  o.seed = 9;
  const auto synth = synthesize_descriptors(truth, o);
  CHECK(synth.table.rows.size() == truth.size());
  const auto traced = trace(synth.table, growing(0.4));

  std::map<ObjectId, std::set<PedId>> obj_to_truth;
  std::map<PedId, std::set<ObjectId>> truth_to_obj;
  for (std::size_t i = 0; i < synth.table.rows.size(); ++i) {
    const ObjectId id = *traced.table.rows[i].object_id;
    obj_to_truth[id].insert(synth.truth[i]);
    truth_to_obj[synth.truth[i]].insert(id);
  }
  CHECK(obj_to_truth.size() == 5);
  for (const auto& [id, peds] : obj_to_truth) CHECK(peds.size() == 1);
  for (const auto& [ped, ids] : truth_to_obj) CHECK(ids.size() == 1);

  const auto rec = recognize(traced.table, growing(0.4));
  REQUIRE(rec.db.size() == truth.size());
  for (const auto& r : rec.db.records()) {
    bool found = false;
    for (const auto& q : truth.records()) {
      if (q.t == r.t && q.x == r.x && q.y == r.y) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("synthesized occlusion is bridged") {
  const auto truth = lanes_of_walkers(4, 30);
  SynthOptions o;
  o.seed = 2;
  o.noise_sigma = 0.01;
  o.occlusions = {{2, 12, 13}};
  const auto synth = synthesize_descriptors(truth, o);
  CHECK(synth.table.rows.size() == truth.size() - 2);
  const auto traced = trace(synth.table, growing(0.4));
  REQUIRE(count(traced.events, EventKind::occlusion_bridged) == 1);
  for (const auto& r : traced.table.rows) {
    if (!r.interpolated) continue;
    const AtxyRecord* q = truth.find(2, r.slice);
    REQUIRE(q != nullptr);
    CHECK(std::abs(r.features[0] - q->x) < 0.05);
    CHECK(std::abs(r.features[1] - q->y) < 0.05);
  }
  const auto rec = recognize(traced.table, growing(0.4));
  CHECK(rec.renumbered.size() == 4);
  CHECK(rec.db.size() == truth.size());
}

TEST_CASE("synthesized clutter is removed") {
  const auto truth = lanes_of_walkers(5, 40);
  SynthOptions o;
  o.seed = 6;
  o.noise_sigma = 0.01;
  o.clutter = 5;
  const auto synth = synthesize_descriptors(truth, o);
  int clutter_rows = 0;
  for (PedId p : synth.truth) clutter_rows += p == 0;
  CHECK(clutter_rows == 5 * o.clutter_length);
  const auto traced = trace(synth.table, growing(0.4));
  const auto rec = recognize(traced.table, growing(0.4));

  // Sources of the detected rows of each traced object; clutter is truth 0.
  std::map<ObjectId, std::set<PedId>> sources;
  std::map<PedId, std::map<ObjectId, int>> votes;
  for (std::size_t i = 0; i < synth.truth.size(); ++i) {
    const ObjectId id = *traced.table.rows[i].object_id;
    sources[id].insert(synth.truth[i]);
    if (synth.truth[i] != 0) ++votes[synth.truth[i]][id];
  }
  int clutter_tracks = 0;
  for (const auto& [id, from] : sources) {
    if (from != std::set<PedId>{0}) continue;
    ++clutter_tracks;
    CHECK(rec.renumbered.count(id) == 0);
  }
  CHECK(clutter_tracks >= 1);
  for (const auto& [ped, by_obj] : votes) {
    const auto majority = std::max_element(by_obj.begin(), by_obj.end(), [](auto& a, auto& b) {
      return a.second < b.second;
    });
    CHECK(rec.renumbered.count(majority->first) == 1);
  }
}

TEST_CASE("descriptor io") {
  const auto synth = synthesize_descriptors(lanes_of_walkers(3, 10), SynthOptions{0.02, {}, 2, 3, 8});
  std::stringstream io;
  write_descriptors(io, synth.table);
  const auto back = read_descriptors(io);
  CHECK(back.feature_names == synth.table.feature_names);
  CHECK(back.x_index == 0);
  CHECK(back.y_index == 1);
  REQUIRE(back.rows.size() == synth.table.rows.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(back.rows[i].slice == synth.table.rows[i].slice);
    CHECK(back.rows[i].slot == synth.table.rows[i].slot);
    CHECK(back.rows[i].features == synth.table.rows[i].features);
  }

  std::istringstream reordered("slice,slot,area,Y,X\n0,1,0.2,3,4\n");
  const auto r = read_descriptors(reordered);
  CHECK(r.x_index == 2);
  CHECK(r.y_index == 1);

  std::istringstream no_x("slice,slot,Y,area\n0,1,1,2\n");
  CHECK_THROWS_AS(read_descriptors(no_x), ParseError);
  std::istringstream ragged("slice,slot,X,Y\n0,1,1\n");
  CHECK_THROWS_AS(read_descriptors(ragged), ParseError);
  std::istringstream dup("slice,slot,X,Y\n0,1,1,1\n0,1,2,2\n");
  CHECK_THROWS_AS(read_descriptors(dup), IntegrityError);
}
