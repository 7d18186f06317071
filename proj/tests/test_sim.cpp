#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pedflow/errors.hpp"
#include "pedflow/sim/engine.hpp"
#include "pedflow/sim/forces.hpp"

using namespace pedflow;
using namespace pedflow::sim;
using V = Eigen::Vector2d;

namespace {

std::string dump(const AtxyDatabase& db) {
  std::ostringstream out;
  write_atxy(db, out);
  return out.str();
}

PedestrianState lone(V p, V dest, double vmax) {
  PedestrianState ped;
  ped.id = 1;
  ped.p = ped.origin = p;
  ped.destination = dest;
  ped.vmax = vmax;
  return ped;
}

}  // namespace

TEST_CASE("forward velocity") {
  CHECK(forward_velocity<double>({0, 0}, {0, 10}, 1.775, 1.0).isApprox(V(0, 1.775)));
  const V a1 = forward_velocity<double>({1, 2}, {4, -3}, 1.775, 1.0);
  const V a2 = forward_velocity<double>({1, 2}, {4, -3}, 1.775, 2.0);
  CHECK(a2.isApprox(0.5 * a1));
  CHECK(forward_velocity<double>({0, 0}, {0, 10}, 1.775, 0.205).norm() ==
        doctest::Approx(1.775 / 0.205));
  CHECK(1.775 / 0.205 == doctest::Approx(8.6585).epsilon(1e-4));
  CHECK_THROWS_AS(forward_velocity<double>({1, 1}, {1, 1}, 1.0, 1.0), DomainError);
}

TEST_CASE("repulse-away velocity") {
  const double r = 0.835, chi = 0.25, vmax = 1.775, sight = 4.0;
  Eigen::Matrix2Xd others(2, 1);

  SUBCASE("nobody in sight") {
    others.col(0) = V(5, 0);
    CHECK(repulse_away_velocity<double>({0, 0}, {1, 0}, vmax, others, chi, r, sight).isZero());
    others.col(0) = V(-1, 0);
    CHECK(repulse_away_velocity<double>({0, 0}, {1, 0}, vmax, others, chi, r, sight).isZero());
  }
  SUBCASE("intruder off axis") {
    others.col(0) = V(2, 0.5);
    const V a = repulse_away_velocity<double>({0, 0}, {1, 0}, vmax, others, chi, r, sight);
    const double expect = vmax * (1.67 - 0.5) / (chi * std::sqrt(4.25));
    CHECK(expect == doctest::Approx(4.029).epsilon(1e-3));
    CHECK(a.isApprox(V(0, -expect)));
  }
  SUBCASE("dead ahead ties toward local +y") {
    others.col(0) = V(2, 0);
    const V a = repulse_away_velocity<double>({0, 0}, {1, 0}, vmax, others, chi, r, sight);
    CHECK(a.isApprox(V(0, vmax * 2 * r / (chi * 2))));
    const V m = repulse_away_velocity<double>({0, 0}, {1, 0}, vmax, others, -chi, r, sight);
    CHECK(m.isApprox(V(0, -a.y())));
  }
  SUBCASE("local frame follows the velocity") {
    others.col(0) = V(-0.5, 2);  // ahead of a walker heading +Y, on its local left
    const V a = repulse_away_velocity<double>({0, 0}, {0, 1}, vmax, others, chi, r, sight);
    CHECK(a.y() == doctest::Approx(0.0));
    CHECK(a.x() > 0.0);
  }
}

TEST_CASE("collision-avoid velocity") {
  const double r = 0.835, beta = 0.001, vmax = 1.775;
  Eigen::Matrix2Xd far(2, 2);
  far << 2 * r, 0, 0, -2 * r;
  CHECK(collision_avoid_velocity<double>({0, 0}, vmax, far, beta, r).isZero());

  Eigen::Matrix2Xd left(2, 1);
  left.col(0) = V(-r, 0);
  CHECK(collision_avoid_velocity<double>({0, 0}, vmax, left, beta, r).isApprox(V(vmax / beta, 0)));

  Eigen::Matrix2Xd sym(2, 2);
  sym << -0.7, 0.7, 0.3, 0.3;
  const V a = collision_avoid_velocity<double>({0, 0}, vmax, sym, beta, r);
  CHECK(a.x() == 0.0);
  CHECK(a.y() < 0.0);

  // Pairwise antisymmetry.
  Eigen::Matrix2Xd pj(2, 1), pi(2, 1);
  pj.col(0) = V(0.4, 0.9);
  pi.col(0) = V(0, 0);
  const V fij = collision_avoid_velocity<double>({0, 0}, 1.0, pj, beta, r);
  const V fji = collision_avoid_velocity<double>({0.4, 0.9}, 1.0, pi, beta, r);
  CHECK(fij.isApprox(-fji));
}

TEST_CASE("acceleration") {
  CHECK(acceleration<double>({0.3, 1}, {0.3, 1}, 0.75, 1.75).isZero());
  const V a = acceleration<double>({0, 0}, {0, 1.775}, 0.75, 1.75);
  CHECK(1.775 / 0.75 == doctest::Approx(2.3667).epsilon(1e-4));
  CHECK(a.isApprox(V(0, 1.75)));
  const V a1 = acceleration<double>({0, 0}, {0.3, 0.4}, 1.0, 100.0);
  const V a2 = acceleration<double>({0, 0}, {0.3, 0.4}, 2.0, 100.0);
  CHECK(a2.isApprox(0.5 * a1));
}

TEST_CASE("params validation") {
  SimParams p;
  p.chi = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SimParams{};
  p.dt = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SimParams{};
  p.n_ways = 3;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK_NOTHROW(SimParams{}.validate());
}

TEST_CASE("generation") {
  SimParams p;
  p.seed = 3;
  p.n_pedestrians = 1;
  const auto one = generate_pedestrians(p);
  REQUIRE(one.size() == 1);
  CHECK(one[0].v.isZero());
  CHECK(one[0].p.x() >= p.trap.xmin);
  CHECK(one[0].p.x() <= p.trap.xmax);
  CHECK(one[0].p.y() <= p.trap.ymin - p.generator_distance);
  CHECK(one[0].p.y() >= p.trap.ymin - p.generator_distance - p.generator_depth);

  p.n_pedestrians = 50;
  const auto a = generate_pedestrians(p), b = generate_pedestrians(p);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].p == b[i].p);
    CHECK(a[i].vmax == b[i].vmax);
  }

  p.n_pedestrians = 300;
  const auto crowd = generate_pedestrians(p);
  double closest = INFINITY;
  for (std::size_t i = 0; i < crowd.size(); ++i) {
    for (std::size_t j = i + 1; j < crowd.size(); ++j) {
      closest = std::min(closest, (crowd[i].p - crowd[j].p).norm());
    }
  }
  CHECK(closest >= p.body_diameter);

  p.generator_depth = 1.0;
  p.n_pedestrians = 400;
  CHECK_THROWS_AS(generate_pedestrians(p), CapacityError);
}

TEST_CASE("segregated crowds start in their own half") {
  SimParams p;
  p.seed = 2;
  p.n_pedestrians = 100;
  p.scenario = Scenario::segregated;
  const double xc = 0.5 * (p.trap.xmin + p.trap.xmax);
  for (const auto& ped : generate_pedestrians(p)) {
    if (ped.group == Group::up) {
      CHECK(ped.p.x() >= xc);
    } else {
      CHECK(ped.p.x() <= xc);
    }
  }
}

TEST_CASE("free flow") {
  SimParams p;
  p.alpha = 1.0;
  p.n_pedestrians = 1;
  const auto res = run(p, {lone({6, -5}, {6, 60}, 1.775)});
  const auto& recs = res.full_db.records();
  const double dt = res.full_db.dt_seconds();
  const auto five = static_cast<std::size_t>(std::round(5.0 / dt));
  REQUIRE(recs.size() > five + 1);
  for (std::size_t i = five; i < recs.size(); ++i) {
    const double v = std::hypot(recs[i].x - recs[i - 1].x, recs[i].y - recs[i - 1].y) / dt;
    CHECK(std::abs(v - 1.775) <= 0.01 * 1.775);
  }
  for (const auto& r : recs) CHECK(std::abs(r.x - 6.0) <= 1e-6);
}

TEST_CASE("lone walker crossing time") {
  SimParams p;
  p.n_pedestrians = 1;
  const auto res = run(p, {lone({6, -21}, {6, 53}, 1.5)});
  const auto& rep = res.trap_db;
  REQUIRE(!rep.empty());
  const double crossing = static_cast<double>(*rep.last_frame() - *rep.first_frame()) * rep.dt_seconds();
  CHECK(crossing == doctest::Approx(32.0 / 1.5).epsilon(0.10));
}

TEST_CASE("no pedestrians") {
  SimParams p;
  p.n_pedestrians = 0;
  const auto res = run(p);
  CHECK(res.full_db.empty());
  CHECK(res.trap_db.empty());
}

TEST_CASE("bounds and determinism over a crowd") {
  SimParams p;
  p.seed = 5;
  p.n_pedestrians = 120;
  p.t_max = 40.0;
  const auto a = run(p);
  for (const auto& d : a.diagnostics) {
    CHECK(d.max_accel <= p.a_max + 1e-9);
    CHECK(d.max_speed_excess <= 1e-9);
  }
  const auto b = run(p);
  CHECK(dump(a.full_db) == dump(b.full_db));
  CHECK(dump(a.trap_db) == dump(b.trap_db));

  p.decimation = 2;
  const auto c = run(p);
  CHECK(c.full_db.dt_seconds() == doctest::Approx(2 * a.full_db.dt_seconds()));
  CHECK(c.full_db.records().front() == a.full_db.records().front());
}

TEST_CASE("mirror symmetry with the same chi") {
  SimParams p;
  p.trap = {-6, 0, 6, 32};
  p.seed = 8;
  p.n_pedestrians = 30;
  p.t_max = 30.0;
  const auto initial = generate_pedestrians(p);
  auto mirrored = initial;
  for (auto& ped : mirrored) {
    ped.p.x() = -ped.p.x();
    ped.origin.x() = -ped.origin.x();
    ped.destination.x() = -ped.destination.x();
  }
  const auto a = run(p, initial);
  const auto b = run(p, mirrored);
  REQUIRE(a.full_db.size() == b.full_db.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.full_db.size(); ++i) {
    const auto& ra = a.full_db.records()[i];
    const auto& rb = b.full_db.records()[i];
    worst = std::max({worst, std::abs(ra.x + rb.x), std::abs(ra.y - rb.y)});
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("health rates count only after the transient") {
  std::vector<StepDiagnostics> d = {{1, 10, 5, 5, 0, 0}, {100, 10, 1, 0, 0, 0}, {101, 10, 0, 2, 0, 0}};
  const auto h = health_rates(d, 1.0 / 15.0);
  CHECK(h.overlap_rate == doctest::Approx(1.0 / 20.0));
  CHECK(h.pushback_rate == doctest::Approx(2.0 / 20.0));
}
