#include <doctest.h>

#include <cmath>

#include "core/potential.hpp"

using namespace td;

TEST_CASE("step well layout") {
  const auto u1 = make_step_well(16.0, 1.0);
  REQUIRE(u1.regions().size() == 2);
  CHECK(u1.regions()[0].lo == 0.0);
  CHECK(u1.regions()[0].hi == 1.0);
  CHECK(u1.regions()[0].height == 0.0);
  CHECK(u1.tail_height() == 16.0);
  CHECK(u1.is_step_well());
  CHECK(!u1.is_barrier());
  CHECK(u1.value(0.5) == 0.0);
  CHECK(u1.value(2.0) == 16.0);
  CHECK(std::isinf(u1.value(-0.1))); // hard wall

  const auto u1b = make_step_well(10.0, 1.0);
  CHECK(u1b.tail_height() == 10.0);
}

TEST_CASE("barrier layout") {
  const auto u2 = make_barrier(16.0, 1.0, 1.4);
  REQUIRE(u2.regions().size() == 3);
  CHECK(u2.is_barrier());
  CHECK(u2.barrier_right() - u2.barrier_left() == doctest::Approx(0.4));
  CHECK(u2.tail_height() == 0.0);
  CHECK(u2.value(1.2) == 16.0);
  CHECK(u2.value(5.0) == 0.0);

  const auto thin = make_barrier(16.0, 1.0, 1.05);
  CHECK(thin.barrier_right() == 1.05);
}

TEST_CASE("degenerate geometries are rejected") {
  CHECK_THROWS_AS(make_step_well(16.0, 0.0), Error);
  CHECK_THROWS_AS(make_step_well(0.0, 1.0), Error);
  CHECK_THROWS_AS(make_step_well(-4.0, 1.0), Error);
  CHECK_THROWS_AS(make_barrier(16.0, 1.0, 1.0), Error); // zero width
  CHECK_THROWS_AS(make_barrier(16.0, 1.0, 0.9), Error);
  CHECK_THROWS_AS(make_barrier(-1.0, 1.0, 1.4), Error);
}
