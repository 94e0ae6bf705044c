#include <doctest.h>

#include "oracles.hpp"
#include "platewave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace platewave;

TEST_CASE("partition from interface points") {
  const auto p = make_partition(0.35, 0.65);
  CHECK(p.s_left == 0.35);
  CHECK(p.s_right == 0.65);
  CHECK(p.outer_left == 0.0);
  CHECK(p.outer_right == 1.0);
  CHECK(p.in_wave(0.2));
  CHECK(p.in_wave(0.9));
  CHECK(p.in_plate(0.5));
  CHECK_FALSE(p.in_plate(0.35));
  CHECK_FALSE(p.in_wave(0.35));
  CHECK(p.plate_length() + p.wave_length() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("partition rejects bad ordering") {
  CHECK_THROWS_AS(make_partition(0.65, 0.35), GeometryError);
  CHECK_THROWS_AS(make_partition(0.0, 0.5), GeometryError);
  CHECK_THROWS_AS(make_partition(0.5, 1.0), GeometryError);
  CHECK_THROWS_AS(make_partition(0.4, 0.4), GeometryError);
}

TEST_CASE("plate normals point out of the plate") {
  CHECK(DomainPartition::plate_normal(InterfaceSide::Left) == -1.0);
  CHECK(DomainPartition::plate_normal(InterfaceSide::Right) == 1.0);
}

TEST_CASE("damping values at the interface and the peak") {
  const auto part = make_partition(0.1, 0.9);
  const auto a = make_damping(part, 0.15, 0.85, 2.5, 0.05);
  CHECK(eval_damping(a, part.s_left) == 0.0);
  CHECK(eval_damping(a, part.s_right) == 0.0);
  CHECK(eval_damping(a, a.midpoint()) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("damping construction errors") {
  const auto part = make_partition(0.1, 0.9);
  CHECK_THROWS_AS(make_damping(part, 0.12, 0.85, 1.0, 0.05), GeometryError);
  CHECK_THROWS_AS(make_damping(part, 0.15, 0.88, 1.0, 0.05), GeometryError);
  CHECK_THROWS_AS(make_damping(part, 0.5, 0.4, 1.0, 0.05), GeometryError);
  CHECK_THROWS_AS(make_damping(part, 0.15, 0.85, -1.0, 0.05), GeometryError);
  CHECK_THROWS_AS(make_damping(part, 0.15, 0.85, 1.0, 0.0), GeometryError);
  CHECK_NOTHROW(make_damping(part, 0.15, 0.85, 0.0, 0.05));
}

TEST_CASE("damping integral against Richardson-extrapolated Simpson") {
  const auto part = make_partition(0.1, 0.9);
  const auto a = make_damping(part, 0.25, 0.75, 1.3, 0.05);
  auto simpson = [&](int n) {
    const double h = 1.0 / n;
    double s = eval_damping(a, 0.0) + eval_damping(a, 1.0);
    for (int i = 1; i < n; ++i) {
      s += (i % 2 ? 4.0 : 2.0) * eval_damping(a, i * h);
    }
    return s * h / 3.0;
  };
  // Simpson error is O(h^4) on each smooth piece; the dyadic breakpoints
  // 0.25, 0.5, 0.75 are panel ends for these n.
  const double coarse = simpson(1 << 12);
  const double fine = simpson(1 << 13);
  const double limit = fine + (fine - coarse) / 15.0;
  CHECK(std::abs(limit - damping_integral(a)) <= 1e-10);
  // int_0^1 (6u^5 - 15u^4 + 10u^3) du = 1/2 on each half of the support
  CHECK(damping_integral(a) == doctest::Approx(1.3 * 0.5 * 0.5).epsilon(1e-13));
}

TEST_CASE("damping jet matches finite differences") {
  const auto part = make_partition(0.1, 0.9);
  const auto a = make_damping(part, 0.15, 0.85, 1.0, 0.05);
  for (double x : {0.2, 0.31, 0.47, 0.55, 0.8}) {
    const auto j = eval_damping_jet(a, x);
    CHECK(j.value == doctest::Approx(eval_damping(a, x)).epsilon(1e-15));
    CHECK(j.d1 == doctest::Approx(oracle::derivative([&](double y) { return eval_damping(a, y); }, x))
                      .epsilon(1e-7));
    CHECK(j.d2 == doctest::Approx(
                      oracle::derivative([&](double y) { return eval_damping_jet(a, y).d1; }, x))
                      .epsilon(1e-6));
  }
}

TEST_CASE("damping invariants by dense sampling") {
  const auto part = make_partition(0.1, 0.9);
  struct Case {
    double wl, wr, amp, margin;
  };
  for (const Case c : {Case{0.15, 0.85, 1.0, 0.05}, Case{0.3, 0.4, 7.0, 0.2}, Case{0.12, 0.88, 0.1, 0.02},
                       Case{0.5, 0.6, 1.0, 0.3}}) {
    const auto a = make_damping(part, c.wl, c.wr, c.amp, c.margin);
    const double quarter = 0.25 * (c.wr - c.wl);
    for (int i = 0; i <= 20000; ++i) {
      const double x = i / 20000.0;
      const double v = eval_damping(a, x);
      REQUIRE(v >= 0.0);
      if ((x >= part.s_left && x <= part.s_left + c.margin) ||
          (x >= part.s_right - c.margin && x <= part.s_right)) {
        REQUIRE(v == 0.0);
      }
      if (x >= c.wl + quarter && x <= c.wr - quarter) {
        REQUIRE(v > 0.0);
      }
    }
  }
}

TEST_CASE("zero damping vanishes everywhere") {
  const auto part = make_partition(0.35, 0.65);
  const auto a = zero_damping(part);
  CHECK(a.is_zero());
  for (int i = 0; i <= 100; ++i) {
    CHECK(eval_damping(a, i / 100.0) == 0.0);
  }
  CHECK(damping_integral(a) == 0.0);
}

TEST_CASE("uniform meshes") {
  const auto part = make_partition(0.35, 0.65);
  const auto m = build_mesh(part, 2, 2);
  REQUIRE(m.plate_nodes.size() == 3);
  CHECK(m.plate_nodes[0] == 0.35);
  CHECK(m.plate_nodes[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.plate_nodes[2] == 0.65);
  REQUIRE(m.wave_left_nodes.size() == 3);
  CHECK(m.wave_left_nodes[0] == 0.0);
  CHECK(m.wave_left_nodes[1] == doctest::Approx(0.175).epsilon(1e-15));
  CHECK(m.wave_left_nodes[2] == 0.35);

  CHECK_THROWS_AS(build_mesh(part, 1, 4), MeshError);
  CHECK_THROWS_AS(build_mesh(part, 4, 1), MeshError);
}

TEST_CASE("refinement halves every element") {
  const auto part = make_partition(0.2, 0.7);
  const auto m = build_mesh(part, 5, 3);
  const auto r = refine(m);
  const auto hp = m.plate_element_sizes();
  const auto rp = r.plate_element_sizes();
  REQUIRE(rp.size() == 2 * hp.size());
  for (std::size_t i = 0; i < rp.size(); ++i) {
    CHECK(rp[i] == doctest::Approx(0.5 * hp[i / 2]).epsilon(1e-13));
  }
  const auto hw = m.wave_element_sizes();
  const auto rw = r.wave_element_sizes();
  REQUIRE(rw.size() == 2 * hw.size());
  CHECK(r.max_element_size() == doctest::Approx(0.5 * m.max_element_size()).epsilon(1e-13));
  CHECK(r.min_element_size() == doctest::Approx(0.5 * m.min_element_size()).epsilon(1e-13));
}

TEST_CASE("mesh nodes are increasing and interfaces are shared by two meshes") {
  const auto part = make_partition(0.1, 0.9);
  for (int state : {16, 200, 400, 800, 1000}) {
    const auto m = build_mesh_for_state_size(part, state);
    for (const auto* nodes : {&m.plate_nodes, &m.wave_left_nodes, &m.wave_right_nodes}) {
      for (std::size_t i = 1; i < nodes->size(); ++i) {
        REQUIRE((*nodes)[i] > (*nodes)[i - 1]);
      }
    }
    for (double s : {part.s_left, part.s_right}) {
      int count = 0;
      for (const auto* nodes : {&m.plate_nodes, &m.wave_left_nodes, &m.wave_right_nodes}) {
        count += static_cast<int>(std::count(nodes->begin(), nodes->end(), s));
      }
      CHECK(count == 2);
    }
    // free displacement unknowns = 2 n_plate + 2 (n_wave - 1)
    const int disp = 2 * static_cast<int>(m.n_plate_elements()) +
                     static_cast<int>(m.n_wave_left_elements()) - 1 +
                     static_cast<int>(m.n_wave_right_elements()) - 1;
    CHECK(2 * disp == state);
  }
  CHECK_THROWS_AS(build_mesh_for_state_size(part, 402), MeshError);
  CHECK_THROWS_AS(build_mesh_for_state_size(part, 12), MeshError);
}
