#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "ergo/domain.hpp"
#include "ergo/errors.hpp"
#include "ergo/grid.hpp"
#include "ergo/infosim.hpp"
#include "ergo/trajectory.hpp"

using namespace ergo;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name)
      : path(std::filesystem::temp_directory_path() /
             ("ergo_test_" + std::to_string(::getpid()) + "_" + name)) {}
  ~TempFile() { std::filesystem::remove(path); }
};

using P = std::vector<double>;

Domain unit_square() { return Domain({0.0, 0.0}, {1.0, 1.0}); }

GaussianComponent isotropic(double mx, double my, double sigma, double w) {
  return GaussianComponent{{mx, my},
                           {sigma * sigma, 0.0, 0.0, sigma * sigma},
                           w};
}

// Trajectory that sits at the given cell centers, one step each.
Trajectory visit_cells(const GridShape& g, const std::vector<std::size_t>& cells,
                       double dt) {
  P start = g.cell_center(cells.front());
  std::vector<std::vector<double>> controls;
  P prev = start;
  // First step re-enters the starting cell (the start state collects nothing).
  controls.push_back({0.0, 0.0});
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const P next = g.cell_center(cells[i]);
    controls.push_back({(next[0] - prev[0]) / dt, (next[1] - prev[1]) / dt});
    prev = next;
  }
  return rollout(start, controls, dt, g.domain());
}

}  // namespace

TEST_CASE("mixture specs validate their components") {
  SUBCASE("a valid bimodal mixture is accepted") {
    CHECK_NOTHROW(EidSpec({isotropic(0.65, 0.65, 0.08, 0.5),
                           isotropic(0.25, 0.7, 0.08, 0.5)}));
  }
  SUBCASE("an empty mixture is rejected") {
    CHECK_THROWS_AS(EidSpec({}), std::invalid_argument);
  }
  SUBCASE("asymmetric covariance is rejected") {
    CHECK_THROWS_AS(EidSpec({{{0.5, 0.5}, {0.01, 0.002, 0.003, 0.01}, 1.0}}),
                    std::invalid_argument);
  }
  SUBCASE("non-positive-definite covariance is rejected") {
    // Symmetric but negative determinant.
    CHECK_THROWS_AS(EidSpec({{{0.5, 0.5}, {0.01, 0.02, 0.02, 0.01}, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(EidSpec({{{0.5, 0.5}, {-0.01, 0.0, 0.0, 0.01}, 1.0}}),
                    std::invalid_argument);
  }
  SUBCASE("non-positive weights are rejected") {
    CHECK_THROWS_AS(EidSpec({isotropic(0.5, 0.5, 0.1, 0.0)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(EidSpec({isotropic(0.3, 0.3, 0.1, 1.5),
                             isotropic(0.7, 0.7, 0.1, -0.5)}),
                    std::invalid_argument);
  }
  SUBCASE("weights must sum to one") {
    CHECK_THROWS_AS(EidSpec({isotropic(0.3, 0.3, 0.1, 0.6),
                             isotropic(0.7, 0.7, 0.1, 0.6)}),
                    std::invalid_argument);
  }
  SUBCASE("a correlated SPD covariance is accepted") {
    CHECK_NOTHROW(EidSpec({{{0.5, 0.5}, {0.02, 0.01, 0.01, 0.02}, 1.0}}));
  }
}

TEST_CASE("mixture densities respect their construction") {
  Domain d = unit_square();
  SUBCASE("the density integrates to one") {
    DensityField f = build_eid(EidSpec({isotropic(0.4, 0.6, 0.12, 1.0)}), d,
                               {30, 30});
    CHECK(integral(f.raw()) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("a centered isotropic Gaussian has four-fold symmetry") {
    const int r = 24;
    DensityField f =
        build_eid(EidSpec({isotropic(0.5, 0.5, 0.1, 1.0)}), d, {r, r});
    for (int iy = 0; iy < r; ++iy) {
      for (int ix = 0; ix < r; ++ix) {
        const std::size_t cell = static_cast<std::size_t>(iy) * r + ix;
        // 90-degree rotation about the center: (ix, iy) -> (iy, r-1-ix).
        const std::size_t rot =
            static_cast<std::size_t>(r - 1 - ix) * r + iy;
        CHECK(f.value(cell) == doctest::Approx(f.value(rot)).epsilon(1e-9));
      }
    }
  }
  SUBCASE("well-separated equal modes split the mass evenly") {
    DensityField f = build_eid(EidSpec({isotropic(0.25, 0.5, 0.05, 0.5),
                                        isotropic(0.75, 0.5, 0.05, 0.5)}),
                               d, {40, 40});
    double left = 0.0;
    const GridShape& g = f.shape();
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      if (g.cell_center(i)[0] < 0.5) left += f.value(i) * g.cell_volume();
    }
    CHECK(left == doctest::Approx(0.5).epsilon(0.01));
  }
  SUBCASE("non-2-D domains are rejected") {
    Domain d3({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
    CHECK_THROWS_AS(build_eid(EidSpec({isotropic(0.5, 0.5, 0.1, 1.0)}), d3,
                              {10, 10, 10}),
                    std::invalid_argument);
  }
}

TEST_CASE("info grids validate and track their totals") {
  Domain d = unit_square();
  GridShape g(d, {2, 2});
  SUBCASE("construction checks count, rate, and sign") {
    CHECK_THROWS_AS(InfoGrid(g, {0.1, 0.2, 0.3}, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(InfoGrid(g, {0.1, 0.2, 0.3, 0.4}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(InfoGrid(g, {0.1, 0.2, 0.3, 0.4}, -0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(InfoGrid(g, {0.1, -0.2, 0.3, 0.4}, 0.1),
                    std::invalid_argument);
  }
  SUBCASE("totals are captured at construction") {
    InfoGrid grid(g, {0.1, 0.2, 0.3, 0.4}, 0.1);
    CHECK(grid.initial_total() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(grid.total_remaining() == grid.initial_total());
  }
  SUBCASE("replace_remaining keeps the original total") {
    InfoGrid grid(g, {0.1, 0.2, 0.3, 0.4}, 0.1);
    InfoGrid swapped = replace_remaining(grid, {0.0, 0.0, 0.0, 0.1});
    CHECK(swapped.initial_total() == grid.initial_total());
    CHECK(swapped.total_remaining() == doctest::Approx(0.1));
    CHECK(swapped.rate() == grid.rate());
  }
}

TEST_CASE("discretize aggregates density mass onto a coarser grid") {
  Domain d = unit_square();
  SUBCASE("a uniform density spreads its mass equally") {
    GridShape fine(d, {100, 100});
    DensityField f(fine, std::vector<double>(fine.cell_count(), 1.0));
    InfoGrid grid = discretize(f, {10, 10}, 0.01);
    for (std::size_t i = 0; i < 100; ++i) {
      CHECK(grid.remaining(i) == doctest::Approx(0.01).epsilon(1e-12));
    }
    CHECK(grid.initial_total() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(grid.rate() == 0.01);
  }
  SUBCASE("concentrated mass lands in its enclosing coarse cell") {
    GridShape fine(d, {20, 20});
    std::vector<double> v(fine.cell_count(), 0.0);
    // All mass in fine cell (13, 7) -> coarse cell (6, 3) on a 10x10 grid.
    v[7 * 20 + 13] = 1.0 / fine.cell_volume();
    InfoGrid grid = discretize(DensityField(fine, std::move(v)), {10, 10},
                               0.01);
    for (std::size_t i = 0; i < 100; ++i) {
      if (i == 3 * 10 + 6) {
        CHECK(grid.remaining(i) == doctest::Approx(1.0).epsilon(1e-12));
      } else {
        CHECK(grid.remaining(i) == 0.0);
      }
    }
  }
  SUBCASE("aggregating a refined discretization matches the direct one") {
    DensityField f = build_eid(EidSpec({isotropic(0.6, 0.4, 0.15, 1.0)}), d,
                               {20, 20});
    InfoGrid direct = discretize(f, {10, 10}, 0.01);
    InfoGrid fine = discretize(f, {20, 20}, 0.01);
    for (int cy = 0; cy < 10; ++cy) {
      for (int cx = 0; cx < 10; ++cx) {
        double sum = 0.0;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            sum += fine.remaining(
                static_cast<std::size_t>(2 * cy + dy) * 20 + (2 * cx + dx));
          }
        }
        CHECK(sum == doctest::Approx(direct.remaining(
                         static_cast<std::size_t>(cy) * 10 + cx))
                         .epsilon(1e-9));
      }
    }
  }
  SUBCASE("non-divisible resolutions are rejected") {
    GridShape fine(d, {10, 10});
    DensityField f(fine, std::vector<double>(fine.cell_count(), 1.0));
    CHECK_THROWS_AS(discretize(f, {3, 10}, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(discretize(f, {20, 10}, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(discretize(f, {10}, 0.01), std::invalid_argument);
  }
}

TEST_CASE("collection depletes cells linearly and exactly") {
  Domain d = unit_square();
  SUBCASE("a full horizon in one cell collects everything exactly") {
    GridShape g(d, {1, 1});
    InfoGrid grid(g, {1.0}, 0.1);
    Trajectory t = visit_cells(g, std::vector<std::size_t>(10, 0), 1.0);
    const CollectionResult r = simulate_collection(grid, t);
    CHECK(r.collected == 1.0);                   // exact, no tolerance
    CHECK(r.remaining.remaining(0) == 0.0);      // emptied exactly at step N
    CHECK(r.remaining.total_remaining() == 0.0);
    for (double gain : r.per_step) CHECK(gain > 0.0);
  }
  SUBCASE("an exhausted cell yields exactly zero afterwards") {
    GridShape g(d, {1, 1});
    InfoGrid grid(g, {0.8}, 0.1);
    Trajectory t = visit_cells(g, std::vector<std::size_t>(20, 0), 1.0);
    const CollectionResult r = simulate_collection(grid, t);
    CHECK(r.collected == 0.8);  // 0.8 is an exact multiple of the rate
    CHECK(r.remaining.remaining(0) == 0.0);
    REQUIRE(r.per_step.size() == 20);
    for (int n = 8; n < 20; ++n) CHECK(r.per_step[n] == 0.0);
    int zero_steps = 0;
    for (double gain : r.per_step) zero_steps += (gain == 0.0) ? 1 : 0;
    CHECK(zero_steps == 12);
  }
  SUBCASE("each step gains at most the rate") {
    GridShape g(d, {2, 2});
    InfoGrid grid(g, {0.4, 0.3, 0.2, 0.1}, 0.07);
    Trajectory t = visit_cells(g, {0, 1, 2, 3, 0, 1, 2, 3, 0, 0}, 1.0);
    const CollectionResult r = simulate_collection(grid, t);
    for (double gain : r.per_step) CHECK(gain <= 0.07 + 1e-15);
  }
  SUBCASE("collected plus remaining equals the initial total") {
    GridShape g(d, {3, 3});
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> mass(0.0, 0.3);
    std::uniform_int_distribution<std::size_t> cell(0, 8);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> m(9);
      for (double& v : m) v = mass(rng);
      InfoGrid grid(g, m, 0.043);
      std::vector<std::size_t> cells(25);
      for (auto& c : cells) c = cell(rng);
      const CollectionResult r =
          simulate_collection(grid, visit_cells(g, cells, 1.0));
      CHECK(r.collected + r.remaining.total_remaining() ==
            doctest::Approx(grid.initial_total()).epsilon(1e-12));
      CHECK(r.remaining.initial_total() == grid.initial_total());
    }
  }
  SUBCASE("longer prefixes never collect less") {
    GridShape g(d, {2, 2});
    InfoGrid grid(g, {0.3, 0.3, 0.2, 0.2}, 0.06);
    Trajectory t = visit_cells(g, {0, 1, 0, 2, 3, 3, 1, 0, 2, 1}, 1.0);
    double prev = 0.0;
    for (int n = 1; n <= t.steps(); ++n) {
      const double c = simulate_collection(grid, t.prefix(n)).collected;
      CHECK(c >= prev);
      prev = c;
    }
  }
  SUBCASE("the collected total depends only on the visit multiset") {
    GridShape g(d, {2, 2});
    InfoGrid grid(g, {0.25, 0.15, 0.05, 0.55}, 0.1);
    const CollectionResult ra =
        simulate_collection(grid, visit_cells(g, {0, 1, 0, 2, 3, 0}, 1.0));
    const CollectionResult rb =
        simulate_collection(grid, visit_cells(g, {3, 0, 0, 0, 2, 1}, 1.0));
    CHECK(ra.collected == rb.collected);  // bit-identical by closed form
    CHECK(ra.remaining.remaining() == rb.remaining.remaining());
  }
  SUBCASE("steps outside the domain collect nothing") {
    GridShape g(d, {2, 2});
    InfoGrid grid(g, {0.25, 0.25, 0.25, 0.25}, 0.1);
    // Leaves the domain for two steps, then returns to cell 0's center.
    std::vector<std::vector<double>> controls{
        {-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    Trajectory t = rollout(P{0.25, 0.25}, controls, 1.0, d);
    const CollectionResult r = simulate_collection(grid, t);
    CHECK(r.per_step[0] == 0.0);
    CHECK(r.per_step[1] == 0.0);
    CHECK(r.per_step[2] > 0.0);
    CHECK(r.collected == r.per_step[2]);
  }
  SUBCASE("domain mismatch is rejected") {
    GridShape g(d, {2, 2});
    InfoGrid grid(g, {0.25, 0.25, 0.25, 0.25}, 0.1);
    Domain other({0.0, 0.0}, {2.0, 2.0});
    Trajectory t = rollout(P{0.5, 0.5}, {{0.0, 0.0}}, 1.0, other);
    CHECK_THROWS_AS(simulate_collection(grid, t), std::invalid_argument);
  }
}

TEST_CASE("collection is submodular in the executed history") {
  // Whatever `b` collects after `a` has already run never exceeds what `b`
  // collects on a fresh grid.
  Domain d = unit_square();
  GridShape g(d, {3, 3});
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> mass(0.0, 0.25);
  std::uniform_int_distribution<std::size_t> cell(0, 8);
  std::uniform_int_distribution<int> len(3, 15);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> m(9);
    for (double& v : m) v = mass(rng);
    InfoGrid grid(g, m, 0.05);
    auto random_cells = [&]() {
      std::vector<std::size_t> cells(len(rng));
      for (auto& c : cells) c = cell(rng);
      return cells;
    };
    Trajectory a = visit_cells(g, random_cells(), 1.0);
    Trajectory b = visit_cells(g, random_cells(), 1.0);
    const CollectionResult after_a = simulate_collection(grid, a);
    const double b_after_a =
        simulate_collection(after_a.remaining, b).collected;
    const double b_fresh = simulate_collection(grid, b).collected;
    CHECK(b_after_a <= b_fresh + 1e-12);
  }
}

TEST_CASE("info grid files round-trip exactly") {
  Domain d({0.0, -1.0}, {2.0, 1.0});
  GridShape g(d, {3, 2});
  InfoGrid grid(g, {0.1, 0.2, 1.0 / 3.0, 0.0, 0.25, 0.15}, 0.0625);
  TempFile tmp("info_roundtrip.txt");
  write_info_grid(tmp.path, grid);
  InfoGrid back = read_info_grid(tmp.path);
  CHECK(back.shape() == g);
  CHECK(back.rate() == 0.0625);
  CHECK(back.remaining() == grid.remaining());
  // initial_total is not stored: it restarts from the loaded masses.
  CHECK(back.initial_total() == doctest::Approx(back.total_remaining()));
}

TEST_CASE("info grid reader rejects malformed files") {
  auto write = [](const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
  };
  SUBCASE("header without a rate") {
    TempFile tmp("info_norate.txt");
    write(tmp.path, "2 2 0 0 1 1\n0.1 0.1\n0.1 0.1\n");
    try {
      read_info_grid(tmp.path);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      CHECK(e.line == 1);
    }
  }
  SUBCASE("missing row") {
    TempFile tmp("info_shortfile.txt");
    write(tmp.path, "2 2 0 0 1 1 0.1\n0.1 0.1\n");
    CHECK_THROWS_AS(read_info_grid(tmp.path), parse_error);
  }
  SUBCASE("short row") {
    TempFile tmp("info_shortrow.txt");
    write(tmp.path, "2 2 0 0 1 1 0.1\n0.1 0.1\n0.1\n");
    CHECK_THROWS_AS(read_info_grid(tmp.path), parse_error);
  }
  SUBCASE("non-positive rate is rejected on load") {
    TempFile tmp("info_badrate.txt");
    write(tmp.path, "2 2 0 0 1 1 0\n0.1 0.1\n0.1 0.1\n");
    CHECK_THROWS_AS(read_info_grid(tmp.path), std::invalid_argument);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_info_grid("/nonexistent/info.txt"), parse_error);
  }
}
