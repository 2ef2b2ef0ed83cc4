#include "oracles.hpp"
#include "polywalk/diagnostics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace polywalk;

namespace {

Matrix columns(const std::vector<std::vector<double>>& cols) {
  Matrix M(static_cast<Index>(cols.front().size()), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < cols[j].size(); ++i) M(static_cast<Index>(i), static_cast<Index>(j)) = cols[j][i];
  return M;
}

std::vector<double> iid(std::size_t n, std::uint64_t seed) { return oracle::ar1(0.0, n, seed); }

RunRecord rec(const std::string& problem, const std::string& sampler, double ess) {
  RunRecord r;
  r.problem_id = problem;
  r.sampler = sampler;
  r.min_ess = ess;
  return r;
}

Histogram2D from_masses(const std::vector<double>& masses) {
  Histogram2D h = empty_histogram(HistogramGrid{0, 1, 0, 1, 2, 2});
  h.counts = masses;
  h.total = 0.0;
  for (double m : masses) h.total += m;
  return h;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("ESS of iid and AR(1) series") {
    const auto x = iid(100000, 1);
    const double r = effective_sample_size(x) / 1e5;
    CHECK(r >= 0.9);
    CHECK(r <= 1.1);
    for (double rho : {0.3, 0.5, 0.9}) {
      const double ratio = effective_sample_size(oracle::ar1(rho, 100000, 7)) / 1e5;
      CHECK(ratio == doctest::Approx((1 - rho) / (1 + rho)).epsilon(0.1));
    }
  }

  TEST_CASE("ESS edge cases") {
    const std::vector<double> flat(100, 2.5);
    CHECK(is_constant_series(flat));
    CHECK(effective_sample_size(flat) == 1.0);
    CHECK_THROWS_AS(effective_sample_size(std::vector<double>(5, 1.0)), std::invalid_argument);
    auto bad = iid(50, 2);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(effective_sample_size(bad), std::invalid_argument);
    // Perfect anticorrelation would exceed n; the estimate is clipped.
    std::vector<double> alt(1000);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? 1.0 : -1.0;
    CHECK(effective_sample_size(alt) <= 1000.0);
  }

  TEST_CASE("ESS is invariant under affine maps") {
    const auto x = oracle::ar1(0.6, 20000, 3);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = -3.7 * x[i] + 12.0;
    CHECK(std::abs(effective_sample_size(x) - effective_sample_size(y)) <= 1e-8 * effective_sample_size(x));
  }

  TEST_CASE("minimum marginal ESS") {
    const std::size_t n = 20000;
    const Matrix M = columns({iid(n, 1), iid(n, 2), iid(n, 3)});
    CHECK(min_marginal_ess(M) == doctest::Approx(double(n)).epsilon(0.1));
    const Matrix sticky = columns({iid(n, 1), std::vector<double>(n, 0.5)});
    CHECK(min_marginal_ess(sticky) == 1.0);
    const Matrix mixed = columns({iid(n, 4), oracle::ar1(0.9, n, 5), oracle::ar1(0.5, n, 6)});
    Matrix permuted(mixed.rows(), 3);
    permuted << mixed.col(2), mixed.col(0), mixed.col(1);
    CHECK(min_marginal_ess(mixed) == min_marginal_ess(permuted));
    for (Index j = 0; j < 3; ++j) {
      const Vector c = mixed.col(j);
      CHECK(min_marginal_ess(mixed) <= effective_sample_size({c.data(), static_cast<std::size_t>(c.size())}));
    }
    const Matrix other = columns({iid(n, 8), oracle::ar1(0.9, n, 9), oracle::ar1(0.5, n, 10)});
    double expected = kInfinity;
    for (Index j = 0; j < 3; ++j) {
      const Vector a = mixed.col(j), b = other.col(j);
      expected = std::min(expected, effective_sample_size({a.data(), n}) + effective_sample_size({b.data(), n}));
    }
    CHECK(min_marginal_ess(std::vector<Matrix>{mixed, other}) == doctest::Approx(expected));
  }

  TEST_CASE("split R-hat") {
    const std::size_t n = 10000;
    std::vector<Matrix> same;
    for (int c = 0; c < 4; ++c) same.push_back(columns({iid(n, 10 + c), iid(n, 20 + c)}));
    CHECK(max_split_rhat(same) == doctest::Approx(1.0).epsilon(0.01));
    const std::vector<Matrix> stuck = {Matrix::Constant(100, 2, 0.1), Matrix::Constant(100, 2, 0.9)};
    CHECK(std::isinf(max_split_rhat(stuck)));
    auto shifted = oracle::ar1(0.9, n, 30);
    for (auto& v : shifted) v += 5.0;
    const std::vector<Matrix> apart = {columns({oracle::ar1(0.9, n, 31)}), columns({shifted})};
    CHECK(max_split_rhat(apart) > 1.1);
    CHECK_THROWS_AS(split_rhat({Matrix::Zero(3, 1), Matrix::Zero(3, 1)}), std::invalid_argument);
    CHECK_THROWS_AS(split_rhat({}), std::invalid_argument);
  }

  TEST_CASE("split R-hat approaches one with chain length") {
    double previous = kInfinity;
    for (std::size_t n : {1000, 10000, 100000}) {
      double excess = 0.0;
      for (int rep = 0; rep < 5; ++rep) {
        std::vector<Matrix> chains;
        for (int c = 0; c < 4; ++c) chains.push_back(columns({oracle::ar1(0.8, n, 1000 * rep + c + n)}));
        excess += max_split_rhat(chains) - 1.0;
      }
      CHECK(excess < previous);
      previous = excess;
    }
  }

  TEST_CASE("histograms") {
    const HistogramGrid grid;
    const Histogram2D one = hist2d(Matrix::Constant(1, 2, 0.33), 0, 1, grid);
    CHECK(one.mass(3, 3) == 1.0);
    const std::size_t side = 200;
    Matrix pts(side * side, 3);
    for (std::size_t i = 0; i < side; ++i)
      for (std::size_t j = 0; j < side; ++j)
        pts.row(static_cast<Index>(i * side + j)) << (i + 0.5) / side, 7.0, (j + 0.5) / side;
    const Histogram2D h = hist2d(pts, 0, 2, grid);
    double total = 0.0;
    const double p = 1.0 / (grid.nx * grid.ny);
    const double sd = std::sqrt(p * (1 - p) / double(pts.rows()));
    for (int ix = 0; ix < grid.nx; ++ix)
      for (int iy = 0; iy < grid.ny; ++iy) {
        total += h.mass(ix, iy);
        CHECK(std::abs(h.mass(ix, iy) - p) <= 3 * sd);
      }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    const Histogram2D clamped = hist2d((Matrix(2, 2) << -0.5, 0.5, 0.5, 1.5).finished(), 0, 1, grid);
    CHECK(clamped.clamped == 2);
    CHECK(clamped.mass(0, 5) == 0.5);
    CHECK(clamped.mass(5, 9) == 0.5);
    CHECK_THROWS_AS(hist2d(Matrix(0, 2), 0, 1, grid), std::invalid_argument);
    CHECK_THROWS_AS(hist2d(pts, 0, 3, grid), std::invalid_argument);
    CHECK_THROWS_AS(hist2d(pts, 0, 1, HistogramGrid{0, 1, 0, 1, 0, 5}), std::invalid_argument);
    Histogram2D a = hist2d(pts.topRows(100), 0, 2, grid);
    merge_into(a, hist2d(pts.bottomRows(pts.rows() - 100), 0, 2, grid));
    CHECK(l1_error(a, h) <= 1e-12);
  }

  TEST_CASE("L1 error") {
    const auto p = from_masses({1, 0, 0, 0});
    const auto q = from_masses({0, 0, 0, 1});
    CHECK(l1_error(p, p) == 0.0);
    CHECK(l1_error(p, q) == 2.0);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
      const auto a = from_masses({u(gen), u(gen), u(gen), u(gen)});
      const auto b = from_masses({u(gen), u(gen), u(gen), u(gen)});
      const auto c = from_masses({u(gen), u(gen), u(gen), u(gen)});
      CHECK(l1_error(a, b) == doctest::Approx(l1_error(b, a)));
      CHECK(l1_error(a, c) <= l1_error(a, b) + l1_error(b, c) + 1e-12);
    }
    Histogram2D other = empty_histogram(HistogramGrid{0, 1, 0, 1, 4, 1});
    other.counts[0] = 1;
    other.total = 1;
    CHECK_THROWS_AS(l1_error(p, other), std::invalid_argument);
  }

  TEST_CASE("relative performance") {
    auto single = relative_performance({rec("p", "hr", 10.0)});
    REQUIRE(single.size() == 1);
    CHECK(single[0].rel_perf == 1.0);
    auto two = relative_performance({rec("p", "a", 50.0), rec("p", "b", 100.0)});
    REQUIRE(two.size() == 2);
    CHECK(two[0].sampler == "a");
    CHECK(two[0].rel_perf == 0.5);
    CHECK(two[1].rel_perf == 1.0);
    auto reps = relative_performance(
        {rec("p", "a", 40.0), rec("p", "a", 60.0), rec("p", "b", 200.0), rec("q", "a", 3.0), rec("q", "b", 1.0)});
    REQUIRE(reps.size() == 4);
    CHECK(reps[0].mean_min_ess == 50.0);
    CHECK(reps[0].replicates == 2);
    CHECK(reps[0].rel_perf == 0.25);
    CHECK(reps[2].rel_perf == 1.0);
    CHECK(reps[3].rel_perf == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(relative_performance({}), std::invalid_argument);
  }
}
