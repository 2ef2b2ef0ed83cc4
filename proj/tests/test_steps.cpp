#include "oracles.hpp"
#include "polywalk/rng.hpp"
#include "polywalk/steps.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace polywalk;

namespace {

const double inf = std::numeric_limits<double>::infinity();

double moment(const StepDistribution& p, int k) {
  return oracle::integrate([&](double s) { return std::pow(s, k) * p.pdf(s); }, 0.0, inf, 1e-13);
}

}  // namespace

TEST_SUITE("steps") {
  TEST_CASE("chi_1 is the unit half-normal") {
    const auto chi1 = make_chi(1);
    for (double s : {0.0, 0.3, 1.0, 2.5, 6.0}) {
      CHECK(chi1->cdf(s) == doctest::Approx(2.0 * oracle::normal_cdf(s) - 1.0).epsilon(1e-14));
    }
  }

  TEST_CASE("chi moments by quadrature") {
    CHECK(moment(*make_chi(3), 2) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(moment(*make_chi(7), 0) == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("inverse cdf round trips") {
    for (int d : {1, 2, 8, 32}) {
      const auto chi = make_chi(d);
      CHECK(std::abs(chi->inverse_cdf(chi->cdf(1.7)) - 1.7) <= 1e-10);
      for (double u : {1e-9, 1e-4, 0.1, 0.5, 0.9, 0.999, 1 - 1e-9}) {
        CHECK(std::abs(chi->cdf(chi->inverse_cdf(u)) - u) <= 1e-10);
      }
      const auto hn = make_half_normal_matched(d);
      for (double u : {1e-9, 0.2, 0.5, 0.97, 1 - 1e-9}) CHECK(std::abs(hn->cdf(hn->inverse_cdf(u)) - u) <= 1e-10);
    }
    CHECK(make_chi(4)->inverse_cdf(0.0) == 0.0);
    CHECK(std::isinf(make_chi(4)->inverse_cdf(1.0)));
  }

  TEST_CASE("moment-matched half-normal") {
    const auto hn1 = make_half_normal_matched(1);
    const auto chi1 = make_chi(1);
    for (double s = 0.0; s < 8.0; s += 0.37) {
      CHECK(std::abs(hn1->pdf(s) - chi1->pdf(s)) <= 1e-12);
      CHECK(std::abs(hn1->cdf(s) - chi1->cdf(s)) <= 1e-12);
    }
    CHECK(std::abs(moment(*make_half_normal_matched(4), 2) - 4.0) <= 1e-6);
    CHECK(make_half_normal_matched(4)->cdf(inf) == 1.0);
    CHECK(matched_half_normal_scale(9) == doctest::Approx(3.0));
    for (int d : {2, 5, 16}) {
      const auto first = make_half_normal_matched(d, MomentMatch::first);
      CHECK(moment(*first, 1) == doctest::Approx(moment(*make_chi(d), 1)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(make_chi(0), std::invalid_argument);
    CHECK_THROWS_AS(make_half_normal_matched(0), std::invalid_argument);
    CHECK_THROWS_AS(make_half_normal(0.0), std::invalid_argument);
  }

  TEST_CASE("pdf is positive on the positive half-line") {
    for (const auto& p : {make_chi(1), make_chi(5), make_half_normal(0.01)}) {
      for (double s : {1e-8, 0.01, 1.0, 50.0}) CHECK(std::isfinite(p->log_pdf(s)));
      CHECK(p->pdf(0.005) > 0.0);
    }
  }

  TEST_CASE("truncated density") {
    const auto chi2 = make_chi(2);
    CHECK(truncated_log_pdf(*chi2, 0.8, inf) == chi2->log_pdf(0.8));
    CHECK(truncated_log_pdf(*chi2, 1.2, 1.0) == -inf);
    const double mass =
        oracle::integrate([&](double s) { return std::exp(truncated_log_pdf(*chi2, s, 1.0)); }, 0.0, 1.0, 1e-14);
    CHECK(std::abs(mass - 1.0) <= 1e-8);
    Rng rng(2);
    for (int k = 0; k < 20; ++k) {
      const int d = 1 + k % 6;
      const double smax = 0.05 + 4.0 * rng.uniform();
      const auto p = k % 2 ? make_chi(d) : make_half_normal_matched(d);
      const double m =
          oracle::integrate([&](double s) { return std::exp(truncated_log_pdf(*p, s, smax)); }, 0.0, smax, 1e-13);
      CHECK(std::abs(m - 1.0) <= 1e-6);
    }
  }

  TEST_CASE("truncated sampling") {
    const auto chi4 = make_chi(4);
    CHECK(sample_truncated(*chi4, inf, 0.5) == doctest::Approx(chi4->inverse_cdf(0.5)).epsilon(1e-14));
    CHECK(sample_truncated(*chi4, inf, 1e-12) < 1e-2);
    CHECK(sample_truncated(*chi4, 2.0, 1 - 1e-15) <= 2.0);
    CHECK_THROWS_AS(sample_truncated(*chi4, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sample_truncated(*chi4, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sample_truncated(*chi4, 0.0, 0.5), std::invalid_argument);

    Rng rng(99);
    const std::size_t n = 100000;
    std::vector<double> draws(n);
    for (auto& s : draws) s = sample_truncated(*chi4, 2.0, rng.uniform());
    const double F2 = chi4->cdf(2.0);
    const double D = oracle::ks_statistic(draws, [&](double s) { return std::min(chi4->cdf(s) / F2, 1.0); });
    CHECK(D <= 0.01);
    CHECK(D <= oracle::ks_critical(0.001, n));
  }
}
