#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "postadc/adc.hpp"
#include "postadc/errors.hpp"
#include "postadc/rng.hpp"
#include "postadc/verify.hpp"
#include "test_oracles.hpp"

using namespace postadc;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

Eigen::MatrixXd random_points(int n, int d, SplitMix64& rng) {
  Eigen::MatrixXd pts(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) pts(i, j) = rng.next_unit();
  }
  return pts;
}

}  // namespace

TEST_CASE("rbf kernel basics") {
  CHECK(rbf_kernel(vec1(0.3), vec1(0.3), 1.0, 0.1) == doctest::Approx(1.0));
  CHECK(rbf_kernel(vec1(0.0), vec1(0.1), 1.0, 0.1) ==
        doctest::Approx(std::exp(-0.5)));
  CHECK(rbf_kernel(vec1(0.0), vec1(50.0), 1.0, 0.1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(rbf_kernel(vec1(0), vec1(1), 1.0, 0.0), ConfigError);
}

TEST_CASE("gp posterior scalar cases") {
  GpUcbConfig config;
  config.kernel_variance = 1.0;
  config.length_scale = 0.1;
  config.noise_variance = 1.0;

  Eigen::MatrixXd hist(1, 1);
  hist << 0.5;
  Eigen::VectorXd y(1);
  y << 2.0;

  SUBCASE("query at the observed point") {
    const auto [mean, var] = gp_posterior(hist, y, vec1(0.5), config);
    CHECK(mean == doctest::Approx(1.0));   // 1/(1+1) * 2
    CHECK(var == doctest::Approx(0.5));    // 1 - 1/(1+1)
  }
  SUBCASE("query orthogonal to the history") {
    const auto [mean, var] = gp_posterior(hist, y, vec1(50.0), config);
    CHECK(mean == doctest::Approx(0.0));
    CHECK(var == doctest::Approx(1.0));
  }
}

TEST_CASE("gp posterior matches a dense-inverse oracle") {
  SplitMix64 rng(3);
  GpUcbConfig config;
  config.length_scale = 0.2;
  config.noise_variance = 0.7;
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd hist = random_points(3, 2, rng);
    Eigen::VectorXd y(3);
    for (int i = 0; i < 3; ++i) y[i] = 2.0 * rng.next_gaussian();
    Eigen::VectorXd x(2);
    x << rng.next_unit(), rng.next_unit();

    const auto [mean, var] = gp_posterior(hist, y, x, config);
    const auto [mean_o, var_o] = oracle::gp_posterior_dense(hist, y, x, config);
    CHECK(mean == doctest::Approx(mean_o).epsilon(1e-10));
    CHECK(var == doctest::Approx(var_o).epsilon(1e-10));

    config.kappa = 2.0;
    CHECK(gpucb_score(hist, y, x, config) ==
          doctest::Approx(mean_o + 2.0 * std::sqrt(std::max(0.0, var_o)))
              .epsilon(1e-10));
  }
}

TEST_CASE("gpucb score composition") {
  GpUcbConfig config;
  config.noise_variance = 1.0;
  Eigen::MatrixXd hist(1, 1);
  hist << 0.5;
  Eigen::VectorXd y(1);
  y << 2.0;

  config.kappa = 2.0;
  CHECK(gpucb_score(hist, y, vec1(0.5), config) ==
        doctest::Approx(1.0 + 2.0 * std::sqrt(0.5)));
  config.kappa = 0.0;
  CHECK(gpucb_score(hist, y, vec1(0.5), config) == doctest::Approx(1.0));
}

TEST_CASE("gp posterior mean is linear in the responses") {
  SplitMix64 rng(5);
  GpUcbConfig config;
  const Eigen::MatrixXd hist = random_points(4, 1, rng);
  Eigen::VectorXd y1(4), y2(4);
  for (int i = 0; i < 4; ++i) {
    y1[i] = rng.next_gaussian();
    y2[i] = rng.next_gaussian();
  }
  const Eigen::VectorXd x = vec1(rng.next_unit());
  const double alpha = 0.7, beta = -1.3;
  const double mixed =
      gp_posterior(hist, alpha * y1 + beta * y2, x, config).first;
  const double split = alpha * gp_posterior(hist, y1, x, config).first +
                       beta * gp_posterior(hist, y2, x, config).first;
  CHECK(mixed == doctest::Approx(split).epsilon(1e-10));
}

TEST_CASE("tpe partition") {
  Eigen::VectorXd y(3);
  y << 3, 1, 2;
  SUBCASE("argmax at gamma 0.2") {
    const auto [high, low] = tpe_partition(y, 0.2);
    CHECK(high == std::vector<int>{0});
    CHECK(low == std::vector<int>{1, 2});
  }
  SUBCASE("tie enters at the smaller index") {
    Eigen::VectorXd t(2);
    t << 1, 1;
    const auto [high, low] = tpe_partition(t, 0.2);
    CHECK(high == std::vector<int>{0});
    CHECK(low == std::vector<int>{1});
  }
  SUBCASE("ceil sizes") {
    Eigen::VectorXd five(5);
    five << 5, 4, 3, 2, 1;
    CHECK(tpe_partition(five, 0.2).first.size() == 1);
  }
  SUBCASE("degenerate split rejected") {
    Eigen::VectorXd two(2);
    two << 1, 2;
    CHECK_THROWS_AS(tpe_partition(two, 0.9), DegenerateSelection);
  }
}

TEST_CASE("tpe score analytic cases") {
  TpeConfig config;
  config.gamma = 0.4;  // n=2 -> |H|=1
  config.bandwidth = 0.1;

  Eigen::MatrixXd hist(2, 1);
  hist << 0.3, 0.4;  // distance = bandwidth
  Eigen::VectorXd y(2);
  y << 1.0, 0.0;  // H={0}, L={1}
  CHECK(tpe_score(hist, y, vec1(0.3), config) ==
        doctest::Approx(std::exp(0.5)));

  // H and L symmetric around the query point.
  Eigen::MatrixXd sym(2, 1);
  sym << 0.2, 0.6;
  CHECK(tpe_score(sym, y, vec1(0.4), config) == doctest::Approx(1.0));
}

TEST_CASE("tpe score matches a direct kernel-sum oracle") {
  SplitMix64 rng(9);
  TpeConfig config;
  config.gamma = 0.34;
  config.bandwidth = 0.17;
  const Eigen::MatrixXd hist = random_points(6, 1, rng);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) y[i] = rng.next_gaussian();
  const Eigen::VectorXd x = vec1(rng.next_unit());

  const auto [high, low] = tpe_partition(y, config.gamma);
  double g = 0, l = 0;
  for (int i : high) {
    g += std::exp(-std::pow(x[0] - hist(i, 0), 2) /
                  (2 * config.bandwidth * config.bandwidth));
  }
  for (int i : low) {
    l += std::exp(-std::pow(x[0] - hist(i, 0), 2) /
                  (2 * config.bandwidth * config.bandwidth));
  }
  const double expected = (g / high.size()) / (l / low.size());
  CHECK(tpe_score(hist, y, x, config) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("tpe scores depend on the data only through the partition") {
  SplitMix64 rng(13);
  TpeConfig config;
  const CandidateSet grid = make_grid(1, 16);
  const TpeModel model(config);
  std::vector<int> queried{2, 9, 14, 5, 11};
  Eigen::VectorXd y(5);
  y << 2.0, -1.0, 0.5, 0.1, -0.4;
  // Different responses with the same ordering, hence the same partitions.
  Eigen::VectorXd y2(5);
  y2 << 17.0, -3.0, 1.2, 0.9, -0.2;
  CHECK(model.next_index(grid, queried, y) == model.next_index(grid, queried, y2));
}

TEST_CASE("next_point argmax and tie rule") {
  GpUcbConfig config;
  const GpUcbModel model(config);
  const CandidateSet grid = make_grid(1, 16);
  SplitMix64 rng(21);

  // Exhaustive scan oracle on a random history.
  std::vector<int> queried{1, 7, 13};
  Eigen::VectorXd y(3);
  for (int i = 0; i < 3; ++i) y[i] = rng.next_gaussian();
  Eigen::MatrixXd hist(3, 1);
  for (int i = 0; i < 3; ++i) hist(i, 0) = grid.points(queried[i], 0);

  int best = 0;
  double best_score = -1e300;
  for (int i = 0; i < grid.size(); ++i) {
    const double s = gpucb_score(hist, y, grid.point(i), config);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  CHECK(model.next_index(grid, queried, y) == best);
}

TEST_CASE("run_adc determinism and budget") {
  GpUcbConfig gp;
  TpeConfig tpe;
  const CandidateSet grid = make_grid(1, 32);
  const Eigen::VectorXd mu = Eigen::VectorXd::Zero(32);
  SplitMix64 rng(17);
  Eigen::VectorXd noise(12);
  for (int i = 0; i < 12; ++i) noise[i] = rng.next_gaussian();

  for (Algorithm alg : {Algorithm::GpUcb, Algorithm::Tpe}) {
    const auto model = make_model(alg, gp, tpe);
    SyntheticSource s1(mu, noise), s2(mu, noise);
    const CollectedData run1 = run_adc(*model, s1, grid, 4, 8, 99);
    const CollectedData run2 = run_adc(*model, s2, grid, 4, 8, 99);
    CHECK(run1.trajectory == run2.trajectory);
    CHECK(run1.y == run2.y);
    CHECK(run1.total() == 12);

    // replay over the run's own responses reproduces it bit-exactly
    const std::vector<int> initial(run1.trajectory.begin(),
                                   run1.trajectory.begin() + 4);
    CHECK(replay_trajectory(*model, grid, initial, run1.y) == run1.trajectory);
  }

  SUBCASE("no acquisition steps leaves the seeded design") {
    SyntheticSource s(mu, noise);
    const auto model = make_model(Algorithm::GpUcb, gp, tpe);
    const CollectedData run = run_adc(*model, s, grid, 5, 0, 123);
    CHECK(run.total() == 5);
    SplitMix64 init_rng(123);
    CHECK(run.trajectory == sample_without_replacement(32, 5, init_rng));
  }

  SUBCASE("budget larger than the candidate set is rejected") {
    SyntheticSource s(mu, noise);
    const auto model = make_model(Algorithm::GpUcb, gp, tpe);
    CHECK_THROWS_AS(run_adc(*model, s, grid, 20, 20, 1), ConfigError);
  }
}

TEST_CASE("toy replay branches") {
  const ToyModel model;
  const CandidateSet candidates = toy_candidates();
  Eigen::VectorXd y(2);

  y << -0.5, 0.3;
  CHECK(replay_trajectory(model, candidates, {0}, y) ==
        std::vector<int>{0, 1});
  y << 0.5, 0.3;
  CHECK(replay_trajectory(model, candidates, {0}, y) ==
        std::vector<int>{0, 2});
}

TEST_CASE("prefix scorers agree with the generic path") {
  GpUcbConfig gp;
  TpeConfig tpe;
  const CandidateSet grid = make_grid(1, 16);
  const Eigen::VectorXd mu = Eigen::VectorXd::Zero(16);
  SplitMix64 rng(31);
  Eigen::VectorXd noise(9);
  for (int i = 0; i < 9; ++i) noise[i] = rng.next_gaussian();

  for (Algorithm alg : {Algorithm::GpUcb, Algorithm::Tpe}) {
    const auto model = make_model(alg, gp, tpe);
    SyntheticSource source(mu, noise);
    const CollectedData run = run_adc(*model, source, grid, 3, 6, 7);
    const auto scorer = model->make_prefix_scorer(grid, run.trajectory, 3);
    Eigen::VectorXd shifted = run.y;
    shifted.array() += 0.05;  // same partitions, perturbed magnitudes
    for (int n = 3; n < 9; ++n) {
      const std::vector<int> prefix(run.trajectory.begin(),
                                    run.trajectory.begin() + n);
      CHECK(scorer->next_index(n, shifted) ==
            model->next_index(grid, prefix, shifted));
    }
  }
}
