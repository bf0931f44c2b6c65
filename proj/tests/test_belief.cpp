#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "hra/belief.hpp"
#include "hra/errors.hpp"
#include "hra/generators.hpp"

using namespace hra;

namespace {

Belief make(std::vector<double> w) {
  auto ids = std::make_shared<std::vector<std::string>>();
  for (std::size_t i = 0; i < w.size(); ++i) ids->push_back("h" + std::to_string(i));
  return Belief(ids, Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
}

double plain_entropy(const std::vector<double>& w) {
  double h = 0.0;
  for (double v : w) {
    if (v > 0) h -= v * std::log(v);
  }
  return h;
}

// Brute-force expected information gain over a likelihood table lik[h][o].
double brute_gain(const std::vector<double>& w, const std::vector<std::vector<double>>& lik) {
  const std::size_t outcomes = lik[0].size();
  double expected_post = 0.0;
  for (std::size_t o = 0; o < outcomes; ++o) {
    double po = 0.0;
    for (std::size_t h = 0; h < w.size(); ++h) po += w[h] * lik[h][o];
    if (po <= 0) continue;
    std::vector<double> post(w.size());
    for (std::size_t h = 0; h < w.size(); ++h) post[h] = w[h] * lik[h][o] / po;
    expected_post += po * plain_entropy(post);
  }
  return plain_entropy(w) - expected_post;
}

}  // namespace

TEST_SUITE("belief") {
  TEST_CASE("init matches the spec prior") {
    const auto g = Game::compile(make_estar_spec(5, 100));
    const Belief b = init_belief(*g);
    CHECK(b.size() == 2);
    CHECK(b.weight("h1") == 0.5);
    CHECK(entropy(b) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }

  TEST_CASE("hand-computed Bayes update") {
    const Belief b = make({0.5, 0.3, 0.2});
    const Belief post = update(b, std::map<std::string, double>{{"h0", 0.2}, {"h1", 0.5}, {"h2", 1.0}});
    // unnormalised 0.10, 0.15, 0.20 over 0.45
    CHECK(post.weight(0) == doctest::Approx(0.10 / 0.45).epsilon(1e-14));
    CHECK(post.weight(1) == doctest::Approx(0.15 / 0.45).epsilon(1e-14));
    CHECK(post.weight(2) == doctest::Approx(0.20 / 0.45).epsilon(1e-14));
    CHECK(std::abs(post.weights().sum() - 1.0) <= 1e-12);
    CHECK(post.map_id() == "h2");
  }

  TEST_CASE("zero likelihood eliminates exactly") {
    const Belief post = update(make({0.25, 0.25, 0.5}), Eigen::Vector3d(1.0, 0.0, 1.0));
    CHECK(post.weight(1) == 0.0);
    CHECK(post.support_size() == 2);
    CHECK(post.eliminated() == std::vector<std::string>{"h1"});
    CHECK(post.compacted().size() == 2);
    CHECK(post.compacted().ids() == std::vector<std::string>{"h0", "h2"});
  }

  TEST_CASE("contradiction") {
    CHECK_THROWS_AS(update(make({0.5, 0.5, 0.0}), Eigen::Vector3d(0.0, 0.0, 1.0)), ContradictionError);
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(make({0.5, 0.6}), ValidationError);
    CHECK_THROWS_AS(make({1.5, -0.5}), ValidationError);
    CHECK_THROWS_AS(update(make({0.5, 0.5}), Eigen::Vector2d(-1.0, 1.0)), ValidationError);
    CHECK_THROWS_AS(update(make({0.5, 0.5}), std::map<std::string, double>{{"h0", 1.0}}), ValidationError);
  }

  TEST_CASE("entropy examples") {
    CHECK(entropy(make({1.0, 0.0, 0.0})) == 0.0);
    for (int n : {2, 3, 7, 16}) {
      CHECK(entropy(make(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n))) ==
            doctest::Approx(std::log(n)).epsilon(1e-14));
    }
  }

  TEST_CASE("MAP ties go to the lowest index") { CHECK(make({0.4, 0.4, 0.2}).map_index() == 0); }

  TEST_CASE("expected information gain against brute force") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t H = 2 + trial % 6, O = 1 + trial % 4;
      std::vector<double> w(H);
      double s = 0;
      for (auto& v : w) s += (v = u(rng) + (trial % 5 == 0 ? 0.0 : 0.05));
      for (auto& v : w) v /= s;
      std::vector<std::vector<double>> lik(H, std::vector<double>(O));
      Eigen::MatrixXd model(static_cast<Eigen::Index>(H), static_cast<Eigen::Index>(O));
      for (std::size_t h = 0; h < H; ++h) {
        double rs = 0;
        for (auto& v : lik[h]) rs += (v = u(rng));
        for (std::size_t o = 0; o < O; ++o) {
          lik[h][o] /= rs;
          model(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(o)) = lik[h][o];
        }
      }
      const Belief b = make(w);
      const double g = expected_info_gain(b, model);
      CHECK(g == doctest::Approx(brute_gain(w, lik)).epsilon(1e-10));
      CHECK(g >= -1e-12);
      CHECK(g <= entropy(b) + 1e-12);
    }
  }

  TEST_CASE("a perfectly revealing probe gains the whole entropy") {
    const Belief b = make({0.5, 0.5});
    Eigen::Matrix2d reveal;
    reveal << 1, 0, 0, 1;
    CHECK(expected_info_gain(b, reveal) == doctest::Approx(std::log(2.0)));
    Eigen::Matrix2d blind;
    blind << 1, 0, 1, 0;
    CHECK(expected_info_gain(b, blind) == doctest::Approx(0.0));
  }
}
