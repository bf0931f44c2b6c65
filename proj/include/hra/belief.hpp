#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hra/game.hpp"

namespace hra {

// Probability map over a declared hypothesis family. Immutable: updates return
// a new Belief. Eliminated hypotheses keep an explicit zero until compacted.
class Belief {
 public:
  Belief(std::shared_ptr<const std::vector<std::string>> ids, Eigen::VectorXd weights);

  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<std::string>& ids() const { return *ids_; }
  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  double weight(std::size_t i) const { return weights_(static_cast<Eigen::Index>(i)); }
  double weight(const std::string& id) const;
  std::size_t support_size() const;
  bool in_support(std::size_t i) const { return weight(i) > 0.0; }

  // Highest weight; ties go to the lowest index.
  std::size_t map_index() const;
  const std::string& map_id() const { return ids().at(map_index()); }

  std::vector<std::string> eliminated() const;
  Belief compacted() const;

  std::vector<std::pair<std::string, double>> entries() const;

 private:
  std::shared_ptr<const std::vector<std::string>> ids_;
  Eigen::VectorXd weights_;
};

Belief init_belief(const Game& game);

// Exact Bayes: posterior(h) ∝ likelihood(h) · b(h). Zero likelihood gives
// exactly zero. Throws ContradictionError when no mass survives.
Belief update(const Belief& b, const Eigen::Ref<const Eigen::VectorXd>& likelihoods);
Belief update(const Belief& b, const std::map<std::string, double>& likelihoods);

// Shannon entropy in nats.
double entropy(const Belief& b);
double entropy(const Eigen::Ref<const Eigen::VectorXd>& weights);

// H(b) − Σ_o P(o) H(b | o). `outcome_model` has one row per hypothesis and one
// column per observation outcome; rows of hypotheses in the support must be
// probability distributions.
double expected_info_gain(const Belief& b, const Eigen::Ref<const Eigen::MatrixXd>& outcome_model);

}  // namespace hra
