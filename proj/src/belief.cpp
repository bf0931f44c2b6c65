#include "hra/belief.hpp"

#include <cmath>

#include "hra/errors.hpp"

namespace hra {

Belief::Belief(std::shared_ptr<const std::vector<std::string>> ids, Eigen::VectorXd weights)
    : ids_(std::move(ids)), weights_(std::move(weights)) {
  if (static_cast<Eigen::Index>(ids_->size()) != weights_.size()) {
    throw ValidationError("belief needs one weight per hypothesis");
  }
  if ((weights_.array() < 0.0).any()) throw ValidationError("belief weights must be nonnegative");
  if (std::abs(weights_.sum() - 1.0) > 1e-12) throw ValidationError("belief weights must sum to 1");
}

double Belief::weight(const std::string& id) const {
  for (std::size_t i = 0; i < ids_->size(); ++i) {
    if ((*ids_)[i] == id) return weight(i);
  }
  throw ValidationError("unknown hypothesis '" + id + "'");
}

std::size_t Belief::support_size() const { return static_cast<std::size_t>((weights_.array() > 0.0).count()); }

std::size_t Belief::map_index() const {
  Eigen::Index best = 0;
  weights_.maxCoeff(&best);  // first maximum
  return static_cast<std::size_t>(best);
}

std::vector<std::string> Belief::eliminated() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!in_support(i)) out.push_back((*ids_)[i]);
  }
  return out;
}

Belief Belief::compacted() const {
  auto ids = std::make_shared<std::vector<std::string>>();
  Eigen::VectorXd w(static_cast<Eigen::Index>(support_size()));
  Eigen::Index j = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (in_support(i)) {
      ids->push_back((*ids_)[i]);
      w(j++) = weight(i);
    }
  }
  return Belief(std::move(ids), std::move(w));
}

std::vector<std::pair<std::string, double>> Belief::entries() const {
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < size(); ++i) out.emplace_back((*ids_)[i], weight(i));
  return out;
}

Belief init_belief(const Game& game) {
  return Belief(std::make_shared<const std::vector<std::string>>(game.hypothesis_ids()), game.prior());
}

Belief update(const Belief& b, const Eigen::Ref<const Eigen::VectorXd>& likelihoods) {
  if (likelihoods.size() != b.weights().size()) throw ValidationError("likelihood vector size mismatch");
  if ((likelihoods.array() < 0.0).any()) throw ValidationError("likelihoods must be nonnegative");
  Eigen::VectorXd post = b.weights().cwiseProduct(likelihoods);
  const double mass = post.sum();
  if (!(mass > 0.0)) throw ContradictionError("observation is inconsistent with every hypothesis in the support");
  post /= mass;
  // Renormalise once more so the sum is 1 to the last ulp-scale error.
  post /= post.sum();
  return Belief(std::make_shared<const std::vector<std::string>>(b.ids()), std::move(post));
}

Belief update(const Belief& b, const std::map<std::string, double>& likelihoods) {
  Eigen::VectorXd lik(static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto it = likelihoods.find(b.ids()[i]);
    if (it == likelihoods.end()) throw ValidationError("missing likelihood for '" + b.ids()[i] + "'");
    lik(static_cast<Eigen::Index>(i)) = it->second;
  }
  return update(b, lik);
}

double entropy(const Eigen::Ref<const Eigen::VectorXd>& w) {
  return -w.unaryExpr([](double v) { return v > 0.0 ? v * std::log(v) : 0.0; }).sum();
}

double entropy(const Belief& b) { return entropy(b.weights()); }

double expected_info_gain(const Belief& b, const Eigen::Ref<const Eigen::MatrixXd>& outcome_model) {
  if (outcome_model.rows() != b.weights().size()) throw ValidationError("outcome model needs one row per hypothesis");
  const Eigen::VectorXd& w = b.weights();
  const Eigen::VectorXd p_outcome = outcome_model.transpose() * w;
  double posterior_entropy = 0.0;
  for (Eigen::Index o = 0; o < outcome_model.cols(); ++o) {
    if (p_outcome(o) <= 0.0) continue;
    const Eigen::VectorXd post = w.cwiseProduct(outcome_model.col(o)) / p_outcome(o);
    posterior_entropy += p_outcome(o) * entropy(post);
  }
  return entropy(w) - posterior_entropy;
}

}  // namespace hra
