#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uucc/matrix.hpp"
#include "uucc/rng.hpp"

namespace uucc {

/// Labeled examples, labels in {+1, -1}.
struct LabeledPool {
  Matrix features;
  std::vector<int> labels;
  std::string provenance;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return features.cols(); }
  std::size_t count_positive() const noexcept;
};

/// Class conditionals N(+mu, I) and N(-mu, I) with mu = (separation / 2) e_1.
/// The Bayes classifier for any class prior of 1/2 is sign(x_1).
struct GaussianSource {
  std::size_t dim = 1;
  double separation = 0.0;

  /// Throws ConfigError for dim == 0 or a negative / non-finite separation.
  void validate() const;
  void sample(int label, Rng& rng, std::span<double> out) const;
  /// Draws n rows from the mixture with the given positive prior. With `iid` each
  /// label is Bernoulli(prior); otherwise exactly round(prior * n) rows are positive.
  /// Row order is random in both cases. Labels are written to `labels` if non-null.
  Matrix sample_mixture(double prior, std::size_t n, bool iid, Rng& rng, std::vector<int>* labels = nullptr) const;
};

/// n_per_class positives followed by n_per_class negatives, deterministic in seed.
LabeledPool gaussian_pool(std::size_t dim, double separation, std::size_t n_per_class, std::uint64_t seed);

/// What training code is allowed to see: two unlabeled sets and their priors.
struct UnlabeledSets {
  Matrix x_tr;        // drawn at prior theta
  Matrix x_tr_prime;  // drawn at prior theta_prime
  double theta = 0.0;
  double theta_prime = 0.0;
  double pi_p = 0.5;
};

struct UUSamplingOptions {
  /// Bernoulli(theta) labels per draw instead of exact round(theta * n) counts.
  bool iid_priors = false;
  /// Use disjoint rows for the two sets when the pool is large enough.
  bool prefer_disjoint = true;
};

/// Two unlabeled training sets plus a labeled test split. The labels behind the
/// unlabeled sets are kept apart and are only reachable through hidden_labels().
class UUDataset {
 public:
  UUDataset(UnlabeledSets unlabeled, std::vector<int> hidden, std::vector<int> hidden_prime, LabeledPool test,
            bool disjoint);

  const UnlabeledSets& unlabeled() const noexcept { return unlabeled_; }
  const LabeledPool& test() const noexcept { return test_; }
  bool disjoint() const noexcept { return disjoint_; }

  /// Validation only: true labels of x_tr and x_tr_prime.
  const std::vector<int>& hidden_labels() const noexcept { return hidden_; }
  const std::vector<int>& hidden_labels_prime() const noexcept { return hidden_prime_; }

  /// Key-value manifest: priors, counts, provenance.
  void write_manifest(std::ostream& out, std::uint64_t seed) const;

 private:
  UnlabeledSets unlabeled_;
  std::vector<int> hidden_;
  std::vector<int> hidden_prime_;
  LabeledPool test_;
  bool disjoint_ = false;
};

/// Holds out round(test_fraction * |pool|) rows as a test split with positive share
/// pi_p, then draws x_tr (n rows at prior theta) and x_tr_prime (n_prime rows at
/// prior theta_prime) from the rest. Rows are sampled without replacement within
/// a set; the two sets are disjoint when capacity allows and may share rows
/// otherwise. Throws CapacityError naming the short class.
UUDataset make_uu_datasets(const LabeledPool& pool, double theta, double theta_prime, double pi_p, std::size_t n,
                           std::size_t n_prime, double test_fraction, std::uint64_t seed,
                           const UUSamplingOptions& options = {});

}  // namespace uucc
