#include "uucc/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "uucc/errors.hpp"
#include "uucc/report.hpp"

namespace uucc {
namespace {

std::size_t count_label(std::span<const int> labels, int label) {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

std::size_t rounded(double x) { return static_cast<std::size_t>(std::llround(x)); }

std::size_t draw_positive_count(double prior, std::size_t n, bool iid, Rng& rng) {
  if (!iid) return rounded(prior * static_cast<double>(n));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) k += rng.bernoulli(prior) ? 1 : 0;
  return k;
}

void check_prior(const char* name, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

std::size_t LabeledPool::count_positive() const noexcept { return count_label(labels, 1); }

void GaussianSource::validate() const {
  if (dim == 0) throw ConfigError("gaussian source needs dim >= 1");
  if (!std::isfinite(separation) || separation < 0.0) throw ConfigError("gaussian separation must be >= 0");
}

void GaussianSource::sample(int label, Rng& rng, std::span<double> out) const {
  for (double& v : out) v = rng.normal();
  out[0] += (label > 0 ? 0.5 : -0.5) * separation;
}

Matrix GaussianSource::sample_mixture(double prior, std::size_t n, bool iid, Rng& rng,
                                      std::vector<int>* labels) const {
  std::vector<int> y(n, -1);
  if (iid) {
    for (auto& v : y) v = rng.bernoulli(prior) ? 1 : -1;
  } else {
    const std::size_t k = rounded(prior * static_cast<double>(n));
    std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(std::min(k, n)), 1);
    rng.shuffle(std::span<int>(y));
  }
  Matrix x(n, dim);
  for (std::size_t i = 0; i < n; ++i) sample(y[i], rng, x.row(i));
  if (labels) *labels = std::move(y);
  return x;
}

LabeledPool gaussian_pool(std::size_t dim, double separation, std::size_t n_per_class, std::uint64_t seed) {
  GaussianSource source{dim, separation};
  source.validate();
  if (n_per_class == 0) throw ConfigError("gaussian pool needs n_per_class >= 1");
  LabeledPool pool;
  pool.features = Matrix(2 * n_per_class, dim);
  pool.labels.resize(2 * n_per_class);
  Rng rng(seed);
  for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
    const int label = i < n_per_class ? 1 : -1;
    pool.labels[i] = label;
    source.sample(label, rng, pool.features.row(i));
  }
  pool.provenance = "gaussian(dim=" + std::to_string(dim) + ", separation=" + format_real(separation) +
                    ", n_per_class=" + std::to_string(n_per_class) + ", seed=" + std::to_string(seed) + ")";
  return pool;
}

UUDataset::UUDataset(UnlabeledSets unlabeled, std::vector<int> hidden, std::vector<int> hidden_prime,
                     LabeledPool test, bool disjoint)
    : unlabeled_(std::move(unlabeled)),
      hidden_(std::move(hidden)),
      hidden_prime_(std::move(hidden_prime)),
      test_(std::move(test)),
      disjoint_(disjoint) {
  if (unlabeled_.x_tr.rows() == 0 || unlabeled_.x_tr_prime.rows() == 0)
    throw InsufficientDataError("both unlabeled sets need at least one row");
}

void UUDataset::write_manifest(std::ostream& out, std::uint64_t seed) const {
  write_kv(out, "seed", static_cast<std::size_t>(seed));
  write_kv(out, "theta", unlabeled_.theta);
  write_kv(out, "theta_prime", unlabeled_.theta_prime);
  write_kv(out, "pi_p", unlabeled_.pi_p);
  write_kv(out, "n", unlabeled_.x_tr.rows());
  write_kv(out, "n_prime", unlabeled_.x_tr_prime.rows());
  write_kv(out, "n_positive_hidden", count_label(hidden_, 1));
  write_kv(out, "n_prime_positive_hidden", count_label(hidden_prime_, 1));
  write_kv(out, "test_size", test_.size());
  write_kv(out, "test_positive", test_.count_positive());
  write_kv(out, "dim", unlabeled_.x_tr.cols());
  write_kv(out, "disjoint", disjoint_ ? std::string_view("true") : std::string_view("false"));
  write_kv(out, "provenance", test_.provenance);
}

UUDataset make_uu_datasets(const LabeledPool& pool, double theta, double theta_prime, double pi_p, std::size_t n,
                           std::size_t n_prime, double test_fraction, std::uint64_t seed,
                           const UUSamplingOptions& options) {
  check_prior("theta", theta);
  check_prior("theta_prime", theta_prime);
  check_prior("pi_p", pi_p);
  if (n == 0 || n_prime == 0) throw ConfigError("unlabeled set sizes must be >= 1");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must lie in [0, 1)");
  if (pool.labels.size() != pool.features.rows()) throw ShapeError("pool labels and features disagree in length");

  Rng rng(seed);
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < pool.size(); ++i) (pool.labels[i] > 0 ? pos : neg).push_back(i);
  rng.shuffle(std::span<std::size_t>(pos));
  rng.shuffle(std::span<std::size_t>(neg));

  const std::size_t test_total = rounded(test_fraction * static_cast<double>(pool.size()));
  const std::size_t test_pos = rounded(pi_p * static_cast<double>(test_total));
  const std::size_t test_neg = test_total - test_pos;
  if (test_pos > pos.size()) throw CapacityError("not enough positive examples for the test split");
  if (test_neg > neg.size()) throw CapacityError("not enough negative examples for the test split");

  std::vector<std::size_t> test_rows(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(test_pos));
  test_rows.insert(test_rows.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(test_neg));
  rng.shuffle(std::span<std::size_t>(test_rows));
  std::vector<std::size_t> pos_rest(pos.begin() + static_cast<std::ptrdiff_t>(test_pos), pos.end());
  std::vector<std::size_t> neg_rest(neg.begin() + static_cast<std::ptrdiff_t>(test_neg), neg.end());

  const std::size_t k = draw_positive_count(theta, n, options.iid_priors, rng);
  const std::size_t k_prime = draw_positive_count(theta_prime, n_prime, options.iid_priors, rng);
  const std::size_t m = n - k;
  const std::size_t m_prime = n_prime - k_prime;

  auto require = [](std::size_t need, std::size_t have, const char* cls) {
    if (need > have) {
      throw CapacityError(std::string("not enough ") + cls + " examples: need " + std::to_string(need) +
                          " in one set, pool has " + std::to_string(have) + " after the test split");
    }
  };
  require(k, pos_rest.size(), "positive");
  require(k_prime, pos_rest.size(), "positive");
  require(m, neg_rest.size(), "negative");
  require(m_prime, neg_rest.size(), "negative");

  const bool disjoint =
      options.prefer_disjoint && k + k_prime <= pos_rest.size() && m + m_prime <= neg_rest.size();

  std::vector<std::size_t> rows(pos_rest.begin(), pos_rest.begin() + static_cast<std::ptrdiff_t>(k));
  rows.insert(rows.end(), neg_rest.begin(), neg_rest.begin() + static_cast<std::ptrdiff_t>(m));
  std::vector<std::size_t> rows_prime;
  if (disjoint) {
    rows_prime.assign(pos_rest.begin() + static_cast<std::ptrdiff_t>(k),
                      pos_rest.begin() + static_cast<std::ptrdiff_t>(k + k_prime));
    rows_prime.insert(rows_prime.end(), neg_rest.begin() + static_cast<std::ptrdiff_t>(m),
                      neg_rest.begin() + static_cast<std::ptrdiff_t>(m + m_prime));
  } else {
    rng.shuffle(std::span<std::size_t>(pos_rest));
    rng.shuffle(std::span<std::size_t>(neg_rest));
    rows_prime.assign(pos_rest.begin(), pos_rest.begin() + static_cast<std::ptrdiff_t>(k_prime));
    rows_prime.insert(rows_prime.end(), neg_rest.begin(), neg_rest.begin() + static_cast<std::ptrdiff_t>(m_prime));
  }
  rng.shuffle(std::span<std::size_t>(rows));
  rng.shuffle(std::span<std::size_t>(rows_prime));

  auto labels_of = [&](const std::vector<std::size_t>& idx) {
    std::vector<int> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = pool.labels[idx[i]];
    return out;
  };

  UnlabeledSets sets;
  sets.x_tr = pool.features.gather_rows(rows);
  sets.x_tr_prime = pool.features.gather_rows(rows_prime);
  sets.theta = theta;
  sets.theta_prime = theta_prime;
  sets.pi_p = pi_p;

  LabeledPool test;
  test.features = pool.features.gather_rows(test_rows);
  test.labels = labels_of(test_rows);
  test.provenance = pool.provenance;

  return UUDataset(std::move(sets), labels_of(rows), labels_of(rows_prime), std::move(test), disjoint);
}

}  // namespace uucc
