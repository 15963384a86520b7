// Copyright 2026 The ldpq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPQ_PROBLEMS_H_
#define LDPQ_PROBLEMS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ldpq::problems {

enum class LossKind { kLogistic, kQuadratic };

std::string_view LossKindName(LossKind kind);
// Accepts "logistic" or "quadratic"; throws Error(kConfiguration) otherwise.
LossKind ParseLossKind(std::string_view name);

// One observation. Logistic points use (a, b) with b in {-1, +1}; quadratic
// points carry only a target vector.
struct DataPoint {
  Eigen::VectorXd a;
  double b = 0.0;
  Eigen::VectorXd target;

  static DataPoint Labeled(Eigen::VectorXd features, double label);
  static DataPoint Target(Eigen::VectorXd target);

  bool operator==(const DataPoint& other) const;
};

using Batch = std::vector<DataPoint>;

// log(1 + exp(-b a^T theta)) or 0.5 ||theta - target||^2.
double Loss(LossKind kind, const Eigen::VectorXd& theta, const DataPoint& x);
// -b sigmoid(-b a^T theta) a, or theta - target. Throws Error(kArgument) when
// the datum does not match the loss kind or dimension.
Eigen::VectorXd LossGradient(LossKind kind, const Eigen::VectorXd& theta,
                             const DataPoint& x);
// out += weight * LossGradient(kind, theta, x) without temporaries.
void AccumulateGradient(LossKind kind, const Eigen::VectorXd& theta,
                        const DataPoint& x, double weight,
                        Eigen::VectorXd& out);
// Mean gradient over a non-empty batch.
Eigen::VectorXd BatchGradient(LossKind kind, const Eigen::VectorXd& theta,
                              const Batch& batch);

// Append-only per-agent record of the batches acquired so far; round k holds
// exactly the batch acquired at round k.
class OnlineDataset {
 public:
  // `window`, when set, averages only the most recent `window` rounds.
  explicit OnlineDataset(LossKind kind, std::optional<int> window = {});

  void Append(Batch batch);
  int rounds() const { return static_cast<int>(rounds_.size()); }
  const Batch& At(int k) const;
  LossKind kind() const { return kind_; }

  // (1/(t+1)) sum_{k=0..t} BatchGradient(theta, round k), summed in
  // ascending k. Throws Error(kState) when round t has not been acquired.
  Eigen::VectorXd OnlineGradient(const Eigen::VectorXd& theta, int t) const;
  void OnlineGradientInto(const Eigen::VectorXd& theta, int t,
                          Eigen::VectorXd& out) const;

 private:
  LossKind kind_;
  std::optional<int> window_;
  std::vector<Batch> rounds_;
};

// Labeled corpus for logistic regression.
struct Corpus {
  std::vector<Eigen::VectorXd> features;
  std::vector<double> labels;

  std::size_t size() const { return labels.size(); }
  int dimension() const {
    return features.empty() ? 0 : static_cast<int>(features.front().size());
  }
};

// Header-less delimited text: label first, then features. Commas, tabs and
// spaces are all accepted as separators. Two distinct label values are
// mapped to -1 (smaller) and +1 (larger). Ragged rows, non-numeric fields and
// more than two labels are rejected with the offending line number.
Corpus LoadCorpus(const std::filesystem::path& path);
Corpus ParseCorpus(std::istream& in, const std::string& source_name);
void WriteCorpus(const Corpus& corpus, std::ostream& out);

struct GeneratorParams {
  int points = 2000;
  int dimension = 8;
  double margin = 1.0;
  // Every feature vector satisfies ||a||_1 <= feature_l1.
  double feature_l1 = 0.5;
  // Norm of the planted separator; 0 picks 4 * margin * dimension / feature_l1.
  double weight_norm = 0.0;
  // Probability of flipping each label after the margin filter.
  double label_noise = 0.0;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  Corpus corpus;
  Eigen::VectorXd planted;
};

// Draws features uniformly from a scaled cube, keeps points with
// |w^T a| >= margin for a random planted w, and labels them sign(w^T a) before
// optional label noise.
SyntheticCorpus MakeSeparableCorpus(const GeneratorParams& params);

// Bound d_l on ||grad l||_1: for logistic loss max ||a||_1 over the corpus.
double GradL1Bound(const Corpus& corpus);
// Largest ||a||_2^2 / 4 over the corpus; a Lipschitz constant of the
// per-datum logistic gradient.
double LogisticLipschitz(const Corpus& corpus);

// FNV-1a over labels and feature bits; identifies a corpus for caching.
std::uint64_t Fingerprint(const Corpus& corpus);

// Minimum of the mean logistic loss over the corpus, computed by damped
// Newton iterations to gradient norm <= 1e-10. Throws Error(kNumerical) when
// the corpus is separable (no finite minimizer) or the iteration stalls.
double LogisticOptimum(const Corpus& corpus, Eigen::VectorXd* argmin = nullptr);
// As LogisticOptimum, but reuses `cache_file` when it records the same
// corpus fingerprint, and rewrites it otherwise.
double CachedLogisticOptimum(const Corpus& corpus,
                             const std::filesystem::path& cache_file);

// Fraction of points with sign(a^T theta) == b (ties count as +1).
double Accuracy(const Eigen::VectorXd& theta, const Corpus& corpus);

// Deterministic per-(seed, agent, round) stream of batches.
class DataSource {
 public:
  virtual ~DataSource() = default;

  virtual LossKind kind() const = 0;
  virtual int dimension() const = 0;
  virtual int batch_size() const = 0;
  virtual Batch Draw(int t, int agent) const = 0;
  // `original` with one point replaced by a different one, deterministic in
  // (seed, agent, t, salt).
  virtual Batch Perturb(const Batch& original, int t, int agent,
                        std::uint64_t salt) const = 0;
};

// Uniform sampling with replacement from a shared corpus.
class CorpusSource final : public DataSource {
 public:
  CorpusSource(std::shared_ptr<const Corpus> corpus, int batch,
               std::uint64_t seed);

  LossKind kind() const override { return LossKind::kLogistic; }
  int dimension() const override { return corpus_->dimension(); }
  int batch_size() const override { return batch_; }
  Batch Draw(int t, int agent) const override;
  Batch Perturb(const Batch& original, int t, int agent,
                std::uint64_t salt) const override;

  const Corpus& corpus() const { return *corpus_; }

 private:
  std::shared_ptr<const Corpus> corpus_;
  int batch_;
  std::uint64_t seed_;
};

// Quadratic targets: agent i observes N(means[i], noise^2 I).
class GaussianTargetSource final : public DataSource {
 public:
  GaussianTargetSource(std::vector<Eigen::VectorXd> means, double noise,
                       int batch, std::uint64_t seed);

  LossKind kind() const override { return LossKind::kQuadratic; }
  int dimension() const override;
  int batch_size() const override { return batch_; }
  Batch Draw(int t, int agent) const override;
  Batch Perturb(const Batch& original, int t, int agent,
                std::uint64_t salt) const override;

  const std::vector<Eigen::VectorXd>& means() const { return means_; }
  double noise() const { return noise_; }

 private:
  std::vector<Eigen::VectorXd> means_;
  double noise_;
  int batch_;
  std::uint64_t seed_;
};

// Population objective F used for diagnostics.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual double Value(const Eigen::VectorXd& theta) const = 0;
  virtual Eigen::VectorXd Gradient(const Eigen::VectorXd& theta) const = 0;
  virtual double OptimalValue() const = 0;
  // F(theta) - F*.
  virtual double Gap(const Eigen::VectorXd& theta) const {
    return Value(theta) - OptimalValue();
  }
};

// Mean logistic loss over a corpus, with a precomputed optimum.
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(std::shared_ptr<const Corpus> corpus, double optimum);

  double Value(const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd Gradient(const Eigen::VectorXd& theta) const override;
  double OptimalValue() const override { return optimum_; }

 private:
  std::shared_ptr<const Corpus> corpus_;
  double optimum_;
};

// F(theta) = (1/m) sum_i E 0.5 ||theta - b_i||^2 with b_i ~ N(mu_i, s^2 I),
// minimized at the mean of the mu_i.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(const std::vector<Eigen::VectorXd>& means, double noise);

  double Value(const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd Gradient(const Eigen::VectorXd& theta) const override;
  double OptimalValue() const override { return optimum_; }
  double Gap(const Eigen::VectorXd& theta) const override;

  const Eigen::VectorXd& minimizer() const { return center_; }

 private:
  Eigen::VectorXd center_;
  double optimum_;
};

struct ProblemSpec {
  LossKind kind = LossKind::kQuadratic;
  int dimension = 4;
  int batch = 1;
  std::optional<int> window;

  // Logistic: corpus file, or the synthetic generator when `corpus` is empty.
  std::filesystem::path corpus;
  std::filesystem::path test_corpus;
  GeneratorParams generator;
  // Held-out points generated when no test corpus file is given.
  int test_points = 2000;
  std::filesystem::path optimum_cache;

  // Quadratic: agent means ~ N(0, target_spread^2 I), per-datum noise.
  double target_spread = 1.0;
  double target_noise = 1.0;

  // Overrides the computed gradient bound (required for quadratic audits).
  std::optional<double> grad_l1_bound;
};

struct Problem {
  LossKind kind = LossKind::kQuadratic;
  int dimension = 0;
  std::shared_ptr<const DataSource> source;
  std::shared_ptr<const Objective> objective;
  std::shared_ptr<const Corpus> test_set;  // logistic only
  std::optional<double> grad_l1_bound;
  std::optional<double> lipschitz;
  std::vector<std::string> warnings;
};

// Builds the data stream and population objective. Agent means for the
// quadratic problem are drawn from `seed`, as are all data draws.
Problem MakeProblem(const ProblemSpec& spec, int agents, std::uint64_t seed);

}  // namespace ldpq::problems

#endif  // LDPQ_PROBLEMS_H_
