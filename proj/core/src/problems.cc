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

#include "ldpq/problems.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "ldpq/error.h"
#include "ldpq/random.h"

namespace ldpq::problems {
namespace {

constexpr double kOptimumGradTolerance = 1e-10;
constexpr int kNewtonIterations = 200;
constexpr double kMinCurvature = 1e-8;

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(-margin)).
double MarginLoss(double margin) {
  if (margin > 0.0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

void CheckDatum(LossKind kind, const Eigen::VectorXd& theta,
                const DataPoint& x) {
  if (kind == LossKind::kLogistic) {
    if (x.a.size() != theta.size() || x.target.size() != 0) {
      throw Error(ErrorKind::kArgument,
                  "logistic loss needs a labeled point of matching dimension");
    }
  } else if (x.target.size() != theta.size() || x.a.size() != 0) {
    throw Error(ErrorKind::kArgument,
                "quadratic loss needs a target of matching dimension");
  }
}

std::uint64_t FnvMix(std::uint64_t h, double value) {
  std::uint64_t bits;
  std::memcpy(&bits, &value, sizeof bits);
  for (int k = 0; k < 8; ++k) {
    h ^= (bits >> (8 * k)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  const auto is_sep = [](char c) {
    return c == ',' || c == ' ' || c == '\t' || c == ';' || c == '\r';
  };
  while (pos < line.size()) {
    while (pos < line.size() && is_sep(line[pos]) && line[pos] != ',') ++pos;
    std::size_t end = pos;
    while (end < line.size() && !is_sep(line[end])) ++end;
    if (end > pos) fields.push_back(line.substr(pos, end - pos));
    pos = end;
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos < line.size() && (line[pos] == ',' || line[pos] == ';')) {
      ++pos;
    }
  }
  return fields;
}

double ParseNumber(std::string_view field, const std::string& where) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw Error(ErrorKind::kConfiguration,
                where + ": not a finite number: '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::string_view LossKindName(LossKind kind) {
  return kind == LossKind::kLogistic ? "logistic" : "quadratic";
}

LossKind ParseLossKind(std::string_view name) {
  if (name == "logistic") return LossKind::kLogistic;
  if (name == "quadratic") return LossKind::kQuadratic;
  throw Error(ErrorKind::kConfiguration,
              "unknown problem kind '" + std::string(name) + "'");
}

DataPoint DataPoint::Labeled(Eigen::VectorXd features, double label) {
  DataPoint x;
  x.a = std::move(features);
  x.b = label;
  return x;
}

DataPoint DataPoint::Target(Eigen::VectorXd target) {
  DataPoint x;
  x.target = std::move(target);
  return x;
}

bool DataPoint::operator==(const DataPoint& other) const {
  return b == other.b && a.size() == other.a.size() && a == other.a &&
         target.size() == other.target.size() && target == other.target;
}

double Loss(LossKind kind, const Eigen::VectorXd& theta, const DataPoint& x) {
  CheckDatum(kind, theta, x);
  if (kind == LossKind::kLogistic) return MarginLoss(x.b * x.a.dot(theta));
  return 0.5 * (theta - x.target).squaredNorm();
}

void AccumulateGradient(LossKind kind, const Eigen::VectorXd& theta,
                        const DataPoint& x, double weight,
                        Eigen::VectorXd& out) {
  CheckDatum(kind, theta, x);
  if (kind == LossKind::kLogistic) {
    const double s = Sigmoid(-x.b * x.a.dot(theta));
    out.noalias() -= (weight * x.b * s) * x.a;
  } else {
    out.noalias() += weight * (theta - x.target);
  }
}

Eigen::VectorXd LossGradient(LossKind kind, const Eigen::VectorXd& theta,
                             const DataPoint& x) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
  AccumulateGradient(kind, theta, x, 1.0, g);
  return g;
}

Eigen::VectorXd BatchGradient(LossKind kind, const Eigen::VectorXd& theta,
                              const Batch& batch) {
  if (batch.empty()) throw Error(ErrorKind::kArgument, "empty batch");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const auto& x : batch) AccumulateGradient(kind, theta, x, w, g);
  return g;
}

OnlineDataset::OnlineDataset(LossKind kind, std::optional<int> window)
    : kind_(kind), window_(window) {
  if (window_ && *window_ < 1) {
    throw Error(ErrorKind::kArgument, "online window must be >= 1");
  }
}

void OnlineDataset::Append(Batch batch) {
  if (batch.empty()) throw Error(ErrorKind::kArgument, "empty batch");
  rounds_.push_back(std::move(batch));
}

const Batch& OnlineDataset::At(int k) const {
  if (k < 0 || k >= rounds()) {
    throw Error(ErrorKind::kState, "round " + std::to_string(k) +
                                       " has not been acquired");
  }
  return rounds_[k];
}

Eigen::VectorXd OnlineDataset::OnlineGradient(const Eigen::VectorXd& theta,
                                              int t) const {
  Eigen::VectorXd out(theta.size());
  OnlineGradientInto(theta, t, out);
  return out;
}

void OnlineDataset::OnlineGradientInto(const Eigen::VectorXd& theta, int t,
                                       Eigen::VectorXd& out) const {
  if (t < 0 || t >= rounds()) {
    throw Error(ErrorKind::kState, "online gradient at round " +
                                       std::to_string(t) + " but only " +
                                       std::to_string(rounds()) +
                                       " rounds acquired");
  }
  const int first = window_ ? std::max(0, t + 1 - *window_) : 0;
  out.setZero(theta.size());
  Eigen::VectorXd round_grad(theta.size());
  for (int k = first; k <= t; ++k) {
    const Batch& batch = rounds_[k];
    round_grad.setZero();
    const double w = 1.0 / static_cast<double>(batch.size());
    for (const auto& x : batch) AccumulateGradient(kind_, theta, x, w, round_grad);
    out += round_grad;
  }
  out /= static_cast<double>(t + 1 - first);
}

Corpus ParseCorpus(std::istream& in, const std::string& source_name) {
  Corpus corpus;
  std::vector<double> raw_labels;
  std::string line;
  int line_no = 0;
  int width = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = SplitFields(line);
    if (fields.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (width < 0) {
      width = static_cast<int>(fields.size());
      if (width < 2) {
        throw Error(ErrorKind::kConfiguration,
                    where + ": need a label and at least one feature");
      }
    } else if (static_cast<int>(fields.size()) != width) {
      throw Error(ErrorKind::kConfiguration,
                  where + ": ragged row with " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(width));
    }
    raw_labels.push_back(ParseNumber(fields[0], where));
    Eigen::VectorXd a(width - 1);
    for (int k = 1; k < width; ++k) a(k - 1) = ParseNumber(fields[k], where);
    corpus.features.push_back(std::move(a));
  }
  if (raw_labels.empty()) {
    throw Error(ErrorKind::kConfiguration, source_name + ": empty corpus");
  }
  const std::set<double> distinct(raw_labels.begin(), raw_labels.end());
  if (distinct.size() > 2) {
    throw Error(ErrorKind::kConfiguration,
                source_name + ": more than two distinct labels");
  }
  const double high = *distinct.rbegin();
  corpus.labels.reserve(raw_labels.size());
  for (double raw : raw_labels) {
    if (distinct.size() == 1) {
      corpus.labels.push_back(raw > 0.0 ? 1.0 : -1.0);
    } else {
      corpus.labels.push_back(raw == high ? 1.0 : -1.0);
    }
  }
  return corpus;
}

Corpus LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kConfiguration,
                "cannot open corpus '" + path.string() + "'");
  }
  return ParseCorpus(in, path.string());
}

void WriteCorpus(const Corpus& corpus, std::ostream& out) {
  char buf[64];
  for (std::size_t n = 0; n < corpus.size(); ++n) {
    out << (corpus.labels[n] > 0 ? "1" : "-1");
    for (Eigen::Index k = 0; k < corpus.features[n].size(); ++k) {
      auto res = std::to_chars(buf, buf + sizeof buf, corpus.features[n](k));
      out << ',' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

SyntheticCorpus MakeSeparableCorpus(const GeneratorParams& p) {
  if (p.points < 1 || p.dimension < 1 || !(p.margin > 0.0) ||
      !(p.feature_l1 > 0.0) || p.label_noise < 0.0 || p.label_noise >= 0.5) {
    throw Error(ErrorKind::kConfiguration, "invalid corpus generator parameters");
  }
  RandomStream rng = RandomStream::Derive(p.seed, StreamPurpose::kCorpus);
  const double scale = p.feature_l1 / p.dimension;
  const double norm = p.weight_norm > 0.0
                          ? p.weight_norm
                          : 4.0 * p.margin * p.dimension / p.feature_l1;

  SyntheticCorpus out;
  out.planted.resize(p.dimension);
  for (int k = 0; k < p.dimension; ++k) out.planted(k) = rng.Normal();
  out.planted *= norm / out.planted.norm();

  // Rejection sampling; give up if the margin is unreachable.
  const long max_attempts = 1000L * p.points + 100000L;
  long attempts = 0;
  while (static_cast<int>(out.corpus.size()) < p.points) {
    if (++attempts > max_attempts) {
      throw Error(ErrorKind::kConfiguration,
                  "corpus generator cannot meet the requested margin");
    }
    Eigen::VectorXd a(p.dimension);
    for (int k = 0; k < p.dimension; ++k) a(k) = scale * (2.0 * rng.Uniform() - 1.0);
    const double s = out.planted.dot(a);
    if (std::abs(s) < p.margin) continue;
    double label = s > 0.0 ? 1.0 : -1.0;
    if (p.label_noise > 0.0 && rng.Uniform() < p.label_noise) label = -label;
    out.corpus.features.push_back(std::move(a));
    out.corpus.labels.push_back(label);
  }
  return out;
}

double GradL1Bound(const Corpus& corpus) {
  double bound = 0.0;
  for (const auto& a : corpus.features) bound = std::max(bound, a.lpNorm<1>());
  return bound;
}

double LogisticLipschitz(const Corpus& corpus) {
  double l = 0.0;
  for (const auto& a : corpus.features) l = std::max(l, 0.25 * a.squaredNorm());
  return l;
}

std::uint64_t Fingerprint(const Corpus& corpus) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t n = 0; n < corpus.size(); ++n) {
    h = FnvMix(h, corpus.labels[n]);
    for (Eigen::Index k = 0; k < corpus.features[n].size(); ++k) {
      h = FnvMix(h, corpus.features[n](k));
    }
  }
  return h;
}

double LogisticOptimum(const Corpus& corpus, Eigen::VectorXd* argmin) {
  if (corpus.size() == 0) throw Error(ErrorKind::kConfiguration, "empty corpus");
  const int d = corpus.dimension();
  const double n = static_cast<double>(corpus.size());
  auto value = [&](const Eigen::VectorXd& theta) {
    double f = 0.0;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
      f += MarginLoss(corpus.labels[k] * corpus.features[k].dot(theta));
    }
    return f / n;
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  double f = value(theta);
  for (int iter = 0; iter < kNewtonIterations; ++iter) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t k = 0; k < corpus.size(); ++k) {
      const auto& a = corpus.features[k];
      const double s = Sigmoid(-corpus.labels[k] * a.dot(theta));
      grad.noalias() -= (corpus.labels[k] * s) * a;
      hess.selfadjointView<Eigen::Lower>().rankUpdate(a, s * (1.0 - s));
    }
    grad /= n;
    hess = hess.selfadjointView<Eigen::Lower>();
    hess /= n;
    if (grad.norm() <= kOptimumGradTolerance) {
      // On separable data the gradient vanishes only because theta ran off
      // to infinity; the curvature collapses with it.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess, Eigen::EigenvaluesOnly);
      if (eig.eigenvalues().minCoeff() < kMinCurvature) break;
      if (argmin) *argmin = theta;
      return f;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd step = ldlt.solve(-grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite() ||
        step.dot(grad) >= 0.0) {
      step = -grad;
    }
    double alpha = 1.0;
    double next = value(theta + step);
    while (next > f + 1e-4 * alpha * step.dot(grad) && alpha > 1e-12) {
      alpha *= 0.5;
      next = value(theta + alpha * step);
    }
    theta += alpha * step;
    f = next;
    if (theta.norm() > 1e8) break;
  }
  throw Error(ErrorKind::kNumerical,
              "logistic optimum did not converge; the corpus may be separable");
}

double CachedLogisticOptimum(const Corpus& corpus,
                             const std::filesystem::path& cache_file) {
  const std::uint64_t print = Fingerprint(corpus);
  {
    std::ifstream in(cache_file);
    std::string key;
    std::uint64_t stored = 0;
    double optimum = 0.0;
    if (in >> key >> std::hex >> stored >> std::dec && key == "fingerprint" &&
        in >> key >> optimum && key == "optimum" && stored == print) {
      return optimum;
    }
  }
  const double optimum = LogisticOptimum(corpus);
  std::ofstream out(cache_file);
  if (out) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, optimum);
    out << "fingerprint " << std::hex << print << std::dec << "\n"
        << "optimum " << std::string_view(buf, res.ptr - buf) << "\n";
  }
  return optimum;
}

double Accuracy(const Eigen::VectorXd& theta, const Corpus& corpus) {
  if (corpus.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const double predicted = corpus.features[k].dot(theta) >= 0.0 ? 1.0 : -1.0;
    if (predicted == corpus.labels[k]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(corpus.size());
}

CorpusSource::CorpusSource(std::shared_ptr<const Corpus> corpus, int batch,
                           std::uint64_t seed)
    : corpus_(std::move(corpus)), batch_(batch), seed_(seed) {
  if (!corpus_ || corpus_->size() == 0) {
    throw Error(ErrorKind::kConfiguration, "corpus source needs a non-empty corpus");
  }
  if (batch_ < 1) throw Error(ErrorKind::kConfiguration, "batch must be >= 1");
}

Batch CorpusSource::Draw(int t, int agent) const {
  RandomStream rng = RandomStream::Derive(seed_, StreamPurpose::kData,
                                          static_cast<std::uint64_t>(agent),
                                          static_cast<std::uint64_t>(t));
  Batch batch;
  batch.reserve(batch_);
  for (int k = 0; k < batch_; ++k) {
    const auto idx = rng.Below(corpus_->size());
    batch.push_back(DataPoint::Labeled(corpus_->features[idx], corpus_->labels[idx]));
  }
  return batch;
}

Batch CorpusSource::Perturb(const Batch& original, int t, int agent,
                            std::uint64_t salt) const {
  if (original.empty()) throw Error(ErrorKind::kArgument, "empty batch");
  RandomStream rng = RandomStream::Derive(
      seed_, StreamPurpose::kPerturbation, static_cast<std::uint64_t>(agent),
      static_cast<std::uint64_t>(t) | (salt << 32));
  Batch out = original;
  const auto slot = rng.Below(out.size());
  for (int attempt = 0; attempt < 64; ++attempt) {
    const auto idx = rng.Below(corpus_->size());
    DataPoint candidate =
        DataPoint::Labeled(corpus_->features[idx], corpus_->labels[idx]);
    if (!(candidate == original[slot])) {
      out[slot] = std::move(candidate);
      return out;
    }
  }
  throw Error(ErrorKind::kConfiguration,
              "could not find a replacement point different from the original");
}

GaussianTargetSource::GaussianTargetSource(std::vector<Eigen::VectorXd> means,
                                           double noise, int batch,
                                           std::uint64_t seed)
    : means_(std::move(means)), noise_(noise), batch_(batch), seed_(seed) {
  if (means_.empty()) throw Error(ErrorKind::kConfiguration, "no agent means");
  if (batch_ < 1) throw Error(ErrorKind::kConfiguration, "batch must be >= 1");
  if (noise_ < 0.0) throw Error(ErrorKind::kConfiguration, "noise must be >= 0");
}

int GaussianTargetSource::dimension() const {
  return static_cast<int>(means_.front().size());
}

Batch GaussianTargetSource::Draw(int t, int agent) const {
  if (agent < 0 || agent >= static_cast<int>(means_.size())) {
    throw Error(ErrorKind::kArgument, "agent index out of range");
  }
  RandomStream rng = RandomStream::Derive(seed_, StreamPurpose::kData,
                                          static_cast<std::uint64_t>(agent),
                                          static_cast<std::uint64_t>(t));
  Batch batch;
  batch.reserve(batch_);
  for (int k = 0; k < batch_; ++k) {
    Eigen::VectorXd target = means_[agent];
    for (Eigen::Index j = 0; j < target.size(); ++j) target(j) += noise_ * rng.Normal();
    batch.push_back(DataPoint::Target(std::move(target)));
  }
  return batch;
}

Batch GaussianTargetSource::Perturb(const Batch& original, int t, int agent,
                                    std::uint64_t salt) const {
  if (original.empty()) throw Error(ErrorKind::kArgument, "empty batch");
  RandomStream rng = RandomStream::Derive(
      seed_, StreamPurpose::kPerturbation, static_cast<std::uint64_t>(agent),
      static_cast<std::uint64_t>(t) | (salt << 32));
  Batch out = original;
  const auto slot = rng.Below(out.size());
  Eigen::VectorXd target = means_.at(agent);
  const double scale = noise_ > 0.0 ? noise_ : 1.0;
  for (Eigen::Index j = 0; j < target.size(); ++j) target(j) += scale * rng.Normal();
  out[slot] = DataPoint::Target(std::move(target));
  return out;
}

LogisticObjective::LogisticObjective(std::shared_ptr<const Corpus> corpus,
                                     double optimum)
    : corpus_(std::move(corpus)), optimum_(optimum) {}

double LogisticObjective::Value(const Eigen::VectorXd& theta) const {
  double f = 0.0;
  for (std::size_t k = 0; k < corpus_->size(); ++k) {
    f += MarginLoss(corpus_->labels[k] * corpus_->features[k].dot(theta));
  }
  return f / static_cast<double>(corpus_->size());
}

Eigen::VectorXd LogisticObjective::Gradient(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
  for (std::size_t k = 0; k < corpus_->size(); ++k) {
    const double s = Sigmoid(-corpus_->labels[k] * corpus_->features[k].dot(theta));
    g.noalias() -= (corpus_->labels[k] * s) * corpus_->features[k];
  }
  return g / static_cast<double>(corpus_->size());
}

QuadraticObjective::QuadraticObjective(const std::vector<Eigen::VectorXd>& means,
                                       double noise) {
  if (means.empty()) throw Error(ErrorKind::kArgument, "no agent means");
  center_ = Eigen::VectorXd::Zero(means.front().size());
  for (const auto& mu : means) center_ += mu;
  center_ /= static_cast<double>(means.size());
  double spread = 0.0;
  for (const auto& mu : means) spread += (mu - center_).squaredNorm();
  spread /= static_cast<double>(means.size());
  optimum_ = 0.5 * spread +
             0.5 * static_cast<double>(center_.size()) * noise * noise;
}

double QuadraticObjective::Value(const Eigen::VectorXd& theta) const {
  return Gap(theta) + optimum_;
}

Eigen::VectorXd QuadraticObjective::Gradient(const Eigen::VectorXd& theta) const {
  return theta - center_;
}

double QuadraticObjective::Gap(const Eigen::VectorXd& theta) const {
  return 0.5 * (theta - center_).squaredNorm();
}

Problem MakeProblem(const ProblemSpec& spec, int agents, std::uint64_t seed) {
  if (spec.batch < 1) throw Error(ErrorKind::kConfiguration, "batch must be >= 1");
  if (agents < 1) throw Error(ErrorKind::kConfiguration, "need at least one agent");
  Problem problem;
  problem.kind = spec.kind;

  if (spec.kind == LossKind::kLogistic) {
    std::shared_ptr<const Corpus> train;
    std::shared_ptr<const Corpus> test;
    if (!spec.corpus.empty()) {
      train = std::make_shared<Corpus>(LoadCorpus(spec.corpus));
      if (!spec.test_corpus.empty()) {
        test = std::make_shared<Corpus>(LoadCorpus(spec.test_corpus));
      } else {
        problem.warnings.push_back("no test corpus; held-out accuracy unavailable");
      }
    } else {
      GeneratorParams params = spec.generator;
      params.dimension = spec.dimension;
      const int train_points = params.points;
      params.points = train_points + std::max(spec.test_points, 0);
      SyntheticCorpus all = MakeSeparableCorpus(params);
      auto tr = std::make_shared<Corpus>();
      auto te = std::make_shared<Corpus>();
      for (int k = 0; k < params.points; ++k) {
        Corpus& dst = k < train_points ? *tr : *te;
        dst.features.push_back(all.corpus.features[k]);
        dst.labels.push_back(all.corpus.labels[k]);
      }
      train = tr;
      if (te->size() > 0) test = te;
    }
    if (train->dimension() != spec.dimension) {
      throw Error(ErrorKind::kConfiguration,
                  "corpus has dimension " + std::to_string(train->dimension()) +
                      " but the problem declares " + std::to_string(spec.dimension));
    }
    if (test && test->dimension() != spec.dimension) {
      throw Error(ErrorKind::kConfiguration, "test corpus dimension mismatch");
    }
    const double optimum = spec.optimum_cache.empty()
                               ? LogisticOptimum(*train)
                               : CachedLogisticOptimum(*train, spec.optimum_cache);
    problem.dimension = spec.dimension;
    problem.source = std::make_shared<CorpusSource>(train, spec.batch, seed);
    problem.objective = std::make_shared<LogisticObjective>(train, optimum);
    problem.test_set = test;
    problem.grad_l1_bound = spec.grad_l1_bound.value_or(GradL1Bound(*train));
    problem.lipschitz = LogisticLipschitz(*train);
    return problem;
  }

  if (spec.dimension < 1) throw Error(ErrorKind::kConfiguration, "dimension must be >= 1");
  RandomStream rng = RandomStream::Derive(seed, StreamPurpose::kProblem);
  std::vector<Eigen::VectorXd> means(agents);
  for (auto& mu : means) {
    mu.resize(spec.dimension);
    for (int k = 0; k < spec.dimension; ++k) mu(k) = spec.target_spread * rng.Normal();
  }
  problem.dimension = spec.dimension;
  problem.objective = std::make_shared<QuadraticObjective>(means, spec.target_noise);
  problem.source = std::make_shared<GaussianTargetSource>(
      std::move(means), spec.target_noise, spec.batch, seed);
  problem.lipschitz = 1.0;
  problem.grad_l1_bound = spec.grad_l1_bound;
  if (spec.grad_l1_bound) {
    problem.warnings.push_back(
        "quadratic gradients are unbounded globally; the configured grad_l1_bound "
        "holds only on the region the iterates visit");
  } else {
    problem.warnings.push_back(
        "quadratic problem without grad_l1_bound; analytic privacy bounds unavailable");
  }
  return problem;
}

}  // namespace ldpq::problems
