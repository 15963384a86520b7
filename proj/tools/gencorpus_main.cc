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

// Writes a synthetic labeled corpus and a held-out split from the same
// planted separator.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "ldpq/error.h"
#include "ldpq/problems.h"

int main(int argc, char** argv) {
  CLI::App app{"generate a synthetic logistic-regression corpus"};
  ldpq::problems::GeneratorParams params;
  int test_points = 2000;
  std::string train_path = "train.csv";
  std::string test_path = "test.csv";
  app.add_option("--points", params.points, "training points");
  app.add_option("--test-points", test_points, "held-out points");
  app.add_option("--dimension", params.dimension, "feature dimension");
  app.add_option("--margin", params.margin, "separation margin");
  app.add_option("--feature-l1", params.feature_l1, "bound on ||a||_1");
  app.add_option("--weight-norm", params.weight_norm,
                 "planted separator norm (0 picks a default)");
  app.add_option("--label-noise", params.label_noise, "label flip probability");
  app.add_option("--seed", params.seed, "generator seed");
  app.add_option("--train", train_path, "training output");
  app.add_option("--test", test_path, "held-out output");
  CLI11_PARSE(app, argc, argv);

  try {
    const int train_points = params.points;
    params.points += test_points;
    const auto all = ldpq::problems::MakeSeparableCorpus(params);
    ldpq::problems::Corpus train, test;
    for (int k = 0; k < params.points; ++k) {
      auto& dst = k < train_points ? train : test;
      dst.features.push_back(all.corpus.features[k]);
      dst.labels.push_back(all.corpus.labels[k]);
    }
    std::ofstream a(train_path), b(test_path);
    ldpq::problems::WriteCorpus(train, a);
    ldpq::problems::WriteCorpus(test, b);
    if (!a || !b) throw ldpq::Error(ldpq::ErrorKind::kIo, "write failed");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
