// tests/test_util.h

// Copyright 2026  mfc-mdd authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MDD_TESTS_TEST_UTIL_H_
#define MDD_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mdd/acoustic_model.h"
#include "mdd/phone_inventory.h"
#include "mdd/tensor.h"

namespace mdd {
namespace testing {

/// Model small enough for finite-difference checks: `phones` output phones
/// (plus the boundary slot), 2-dim features.
ModelConfig TinyConfig(int phones = 3, std::uint64_t seed = 1, int hidden = 3);

Tensor RandomTensor(const Tensor::Shape& shape, std::mt19937_64& rng, double scale = 1.0);

/// Row-normalised log distributions, rows x cols.
Tensor RandomLogProbs(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                      double sharpness = 1.0);

/// Parameters drawn from a wider range than the default initialiser so the
/// model is not close to uniform.
ModelParams RandomParams(const ModelConfig& config, std::mt19937_64& rng, double scale = 0.5);

Utterance MakeUtterance(const std::string& id, Tensor features, std::vector<int> canonical,
                        std::vector<int> reference);

std::vector<int> RandomSequence(std::mt19937_64& rng, int length, int alphabet);

/// Fresh empty directory under the system temp dir.
std::string TempDir(const std::string& name);

}  // namespace testing
}  // namespace mdd

#endif  // MDD_TESTS_TEST_UTIL_H_
