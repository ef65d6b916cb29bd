// Copyright 2026 The ldpopt Authors
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

#ifndef LDPOPT_TESTS_TEST_UTIL_H_
#define LDPOPT_TESTS_TEST_UTIL_H_

#include "ldpopt/sampling.hpp"

namespace ldpopt::test {

using ::ldpopt::RandomCanonicalPair;
using ::ldpopt::RandomChannel;
using ::ldpopt::RandomDistribution;
using ::ldpopt::RandomDistributionWithTies;

}  // namespace ldpopt::test

#endif  // LDPOPT_TESTS_TEST_UTIL_H_
