// Copyright 2026 The qpr Authors
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


#include <gtest/gtest.h>

#include <sstream>

#include "qpr/quaternion.hpp"
#include "test_util.hpp"

namespace qpr {
namespace {

constexpr Quaternion kI = Quaternion::i();
constexpr Quaternion kJ = Quaternion::j();
constexpr Quaternion kK = Quaternion::k();

TEST(Quaternion, HamiltonTable) {
  EXPECT_EQ(kI * kI, Quaternion(-1.0));
  EXPECT_EQ(kJ * kJ, Quaternion(-1.0));
  EXPECT_EQ(kK * kK, Quaternion(-1.0));
  EXPECT_EQ(kI * kJ * kK, Quaternion(-1.0));
  EXPECT_EQ(kI * kJ, kK);
  EXPECT_EQ(kJ * kI, -kK);
  EXPECT_EQ(kJ * kK, kI);
  EXPECT_EQ(kK * kI, kJ);
}

TEST(Quaternion, WorkedProduct) {
  // (1 + 2i + 3j + 4k)(5 + 6i + 7j + 8k), expanded by hand.
  EXPECT_EQ(Quaternion(1, 2, 3, 4) * Quaternion(5, 6, 7, 8), Quaternion(-60, 12, 30, 24));
}

TEST(Quaternion, ConjugateAndNormAreMultiplicative) {
  RandomStream rng(11);
  for (int t = 0; t < 100; ++t) {
    const Quaternion p = testing::random_quaternion(rng);
    const Quaternion q = testing::random_quaternion(rng);
    const Quaternion a = conj(p * q);
    const Quaternion b = conj(q) * conj(p);
    EXPECT_NEAR(abs2(a - b), 0.0, 1e-24);
    EXPECT_NEAR(abs(p * q), abs(p) * abs(q), 1e-12 * abs(p) * abs(q));
  }
}

TEST(Quaternion, InverseAndSign) {
  const Quaternion q(1, -2, 0.5, 3);
  const Quaternion r = q * inverse(q);
  EXPECT_NEAR(r.w, 1.0, 1e-15);
  EXPECT_NEAR(abs2(imag(r)), 0.0, 1e-30);
  EXPECT_THROW(inverse(Quaternion{}), std::domain_error);
  EXPECT_EQ(sign(Quaternion{}), Quaternion::one());
  EXPECT_NEAR(abs(sign(q)), 1.0, 1e-15);
  EXPECT_EQ(sign(0.0), 1.0);
  EXPECT_EQ(sign(-2.0), -1.0);
}

TEST(Quaternion, PureParts) {
  const Quaternion q(1.5, 2, 3, 4);
  EXPECT_FALSE(q.is_pure());
  EXPECT_TRUE(imag(q).is_pure());
  EXPECT_EQ(real(q), 1.5);
  const auto p = parts(q);
  EXPECT_EQ(p.re, 1.5);
  EXPECT_EQ(p.pk, 4.0);
}

TEST(Quaternion, Formatting) {
  EXPECT_EQ(to_string(Quaternion(1, -2, 0.5, 0)), "1-2i+0.5j+0k");
  std::ostringstream os;
  os << Quaternion(0, 1, 0, 0);
  EXPECT_EQ(os.str(), "0+1i+0j+0k");
}

}  // namespace
}  // namespace qpr
