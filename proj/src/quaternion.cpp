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

#include "qpr/quaternion.hpp"

#include <cstdio>
#include <ostream>

namespace qpr {

namespace {

void append_term(std::string& out, double v, const char* unit) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%+.17g", v);
  out += buf;
  out += unit;
}

}  // namespace

std::string to_string(const Quaternion& q) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", q.w);
  std::string out = buf;
  append_term(out, q.x, "i");
  append_term(out, q.y, "j");
  append_term(out, q.z, "k");
  return out;
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q) { return os << to_string(q); }

}  // namespace qpr
