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

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "qpr/harness.hpp"
#include "qpr/linalg.hpp"

namespace qpr {

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string ppm_token(std::istream& is) {
  std::string tok;
  while (true) {
    const int c = is.get();
    if (c == EOF) break;
    if (c == '#') {
      is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

std::size_t ppm_number(std::istream& is, const char* what) {
  const std::string tok = ppm_token(is);
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw std::runtime_error(std::string("PPM: bad ") + what);
  return std::stoul(tok);
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v * 255.0), 0.0, 255.0));
}

}  // namespace

Image read_ppm(std::istream& is) {
  if (ppm_token(is) != "P6") throw std::runtime_error("PPM: only binary P6 is supported");
  const std::size_t w = ppm_number(is, "width");
  const std::size_t h = ppm_number(is, "height");
  const std::size_t maxval = ppm_number(is, "maxval");
  if (maxval != 255) throw std::runtime_error("PPM: only maxval 255 is supported");
  if (w == 0 || h == 0) throw std::runtime_error("PPM: empty image");
  Image img(w, h);
  is.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (is.gcount() != static_cast<std::streamsize>(img.rgb.size())) throw std::runtime_error("PPM: truncated data");
  return img;
}

Image read_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_ppm(f);
}

void write_ppm(std::ostream& os, const Image& img) {
  os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
}

void write_ppm(const std::string& path, const Image& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_ppm(f, img);
}

double psnr(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height || a.rgb.size() != b.rgb.size())
    throw std::invalid_argument("psnr: image shapes differ");
  if (a.rgb.empty()) throw std::invalid_argument("psnr: empty images");
  double se = 0.0;
  for (std::size_t i = 0; i < a.rgb.size(); ++i) {
    const double diff = static_cast<double>(a.rgb[i]) - static_cast<double>(b.rgb[i]);
    se += diff * diff;
  }
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = se / static_cast<double>(a.rgb.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

QVector block_signal(const Image& img, std::size_t bx, std::size_t by, std::size_t block) {
  QVector v(block * block);
  for (std::size_t r = 0; r < block; ++r) {
    for (std::size_t c = 0; c < block; ++c) {
      const std::size_t x = bx * block + c;
      const std::size_t y = by * block + r;
      v[r * block + c] = {0.0, img.at(x, y, 0) / 255.0, img.at(x, y, 1) / 255.0, img.at(x, y, 2) / 255.0};
    }
  }
  return v;
}

double sigma3(const QVector& x) {
  const double nx = norm(x);
  if (!(nx > 0.0) || x.size() < 3) return 0.0;
  return singular_values(vrep(x * (1.0 / nx)))[2];
}

BlockOutcome recover_block(const QVector& pixels, std::size_t m, Algorithm algo, const SolverConfig& cfg,
                           std::uint64_t seed, bool exact) {
  if (!is_pure_algorithm(algo)) throw std::invalid_argument("image recovery needs a pure-signal algorithm");
  BlockOutcome out;
  out.estimate = QVector(pixels.size());
  const double scale = norm(pixels);
  if (!(scale > 0.0)) {
    // An all-black block: nothing to recover.
    out.record.low_rank = true;
    out.record.success = true;
    return out;
  }
  const QVector x = pixels * (1.0 / scale);
  out.record.sigma3 = sigma3(x);
  out.record.low_rank = out.record.sigma3 < kLowRankSigma3;

  QVector z;
  if (exact) {
    z = x;
  } else {
    const Ensemble e = sample_ensemble(m, x.size(), seed);
    z = run_algorithm(algo, e, observe(e, x), cfg).final;
  }
  out.estimate = sign_align(z, true) * scale;
  out.record.relative_error = norm(out.estimate - pixels) / scale;
  out.record.success = true;
  for (std::size_t j = 0; j < pixels.size() && out.record.success; ++j) {
    const auto& p = pixels[j];
    const auto& q = out.estimate[j];
    out.record.success = to_byte(p.x) == to_byte(q.x) && to_byte(p.y) == to_byte(q.y) && to_byte(p.z) == to_byte(q.z);
  }
  return out;
}

ImageResult image_experiment(const ImageJob& job) {
  const std::size_t b = job.block;
  const Image& img = job.image;
  if (b == 0) throw std::invalid_argument("block size must be >= 1");
  if (img.width == 0 || img.height == 0) throw std::invalid_argument("image is empty");
  if (img.width % b != 0 || img.height % b != 0) {
    throw std::invalid_argument("image size " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                                " is not divisible by the block size " + std::to_string(b));
  }
  if (!is_pure_algorithm(job.algo)) throw std::invalid_argument("image recovery needs a pure-signal algorithm");
  if (!(job.oversampling > 0.0)) throw std::invalid_argument("oversampling must be > 0");
  job.cfg.validate();
  SolverConfig cfg = job.cfg;
  cfg.backend = kernels::Backend::serial;

  const std::size_t bw = img.width / b;
  const std::size_t bh = img.height / b;
  const std::size_t count = bw * bh;
  const std::size_t m = measurement_count(job.oversampling, b * b);
  std::vector<BlockOutcome> outcomes(count);
  std::exception_ptr failure;
  const int threads = job.threads > 0 ? job.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t id = 0; id < static_cast<std::ptrdiff_t>(count); ++id) {
    try {
      const auto uid = static_cast<std::size_t>(id);
      const QVector pixels = block_signal(img, uid % bw, uid / bw, b);
      RandomStream rng(job.base_seed, {uid});
      outcomes[uid] = recover_block(pixels, m, job.algo, cfg, rng.engine()(), job.exact);
      outcomes[uid].record.block_id = uid;
    } catch (...) {
#pragma omp critical(qpr_image_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  ImageResult res;
  res.reconstruction = Image(img.width, img.height);
  for (std::size_t id = 0; id < count; ++id) {
    const std::size_t bx = id % bw;
    const std::size_t by = id / bw;
    const auto& est = outcomes[id].estimate;
    for (std::size_t r = 0; r < b; ++r) {
      for (std::size_t c = 0; c < b; ++c) {
        const auto& q = est[r * b + c];
        const std::size_t x = bx * b + c;
        const std::size_t y = by * b + r;
        res.reconstruction.at(x, y, 0) = to_byte(q.x);
        res.reconstruction.at(x, y, 1) = to_byte(q.y);
        res.reconstruction.at(x, y, 2) = to_byte(q.z);
      }
    }
    res.blocks.push_back(outcomes[id].record);
  }
  res.psnr = psnr(img, res.reconstruction);
  return res;
}

void write_block_csv(std::ostream& os, const std::vector<BlockRecord>& blocks) {
  const auto old = os.precision(17);
  os << "block_id,relative_error,sigma3,success_flag\n";
  for (const auto& r : blocks)
    os << r.block_id << ',' << r.relative_error << ',' << r.sigma3 << ',' << (r.success ? 1 : 0) << '\n';
  os.precision(old);
}

}  // namespace qpr
