#include "mcr/sampling.hpp"

#include <omp.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "json.hpp"

namespace mcr::sampling {

namespace {

constexpr double kDensityFloor = 1e-3;

double poly_term(double r, const DensityParams& p) {
  if (r <= p.k_r) return 1.0;
  const double t = 1.0 - (r - p.k_r) / (1.0 - p.k_r);
  return std::pow(t, static_cast<double>(p.degree));
}

struct DartBoard {
  int h, w;
  double cx, cy, half_min;
  const DensityParams& params;
  double scale;

  // radius per pixel of the accepted point living there, 0 if empty
  std::vector<float> rad_at;
  std::vector<uint8_t> bits;
  long count = 0;

  DartBoard(int h_, int w_, const DensityParams& p, double s)
      : h(h_), w(w_), cx(w_ / 2.0), cy(h_ / 2.0),
        half_min(std::min(h_, w_) / 2.0), params(p), scale(s),
        rad_at(static_cast<size_t>(h_) * w_, 0.f),
        bits(static_cast<size_t>(h_) * w_, 0) {}

  double norm_r(double y, double x) const {
    const double d = std::hypot(y - cy, x - cx);
    return std::min(1.0, d / half_min);
  }

  double density(double y, double x) const {
    const double r = norm_r(y, x);
    if (r <= params.k_r) return 1.0;
    return std::min(1.0, poly_term(r, params) * scale + kDensityFloor);
  }

  double radius(double y, double x) const {
    return 1.0 / std::sqrt(density(y, x));
  }

  bool in_calibration(int y, int x) const {
    return norm_r(y, x) <= params.k_r;
  }

  // Acceptance rule: candidate c is admissible iff for every accepted
  // non-calibration point p, dist(c,p) >= (radius(c) + radius(p)) / 2.
  bool admissible(int y, int x) const {
    const double rc = radius(y, x);
    // Radius grows with distance from k-space center, so the largest radius a
    // conflicting point can have at ring distance q is bounded by the radius
    // evaluated one ring further out.
    int qmax = 1;
    while (true) {
      const double rn = std::min(1.0, norm_r(y, x) + (qmax + 1) / half_min);
      double rp = 1.0 / std::sqrt(std::min(
                      1.0, poly_term(rn, params) * scale + kDensityFloor));
      if (rn <= params.k_r) rp = 1.0;
      if (0.5 * (rc + rp) <= static_cast<double>(qmax)) break;
      ++qmax;
      if (qmax > h + w) break;
    }
    const int y0 = std::max(0, y - qmax), y1 = std::min(h - 1, y + qmax);
    const int x0 = std::max(0, x - qmax), x1 = std::min(w - 1, x + qmax);
    for (int yy = y0; yy <= y1; ++yy) {
      const float* row = rad_at.data() + static_cast<size_t>(yy) * w;
      for (int xx = x0; xx <= x1; ++xx) {
        const float rp = row[xx];
        if (rp <= 0.f) continue;
        const double dy = yy - y, dx = xx - x;
        const double dist = std::sqrt(dy * dy + dx * dx);
        if (dist < 0.5 * (rc + static_cast<double>(rp))) return false;
      }
    }
    return true;
  }

  void accept(int y, int x) {
    const size_t i = static_cast<size_t>(y) * w + x;
    bits[i] = 1;
    rad_at[i] = static_cast<float>(radius(y, x));
    ++count;
  }
};

long run_darts(int h, int w, const DensityParams& params, double scale,
               uint64_t seed, std::vector<uint8_t>* out_bits) {
  DartBoard board(h, w, params, scale);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);

  // Calibration disc forced on; these points do not take part in the
  // minimum-distance rule.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (board.in_calibration(y, x)) {
        board.bits[static_cast<size_t>(y) * w + x] = 1;
        ++board.count;
      }

  // Bridson dart throwing seeded just outside the calibration disc.
  std::vector<std::pair<int, int>> active;
  {
    const int sy = h / 2;
    int sx = w / 2;
    while (sx < w && board.in_calibration(sy, sx)) ++sx;
    if (sx < w) {
      board.accept(sy, sx);
      active.emplace_back(sy, sx);
    }
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (!active.empty()) {
    std::uniform_int_distribution<size_t> pick(0, active.size() - 1);
    const size_t idx = pick(rng);
    const auto [ay, ax] = active[idx];
    const double ar = board.radius(ay, ax);
    bool found = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      const double ang = 2.0 * std::numbers::pi * unit(rng);
      const double dist = ar * (1.0 + unit(rng));
      const int cy = ay + static_cast<int>(std::lround(dist * std::sin(ang)));
      const int cx = ax + static_cast<int>(std::lround(dist * std::cos(ang)));
      if (cy < 0 || cy >= h || cx < 0 || cx >= w) continue;
      if (board.in_calibration(cy, cx)) continue;
      if (board.bits[static_cast<size_t>(cy) * w + cx]) continue;
      if (!board.admissible(cy, cx)) continue;
      board.accept(cy, cx);
      active.emplace_back(cy, cx);
      found = true;
      break;
    }
    if (!found) {
      active[idx] = active.back();
      active.pop_back();
    }
  }

  // Completion sweep: the active-list phase can leave gaps; fill any pixel
  // that is still admissible, in a seeded random order.
  std::vector<int> order;
  order.reserve(static_cast<size_t>(h) * w);
  for (int i = 0; i < h * w; ++i)
    if (!board.bits[static_cast<size_t>(i)]) order.push_back(i);
  std::shuffle(order.begin(), order.end(), rng);
  for (int i : order) {
    const int y = i / w, x = i % w;
    if (board.in_calibration(y, x)) continue;
    if (board.admissible(y, x)) board.accept(y, x);
  }

  if (out_bits) *out_bits = std::move(board.bits);
  return board.count;
}

}  // namespace

}  // namespace mcr::sampling

namespace mcr {
SamplingMask full_mask(int h, int w) {
  SamplingMask m;
  m.h = h;
  m.w = w;
  m.bits.assign(static_cast<size_t>(h) * w, 1);
  m.target_r = 1.0;
  m.achieved_r = 1.0;
  m.k_r = 0.5;
  m.degree = 1;
  return m;
}
}  // namespace mcr

namespace mcr::sampling {

DensityParams default_params(double target_r) {
  DensityParams p;
  p.target_r = target_r;
  if (target_r <= 10.0) {
    p.k_r = 0.14;
    p.degree = 5;
  } else if (target_r <= 20.0) {
    p.k_r = 0.10;
    p.degree = 9;
  } else if (target_r <= 30.0) {
    p.k_r = 0.10;
    p.degree = 10;
  } else if (target_r <= 40.0) {
    p.k_r = 0.10;
    p.degree = 15;
  } else {
    p.k_r = 0.06;
    p.degree = 20;
  }
  return p;
}

double density_profile(double r, const DensityParams& params, double scale) {
  if (r < 0.0 || r > 1.0)
    throw ParameterError("normalized radius outside [0,1]");
  if (params.k_r <= 0.0 || params.k_r > 0.5 || params.degree < 1)
    throw ParameterError("invalid density params");
  if (r <= params.k_r) return 1.0;
  return std::min(1.0, poly_term(r, params) * scale + kDensityFloor);
}

SamplingMask generate_mask(int height, int width, const DensityParams& params,
                           uint64_t seed) {
  if (height < 16 || width < 16 || height % 2 || width % 2)
    throw DimensionError("mask dims must be even and >= 16");
  if (params.target_r < 1.0)
    throw ParameterError("target acceleration must be >= 1");
  if (params.k_r <= 0.0 || params.k_r > 0.5 || params.degree < 1)
    throw ParameterError("invalid density params");

  SamplingMask m;
  m.h = height;
  m.w = width;
  m.target_r = params.target_r;
  m.k_r = params.k_r;
  m.degree = params.degree;
  m.seed = seed;

  const long total = static_cast<long>(height) * width;
  if (params.target_r == 1.0) {
    m.bits.assign(static_cast<size_t>(total), 1);
    m.achieved_r = 1.0;
    return m;
  }

  const double target_count = static_cast<double>(total) / params.target_r;
  const double tol = 0.05;

  // First guess for the density scale from the mean polynomial value, then
  // bisection in log space. The dart process is rerun with the same seed at
  // every trial scale, so the result is a deterministic function of the seed.
  double mean_poly = 0.0;
  long n_out = 0;
  long calib = 0;
  {
    const double cy = height / 2.0, cx = width / 2.0;
    const double half_min = std::min(height, width) / 2.0;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const double r =
            std::min(1.0, std::hypot(y - cy, x - cx) / half_min);
        if (r <= params.k_r) {
          ++calib;
        } else {
          mean_poly += poly_term(r, params);
          ++n_out;
        }
      }
    mean_poly /= static_cast<double>(n_out);
  }
  const double want_outside =
      std::max(1.0, target_count - static_cast<double>(calib));
  double s0 = want_outside / (static_cast<double>(n_out) * mean_poly);

  double lo = 1e-6, hi = 1e6;
  double best_err = 1e30, best_achieved = 0.0;
  std::vector<uint8_t> best_bits;
  double s = std::clamp(s0, lo, hi);
  for (int iter = 0; iter < 30; ++iter) {
    std::vector<uint8_t> bits;
    const long cnt = run_darts(height, width, params, s, seed, &bits);
    const double achieved = static_cast<double>(total) / cnt;
    const double err = std::abs(achieved - params.target_r) / params.target_r;
    if (err < best_err) {
      best_err = err;
      best_achieved = achieved;
      best_bits = std::move(bits);
    }
    if (err <= tol) break;
    if (cnt < target_count)
      lo = s;  // too sparse, raise density
    else
      hi = s;
    s = std::sqrt(lo * hi);
    if (iter == 0) {
      // re-anchor the bracket around the heuristic guess
      if (cnt < target_count) hi = std::min(hi, s0 * 64.0);
      else lo = std::max(lo, s0 / 64.0);
      s = std::sqrt(lo * hi);
    }
  }
  if (best_err > tol)
    throw CalibrationError(
        "mask calibration failed: best achieved R " +
            std::to_string(best_achieved) + " for target " +
            std::to_string(params.target_r),
        best_achieved);
  m.bits = std::move(best_bits);
  m.achieved_r = best_achieved;
  return m;
}

std::vector<SamplingMask> mask_bank(int height, int width,
                                    const DensityParams& params, int count,
                                    uint64_t base_seed) {
  if (count < 1) throw ParameterError("mask bank count must be >= 1");
  std::vector<SamplingMask> bank(static_cast<size_t>(count));
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      bank[static_cast<size_t>(i)] =
          generate_mask(height, width, params, base_seed + static_cast<uint64_t>(i));
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty())
        error = "mask " + std::to_string(i) + ": " + e.what();
    }
  }
  if (!error.empty()) throw CalibrationError(error, 0.0);
  return bank;
}

void save_mask(const SamplingMask& mask, const std::string& path_base) {
  std::ofstream bin(path_base + ".mask.bin", std::ios::binary);
  bin.write(reinterpret_cast<const char*>(mask.bits.data()),
            static_cast<std::streamsize>(mask.bits.size()));
  if (!bin) throw std::runtime_error("failed writing " + path_base + ".mask.bin");
  nlohmann::json j = {{"dims", {mask.h, mask.w}},
                      {"target_R", mask.target_r},
                      {"achieved_R", mask.achieved_r},
                      {"k_r", mask.k_r},
                      {"d", mask.degree},
                      {"seed", mask.seed}};
  std::ofstream js(path_base + ".mask.json");
  js << j.dump(2) << "\n";
}

SamplingMask load_mask(const std::string& path_base) {
  std::ifstream js(path_base + ".mask.json");
  if (!js) throw std::runtime_error("missing sidecar " + path_base + ".mask.json");
  nlohmann::json j;
  js >> j;
  SamplingMask m;
  m.h = j.at("dims").at(0);
  m.w = j.at("dims").at(1);
  m.target_r = j.at("target_R");
  m.achieved_r = j.at("achieved_R");
  m.k_r = j.at("k_r");
  m.degree = j.at("d");
  m.seed = j.at("seed");
  std::ifstream bin(path_base + ".mask.bin", std::ios::binary);
  if (!bin) throw std::runtime_error("missing " + path_base + ".mask.bin");
  m.bits.resize(static_cast<size_t>(m.h) * m.w);
  bin.read(reinterpret_cast<char*>(m.bits.data()),
           static_cast<std::streamsize>(m.bits.size()));
  if (bin.gcount() != static_cast<std::streamsize>(m.bits.size()))
    throw std::runtime_error("mask file too short: " + path_base);
  return m;
}

}  // namespace mcr::sampling
