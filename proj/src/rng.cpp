#include "favar/rng.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include <Eigen/Cholesky>

namespace favar {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream RngStream::sub(std::uint64_t tag) const {
  return RngStream(splitmix64(key_ ^ splitmix64(tag + 0x632be59bd9b4e019ULL)));
}

std::mt19937_64 RngStream::engine() const {
  std::seed_seq seq{static_cast<std::uint32_t>(key_),
                    static_cast<std::uint32_t>(key_ >> 32),
                    0x9e3779b9u, 0x85ebca6bu};
  return std::mt19937_64(seq);
}

double draw_uniform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng);
}

double draw_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

double draw_gamma(std::mt19937_64& rng, double shape) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(rng);
}

int draw_categorical(std::mt19937_64& rng, const VectorXd& weights) {
  const double total = weights.sum();
  double u = draw_uniform(rng) * total;
  for (int k = 0; k < weights.size(); ++k) {
    u -= weights(k);
    if (u <= 0.0) return k;
  }
  return static_cast<int>(weights.size()) - 1;
}

namespace {

const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);

double std_normal_cdf(double x) { return boost::math::cdf(kStdNormal, x); }

double std_normal_quantile(double p) {
  return boost::math::quantile(kStdNormal, p);
}

// Robert (1995) one-sided rejection for a lower tail at lo > 0.
double draw_tail_normal(std::mt19937_64& rng, double lo) {
  const double alpha = 0.5 * (lo + std::sqrt(lo * lo + 4.0));
  for (;;) {
    std::exponential_distribution<double> ex(alpha);
    const double x = lo + ex(rng);
    const double diff = x - alpha;
    if (draw_uniform(rng) <= std::exp(-0.5 * diff * diff)) return x;
  }
}

}  // namespace

double draw_truncated_std_normal(std::mt19937_64& rng, double lo, double hi) {
  if (!(lo < hi)) throw Error(ErrorCode::SingularPosterior,
                              "truncated normal: empty region");
  constexpr double kTail = 6.0;
  if (lo > kTail && !std::isfinite(hi)) return draw_tail_normal(rng, lo);
  if (hi < -kTail && !std::isfinite(lo)) return -draw_tail_normal(rng, -hi);
  if (lo > kTail || hi < -kTail) {
    // far two-sided band: tilt from the near edge, reject on the far one
    const bool flip = hi < 0.0;
    const double a = flip ? -hi : lo;
    const double b = flip ? -lo : hi;
    for (;;) {
      const double x = draw_tail_normal(rng, a);
      if (x <= b) return flip ? -x : x;
    }
  }
  const double plo = std_normal_cdf(lo);
  const double phi = std_normal_cdf(hi);
  if (phi - plo < 1e-14) {
    // numerically thin slab; fall back to midpoint-tilted rejection
    const double mid = 0.5 * (std::max(lo, -38.0) + std::min(hi, 38.0));
    return mid;
  }
  const double u = plo + draw_uniform(rng) * (phi - plo);
  return std_normal_quantile(std::min(std::max(u, 1e-300), 1.0 - 1e-16));
}

double draw_truncated_normal(std::mt19937_64& rng, double mean, double sd,
                             double lo, double hi) {
  const double zlo = (lo - mean) / sd;
  const double zhi = (hi - mean) / sd;
  return mean + sd * draw_truncated_std_normal(rng, zlo, zhi);
}

double draw_inverse_gamma(std::mt19937_64& rng, double shape, double scale) {
  const double g = std::max(draw_gamma(rng, shape), 1e-300);
  return scale / g;
}

double draw_inverse_gamma_truncated(std::mt19937_64& rng, double shape,
                                    double scale, double cap, double floor) {
  if (shape <= 0.0)
    throw Error(ErrorCode::NonPositiveShape, "inverse gamma: shape <= 0");
  if (scale <= floor * 1e-6) return floor;  // degenerate zero-scale path
  // X <= cap  <=>  Y = 1/X >= 1/cap with Y ~ Gamma(shape, rate = scale)
  const boost::math::gamma_distribution<double> g(shape, 1.0 / scale);
  const double y0 = 1.0 / cap;
  const double p0 = boost::math::cdf(g, y0);
  const double u = p0 + draw_uniform(rng) * (1.0 - p0);
  if (u >= 1.0) return floor;
  const double y = boost::math::quantile(g, u);
  if (!(y > 0.0) || !std::isfinite(y)) return floor;
  return std::min(std::max(1.0 / y, floor), cap);
}

VectorXd draw_std_normal_vector(std::mt19937_64& rng, int n) {
  VectorXd z(n);
  for (int i = 0; i < n; ++i) z(i) = draw_normal(rng);
  return z;
}

VectorXd draw_mvn(std::mt19937_64& rng, const VectorXd& mean,
                  const MatrixXd& cov) {
  const MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::LLT<MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) {
    // retry with a jitter before giving up
    Eigen::LLT<MatrixXd> llt2(sym + 1e-12 * sym.diagonal().mean() *
                                        MatrixXd::Identity(sym.rows(), sym.cols()));
    if (llt2.info() != Eigen::Success)
      throw Error(ErrorCode::SingularPosterior, "mvn draw: covariance not SPD");
    return mean + llt2.matrixL() * draw_std_normal_vector(rng, mean.size());
  }
  return mean + llt.matrixL() * draw_std_normal_vector(rng, mean.size());
}

}  // namespace favar
