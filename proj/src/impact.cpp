#include "favar/impact.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "favar/rng.hpp"

namespace favar {

ImpactPriors impact_priors(const ModelSpec& spec, const PriorConfig& priors) {
  const int n = spec.n_var();
  const int r = spec.n_endogenous();
  ImpactPriors p;
  p.mean = MatrixXd::Constant(n, n, priors.impact_mean);
  p.variance = MatrixXd::Constant(n, n, priors.impact_variance);
  for (int i = r; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      p.mean(i, j) = priors.proxy_relevance_mean;
      p.variance(i, j) = priors.proxy_relevance_variance;
    }
    p.mean(i, i) = priors.proxy_noise_mean;
    p.variance(i, i) = priors.proxy_noise_variance;
  }
  return p;
}

namespace {

std::vector<int> column_permutation(int n, int col) {
  std::vector<int> perm;
  perm.reserve(n);
  perm.push_back(col);
  for (int j = 0; j < n; ++j)
    if (j != col) perm.push_back(j);
  return perm;
}

MatrixXd permute_both(const MatrixXd& B, const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  MatrixXd out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(a, b) = B(perm[a], perm[b]);
  return out;
}

}  // namespace

ColumnTransform column_to_uw(const MatrixXd& B, int col,
                             const ImpactPattern& pattern) {
  const int n = static_cast<int>(B.rows());
  ColumnTransform t;
  t.col = col;
  t.perm = column_permutation(n, col);
  const MatrixXd Bp = permute_both(B, t.perm);
  const VectorXd b12 = Bp.row(0).tail(n - 1).transpose();
  const MatrixXd B22 = Bp.bottomRightCorner(n - 1, n - 1);
  t.w = Bp.col(0).tail(n - 1);
  Eigen::FullPivLU<MatrixXd> lu(B22);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularPosterior,
                "impact transform: B22 not invertible");
  t.u = Bp(0, 0) - b12.dot(lu.solve(t.w));
  for (int j = 1; j < n; ++j)
    if (pattern.at(t.perm[j], col) != Restriction::Zero)
      t.free_idx.push_back(j - 1);
  return t;
}

VectorXd column_from_uw(const MatrixXd& B, const ColumnTransform& t) {
  const int n = static_cast<int>(B.rows());
  const MatrixXd Bp = permute_both(B, t.perm);
  const VectorXd b12 = Bp.row(0).tail(n - 1).transpose();
  const MatrixXd B22 = Bp.bottomRightCorner(n - 1, n - 1);
  VectorXd column(n);
  column(0) = t.u + b12.dot(B22.fullPivLu().solve(t.w));
  column.tail(n - 1) = t.w;
  return column;  // permuted order: entry a belongs to row t.perm[a]
}

VectorXd draw_sign_truncated_mvn(std::mt19937_64& rng, const VectorXd& mean,
                                 const MatrixXd& cov,
                                 const std::vector<Restriction>& tags,
                                 const VectorXd& start) {
  const int k = static_cast<int>(mean.size());
  if (k == 0) return VectorXd();
  const auto in_region = [&](const VectorXd& v) {
    for (int i = 0; i < k; ++i)
      if (!satisfies(v(i), tags[i])) return false;
    return true;
  };

  // fast path: plain rejection from the untruncated normal
  const MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::LLT<MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::SingularPosterior,
                "truncated mvn: covariance not positive definite");
  const MatrixXd L = llt.matrixL();
  for (int attempt = 0; attempt < 64; ++attempt) {
    const VectorXd v = mean + L * draw_std_normal_vector(rng, k);
    if (in_region(v)) return v;
  }

  // sequential-conditional scans: each coordinate from its exact univariate
  // truncated-normal full conditional; palindromic order keeps the kernel
  // reversible so the caller's anchor-sign gate stays exact
  const MatrixXd precision = llt.solve(MatrixXd::Identity(k, k));
  VectorXd x = start;
  for (int i = 0; i < k; ++i) {
    if (satisfies(x(i), tags[i])) continue;
    x(i) = tags[i] == Restriction::Positive ? 1e-8 : -1e-8;
  }
  const auto update_coord = [&](int i) {
    double lin = 0.0;
    for (int j = 0; j < k; ++j)
      if (j != i) lin += precision(i, j) * (x(j) - mean(j));
    const double cond_mean = mean(i) - lin / precision(i, i);
    const double cond_sd = std::sqrt(1.0 / precision(i, i));
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    if (tags[i] == Restriction::Positive) lo = 0.0;
    if (tags[i] == Restriction::Negative) hi = 0.0;
    x(i) = draw_truncated_normal(rng, cond_mean, cond_sd, lo, hi);
  };
  const int scans = 6;
  for (int scan = 0; scan < scans; ++scan) {
    for (int i = 0; i < k; ++i) update_coord(i);
    for (int i = k - 1; i >= 0; --i) update_coord(i);
  }
  return x;
}

namespace {

double log_u_kernel(double u, int T, double gamma1, double gamma2) {
  return -T * std::log(std::abs(u)) -
         0.5 * (gamma1 / u + gamma2 / (u * u));
}

// appends one lobe's grid (geometrically centered on the kernel mode) to the
// proposal support
void append_lobe(std::vector<double>& grid, double lo, double hi, double mode,
                 double sd, int points) {
  const double eps = 1e-10 * std::max(std::abs(mode), sd);
  double a = std::max(lo, mode - 8.0 * sd);
  double b = std::min(hi, mode + 8.0 * sd);
  if (mode > 0.0) a = std::max(a, eps);
  if (mode < 0.0) b = std::min(b, -eps);
  if (!(a < b)) return;
  const double step = (b - a) / (points - 1);
  for (int i = 0; i < points; ++i) grid.push_back(a + i * step);
}

}  // namespace

double sample_u(std::mt19937_64& rng, double u_current, int T, double gamma1,
                double gamma2, double offset, double prior_mean,
                double prior_var, Restriction anchor_tag,
                ImpactDiagnostics& diag) {
  gamma2 = std::max(gamma2, 1e-300);
  // admissible u region induced by the sign tag on the anchor entry
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  if (anchor_tag == Restriction::Positive) lo = -offset;
  if (anchor_tag == Restriction::Negative) hi = -offset;

  // kernel modes solve -T u^2 + (gamma1/2) u + gamma2 = 0
  const double disc = std::sqrt(0.25 * gamma1 * gamma1 + 4.0 * T * gamma2);
  const double mode_pos = (0.5 * gamma1 + disc) / (2.0 * T);
  const double mode_neg = (0.5 * gamma1 - disc) / (2.0 * T);

  const auto laplace_sd = [&](double m) {
    const double d2 = T / (m * m) - gamma1 / (m * m * m) -
                      3.0 * gamma2 / (m * m * m * m);
    if (d2 >= 0.0) return std::abs(m);  // flat kernel; fall back to |mode|
    return 1.0 / std::sqrt(-d2);
  };

  std::vector<double> grid;
  grid.reserve(1024);
  append_lobe(grid, lo, hi, mode_pos, laplace_sd(mode_pos), 512);
  append_lobe(grid, lo, hi, mode_neg, laplace_sd(mode_neg), 512);
  if (grid.empty()) {
    // region excludes both 8-sd windows; anchor a window at the region edge
    const double edge = std::isfinite(lo) ? lo : hi;
    const double sd = laplace_sd(edge > 0.0 ? mode_pos : mode_neg);
    if (std::isfinite(lo))
      append_lobe(grid, lo, lo + 16.0 * sd, lo + 8.0 * sd, sd, 512);
    else
      append_lobe(grid, hi - 16.0 * sd, hi, hi - 8.0 * sd, sd, 512);
    if (grid.empty()) return u_current;
  }

  VectorXd logw(static_cast<int>(grid.size()));
  double max_lw = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < grid.size(); ++i) {
    logw(static_cast<int>(i)) = log_u_kernel(grid[i], T, gamma1, gamma2);
    max_lw = std::max(max_lw, logw(static_cast<int>(i)));
  }
  VectorXd w(logw.size());
  for (int i = 0; i < logw.size(); ++i) w(i) = std::exp(logw(i) - max_lw);
  const int bin = draw_categorical(rng, w);
  // uniform jitter inside the bin
  double half = 0.0;
  if (bin + 1 < static_cast<int>(grid.size()))
    half = 0.5 * (grid[bin + 1] - grid[bin]);
  else if (bin > 0)
    half = 0.5 * (grid[bin] - grid[bin - 1]);
  double proposal = grid[bin] + (draw_uniform(rng) - 0.5) * 2.0 * half;
  if (proposal == 0.0) proposal = grid[bin];
  if (std::isfinite(lo) && proposal <= lo) proposal = grid[bin];
  if (std::isfinite(hi) && proposal >= hi) proposal = grid[bin];

  // printed acceptance: the prior term only
  const auto log_prior = [&](double u) {
    const double d = u + offset - prior_mean;
    return -0.5 * d * d / prior_var;
  };
  ++diag.u_proposals;
  const double log_ratio = log_prior(proposal) - log_prior(u_current);
  if (std::log(draw_uniform(rng)) <= log_ratio) {
    ++diag.u_accepts;
    return proposal;
  }
  return u_current;
}

void sample_impact_matrix(McmcState& state, const ModelSpec& spec,
                          const PriorConfig& priors,
                          const ImpactPattern& pattern, const MatrixXd& U,
                          std::mt19937_64& rng, ImpactDiagnostics& diag) {
  const int n = spec.n_var();
  const int T = static_cast<int>(U.rows());
  const ImpactPriors prior = impact_priors(spec, priors);

  for (int col = 0; col < n; ++col) {
    const std::vector<int> perm = column_permutation(n, col);
    const MatrixXd Bp = permute_both(state.B, perm);
    const VectorXd b12 = Bp.row(0).tail(n - 1).transpose();
    const MatrixXd B22 = Bp.bottomRightCorner(n - 1, n - 1);
    Eigen::FullPivLU<MatrixXd> lu22(B22);
    if (!lu22.isInvertible())
      throw Error(ErrorCode::SingularPosterior,
                  "impact step: B22 not invertible");

    MatrixXd Up(T, n);
    for (int a = 0; a < n; ++a) Up.col(a) = U.col(perm[a]);

    // a_t = B22^-1 u_{-1,t}; c_t = u_{1,t} - b12' a_t
    const MatrixXd A_mat = lu22.solve(Up.rightCols(n - 1).transpose());
    const VectorXd c = Up.col(0) - A_mat.transpose() * b12;
    const VectorXd x12 =
        Eigen::FullPivLU<MatrixXd>(B22.transpose()).solve(b12);  // B22^-T b12

    VectorXd w = Bp.col(0).tail(n - 1);
    double u = Bp(0, 0) - b12.dot(lu22.solve(w));
    const Restriction anchor_tag = pattern.at(col, col);
    const double nu11 = prior.variance(col, col);
    const double beta11 = prior.mean(col, col);

    std::vector<int> free_idx;
    std::vector<Restriction> tags;
    for (int j = 1; j < n; ++j)
      if (pattern.at(perm[j], col) != Restriction::Zero) {
        free_idx.push_back(j - 1);
        tags.push_back(pattern.at(perm[j], col));
      }
    const int kfree = static_cast<int>(free_idx.size());

    if (kfree > 0) {
      MatrixXd Bsel(n - 1, kfree);  // B22^-1 S
      VectorXd x12_sel(kfree), prior_mean_w(kfree), prior_var_w(kfree);
      {
        MatrixXd sel = MatrixXd::Zero(n - 1, kfree);
        for (int a = 0; a < kfree; ++a) sel(free_idx[a], a) = 1.0;
        Bsel = lu22.solve(sel);
        for (int a = 0; a < kfree; ++a) {
          x12_sel(a) = x12(free_idx[a]);
          const int row = perm[free_idx[a] + 1];
          prior_mean_w(a) = prior.mean(row, col);
          prior_var_w(a) = prior.variance(row, col);
        }
      }
      const VectorXd eps1 = c / u;
      MatrixXd precision = eps1.squaredNorm() * (Bsel.transpose() * Bsel);
      precision.noalias() += (x12_sel * x12_sel.transpose()) / nu11;
      VectorXd rhs = Bsel.transpose() * (A_mat * eps1);
      rhs.noalias() -= ((u - beta11) / nu11) * x12_sel;
      for (int a = 0; a < kfree; ++a) {
        precision(a, a) += 1.0 / prior_var_w(a);
        rhs(a) += prior_mean_w(a) / prior_var_w(a);
      }
      Eigen::LLT<MatrixXd> llt(0.5 * (precision + precision.transpose()));
      if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::SingularPosterior,
                    "impact step: w posterior precision not SPD");
      const VectorXd mean = llt.solve(rhs);
      const MatrixXd cov = llt.solve(MatrixXd::Identity(kfree, kfree));

      VectorXd start(kfree);
      for (int a = 0; a < kfree; ++a) start(a) = w(free_idx[a]);
      const VectorXd draw =
          draw_sign_truncated_mvn(rng, mean, cov, tags, start);

      // accept only if the induced anchor sign holds
      const double b11_new = u + x12_sel.dot(draw);
      ++diag.r1_proposals;
      bool ok = true;
      if (anchor_tag == Restriction::Positive && !(b11_new > 0.0)) ok = false;
      if (anchor_tag == Restriction::Negative && !(b11_new < 0.0)) ok = false;
      if (ok) {
        ++diag.r1_accepts;
        diag.r1_consecutive_rejects = 0;
        w.setZero();
        for (int a = 0; a < kfree; ++a) w(free_idx[a]) = draw(a);
      } else if (++diag.r1_consecutive_rejects >= 100000) {
        throw Error(ErrorCode::StuckRegion,
                    "impact step: anchor sign region unreachable "
                    "(contradictory restrictions?)");
      }
    } else {
      w.setZero();
    }

    const VectorXd g = lu22.solve(w);
    const double offset = b12.dot(g);
    const double gamma2 = (1.0 + g.squaredNorm()) * c.squaredNorm();
    const double gamma1 = -2.0 * g.dot(A_mat * c);
    u = sample_u(rng, u, T, gamma1, gamma2, offset, beta11, nu11, anchor_tag,
                 diag);

    // map back into the column
    state.B(col, col) = u + offset;
    for (int j = 1; j < n; ++j) state.B(perm[j], col) = w(j - 1);
  }
}

}  // namespace favar
