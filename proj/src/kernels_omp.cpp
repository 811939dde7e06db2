#include <omp.h>

#include <algorithm>
#include <limits>

#include "ssync/error.hpp"
#include "ssync/kernels.hpp"

namespace ssync {

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

namespace parallel {
namespace {

using Index = std::ptrdiff_t;

Index as_index(std::size_t n) { return static_cast<Index>(n); }

}  // namespace

Matrix covariance(const Matrix& samples, const Vector& mean) {
  const std::size_t n = samples.rows(), d = samples.cols();
  require(mean.size() == d, ErrorCode::DimensionMismatch, "mean length mismatch");
  constexpr std::size_t kChunk = 1024;
  Matrix cov(d, d);
  Matrix centered(std::min(n, kChunk), d);
  for (std::size_t begin = 0; begin < n; begin += kChunk) {
    const std::size_t end = std::min(n, begin + kChunk);
#pragma omp parallel for schedule(static)
    for (Index s = 0; s < as_index(end - begin); ++s)
      for (std::size_t i = 0; i < d; ++i)
        centered(std::size_t(s), i) = samples(begin + std::size_t(s), i) - mean[i];

#pragma omp parallel for schedule(dynamic, 4)
    for (Index ii = 0; ii < as_index(d); ++ii) {
      const auto i = std::size_t(ii);
      auto out = cov.row(i);
      for (std::size_t s = 0; s < end - begin; ++s) {
        const auto c = centered.row(s);
        const double ci = c[i];
        for (std::size_t j = i; j < d; ++j) out[j] += ci * c[j];
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      cov(i, j) /= double(n);
      cov(j, i) = cov(i, j);
    }
  return cov;
}

double objective(const FilterBank& bank, const PatchBatch& batch, const ObjectiveOptions& opts) {
  require(batch.count() > 0, ErrorCode::InvalidArgument, "objective of an empty batch");
  require(batch.dim() == bank.input_dim(), ErrorCode::DimensionMismatch,
          "batch dim does not match bank");
  Vector per_sample(batch.count());
#pragma omp parallel for schedule(static)
  for (Index s = 0; s < as_index(batch.count()); ++s)
    per_sample[std::size_t(s)] = sample_objective(bank, batch[std::size_t(s)], opts);
  double total = 0.0;
  for (double v : per_sample) total += v;
  return total / double(batch.count());
}

ObjectiveGradient objective_and_gradient(const FilterBank& bank, const PatchBatch& batch,
                                         const ObjectiveOptions& opts) {
  const std::size_t count = batch.count();
  require(count > 0, ErrorCode::InvalidArgument, "gradient of an empty batch");
  const std::size_t nq = bank.hidden_units(), n = bank.input_dim();
  require(batch.dim() == n, ErrorCode::DimensionMismatch, "batch dim does not match bank");
  const Matrix& wx = bank.wx();
  const Matrix& wy = bank.wy();
  const bool analytic = opts.pairing == JacobianPairing::Analytic;

  Vector cx(nq), cy(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    cx[q] = squared_norm(wx.row(q));
    cy[q] = squared_norm(wy.row(q));
  }

  // Forward pass: per-sample residuals and per-unit coefficients.
  Matrix rx(count, n), ry(count, n);
  Matrix coef_x(count, nq), coef_y(count, nq), u(count, nq), v(count, nq);
  Matrix direct_x(count, nq), direct_y(count, nq);
  Vector per_sample(count);

#pragma omp parallel for schedule(static)
  for (Index si = 0; si < as_index(count); ++si) {
    const auto s = std::size_t(si);
    const PairRef pair = batch[s];
    Vector fx(nq), fy(nq), h(nq);
    for (std::size_t q = 0; q < nq; ++q) {
      fx[q] = dot(wx.row(q), pair.x);
      fy[q] = dot(wy.row(q), pair.y);
      h[q] = sigmoid(fx[q] * fy[q]);
      u(s, q) = h[q] * fy[q];
      v(s, q) = h[q] * fx[q];
    }
    auto rxs = rx.row(s);
    auto rys = ry.row(s);
    for (std::size_t q = 0; q < nq; ++q) {
      const double uq = u(s, q), vq = v(s, q);
      const auto wxq = wx.row(q);
      const auto wyq = wy.row(q);
      if (uq != 0.0)
        for (std::size_t i = 0; i < n; ++i) rxs[i] += uq * wxq[i];
      if (vq != 0.0)
        for (std::size_t i = 0; i < n; ++i) rys[i] += vq * wyq[i];
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rxs[i] -= pair.x[i];
      rys[i] -= pair.y[i];
      loss += rxs[i] * rxs[i] + rys[i] * rys[i];
    }

    double penalty = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
      const double a = fx[q] * fy[q];
      const double s_q = h[q] * (1.0 - h[q]);
      const double gu = 2.0 * dot(rxs, wx.row(q));
      const double gv = 2.0 * dot(rys, wy.row(q));
      double gfx = gu * s_q * fy[q] * fy[q] + gv * (h[q] + s_q * a);
      double gfy = gu * (h[q] + s_q * a) + gv * s_q * fx[q] * fx[q];
      double dx = 0.0, dy = 0.0;
      if (opts.lambda != 0.0) {
        const double alpha = analytic ? fy[q] * fy[q] : fx[q] * fx[q];
        const double beta = analytic ? fx[q] * fx[q] : fy[q] * fy[q];
        const double e = alpha * cx[q] + beta * cy[q];
        penalty += s_q * s_q * e;
        const double dp_da = 2.0 * s_q * s_q * (1.0 - 2.0 * h[q]) * e;
        gfx += opts.lambda * (dp_da * fy[q] + s_q * s_q * 2.0 * fx[q] * (analytic ? cy[q] : cx[q]));
        gfy += opts.lambda * (dp_da * fx[q] + s_q * s_q * 2.0 * fy[q] * (analytic ? cx[q] : cy[q]));
        dx = opts.lambda * 2.0 * s_q * s_q * alpha;
        dy = opts.lambda * 2.0 * s_q * s_q * beta;
      }
      coef_x(s, q) = gfx;
      coef_y(s, q) = gfy;
      direct_x(s, q) = dx;
      direct_y(s, q) = dy;
    }
    per_sample[s] = loss + opts.lambda * penalty;
  }

  // Backward pass: each filter row sums its contributions in sample order.
  const double weight = 1.0 / double(count);
  Matrix gx(nq, n), gy(nq, n);
#pragma omp parallel for schedule(static)
  for (Index qi = 0; qi < as_index(nq); ++qi) {
    const auto q = std::size_t(qi);
    auto gxq = gx.row(q);
    auto gyq = gy.row(q);
    const auto wxq = wx.row(q);
    const auto wyq = wy.row(q);
    for (std::size_t s = 0; s < count; ++s) {
      const PairRef pair = batch[s];
      const auto rxs = rx.row(s);
      const auto rys = ry.row(s);
      const double ax = coef_x(s, q), ay = coef_y(s, q);
      const double bx = u(s, q), by = v(s, q);
      const double dx = direct_x(s, q), dy = direct_y(s, q);
      for (std::size_t i = 0; i < n; ++i) {
        gxq[i] += weight * (ax * pair.x[i] + 2.0 * bx * rxs[i] + dx * wxq[i]);
        gyq[i] += weight * (ay * pair.y[i] + 2.0 * by * rys[i] + dy * wyq[i]);
      }
    }
  }

  ObjectiveGradient out;
  double total = 0.0;
  for (double val : per_sample) total += val;
  out.objective = total / double(count);
  if (bank.tied()) {
    for (std::size_t i = 0; i < gx.data().size(); ++i) gx.data()[i] += gy.data()[i];
    out.gradient = {std::move(gx), Matrix(), true};
  } else {
    out.gradient = {std::move(gx), std::move(gy), false};
  }
  return out;
}

Matrix encode_batch(const FilterBank& bank, const PatchBatch& batch, EncodingMode mode) {
  Matrix codes(batch.count(), bank.hidden_units());
  if (mode == EncodingMode::Motion)
    require(bank.tied(), ErrorCode::ModeMismatch, "motion encoding needs a tied bank");
  require(batch.count() == 0 || batch.dim() == bank.input_dim(), ErrorCode::DimensionMismatch,
          "batch dim does not match bank");
#pragma omp parallel for schedule(static)
  for (Index si = 0; si < as_index(batch.count()); ++si) {
    const auto s = std::size_t(si);
    const auto code = encode(bank, batch[s], mode);
    std::copy(code.h.begin(), code.h.end(), codes.row(s).begin());
  }
  return codes;
}

Assignment assign_nearest(const Matrix& points, const Matrix& centroids) {
  require(points.cols() == centroids.cols() && centroids.rows() > 0,
          ErrorCode::DimensionMismatch, "point/centroid dimension mismatch");
  Assignment a{std::vector<std::size_t>(points.rows()), Vector(points.rows())};
#pragma omp parallel for schedule(static)
  for (Index pi = 0; pi < as_index(points.rows()); ++pi) {
    const auto p = std::size_t(pi);
    const auto pt = points.row(p);
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t k = 0; k < centroids.rows(); ++k) {
      const auto c = centroids.row(k);
      double d = 0.0;
      for (std::size_t i = 0; i < pt.size(); ++i) {
        const double diff = pt[i] - c[i];
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        arg = k;
      }
    }
    a.index[p] = arg;
    a.squared_distance[p] = best;
  }
  return a;
}

}  // namespace parallel
}  // namespace ssync
