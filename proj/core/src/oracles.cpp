#include "stein_gauge/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include <Eigen/Eigenvalues>

#include "stein_gauge/errors.hpp"
#include "stein_gauge/parallel.hpp"
#include "stein_gauge/random.hpp"

namespace stein_gauge {
namespace {

void check_weights(double lambda, double lambda_prime, const char* where) {
  detail::require(std::isfinite(lambda) && lambda > 0.0 && std::isfinite(lambda_prime) && lambda_prime > 0.0, where,
                  "weights must be positive");
}

void check_points(std::initializer_list<const ConstVectorRef*> pts, const char* where) {
  const Eigen::Index d = (*pts.begin())->size();
  for (const auto* p : pts) detail::require(p->size() == d && p->allFinite(), where, "points must be finite, equal size");
}

Vector gradient_of(const SmoothFunction& h, ConstVectorRef x, const char* where) {
  detail::require(h.has_gradient(), where, "test function needs a gradient");
  return h.gradient(x);
}

double op_norm_symmetric(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

GapResult second_order_gap(const SmoothFunction& h, double lambda, double lambda_prime, ConstVectorRef x,
                           ConstVectorRef y, ConstVectorRef x_prime, ConstVectorRef y_prime) {
  constexpr const char* where = "second_order_gap";
  check_weights(lambda, lambda_prime, where);
  check_points({&x, &y, &x_prime, &y_prime}, where);
  detail::require(std::isfinite(h.m2), where, "test function needs a finite m2");
  const Vector gy = gradient_of(h, y, where);
  const Vector dir = lambda * (x - y) - lambda_prime * (x_prime - y_prime);
  GapResult r;
  r.lhs = std::abs(lambda * (h(x) - h(y)) - lambda_prime * (h(x_prime) - h(y_prime)) - gy.dot(dir));
  const double dp = (x_prime - y_prime).norm();
  r.rhs = 0.5 * h.m2 *
          (2.0 * lambda_prime * (y - y_prime).norm() * dp + lambda * (x - y).squaredNorm() + lambda_prime * dp * dp);
  return r;
}

GapResult third_order_gap(const SmoothFunction& h, double lambda, double lambda_prime, const EightPoints& p) {
  constexpr const char* where = "third_order_gap";
  check_weights(lambda, lambda_prime, where);
  const ConstVectorRef x = p.x, y = p.y, z = p.z, w = p.w;
  const ConstVectorRef xp = p.x_prime, yp = p.y_prime, zp = p.z_prime, wp = p.w_prime;
  check_points({&x, &y, &z, &w, &xp, &yp, &zp, &wp}, where);
  detail::require(std::isfinite(h.m2) && std::isfinite(h.m3), where, "test function needs finite m2 and m3");
  const double l = lambda, lp = lambda_prime;

  const Vector gz = gradient_of(h, z, where);
  const Vector dir = l * (x - y - (z - w)) - lp * (xp - yp - (zp - wp));
  GapResult r;
  r.lhs = std::abs(l * (h(x) - h(y) - (h(z) - h(w))) - lp * (h(xp) - h(yp) - (h(zp) - h(wp))) - gz.dot(dir));

  const double n_ypxp = (yp - xp).norm();
  const double n_zx = (z - x).norm(), n_zpxp = (zp - xp).norm();
  const double group2 = n_ypxp * (l * (z - x) - lp * (zp - xp)).norm() +
                        lp * (z - zp).norm() * (xp - yp - (zp - wp)).norm() +
                        l * n_zx * ((y - x) - (yp - xp)).norm() +
                        0.5 * (l * (x - y - (z - w)).norm() * (x - y + z - w).norm() +
                               lp * (xp - yp - (zp - wp)).norm() * (xp - yp + zp - wp).norm());
  const double n_yx = (y - x).norm();
  const double group3 =
      0.5 * n_ypxp * (2.0 * lp * (x - xp).norm() * n_zpxp + l * n_zx * n_zx + lp * n_zpxp * n_zpxp) +
      0.5 * (l * n_zx * n_yx * n_yx + lp * n_zpxp * n_ypxp * n_ypxp) +
      (l * std::pow((w - z).norm(), 3) + l * std::pow(n_yx, 3) + lp * std::pow((wp - zp).norm(), 3) +
       lp * std::pow(n_ypxp, 3)) /
          6.0;
  // 0 * inf never arises: both constants are finite here.
  r.rhs = h.m2 * group2 + h.m3 * group3;
  return r;
}

namespace {

Vector fd_gradient(const std::function<double(ConstVectorRef)>& f, const Vector& x, double e) {
  Vector g(x.size());
  Vector xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + e;
    xm(i) = x(i) - e;
    g(i) = (f(xp) - f(xm)) / (2.0 * e);
    xp(i) = xm(i) = x(i);
  }
  return g;
}

Matrix fd_hessian(const std::function<double(ConstVectorRef)>& f, const Vector& x, double e) {
  const Eigen::Index d = x.size();
  Matrix hm(d, d);
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      if (i == j) {
        Vector a = x, b = x;
        a(i) += e;
        b(i) -= e;
        hm(i, i) = (f(a) - 2.0 * f0 + f(b)) / (e * e);
      } else {
        Vector pp = x, pm = x, mp = x, mm = x;
        pp(i) += e, pp(j) += e;
        pm(i) += e, pm(j) -= e;
        mp(i) -= e, mp(j) += e;
        mm(i) -= e, mm(j) -= e;
        hm(i, j) = hm(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * e * e);
      }
    }
  }
  return hm;
}

}  // namespace

double estimate_lipschitz_constant(const std::function<double(ConstVectorRef)>& f, int order,
                                   const std::vector<std::pair<Vector, Vector>>& pairs) {
  detail::require(order >= 1 && order <= 3, "estimate_lipschitz_constant", "order must be 1, 2 or 3");
  double best = 0.0;
  for (const auto& [x, y] : pairs) {
    detail::require(x.size() == y.size(), "estimate_lipschitz_constant", "pair dimension mismatch");
    const double dist = (x - y).norm();
    if (!(dist > 0.0)) continue;
    double num = 0.0;
    switch (order) {
      case 1:
        num = std::abs(f(x) - f(y));
        break;
      case 2:
        num = (fd_gradient(f, x, 1e-4) - fd_gradient(f, y, 1e-4)).norm();
        break;
      default:
        num = op_norm_symmetric(fd_hessian(f, x, 1e-3) - fd_hessian(f, y, 1e-3));
        break;
    }
    if (!std::isfinite(num)) detail::throw_numeric("estimate_lipschitz_constant", "non-finite function value");
    best = std::max(best, num / dist);
  }
  return best;
}

int CubicPolynomial::degree() const {
  if (!gamma.empty()) return 3;
  if (b.size() > 0 && b.cwiseAbs().maxCoeff() > 0.0) return 2;
  return 1;
}

double CubicPolynomial::value(ConstVectorRef x) const {
  double v = c + a.dot(x) + 0.5 * x.dot(b * x);
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    const double s = u[j].dot(x);
    v += gamma[j] * s * s * s / 6.0;
  }
  return v;
}

Vector CubicPolynomial::gradient(ConstVectorRef x) const {
  Vector g = a + b * x;
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    const double s = u[j].dot(x);
    g += 0.5 * gamma[j] * s * s * u[j];
  }
  return g;
}

double CubicPolynomial::m3() const {
  double s = 0.0;
  for (double g : gamma) s += std::abs(g);
  return s;
}

double CubicPolynomial::m2_on_ball(double radius) const {
  return (b.size() > 0 ? op_norm_symmetric(b) : 0.0) + radius * m3();
}

SmoothFunction CubicPolynomial::as_function(double radius) const {
  SmoothFunction f;
  f.name = "cubic-polynomial";
  auto self = std::make_shared<CubicPolynomial>(*this);
  f.value = [self](ConstVectorRef x) { return self->value(x); };
  f.gradient = [self](ConstVectorRef x) { return self->gradient(x); };
  f.m2 = m2_on_ball(radius);
  f.m3 = m3();
  f.m1 = std::numeric_limits<double>::infinity();
  return f;
}

CubicPolynomial random_polynomial(Eigen::Index d, int degree, std::uint64_t seed, std::uint64_t stream) {
  detail::require(d >= 1, "random_polynomial", "dimension must be positive");
  detail::require(degree >= 1 && degree <= 3, "random_polynomial", "degree must be 1, 2 or 3");
  GaussianStream g(seed, stream);
  CubicPolynomial p;
  p.c = g();
  p.a.resize(d);
  g.fill(p.a);
  p.b = Matrix::Zero(d, d);
  if (degree >= 2) {
    Matrix m(d, d);
    g.fill(m);
    p.b = 0.5 * (m + m.transpose());
  }
  if (degree == 3) {
    const int terms = 1 + static_cast<int>(g.engine()() % 2);
    for (int j = 0; j < terms; ++j) {
      Vector u(d);
      do {
        g.fill(u);
      } while (u.norm() < 1e-3);
      p.u.push_back(u.normalized());
      p.gamma.push_back(g());
    }
  }
  return p;
}

namespace {

struct InstanceResult {
  GapResult second;
  GapResult third;
};

InstanceResult run_instance(const Lemma2SuiteConfig& cfg, std::size_t i) {
  const Eigen::Index d = cfg.dims[i % cfg.dims.size()];
  GaussianStream g(cfg.seed, 2 * i);
  CounterRng rng(cfg.seed, 2 * i + 1);
  std::uniform_real_distribution<double> logw(cfg.log_weight_min, cfg.log_weight_max);
  const int degree = 1 + static_cast<int>(rng() % 3);
  const CubicPolynomial poly = random_polynomial(d, degree, cfg.seed ^ 0x5eedULL, i);

  EightPoints p;
  for (Vector* v : {&p.x, &p.y, &p.z, &p.w, &p.x_prime, &p.y_prime, &p.z_prime, &p.w_prime}) {
    v->resize(d);
    g.fill(*v, cfg.point_scale);
  }
  double radius = 0.0;
  for (const Vector* v : {&p.x, &p.y, &p.z, &p.w, &p.x_prime, &p.y_prime, &p.z_prime, &p.w_prime})
    radius = std::max(radius, v->norm());
  const SmoothFunction h = poly.as_function(radius);
  const double l = std::exp(logw(rng)), lp = std::exp(logw(rng));

  InstanceResult out;
  out.second = second_order_gap(h, l, lp, p.x, p.y, p.x_prime, p.y_prime);
  out.third = third_order_gap(h, l, lp, p);
  return out;
}

// Quadratic with y = y' = x', x - y along the top-|eigenvalue| eigenvector:
// the Taylor remainder equals the bound.
double equality_gap(const Lemma2SuiteConfig& cfg, std::size_t i) {
  const Eigen::Index d = cfg.dims[i % cfg.dims.size()];
  const CubicPolynomial poly = random_polynomial(d, 2, cfg.seed ^ 0xe9a1ULL, i);
  GaussianStream g(cfg.seed ^ 0xe9a1ULL, 1'000'000 + i);
  CounterRng rng(cfg.seed ^ 0xe9a1ULL, 2'000'000 + i);
  std::uniform_real_distribution<double> logw(cfg.log_weight_min, cfg.log_weight_max);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(poly.b);
  Eigen::Index top = 0;
  eig.eigenvalues().cwiseAbs().maxCoeff(&top);
  Vector y(d);
  g.fill(y, cfg.point_scale);
  const Vector x = y + cfg.point_scale * g() * eig.eigenvectors().col(top);
  const SmoothFunction h = poly.as_function(0.0);
  const GapResult r = second_order_gap(h, std::exp(logw(rng)), std::exp(logw(rng)), x, y, y, y);
  if (r.rhs == 0.0) return r.lhs;
  return std::abs(r.lhs - r.rhs) / r.rhs;
}

}  // namespace

Lemma2SuiteReport run_lemma2_suite(const Lemma2SuiteConfig& cfg) {
  detail::require(!cfg.dims.empty(), "run_lemma2_suite", "need at least one dimension");
  for (auto d : cfg.dims) detail::require(d >= 1, "run_lemma2_suite", "dimensions must be positive");
  detail::require(cfg.point_scale > 0.0 && cfg.log_weight_min <= cfg.log_weight_max, "run_lemma2_suite",
                  "bad sampling ranges");

  std::vector<InstanceResult> results(cfg.instances);
  parallel_for(cfg.instances, [&](std::size_t i) { results[i] = run_instance(cfg, i); });
  std::vector<double> gaps(cfg.equality_instances);
  parallel_for(cfg.equality_instances, [&](std::size_t i) { gaps[i] = equality_gap(cfg, i); });

  Lemma2SuiteReport rep;
  rep.instances = cfg.instances;
  rep.equality_instances = cfg.equality_instances;
  for (const auto& r : results) {
    if (!r.second.holds()) ++rep.second_violations;
    if (!r.third.holds()) ++rep.third_violations;
    if (r.second.rhs > 0.0) rep.worst_second_ratio = std::max(rep.worst_second_ratio, r.second.ratio());
    if (r.third.rhs > 0.0) rep.worst_third_ratio = std::max(rep.worst_third_ratio, r.third.ratio());
  }
  for (double gap : gaps) rep.equality_worst_rel_gap = std::max(rep.equality_worst_rel_gap, gap);
  rep.passed = rep.second_violations == 0 && rep.third_violations == 0 && rep.equality_worst_rel_gap <= 1e-9;
  return rep;
}

}  // namespace stein_gauge
