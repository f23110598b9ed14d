// Ewald evaluation of the torus Green's function. With Ewald time s,
//
//   G(x) = sum_{k != 0} e^{-4 pi^2 s |k|^2} cos(2 pi k.x) / (4 pi^2 |k|^2)
//        + (1/4pi) sum_n E1(|x - n|^2 / 4s) - s,
//
// the second sum being the heat kernel integrated over (0, s).

#include <cmath>

#include "tetra/errors.hpp"
#include "tetra/torus.hpp"

namespace tetra {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

double expint_e1(double u) { return u > 700.0 ? 0.0 : -std::expint(-u); }

// Ein(u) = E1(u) + log u + gamma, entire; series near 0 avoids cancellation.
double ein(double u) {
  if (u > 4.0) return expint_e1(u) + std::log(u) + kEulerGamma;
  double term = u, sum = u;
  for (int k = 2; k < 200; ++k) {
    term *= -u / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

Vec2 canonical_point(Vec2 x) {
  auto wrap = [](double v) {
    double w = v - std::floor(v + 0.5);
    if (w >= 0.5) w -= 1.0;
    return w;
  };
  return {wrap(x.x), wrap(x.y)};
}

Vec2 torus_delta(Vec2 a, Vec2 b) { return canonical_point(a - b); }
double torus_distance(Vec2 a, Vec2 b) { return torus_delta(a, b).norm(); }

GreensEvaluator::GreensEvaluator(int truncation, double split) : truncation_(truncation), split_(split) {
  if (truncation < 1) throw DomainError("GreensEvaluator: truncation must be >= 1");
  if (!(split > 0.0) || !std::isfinite(split)) throw DomainError("GreensEvaluator: split must be > 0");
}

int GreensEvaluator::modes_for(double tol) const {
  // Shell |k|_inf = n has 8n modes, each bounded by e^{-4pi^2 s n^2}/(4pi^2 n^2).
  const double a = 4.0 * kPi * kPi * split_;
  for (int K = 1; K < 100000; ++K) {
    double tail = 0.0;
    for (int n = K + 1;; ++n) {
      const double t = 8.0 * n * std::exp(-a * n * n) / (4.0 * kPi * kPi * n * n);
      tail += t;
      if (t < 1e-30 || t < 1e-6 * tail) break;
    }
    if (tail <= tol) return K;
  }
  return 100000;
}

int GreensEvaluator::images_for(double tol) const {
  // Image shells m have 8m images at distance >= m - 1/2 from the domain.
  for (int N = 1; N < 100000; ++N) {
    double tail = 0.0;
    for (int m = N + 1;; ++m) {
      const double u = (m - 0.5) * (m - 0.5) / (4.0 * split_);
      const double t = 8.0 * m * (expint_e1(u) + std::exp(-u)) / (4.0 * kPi);
      tail += t;
      if (t < 1e-30 || t < 1e-6 * tail) break;
    }
    if (tail <= tol) return N;
  }
  return 100000;
}

void GreensEvaluator::require(int modes, int shells) const {
  if (modes > truncation_ || shells > truncation_)
    throw AccuracyError("Green's function tolerance needs " + std::to_string(std::max(modes, shells)) +
                        " modes/shells, truncation is " + std::to_string(truncation_));
}

double GreensEvaluator::fourier(Vec2 y, int K) const {
  const double a = 4.0 * kPi * kPi * split_;
  double sum = 0.0;
  // k and -k contribute equally: sum over the half lattice and double.
  for (int k1 = 0; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      const double k2n = double(k1) * k1 + double(k2) * k2;
      sum += std::exp(-a * k2n) * std::cos(2.0 * kPi * (k1 * y.x + k2 * y.y)) / k2n;
    }
  return 2.0 * sum / (4.0 * kPi * kPi);
}

double GreensEvaluator::images(Vec2 y, int N, bool drop_origin) const {
  auto term = [&](double dx, double dy) { return expint_e1((dx * dx + dy * dy) / (4.0 * split_)); };
  double sum = drop_origin ? 0.0 : term(y.x, y.y);
  // Images n and -n are added as a pair, which makes G(-y) = G(y) exact.
  for (int n1 = 0; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2) {
      if (n1 == 0 && n2 <= 0) continue;
      sum += term(y.x - n1, y.y - n2) + term(y.x + n1, y.y + n2);
    }
  return sum / (4.0 * kPi);
}

double GreensEvaluator::eval(Vec2 x, double tol) const {
  const Vec2 y = canonical_point(x);
  if (y.x == 0.0 && y.y == 0.0) throw SingularityError("Green's function evaluated at its singularity");
  const int K = modes_for(0.5 * tol), N = images_for(0.5 * tol);
  require(K, N);
  return fourier(y, K) + images(y, N, false) - split_;
}

Vec2 GreensEvaluator::gradient(Vec2 x, double tol) const {
  const Vec2 y = canonical_point(x);
  if (y.x == 0.0 && y.y == 0.0) throw SingularityError("Green's function gradient at its singularity");
  const int K = modes_for(0.5 * tol), N = images_for(0.5 * tol) + 1;
  require(K, N);
  const double a = 4.0 * kPi * kPi * split_;
  Vec2 g{};
  for (int k1 = 0; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      const double k2n = double(k1) * k1 + double(k2) * k2;
      const double c = -2.0 * 2.0 * kPi * std::exp(-a * k2n) * std::sin(2.0 * kPi * (k1 * y.x + k2 * y.y)) /
                       (4.0 * kPi * kPi * k2n);
      g = g + Vec2{c * k1, c * k2};
    }
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2) {
      const Vec2 d{y.x - n1, y.y - n2};
      const double r2 = dot(d, d);
      const double u = r2 / (4.0 * split_);
      if (u > 700.0) continue;
      g = g - d * (std::exp(-u) / (2.0 * kPi * r2));
    }
  return g;
}

double GreensEvaluator::regular_part(Vec2 x, double tol) const {
  const double r = x.norm();
  if (!(r < 0.5)) throw DomainError("regular_part needs |x| < 1/2");
  const int K = modes_for(0.5 * tol), N = images_for(0.5 * tol);
  require(K, N);
  // Origin image plus (1/2pi) log|x|, written through the entire function Ein.
  const double u = r * r / (4.0 * split_);
  const double origin = (ein(u) - kEulerGamma + std::log(4.0 * split_)) / (4.0 * kPi);
  return fourier(x, K) + images(x, N, true) + origin - split_;
}

double spectral_regular_at_zero(int cutoff) {
  if (cutoff < 1) throw DomainError("spectral cutoff must be >= 1");
  // Heat regularisation at s = 1/cutoff: the neglected image sum is
  // O(E1(cutoff/4)) and the Fourier tail O(exp(-4 pi^2 cutoff)).
  const double s = 1.0 / cutoff;
  const double a = 4.0 * kPi * kPi * s;
  std::vector<double> terms;
  for (int k1 = 0; k1 <= cutoff; ++k1)
    for (int k2 = -cutoff; k2 <= cutoff; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      const double k2n = double(k1) * k1 + double(k2) * k2;
      terms.push_back(2.0 * std::exp(-a * k2n) / (4.0 * kPi * kPi * k2n));
    }
  return stable_sum(std::move(terms)) + (std::log(4.0 * s) - kEulerGamma) / (4.0 * kPi) - s;
}

double spectral_regular_at_zero_extrapolated(int cutoff) {
  const double x0 = spectral_regular_at_zero(cutoff), x1 = spectral_regular_at_zero(2 * cutoff),
               x2 = spectral_regular_at_zero(4 * cutoff);
  const double d1 = x2 - x1, d0 = x1 - x0;
  if (d1 == d0 || std::abs(d1) < 1e-17) return x2;
  return x2 - d1 * d1 / (d1 - d0);
}

double kronecker_regular_at_zero() {
  const double eta_i = std::tgamma(0.25) / (2.0 * std::pow(kPi, 0.75));
  return -std::log(2.0 * kPi * eta_i * eta_i) / (2.0 * kPi);
}

}  // namespace tetra
