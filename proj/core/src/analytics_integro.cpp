#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fragkit/analytics.hpp"
#include "fragkit/error.hpp"

namespace fragkit {

namespace {

// Fritsch-Carlson slopes on a uniform grid.
double pchip_slope(const std::vector<double>& y, std::size_t i, double h) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  if (n == 2) return (y[1] - y[0]) / h;
  auto delta = [&](std::size_t k) { return (y[k + 1] - y[k]) / h; };
  auto sgn = [](double v) { return (v > 0.0) - (v < 0.0); };
  auto end_slope = [&](double d0, double d1) {
    double d = 0.5 * (3.0 * d0 - d1);
    if (sgn(d) != sgn(d0)) return 0.0;
    if (sgn(d0) != sgn(d1) && std::abs(d) > 3.0 * std::abs(d0)) d = 3.0 * d0;
    return d;
  };
  if (i == 0) return end_slope(delta(0), delta(1));
  if (i == n - 1) return end_slope(delta(n - 2), delta(n - 3));
  const double a = delta(i - 1), b = delta(i);
  if (a * b <= 0.0) return 0.0;
  return 2.0 / (1.0 / a + 1.0 / b);
}

double hermite(double y0, double y1, double d0, double d1, double h, double u) {
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * d0 + (-2 * u3 + 3 * u2) * y1 +
         (u3 - u2) * h * d1;
}

struct Interpolant {
  const std::vector<double>& y;
  const std::vector<double>& d;
  double h;

  double on_piece(std::size_t i, double u) const { return hermite(y[i], y[i + 1], d[i], d[i + 1], h, u); }

  double at(double s) const {
    const std::size_t last = y.size() - 1;
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(s / h), last - 1);
    return on_piece(i, std::clamp(s / h - static_cast<double>(i), 0.0, 1.0));
  }
};

}  // namespace

double IntegroSolution::operator()(double time) const {
  if (m.empty()) throw DomainError("empty integro solution");
  if (m.size() == 1 || time <= 0.0) return m.front();
  const std::size_t last = m.size() - 1;
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(time / step), last - 1);
  const double u = std::clamp(time / step - static_cast<double>(i), 0.0, 1.0);
  return hermite(m[i], m[i + 1], pchip_slope(m, i, step), pchip_slope(m, i + 1, step), step, u);
}

IntegroSolution m_integro(const ReproductionLaw& law, double alpha, double t_max, double beta, double step) {
  if (!(alpha > 0.0)) throw DomainError("m_integro needs alpha > 0 (use homogeneous_m for alpha = 0)");
  if (!(t_max >= 0.0) || !(step > 0.0)) throw DomainError("m_integro needs t_max >= 0 and step > 0");
  const double phi_beta = phi(law, beta);  // also checks the domain

  std::vector<PointMass> atoms;
  bool has_density = false;
  for (const auto& c : law.intensity()) {
    if (const auto* a = std::get_if<PointMass>(&c)) atoms.push_back(*a);
    else has_density = true;
  }
  if (!has_density && atoms.empty()) throw UnsupportedRepresentation("law has no density or atoms");
  const auto& comps = law.intensity();
  auto weight = [&](double x) { return x > 0.0 ? std::pow(x, beta) * continuous_density(comps, x) : 0.0; };

  using GL = boost::math::quadrature::gauss<double, 8>;
  const auto& gx = GL::abscissa();
  const auto& gw = GL::weights();
  boost::math::quadrature::tanh_sinh<double> ts;

  const double h = step;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(t_max / h - 1e-9));

  IntegroSolution out;
  out.step = h;
  out.t.push_back(0.0);
  out.m.push_back(1.0);
  std::vector<double> f{-1.0 + phi_beta};
  std::vector<double> slope{0.0};
  auto& y = out.m;

  // One piece of the x-integral: s = x^alpha t runs over [t_i, t_{i+1}].
  struct Node {
    double u;
    double w;
  };
  std::vector<Node> nodes_a, nodes_b;  // the two pieces that move with m_{n+1}

  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n + 1) * h;
    const std::size_t pieces = n + 1;
    auto x_of = [&](std::size_t i) { return std::pow(static_cast<double>(i) / pieces, 1.0 / alpha); };

    y.push_back(y[n] + h * f[n]);  // Euler predictor
    slope.push_back(0.0);
    const std::size_t refresh_from = n >= 1 ? n - 1 : 0;
    auto refresh = [&]() {
      for (std::size_t i = refresh_from; i < y.size(); ++i) slope[i] = pchip_slope(y, i, h);
      if (y.size() <= 3) {
        for (std::size_t i = 0; i < y.size(); ++i) slope[i] = pchip_slope(y, i, h);
      }
    };
    refresh();
    const Interpolant interp{y, slope, h};

    auto gauss_nodes = [&](std::size_t i) {
      std::vector<Node> nodes;
      const double a = x_of(i), b = x_of(i + 1);
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      auto add = [&](double x, double w) {
        const double s = std::pow(x, alpha) * t;
        nodes.push_back({std::clamp(s / h - static_cast<double>(i), 0.0, 1.0), w * half * weight(x)});
      };
      for (std::size_t q = 0; q < gx.size(); ++q) {
        if (gx[q] == 0.0) {
          add(mid, gw[q]);
        } else {
          add(mid + half * gx[q], gw[q]);
          add(mid - half * gx[q], gw[q]);
        }
      }
      return nodes;
    };
    auto piece_integral = [&](std::size_t i, const std::vector<Node>& nodes) {
      double acc = 0.0;
      for (const auto& node : nodes) acc += node.w * interp.on_piece(i, node.u);
      return acc;
    };
    auto first_piece = [&]() {
      if (!has_density) return 0.0;
      const double b = x_of(1);
      return ts.integrate(
          [&](double x) {
            const double s = std::pow(x, alpha) * t;
            return interp.on_piece(0, std::clamp(s / h, 0.0, 1.0)) * weight(x);
          },
          0.0, b, 1e-10);
    };

    // pieces 0..n-2 only see nodes that are already final
    double settled = 0.0;
    if (has_density && pieces >= 3) {
      settled += first_piece();
      for (std::size_t i = 1; i + 2 < pieces; ++i) settled += piece_integral(i, gauss_nodes(i));
    }
    std::vector<std::size_t> moving;
    if (has_density) {
      for (std::size_t i = (pieces >= 3 ? pieces - 2 : 0); i < pieces; ++i) moving.push_back(i);
    }
    std::vector<std::vector<Node>> moving_nodes;
    for (std::size_t i : moving) moving_nodes.push_back(i == 0 ? std::vector<Node>{} : gauss_nodes(i));

    auto integral = [&]() {
      double acc = settled;
      for (std::size_t k = 0; k < moving.size(); ++k) {
        acc += moving[k] == 0 ? first_piece() : piece_integral(moving[k], moving_nodes[k]);
      }
      for (const auto& a : atoms) acc += a.mass * std::pow(a.location, beta) * interp.at(std::pow(a.location, alpha) * t);
      return acc;
    };

    double f_next = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      f_next = -y[n + 1] + integral();
      double updated;
      if (n == 0) {
        updated = y[n] + 0.5 * h * (f_next + f[n]);
      } else if (n == 1) {
        updated = y[n] + h / 12.0 * (5.0 * f_next + 8.0 * f[n] - f[n - 1]);
      } else {
        updated = y[n] + h / 24.0 * (9.0 * f_next + 19.0 * f[n] - 5.0 * f[n - 1] + f[n - 2]);
      }
      const double change = std::abs(updated - y[n + 1]);
      y[n + 1] = updated;
      refresh();
      if (change <= 1e-15 * std::max(1.0, std::abs(updated))) break;
    }
    f.push_back(-y[n + 1] + integral());
    out.t.push_back(t);
  }
  return out;
}

}  // namespace fragkit
