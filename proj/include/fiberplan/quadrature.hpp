#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace fiberplan::quad {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {
// Gauss-Kronrod 7-15 nodes on [0, 1] half-interval (symmetric about 0).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace detail

/// One 15-point Kronrod evaluation with the embedded 7-point Gauss error.
template <typename F>
Estimate gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * detail::kWgk[7];
  double resg = fc * detail::kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * detail::kXgk[static_cast<std::size_t>(j)];
    const double s = f(c - dx) + f(c + dx);
    resk += detail::kWgk[static_cast<std::size_t>(j)] * s;
    if (j % 2 == 1) resg += detail::kWg[static_cast<std::size_t>(j / 2)] * s;
  }
  return {resk * h, std::abs((resk - resg) * h)};
}

/// Adaptive bisection on GK15 panels until the summed error falls below
/// max(abs_tol, rel_tol * |I|). Deterministic: panels are refined in a
/// fixed order (largest error first, ties by position).
template <typename F>
Estimate integrate(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0, int max_panels = 200) {
  if (!(b > a)) return {};
  struct Panel {
    double a, b;
    Estimate e;
  };
  std::vector<Panel> panels;
  panels.push_back({a, b, gk15(f, a, b)});
  auto totals = [&] {
    Estimate t;
    for (const auto& p : panels) {
      t.value += p.e.value;
      t.error += p.e.error;
    }
    return t;
  };
  Estimate total = totals();
  while (static_cast<int>(panels.size()) < max_panels &&
         total.error > std::max(abs_tol, rel_tol * std::abs(total.value))) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i)
      if (panels[i].e.error > panels[worst].e.error) worst = i;
    const Panel p = panels[worst];
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) break;
    panels[worst] = {p.a, m, gk15(f, p.a, m)};
    panels.push_back({m, p.b, gk15(f, m, p.b)});
    total = totals();
  }
  return total;
}

/// Midpoint-rule abscissae for n points on [a, b].
inline double midpoint_node(double a, double b, int n, int j) {
  return a + (b - a) * (j + 0.5) / n;
}

}  // namespace fiberplan::quad
