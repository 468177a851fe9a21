#include "finsler/background.hpp"

#include <cmath>
#include <stdexcept>

namespace finsler {

namespace {

Vec<double> shifted(const Vec<double>& x, int j, double h) {
  Vec<double> s = x;
  s[j] += h;
  return s;
}

// d a_ij / dx^k by central differences, step h.
Ten3<double> metric_dx(const BackgroundGeometry& geom, const Vec<double>& x, double h) {
  int n = geom.dim;
  Ten3<double> d(n);
  for (int k = 0; k < n; ++k) {
    Mat<double> ap = geom.metric(shifted(x, k, h));
    Mat<double> am = geom.metric(shifted(x, k, -h));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j, k) = (ap(i, j) - am(i, j)) / (2.0 * h);
  }
  return d;
}

Ten3<double> christoffels_from(const Mat<double>& a_inv, const Ten3<double>& da) {
  int n = a_inv.size();
  Ten3<double> gam(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int m = 0; m < n; ++m)
          s += a_inv(k, m) * (da(m, i, j) + da(m, j, i) - da(i, j, m));
        gam(k, i, j) = 0.5 * s;
      }
  return gam;
}

}  // namespace

BackgroundAt eval_background(const BackgroundGeometry& geom, const Vec<double>& x) {
  BackgroundAt bg;
  bg.dim = geom.dim;
  bg.a = geom.metric(x);
  cholesky(bg.a);  // positive-definiteness gate
  bg.a_inv = inverse(bg.a);
  bg.b_cov = geom.axis(x);
  bg.b_up = matvec(bg.a_inv, bg.b_cov);
  double norm2 = dot(bg.b_cov, bg.b_up);
  if (std::fabs(norm2 - 1.0) > 1e-8)
    throw std::runtime_error("axis 1-form is not unit: a^ij b_i b_j = " + std::to_string(norm2));
  bg.g = geom.charge(x);
  if (!(bg.g > -2.0 && bg.g < 2.0))
    throw std::runtime_error("charge out of range (-2, 2): g = " + std::to_string(bg.g));
  return bg;
}

PointFrame build_point_frame(const BackgroundGeometry& geom, const Vec<double>& x,
                             const FrameOptions& opts) {
  int n = geom.dim;
  double h = geom.x_step;
  PointFrame fr;
  fr.x = x;
  fr.bg = eval_background(geom, x);

  Ten3<double> da = metric_dx(geom, x, h);
  fr.christoffels = christoffels_from(fr.bg.a_inv, da);

  // nabla_i b_j = d_i b_j - b_k a^k_{ij}
  fr.nabla_b = Mat<double>(n);
  Mat<double> db(n);  // db(i,j) = d b_j / dx^i
  for (int i = 0; i < n; ++i) {
    Vec<double> bp = geom.axis(shifted(x, i, h));
    Vec<double> bm = geom.axis(shifted(x, i, -h));
    for (int j = 0; j < n; ++j) db(i, j) = (bp[j] - bm[j]) / (2.0 * h);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = db(i, j);
      for (int k = 0; k < n; ++k) s -= fr.bg.b_cov[k] * fr.christoffels(k, i, j);
      fr.nabla_b(i, j) = s;
    }

  fr.g_grad = Vec<double>(n);
  for (int i = 0; i < n; ++i)
    fr.g_grad[i] =
        (geom.charge(shifted(x, i, h)) - geom.charge(shifted(x, i, -h))) / (2.0 * h);

  if (opts.involutive) fr.mu = dot(fr.bg.b_up, fr.g_grad);

  if (opts.with_riemann) {
    // Assemble a_n{}^i{}_{km} from first and second differences of the metric
    // directly (differencing FD Christoffels would square the rounding noise).
    double h2 = geom.x2_step;
    Ten3<double> da2 = metric_dx(geom, x, h2);
    Ten3<double> gam2 = christoffels_from(fr.bg.a_inv, da2);
    // dda(i,j,k,m) = d^2 a_ij / dx^k dx^m
    Ten4<double> dda(n);
    for (int k = 0; k < n; ++k)
      for (int m = 0; m <= k; ++m) {
        Mat<double> s(n);
        if (k == m) {
          Mat<double> ap = geom.metric(shifted(x, k, h2));
          Mat<double> am = geom.metric(shifted(x, k, -h2));
          Mat<double> a0 = fr.bg.a;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              s(i, j) = (ap(i, j) - 2.0 * a0(i, j) + am(i, j)) / (h2 * h2);
        } else {
          Mat<double> app = geom.metric(shifted(shifted(x, k, h2), m, h2));
          Mat<double> apm = geom.metric(shifted(shifted(x, k, h2), m, -h2));
          Mat<double> amp = geom.metric(shifted(shifted(x, k, -h2), m, h2));
          Mat<double> amm = geom.metric(shifted(shifted(x, k, -h2), m, -h2));
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              s(i, j) = (app(i, j) - apm(i, j) - amp(i, j) + amm(i, j)) / (4.0 * h2 * h2);
        }
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            dda(i, j, k, m) = s(i, j);
            dda(i, j, m, k) = s(i, j);
          }
      }
    // d_k a^i_{nm} = -a^{ip} (d_k a_pq) a^{qi'} * (lowered) + 0.5 a^{is} d_k(d_n a_sm + ...)
    Ten4<double> dgam(n);  // dgam(i,n,m,k) = d_k a^i_{nm}
    for (int i = 0; i < n; ++i)
      for (int nn = 0; nn < n; ++nn)
        for (int m = 0; m < n; ++m)
          for (int k = 0; k < n; ++k) {
            double t = 0.0;
            for (int s = 0; s < n; ++s) {
              // derivative of a^{is}: -a^{ip} da_pq/dx^k a^{qs}
              double dainv = 0.0;
              for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q)
                  dainv -= fr.bg.a_inv(i, p) * da2(p, q, k) * fr.bg.a_inv(q, s);
              t += dainv * 0.5 * (da2(s, nn, m) + da2(s, m, nn) - da2(nn, m, s));
              t += fr.bg.a_inv(i, s) * 0.5 *
                   (dda(s, nn, m, k) + dda(s, m, nn, k) - dda(nn, m, s, k));
            }
            dgam(i, nn, m, k) = t;
          }
    fr.riemann = Ten4<double>(n);
    for (int nn = 0; nn < n; ++nn)
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
          for (int m = 0; m < n; ++m) {
            double r = dgam(i, nn, m, k) - dgam(i, nn, k, m);
            for (int hh = 0; hh < n; ++hh)
              r += gam2(i, k, hh) * gam2(hh, nn, m) - gam2(i, m, hh) * gam2(hh, nn, k);
            fr.riemann(nn, i, k, m) = r;
          }
    fr.has_riemann = true;
  }
  return fr;
}

FrameDiagnostics validate_frame(const BackgroundGeometry& geom, const PointFrame& fr,
                                const ScenarioFlags& flags, double tol) {
  int n = geom.dim;
  FrameDiagnostics diag;
  auto add = [&](const std::string& name, double resid, double t, bool checked) {
    DiagnosticsEntry e{name, resid, t, resid <= t, checked};
    if (checked && !e.pass) diag.all_pass = false;
    diag.entries.push_back(e);
  };

  add("unit-axis-norm", std::fabs(dot(fr.bg.b_cov, fr.bg.b_up) - 1.0), 1e-8, true);
  add("charge-range", std::max(0.0, std::fabs(fr.bg.g) - 2.0), 0.0, true);

  double inv_resid = 0.0;
  if (flags.involutive) {
    double mu = fr.mu.value_or(dot(fr.bg.b_up, fr.g_grad));
    for (int i = 0; i < n; ++i)
      inv_resid = std::max(inv_resid, std::fabs(fr.g_grad[i] - mu * fr.bg.b_cov[i]));
  }
  add("involutive", inv_resid, tol, flags.involutive);

  double par_resid = 0.0;
  if (flags.b_parallel)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) par_resid = std::max(par_resid, std::fabs(fr.nabla_b(i, j)));
  add("b-parallel", par_resid, tol, flags.b_parallel);

  double closed_resid = 0.0;
  if (flags.closed_b || flags.landsberg) {
    // d_i b_j - d_j b_i == nabla_i b_j - nabla_j b_i
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        closed_resid = std::max(closed_resid, std::fabs(fr.nabla_b(i, j) - fr.nabla_b(j, i)));
  }
  add("closed-b", closed_resid, tol, flags.closed_b || flags.landsberg);

  double land_resid = 0.0, kfit = 0.0;
  if (flags.landsberg || flags.berwald) {
    // fit nabla_m b_n = k (a_mn - b_m b_n)
    double num = 0.0, den = 0.0;
    Mat<double> r(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        r(i, j) = fr.bg.a(i, j) - fr.bg.b_cov[i] * fr.bg.b_cov[j];
        num += fr.nabla_b(i, j) * r(i, j);
        den += r(i, j) * r(i, j);
      }
    kfit = den > 0.0 ? num / den : 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        land_resid = std::max(land_resid, std::fabs(fr.nabla_b(i, j) - kfit * r(i, j)));
    double gconst = 0.0;
    for (int i = 0; i < n; ++i) gconst = std::max(gconst, std::fabs(fr.g_grad[i]));
    land_resid = std::max(land_resid, gconst);  // Landsberg requires constant charge
  }
  add("landsberg-expansion", land_resid, tol, flags.landsberg || flags.berwald);
  add("berwald-k-zero", flags.berwald ? std::fabs(kfit) : 0.0, tol, flags.berwald);

  return diag;
}

}  // namespace finsler
