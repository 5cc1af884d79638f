#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "exset/errors.hpp"
#include "exset/linalg.hpp"

namespace exset {

/// Standard normal CDF.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

namespace detail {

// Gauss-Legendre half-rules used by the Genz bivariate normal algorithm;
// the rule order is selected by correlation band.
inline constexpr std::array<double, 3> kGlx6 = {0.9324695142031521, 0.6612093864662645,
                                                0.2386191860831969};
inline constexpr std::array<double, 3> kGlw6 = {0.1713244923791704, 0.3607615730481386,
                                                0.4679139345726910};
inline constexpr std::array<double, 6> kGlx12 = {0.9815606342467192, 0.9041172563704749,
                                                 0.7699026741943047, 0.5873179542866175,
                                                 0.3678314989981802, 0.1252334085114689};
inline constexpr std::array<double, 6> kGlw12 = {0.04717533638651183, 0.1069393259953184,
                                                 0.1600783285433462,  0.2031674267230659,
                                                 0.2334925365383548,  0.2491470458134028};
inline constexpr std::array<double, 10> kGlx20 = {
    0.9931285991850949, 0.9639719272779138, 0.9122344282513259, 0.8391169718222188,
    0.7463319064601508, 0.6360536807265150, 0.5108670019508271, 0.3737060887154195,
    0.2277858511416451, 0.07652652113349734};
inline constexpr std::array<double, 10> kGlw20 = {
    0.01761400713915212, 0.04060142980038694, 0.06267204833410907, 0.08327674157670475,
    0.1019301198172404,  0.1181945319615184,  0.1316886384491766,  0.1420961093183820,
    0.1491729864726037,  0.1527533871307258};

// P(X > h, Y > k) for a standard bivariate normal pair with correlation r.
// Genz (1992/2004) algorithm: direct Gauss-Legendre quadrature of the
// Drezner-Wesolowsky integrand for |r| <= 0.925, and the transformed
// integrand with Taylor correction near |r| = 1 otherwise.
inline double bvnu(double h, double k, double r) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  if (r == 0.0) return norm_cdf(-h) * norm_cdf(-k);

  const double* xs = kGlx20.data();
  const double* ws = kGlw20.data();
  int ng = 10;
  if (std::abs(r) < 0.3) {
    xs = kGlx6.data();
    ws = kGlw6.data();
    ng = 3;
  } else if (std::abs(r) < 0.75) {
    xs = kGlx12.data();
    ws = kGlw12.data();
    ng = 6;
  }

  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    for (int i = 0; i < ng; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        const double sn = std::sin(asr * (is * xs[i] + 1.0) / 2.0);
        bvn += ws[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    return bvn * asr / (2.0 * kTwoPi) + norm_cdf(-h) * norm_cdf(-k);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    double asr = -(bs / as + hk) / 2.0;
    if (asr > -100.0) {
      bvn = a * std::exp(asr) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    }
    if (-hk < 100.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * norm_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < ng; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        const double x2 = a * (is * xs[i] + 1.0);
        const double xsq = x2 * x2;
        const double rs = std::sqrt(1.0 - xsq);
        asr = -(bs / xsq + hk) / 2.0;
        if (asr > -100.0) {
          const double sp = 1.0 + c * xsq * (1.0 + d * xsq);
          const double ep = std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs;
          bvn += a * ws[i] * std::exp(asr) * (ep - sp);
        }
      }
    }
    bvn = -bvn / kTwoPi;
  }
  if (r > 0.0) {
    bvn += norm_cdf(-std::max(h, k));
  } else {
    bvn = -bvn;
    if (k > h) {
      if (h < 0.0) {
        bvn += norm_cdf(k) - norm_cdf(h);
      } else {
        bvn += norm_cdf(-h) - norm_cdf(-k);
      }
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace detail

/// P(U1 <= c1, U2 <= c2) for a centered Gaussian pair with covariance sigma.
///
/// Degenerate marginals (variance below 1e-14 times the larger variance) and
/// |correlation| = 1 reduce analytically to the univariate CDF; a degenerate
/// component contributes the closed-interval indicator 1{c_i >= 0}.
/// Throws NumericError if sigma fails PSD beyond a 1e-12 relative tolerance.
inline double phi2(const Eigen::Ref<const Vector>& c, const Matrix& sigma) {
  if (c.size() != 2 || sigma.rows() != 2 || sigma.cols() != 2) {
    throw DimensionError("phi2: need a 2-vector and a 2x2 covariance");
  }
  const double v1 = sigma(0, 0);
  const double v2 = sigma(1, 1);
  const double cov = 0.5 * (sigma(0, 1) + sigma(1, 0));
  const double vmax = std::max(v1, v2);
  const double tol = 1e-12 * std::max(vmax, 1.0) * std::max(vmax, 1.0);
  if (v1 < -1e-12 * std::max(vmax, 1.0) || v2 < -1e-12 * std::max(vmax, 1.0) ||
      cov * cov > v1 * v2 + tol) {
    throw NumericError("phi2: covariance matrix is not PSD within tolerance");
  }

  constexpr double kDegenerate = 1e-14;
  const bool deg1 = v1 <= kDegenerate * vmax || v1 <= 0.0;
  const bool deg2 = v2 <= kDegenerate * vmax || v2 <= 0.0;
  if (deg1 && deg2) return (c[0] >= 0.0 && c[1] >= 0.0) ? 1.0 : 0.0;
  if (deg2) return c[1] >= 0.0 ? norm_cdf(c[0] / std::sqrt(v1)) : 0.0;
  if (deg1) return c[0] >= 0.0 ? norm_cdf(c[1] / std::sqrt(v2)) : 0.0;

  const double sd1 = std::sqrt(v1);
  const double sd2 = std::sqrt(v2);
  const double b1 = c[0] / sd1;
  const double b2 = c[1] / sd2;
  double rho = cov / (sd1 * sd2);
  rho = std::clamp(rho, -1.0, 1.0);
  if (rho >= 1.0 - 1e-15) return norm_cdf(std::min(b1, b2));
  if (rho <= -1.0 + 1e-15) return std::max(0.0, norm_cdf(b1) + norm_cdf(b2) - 1.0);
  return std::clamp(detail::bvnu(-b1, -b2, rho), 0.0, 1.0);
}

/// Phi2(c, sigma) + Phi2(-c, sigma): the probability mass of the two
/// "discordant" quadrants for a centered Gaussian pair.
inline double rho_parts(const Eigen::Ref<const Vector>& c, const Matrix& sigma) {
  return phi2(c, sigma) + phi2(-c, sigma);
}

}  // namespace exset
