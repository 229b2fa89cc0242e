#pragma once

namespace wetfb {

class RngStream;

// Convergence control for series evaluation. Defaults sized for arguments
// up to ~1e5, where the 1F2 series needs O(sqrt(z)) terms.
struct SeriesControl {
  double rel_tol = 1e-15;
  int max_terms = 10000;
};

// Modified Bessel function of the second kind, order 0 or 1.
// scaled=true returns e^x * K_order(x), the overflow-safe primitive.
// Series for x < 2, Steed continued fraction for x >= 2.
double bessel_k(int order, double x, bool scaled = false);

// 1F2(1; b1, b2; z) = sum_j z^j / ((b1)_j (b2)_j), all terms positive.
// Kahan-compensated; throws on non-convergence within ctrl.max_terms.
double hyp1f2(double b1, double b2, double z, const SeriesControl& ctrl = {});

// Gaussian tail probability Q(x) = P[N(0,1) > x].
double gauss_q(double x);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// One draw from Gamma(shape, scale 1), shape >= 0.5.
double sample_std_gamma(double shape, RngStream& rng);

// F(z) = int_0^z t^p K0(2 sqrt(t)) dt for p > -1, with F(0) = 0 and
// F(inf) = Gamma(p+1)^2 / 2. Saturates to the limit once the tail is
// below double precision.
double zpk0_antiderivative(double p, double z, const SeriesControl& ctrl = {});

}  // namespace wetfb
