#ifndef MOSQGAME_CUBIC_HPP
#define MOSQGAME_CUBIC_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace mosqgame {

using Complex = std::complex<double>;

/// Dense 3x3 real matrix, row-major, indices ordered (L_v, A_v, w).
struct Matrix3 {
    std::array<std::array<double, 3>, 3> a{};

    double& operator()(int i, int j) noexcept { return a[i][j]; }
    double operator()(int i, int j) const noexcept { return a[i][j]; }

    [[nodiscard]] double trace() const noexcept { return a[0][0] + a[1][1] + a[2][2]; }
    [[nodiscard]] double principal_minor_sum() const noexcept {
        return a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] +
               a[1][1] * a[2][2] - a[1][2] * a[2][1];
    }
    [[nodiscard]] double determinant() const noexcept {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    }
    /// Maximum absolute row sum.
    [[nodiscard]] double norm_inf() const noexcept {
        double n = 0.0;
        for (const auto& row : a) n = std::max(n, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
        return n;
    }
};

/// Coefficients of the monic cubic lambda^3 + c2 lambda^2 + c1 lambda + c0.
struct MonicCubic {
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;

    [[nodiscard]] Complex operator()(Complex z) const noexcept { return ((z + c2) * z + c1) * z + c0; }
    [[nodiscard]] Complex derivative(Complex z) const noexcept {
        return (3.0 * z + 2.0 * c2) * z + c1;
    }
    /// Root-magnitude scale max(|c2|, |c1|^(1/2), |c0|^(1/3)); every root lies within twice this.
    [[nodiscard]] double root_scale() const noexcept {
        return std::max({std::abs(c2), std::sqrt(std::abs(c1)), std::cbrt(std::abs(c0))});
    }
};

/// Characteristic polynomial det(lambda I - J).
inline MonicCubic characteristic_polynomial(const Matrix3& J) noexcept {
    return {-J.trace(), J.principal_minor_sum(), -J.determinant()};
}

namespace detail {

inline Complex newton_polish(const MonicCubic& p, Complex z) noexcept {
    const Complex d = p.derivative(z);
    if (d == Complex{}) return z;
    const Complex z1 = z - p(z) / d;
    return std::abs(p(z1)) < std::abs(p(z)) ? z1 : z;
}

inline double newton_polish(const MonicCubic& p, double x) noexcept {
    for (int it = 0; it < 3; ++it) {
        const double fx = ((x + p.c2) * x + p.c1) * x + p.c0;
        const double d = (3.0 * x + 2.0 * p.c2) * x + p.c1;
        if (d == 0.0) break;
        const double x1 = x - fx / d;
        const double f1 = ((x1 + p.c2) * x1 + p.c1) * x1 + p.c0;
        if (!(std::abs(f1) < std::abs(fx))) break;
        x = x1;
    }
    return x;
}

} // namespace detail

namespace detail {

/// Remaining roots after dividing out the real root r1: lambda^2 + beta lambda + gam.
/// The cofactor comes from whichever coefficient identity avoids cancellation,
/// which matters when r1 dwarfs the other roots.
inline void deflate(const MonicCubic& poly, double r1, std::array<Complex, 3>& roots) {
    const double a = poly.c2, b = poly.c1, c = poly.c0;
    double beta, gam;
    if (r1 != 0.0 && r1 * r1 > std::abs(b)) {
        gam = -c / r1;
        beta = (gam - b) / r1;
    } else {
        beta = a + r1;
        gam = b + r1 * beta;
    }
    const double d = beta * beta / 4.0 - gam;
    roots[0] = r1;
    if (d >= 0.0) {
        const double s = std::sqrt(d);
        // Larger-magnitude root first, the other from the product.
        const double big = -beta / 2.0 - std::copysign(s, beta);
        const double small = (big != 0.0) ? gam / big : 0.0;
        roots[1] = newton_polish(poly, big);
        roots[2] = newton_polish(poly, small);
    } else {
        const Complex z = newton_polish(poly, Complex{-beta / 2.0, std::sqrt(-d)});
        roots[1] = z;
        roots[2] = std::conj(z);
    }
}

} // namespace detail

/// Roots of a monic real cubic, sorted by descending real part, ties by
/// descending imaginary part.
///
/// One real root comes from the closed form (trigonometric when all three
/// are real, Cardano otherwise), polished by Newton; the other two come from
/// the deflated quadratic. With three real roots the largest in magnitude is
/// divided out, so small roots survive a huge one.
inline std::array<Complex, 3> solve_cubic(const MonicCubic& poly) {
    const double a = poly.c2, b = poly.c1, c = poly.c0;
    const double shift = a / 3.0;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = q * q / 4.0 + p * p * p / 27.0;

    double r1;
    if (disc < 0.0) {
        // p < 0 here.
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        r1 = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double t = m * std::cos(theta - 2.0 * std::numbers::pi * i / 3.0) - shift;
            if (std::abs(t) > std::abs(r1)) r1 = t;
        }
    } else {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 - std::copysign(sq, q));
        const double v = (u == 0.0) ? 0.0 : -p / (3.0 * u);
        r1 = u + v - shift;
    }
    std::array<Complex, 3> roots;
    detail::deflate(poly, detail::newton_polish(poly, r1), roots);
    std::sort(roots.begin(), roots.end(), [](const Complex& x, const Complex& y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return roots;
}

/// The three eigenvalues of J, via its characteristic cubic.
inline std::array<Complex, 3> eigenvalues3(const Matrix3& J) {
    return solve_cubic(characteristic_polynomial(J));
}

} // namespace mosqgame

#endif
