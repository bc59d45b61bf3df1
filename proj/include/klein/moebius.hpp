#pragma once

#include "klein/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace klein {

template <typename Scalar>
using Complex = std::complex<Scalar>;

// Unimodular 2x2 complex matrix; the determinant-one invariant is checked by
// is_unimodular() rather than by the type, so Eigen expressions stay cheap.
template <typename Scalar>
using Mat2 = Eigen::Matrix<Complex<Scalar>, 2, 2>;

using Complexd = Complex<double>;
using Mat2d = Mat2<double>;

enum class IsometryClass { Identity, Elliptic, Parabolic, Loxodromic };

constexpr const char* to_string(IsometryClass c)
{
    switch (c) {
    case IsometryClass::Identity: return "Identity";
    case IsometryClass::Elliptic: return "Elliptic";
    case IsometryClass::Parabolic: return "Parabolic";
    case IsometryClass::Loxodromic: return "Loxodromic";
    }
    return "?";
}

// Tolerance on |tr^2 - 4| separating parabolic from loxodromic/elliptic.
inline constexpr double kParabolicTolerance = 1e-9;
// Tolerance on |det - 1| for the unimodular invariant.
inline constexpr double kUnimodularTolerance = 1e-12;

// log(lambda^2) with Im in [0, 2*pi); the real part is the translation length.
template <typename Scalar>
struct ComplexLength {
    Complex<Scalar> value;

    Scalar translation() const { return value.real(); }
    Scalar rotation() const { return value.imag(); }
};

template <typename Scalar>
struct LambdaSquared {
    Complex<Scalar> lambda_sq;
    ComplexLength<Scalar> length;
};

using ComplexLengthd = ComplexLength<double>;
using LambdaSquaredd = LambdaSquared<double>;

// A point of the Riemann sphere; `infinite` overrides `z`.
template <typename Scalar>
struct SpherePoint {
    Complex<Scalar> z{};
    bool infinite = false;
};

template <typename Scalar>
struct FixedPoints {
    SpherePoint<Scalar> attracting;
    SpherePoint<Scalar> repelling;
};

template <typename Scalar>
struct NormalizedPair {
    Mat2<Scalar> conj;
    Mat2<Scalar> alpha_n;
    Mat2<Scalar> beta_n;
};

template <typename Scalar>
Mat2<Scalar> make_mat2(Complex<Scalar> a, Complex<Scalar> b, Complex<Scalar> c, Complex<Scalar> d)
{
    Mat2<Scalar> m;
    m << a, b, c, d;
    return m;
}

template <typename Scalar>
Complex<Scalar> trace(const Mat2<Scalar>& m)
{
    return m(0, 0) + m(1, 1);
}

template <typename Scalar>
Complex<Scalar> determinant(const Mat2<Scalar>& m)
{
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

template <typename Scalar>
bool is_unimodular(const Mat2<Scalar>& m, Scalar tol = Scalar(kUnimodularTolerance))
{
    return std::abs(determinant(m) - Complex<Scalar>(1)) <= tol;
}

// Rescales by 1/sqrt(det) so the determinant is one up to rounding.
template <typename Scalar>
Mat2<Scalar> unimodularize(const Mat2<Scalar>& m)
{
    return m / std::sqrt(determinant(m));
}

// Exact inverse of a unimodular matrix (adjugate); no division.
template <typename Scalar>
Mat2<Scalar> inverse_sl2(const Mat2<Scalar>& m)
{
    return make_mat2<Scalar>(m(1, 1), -m(0, 1), -m(1, 0), m(0, 0));
}

template <typename Scalar>
Mat2<Scalar> entrywise_conjugate(const Mat2<Scalar>& m)
{
    return m.conjugate();
}

template <typename Scalar>
Scalar max_abs(const Mat2<Scalar>& m)
{
    return m.cwiseAbs().maxCoeff();
}

// Largest singular value of a 2x2 matrix in closed form.
template <typename Scalar>
Scalar operator_norm(const Mat2<Scalar>& m)
{
    using std::sqrt;
    const Scalar f = m.squaredNorm();
    const Scalar d = std::abs(determinant(m));
    const Scalar disc = std::max(Scalar(0), f * f - Scalar(4) * d * d);
    return sqrt((f + sqrt(disc)) / Scalar(2));
}

// Distance in PSL(2,C): entrywise max-norm, minimised over the global sign.
template <typename Scalar>
Scalar projective_distance(const Mat2<Scalar>& x, const Mat2<Scalar>& y)
{
    return std::min(max_abs<Scalar>(x - y), max_abs<Scalar>(x + y));
}

// Operator-norm distance from {+I, -I}.
template <typename Scalar>
Scalar distance_from_identity(const Mat2<Scalar>& m)
{
    const Mat2<Scalar> id = Mat2<Scalar>::Identity();
    return std::min(operator_norm<Scalar>(m - id), operator_norm<Scalar>(m + id));
}

// Sign representative of the projective class: the first nonzero entry in
// the order (a, b, c, d) has positive real part, or zero real part and
// nonnegative imaginary part.
template <typename Scalar>
Mat2<Scalar> sign_normalized(const Mat2<Scalar>& m)
{
    const Complex<Scalar> entries[4] = {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
    for (const auto& e : entries) {
        if (e == Complex<Scalar>(0))
            continue;
        const bool negate = e.real() < 0 || (e.real() == 0 && e.imag() < 0);
        return negate ? Mat2<Scalar>(-m) : m;
    }
    return m;
}

template <typename Scalar>
IsometryClass classify(const Mat2<Scalar>& m, Scalar parabolic_tol = Scalar(kParabolicTolerance))
{
    const Mat2<Scalar> id = Mat2<Scalar>::Identity();
    if (std::min(max_abs<Scalar>(m - id), max_abs<Scalar>(m + id)) <= parabolic_tol)
        return IsometryClass::Identity;
    const Complex<Scalar> t = trace(m);
    const Complex<Scalar> t2 = t * t;
    if (std::abs(t2 - Complex<Scalar>(4)) <= parabolic_tol)
        return IsometryClass::Parabolic;
    if (std::abs(t2.imag()) <= parabolic_tol && t2.real() >= -parabolic_tol && t2.real() < Scalar(4))
        return IsometryClass::Elliptic;
    return IsometryClass::Loxodromic;
}

// Eigenvalue of larger modulus from the characteristic polynomial
// x^2 - tr x + 1, taking the branch that avoids cancellation.
template <typename Scalar>
Complex<Scalar> larger_eigenvalue(const Mat2<Scalar>& m)
{
    const Complex<Scalar> t = trace(m);
    const Complex<Scalar> s = std::sqrt(t * t - Complex<Scalar>(4));
    const Complex<Scalar> plus = t + s;
    const Complex<Scalar> minus = t - s;
    return (std::abs(plus) >= std::abs(minus) ? plus : minus) / Scalar(2);
}

template <typename Scalar>
ComplexLength<Scalar> complex_log_length(Complex<Scalar> lambda_sq)
{
    Complex<Scalar> v = std::log(lambda_sq);
    Scalar im = v.imag();
    if (im < 0)
        im += Scalar(2) * std::numbers::pi_v<Scalar>;
    if (im == 0 || im >= Scalar(2) * std::numbers::pi_v<Scalar>)
        im = 0;
    Scalar re = v.real();
    if (re < 0)
        re = 0; // |lambda| >= 1 by construction; clamp rounding noise
    return {Complex<Scalar>(re, im)};
}

template <typename Scalar>
LambdaSquared<Scalar> complex_length_sq(const Mat2<Scalar>& m)
{
    switch (classify(m)) {
    case IsometryClass::Identity: throw Error(ErrorKind::IdentityInput);
    case IsometryClass::Elliptic: throw Error(ErrorKind::EllipticInput);
    case IsometryClass::Parabolic: return {Complex<Scalar>(1), {Complex<Scalar>(0)}};
    case IsometryClass::Loxodromic: break;
    }
    const Complex<Scalar> lambda = larger_eigenvalue(m);
    const Complex<Scalar> lambda_sq = lambda * lambda;
    return {lambda_sq, complex_log_length(lambda_sq)};
}

namespace detail {

// Eigenvector for eigenvalue mu as a sphere point: of the two candidate
// kernel vectors of (m - mu I) take the better-conditioned one.
template <typename Scalar>
SpherePoint<Scalar> eigen_point(const Mat2<Scalar>& m, Complex<Scalar> mu)
{
    const Complex<Scalar> u0 = m(0, 1), u1 = mu - m(0, 0);
    const Complex<Scalar> v0 = mu - m(1, 1), v1 = m(1, 0);
    const bool use_u = std::norm(u0) + std::norm(u1) >= std::norm(v0) + std::norm(v1);
    const Complex<Scalar> p = use_u ? u0 : v0;
    const Complex<Scalar> q = use_u ? u1 : v1;
    const Scalar eps = Scalar(64) * std::numeric_limits<Scalar>::epsilon();
    if (std::abs(q) <= eps * std::abs(p))
        return {Complex<Scalar>(0), true};
    return {p / q, false};
}

} // namespace detail

template <typename Scalar>
FixedPoints<Scalar> fixed_points(const Mat2<Scalar>& m)
{
    const IsometryClass cls = classify(m);
    if (cls == IsometryClass::Identity)
        throw Error(ErrorKind::IdentityInput);
    if (cls == IsometryClass::Parabolic) {
        const Complex<Scalar> c = m(1, 0);
        const Scalar scale = max_abs(m);
        SpherePoint<Scalar> p;
        if (std::abs(c) <= Scalar(kParabolicTolerance) * scale)
            p.infinite = true;
        else
            p.z = (m(0, 0) - m(1, 1)) / (Scalar(2) * c);
        return {p, p};
    }
    const Complex<Scalar> lambda = larger_eigenvalue(m);
    return {detail::eigen_point(m, lambda), detail::eigen_point(m, Complex<Scalar>(1) / lambda)};
}

// Conjugates alpha to diag(lambda, 1/lambda) with |lambda| > 1: the
// attracting fixed point goes to infinity and the repelling one to zero.
template <typename Scalar>
NormalizedPair<Scalar> normalize_pair(const Mat2<Scalar>& alpha_m, const Mat2<Scalar>& beta_m)
{
    if (classify(alpha_m) != IsometryClass::Loxodromic)
        throw Error(ErrorKind::NotLoxodromic, "alpha image");
    const auto fp = fixed_points(alpha_m);
    const auto& zp = fp.attracting;
    const auto& zm = fp.repelling;
    Mat2<Scalar> conj;
    if (zp.infinite) {
        conj = make_mat2<Scalar>(Complex<Scalar>(1), -zm.z, Complex<Scalar>(0), Complex<Scalar>(1));
    } else if (zm.infinite) {
        conj = make_mat2<Scalar>(Complex<Scalar>(0), Complex<Scalar>(1), Complex<Scalar>(-1), zp.z);
    } else {
        conj = make_mat2<Scalar>(Complex<Scalar>(1), -zm.z, Complex<Scalar>(1), -zp.z) / std::sqrt(zm.z - zp.z);
    }
    const Mat2<Scalar> conj_inv = inverse_sl2(conj);
    return {conj, conj * alpha_m * conj_inv, conj * beta_m * conj_inv};
}

} // namespace klein
