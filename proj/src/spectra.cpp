#include "klein/spectra.hpp"

#include "klein/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace klein {

namespace {

// log(1 + d) - d without cancellation for small d.
Complexd log1p_minus_identity(Complexd d)
{
    if (std::abs(d) >= 0.5)
        return std::log(1.0 + d) - d;
    Complexd sum = 0.0;
    Complexd power = d * d;
    for (int m = 2; m < 200; ++m) {
        const Complexd term = power / static_cast<double>(m);
        sum += (m % 2 == 0) ? -term : term;
        if (std::abs(term) <= 1e-18 * std::abs(sum))
            break;
        power *= d;
    }
    return sum;
}

// delta = rho - 1 where rho is the larger root of rho^2 - (1 + k eps) rho + eps
// and k = ad; delta solves delta (1 + delta - k eps) = (k - 1) eps.
Complexd relative_root_shift(Complexd k, Complexd bc, Complexd eps)
{
    if (std::abs(eps) * (std::abs(k) + std::abs(bc)) < 0.25) {
        Complexd delta = bc * eps;
        for (int it = 0; it < 200; ++it) {
            const Complexd next = bc * eps / (1.0 + delta - k * eps);
            const bool done = std::abs(next - delta) <= 1e-17 * std::abs(next);
            delta = next;
            if (done)
                break;
        }
        return delta;
    }
    const Complexd tau = 1.0 + k * eps;
    const Complexd s = std::sqrt(tau * tau - 4.0 * eps);
    const Complexd plus = (tau + s) / 2.0, minus = (tau - s) / 2.0;
    return (std::abs(plus) >= std::abs(minus) ? plus : minus) - 1.0;
}

std::string entry_name(int r, int c)
{
    static const char* names[2][2] = {{"a", "b"}, {"c", "d"}};
    return names[r][c];
}

double relative_imaginary(Complexd z)
{
    return std::abs(z.imag()) / std::abs(z);
}

} // namespace

bool lengths_agree(double l1, double l2, double tol)
{
    return std::abs(l1 - l2) <= tol * std::max({1.0, std::abs(l1), std::abs(l2)});
}

LambdaSquaredd lambda_squared(const SurfaceRepresentation& rep, const GroupWord& w)
{
    // The cyclically Dehn-reduced form is conjugate to w and avoids the large
    // intermediate products of unreduced twist images.
    const Mat2d m = evaluate(rep, cyclic_dehn_reduce(dehn_reduce(w)));
    switch (classify(m)) {
    case IsometryClass::Identity: throw Error(ErrorKind::IdentityInput, to_string(w));
    case IsometryClass::Elliptic: throw Error(ErrorKind::EllipticImage, to_string(w));
    default: return complex_length_sq(m);
    }
}

ComplexLengthd complex_length(const SurfaceRepresentation& rep, const GroupWord& w)
{
    return lambda_squared(rep, w).length;
}

double length(const SurfaceRepresentation& rep, const GroupWord& w)
{
    return complex_length(rep, w).translation();
}

ExpansionReport expansion_report(const Mat2d& alpha_image, const Mat2d& beta_image, int n_first, int n_last)
{
    if (n_first < 1 || n_last < n_first)
        throw Error(ErrorKind::InvalidInput, "n range");
    const auto normalized = normalize_pair(alpha_image, beta_image);
    const Mat2d& b = normalized.beta_n;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            if (std::abs(b(r, c)) <= 1e-12)
                throw Error(ErrorKind::ZeroCoefficient, entry_name(r, c));

    ExpansionReport out;
    out.lambda = normalized.alpha_n(0, 0);
    out.beta_normalized = b;
    const Complexd a = b(0, 0), k = b(0, 0) * b(1, 1), bc = b(0, 1) * b(1, 0);
    const double log_lambda = std::log(std::abs(out.lambda));
    const double log_a = std::log(std::abs(a));
    out.predicted_decay_rate = std::pow(std::abs(out.lambda), -4.0);

    // log mu(n) = n log|lambda| + log|a| + log|rho_n| with rho_n = 1 + delta.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int points = 0;
    for (int n = n_first; n <= n_last; ++n) {
        const Complexd eps = std::pow(out.lambda, -2 * n) / (a * a);
        const Complexd delta = relative_root_shift(k, bc, eps);
        // log(1 + delta) - bc eps = (log(1 + delta) - delta) - delta (delta - k eps)
        const Complexd residual = log1p_minus_identity(delta) - delta * (delta - k * eps);
        ExpansionRow row;
        row.n = n;
        row.predicted = n * log_lambda + log_a + (bc * eps).real();
        row.residual = residual.real();
        row.exact = row.predicted + row.residual;
        row.complex_residual_abs = std::abs(residual);
        out.rows.push_back(row);
        if (row.complex_residual_abs > 0 && std::isfinite(row.complex_residual_abs)) {
            const double y = std::log(row.complex_residual_abs);
            sx += n;
            sy += y;
            sxx += double(n) * n;
            sxy += n * y;
            ++points;
        }
    }
    if (points >= 2) {
        const double slope = (points * sxy - sx * sy) / (points * sxx - sx * sx);
        out.fitted_decay_rate = std::exp(slope);
    }
    return out;
}

ExpansionReport expansion_report(const SurfaceRepresentation& rep, const GroupWord& alpha, const GroupWord& beta,
                                 int n_first, int n_last)
{
    return expansion_report(evaluate_reduced(rep, alpha), evaluate_reduced(rep, beta), n_first, n_last);
}

std::string to_string(SpectrumRelation r)
{
    switch (r) {
    case SpectrumRelation::Same: return "Same";
    case SpectrumRelation::ConjugatePair: return "ConjugatePair";
    case SpectrumRelation::SignFlipReal: return "SignFlipReal";
    }
    return "?";
}

SpectrumRelation classify_lambda_pair(Complexd l1, Complexd l2, double tol)
{
    const double scale = std::max({1.0, std::abs(l1), std::abs(l2)});
    if (std::abs(l1 - l2) <= tol * scale)
        return SpectrumRelation::Same;
    if (std::abs(l1 - std::conj(l2)) <= tol * scale)
        return SpectrumRelation::ConjugatePair;
    if (std::abs(l1 + l2) <= tol * scale && std::abs(l1.imag()) <= tol * scale)
        return SpectrumRelation::SignFlipReal;
    throw Error(ErrorKind::Unclassifiable);
}

SpectrumRelation classify_pair_on_curve(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                                        const GroupWord& curve)
{
    const auto s1 = lambda_squared(rho1, curve);
    const auto s2 = lambda_squared(rho2, curve);
    if (!lengths_agree(s1.length.translation(), s2.length.translation()))
        throw Error(ErrorKind::LengthMismatch, to_string(curve));
    try {
        return classify_lambda_pair(s1.lambda_sq, s2.lambda_sq);
    } catch (const Error&) {
        throw Error(ErrorKind::Unclassifiable, to_string(curve));
    }
}

SpectrumRelation classify_pair_on_curve(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                                        const SimpleCurve& curve)
{
    return classify_pair_on_curve(rho1, rho2, curve.word);
}

std::string to_string(RotationCase c)
{
    switch (c) {
    case RotationCase::EqualRotation: return "EqualRotation";
    case RotationCase::ConjugateRotation: return "ConjugateRotation";
    case RotationCase::OppositeRealRotation: return "OppositeRealRotation";
    case RotationCase::Inconsistent: return "Inconsistent";
    }
    return "?";
}

RotationCase rotate_classify(Complexd u1, Complexd u2, Complexd v1, Complexd v2, int horizon)
{
    constexpr double tol = 1e-9;
    const double scale = std::abs(v1) + std::abs(v2);
    Complexd p1 = 1.0, p2 = 1.0;
    double tail = 0.0;
    for (int n = 0; n <= horizon; ++n) {
        if (2 * n >= horizon)
            tail = std::max(tail, std::abs((p1 * v1 - p2 * v2).real()));
        // Renormalize to the unit circle so rounding does not drift |u^n|.
        p1 *= u1;
        p2 *= u2;
        p1 /= std::abs(p1);
        p2 /= std::abs(p2);
    }
    if (tail > tol * scale)
        return RotationCase::Inconsistent;
    if (std::abs(u1 - u2) <= tol)
        return RotationCase::EqualRotation;
    if (std::abs(u1 - std::conj(u2)) <= tol)
        return RotationCase::ConjugateRotation;
    if (std::abs(u1 + u2) <= tol && std::abs(std::abs(u1.real()) - 1.0) <= tol)
        return RotationCase::OppositeRealRotation;
    return RotationCase::Inconsistent;
}

SpectrumComparison compare_simple_spectra(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                                          const std::vector<SimpleCurve>& curves, int threads)
{
    const std::size_t n = curves.size();
    std::vector<double> l1(n), l2(n);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            l1[i] = length(rho1, curves[i].word);
            l2[i] = length(rho2, curves[i].word);
        }
    };
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < workers; ++t)
            pool.emplace_back(work);
    }
    SpectrumComparison out;
    for (std::size_t i = 0; i < n; ++i) {
        out.max_difference = std::max(out.max_difference, std::abs(l1[i] - l2[i]));
        if (out.first_mismatch < 0 && !lengths_agree(l1[i], l2[i])) {
            out.first_mismatch = static_cast<int>(i);
            out.l1 = l1[i];
            out.l2 = l2[i];
        }
    }
    return out;
}

std::string to_string(ReferenceMode m)
{
    return m == ReferenceMode::Same ? "Same" : "Conjugate";
}

ReferenceCurve find_reference_curve(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                                    const std::vector<SimpleCurve>& stream)
{
    // Non-real lambda^2 below this relative size is treated as real: the
    // Same/Conjugate decision would then sit inside the comparison tolerance.
    constexpr double kNonReal = 1e-6;
    // Above this the decision is robust.
    constexpr double kWellSeparated = 1e-3;
    // Within a tier (well separated if any curve is, else merely non-real)
    // the curve whose generating set has the fewest letters is taken,
    // earliest on ties: the lifts of long generating words lose digits to
    // cancellation, and the conjugator is read off from them. Taking the
    // most non-real curve instead drifts to long curves.
    const auto frame_cost = [](const SimpleCurve& c) {
        std::size_t letters = 0;
        const StandardGenerators gens = c.generating_set();
        for (const auto& w : gens.words())
            letters += w.size();
        return letters;
    };
    const auto tier = [&](double im) { return im > kWellSeparated ? 2 : im > kNonReal ? 1 : 0; };
    int best = -1, best_tier = 0, first_loxodromic = -1;
    std::size_t best_cost = 0;
    std::vector<LambdaSquaredd> s1(stream.size()), s2(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const GroupWord& w = stream[i].word;
        s1[i] = lambda_squared(rho1, w);
        s2[i] = lambda_squared(rho2, w);
        if (!lengths_agree(s1[i].length.translation(), s2[i].length.translation()))
            throw Error(ErrorKind::SpectraDisagree, to_string(w));
        if (!(s1[i].length.translation() > 0))
            continue; // parabolic
        if (first_loxodromic < 0)
            first_loxodromic = static_cast<int>(i);
        const int t = tier(relative_imaginary(s1[i].lambda_sq));
        if (t == 0 || t < best_tier)
            continue;
        const std::size_t cost = frame_cost(stream[i]);
        if (t > best_tier || cost < best_cost) {
            best = static_cast<int>(i);
            best_tier = t;
            best_cost = cost;
        }
    }
    if (first_loxodromic < 0)
        throw Error(ErrorKind::BudgetExhausted, "no loxodromic curve in the stream");
    if (best < 0)
        return {stream[first_loxodromic], ReferenceMode::Same, true};
    SpectrumRelation rel;
    try {
        rel = classify_lambda_pair(s1[best].lambda_sq, s2[best].lambda_sq);
    } catch (const Error&) {
        throw Error(ErrorKind::Unclassifiable, to_string(stream[best].word));
    }
    return {stream[best], rel == SpectrumRelation::ConjugatePair ? ReferenceMode::Conjugate : ReferenceMode::Same,
            false};
}

} // namespace klein
