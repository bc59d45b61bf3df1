#include "klein/rigidity.hpp"

#include "klein/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace klein {

namespace {

// Generator images are compared at this relative tolerance inside the
// pipeline; the returned verdict is held to kOrbitTolerance separately.
constexpr double kGeneratorTolerance = 1e-6;

bool projectively_equal(const Mat2d& x, const Mat2d& y)
{
    return projective_distance(x, y) <= kGeneratorTolerance * std::max(1.0, max_abs(y));
}

Mat2d conjugated(const Mat2d& m, const Mat2d& x)
{
    return m * x * inverse_sl2(m);
}

// Lift of the order-two rotation about the axis of a loxodromic c.
Mat2d half_turn(const Mat2d& c)
{
    const Mat2d p = normalize_pair(c, c).conj;
    const Complexd i(0, 1);
    return inverse_sl2(p) * make_mat2<double>(i, 0.0, 0.0, -i) * p;
}

// Least-squares solution of the stacked linear conditions m x_k = s_k y_k m:
// the right singular vector of the smallest singular value, each block
// weighted by the inverse entry scale of its generator pair.
Mat2d fit_conjugator(const std::vector<Mat2d>& x, const std::vector<Mat2d>& y, const std::vector<double>& signs)
{
    using Rows = Eigen::Matrix<Complexd, Eigen::Dynamic, 4>;
    Rows a(4 * static_cast<Eigen::Index>(x.size()), 4);
    a.setZero();
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double s = signs[k];
        const double w = 1.0 / std::max(max_abs(x[k]), max_abs(y[k]));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const Eigen::Index row = 4 * static_cast<Eigen::Index>(k) + 2 * i + j;
                // (m x)_ij - s (y m)_ij, unknown m_pq at column 2p + q.
                for (int q = 0; q < 2; ++q)
                    a(row, 2 * i + q) += w * x[k](q, j);
                for (int p = 0; p < 2; ++p)
                    a(row, 2 * p + j) -= w * s * y[k](i, p);
            }
    }
    Eigen::JacobiSVD<Rows> svd(a, Eigen::ComputeFullV);
    const auto v = svd.matrixV().col(3);
    return unimodularize(make_mat2<double>(v(0), v(1), v(2), v(3)));
}

// Refinement of an approximate conjugator m0, with the signs s_k read off
// from m0. The algebraic pipeline decides existence and signs; this only
// removes error amplified through the normalizations.
Mat2d polish(const std::vector<Mat2d>& x, const std::vector<Mat2d>& y, const Mat2d& m0)
{
    const Mat2d m0i = inverse_sl2(m0);
    std::vector<double> signs;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const Mat2d image = m0 * x[k] * m0i;
        signs.push_back((image - y[k]).norm() <= (image + y[k]).norm() ? 1.0 : -1.0);
    }
    return fit_conjugator(x, y, signs);
}

// Diagonal coefficients (a, d) of beta_1' in the (alpha_1', beta_1')-normalized
// frame, from conjugation invariants: a + d = tr beta and
// lambda a + d / lambda = tr(alpha beta). The product is evaluated on its
// Dehn-reduced word, where the long conjugating prefixes of the two frame
// words cancel; multiplying the lifts would not recover those digits.
std::pair<Complexd, Complexd> beta_diagonal(const SurfaceRepresentation& rho, const std::vector<Mat2d>& lifts,
                                            const StandardGenerators& gens, Complexd lambda)
{
    const GroupWord& alpha = gens.words()[0];
    const GroupWord& beta = gens.words()[1];
    // the lifts may carry a sign flip relative to plain evaluation
    const double s = (evaluate_reduced(rho, alpha) == lifts[0] ? 1.0 : -1.0) *
                     (evaluate_reduced(rho, beta) == lifts[1] ? 1.0 : -1.0);
    const Complexd tb = trace(lifts[1]);
    const Complexd tab = s * trace(evaluate_reduced(rho, alpha * beta));
    const Complexd a = (tab - tb / lambda) / (lambda - 1.0 / lambda);
    return {a, tb - a};
}

struct Attempt {
    std::optional<RigidityVerdict> verdict;
    std::string failure; // why no verdict was produced
};

// The Distinct verdict for the first curve whose lengths differ, provided
// some curve certifies the gap; otherwise nothing.
std::optional<RigidityVerdict> spectrum_witness(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                                                const std::vector<SimpleCurve>& stream, int threads,
                                                bool& below_gap)
{
    const auto cmp = compare_simple_spectra(rho1, rho2, stream, threads);
    below_gap = false;
    if (cmp.first_mismatch < 0)
        return std::nullopt;
    for (std::size_t i = static_cast<std::size_t>(cmp.first_mismatch); i < stream.size(); ++i) {
        const double l1 = length(rho1, stream[i].word), l2 = length(rho2, stream[i].word);
        if (std::abs(l1 - l2) > kWitnessGap) {
            RigidityVerdict v;
            v.kind = VerdictKind::Distinct;
            v.witness = stream[i];
            v.l1 = l1;
            v.l2 = l2;
            return v;
        }
    }
    below_gap = true;
    return std::nullopt;
}

Attempt attempt(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                const std::vector<SimpleCurve>& stream, ReconstructionDiagnostics& diag)
{
    const ReferenceCurve ref = find_reference_curve(rho1, rho2, stream);
    diag.reference_curve = to_string(ref.curve.word);
    diag.mode = ref.mode;
    diag.real_fallback = ref.real_fallback;
    const bool bar = ref.mode == ReferenceMode::Conjugate;
    const SurfaceRepresentation target = bar ? complex_conjugate(rho2) : rho2;

    const StandardGenerators gens = hyperbolic_standard_generators(rho1, ref.curve.generating_set());
    diag.frame = gens.frame();
    const LiftedPair lifts = lift_and_normalize(rho1, target, gens);
    const auto& l1 = lifts.lift1;
    const auto& l2 = lifts.lift2;

    // (alpha_1', beta_1')-normalize both lifts; then a diagonal K_1 with
    // u^2 = b_2 / b_1 makes them agree on G_1.
    const auto n1 = normalize_pair(l1[0], l1[1]);
    const auto n2 = normalize_pair(l2[0], l2[1]);
    const Mat2d& b1 = n1.beta_n;
    const Mat2d& b2 = n2.beta_n;
    // Eigenvalues from the traces: the normalized entries of a long lift carry
    // the cancellation error of its conjugating prefix.
    const Complexd lambda1 = larger_eigenvalue(l1[0]), lambda2 = larger_eigenvalue(l2[0]);
    if (std::abs(lambda1 - lambda2) > kGeneratorTolerance * std::abs(lambda1))
        return {std::nullopt, "reference eigenvalues differ"};
    const auto [a1, d1] = beta_diagonal(rho1, l1, gens, lambda1);
    const auto [a2, d2] = beta_diagonal(target, l2, gens, lambda2);
    const double scale = std::max({1.0, std::abs(a1), std::abs(d1)});
    if (std::abs(a1 - a2) > kGeneratorTolerance * scale || std::abs(d1 - d2) > kGeneratorTolerance * scale)
        return {std::nullopt, "diagonal coefficients of beta_1' differ"};
    if (std::abs(b1(0, 1)) <= 1e-12 || std::abs(b2(0, 1)) <= 1e-12)
        throw Error(ErrorKind::ZeroCoefficient, "b of beta_1'");
    const Complexd u = std::sqrt(b2(0, 1) / b1(0, 1));
    const Mat2d k1 = make_mat2<double>(u, 0.0, 0.0, 1.0 / u);
    // m = normalize_2^-1 K_1 normalize_1 carries the lift of rho1 to that of
    // rho2 on G_1. The pair is irreducible, so m is unique up to sign there;
    // a least-squares pass over (alpha_1', beta_1') recovers the digits the
    // normalizations lose when the reference frame is long.
    Mat2d m = polish({l1[0], l1[1]}, {l2[0], l2[1]}, inverse_sl2(n2.conj) * k1 * n1.conj);

    // Handles j >= 2: direct agreement, or the order-two rotation branch.
    const Mat2d c2 = l2[0] * l2[1] * inverse_sl2(l2[0]) * inverse_sl2(l2[1]);
    const bool axis = classify(c2) == IsometryClass::Loxodromic;
    const Mat2d r = axis ? half_turn(c2) : Mat2d::Identity();
    diag.branches.clear();
    bool all_equal = true, rotated = false;
    for (std::size_t k = 2; k < l1.size(); ++k) {
        const Mat2d image = conjugated(m, l1[k]);
        HandleBranch b = HandleBranch::Neither;
        if (projectively_equal(image, l2[k]))
            b = HandleBranch::Equal;
        else if (axis && projectively_equal(image, conjugated(r, l2[k])))
            b = HandleBranch::Rotated;
        diag.branches.push_back(b);
        all_equal = all_equal && b == HandleBranch::Equal;
        rotated = rotated || b == HandleBranch::Rotated;
    }
    if (rotated && rho1.genus == 2 && axis) {
        // In the frame where the commutator is diagonal: e/h = -d/a for
        // gamma = beta_1'^(+-1), delta the rotated generator.
        const Mat2d p = normalize_pair(c2, c2).conj;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 2; k < l1.size(); ++k) {
            if (diag.branches[k - 2] != HandleBranch::Rotated)
                continue;
            const Mat2d delta = conjugated(p, conjugated(m, l1[k]));
            for (const Mat2d& g : {l2[1], inverse_sl2(l2[1])}) {
                const Mat2d gamma = conjugated(p, g);
                best = std::min(best, std::abs(delta(0, 0) / delta(1, 1) + gamma(1, 1) / gamma(0, 0)));
            }
        }
        diag.rotation_certificate = best;
    }
    if (!all_equal && !rotated) {
        // The G_1 lifts of a long frame are nearly rank one and pin m down
        // poorly; refit over every handle. A genuine disagreement admits no
        // common fit, so this cannot manufacture agreement.
        // lift_and_normalize matched the trace signs, so every s_k is +1.
        const Mat2d refit = fit_conjugator(l1, l2, std::vector<double>(l1.size(), 1.0));
        bool fits = true;
        for (std::size_t k = 2; k < l1.size(); ++k)
            fits = fits && projectively_equal(conjugated(refit, l1[k]), l2[k]);
        if (fits) {
            m = refit;
            all_equal = true;
            std::fill(diag.branches.begin(), diag.branches.end(), HandleBranch::Equal);
        }
    }
    if (!all_equal)
        return {std::nullopt, rotated ? "order-two rotation branch on another handle" : "generator images disagree"};

    RigidityVerdict v;
    v.kind = bar ? VerdictKind::ConjugateAfterBar : VerdictKind::Conjugate;
    v.conjugator = sign_normalized(m);
    v.orbit_distance = orbit_distance(rho1, target, v.conjugator);
    const Mat2d refined = sign_normalized(polish(rho1.images, target.images, m));
    if (const double d = orbit_distance(rho1, target, refined); d < v.orbit_distance) {
        v.conjugator = refined;
        v.orbit_distance = d;
    }
    if (!(v.orbit_distance <= kOrbitTolerance))
        return {std::nullopt, "orbit distance " + std::to_string(v.orbit_distance) + " above tolerance"};
    return {v, {}};
}

} // namespace

std::string to_string(VerdictKind k)
{
    switch (k) {
    case VerdictKind::Conjugate: return "Conjugate";
    case VerdictKind::ConjugateAfterBar: return "ConjugateAfterBar";
    case VerdictKind::Distinct: return "Distinct";
    }
    return "?";
}

std::string to_string(HandleBranch b)
{
    switch (b) {
    case HandleBranch::Equal: return "Equal";
    case HandleBranch::Rotated: return "Rotated";
    case HandleBranch::Neither: return "Neither";
    }
    return "?";
}

double orbit_distance(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2, const Mat2d& m)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < rho1.images.size(); ++k)
        worst = std::max(worst, projective_distance(conjugated(m, rho1.images[k]), rho2.images[k]));
    return worst;
}

RigidityVerdict reconstruct(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2, int curve_budget,
                            const ReconstructOptions& options)
{
    if (rho1.genus != rho2.genus)
        throw Error(ErrorKind::InvalidInput, "genus mismatch");
    for (const auto* rho : {&rho1, &rho2})
        if (!(rho->relator_defect <= kInputRelatorTolerance))
            throw Error(ErrorKind::InvalidInput, "relator defect " + std::to_string(rho->relator_defect));
    if (curve_budget < 1)
        throw Error(ErrorKind::InvalidInput, "curve budget must be positive");

    const StandardGenerators canonical(rho1.genus);
    ReconstructionDiagnostics diag;
    int budget = curve_budget;
    std::string failure;
    for (int round = 0; round <= options.max_escalations; ++round, budget *= 2) {
        diag.escalations = round;
        const auto stream = simple_curve_stream(canonical, budget);
        diag.curves_compared = static_cast<int>(stream.size());
        bool below_gap = false;
        if (auto witness = spectrum_witness(rho1, rho2, stream, options.threads, below_gap)) {
            witness->diagnostics = diag;
            return *witness;
        }
        if (below_gap) {
            failure = "length differences below the witness gap";
            diag.log.push_back("budget " + std::to_string(budget) + ": " + failure);
            continue;
        }
        Attempt a;
        try {
            a = attempt(rho1, rho2, stream, diag);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::TraceMismatch && e.kind() != ErrorKind::Unclassifiable &&
                e.kind() != ErrorKind::ExhaustedReplacements)
                throw;
            a.failure = e.what();
        }
        if (a.verdict) {
            a.verdict->diagnostics = diag;
            return *a.verdict;
        }
        failure = a.failure;
        diag.log.push_back("budget " + std::to_string(budget) + ": " + failure);
    }
    throw Error(ErrorKind::NumericallyAmbiguous, failure);
}

KRelatedVerdict k_related_test(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2, int curve_budget,
                               int max_curves, const ReconstructOptions& options)
{
    auto stream = simple_curve_stream(StandardGenerators(rho1.genus), curve_budget);
    if (max_curves > 0 && static_cast<int>(stream.size()) > max_curves)
        stream.resize(static_cast<std::size_t>(max_curves));
    KRelatedVerdict out;
    std::vector<double> l1, l2;
    int reference = -1;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        l1.push_back(length(rho1, stream[i].word));
        l2.push_back(length(rho2, stream[i].word));
        if (reference < 0 && l1.back() > 0 && l2.back() > 0)
            reference = static_cast<int>(i);
    }
    if (reference < 0)
        throw Error(ErrorKind::NoLoxodromicCurve);
    out.k_hat = l1[reference] / l2[reference];
    constexpr double tol = 1e-6;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        ++out.curves_checked;
        const double dev = l2[i] > 0 ? std::abs(l1[i] / l2[i] - out.k_hat) / out.k_hat : std::abs(l1[i] - l2[i]);
        out.ratio_deviation = std::max(out.ratio_deviation, dev);
        if (dev > tol && !out.curve)
            out.curve = stream[i];
    }
    if (out.curve) {
        out.kind = KRelatedKind::Witness;
        return out;
    }
    if (std::abs(out.k_hat - 1.0) > tol) {
        // Proportional with k != 1 is impossible for discrete faithful pairs.
        out.kind = KRelatedKind::Witness;
        out.theorem_violation = true;
        out.curve = stream[reference];
        out.ratio_deviation = std::abs(out.k_hat - 1.0);
        return out;
    }
    out.verdict = reconstruct(rho1, rho2, curve_budget, options);
    if (out.verdict->kind == VerdictKind::Distinct) {
        out.kind = KRelatedKind::Witness;
        out.curve = out.verdict->witness;
        out.ratio_deviation = std::abs(out.verdict->l1 / out.verdict->l2 - 1.0);
        return out;
    }
    out.kind = KRelatedKind::ProportionalImpliesEqual;
    return out;
}

} // namespace klein
