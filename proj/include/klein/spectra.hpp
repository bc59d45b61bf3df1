#pragma once

#include "klein/curves.hpp"
#include "klein/moebius.hpp"
#include "klein/reps.hpp"

#include <string>
#include <vector>

namespace klein {

// Lengths are compared at this absolute tolerance, scaled by max(1, length).
inline constexpr double kLengthTolerance = 1e-8;
// lambda^2 values are compared at this relative tolerance.
inline constexpr double kLambdaTolerance = 1e-8;
// A length difference above this is a certified witness of distinct spectra.
inline constexpr double kWitnessGap = 1e-6;

bool lengths_agree(double l1, double l2, double tol = kLengthTolerance);

// Translation length of rep(w); parabolic images give 0. Throws
// EllipticImage (or IdentityInput for trivial images).
double length(const SurfaceRepresentation& rep, const GroupWord& w);
ComplexLengthd complex_length(const SurfaceRepresentation& rep, const GroupWord& w);
LambdaSquaredd lambda_squared(const SurfaceRepresentation& rep, const GroupWord& w);

// Comparison of exact eigenvalue growth along alpha^n beta with the
// three-term expansion n log|lambda| + log|a| + Re(lambda^-2n bc / a^2), in
// the (alpha, beta)-normalized frame.
struct ExpansionRow {
    int n = 0;
    double exact = 0.0;     // log mu(n)
    double predicted = 0.0; // three-term expansion
    double residual = 0.0;  // exact - predicted, evaluated without cancellation
    double complex_residual_abs = 0.0; // |log(rho_n) - lambda^-2n bc / a^2|, see expansion_report
};

struct ExpansionReport {
    Complexd lambda; // |lambda| > 1
    Mat2d beta_normalized;
    std::vector<ExpansionRow> rows;
    // exp(slope) of the least-squares line through log |complex residual|
    // against n; the expansion predicts |lambda|^-4.
    double fitted_decay_rate = 0.0;
    double predicted_decay_rate = 0.0; // |lambda|^-4
};

// Throws ZeroCoefficient naming the vanishing entry of the normalized beta
// image (|entry| <= 1e-12), NotLoxodromic if alpha's image is not.
ExpansionReport expansion_report(const Mat2d& alpha_image, const Mat2d& beta_image, int n_first, int n_last);
ExpansionReport expansion_report(const SurfaceRepresentation& rep, const GroupWord& alpha, const GroupWord& beta,
                                 int n_first, int n_last);

enum class SpectrumRelation : std::uint8_t { Same, ConjugatePair, SignFlipReal };
std::string to_string(SpectrumRelation r);

// Relation between lambda^2 values with equal moduli; Same wins when the
// value is real and several relations hold. Throws Unclassifiable.
SpectrumRelation classify_lambda_pair(Complexd l1, Complexd l2, double tol = kLambdaTolerance);

// Throws LengthMismatch if the lengths differ, Unclassifiable if none of the
// three relations holds.
SpectrumRelation classify_pair_on_curve(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                                        const GroupWord& curve);
SpectrumRelation classify_pair_on_curve(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                                        const SimpleCurve& curve);

enum class RotationCase : std::uint8_t { EqualRotation, ConjugateRotation, OppositeRealRotation, Inconsistent };
std::string to_string(RotationCase c);

inline constexpr int kDefaultRotationHorizon = 256;

// Finite-horizon check of which case of the unit-circle trichotomy is
// consistent with Re(u1^n v1 - u2^n v2) -> 0: the sequence must be
// negligible over the second half of 0..horizon, and (u1, u2) must realize
// one of u1 = u2, u1 = conj(u2), u1 = -u2 = +-1.
RotationCase rotate_classify(Complexd u1, Complexd u2, Complexd v1, Complexd v2,
                             int horizon = kDefaultRotationHorizon);

// Length comparison over a list of curves. Returns the index of the first
// curve whose lengths differ by more than the tolerance, or -1.
struct SpectrumComparison {
    int first_mismatch = -1;
    double l1 = 0.0, l2 = 0.0;
    double max_difference = 0.0;
};
SpectrumComparison compare_simple_spectra(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                                          const std::vector<SimpleCurve>& curves, int threads = 1);

enum class ReferenceMode : std::uint8_t { Same, Conjugate };
std::string to_string(ReferenceMode m);

struct ReferenceCurve {
    SimpleCurve curve;
    ReferenceMode mode = ReferenceMode::Same;
    bool real_fallback = false; // every examined lambda^2 was real
};

// A curve of the stream with loxodromic rho1-image: the first whose
// lambda^2 is clearly non-real, else the one furthest from the real axis,
// together with whether rho2
// or its complex conjugate matches rho1 on it. Throws SpectraDisagree if two
// lengths differ, BudgetExhausted if no streamed curve is loxodromic.
ReferenceCurve find_reference_curve(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                                    const std::vector<SimpleCurve>& stream);

} // namespace klein
