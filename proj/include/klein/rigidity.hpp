#pragma once

#include "klein/curves.hpp"
#include "klein/reps.hpp"
#include "klein/spectra.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace klein {

// Bound on the projective orbit distance certified by a Conjugate verdict.
inline constexpr double kOrbitTolerance = 1e-8;

enum class VerdictKind : std::uint8_t { Conjugate, ConjugateAfterBar, Distinct };
std::string to_string(VerdictKind k);

// How a generator of another handle relates to the reference handle after
// the lifts were made to agree on <a_1', b_1'>.
enum class HandleBranch : std::uint8_t { Equal, Rotated, Neither };
std::string to_string(HandleBranch b);

struct ReconstructionDiagnostics {
    std::string reference_curve;
    ReferenceMode mode = ReferenceMode::Same;
    bool real_fallback = false;
    std::vector<Move> frame;      // generating set used for the lifts
    std::vector<HandleBranch> branches; // per generator of handles >= 2, last attempt
    // |e/h + d/a| for the order-two rotation branch (genus 2), smallest over
    // gamma = b_1'^(+-1); NaN when the branch did not occur.
    double rotation_certificate = std::numeric_limits<double>::quiet_NaN();
    int curves_compared = 0;
    int escalations = 0;
    std::vector<std::string> log;
};

struct RigidityVerdict {
    VerdictKind kind = VerdictKind::Distinct;
    Mat2d conjugator = Mat2d::Identity(); // Conjugate / ConjugateAfterBar
    double orbit_distance = 0.0;          // verified bound for the conjugator
    std::optional<SimpleCurve> witness;   // Distinct
    double l1 = 0.0, l2 = 0.0;
    ReconstructionDiagnostics diagnostics;
};

struct ReconstructOptions {
    int threads = 1;
    int max_escalations = 2; // each doubles the curve budget
};

// Max over canonical generators of the projective distance between
// m rho1(x) m^-1 and rho2(x).
double orbit_distance(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2, const Mat2d& m);

// Recovers a conjugator between rho1 and rho2 (or the complex conjugate of
// rho2) from their simple length spectra on the curve stream, or a witness
// curve whose lengths differ by more than 1e-6. Every conjugator is
// re-verified before it is returned. Throws InvalidInput and
// NumericallyAmbiguous.
RigidityVerdict reconstruct(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2, int curve_budget,
                            const ReconstructOptions& options = {});

enum class KRelatedKind : std::uint8_t { ProportionalImpliesEqual, Witness };

struct KRelatedVerdict {
    KRelatedKind kind = KRelatedKind::Witness;
    double k_hat = 1.0;
    std::optional<SimpleCurve> curve;   // Witness: first curve breaking proportionality
    double ratio_deviation = 0.0;       // max relative deviation from k_hat over the checked curves
    bool theorem_violation = false;     // consistent ratio k_hat != 1
    int curves_checked = 0;
    std::optional<RigidityVerdict> verdict; // ProportionalImpliesEqual
};

// Tests whether l1 = k l2 on the streamed curves (at most max_curves of them
// when positive); a consistent k = 1 is handed to reconstruct. Throws
// NoLoxodromicCurve.
KRelatedVerdict k_related_test(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2, int curve_budget,
                               int max_curves = 0, const ReconstructOptions& options = {});

} // namespace klein
