#pragma once

#include "klein/curves.hpp"
#include "klein/moebius.hpp"
#include "klein/words.hpp"

#include <random>
#include <string>
#include <vector>

namespace klein {

// Relator defect accepted for representations read from outside.
inline constexpr double kInputRelatorTolerance = 1e-9;
// Relator defect guaranteed for representations built in-process.
inline constexpr double kConstructedRelatorTolerance = 1e-10;
// Replacement attempts in hyperbolic_standard_generators.
inline constexpr int kMaxReplacements = 64;

// A representation of the genus-g surface group into SL(2,C), read in
// PSL(2,C): one unimodular image per canonical generator, in the order
// a_1, b_1, ..., a_g, b_g. Discreteness and faithfulness are assumed, not
// verified; `trusted` records that assumption.
struct SurfaceRepresentation {
    int genus = 2;
    std::vector<Mat2d> images;
    double relator_defect = 0.0;
    bool trusted = true;
    std::vector<std::string> metadata;

    const Mat2d& image(int handle, Kind kind) const { return images[2 * (handle - 1) + static_cast<int>(kind)]; }
};

// Operator-norm distance of the evaluated relator from {+I, -I}.
double relator_defect(int genus, const std::vector<Mat2d>& images);

// Validating constructor: unimodular images and relator defect <= tol,
// else InvalidInput.
SurfaceRepresentation make_representation(int genus, std::vector<Mat2d> images, std::vector<std::string> metadata = {},
                                          double tol = kInputRelatorTolerance);

// Product of the letter images of w, in order.
Mat2d evaluate(const SurfaceRepresentation& rep, const GroupWord& w);
Mat2d evaluate(const std::vector<Mat2d>& images, const GroupWord& w);
// The same group element evaluated on dehn_reduce(w), accumulated in long
// double and rounded once: long unreduced words (twist images, frame words)
// otherwise pass through large intermediate products and lose relative
// precision.
Mat2d evaluate_reduced(const SurfaceRepresentation& rep, const GroupWord& w);

// Side-pairing generators of a regular hyperbolic 4g-gon with angle sum
// 2 pi, written in a standard generating set. Genus 2 uses the regular
// octagon with opposite sides paired; higher genus uses the commutator
// pairing a b a^-1 b^-1 of consecutive sides.
SurfaceRepresentation fuchsian_base(int genus);

// Conjugates the images of a_k, b_k for k >= j by exp(t X), where X spans
// the Lie algebra of the centraliser of the product of their commutators.
// Real t shears along that axis, imaginary t bends about it.
SurfaceRepresentation bend(const SurfaceRepresentation& rep, int j, Complexd t);

// Complex twist along a standard generator c = a_j (or b_j): the partner
// image b_j (or a_j) is multiplied on the right by exp(t X) with X in the
// centraliser of rho(c), which leaves [a_j, b_j] unchanged. Throws
// NotLoxodromic if rho(c) is not.
SurfaceRepresentation twist(const SurfaceRepresentation& rep, int j, Kind along, Complexd t);

SurfaceRepresentation conjugate(const SurfaceRepresentation& rep, const Mat2d& m);
// Entrywise complex conjugate; a real representation is returned unchanged.
SurfaceRepresentation complex_conjugate(const SurfaceRepresentation& rep);

// Relabels by a mapping class: the new image of generator x is the old
// image of moves(x).
SurfaceRepresentation precompose(const SurfaceRepresentation& rep, const std::vector<Move>& moves);

// A standard generating set starting from `start` on which every image is
// loxodromic: a_j is replaced by a_j b_j^n and then b_j by b_j a_j^n with the
// smallest n in 1..64 that works (frame moves TwistBeta^n / TwistAlpha^n).
StandardGenerators hyperbolic_standard_generators(const SurfaceRepresentation& rep, const StandardGenerators& start);
StandardGenerators hyperbolic_standard_generators(const SurfaceRepresentation& rep);

// SL(2,C) images of the generating set under both representations, with the
// sign of each image of the second chosen so that traces agree.
struct LiftedPair {
    std::vector<Mat2d> lift1, lift2; // indexed like gens.words()
    StandardGenerators gens;
};

LiftedPair lift_and_normalize(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                              const StandardGenerators& gens);

// Heuristic red flag for non-discrete input: some class of word length
// <= max_letters with translation length < threshold. Returns the first
// offending class, or an empty word.
GroupWord short_word_red_flag(const SurfaceRepresentation& rep, int max_letters = 6, double threshold = 1e-3);

// Random conjugator U diag(e^(z/2), e^(-z/2)) V with U, V Haar-distributed in
// SU(2), Re z uniform in [-max_stretch, max_stretch] and Im z uniform, so the
// condition number is at most e^max_stretch and conjugation keeps the
// relator defect within a small factor of the input.
Mat2d random_conjugator(std::mt19937_64& rng, double max_stretch = 1.0);

} // namespace klein
