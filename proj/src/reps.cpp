#include "klein/reps.hpp"

#include "klein/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace klein {

namespace {

// The polygon groups are built in extended precision and rounded once, so
// the relator defect of a base is a few ulps.
using Wide = long double;
using Mat2w = Mat2<Wide>;
using Complexw = Complex<Wide>;
constexpr Wide pi = std::numbers::pi_v<Wide>;

Mat2w rotation(Wide phi)
{
    return make_mat2<Wide>(std::polar<Wide>(1, phi / 2), 0, 0, std::polar<Wide>(1, -phi / 2));
}

// Maps the disc model to the upper half-plane; conjugating SU(1,1) by it
// gives SL(2,R).
Mat2w cayley()
{
    const Complexw i(0, 1);
    return make_mat2<Wide>(1, -i, 1, i) / std::sqrt(Wide(2) * i);
}

// Real unimodular matrix from a numerically real one.
Mat2d to_real_sl2(const Mat2w& m)
{
    Mat2w r = m.real().cast<Complexw>();
    const Wide det = determinant(r).real();
    r /= std::sqrt(det);
    return r.cast<Complexd>();
}

// Translation by the side-pairing distance of the regular 4g-gon with
// interior angles 2 pi / 4g: cosh(d) = cot(pi / 4g) for the disc matrix
// [[cosh d, sinh d], [sinh d, cosh d]].
Mat2w side_translation(int sides)
{
    const Wide d = std::acosh(1 / std::tan(pi / sides));
    return make_mat2<Wide>(std::cosh(d), std::sinh(d), std::sinh(d), std::cosh(d));
}

std::vector<Mat2d> to_half_plane(const std::vector<Mat2w>& disc)
{
    const Mat2w c = cayley();
    const Mat2w ci = inverse_sl2(c);
    std::vector<Mat2d> out;
    for (const auto& m : disc)
        out.push_back(to_real_sl2(ci * m * c));
    return out;
}

// Regular octagon, opposite sides paired: x_k translates across side k.
// With y_1 = x_0, y_2 = x_1^-1, y_3 = x_2, y_4 = x_3^-1 the standard basis is
//   a_1 = y4^-1 y3^-1 y2^-1,  b_1 = y3^-1 y4^-1 y1,  a_2 = y3^-1,  b_2 = y4^-1,
// which satisfies [a_1, b_1][a_2, b_2] = 1 exactly.
std::vector<Mat2d> bolza_images()
{
    const int sides = 8;
    const Mat2w t = side_translation(sides);
    std::vector<Mat2w> x;
    for (int k = 0; k < 4; ++k) {
        const Mat2w r = rotation(pi * (2 * k + 1) / sides);
        x.push_back(r * t * inverse_sl2(r));
    }
    const auto y = [&](int k) -> Mat2w { return (k % 2 == 1) ? x[k - 1] : inverse_sl2(x[k - 1]); };
    const auto yi = [&](int k) -> Mat2w { return inverse_sl2(y(k)); };
    std::vector<Mat2w> disc{yi(4) * yi(3) * yi(2), yi(3) * yi(4) * y(1), yi(3), yi(4)};
    return to_half_plane(disc);
}

// Regular 4g-gon whose consecutive sides s_{4i..4i+3} are paired as
// a b a^-1 b^-1: P(s, t) carries side s onto side t.
std::vector<Mat2d> commutator_polygon_images(int genus)
{
    const int sides = 4 * genus;
    const Mat2w t = side_translation(sides);
    const auto phi = [&](int s) { return pi * (2 * s + 1) / sides; };
    const auto pairing = [&](int s, int target) -> Mat2w { return rotation(phi(target)) * t * rotation(pi - phi(s)); };
    std::vector<Mat2w> disc;
    for (int i = 0; i < genus; ++i) {
        disc.push_back(pairing(4 * i + 2, 4 * i));
        disc.push_back(inverse_sl2(pairing(4 * i + 3, 4 * i + 1)));
    }
    return to_half_plane(disc);
}

Mat2d letter_image(const std::vector<Mat2d>& images, Letter l)
{
    const Mat2d& m = images[l.generator()];
    return l.is_inverse() ? inverse_sl2(m) : m;
}

} // namespace

double relator_defect(int genus, const std::vector<Mat2d>& images)
{
    return distance_from_identity(evaluate(images, relator(genus)));
}

Mat2d evaluate(const std::vector<Mat2d>& images, const GroupWord& w)
{
    Mat2d out = Mat2d::Identity();
    for (const Letter l : w.letters())
        out = out * letter_image(images, l);
    return out;
}

Mat2d evaluate(const SurfaceRepresentation& rep, const GroupWord& w)
{
    return evaluate(rep.images, w);
}

Mat2d evaluate_reduced(const SurfaceRepresentation& rep, const GroupWord& w)
{
    const GroupWord reduced = dehn_reduce(w);
    Mat2w out = Mat2w::Identity();
    for (const Letter l : reduced.letters())
        out = out * letter_image(rep.images, l).cast<Complexw>();
    return out.cast<Complexd>();
}

SurfaceRepresentation make_representation(int genus, std::vector<Mat2d> images, std::vector<std::string> metadata,
                                          double tol)
{
    (void)relator(genus); // validates the genus
    if (static_cast<int>(images.size()) != 2 * genus)
        throw Error(ErrorKind::InvalidInput, "expected " + std::to_string(2 * genus) + " generator images");
    for (std::size_t k = 0; k < images.size(); ++k) {
        if (!images[k].allFinite())
            throw Error(ErrorKind::InvalidInput, "non-finite entry in image " + std::to_string(k));
        if (!is_unimodular(images[k]))
            throw Error(ErrorKind::InvalidInput, "image " + std::to_string(k) + " is not unimodular");
    }
    const double defect = relator_defect(genus, images);
    if (!(defect <= tol))
        throw Error(ErrorKind::InvalidInput, "relator defect " + std::to_string(defect));
    return {genus, std::move(images), defect, true, std::move(metadata)};
}

SurfaceRepresentation fuchsian_base(int genus)
{
    auto images = genus == 2 ? bolza_images() : commutator_polygon_images(genus);
    const std::string recipe = genus == 2 ? "fuchsian regular-octagon opposite-sides" : "fuchsian regular-4g-gon commutator-sides";
    return make_representation(genus, std::move(images), {recipe}, kConstructedRelatorTolerance);
}

SurfaceRepresentation bend(const SurfaceRepresentation& rep, int j, Complexd t)
{
    if (j < 2 || j > rep.genus)
        throw Error(ErrorKind::InvalidInput, "bending handle must be in 2..genus");
    if (t == Complexd(0))
        return rep;
    GroupWord tail(rep.genus);
    for (int k = j; k <= rep.genus; ++k)
        tail = tail * commutator(alpha(rep.genus, k), beta(rep.genus, k));
    const Mat2d axis = evaluate(rep, tail);
    if (classify(axis) != IsometryClass::Loxodromic)
        throw Error(ErrorKind::NonLoxodromicBendingAxis, to_string(tail));
    const Mat2d n = normalize_pair(axis, axis).conj; // n axis n^-1 is diagonal
    const Mat2d flow = make_mat2<double>(std::exp(t / 2.0), 0.0, 0.0, std::exp(-t / 2.0));
    const Mat2d e = inverse_sl2(n) * flow * n;
    const Mat2d ei = inverse_sl2(e);
    SurfaceRepresentation out = rep;
    for (int k = j; k <= rep.genus; ++k)
        for (Kind kind : {Kind::Alpha, Kind::Beta}) {
            auto& m = out.images[2 * (k - 1) + static_cast<int>(kind)];
            m = e * m * ei;
        }
    out.relator_defect = relator_defect(out.genus, out.images);
    std::ostringstream tag;
    tag.precision(17);
    tag << "bend " << j << ":" << t.real() << (t.imag() < 0 ? "" : "+") << t.imag() << "i";
    out.metadata.push_back(tag.str());
    return out;
}

SurfaceRepresentation twist(const SurfaceRepresentation& rep, int j, Kind along, Complexd t)
{
    if (j < 1 || j > rep.genus)
        throw Error(ErrorKind::InvalidInput, "twist handle must be in 1..genus");
    const Mat2d c = rep.image(j, along);
    if (classify(c) != IsometryClass::Loxodromic)
        throw Error(ErrorKind::NotLoxodromic, to_string(Letter::make(j, along)));
    const Mat2d n = normalize_pair(c, c).conj;
    const Mat2d e = inverse_sl2(n) * make_mat2<double>(std::exp(t / 2.0), 0.0, 0.0, std::exp(-t / 2.0)) * n;
    SurfaceRepresentation out = rep;
    const Kind partner = along == Kind::Alpha ? Kind::Beta : Kind::Alpha;
    auto& m = out.images[2 * (j - 1) + static_cast<int>(partner)];
    m = m * e;
    out.relator_defect = relator_defect(out.genus, out.images);
    std::ostringstream tag;
    tag.precision(17);
    tag << "twist " << to_string(Letter::make(j, along)) << ":" << t.real() << (t.imag() < 0 ? "" : "+") << t.imag()
        << "i";
    out.metadata.push_back(tag.str());
    return out;
}

SurfaceRepresentation conjugate(const SurfaceRepresentation& rep, const Mat2d& m)
{
    SurfaceRepresentation out = rep;
    const Mat2d mi = inverse_sl2(m);
    for (auto& x : out.images)
        x = m * x * mi;
    out.relator_defect = relator_defect(out.genus, out.images);
    out.metadata.push_back("conjugate");
    return out;
}

SurfaceRepresentation complex_conjugate(const SurfaceRepresentation& rep)
{
    const bool real = std::all_of(rep.images.begin(), rep.images.end(),
                                  [](const Mat2d& m) { return (m.imag().array() == 0.0).all(); });
    if (real)
        return rep; // a real representation is its own complex conjugate
    SurfaceRepresentation out = rep;
    for (auto& x : out.images)
        x = entrywise_conjugate(x);
    out.relator_defect = relator_defect(out.genus, out.images);
    out.metadata.push_back("bar");
    return out;
}

SurfaceRepresentation precompose(const SurfaceRepresentation& rep, const std::vector<Move>& moves)
{
    SurfaceRepresentation out = rep;
    for (int h = 1; h <= rep.genus; ++h)
        for (Kind kind : {Kind::Alpha, Kind::Beta})
            out.images[2 * (h - 1) + static_cast<int>(kind)] =
                evaluate_reduced(rep, apply_moves(moves, generator(rep.genus, h, kind)));
    out.relator_defect = relator_defect(out.genus, out.images);
    std::string tag = "relabel";
    for (const auto& m : moves)
        tag += " " + to_string(m);
    out.metadata.push_back(tag);
    return out;
}

StandardGenerators hyperbolic_standard_generators(const SurfaceRepresentation& rep, const StandardGenerators& start)
{
    StandardGenerators gens = start;
    const auto loxodromic = [&](const GroupWord& w) { return classify(evaluate_reduced(rep, w)) == IsometryClass::Loxodromic; };
    const auto replace = [&](int j, Kind kind) {
        if (loxodromic(gens.word(j, kind)))
            return;
        // a_j -> a_j b_j^n is TwistBeta^n; b_j -> b_j a_j^n is TwistAlpha^n.
        const MoveType type = kind == Kind::Alpha ? MoveType::TwistBeta : MoveType::TwistAlpha;
        for (int n = 1; n <= kMaxReplacements; ++n) {
            std::vector<Move> frame(static_cast<std::size_t>(n), Move{type, j, 1});
            frame.insert(frame.end(), gens.frame().begin(), gens.frame().end());
            StandardGenerators candidate(rep.genus, std::move(frame));
            if (loxodromic(candidate.word(j, kind))) {
                gens = std::move(candidate);
                return;
            }
        }
        throw Error(ErrorKind::ExhaustedReplacements, to_string(Letter::make(j, kind)));
    };
    for (int j = 1; j <= rep.genus; ++j) {
        replace(j, Kind::Alpha);
        replace(j, Kind::Beta);
    }
    return gens;
}

StandardGenerators hyperbolic_standard_generators(const SurfaceRepresentation& rep)
{
    return hyperbolic_standard_generators(rep, StandardGenerators::canonical(rep.genus));
}

LiftedPair lift_and_normalize(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                              const StandardGenerators& gens)
{
    if (rho1.genus != rho2.genus || gens.genus() != rho1.genus)
        throw Error(ErrorKind::InvalidInput, "genus mismatch");
    LiftedPair out{{}, {}, gens};
    for (std::size_t k = 0; k < gens.words().size(); ++k) {
        const GroupWord& w = gens.words()[k];
        const std::string name = to_string(Letter::make(static_cast<int>(k / 2) + 1, static_cast<Kind>(k % 2))) + "'";
        const Mat2d m1 = evaluate_reduced(rho1, w);
        Mat2d m2 = evaluate_reduced(rho2, w);
        const Complexd t1 = trace(m1), t2 = trace(m2);
        if (std::abs(t1 * t1 - t2 * t2) > 1e-6 * std::max(1.0, std::abs(t1 * t1)))
            throw Error(ErrorKind::TraceMismatch, name + " = " + to_string(w));
        if (classify(m1) != IsometryClass::Loxodromic)
            throw Error(ErrorKind::NotLoxodromic, name + " = " + to_string(w));
        if (std::abs(t1 - t2) > std::abs(t1 + t2))
            m2 = -m2;
        out.lift1.push_back(m1);
        out.lift2.push_back(m2);
    }
    return out;
}

GroupWord short_word_red_flag(const SurfaceRepresentation& rep, int max_letters, double threshold)
{
    GroupWord found(rep.genus);
    bool done = false;
    for_each_class(rep.genus, max_letters, [&](const ConjugacyClassKey& key) {
        if (done)
            return;
        const Mat2d m = evaluate(rep, key.normal);
        const auto cls = classify(m);
        if (cls == IsometryClass::Identity || cls == IsometryClass::Elliptic ||
            complex_length_sq(m).length.translation() < threshold) {
            found = key.normal;
            done = true;
        }
    });
    return found;
}

Mat2d random_conjugator(std::mt19937_64& rng, double max_stretch)
{
    std::normal_distribution<double> normal;
    const auto unitary = [&] {
        Complexd a(normal(rng), normal(rng)), b(normal(rng), normal(rng));
        const double r = std::sqrt(std::norm(a) + std::norm(b));
        a /= r;
        b /= r;
        return make_mat2<double>(a, -std::conj(b), b, std::conj(a));
    };
    std::uniform_real_distribution<double> stretch(-max_stretch, max_stretch), angle(0.0, 2.0 * std::numbers::pi);
    const Complexd z(stretch(rng), angle(rng));
    const Mat2d d = make_mat2<double>(std::exp(z / 2.0), 0.0, 0.0, std::exp(-z / 2.0));
    return unitary() * d * unitary();
}

} // namespace klein
