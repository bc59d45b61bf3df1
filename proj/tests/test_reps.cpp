#include "oracle.hpp"
#include "support.hpp"

#include "klein/errors.hpp"
#include "klein/reps.hpp"
#include "klein/spectra.hpp"

#include <doctest.h>

#include <random>

using namespace klein;

namespace {

// |tr| of the generator images of the polygon groups, from the 40-digit
// closed forms: 2 + 2 sqrt 2 (octagon), 2 + sqrt 3 (12-gon), and the
// 16-gon value.
constexpr double kGeneratorTrace[] = {0.0, 0.0, 4.8284271247461900976, 3.7320508075688772935, 3.8477590650225735123};

Mat2d diag(Complexd x)
{
    return make_mat2<double>(x, 0.0, 0.0, 1.0 / x);
}

// Abelian diagonal representation: the relator is exactly the identity.
SurfaceRepresentation diagonal_rep(int genus, const std::vector<Complexd>& eigenvalues)
{
    std::vector<Mat2d> images;
    for (const Complexd x : eigenvalues)
        images.push_back(diag(x));
    return make_representation(genus, images);
}

double letters_norm(const SurfaceRepresentation& rep, const GroupWord& w)
{
    double out = 1.0;
    for (const Letter l : w.letters())
        out *= operator_norm(rep.images[l.generator()]);
    return out;
}

} // namespace

TEST_SUITE("reps")
{
    TEST_CASE("polygon bases satisfy the relator and have real loxodromic generators")
    {
        for (const int genus : {2, 3, 4, 5}) {
            const auto rep = fuchsian_base(genus);
            CHECK(rep.relator_defect <= kConstructedRelatorTolerance);
            CHECK(relator_defect(genus, rep.images) == rep.relator_defect);
            for (const auto& m : rep.images) {
                CHECK(m.imag().isZero(0.0));
                CHECK(std::abs(trace(m).real()) > 2.0);
                CHECK(std::abs(determinant(m) - 1.0) <= 1e-14);
                if (genus <= 4)
                    CHECK(std::abs(trace(m).real()) == doctest::Approx(kGeneratorTrace[genus]).epsilon(1e-13));
            }
        }
    }

    TEST_CASE("polygon bases match the 50-digit closed-form groups on random words")
    {
        std::mt19937_64 rng(61);
        for (const int genus : {2, 3, 4}) {
            const auto rep = fuchsian_base(genus);
            const auto group = oracle::fuchsian(genus);
            for (int k = 0; k < 200; ++k) {
                const GroupWord w = test_support::random_word_up_to(rng, genus, 10);
                const Complexd mine = trace(evaluate(rep, w));
                const oracle::Complex exact = oracle::trace(oracle::evaluate(group, w));
                const Complexd want(static_cast<double>(exact.real()), static_cast<double>(exact.imag()));
                CHECK(std::abs(mine - want) <= 1e-14 * w.size() * letters_norm(rep, w));
            }
        }
    }

    TEST_CASE("bend: zero parameter, disjoint curves and defect")
    {
        const auto base = fuchsian_base(2);
        const auto same = bend(base, 2, 0.0);
        CHECK(same.images == base.images);

        const auto real_bend = bend(base, 2, 0.07);
        CHECK(real_bend.relator_defect <= kConstructedRelatorTolerance);
        CHECK(length(real_bend, parse_word(2, "a1")) == doctest::Approx(length(base, parse_word(2, "a1"))).epsilon(1e-14));
        CHECK(length(real_bend, parse_word(2, "b2")) == doctest::Approx(length(base, parse_word(2, "b2"))).epsilon(1e-12));
        CHECK(std::abs(length(real_bend, parse_word(2, "a1 a2")) - length(base, parse_word(2, "a1 a2"))) > 1e-4);

        const auto imaginary = bend(base, 2, Complexd(0.0, 0.05));
        CHECK(imaginary.relator_defect <= kConstructedRelatorTolerance);
        int changed = 0;
        for (const auto& c : simple_curve_stream(StandardGenerators::canonical(2), 2))
            changed += std::abs(length(imaginary, c.word) - length(base, c.word)) > 1e-4;
        CHECK(changed > 0);

        CHECK_THROWS_AS(bend(base, 1, 0.1), Error);
        CHECK_THROWS_AS(bend(base, 3, 0.1), Error);
    }

    TEST_CASE("bends with |t| <= 0.1 keep the relator defect small (property)")
    {
        std::mt19937_64 rng(67);
        std::uniform_real_distribution<double> part(-0.07, 0.07);
        for (const int genus : {2, 3, 4})
            for (int k = 0; k < 20; ++k) {
                const Complexd t(part(rng), part(rng));
                std::uniform_int_distribution<int> handle(2, genus);
                const auto rep = bend(fuchsian_base(genus), handle(rng), t);
                CHECK(rep.relator_defect <= kConstructedRelatorTolerance);
            }
    }

    TEST_CASE("bend by t then -t returns the original (property)")
    {
        std::mt19937_64 rng(71);
        std::uniform_real_distribution<double> part(-0.1, 0.1);
        for (const int genus : {2, 3}) {
            const auto base = fuchsian_base(genus);
            for (int k = 0; k < 20; ++k) {
                const Complexd t(part(rng), part(rng));
                const auto there = bend(base, genus, t);
                const auto back = bend(there, genus, -t);
                for (std::size_t i = 0; i < base.images.size(); ++i)
                    CHECK(max_abs<double>(sign_normalized(back.images[i]) - sign_normalized(base.images[i])) <= 1e-10);
            }
        }
    }

    TEST_CASE("twist changes the partner image and fixes the commutator")
    {
        const auto base = fuchsian_base(2);
        const auto tw = twist(base, 1, Kind::Alpha, Complexd(0.1, 0.05));
        CHECK(tw.images[0] == base.images[0]);
        CHECK(max_abs<double>(tw.images[1] - base.images[1]) > 1e-3);
        const GroupWord c = commutator(parse_word(2, "a1"), parse_word(2, "b1"));
        CHECK(max_abs<double>(evaluate(tw, c) - evaluate(base, c)) <= 1e-12);
        CHECK(tw.relator_defect <= kConstructedRelatorTolerance);
    }

    TEST_CASE("conjugation and complex conjugation")
    {
        const auto base = fuchsian_base(2);
        CHECK(complex_conjugate(base).images == base.images);
        CHECK(complex_conjugate(base).metadata == base.metadata);

        std::mt19937_64 rng(73);
        const auto rho = bend(base, 2, Complexd(0.02, 0.04));
        const auto bar = complex_conjugate(rho);
        CHECK(complex_conjugate(bar).images == rho.images);
        const auto conj = conjugate(rho, random_conjugator(rng));
        CHECK(conj.relator_defect <= 20 * std::max(rho.relator_defect, 1e-15));
        for (int k = 0; k < 50; ++k) {
            const GroupWord w = test_support::random_word_up_to(rng, 2, 8);
            if (dehn_reduce(w).empty())
                continue;
            const double l = length(rho, w);
            CHECK(length(bar, w) == doctest::Approx(l).epsilon(1e-12));
            CHECK(length(conj, w) == doctest::Approx(l).epsilon(1e-10));
        }
    }

    TEST_CASE("random conjugators are unimodular with bounded condition number")
    {
        std::mt19937_64 rng(79);
        for (const double stretch : {0.5, 1.0, 2.0})
            for (int k = 0; k < 100; ++k) {
                const Mat2d m = random_conjugator(rng, stretch);
                CHECK(std::abs(determinant(m) - 1.0) <= 1e-14);
                const double norm = operator_norm(m);
                CHECK(norm * norm <= std::exp(stretch) * (1 + 1e-12));
            }
    }

    TEST_CASE("evaluation is a homomorphism up to sign (property)")
    {
        std::mt19937_64 rng(83);
        const auto rho = bend(fuchsian_base(3), 2, Complexd(0.03, -0.02));
        for (int k = 0; k < 200; ++k) {
            const GroupWord w1 = test_support::random_word_up_to(rng, 3, 6);
            const GroupWord w2 = test_support::random_word_up_to(rng, 3, 6);
            const Mat2d product = evaluate(rho, w1) * evaluate(rho, w2);
            const double scale = letters_norm(rho, w1) * letters_norm(rho, w2);
            CHECK(projective_distance<double>(evaluate(rho, w1 * w2), product) <= 1e-13 * scale);
            const GroupWord w = w1 * test_support::random_rotated_relator(rng, 3) * w2;
            CHECK(projective_distance<double>(evaluate_reduced(rho, w), evaluate(rho, w)) <=
                  1e-12 * letters_norm(rho, w));
        }
    }

    TEST_CASE("precompose relabels images by the move automorphism")
    {
        std::mt19937_64 rng(89);
        const auto rho = bend(fuchsian_base(2), 2, Complexd(0.0, 0.03));
        const std::vector<Move> moves{{MoveType::TwistAlpha, 1, 1}, {MoveType::ChainW, 1, -1}};
        const auto relabeled = precompose(rho, moves);
        CHECK(relabeled.relator_defect <= 1e-9);
        for (int k = 0; k < 50; ++k) {
            const GroupWord w = test_support::random_word_up_to(rng, 2, 6);
            if (dehn_reduce(w).empty())
                continue;
            CHECK(length(relabeled, w) == doctest::Approx(length(rho, apply_moves(moves, w))).epsilon(1e-9));
        }
    }

    TEST_CASE("hyperbolic standard generators replace only where needed")
    {
        CHECK(hyperbolic_standard_generators(fuchsian_base(2)).frame().empty());

        // a1 elliptic, everything else loxodromic: one replacement a1 -> a1 b1
        const auto rep = diagonal_rep(2, {std::polar(1.0, 0.9), 2.0, 3.0, Complexd(1.5, 0.5)});
        const auto gens = hyperbolic_standard_generators(rep);
        REQUIRE(gens.frame().size() == 1);
        CHECK(gens.frame()[0] == Move{MoveType::TwistBeta, 1, 1});
        CHECK(gens.alpha(1) == parse_word(2, "a1 b1"));
        for (const auto& w : gens.words())
            CHECK(classify(evaluate(rep, w)) == IsometryClass::Loxodromic);

        GroupWord product(2);
        for (int j = 1; j <= 2; ++j)
            product = product * commutator(gens.alpha(j), gens.beta(j));
        CHECK(dehn_reduce(product).empty());

        // b1 = identity: no power of it helps
        CHECK_THROWS_AS(hyperbolic_standard_generators(diagonal_rep(2, {std::polar(1.0, 0.9), 1.0, 3.0, 2.0})), Error);
    }

    TEST_CASE("lift_and_normalize matches traces on the generating set")
    {
        std::mt19937_64 rng(97);
        const auto rho = bend(fuchsian_base(2), 2, Complexd(0.01, 0.03));
        const auto gens = hyperbolic_standard_generators(rho);

        const auto same = lift_and_normalize(rho, rho, gens);
        CHECK(same.lift1 == same.lift2);

        const auto conj = lift_and_normalize(rho, conjugate(rho, random_conjugator(rng)), gens);
        for (std::size_t k = 0; k < conj.lift1.size(); ++k)
            CHECK(std::abs(trace(conj.lift1[k]) - trace(conj.lift2[k])) <= 1e-12);

        auto images = rho.images;
        images[3] = -images[3];
        const auto flipped = make_representation(2, images);
        const auto fixed = lift_and_normalize(rho, flipped, gens);
        for (std::size_t k = 0; k < fixed.lift1.size(); ++k)
            CHECK(std::abs(trace(fixed.lift1[k]) - trace(fixed.lift2[k])) <= 1e-12);

        CHECK_THROWS_AS(lift_and_normalize(rho, twist(rho, 1, Kind::Alpha, 0.2), gens), Error);
    }

    TEST_CASE("make_representation validates its input")
    {
        const auto base = fuchsian_base(2);
        auto images = base.images;
        CHECK_THROWS_AS(make_representation(2, {images.begin(), images.end() - 1}), Error);
        images[0] *= 1.001;
        CHECK_THROWS_AS(make_representation(2, images), Error);
        images = base.images;
        images[0](0, 1) += 1e-6;
        images[0] = unimodularize(images[0]);
        CHECK_THROWS_AS(make_representation(2, images), Error);
        CHECK_THROWS_AS(make_representation(1, {}), Error);
    }

    TEST_CASE("short-word red flag")
    {
        CHECK(short_word_red_flag(fuchsian_base(2), 4).empty());
        const auto degenerate = diagonal_rep(2, {1.0001, 2.0, 3.0, 2.5});
        CHECK_FALSE(short_word_red_flag(degenerate, 2).empty());
    }
}
