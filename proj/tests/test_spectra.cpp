#include "oracle.hpp"
#include "support.hpp"

#include "klein/errors.hpp"
#include "klein/spectra.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace klein;

namespace {

// Generator translation length of the regular-octagon group: 2 acosh(1 + sqrt 2).
constexpr double kOctagonGeneratorLength = 3.0571418389619963225;

Mat2d diag(Complexd x)
{
    return make_mat2<double>(x, 0.0, 0.0, 1.0 / x);
}

oracle::Mat power(const oracle::Mat& m, int n)
{
    oracle::Mat out;
    for (int i = 0; i < n; ++i)
        out = out * m;
    return out;
}

oracle::Complex widen(Complexd v)
{
    return oracle::Complex(oracle::Real(v.real()), oracle::Real(v.imag()));
}

// log |larger eigenvalue of alpha^n beta| at 50 digits, for the exactly
// unimodular pair alpha = diag(lambda, 1/lambda), beta = [[a, b], [c, (1 + bc)/a]]
// built from the double entries (rounding 1/lambda or d in double would
// perturb the answer by 1e-16 |lambda|^-2n, far above the residual).
oracle::Real exact_log_mu(Complexd lambda, const Mat2d& beta, int n)
{
    using boost::multiprecision::abs;
    using boost::multiprecision::log;
    const oracle::Complex l = widen(lambda);
    const oracle::Mat alpha{l, 0, 0, oracle::Complex(1) / l};
    const oracle::Complex a = widen(beta(0, 0)), b = widen(beta(0, 1)), c = widen(beta(1, 0));
    const oracle::Mat m = power(alpha, n) * oracle::Mat{a, b, c, (1 + b * c) / a};
    return log(abs(oracle::larger_eigenvalue(m)));
}

// Three-term prediction at 50 digits from the normalized entries.
oracle::Real exact_prediction(Complexd lambda, const Mat2d& b, int n)
{
    using boost::multiprecision::abs;
    using boost::multiprecision::log;
    const oracle::Complex l = widen(lambda), a = widen(b(0, 0)), bc = widen(b(0, 1)) * widen(b(1, 0));
    oracle::Complex lpow = 1;
    for (int i = 0; i < 2 * n; ++i)
        lpow *= l;
    return n * log(abs(l)) + log(abs(a)) + (bc / (lpow * a * a)).real();
}

Mat2d random_normalized_beta(std::mt19937_64& rng)
{
    for (;;) {
        const Mat2d m = test_support::random_sl2(rng, 4.0);
        if (m.cwiseAbs().minCoeff() > 0.2)
            return m;
    }
}

} // namespace

TEST_SUITE("spectra")
{
    TEST_CASE("generator lengths of the octagon group match the closed form")
    {
        const auto base = fuchsian_base(2);
        const auto group = oracle::bolza();
        for (int k = 0; k < 4; ++k) {
            const GroupWord w = generator(2, k / 2 + 1, static_cast<Kind>(k % 2));
            CHECK(length(base, w) == doctest::Approx(kOctagonGeneratorLength).epsilon(1e-14));
            using boost::multiprecision::abs;
            using boost::multiprecision::log;
            const oracle::Real exact = 2 * log(abs(oracle::larger_eigenvalue(group[k])));
            CHECK(length(base, w) == doctest::Approx(static_cast<double>(exact)).epsilon(1e-14));
        }
    }

    TEST_CASE("lengths are conjugacy invariant and bar conjugates complex lengths (property)")
    {
        std::mt19937_64 rng(101);
        const auto rho = bend(fuchsian_base(2), 2, Complexd(0.03, 0.06));
        const auto bar = complex_conjugate(rho);
        for (int k = 0; k < 100; ++k) {
            const GroupWord w = test_support::random_word_up_to(rng, 2, 8);
            if (dehn_reduce(w).empty())
                continue;
            const GroupWord u = test_support::random_word_up_to(rng, 2, 4);
            CHECK(length(rho, u * w * inverse(u)) == doctest::Approx(length(rho, w)).epsilon(1e-12));
            const ComplexLengthd c = complex_length(rho, w), cb = complex_length(bar, w);
            CHECK(cb.translation() == doctest::Approx(c.translation()).epsilon(1e-13));
            const double wrapped = std::fmod(c.rotation() + cb.rotation(), 2 * std::numbers::pi);
            CHECK(std::min(wrapped, 2 * std::numbers::pi - wrapped) <= 1e-10);
        }
        CHECK_THROWS_AS(length(rho, relator(2)), Error);
    }

    TEST_CASE("expansion: lambda = 2, beta = [[1,1],[1,2]]")
    {
        const Mat2d alpha = diag(2.0), beta = make_mat2<double>(1.0, 1.0, 1.0, 2.0);
        const auto report = expansion_report(alpha, beta, 1, 10);
        CHECK(std::abs(report.lambda - 2.0) <= 1e-15);
        CHECK(report.predicted_decay_rate == doctest::Approx(0.0625));
        for (const auto& row : report.rows) {
            CHECK(row.predicted == doctest::Approx(row.n * std::log(2.0) + std::pow(4.0, -row.n)).epsilon(1e-15));
            CHECK(row.exact == doctest::Approx(static_cast<double>(exact_log_mu(report.lambda, beta, row.n))).epsilon(1e-15));
            const oracle::Real residual = exact_log_mu(report.lambda, beta, row.n) - exact_prediction(report.lambda, beta, row.n);
            CHECK(row.residual == doctest::Approx(static_cast<double>(residual)).epsilon(1e-9));
        }
        const auto fit = expansion_report(alpha, beta, 4, 10);
        CHECK(fit.fitted_decay_rate == doctest::Approx(0.0625).epsilon(0.1));
    }

    TEST_CASE("expansion rejects a vanishing coefficient")
    {
        try {
            expansion_report(diag(2.0), diag(3.0), 1, 10);
            FAIL("diagonal beta accepted");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ZeroCoefficient);
            CHECK(e.detail() == "b");
        }
        CHECK_THROWS_AS(expansion_report(make_mat2<double>(1.0, 1.0, 0.0, 1.0), diag(3.0), 1, 10), Error);
    }

    TEST_CASE("expansion residuals match the exact oracle on random normalized pairs (property)")
    {
        std::mt19937_64 rng(103);
        std::uniform_real_distribution<double> modulus(2.0, 5.0), angle(0.0, 2 * std::numbers::pi);
        for (int k = 0; k < 20; ++k) {
            const Mat2d alpha = diag(std::polar(modulus(rng), angle(rng)));
            const Mat2d beta = random_normalized_beta(rng);
            const auto report = expansion_report(alpha, beta, 4, 10);
            const double lam = std::abs(report.lambda);
            CHECK(report.fitted_decay_rate == doctest::Approx(report.predicted_decay_rate).epsilon(0.1));
            for (const auto& row : report.rows) {
                const oracle::Real residual =
                    exact_log_mu(report.lambda, beta, row.n) - exact_prediction(report.lambda, beta, row.n);
                CHECK(std::abs(row.residual - static_cast<double>(residual)) <= 1e-6 * std::pow(lam, -4.0 * row.n));
                // the literal O(|lambda|^-4n) bound
                CHECK(row.complex_residual_abs * std::pow(lam, 4.0 * row.n) <= 1e3);
            }
        }
    }

    TEST_CASE("expansion on the octagon group along (a1, b1)")
    {
        const auto report = expansion_report(fuchsian_base(2), parse_word(2, "a1"), parse_word(2, "b1"), 4, 10);
        CHECK(report.fitted_decay_rate >= 0.9 * report.predicted_decay_rate);
        CHECK(report.fitted_decay_rate <= 1.1 * report.predicted_decay_rate);
        for (std::size_t i = 1; i < report.rows.size(); ++i)
            CHECK(report.rows[i].complex_residual_abs < report.rows[i - 1].complex_residual_abs);
    }

    TEST_CASE("lambda-pair relations")
    {
        const Complexd z(3.0, 1.5);
        CHECK(classify_lambda_pair(z, z) == SpectrumRelation::Same);
        CHECK(classify_lambda_pair(z, std::conj(z)) == SpectrumRelation::ConjugatePair);
        CHECK(classify_lambda_pair(4.0, -4.0) == SpectrumRelation::SignFlipReal);
        CHECK(classify_lambda_pair(4.0, 4.0) == SpectrumRelation::Same); // real: Same wins
        CHECK_THROWS_AS(classify_lambda_pair(z, -z), Error);
    }

    TEST_CASE("classify_pair_on_curve")
    {
        const auto rho = bend(fuchsian_base(2), 2, Complexd(0.0, 0.05));
        const auto stream = simple_curve_stream(StandardGenerators::canonical(2), 2);
        for (const auto& c : stream)
            CHECK(classify_pair_on_curve(rho, rho, c) == SpectrumRelation::Same);

        const auto bar = complex_conjugate(rho);
        int conjugate_pairs = 0;
        for (const auto& c : stream) {
            const auto rel = classify_pair_on_curve(rho, bar, c);
            CHECK(rel != SpectrumRelation::SignFlipReal);
            conjugate_pairs += rel == SpectrumRelation::ConjugatePair;
        }
        CHECK(conjugate_pairs > 0);

        CHECK_THROWS_AS(classify_pair_on_curve(rho, fuchsian_base(2), parse_word(2, "a1 A2")), Error);
    }

    TEST_CASE("rotation trichotomy on the canonical examples")
    {
        const Complexd u = std::polar(1.0, 0.7), v(0.3, -1.2);
        CHECK(rotate_classify(u, u, v, v) == RotationCase::EqualRotation);
        const Complexd w = std::polar(1.0, std::numbers::sqrt2);
        CHECK(rotate_classify(w, std::conj(w), v, std::conj(v)) == RotationCase::ConjugateRotation);
        CHECK(rotate_classify(1.0, -1.0, Complexd(0, 0.4), Complexd(0, -2.0)) == RotationCase::OppositeRealRotation);
        CHECK(rotate_classify(u, u, v, 2.0 * v) == RotationCase::Inconsistent);
        CHECK(rotate_classify(u, std::polar(1.0, 0.3), v, v) == RotationCase::Inconsistent);
    }

    TEST_CASE("simple spectrum comparison")
    {
        std::mt19937_64 rng(107);
        const auto rho = bend(fuchsian_base(2), 2, Complexd(0.0, 0.03));
        const auto stream = simple_curve_stream(StandardGenerators::canonical(2), 3);
        const auto same = compare_simple_spectra(rho, conjugate(rho, random_conjugator(rng)), stream, 4);
        CHECK(same.first_mismatch == -1);
        CHECK(same.max_difference <= 1e-9);
        const auto other = bend(fuchsian_base(2), 2, Complexd(0.0, 0.05));
        const auto diff = compare_simple_spectra(rho, other, stream, 1);
        REQUIRE(diff.first_mismatch >= 0);
        CHECK(std::abs(diff.l1 - diff.l2) > kLengthTolerance);
        CHECK(diff.l1 == length(rho, stream[diff.first_mismatch].word));
        CHECK(compare_simple_spectra(rho, other, stream, 4).first_mismatch == diff.first_mismatch);
    }

    TEST_CASE("reference curves")
    {
        std::mt19937_64 rng(109);
        const auto rho = bend(fuchsian_base(2), 2, Complexd(0.02, 0.05));
        const auto stream = simple_curve_stream(StandardGenerators::canonical(2), 2);

        const auto same = find_reference_curve(rho, conjugate(rho, random_conjugator(rng)), stream);
        CHECK(same.mode == ReferenceMode::Same);
        CHECK_FALSE(same.real_fallback);

        const auto bar = find_reference_curve(rho, complex_conjugate(rho), stream);
        CHECK(bar.mode == ReferenceMode::Conjugate);
        CHECK(bar.curve.word == same.curve.word);

        const auto base = fuchsian_base(2);
        const auto real = find_reference_curve(base, base, stream);
        CHECK(real.mode == ReferenceMode::Same);
        CHECK(real.real_fallback);

        CHECK_THROWS_AS(find_reference_curve(rho, bend(fuchsian_base(2), 2, Complexd(0.0, 0.2)), stream), Error);
    }
}
