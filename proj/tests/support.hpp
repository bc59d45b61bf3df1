#pragma once

// Shared generators for randomized tests.

#include "klein/moebius.hpp"
#include "klein/reps.hpp"
#include "klein/words.hpp"

#include <random>
#include <vector>

namespace test_support {

using namespace klein;

// Unimodular matrix with standard normal entries, rescaled; rejects badly
// conditioned draws so products stay well within double precision.
inline Mat2d random_sl2(std::mt19937_64& rng, double max_norm = 6.0)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
        Mat2d m;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                m(r, c) = Complexd(normal(rng), normal(rng));
        if (std::abs(determinant(m)) < 0.1)
            continue;
        const Mat2d u = unimodularize(m);
        if (operator_norm(u) <= max_norm)
            return u;
    }
}

inline Letter random_letter(std::mt19937_64& rng, int genus)
{
    std::uniform_int_distribution<int> code(0, 4 * genus - 1);
    return Letter{static_cast<std::uint8_t>(code(rng))};
}

// Freely reduced word of exactly `length` letters.
inline GroupWord random_reduced_word(std::mt19937_64& rng, int genus, int length)
{
    std::vector<Letter> letters;
    while (static_cast<int>(letters.size()) < length) {
        const Letter l = random_letter(rng, genus);
        if (!letters.empty() && letters.back() == l.inverse())
            continue;
        letters.push_back(l);
    }
    return GroupWord(genus, letters);
}

inline GroupWord random_word_up_to(std::mt19937_64& rng, int genus, int max_length)
{
    std::uniform_int_distribution<int> len(1, max_length);
    return random_reduced_word(rng, genus, len(rng));
}

// A word that is trivial in the surface group but usually not freely
// trivial: a product of two conjugates of rotated relators, u r u^-1 v s v^-1.
inline GroupWord random_rotated_relator(std::mt19937_64& rng, int genus)
{
    std::uniform_int_distribution<int> coin(0, 1);
    GroupWord r = relator(genus);
    if (coin(rng))
        r = inverse(r);
    std::uniform_int_distribution<int> shift(0, static_cast<int>(r.size()) - 1);
    const int s = shift(rng);
    std::vector<Letter> rotated(r.letters().begin() + s, r.letters().end());
    rotated.insert(rotated.end(), r.letters().begin(), r.letters().begin() + s);
    return GroupWord(genus, rotated);
}

inline GroupWord random_trivial_word(std::mt19937_64& rng, int genus, int max_conjugator)
{
    const GroupWord u = random_word_up_to(rng, genus, max_conjugator);
    const GroupWord v = random_word_up_to(rng, genus, max_conjugator);
    return u * random_rotated_relator(rng, genus) * inverse(u) * v * random_rotated_relator(rng, genus) * inverse(v);
}

} // namespace test_support
