#include "oracle.hpp"
#include "support.hpp"

#include "klein/errors.hpp"
#include "klein/words.hpp"

#include <doctest.h>

#include <map>
#include <numeric>
#include <random>
#include <set>

using namespace klein;

namespace {

// Union-find over indices.
struct Partition {
    std::vector<int> parent;
    explicit Partition(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void join(int x, int y) { parent[find(x)] = find(y); }
};

std::vector<GroupWord> all_reduced_words(int genus, int max_length)
{
    std::vector<GroupWord> out{GroupWord(genus)};
    std::vector<GroupWord> layer{GroupWord(genus)};
    for (int len = 1; len <= max_length; ++len) {
        std::vector<GroupWord> next;
        for (const auto& w : layer)
            for (int code = 0; code < 4 * genus; ++code) {
                const Letter l{static_cast<std::uint8_t>(code)};
                if (!w.empty() && w.letters().back() == l.inverse())
                    continue;
                std::vector<Letter> letters = w.letters();
                letters.push_back(l);
                next.emplace_back(genus, letters);
            }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

bool trivial_by_oracle(const std::vector<oracle::Mat>& group, const GroupWord& w)
{
    return oracle::distance_from_identity(oracle::evaluate(group, w)) < oracle::Real("1e-20");
}

} // namespace

TEST_SUITE("words")
{
    TEST_CASE("letter order is a1 < A1 < b1 < B1 < a2")
    {
        const Letter a1 = Letter::make(1, Kind::Alpha), A1 = Letter::make(1, Kind::Alpha, -1);
        const Letter b1 = Letter::make(1, Kind::Beta), B1 = Letter::make(1, Kind::Beta, -1);
        const Letter a2 = Letter::make(2, Kind::Alpha);
        CHECK(a1 < A1);
        CHECK(A1 < b1);
        CHECK(b1 < B1);
        CHECK(B1 < a2);
        CHECK(A1 == a1.inverse());
        CHECK(b1.handle() == 1);
        CHECK(a2.handle() == 2);
        CHECK(B1.kind() == Kind::Beta);
    }

    TEST_CASE("parse and print round trip")
    {
        CHECK(to_string(parse_word(2, "a1 B2 b1")) == "a1 B2 b1");
        CHECK(parse_word(2, "a1^-2 b2^3") == parse_word(2, "A1 A1 b2 b2 b2"));
        CHECK(to_string(GroupWord(2)) == "1");
        CHECK(parse_word(2, "1").empty());
        CHECK_THROWS_AS(parse_word(2, "a3"), Error);
        CHECK_THROWS_AS(parse_word(2, "x1"), Error);
    }

    TEST_CASE("free reduction examples")
    {
        CHECK(parse_word(2, "a1 A1").empty());
        CHECK(parse_word(2, "a1 b1 B1 a2") == parse_word(2, "a1 a2"));
        const GroupWord w = parse_word(2, "a1 b2 A2 b1");
        CHECK(free_reduce(w) == w);
    }

    TEST_CASE("Dehn reduction examples")
    {
        CHECK(dehn_reduce(relator(2)).empty());
        CHECK(dehn_reduce(inverse(relator(3))).empty());
        CHECK(dehn_reduce(parse_word(2, "a1")) == parse_word(2, "a1"));

        // a1 b1 A1 B1 a2 is 5 of the 8 relator letters and gives way to the
        // 3-letter complement
        const GroupWord w = parse_word(2, "b2 a1 b1 A1 B1 a2 a1");
        const GroupWord r = dehn_reduce(w);
        CHECK(r.size() < w.size());
        const auto group = oracle::fuchsian(2);
        CHECK(oracle::distance_from_identity(oracle::evaluate(group, w) *
                                             oracle::inv(oracle::evaluate(group, r))) < oracle::Real("1e-30"));
    }

    TEST_CASE("Dehn reduction agrees with the faithful-representation oracle (property)")
    {
        std::mt19937_64 rng(31);
        for (const int genus : {2, 3}) {
            const auto group = oracle::fuchsian(genus);
            int trivial = 0;
            for (int k = 0; k < 300; ++k) {
                const GroupWord w = (k % 2 == 0) ? test_support::random_trivial_word(rng, genus, 3)
                                                 : test_support::random_word_up_to(rng, genus, 12);
                const bool oracle_trivial = trivial_by_oracle(group, w);
                trivial += oracle_trivial;
                CHECK(dehn_reduce(w).empty() == oracle_trivial);
            }
            CHECK(trivial >= 150);
        }
    }

    TEST_CASE("Dehn reduction preserves the group element (property)")
    {
        std::mt19937_64 rng(37);
        const auto group = oracle::fuchsian(2);
        for (int k = 0; k < 200; ++k) {
            const GroupWord w = test_support::random_word_up_to(rng, 2, 16) *
                                test_support::random_rotated_relator(rng, 2) *
                                test_support::random_word_up_to(rng, 2, 4);
            const GroupWord r = dehn_reduce(w);
            CHECK(r.size() <= w.size());
            CHECK(dehn_reduce(r) == r);
            CHECK(oracle::distance_from_identity(oracle::evaluate(group, w) *
                                                 oracle::inv(oracle::evaluate(group, r))) < oracle::Real("1e-20"));
        }
    }

    TEST_CASE("cyclic normal form examples")
    {
        CHECK(cyclic_normal_form(parse_word(2, "b1 a1 B1")).normal == parse_word(2, "a1"));
        CHECK(cyclic_normal_form(parse_word(2, "a1 b1")) == cyclic_normal_form(parse_word(2, "b1 a1")));
        CHECK_THROWS_AS(cyclic_normal_form(relator(2)), Error);
        CHECK_THROWS_AS(cyclic_normal_form(GroupWord(2)), Error);
        // inverse classes are distinct
        CHECK(cyclic_normal_form(parse_word(2, "a1")) != cyclic_normal_form(parse_word(2, "A1")));
    }

    TEST_CASE("cyclic normal form is constant on conjugacy classes (property)")
    {
        std::mt19937_64 rng(41);
        for (const int genus : {2, 3}) {
            for (int k = 0; k < 400; ++k) {
                GroupWord w = test_support::random_word_up_to(rng, genus, 8);
                if (dehn_reduce(w).empty())
                    continue;
                const GroupWord u = test_support::random_word_up_to(rng, genus, 4);
                const auto key = cyclic_normal_form(w);
                CHECK(cyclic_normal_form(u * w * inverse(u)) == key);
                // inserting a relator conjugate does not change the class
                const GroupWord v = test_support::random_word_up_to(rng, genus, 3);
                CHECK(cyclic_normal_form(w * v * test_support::random_rotated_relator(rng, genus) * inverse(v)) ==
                      key);
            }
        }
    }

    TEST_CASE("cyclic normal form keys agree with the trace oracle")
    {
        // equal keys imply equal traces under a faithful representation
        std::mt19937_64 rng(43);
        const auto group = oracle::fuchsian(2);
        std::map<ConjugacyClassKey, oracle::Complex> seen;
        for (int k = 0; k < 2000; ++k) {
            const GroupWord w = test_support::random_word_up_to(rng, 2, 6);
            if (dehn_reduce(w).empty())
                continue;
            const GroupWord u = test_support::random_word_up_to(rng, 2, 3);
            const auto key = cyclic_normal_form(u * w * inverse(u));
            const oracle::Complex t = oracle::trace(oracle::evaluate(group, w));
            const auto [it, fresh] = seen.emplace(key, t);
            if (!fresh)
                CHECK(boost::multiprecision::abs(it->second - t) < oracle::Real("1e-25"));
        }
    }

    TEST_CASE("enumerate_classes: genus 2 with one letter gives the 8 generators and inverses")
    {
        const auto keys = enumerate_classes(2, 1);
        CHECK(keys.size() == 8);
        std::set<ConjugacyClassKey> distinct(keys.begin(), keys.end());
        CHECK(distinct.size() == 8);
    }

    TEST_CASE("enumerate_classes matches a brute-force conjugation oracle at two letters")
    {
        const int genus = 2;
        std::vector<GroupWord> words;
        for (const auto& w : all_reduced_words(genus, 2))
            if (!w.empty())
                words.push_back(w);
        const auto conjugators = all_reduced_words(genus, 4);
        Partition classes(static_cast<int>(words.size()));
        std::map<GroupWord, int> index;
        for (std::size_t i = 0; i < words.size(); ++i)
            index.emplace(words[i], static_cast<int>(i));
        for (std::size_t i = 0; i < words.size(); ++i)
            for (const auto& u : conjugators) {
                const GroupWord c = dehn_reduce(u * words[i] * inverse(u));
                const auto it = index.find(c);
                if (it != index.end())
                    classes.join(static_cast<int>(i), it->second);
            }
        std::set<int> roots;
        for (std::size_t i = 0; i < words.size(); ++i)
            roots.insert(classes.find(static_cast<int>(i)));
        CHECK(roots.size() == enumerate_classes(genus, 2).size());
        CHECK(roots.size() == 40); // 8 letters, 8 squares, 24 rotation pairs
    }

    TEST_CASE("enumerate_classes is monotone and independent of the thread count")
    {
        for (const int genus : {2, 3}) {
            std::size_t previous = 0;
            for (int m = 1; m <= 5; ++m) {
                const auto one = enumerate_classes(genus, m, 1);
                CHECK(one.size() >= previous);
                previous = one.size();
                CHECK(enumerate_classes(genus, m, 4) == one);
            }
        }
        std::size_t streamed = 0;
        for_each_class(2, 4, [&](const ConjugacyClassKey&) { ++streamed; });
        CHECK(streamed == enumerate_classes(2, 4).size());
    }

    TEST_CASE("enumerated keys are fixed points of the normal form")
    {
        for (const auto& key : enumerate_classes(2, 5)) {
            CHECK(cyclic_normal_form(key.normal) == key);
            CHECK(key.normal.size() <= 5);
        }
    }

    TEST_CASE("primitive roots")
    {
        const GroupWord w = parse_word(2, "a1 b2");
        const auto root = primitive_root(power(w, 3));
        CHECK(root.exponent == 3);
        CHECK(root.root == cyclic_normal_form(w));
        CHECK(primitive_root(w).exponent == 1);
        CHECK(primitive_root(parse_word(2, "a1 a1 b1")).exponent == 1);
    }

    TEST_CASE("least rotation and cyclic reduction")
    {
        CHECK(least_rotation(parse_word(2, "b1 a2 a1")) == parse_word(2, "a1 b1 a2"));
        CHECK(is_cyclically_reduced(parse_word(2, "a1 b1")));
        CHECK_FALSE(is_cyclically_reduced(parse_word(2, "a1 b1 A1")));
    }

    TEST_CASE("group word algebra")
    {
        const GroupWord a = parse_word(3, "a1 b3");
        const GroupWord b = parse_word(3, "B3 a2");
        CHECK(a * b == parse_word(3, "a1 a2"));
        CHECK((a * inverse(a)).empty());
        CHECK(commutator(a, b) == a * b * inverse(a) * inverse(b));
        CHECK(power(a, -2) == inverse(a) * inverse(a));
        CHECK(relator(2).size() == 8);
        CHECK(relator(4).size() == 16);
        CHECK_THROWS_AS(relator(1), Error);
    }
}
