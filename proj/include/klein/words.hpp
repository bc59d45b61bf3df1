#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace klein {

enum class Kind : std::uint8_t { Alpha = 0, Beta = 1 };

// One letter of a word in the standard generators. The code packs
// (generator, inverse) so that the natural integer order is the fixed
// lexicographic order a1 < A1 < b1 < B1 < a2 < ...
struct Letter {
    std::uint8_t code = 0;

    static constexpr Letter make(int handle, Kind kind, int sign = 1)
    {
        const int gen = 2 * (handle - 1) + static_cast<int>(kind);
        return Letter{static_cast<std::uint8_t>(2 * gen + (sign < 0 ? 1 : 0))};
    }

    constexpr int generator() const { return code >> 1; }
    constexpr bool is_inverse() const { return (code & 1) != 0; }
    constexpr int sign() const { return is_inverse() ? -1 : 1; }
    constexpr int handle() const { return generator() / 2 + 1; }
    constexpr Kind kind() const { return static_cast<Kind>(generator() % 2); }
    constexpr Letter inverse() const { return Letter{static_cast<std::uint8_t>(code ^ 1)}; }

    friend constexpr auto operator<=>(Letter, Letter) = default;
};

// Freely reduced word in the 2g standard generators of the genus-g surface
// group. Every constructor reduces, so the invariant always holds.
class GroupWord {
public:
    GroupWord() = default;
    explicit GroupWord(int genus) : genus_(genus) {}
    GroupWord(int genus, std::vector<Letter> letters);

    int genus() const { return genus_; }
    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    Letter operator[](std::size_t i) const { return letters_[i]; }

    friend bool operator==(const GroupWord&, const GroupWord&) = default;
    friend std::strong_ordering operator<=>(const GroupWord& x, const GroupWord& y);

private:
    int genus_ = 2;
    std::vector<Letter> letters_;
};

// Cyclically reduced, relator-free, lexicographically least representative
// of a conjugacy class.
struct ConjugacyClassKey {
    GroupWord normal;

    friend bool operator==(const ConjugacyClassKey&, const ConjugacyClassKey&) = default;
    friend auto operator<=>(const ConjugacyClassKey& x, const ConjugacyClassKey& y)
    {
        return x.normal <=> y.normal;
    }
};

GroupWord generator(int genus, int handle, Kind kind, int sign = 1);
GroupWord alpha(int genus, int handle, int sign = 1);
GroupWord beta(int genus, int handle, int sign = 1);
GroupWord inverse(const GroupWord& w);
GroupWord operator*(const GroupWord& x, const GroupWord& y);
GroupWord power(const GroupWord& w, int n);
GroupWord commutator(const GroupWord& x, const GroupWord& y); // x y x^-1 y^-1
GroupWord relator(int genus);                                  // prod_j [a_j, b_j]

// Free reduction of an arbitrary letter sequence.
GroupWord free_reduce(int genus, std::span<const Letter> letters);
GroupWord free_reduce(const GroupWord& w);

// Dehn's algorithm: repeatedly replaces a subword that is more than half of a
// cyclic rotation of the relator (or its inverse) by the shorter complement.
GroupWord dehn_reduce(const GroupWord& w);

// Cyclic reduction followed by cyclic Dehn reduction; returns a cyclic word
// (as a linear representative) with no cancellation or long relator piece
// across the wraparound.
GroupWord cyclic_dehn_reduce(const GroupWord& w);

// Conjugacy class key. Minimal-length cyclic words of one class can differ by
// half-relator exchanges; the key is the least word over the closure of the
// cyclic word under rotations and those exchanges. Throws TrivialWord.
ConjugacyClassKey cyclic_normal_form(const GroupWord& w);

bool is_cyclically_reduced(const GroupWord& w);

// Lexicographically least cyclic rotation.
GroupWord least_rotation(const GroupWord& w);

// Primitive root: the shortest r with w conjugate to r^k (k >= 1), detected on
// the cyclic normal form. Returns {root key, k}.
struct RootDecomposition {
    ConjugacyClassKey root;
    int exponent = 1;
};
RootDecomposition primitive_root(const GroupWord& w);

// Every conjugacy class with a representative of length <= max_letters,
// exactly once, in an order that does not depend on `threads`.
std::vector<ConjugacyClassKey> enumerate_classes(int genus, int max_letters, int threads = 1);

// Streaming single-threaded form of enumerate_classes; memory O(max_letters).
void for_each_class(int genus, int max_letters, const std::function<void(const ConjugacyClassKey&)>& visit);

// Text form: letters a1 b1 a2 ..., capitals for inverses, "1" for the
// identity. Parsing also accepts powers such as a1^-2 and b2^3.
std::string to_string(const GroupWord& w);
std::string to_string(Letter l);
GroupWord parse_word(int genus, std::string_view text);

struct GroupWordHash {
    std::size_t operator()(const GroupWord& w) const noexcept;
};

} // namespace klein
