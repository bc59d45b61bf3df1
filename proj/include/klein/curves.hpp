#pragma once

#include "klein/words.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace klein {

// Elementary relator-preserving automorphisms of the surface group. Each is
// induced by an orientation-preserving mapping class, so images of simple
// non-separating curves stay simple and non-separating.
//
// Conventions (power +1; power -1 is the inverse automorphism):
//   TwistAlpha j   b_j -> b_j a_j                (Dehn twist about a_j)
//   TwistBeta j    a_j -> a_j b_j                (Dehn twist about b_j)
//   TwistComm j    a_j, b_j -> c a_j c^-1, c b_j c^-1,  c = [a_j, b_j]
//   ChainZ j       b_j, a_{j+1} -> z b_j, z a_{j+1},  z = a_j^-1 b_{j+1};
//                  other handles conjugated by u = b_{j+1} a_j^-1
//   ChainW j       a_j, b_{j+1} -> z a_j, z b_{j+1},  z = b_j^-1 a_{j+1};
//                  other handles conjugated by z
//   HandleShift j  a_j -> c a_{j+1} c^-1, b_j -> c b_{j+1} c^-1,
//                  a_{j+1} -> a_j, b_{j+1} -> b_j,  c = [a_j, b_j]
// ChainZ/ChainW are twists about the curves a_j^-1 b_{j+1} and
// b_j^-1 a_{j+1} crossing between adjacent handles; HandleShift exchanges
// two adjacent handles.
enum class MoveType : std::uint8_t { TwistAlpha, TwistBeta, TwistComm, ChainZ, ChainW, HandleShift };

struct Move {
    MoveType type = MoveType::TwistAlpha;
    int handle = 1;
    int power = 1; // +1 or -1

    friend bool operator==(const Move&, const Move&) = default;
};

std::string to_string(const Move& m);
Move inverse(const Move& m);

// Image of a word under one move / a sequence of moves applied in order.
GroupWord apply_move(const Move& m, const GroupWord& w);
GroupWord apply_moves(const std::vector<Move>& moves, const GroupWord& w);
// Inverse of apply_moves(moves, .).
GroupWord apply_inverse(const std::vector<Move>& moves, const GroupWord& w);

// All moves used for twist images in the curve stream (no handle shifts).
std::vector<Move> supported_moves(int genus);

// A standard generating set a_1', b_1', ..., given as the image of the
// canonical basis under a recorded move sequence (the frame).
class StandardGenerators {
public:
    explicit StandardGenerators(int genus);
    StandardGenerators(int genus, std::vector<Move> frame);

    static StandardGenerators canonical(int genus) { return StandardGenerators(genus); }

    int genus() const { return genus_; }
    const std::vector<Move>& frame() const { return frame_; }
    const std::vector<GroupWord>& words() const { return words_; }
    const GroupWord& word(int handle, Kind kind) const { return words_[2 * (handle - 1) + static_cast<int>(kind)]; }
    const GroupWord& alpha(int handle) const { return word(handle, Kind::Alpha); }
    const GroupWord& beta(int handle) const { return word(handle, Kind::Beta); }

    // The same set with `more` appended to the frame (applied after it).
    StandardGenerators then(const std::vector<Move>& more) const;

    // Expresses a word written in this set's letters in canonical letters.
    GroupWord to_canonical(const GroupWord& w_in_frame) const;

private:
    int genus_;
    std::vector<Move> frame_;
    std::vector<GroupWord> words_;
};

enum class CurveRecipe : std::uint8_t { Standard, WFamily, TwistFamily, TwistImage };

// Relation to a_1 that holds by construction for W(a_1) members.
enum class WRelation : std::uint8_t { NotRecorded, DisjointFromAlpha1, OnceThroughAlpha1 };

struct CurveCertificate {
    CurveRecipe recipe = CurveRecipe::Standard;
    std::vector<Move> basis;         // frame of the generating set the recipe is written in
    int handle = 1;                  // Standard, WFamily, TwistFamily
    Kind kind = Kind::Alpha;         // Standard
    int n = 0;                       // WFamily / TwistFamily exponent
    Letter gamma{}, delta{};         // TwistFamily pattern, in frame letters
    std::shared_ptr<const CurveCertificate> base; // TwistImage
    std::vector<Move> moves;         // TwistImage: applied to the base word
    WRelation w_relation = WRelation::NotRecorded;
};

// Replays a certificate to its word (canonical letters).
GroupWord replay(const CurveCertificate& cert, int genus);

// A certified simple non-separating closed curve. `frame` is a move sequence
// whose image of a_1 is conjugate to the curve or its inverse, so the curve
// extends to a standard generating set.
struct SimpleCurve {
    GroupWord word;
    CurveCertificate certificate;
    std::vector<Move> frame;

    StandardGenerators generating_set() const { return StandardGenerators(word.genus(), frame); }
};

std::string describe(const SimpleCurve& c);

SimpleCurve standard_curve(const StandardGenerators& gens, int handle, Kind kind);

// a_j^n b_j.
SimpleCurve w_family_member(const StandardGenerators& gens, int j, int n);

// [a_j, b_j]^n gamma [a_j, b_j]^-n delta for a recorded simple pattern
// (gamma, delta): gamma a generator letter of handle j, delta a generator
// letter of an adjacent handle, gamma delta simple. gamma and delta are
// single letters of `gens`. Throws UncertifiedPair otherwise.
SimpleCurve twist_family_member(const StandardGenerators& gens, int j, const GroupWord& gamma,
                                const GroupWord& delta, int n);

// Recorded two-letter patterns (canonical letters): those x y, x and y
// generators of adjacent handles, reached from a standard generator by a
// bounded sequence of supported moves. Each comes with its frame.
struct RecordedPattern {
    Letter gamma, delta;
    std::vector<Move> frame;
};
const std::vector<RecordedPattern>& recorded_patterns(int genus);

// The move sequence carrying a_1 to (a conjugate of) the given standard
// generator of the canonical basis.
std::vector<Move> standard_frame(int genus, int handle, Kind kind);

// Supported twist curves: the standard curves a_j, b_j, the handle
// commutators [a_j, b_j] and the chain curves of ChainZ/ChainW, all taken
// in the frame of `gens`.
enum class TwistCurve : std::uint8_t { Alpha, Beta, Commutator, ChainZ, ChainW };
GroupWord twist_curve_word(const StandardGenerators& gens, TwistCurve curve, int handle);
GroupWord dehn_twist(const StandardGenerators& gens, TwistCurve curve, int handle, const GroupWord& w, int power = 1);
// Twist about a simple curve; it must be one of the supported curves of
// `gens` (up to conjugacy and orientation), else UnsupportedTwistCurve.
GroupWord dehn_twist(const StandardGenerators& gens, const SimpleCurve& about, const GroupWord& w, int power = 1);

// Curves dropped from a stream because their complex length under the
// fingerprint representation matched an admitted curve.
struct NumericMerge {
    GroupWord dropped;
    GroupWord kept;
};
struct StreamLog {
    std::vector<NumericMerge> numeric_merges;
};

// Relative tolerance of the fingerprint comparison.
inline constexpr double kFingerprintTolerance = 1e-9;

// Deterministic stream in rounds: round 1 is the 2g standard generators;
// round r >= 2 adds a_j^(r-1) b_j, the twist families at exponent r-2 for
// every recorded pattern, and every supported move applied once to the
// round r-1 family curves. Budget k's stream is a prefix of budget k+1's.
//
// Duplicates are removed in two stages: words equal up to rotation,
// inversion and relator shortening are dropped combinatorially; the rest
// are compared by complex length under a fixed generic quasi-Fuchsian
// representation and merged when they agree within 1e-9 (see StreamLog).
// The half-relator closure of cyclic_normal_form is exponential in the
// number of half-relator ties, which long twist images have in abundance.
std::vector<SimpleCurve> simple_curve_stream(const StandardGenerators& gens, int budget, StreamLog* log = nullptr);

} // namespace klein
