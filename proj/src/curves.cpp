#include "klein/curves.hpp"

#include "klein/errors.hpp"
#include "klein/reps.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <mutex>
#include <unordered_set>

namespace klein {

namespace {

GroupWord comm_word(int genus, int j)
{
    return commutator(alpha(genus, j), beta(genus, j));
}

// Generator images of one move, indexed by generator number 2(j-1)+kind.
std::vector<GroupWord> move_images(int genus, const Move& m)
{
    const int j = m.handle;
    const bool fwd = m.power > 0;
    std::vector<GroupWord> img;
    img.reserve(2 * genus);
    for (int h = 1; h <= genus; ++h) {
        img.push_back(alpha(genus, h));
        img.push_back(beta(genus, h));
    }
    auto at = [&](int handle, Kind kind) -> GroupWord& { return img[2 * (handle - 1) + static_cast<int>(kind)]; };
    auto conj_others = [&](const GroupWord& u, int skip1, int skip2) {
        const GroupWord ui = inverse(u);
        for (int h = 1; h <= genus; ++h) {
            if (h == skip1 || h == skip2)
                continue;
            at(h, Kind::Alpha) = u * alpha(genus, h) * ui;
            at(h, Kind::Beta) = u * beta(genus, h) * ui;
        }
    };
    const bool needs_next = m.type == MoveType::ChainZ || m.type == MoveType::ChainW || m.type == MoveType::HandleShift;
    if (j < 1 || j > genus || (needs_next && j >= genus))
        throw Error(ErrorKind::InvalidInput, "move handle out of range: " + to_string(m));

    switch (m.type) {
    case MoveType::TwistAlpha:
        at(j, Kind::Beta) = beta(genus, j) * alpha(genus, j, m.power);
        break;
    case MoveType::TwistBeta:
        at(j, Kind::Alpha) = alpha(genus, j) * beta(genus, j, m.power);
        break;
    case MoveType::TwistComm: {
        const GroupWord c = power(comm_word(genus, j), m.power);
        at(j, Kind::Alpha) = c * alpha(genus, j) * inverse(c);
        at(j, Kind::Beta) = c * beta(genus, j) * inverse(c);
        break;
    }
    case MoveType::ChainZ: {
        const GroupWord z = power(alpha(genus, j, -1) * beta(genus, j + 1), m.power);
        const GroupWord u = power(beta(genus, j + 1) * alpha(genus, j, -1), m.power);
        at(j, Kind::Beta) = z * beta(genus, j);
        at(j + 1, Kind::Alpha) = z * alpha(genus, j + 1);
        conj_others(u, j, j + 1);
        break;
    }
    case MoveType::ChainW: {
        const GroupWord z = power(beta(genus, j, -1) * alpha(genus, j + 1), m.power);
        at(j, Kind::Alpha) = z * alpha(genus, j);
        at(j + 1, Kind::Beta) = z * beta(genus, j + 1);
        conj_others(z, j, j + 1);
        break;
    }
    case MoveType::HandleShift:
        if (fwd) {
            const GroupWord c = comm_word(genus, j);
            at(j, Kind::Alpha) = c * alpha(genus, j + 1) * inverse(c);
            at(j, Kind::Beta) = c * beta(genus, j + 1) * inverse(c);
            at(j + 1, Kind::Alpha) = alpha(genus, j);
            at(j + 1, Kind::Beta) = beta(genus, j);
        } else {
            const GroupWord c = comm_word(genus, j + 1);
            at(j, Kind::Alpha) = alpha(genus, j + 1);
            at(j, Kind::Beta) = beta(genus, j + 1);
            at(j + 1, Kind::Alpha) = inverse(c) * alpha(genus, j) * c;
            at(j + 1, Kind::Beta) = inverse(c) * beta(genus, j) * c;
        }
        break;
    }
    return img;
}

GroupWord substitute(const std::vector<GroupWord>& img, const GroupWord& w)
{
    std::vector<Letter> out;
    for (const Letter l : w.letters()) {
        const GroupWord& x = img[l.generator()];
        if (!l.is_inverse()) {
            out.insert(out.end(), x.letters().begin(), x.letters().end());
        } else {
            for (auto it = x.letters().rbegin(); it != x.letters().rend(); ++it)
                out.push_back(it->inverse());
        }
    }
    return GroupWord(w.genus(), std::move(out));
}

std::vector<Move> concat(std::vector<Move> a, const std::vector<Move>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<Move> repeated(MoveType type, int handle, int n)
{
    return std::vector<Move>(static_cast<std::size_t>(std::abs(n)), Move{type, handle, n >= 0 ? 1 : -1});
}

bool same_unoriented_class(const GroupWord& x, const GroupWord& y)
{
    const auto kx = cyclic_normal_form(x);
    return kx == cyclic_normal_form(y) || kx == cyclic_normal_form(inverse(y));
}

const char* move_name(MoveType t)
{
    switch (t) {
    case MoveType::TwistAlpha: return "Ta";
    case MoveType::TwistBeta: return "Tb";
    case MoveType::TwistComm: return "Tc";
    case MoveType::ChainZ: return "Tz";
    case MoveType::ChainW: return "Tw";
    case MoveType::HandleShift: return "Sh";
    }
    return "?";
}

GroupWord letter_word(int genus, Letter l)
{
    return GroupWord(genus, {l});
}

// The word of gens corresponding to a canonical letter.
GroupWord frame_letter(const StandardGenerators& gens, Letter l)
{
    const GroupWord& w = gens.word(l.handle(), l.kind());
    return l.is_inverse() ? inverse(w) : w;
}

} // namespace

std::string to_string(const Move& m)
{
    return std::string(move_name(m.type)) + std::to_string(m.handle) + (m.power > 0 ? "+" : "-");
}

Move inverse(const Move& m)
{
    return {m.type, m.handle, -m.power};
}

GroupWord apply_move(const Move& m, const GroupWord& w)
{
    return substitute(move_images(w.genus(), m), w);
}

GroupWord apply_moves(const std::vector<Move>& moves, const GroupWord& w)
{
    GroupWord out = w;
    for (const auto& m : moves)
        out = apply_move(m, out);
    return out;
}

GroupWord apply_inverse(const std::vector<Move>& moves, const GroupWord& w)
{
    GroupWord out = w;
    for (auto it = moves.rbegin(); it != moves.rend(); ++it)
        out = apply_move(inverse(*it), out);
    return out;
}

std::vector<Move> supported_moves(int genus)
{
    std::vector<Move> out;
    for (int j = 1; j <= genus; ++j)
        for (int e : {1, -1}) {
            out.push_back({MoveType::TwistAlpha, j, e});
            out.push_back({MoveType::TwistBeta, j, e});
            out.push_back({MoveType::TwistComm, j, e});
        }
    for (int j = 1; j < genus; ++j)
        for (int e : {1, -1}) {
            out.push_back({MoveType::ChainZ, j, e});
            out.push_back({MoveType::ChainW, j, e});
        }
    return out;
}

StandardGenerators::StandardGenerators(int genus) : StandardGenerators(genus, {}) {}

StandardGenerators::StandardGenerators(int genus, std::vector<Move> frame) : genus_(genus), frame_(std::move(frame))
{
    (void)relator(genus); // validates the genus
    for (int h = 1; h <= genus; ++h) {
        words_.push_back(apply_moves(frame_, klein::alpha(genus, h)));
        words_.push_back(apply_moves(frame_, klein::beta(genus, h)));
    }
}

StandardGenerators StandardGenerators::then(const std::vector<Move>& more) const
{
    return StandardGenerators(genus_, concat(frame_, more));
}

GroupWord StandardGenerators::to_canonical(const GroupWord& w_in_frame) const
{
    return substitute(words_, w_in_frame);
}

std::vector<Move> standard_frame(int genus, int handle, Kind kind)
{
    std::vector<Move> f;
    if (kind == Kind::Beta) {
        // a_1 -> a_1 b_1 -> a_1 b_1 a_1^-1, conjugate to b_1
        f.push_back({MoveType::TwistBeta, 1, 1});
        f.push_back({MoveType::TwistAlpha, 1, -1});
    }
    for (int h = 1; h < handle; ++h)
        f.push_back({MoveType::HandleShift, h, 1});
    (void)genus;
    return f;
}

GroupWord replay(const CurveCertificate& cert, int genus)
{
    switch (cert.recipe) {
    case CurveRecipe::Standard:
        return apply_moves(cert.basis, generator(genus, cert.handle, cert.kind));
    case CurveRecipe::WFamily:
        return apply_moves(cert.basis, power(alpha(genus, cert.handle), cert.n) * beta(genus, cert.handle));
    case CurveRecipe::TwistFamily: {
        const GroupWord c = power(comm_word(genus, cert.handle), cert.n);
        return apply_moves(cert.basis, c * letter_word(genus, cert.gamma) * inverse(c) * letter_word(genus, cert.delta));
    }
    case CurveRecipe::TwistImage:
        return apply_moves(cert.moves, replay(*cert.base, genus));
    }
    return GroupWord(genus);
}

std::string describe(const SimpleCurve& c)
{
    const auto& cert = c.certificate;
    switch (cert.recipe) {
    case CurveRecipe::Standard:
        return "standard " + to_string(Letter::make(cert.handle, cert.kind));
    case CurveRecipe::WFamily:
        return "W-family j=" + std::to_string(cert.handle) + " n=" + std::to_string(cert.n);
    case CurveRecipe::TwistFamily:
        return "twist-family j=" + std::to_string(cert.handle) + " pattern=" + to_string(cert.gamma) + " " +
               to_string(cert.delta) + " n=" + std::to_string(cert.n);
    case CurveRecipe::TwistImage: {
        std::string s = "twist-image of (" + describe(SimpleCurve{GroupWord(c.word.genus()), *cert.base, {}}) + ") by";
        for (const auto& m : cert.moves)
            s += " " + to_string(m);
        return s;
    }
    }
    return "?";
}

SimpleCurve standard_curve(const StandardGenerators& gens, int handle, Kind kind)
{
    CurveCertificate cert;
    cert.recipe = CurveRecipe::Standard;
    cert.basis = gens.frame();
    cert.handle = handle;
    cert.kind = kind;
    if (handle == 1 && kind == Kind::Beta)
        cert.w_relation = WRelation::OnceThroughAlpha1;
    else if (handle > 1)
        cert.w_relation = WRelation::DisjointFromAlpha1;
    return {gens.word(handle, kind), cert, concat(standard_frame(gens.genus(), handle, kind), gens.frame())};
}

SimpleCurve w_family_member(const StandardGenerators& gens, int j, int n)
{
    const int g = gens.genus();
    if (j < 1 || j > g)
        throw Error(ErrorKind::InvalidInput, "handle out of range");
    CurveCertificate cert;
    cert.recipe = CurveRecipe::WFamily;
    cert.basis = gens.frame();
    cert.handle = j;
    cert.n = n;
    cert.w_relation = j == 1 ? WRelation::OnceThroughAlpha1 : WRelation::DisjointFromAlpha1;
    // b_j -> b_j a_j^n under n twists about a_j, conjugate to a_j^n b_j
    std::vector<Move> frame = concat(standard_frame(g, j, Kind::Beta), repeated(MoveType::TwistAlpha, j, n));
    return {replay(cert, g), cert, concat(std::move(frame), gens.frame())};
}

const std::vector<RecordedPattern>& recorded_patterns(int genus)
{
    static std::mutex mutex;
    static std::map<int, std::vector<RecordedPattern>> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(genus); it != cache.end())
        return it->second;

    std::vector<RecordedPattern> out;
    for (int j = 1; j < genus; ++j) {
        // Candidate patterns x y with x, y letters of handles j and j+1 (either order).
        struct Target {
            Letter gamma, delta;
            bool found = false;
            std::vector<Move> frame;
        };
        std::vector<Target> targets;
        std::map<ConjugacyClassKey, std::vector<std::size_t>> by_key;
        for (int first : {j, j + 1}) {
            const int second = first == j ? j + 1 : j;
            for (Kind k1 : {Kind::Alpha, Kind::Beta})
                for (int s1 : {1, -1})
                    for (Kind k2 : {Kind::Alpha, Kind::Beta})
                        for (int s2 : {1, -1}) {
                            const Letter x = Letter::make(first, k1, s1), y = Letter::make(second, k2, s2);
                            targets.push_back({x, y, false, {}});
                            const GroupWord w(genus, {x, y});
                            by_key[cyclic_normal_form(w)].push_back(targets.size() - 1);
                        }
        }
        std::vector<Move> local;
        for (int h : {j, j + 1})
            for (int e : {1, -1}) {
                local.push_back({MoveType::TwistAlpha, h, e});
                local.push_back({MoveType::TwistBeta, h, e});
                local.push_back({MoveType::TwistComm, h, e});
            }
        for (int e : {1, -1}) {
            local.push_back({MoveType::ChainZ, j, e});
            local.push_back({MoveType::ChainW, j, e});
        }
        struct Node {
            GroupWord word;
            std::vector<Move> frame;
        };
        std::vector<Node> frontier;
        for (int h : {j, j + 1})
            for (Kind k : {Kind::Alpha, Kind::Beta})
                frontier.push_back({generator(genus, h, k), standard_frame(genus, h, k)});
        constexpr int kDepth = 3;
        for (int depth = 0; depth <= kDepth; ++depth) {
            for (const auto& node : frontier) {
                for (const GroupWord& w : {node.word, inverse(node.word)}) {
                    auto it = by_key.find(cyclic_normal_form(w));
                    if (it == by_key.end())
                        continue;
                    for (std::size_t t : it->second)
                        if (!targets[t].found) {
                            targets[t].found = true;
                            targets[t].frame = node.frame;
                        }
                }
            }
            if (depth == kDepth)
                break;
            std::vector<Node> next;
            for (const auto& node : frontier)
                for (const auto& m : local)
                    next.push_back({apply_move(m, node.word), concat(node.frame, {m})});
            frontier = std::move(next);
        }
        for (const auto& t : targets)
            if (t.found)
                out.push_back({t.gamma, t.delta, t.frame});
    }
    return cache.emplace(genus, std::move(out)).first->second;
}

SimpleCurve twist_family_member(const StandardGenerators& gens, int j, const GroupWord& gamma, const GroupWord& delta,
                                int n)
{
    const int g = gens.genus();
    auto as_letter = [&](const GroupWord& w) -> std::optional<Letter> {
        for (int h = 1; h <= g; ++h)
            for (Kind k : {Kind::Alpha, Kind::Beta}) {
                if (w == gens.word(h, k))
                    return Letter::make(h, k, 1);
                if (w == inverse(gens.word(h, k)))
                    return Letter::make(h, k, -1);
            }
        return std::nullopt;
    };
    const auto x = as_letter(gamma);
    const auto y = as_letter(delta);
    if (!x || !y || x->handle() != j)
        throw Error(ErrorKind::UncertifiedPair, "gamma must be a generator of handle " + std::to_string(j) +
                                                    " and delta a generator of the generating set");
    const RecordedPattern* pattern = nullptr;
    for (const auto& p : recorded_patterns(g))
        if (p.gamma == *x && p.delta == *y)
            pattern = &p;
    if (!pattern)
        throw Error(ErrorKind::UncertifiedPair, to_string(*x) + " " + to_string(*y));
    CurveCertificate cert;
    cert.recipe = CurveRecipe::TwistFamily;
    cert.basis = gens.frame();
    cert.handle = j;
    cert.gamma = *x;
    cert.delta = *y;
    cert.n = n;
    std::vector<Move> frame = concat(pattern->frame, repeated(MoveType::TwistComm, j, n));
    return {replay(cert, g), cert, concat(std::move(frame), gens.frame())};
}

GroupWord twist_curve_word(const StandardGenerators& gens, TwistCurve curve, int handle)
{
    const int g = gens.genus();
    const bool chain = curve == TwistCurve::ChainZ || curve == TwistCurve::ChainW;
    if (handle < 1 || handle > g || (chain && handle >= g))
        throw Error(ErrorKind::UnsupportedTwistCurve, "handle out of range");
    switch (curve) {
    case TwistCurve::Alpha: return gens.alpha(handle);
    case TwistCurve::Beta: return gens.beta(handle);
    case TwistCurve::Commutator: return commutator(gens.alpha(handle), gens.beta(handle));
    case TwistCurve::ChainZ: return inverse(gens.alpha(handle)) * gens.beta(handle + 1);
    case TwistCurve::ChainW: return inverse(gens.beta(handle)) * gens.alpha(handle + 1);
    }
    return GroupWord(g);
}

GroupWord dehn_twist(const StandardGenerators& gens, TwistCurve curve, int handle, const GroupWord& w, int power)
{
    (void)twist_curve_word(gens, curve, handle); // range check
    MoveType type = MoveType::TwistAlpha;
    switch (curve) {
    case TwistCurve::Alpha: type = MoveType::TwistAlpha; break;
    case TwistCurve::Beta: type = MoveType::TwistBeta; break;
    case TwistCurve::Commutator: type = MoveType::TwistComm; break;
    case TwistCurve::ChainZ: type = MoveType::ChainZ; break;
    case TwistCurve::ChainW: type = MoveType::ChainW; break;
    }
    // conjugate the canonical twist into the frame: B o T o B^-1
    GroupWord x = apply_inverse(gens.frame(), w);
    x = apply_moves(repeated(type, handle, power), x);
    return apply_moves(gens.frame(), x);
}

GroupWord dehn_twist(const StandardGenerators& gens, const SimpleCurve& about, const GroupWord& w, int power)
{
    const int g = gens.genus();
    for (TwistCurve c : {TwistCurve::Alpha, TwistCurve::Beta, TwistCurve::ChainZ, TwistCurve::ChainW}) {
        const bool chain = c == TwistCurve::ChainZ || c == TwistCurve::ChainW;
        for (int h = 1; h <= (chain ? g - 1 : g); ++h)
            if (same_unoriented_class(about.word, twist_curve_word(gens, c, h)))
                return dehn_twist(gens, c, h, w, power);
    }
    throw Error(ErrorKind::UnsupportedTwistCurve, to_string(about.word));
}

namespace {

// Cyclically Dehn-reduced least rotation: equal for equal words up to
// rotation and relator shortening, cheap for long words (no half-relator
// closure).
GroupWord partial_key(const GroupWord& w)
{
    return least_rotation(cyclic_dehn_reduce(dehn_reduce(w)));
}

// A quasi-Fuchsian representation without the symmetries of the regular
// polygon: the base bent along two different separating curves.
const std::vector<Mat2d>& fingerprint_images(int genus)
{
    static std::mutex mutex;
    static std::map<int, std::vector<Mat2d>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(genus);
    if (it == cache.end()) {
        // Complex twists along every standard generator and bends along the
        // separating axes break every symmetry of the polygon group while
        // keeping the images short.
        SurfaceRepresentation r = fuchsian_base(genus);
        for (int j = 1; j <= genus; ++j) {
            r = twist(r, j, Kind::Alpha, {0.137 + 0.021 * j, 0.093 - 0.017 * j});
            r = twist(r, j, Kind::Beta, {-0.081 + 0.013 * j, 0.116 + 0.011 * j});
            if (j >= 2)
                r = bend(r, j, {0.0213, 0.0371 - 0.0059 * j});
        }
        it = cache.emplace(genus, std::move(r.images)).first;
    }
    return it->second;
}

} // namespace

std::vector<SimpleCurve> simple_curve_stream(const StandardGenerators& gens, int budget, StreamLog* log)
{
    const int g = gens.genus();
    const std::vector<Mat2d>& reference = fingerprint_images(g);
    std::vector<SimpleCurve> out;
    std::unordered_set<GroupWord, GroupWordHash> seen;
    // Complex lengths of admitted curves under the reference representation,
    // keyed by translation length.
    std::multimap<double, std::pair<Complexd, std::size_t>> fingerprints;
    auto admit = [&](SimpleCurve c) {
        const GroupWord k1 = partial_key(c.word);
        const GroupWord k2 = partial_key(inverse(c.word));
        if (seen.count(k1) || seen.count(k2))
            return;
        seen.insert(k1);
        seen.insert(k2);
        const Complexd z = complex_length_sq(evaluate(reference, k1)).length.value;
        const double tol = kFingerprintTolerance * std::max(1.0, z.real());
        for (auto it = fingerprints.lower_bound(z.real() - tol); it != fingerprints.end() && it->first <= z.real() + tol;
             ++it) {
            const double dphi = std::remainder(it->second.first.imag() - z.imag(), 2 * std::numbers::pi);
            if (std::abs(dphi) <= tol) {
                if (log)
                    log->numeric_merges.push_back({c.word, out[it->second.second].word});
                return;
            }
        }
        fingerprints.emplace(z.real(), std::pair{z, out.size()});
        out.push_back(std::move(c));
    };
    std::vector<SimpleCurve> previous_family;
    for (int round = 1; round <= budget; ++round) {
        std::vector<SimpleCurve> family;
        if (round == 1) {
            for (int h = 1; h <= g; ++h)
                for (Kind k : {Kind::Alpha, Kind::Beta})
                    family.push_back(standard_curve(gens, h, k));
        } else {
            for (int j = 1; j <= g; ++j)
                family.push_back(w_family_member(gens, j, round - 1));
            for (const auto& p : recorded_patterns(g)) {
                const int j = p.gamma.handle();
                family.push_back(twist_family_member(gens, j, frame_letter(gens, p.gamma), frame_letter(gens, p.delta),
                                                     round - 2));
            }
        }
        for (auto& c : family)
            admit(c);
        if (round >= 2) {
            for (const auto& base : previous_family) {
                auto base_cert = std::make_shared<const CurveCertificate>(base.certificate);
                for (const auto& m : supported_moves(g)) {
                    CurveCertificate cert;
                    cert.recipe = CurveRecipe::TwistImage;
                    cert.base = base_cert;
                    cert.moves = {m};
                    admit({apply_move(m, base.word), cert, concat(base.frame, {m})});
                }
            }
        }
        previous_family = std::move(family);
    }
    return out;
}

} // namespace klein
