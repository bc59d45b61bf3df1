#include "klein/words.hpp"

#include "klein/errors.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <charconv>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

namespace klein {

namespace {

constexpr int kMaxGenus = 32;

// Successor of each letter inside the cyclic relator r = prod [a_j, b_j]
// (direction 0) and inside r^-1 (direction 1). Every signed letter occurs
// exactly once in r and once in r^-1, so both maps are total.
struct RelatorTables {
    int genus = 0;
    std::array<std::vector<std::uint8_t>, 2> next;
};

std::vector<Letter> relator_letters(int genus)
{
    std::vector<Letter> r;
    r.reserve(4 * genus);
    for (int j = 1; j <= genus; ++j) {
        r.push_back(Letter::make(j, Kind::Alpha, 1));
        r.push_back(Letter::make(j, Kind::Beta, 1));
        r.push_back(Letter::make(j, Kind::Alpha, -1));
        r.push_back(Letter::make(j, Kind::Beta, -1));
    }
    return r;
}

const RelatorTables& relator_tables(int genus)
{
    static const std::array<RelatorTables, kMaxGenus + 1> all = [] {
        std::array<RelatorTables, kMaxGenus + 1> t;
        for (int g = 2; g <= kMaxGenus; ++g) {
            t[g].genus = g;
            const auto r = relator_letters(g);
            std::vector<Letter> rinv(r.rbegin(), r.rend());
            for (auto& l : rinv)
                l = l.inverse();
            const int n = 4 * g;
            for (int dir = 0; dir < 2; ++dir) {
                const auto& seq = dir == 0 ? r : rinv;
                t[g].next[dir].assign(n, 0);
                for (int i = 0; i < n; ++i)
                    t[g].next[dir][seq[i].code] = seq[(i + 1) % n].code;
            }
        }
        return t;
    }();
    if (genus < 2 || genus > kMaxGenus)
        throw Error(ErrorKind::InvalidInput, "genus out of range");
    return all[genus];
}

using Letters = std::vector<Letter>;

void free_reduce_in_place(Letters& v)
{
    std::size_t top = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (top > 0 && v[top - 1] == v[i].inverse())
            --top;
        else
            v[top++] = v[i];
    }
    v.resize(top);
}

void cyclic_free_reduce_in_place(Letters& v)
{
    free_reduce_in_place(v);
    std::size_t lo = 0, hi = v.size();
    while (hi - lo >= 2 && v[lo] == v[hi - 1].inverse()) {
        ++lo;
        --hi;
    }
    if (lo > 0)
        v = Letters(v.begin() + static_cast<std::ptrdiff_t>(lo), v.begin() + static_cast<std::ptrdiff_t>(hi));
}

// Length of the relator run starting at i in a linear word.
int linear_run(const Letters& v, std::size_t i, const std::vector<std::uint8_t>& next)
{
    std::size_t m = 1;
    while (i + m < v.size() && v[i + m].code == next[v[i + m - 1].code])
        ++m;
    return static_cast<int>(m);
}

// Length of the relator run starting at i in a cyclic word, capped at |v|.
int cyclic_run(const Letters& v, std::size_t i, const std::vector<std::uint8_t>& next)
{
    const std::size_t n = v.size();
    std::size_t m = 1;
    while (m < n && v[(i + m) % n].code == next[v[(i + m - 1) % n].code])
        ++m;
    return static_cast<int>(m);
}

// Inverse of the complement of a run of length m whose last letter is `last`:
// the run s and its continuation t satisfy s t = relator rotation, so
// s = t^-1 in the group.
Letters complement_inverse(Letter last, int m, int genus, const std::vector<std::uint8_t>& next)
{
    const int rest = 4 * genus - m;
    Letters t;
    t.reserve(rest);
    std::uint8_t c = last.code;
    for (int k = 0; k < rest; ++k) {
        c = next[c];
        t.push_back(Letter{c});
    }
    std::reverse(t.begin(), t.end());
    for (auto& l : t)
        l = l.inverse();
    return t;
}

// Replaces the prefix of length m (a relator run) by its complement inverse.
void replace_prefix(Letters& v, int m, int genus, const std::vector<std::uint8_t>& next)
{
    Letters repl = complement_inverse(v[m - 1], m, genus, next);
    repl.insert(repl.end(), v.begin() + m, v.end());
    v = std::move(repl);
}

void dehn_reduce_in_place(Letters& v, int genus)
{
    const auto& tab = relator_tables(genus);
    free_reduce_in_place(v);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < v.size() && !changed; ++i) {
            for (int dir = 0; dir < 2 && !changed; ++dir) {
                int m = linear_run(v, i, tab.next[dir]);
                if (m <= 2 * genus)
                    continue;
                m = std::min(m, 4 * genus);
                Letters tail(v.begin() + static_cast<std::ptrdiff_t>(i), v.end());
                replace_prefix(tail, m, genus, tab.next[dir]);
                v.resize(i);
                v.insert(v.end(), tail.begin(), tail.end());
                free_reduce_in_place(v);
                changed = true;
            }
        }
    }
}

// Applies one cyclic shortening if any exists; returns whether it did.
bool cyclic_shorten_once(Letters& v, int genus)
{
    const auto& tab = relator_tables(genus);
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (int dir = 0; dir < 2; ++dir) {
            int m = cyclic_run(v, i, tab.next[dir]);
            if (m <= 2 * genus)
                continue;
            m = std::min(m, 4 * genus);
            std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(i), v.end());
            replace_prefix(v, m, genus, tab.next[dir]);
            cyclic_free_reduce_in_place(v);
            return true;
        }
    }
    return false;
}

void cyclic_dehn_in_place(Letters& v, int genus)
{
    cyclic_free_reduce_in_place(v);
    while (cyclic_shorten_once(v, genus)) {
    }
}

bool rotation_less(const Letters& v, std::size_t k)
{
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Letter a = v[(k + i) % n];
        const Letter b = v[i];
        if (a != b)
            return a < b;
    }
    return false;
}

Letters least_rotation_of(const Letters& v)
{
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Letter a = v[(k + i) % n];
            const Letter b = v[(best + i) % n];
            if (a != b) {
                if (a < b)
                    best = k;
                break;
            }
        }
    }
    Letters out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = v[(best + i) % v.size()];
    return out;
}

bool has_half_run(const Letters& v, int genus)
{
    const auto& tab = relator_tables(genus);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (int dir = 0; dir < 2; ++dir)
            if (cyclic_run(v, i, tab.next[dir]) >= 2 * genus)
                return true;
    return false;
}

// Closure of a cyclically Dehn-reduced word under half-relator exchanges;
// restarts whenever an exchange exposes a shortening. Returns the least
// element over all rotations of the closure.
Letters closure_key(Letters cur, int genus)
{
    const auto& tab = relator_tables(genus);
    constexpr std::size_t kClosureLimit = 1u << 16;
    for (;;) {
        if (cur.empty())
            return cur;
        std::set<Letters> seen;
        std::deque<Letters> queue;
        Letters start = least_rotation_of(cur);
        seen.insert(start);
        queue.push_back(std::move(start));
        bool restarted = false;
        while (!queue.empty() && !restarted) {
            const Letters s = std::move(queue.front());
            queue.pop_front();
            const std::size_t n = s.size();
            for (std::size_t i = 0; i < n && !restarted; ++i) {
                for (int dir = 0; dir < 2 && !restarted; ++dir) {
                    const int m = cyclic_run(s, i, tab.next[dir]);
                    if (m < 2 * genus)
                        continue;
                    Letters t = s;
                    std::rotate(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(i), t.end());
                    replace_prefix(t, m > 2 * genus ? std::min(m, 4 * genus) : 2 * genus, genus, tab.next[dir]);
                    cyclic_free_reduce_in_place(t);
                    if (t.size() < n) {
                        cyclic_dehn_in_place(t, genus);
                        cur = std::move(t);
                        restarted = true;
                        break;
                    }
                    t = least_rotation_of(t);
                    if (seen.size() < kClosureLimit && seen.insert(t).second)
                        queue.push_back(std::move(t));
                }
            }
        }
        if (!restarted)
            return *seen.begin();
    }
}

// Fast canonicity test used by the enumerator: a word is a key exactly when
// it is cyclically reduced and equals its own closure key.
bool is_key(const Letters& v, int genus)
{
    const std::size_t n = v.size();
    if (n == 0 || (n >= 2 && v[0] == v[n - 1].inverse()))
        return false;
    if (n == 1)
        return true;
    for (std::size_t k = 1; k < n; ++k)
        if (rotation_less(v, k))
            return false;
    if (!has_half_run(v, genus))
        return true;
    return closure_key(v, genus) == v;
}

void check_genus(int genus)
{
    (void)relator_tables(genus);
}

} // namespace

GroupWord::GroupWord(int genus, std::vector<Letter> letters) : genus_(genus), letters_(std::move(letters))
{
    for (const auto& l : letters_)
        if (l.handle() > genus_)
            throw Error(ErrorKind::InvalidInput, "letter outside genus");
    free_reduce_in_place(letters_);
}

std::strong_ordering operator<=>(const GroupWord& x, const GroupWord& y)
{
    if (auto c = x.genus() <=> y.genus(); c != 0)
        return c;
    if (auto c = x.size() <=> y.size(); c != 0)
        return c;
    return std::lexicographical_compare_three_way(x.letters().begin(), x.letters().end(), y.letters().begin(),
                                                  y.letters().end());
}

GroupWord generator(int genus, int handle, Kind kind, int sign)
{
    return GroupWord(genus, {Letter::make(handle, kind, sign)});
}

GroupWord alpha(int genus, int handle, int sign) { return generator(genus, handle, Kind::Alpha, sign); }
GroupWord beta(int genus, int handle, int sign) { return generator(genus, handle, Kind::Beta, sign); }

GroupWord inverse(const GroupWord& w)
{
    std::vector<Letter> v(w.letters().rbegin(), w.letters().rend());
    for (auto& l : v)
        l = l.inverse();
    return GroupWord(w.genus(), std::move(v));
}

GroupWord operator*(const GroupWord& x, const GroupWord& y)
{
    std::vector<Letter> v = x.letters();
    v.insert(v.end(), y.letters().begin(), y.letters().end());
    return GroupWord(x.genus(), std::move(v));
}

GroupWord power(const GroupWord& w, int n)
{
    const GroupWord base = n >= 0 ? w : inverse(w);
    GroupWord out(w.genus());
    for (int k = 0; k < std::abs(n); ++k)
        out = out * base;
    return out;
}

GroupWord commutator(const GroupWord& x, const GroupWord& y)
{
    return x * y * inverse(x) * inverse(y);
}

GroupWord relator(int genus)
{
    check_genus(genus);
    return GroupWord(genus, relator_letters(genus));
}

GroupWord free_reduce(int genus, std::span<const Letter> letters)
{
    return GroupWord(genus, std::vector<Letter>(letters.begin(), letters.end()));
}

GroupWord free_reduce(const GroupWord& w)
{
    return w;
}

GroupWord dehn_reduce(const GroupWord& w)
{
    Letters v = w.letters();
    dehn_reduce_in_place(v, w.genus());
    return GroupWord(w.genus(), std::move(v));
}

GroupWord cyclic_dehn_reduce(const GroupWord& w)
{
    Letters v = w.letters();
    cyclic_dehn_in_place(v, w.genus());
    return GroupWord(w.genus(), std::move(v));
}

ConjugacyClassKey cyclic_normal_form(const GroupWord& w)
{
    Letters v = w.letters();
    dehn_reduce_in_place(v, w.genus());
    cyclic_dehn_in_place(v, w.genus());
    if (v.empty())
        throw Error(ErrorKind::TrivialWord);
    return {GroupWord(w.genus(), closure_key(std::move(v), w.genus()))};
}

bool is_cyclically_reduced(const GroupWord& w)
{
    return w.size() < 2 || w.letters().front() != w.letters().back().inverse();
}

GroupWord least_rotation(const GroupWord& w)
{
    return GroupWord(w.genus(), least_rotation_of(w.letters()));
}

RootDecomposition primitive_root(const GroupWord& w)
{
    const ConjugacyClassKey key = cyclic_normal_form(w);
    const auto& v = key.normal.letters();
    const std::size_t n = v.size();
    for (std::size_t p = 1; p <= n; ++p) {
        if (n % p != 0)
            continue;
        bool periodic = true;
        for (std::size_t i = p; i < n && periodic; ++i)
            periodic = v[i] == v[i - p];
        if (periodic) {
            const GroupWord r(w.genus(), Letters(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(p)));
            return {cyclic_normal_form(r), static_cast<int>(n / p)};
        }
    }
    return {key, 1};
}

namespace {

// Depth-first walk over freely reduced words with a fixed prefix. Prefixes
// that already contain a long relator run, or a letter smaller than the
// first one, cannot be (prefixes of) keys and are pruned.
void walk(Letters& prefix, int genus, int max_letters, const std::function<void(const ConjugacyClassKey&)>& visit)
{
    const auto& tab = relator_tables(genus);
    if (is_key(prefix, genus))
        visit(ConjugacyClassKey{GroupWord(genus, prefix)});
    if (static_cast<int>(prefix.size()) >= max_letters)
        return;
    const int letters = 4 * genus;
    for (int c = prefix.front().code; c < letters; ++c) {
        const Letter l{static_cast<std::uint8_t>(c)};
        if (l == prefix.back().inverse())
            continue;
        prefix.push_back(l);
        bool ok = true;
        const std::size_t n = prefix.size();
        for (int dir = 0; dir < 2 && ok; ++dir) {
            // only runs ending at the new letter can be new
            std::size_t start = n - 1;
            while (start > 0 && prefix[start].code == tab.next[dir][prefix[start - 1].code])
                --start;
            ok = static_cast<int>(n - start) <= 2 * genus;
        }
        if (ok)
            walk(prefix, genus, max_letters, visit);
        prefix.pop_back();
    }
}

} // namespace

namespace {

// Shards: the single letters first, then every two-letter prefix whose second
// letter is not below the first, in lexicographic order.
std::vector<Letters> shard_roots(int genus)
{
    const int letters = 4 * genus;
    std::vector<Letters> roots;
    for (int c = 0; c < letters; ++c)
        for (int d = c; d < letters; ++d)
            if ((c ^ 1) != d)
                roots.push_back({Letter{static_cast<std::uint8_t>(c)}, Letter{static_cast<std::uint8_t>(d)}});
    return roots;
}

} // namespace

void for_each_class(int genus, int max_letters, const std::function<void(const ConjugacyClassKey&)>& visit)
{
    check_genus(genus);
    if (max_letters < 1)
        return;
    for (int c = 0; c < 4 * genus; ++c)
        visit({GroupWord(genus, {Letter{static_cast<std::uint8_t>(c)}})});
    if (max_letters < 2)
        return;
    for (Letters prefix : shard_roots(genus))
        walk(prefix, genus, max_letters, visit);
}

std::vector<ConjugacyClassKey> enumerate_classes(int genus, int max_letters, int threads)
{
    check_genus(genus);
    if (max_letters < 1)
        return {};
    const int letters = 4 * genus;
    // Shard results are concatenated in shard order, so the output does not
    // depend on the worker count.
    const std::vector<Letters> roots = shard_roots(genus);

    std::vector<ConjugacyClassKey> singles;
    for (int c = 0; c < letters; ++c)
        singles.push_back({GroupWord(genus, {Letter{static_cast<std::uint8_t>(c)}})});

    std::vector<std::vector<ConjugacyClassKey>> shards(roots.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t s = next++; s < roots.size(); s = next++) {
            if (max_letters < 2)
                continue;
            Letters prefix = roots[s];
            walk(prefix, genus, max_letters, [&](const ConjugacyClassKey& k) { shards[s].push_back(k); });
        }
    };
    const int n_threads = std::max(1, threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    std::vector<ConjugacyClassKey> out = std::move(singles);
    for (auto& s : shards)
        out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
    return out;
}

std::string to_string(Letter l)
{
    std::string s(1, l.kind() == Kind::Alpha ? (l.is_inverse() ? 'A' : 'a') : (l.is_inverse() ? 'B' : 'b'));
    return s + std::to_string(l.handle());
}

std::string to_string(const GroupWord& w)
{
    if (w.empty())
        return "1";
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i > 0)
            out += ' ';
        out += to_string(w[i]);
    }
    return out;
}

GroupWord parse_word(int genus, std::string_view text)
{
    check_genus(genus);
    std::vector<Letter> letters;
    std::size_t i = 0;
    auto fail = [&](const std::string& why) { throw Error(ErrorKind::ParseError, why + " in '" + std::string(text) + "'"); };
    auto read_int = [&](int& value) {
        std::size_t j = i;
        if (j < text.size() && text[j] == '-')
            ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
            ++j;
        const auto res = std::from_chars(text.data() + i, text.data() + j, value);
        if (res.ec != std::errc() || res.ptr != text.data() + j)
            fail("bad integer");
        i = j;
    };
    while (i < text.size()) {
        const char ch = text[i];
        if (std::isspace(static_cast<unsigned char>(ch)) || ch == '*' || ch == '.') {
            ++i;
            continue;
        }
        if ((ch == '1' || ch == 'e') && letters.empty() &&
            text.find_first_not_of(" \t", i + 1) == std::string_view::npos) {
            ++i;
            continue;
        }
        Kind kind;
        int sign;
        switch (ch) {
        case 'a': kind = Kind::Alpha; sign = 1; break;
        case 'A': kind = Kind::Alpha; sign = -1; break;
        case 'b': kind = Kind::Beta; sign = 1; break;
        case 'B': kind = Kind::Beta; sign = -1; break;
        default: fail(std::string("unexpected character '") + ch + "'");
        }
        ++i;
        int handle = 0;
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
            fail("missing handle index");
        read_int(handle);
        if (handle < 1 || handle > genus)
            fail("handle out of range");
        int exponent = 1;
        if (i < text.size() && text[i] == '^') {
            ++i;
            read_int(exponent);
        }
        const Letter l = Letter::make(handle, kind, exponent < 0 ? -sign : sign);
        for (int k = 0; k < std::abs(exponent); ++k)
            letters.push_back(l);
    }
    return GroupWord(genus, std::move(letters));
}

std::size_t GroupWordHash::operator()(const GroupWord& w) const noexcept
{
    std::size_t h = static_cast<std::size_t>(w.genus()) * 0x9e3779b97f4a7c15ull;
    for (const auto& l : w.letters())
        h = (h ^ l.code) * 0x100000001b3ull;
    return h;
}

} // namespace klein
