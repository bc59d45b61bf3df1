#include "klein/pressure.hpp"

#include "klein/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace klein {

namespace {

bool beyond(double T, double limit)
{
    return T > limit * (1.0 + kCountTolerance);
}

CensusEntry measure(const SurfaceRepresentation& rep, const ConjugacyClassKey& key)
{
    CensusEntry e{key, 0.0, {}};
    const Mat2d m = evaluate(rep, key.normal);
    if (classify(m) == IsometryClass::Loxodromic) {
        e.complex_length = complex_length_sq(m).length;
        e.length = e.complex_length.translation();
    }
    return e;
}

std::string join(const std::vector<std::string>& tags)
{
    std::string out;
    for (const auto& t : tags)
        out += (out.empty() ? "" : "; ") + t;
    return out;
}

} // namespace

std::size_t GeodesicCensus::count_up_to(double T) const
{
    T *= 1.0 + kCountTolerance;
    const auto end = std::upper_bound(entries.begin(), entries.end(), T,
                                      [](double t, const CensusEntry& e) { return t < e.length; });
    return static_cast<std::size_t>(end - entries.begin()) - static_cast<std::size_t>(parabolic);
}

double GeodesicCensus::min_length() const
{
    for (const auto& e : entries)
        if (e.length > 0)
            return e.length;
    return 0.0;
}

GeodesicCensus build_census(const SurfaceRepresentation& rep, int max_letters, int threads)
{
    if (max_letters < 1)
        throw Error(ErrorKind::InvalidInput, "max_letters must be positive");
    GeodesicCensus census;
    census.rep_id = join(rep.metadata);
    census.max_letters = max_letters;
    const auto keys = enumerate_classes(rep.genus, max_letters, threads);
    census.entries.resize(keys.size());

    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < keys.size(); i = next++)
            census.entries[i] = measure(rep, keys[i]);
    };
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(keys.size())));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < workers; ++t)
            pool.emplace_back(work);
    }
    std::stable_sort(census.entries.begin(), census.entries.end(),
                     [](const CensusEntry& x, const CensusEntry& y) { return x.length < y.length; });

    double shell = std::numeric_limits<double>::infinity();
    census.min_generator_length = std::numeric_limits<double>::infinity();
    for (const auto& e : census.entries) {
        if (e.length == 0.0) {
            ++census.parabolic;
            continue;
        }
        const int letters = e.key.normal.size();
        if (letters == max_letters)
            shell = std::min(shell, e.length);
        if (letters == 1)
            census.min_generator_length = std::min(census.min_generator_length, e.length);
    }
    if (!std::isfinite(shell) || !std::isfinite(census.min_generator_length)) {
        census.min_generator_length = std::isfinite(census.min_generator_length) ? census.min_generator_length : 0.0;
        return census; // T_effective stays 0: no usable truncation bound
    }
    census.T_effective = shell;
    census.distortion = (max_letters - 1) * census.min_generator_length / shell;
    return census;
}

void write_census(std::ostream& out, const GeodesicCensus& census)
{
    std::ostringstream line;
    line.precision(17);
    for (const auto& e : census.entries) {
        line.str("");
        line << to_string(e.key.normal) << ' ' << e.length << ' ' << e.complex_length.value.real() << ' '
             << e.complex_length.value.imag() << '\n';
        out << line.str();
    }
}

EntropyEstimate entropy_estimate(const GeodesicCensus& census, const std::vector<double>& grid)
{
    const double lo = census.min_length();
    EntropyEstimate out;
    for (const double T : grid) {
        if (beyond(T, census.T_effective))
            throw Error(ErrorKind::TruncationUnsafe, "T = " + std::to_string(T) + " beyond T_effective = " +
                                                         std::to_string(census.T_effective));
        if (T < lo)
            throw Error(ErrorKind::InvalidInput, "T = " + std::to_string(T) + " below the shortest length");
        const std::size_t n = census.count_up_to(T);
        if (n >= 10) {
            out.grid.push_back(T);
            out.counts.push_back(n);
        }
    }
    const std::size_t m = out.grid.size();
    if (m < 3)
        throw Error(ErrorKind::InsufficientData, std::to_string(m) + " grid points with #R_T >= 10");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = out.grid[i], y = std::log(static_cast<double>(out.counts[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    if (!(denom > 0))
        throw Error(ErrorKind::InsufficientData, "degenerate grid");
    out.h_hat = (m * sxy - sx * sy) / denom;
    out.intercept = (sy - out.h_hat * sx) / m;
    return out;
}

std::vector<double> entropy_grid(const GeodesicCensus& census, int points)
{
    const double hi = census.T_effective;
    const double lo = std::max(census.min_length(), hi / 2);
    std::vector<double> grid;
    if (points < 2 || !(hi > lo))
        return grid;
    for (int i = 0; i < points; ++i)
        grid.push_back(i + 1 == points ? hi : lo + (hi - lo) * i / (points - 1));
    return grid;
}

PressureEstimate pressure_J(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                            const GeodesicCensus& census1, double T, int threads)
{
    if (rho1.genus != rho2.genus)
        throw Error(ErrorKind::InvalidInput, "genus mismatch");
    if (beyond(T, census1.T_effective))
        throw Error(ErrorKind::TruncationUnsafe,
                    "T = " + std::to_string(T) + " beyond T_effective = " + std::to_string(census1.T_effective));
    const GeodesicCensus census2 = build_census(rho2, census1.max_letters, threads);
    std::unordered_map<GroupWord, double, GroupWordHash> length2;
    length2.reserve(census2.entries.size());
    for (const auto& e : census2.entries)
        length2.emplace(e.key.normal, e.length);

    PressureEstimate out;
    out.T = T;
    out.census1_size = census1.entries.size();
    out.census2_size = census2.entries.size();
    double sum = 0.0;
    for (const auto& e : census1.entries) {
        if (beyond(e.length, T))
            break;
        if (e.length == 0.0) {
            ++out.parabolic_excluded;
            continue;
        }
        const auto it = length2.find(e.key.normal);
        const double l2 = it == length2.end() ? measure(rho2, e.key).length : it->second;
        if (l2 == 0.0)
            throw Error(ErrorKind::ParabolicClassInRange, to_string(e.key.normal));
        sum += l2 / e.length;
        ++out.classes_used;
    }
    if (out.classes_used == 0)
        throw Error(ErrorKind::InsufficientData, "no class with length <= T");
    out.L_hat = sum / static_cast<double>(out.classes_used);
    out.h1_hat = entropy_estimate(census1, entropy_grid(census1)).h_hat;
    out.h2_hat = entropy_estimate(census2, entropy_grid(census2)).h_hat;
    out.J_hat = (out.h2_hat / out.h1_hat) * out.L_hat;
    return out;
}

} // namespace klein
