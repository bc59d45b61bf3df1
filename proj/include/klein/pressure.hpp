#pragma once

#include "klein/moebius.hpp"
#include "klein/reps.hpp"
#include "klein/words.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace klein {

// Length comparisons against a truncation T are relative at this
// tolerance: spectra with exact multiplicities (polygon groups) put whole
// clusters of equal lengths at the natural grid points, and counts must not
// depend on rounding.
inline constexpr double kCountTolerance = 1e-9;

struct CensusEntry {
    ConjugacyClassKey key;
    double length = 0.0; // 0 for classes whose image is not loxodromic
    ComplexLengthd complex_length;
};

// Every conjugacy class with a representative of at most max_letters
// letters, with its length. Entries are sorted by length (ties keep the
// enumeration order).
struct GeodesicCensus {
    std::string rep_id;
    int max_letters = 0;
    std::vector<CensusEntry> entries;
    int parabolic = 0; // entries recorded with length 0
    // Heuristic completeness bound: classes with length <= T_effective are
    // expected to have a representative within max_letters. It equals
    // (max_letters - 1) * min_generator_length / distortion, where the
    // distortion is measured on the outermost shell of the census
    // (representatives of exactly max_letters letters), so T_effective is
    // the shortest length found on that shell.
    double T_effective = 0.0;
    double min_generator_length = 0.0;
    double distortion = 0.0;

    // #R_T: loxodromic entries with length <= T (1 + kCountTolerance).
    std::size_t count_up_to(double T) const;
    double min_length() const; // shortest loxodromic entry
};

GeodesicCensus build_census(const SurfaceRepresentation& rep, int max_letters, int threads = 1);

// One "key length re im" line per entry, 17 significant digits, in census
// order.
void write_census(std::ostream& out, const GeodesicCensus& census);

struct EntropyEstimate {
    double h_hat = 0.0;
    double intercept = 0.0;
    std::vector<double> grid;         // T values used in the fit
    std::vector<std::size_t> counts;  // #R_T at each grid point
};

// Least-squares slope of log #R_T against T over the grid points with
// #R_T >= 10. Throws TruncationUnsafe for grid points beyond T_effective,
// InvalidInput below the shortest length, InsufficientData if fewer than
// three usable points remain.
EntropyEstimate entropy_estimate(const GeodesicCensus& census, const std::vector<double>& grid);

// `points` equally spaced values from max(shortest length, T_effective / 2)
// to T_effective.
std::vector<double> entropy_grid(const GeodesicCensus& census, int points = 12);

struct PressureEstimate {
    double L_hat = 0.0;
    double h1_hat = 0.0, h2_hat = 0.0;
    double J_hat = 0.0; // (h2_hat / h1_hat) * L_hat
    double T = 0.0;
    std::size_t classes_used = 0;       // #R_T for rho1, parabolic classes excluded
    std::size_t parabolic_excluded = 0; // rho1-parabolic classes skipped
    std::size_t census1_size = 0, census2_size = 0;
};

// Truncated length-ratio average and renormalized pressure intersection.
// The census of rho2 is built at census1's word-length cutoff; the entropies
// use entropy_grid of each census. Throws TruncationUnsafe (T beyond
// census1.T_effective) and ParabolicClassInRange (a class with rho1-length
// in (0, T] is not loxodromic under rho2).
PressureEstimate pressure_J(const SurfaceRepresentation& rho1, const SurfaceRepresentation& rho2,
                            const GeodesicCensus& census1, double T, int threads = 1);

} // namespace klein
