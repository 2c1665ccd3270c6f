#pragma once

#include <vector>

namespace aperiodica::kern {

// Every kernel has two implementations sharing one contract: Serial is the
// straightforward reference loop, Parallel partitions the iteration space
// across OpenMP threads. Results are bit-identical by construction (integer
// counts, per-slot writes, max-reductions), so tests compare them directly.
enum class Exec { Serial, Parallel };

// Thread budget for Parallel kernels: APERIODICA_THREADS when set and
// positive, otherwise the OpenMP default.
int thread_count();

// counts[i] = #{x in xs : anchors[i] <= x < anchors[i] + width}; xs sorted.
std::vector<long long> window_counts(const std::vector<double>& xs,
                                     const std::vector<double>& anchors, double width, Exec exec);

// Exact sup over t of #{x in xs : t <= x < t + width} subject to
// [t, t + width) within [lo, hi]. The sup is attained with the window's left
// edge at a point (or flush against the right end), so anchored windows
// suffice; no shift grid is involved.
long long max_window_count(const std::vector<double>& xs, double width, double lo, double hi,
                           Exec exec);

// dev[j-1] = max_{i >= j} |f[i] - f[i-j]| for j = 1..max_shift.
std::vector<double> shift_sup_deviation(const std::vector<double>& f, long long max_shift,
                                        Exec exec);

}  // namespace aperiodica::kern
