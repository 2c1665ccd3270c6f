#include "aperiodica/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aperiodica::kern {

int thread_count() {
    static int cached = [] {
        if (const char* env = std::getenv("APERIODICA_THREADS")) {
            int v = std::atoi(env);
            if (v > 0) return v;
        }
#ifdef _OPENMP
        return omp_get_max_threads();
#else
        return 1;
#endif
    }();
    return cached;
}

namespace {

long long count_in(const std::vector<double>& xs, double lo, double hi) {
    auto a = std::lower_bound(xs.begin(), xs.end(), lo);
    auto b = std::lower_bound(xs.begin(), xs.end(), hi);
    return b - a;
}

}  // namespace

std::vector<long long> window_counts(const std::vector<double>& xs,
                                     const std::vector<double>& anchors, double width, Exec exec) {
    std::vector<long long> counts(anchors.size(), 0);
    if (exec == Exec::Serial) {
        // reference: plain scan per anchor
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            long long c = 0;
            for (double x : xs)
                if (x >= anchors[i] && x < anchors[i] + width) ++c;
            counts[i] = c;
        }
        return counts;
    }
    const long long n = static_cast<long long>(anchors.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_count())
#endif
    for (long long i = 0; i < n; ++i)
        counts[i] = count_in(xs, anchors[i], anchors[i] + width);
    return counts;
}

long long max_window_count(const std::vector<double>& xs, double width, double lo, double hi,
                           Exec exec) {
    if (width <= 0) throw std::invalid_argument("max_window_count: width must be positive");
    if (hi - lo < width) throw std::invalid_argument("max_window_count: window wider than range");
    std::vector<double> anchors;
    anchors.reserve(xs.size() + 1);
    for (double x : xs)
        if (x >= lo && x + width <= hi) anchors.push_back(x);
    anchors.push_back(hi - width);

    long long best = 0;
    if (exec == Exec::Serial) {
        // reference: two-pointer sweep over the sorted points
        for (double a : anchors) {
            auto first = std::lower_bound(xs.begin(), xs.end(), a);
            long long c = 0;
            for (auto it = first; it != xs.end() && *it < a + width; ++it) ++c;
            best = std::max(best, c);
        }
        return best;
    }
    const long long n = static_cast<long long>(anchors.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : best) num_threads(thread_count())
#endif
    for (long long i = 0; i < n; ++i)
        best = std::max(best, count_in(xs, anchors[i], anchors[i] + width));
    return best;
}

std::vector<double> shift_sup_deviation(const std::vector<double>& f, long long max_shift,
                                        Exec exec) {
    const long long s = static_cast<long long>(f.size());
    if (max_shift >= s)
        throw std::invalid_argument("shift_sup_deviation: shift exceeds sample count");
    std::vector<double> dev(static_cast<std::size_t>(max_shift), 0.0);
    if (exec == Exec::Serial) {
        for (long long j = 1; j <= max_shift; ++j) {
            double worst = 0.0;
            for (long long i = j; i < s; ++i)
                worst = std::max(worst, std::abs(f[i] - f[i - j]));
            dev[j - 1] = worst;
        }
        return dev;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
#endif
    for (long long j = 1; j <= max_shift; ++j) {
        double worst = 0.0;
        for (long long i = j; i < s; ++i)
            worst = std::max(worst, std::abs(f[i] - f[i - j]));
        dev[j - 1] = worst;
    }
    return dev;
}

}  // namespace aperiodica::kern
