#pragma once
// Internal plumbing shared by the summary-level and survival OC engines:
// per-method accumulators and the deterministic chunked parallel reduction.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "hybrid/oc.hpp"

namespace hybrid::detail {

constexpr long kChunkSize = 4096;

struct Accum {
    long rejects = 0;
    long borrows = 0;
    long failed = 0;
    double sum_est = 0.0;
    double sum_est_sq = 0.0;
    double sum_alpha0 = 0.0;

    void add(bool reject, bool borrowed, double estimate, double alpha0) {
        rejects += reject;
        borrows += borrowed;
        sum_est += estimate;
        sum_est_sq += estimate * estimate;
        sum_alpha0 += alpha0;
    }
    void merge(const Accum& other) {
        rejects += other.rejects;
        borrows += other.borrows;
        failed += other.failed;
        sum_est += other.sum_est;
        sum_est_sq += other.sum_est_sq;
        sum_alpha0 += other.sum_alpha0;
    }
};

// Runs body(rep_lo, rep_hi, accumulators-for-chunk) over fixed-size chunks,
// possibly on several threads, then folds the per-chunk partials in chunk-id
// order so the totals are bit-identical for any worker count.
template <class Body>
std::vector<Accum> run_chunked(long n_reps, int n_methods, int threads, Body&& body) {
    const long n_chunks = (n_reps + kChunkSize - 1) / kChunkSize;
    std::vector<std::vector<Accum>> partials(n_chunks, std::vector<Accum>(n_methods));

    auto do_chunk = [&](long chunk) {
        const long lo = chunk * kChunkSize;
        const long hi = std::min(n_reps, lo + kChunkSize);
        body(lo, hi, partials[chunk]);
    };

    threads = std::max(1, threads);
    if (threads == 1 || n_chunks == 1) {
        for (long c = 0; c < n_chunks; ++c) do_chunk(c);
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        const int workers = static_cast<int>(std::min<long>(threads, n_chunks));
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const long c = next.fetch_add(1);
                    if (c >= n_chunks) return;
                    do_chunk(c);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<Accum> total(n_methods);
    for (long c = 0; c < n_chunks; ++c)
        for (int m = 0; m < n_methods; ++m) total[m].merge(partials[c][m]);
    return total;
}

inline OCResult make_result(Method method, const Accum& a, long n_reps_requested,
                            double Delta, std::uint64_t seed) {
    OCResult r;
    r.method = method;
    r.seed = seed;
    const long n = n_reps_requested - a.failed;
    r.n_reps = n;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (n <= 1) {
        r.reject_rate = r.borrow_rate = r.bias = r.mean_alpha0 = nan;
        r.mc_se_reject = r.mc_se_bias = nan;
        return r;
    }
    const double dn = static_cast<double>(n);
    const double p = a.rejects / dn;
    r.reject_rate = p;
    r.borrow_rate = a.borrows / dn;
    r.bias = a.sum_est / dn - Delta;
    r.mc_se_reject = std::sqrt(p * (1.0 - p) / dn);
    const double var_est = std::max(0.0, (a.sum_est_sq - a.sum_est * a.sum_est / dn) / (dn - 1.0));
    r.mc_se_bias = std::sqrt(var_est / dn);
    r.mean_alpha0 = method == Method::PowerPrior ? a.sum_alpha0 / dn : nan;
    return r;
}

}  // namespace hybrid::detail
