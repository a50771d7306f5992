#pragma once
// Thin FFTW wrapper: cached unaligned plans for (possibly strided, batched)
// complex transforms, plus a Bluestein chirp-z evaluator of the trigonometric
// interpolant used for band-limited resampling.

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "core.hpp"

namespace gkp::fft {

namespace detail {
// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays (fftw_execute_dft) is.
struct PlanCache {
    std::mutex mu;
    std::map<std::tuple<int, int, int, int, int>, fftw_plan> plans;
    ~PlanCache() {
        for (auto& [k, p] : plans) fftw_destroy_plan(p);
    }
};
inline PlanCache& cache() {
    static PlanCache c;
    return c;
}

inline fftw_plan plan_for(int n, int howmany, int stride, int dist, int sign) {
    auto& c = cache();
    std::lock_guard lock(c.mu);
    auto key = std::make_tuple(n, howmany, stride, dist, sign);
    auto it = c.plans.find(key);
    if (it != c.plans.end()) return it->second;
    std::size_t span = static_cast<std::size_t>(stride) * (n - 1) + static_cast<std::size_t>(dist) * (howmany - 1) + 1;
    auto* buf = fftw_alloc_complex(span);
    fftw_plan p = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, stride, dist, buf, nullptr, stride, dist, sign,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    require(p != nullptr, ErrorKind::numeric, "FFTW failed to create a plan");
    c.plans.emplace(key, p);
    return p;
}
}  // namespace detail

// In-place unnormalised transform, sign = FFTW_FORWARD (-1) or FFTW_BACKWARD (+1).
inline void transform(cplx* data, int n, int sign, int howmany = 1, int stride = 1, int dist = 0) {
    if (dist == 0) dist = n;
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(detail::plan_for(n, howmany, stride, dist, sign), d, d);
}

inline void forward(std::vector<cplx>& v) { transform(v.data(), static_cast<int>(v.size()), FFTW_FORWARD); }
inline void backward(std::vector<cplx>& v) { transform(v.data(), static_cast<int>(v.size()), FFTW_BACKWARD); }

// Signed frequency index k' in [-n/2, n/2) of DFT bin k.
inline int signed_index(int k, int n) { return k < n / 2 ? k : k - n; }

inline bool is_pow2(long n) { return n > 0 && (n & (n - 1)) == 0; }

inline long next_pow2(long n) {
    long p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Chirp-z evaluation at a non-unit frequency scale lambda:
//   out[j] = sum_u A[u] * exp(2*pi*i*lambda*(u - n/2)*j / n),   j = 0..n-1,
// where A[u] holds the coefficient of signed frequency u - n/2. Bluestein's
// identity k*j = (k^2 + j^2 - (k-j)^2)/2 turns this into one convolution.
inline std::vector<cplx> chirp_z(const std::vector<cplx>& A, double lambda) {
    const long n = static_cast<long>(A.size());
    const long M = 4 * n;
    const long half = n / 2;
    // exp(-i*pi*lambda*m^2/n), phase reduced modulo 2 in long double.
    auto chirp = [&](long m, double sgn) {
        long double t = static_cast<long double>(lambda) * static_cast<long double>(m) * static_cast<long double>(m) /
                        static_cast<long double>(n);
        t = std::fmod(t, 2.0L);
        double ph = sgn * pi * static_cast<double>(t);
        return cplx(std::cos(ph), std::sin(ph));
    };
    std::vector<cplx> a(M, 0.0), b(M, 0.0);
    for (long u = 0; u < n; ++u) a[u] = A[u] * chirp(u - half, +1.0);
    for (long m = -half + 1; m <= 3 * half - 1; ++m) b[(m % M + M) % M] = chirp(m, -1.0);
    transform(a.data(), static_cast<int>(M), FFTW_FORWARD);
    transform(b.data(), static_cast<int>(M), FFTW_FORWARD);
    for (long i = 0; i < M; ++i) a[i] *= b[i];
    transform(a.data(), static_cast<int>(M), FFTW_BACKWARD);
    std::vector<cplx> out(n);
    for (long j = 0; j < n; ++j) out[j] = chirp(j, +1.0) * a[j + half] / static_cast<double>(M);
    return out;
}

}  // namespace gkp::fft
