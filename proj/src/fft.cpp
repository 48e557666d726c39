#include "fft.hpp"

#include <cstring>
#include <map>
#include <mutex>

#include <fftw3.h>

namespace foliage::detail {

namespace {

std::mutex plan_mutex;
std::map<std::size_t, fftw_plan>& plan_cache() {
    static std::map<std::size_t, fftw_plan> cache;
    return cache;
}

fftw_plan plan_for(std::size_t n, fftw_complex* in, fftw_complex* out) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
    cache.emplace(n, plan);
    return plan;
}

} // namespace

void ifft_unnormalized(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
    // Scratch buffers come from fftw_malloc so their alignment matches the
    // cached plan no matter what the caller hands us.
    auto* buf_in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    auto* buf_out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    std::memcpy(buf_in, static_cast<const void*>(in), sizeof(fftw_complex) * n);

    fftw_plan plan = plan_for(n, buf_in, buf_out);
    fftw_execute_dft(plan, buf_in, buf_out);

    std::memcpy(static_cast<void*>(out), buf_out, sizeof(fftw_complex) * n);
    fftw_free(buf_in);
    fftw_free(buf_out);
}

} // namespace foliage::detail
