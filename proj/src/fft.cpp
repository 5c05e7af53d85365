#include "qkr/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace qkr {
namespace {

struct PlanSet {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    fftw_complex* buf = nullptr;
    int alignment = 0;
    int n = 0;
};

std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

std::map<int, PlanSet>& cache() {
    static std::map<int, PlanSet> c;
    return c;
}

// FFTW_ESTIMATE keeps plan selection deterministic (FFTW_MEASURE picks by
// timing, which can change the floating-point evaluation order between
// runs). In-place plans on an fftw_malloc'd scratch buffer; execution on
// caller memory goes through the new-array interface when the alignment
// matches, otherwise through the scratch buffer.
PlanSet& plans_for(int n) {
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto& c = cache();
    auto it = c.find(n);
    if (it != c.end()) return it->second;

    PlanSet p;
    p.n = n;
    p.buf = fftw_alloc_complex(static_cast<size_t>(n));
    if (!p.buf) throw std::runtime_error("fft: allocation failed for n=" + std::to_string(n));
    p.fwd = fftw_plan_dft_1d(n, p.buf, p.buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_1d(n, p.buf, p.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!p.fwd || !p.bwd) throw std::runtime_error("fft: plan creation failed for n=" + std::to_string(n));
    p.alignment = fftw_alignment_of(reinterpret_cast<double*>(p.buf));
    return c.emplace(n, p).first->second;
}

void execute(Eigen::VectorXcd& x, bool forward) {
    const int n = static_cast<int>(x.size());
    if (n < 1) throw std::invalid_argument("fft: empty vector");
    PlanSet& p = plans_for(n);
    const fftw_plan plan = forward ? p.fwd : p.bwd;

    auto* data = reinterpret_cast<fftw_complex*>(x.data());
    if (fftw_alignment_of(reinterpret_cast<double*>(data)) == p.alignment) {
        fftw_execute_dft(plan, data, data);
    } else {
        // Rare fallback; the scratch buffer is shared, so serialize.
        std::lock_guard<std::mutex> lock(cache_mutex());
        std::memcpy(p.buf, data, sizeof(fftw_complex) * static_cast<size_t>(n));
        fftw_execute(plan);
        std::memcpy(data, p.buf, sizeof(fftw_complex) * static_cast<size_t>(n));
    }
    x *= 1.0 / std::sqrt(static_cast<double>(n));
}

}  // namespace

void dft_forward(Eigen::VectorXcd& x) { execute(x, true); }
void dft_backward(Eigen::VectorXcd& x) { execute(x, false); }
void dft_warmup(int n) { plans_for(n); }

}  // namespace qkr
