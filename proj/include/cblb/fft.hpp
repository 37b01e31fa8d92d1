#ifndef CBLB_FFT_HPP
#define CBLB_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "cblb/grid.hpp"

namespace cblb {
namespace detail {

/// Cached forward/backward c2c plans per grid size. Plan creation is guarded by
/// a mutex (FFTW planning is not thread-safe); execution via fftw_execute_dft
/// on caller-owned arrays is reentrant.
class FftPlans {
public:
    static FftPlans& get(int nx, int ny, int nz) {
        static std::mutex mtx;
        static std::map<std::tuple<int, int, int>, FftPlans> cache;
        std::lock_guard<std::mutex> lock(mtx);
        auto key = std::make_tuple(nx, ny, nz);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, FftPlans(nx, ny, nz)).first;
        return it->second;
    }

    void forward(std::complex<double>* data) const {
        fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(data),
                         reinterpret_cast<fftw_complex*>(data));
    }
    void backward(std::complex<double>* data) const {
        fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(data),
                         reinterpret_cast<fftw_complex*>(data));
    }

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;
    FftPlans(FftPlans&& o) noexcept : fwd_(o.fwd_), bwd_(o.bwd_) {
        o.fwd_ = nullptr;
        o.bwd_ = nullptr;
    }

    ~FftPlans() {
        if (fwd_) fftw_destroy_plan(fwd_);
        if (bwd_) fftw_destroy_plan(bwd_);
    }

private:
    FftPlans(int nx, int ny, int nz) {
        std::vector<std::complex<double>> buf(std::size_t(nx) * ny * nz);
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        fwd_ = fftw_plan_dft_3d(nx, ny, nz, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_3d(nx, ny, nz, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

}  // namespace detail
}  // namespace cblb

#endif
