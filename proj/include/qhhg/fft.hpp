#pragma once

#include <fftw3.h>

#include <array>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "qhhg/common.hpp"

namespace qhhg {

/// Thin RAII wrapper around FFTW complex transforms of rank 1..3.
///
/// Plans are created with FFTW_ESTIMATE so the algorithm choice depends only
/// on the shape, which keeps repeated runs bit-identical, and with
/// FFTW_UNALIGNED so one plan serves any buffer of the right shape.
/// Transforms are unnormalized; backward() folds in the 1/N factor.
class FourierTransformer {
  public:
    explicit FourierTransformer(std::span<const int> dims) {
        if (dims.empty() || dims.size() > 3)
            throw shape_error("transform rank must be 1..3");
        size_ = 1;
        for (int n : dims) {
            if (n < 2) throw shape_error("transform dimension must be >= 2");
            dims_.push_back(n);
            size_ *= static_cast<std::size_t>(n);
        }
        std::vector<cdouble> scratch(size_);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        std::lock_guard<std::mutex> lock(plan_mutex());
        fwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), p, p,
                             FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), p, p,
                             FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (fwd_ == nullptr || bwd_ == nullptr)
            throw numerical_error("fftw plan creation failed");
    }

    FourierTransformer(const FourierTransformer&) = delete;
    FourierTransformer& operator=(const FourierTransformer&) = delete;

    FourierTransformer(FourierTransformer&& other) noexcept
        : fwd_(other.fwd_), bwd_(other.bwd_), dims_(std::move(other.dims_)), size_(other.size_) {
        other.fwd_ = nullptr;
        other.bwd_ = nullptr;
    }
    FourierTransformer& operator=(FourierTransformer&& other) noexcept {
        if (this != &other) {
            destroy();
            fwd_ = other.fwd_;
            bwd_ = other.bwd_;
            dims_ = std::move(other.dims_);
            size_ = other.size_;
            other.fwd_ = nullptr;
            other.bwd_ = nullptr;
        }
        return *this;
    }

    ~FourierTransformer() { destroy(); }

    std::size_t size() const { return size_; }
    std::span<const int> dims() const { return dims_; }

    void forward(cdouble* data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(fwd_, p, p);
    }

    /// Inverse transform including the 1/N normalization.
    void backward(cdouble* data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(bwd_, p, p);
        const double scale = 1.0 / static_cast<double>(size_);
        for (std::size_t i = 0; i < size_; ++i) data[i] *= scale;
    }

    /// Inverse transform without the 1/N factor (caller folds it elsewhere).
    void backward_unnormalized(cdouble* data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(bwd_, p, p);
    }

  private:
    void destroy() {
        if (fwd_ != nullptr || bwd_ != nullptr) {
            std::lock_guard<std::mutex> lock(plan_mutex());
            if (fwd_ != nullptr) fftw_destroy_plan(fwd_);
            if (bwd_ != nullptr) fftw_destroy_plan(bwd_);
        }
        fwd_ = nullptr;
        bwd_ = nullptr;
    }

    // fftw planning is not thread-safe; execution on distinct plans is.
    static std::mutex& plan_mutex() {
        static std::mutex m;
        return m;
    }

    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
    std::vector<int> dims_;
    std::size_t size_ = 0;
};

}  // namespace qhhg
