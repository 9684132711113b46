#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nsmild {

/// Uniform n x n grid on the unit torus R^2/Z^2.
///
/// Physical sample (i, j) sits at x = (i/n, j/n); arrays are row-major with
/// flat index i*n + j.  Spectral arrays use the same layout in FFT order, so
/// index i carries wavenumber i for i < n/2 and i - n otherwise.  The
/// wavenumber -n/2 is the Nyquist mode.
class TorusGrid {
public:
    explicit TorusGrid(int n) : n_(n) {
        if (n < 4 || n % 2 != 0) {
            throw std::invalid_argument("TorusGrid: n must be even and >= 4, got " +
                                        std::to_string(n));
        }
    }

    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
    double cell_measure() const noexcept { return 1.0 / (static_cast<double>(n_) * n_); }
    double spacing() const noexcept { return 1.0 / n_; }

    /// Wavenumber carried by FFT index i along one axis.
    int freq(int i) const noexcept { return i < n_ / 2 ? i : i - n_; }
    /// FFT index of wavenumber k (k taken mod n).
    int index_of(int k) const noexcept { return ((k % n_) + n_) % n_; }
    bool is_nyquist(int i) const noexcept { return i == n_ / 2; }

    std::size_t flat(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * n_ + j;
    }
    /// Flat index of the mode -k for the mode stored at (i, j).
    std::size_t conjugate_flat(int i, int j) const noexcept {
        return flat((n_ - i) % n_, (n_ - j) % n_);
    }

    friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

private:
    int n_;
};

inline void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* what) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string(what) + ": grid mismatch (" +
                                    std::to_string(a.n()) + " vs " + std::to_string(b.n()) +
                                    ")");
    }
}

}  // namespace nsmild
