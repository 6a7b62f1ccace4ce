#pragma once

#include <vector>

#include "aoa/array_model.hpp"
#include "aoa/covariance.hpp"
#include "aoa/matrix.hpp"

namespace aoa {

struct Eigendecomposition {
    std::vector<double> eigenvalues; // ascending
    CxMatrix eigenvectors;           // unitary columns, aligned with eigenvalues
};

// Cyclic Jacobi on the symmetrized input; M is tiny here so robustness wins
// over speed.
Eigendecomposition eigendecompose_hermitian(const CxMatrix& r);

struct MusicSpectrum {
    std::vector<double> grid_deg;
    std::vector<double> power; // strictly positive
    int assumed_sources = 1;
};

// P(theta) = 1 / (a^H Qn Qn^H a) with Qn spanning the M-L smallest
// eigenvectors.
MusicSpectrum music_spectrum(const CxMatrix& r, int num_sources,
                             const std::vector<double>& grid_deg, const ArrayConfig& config);

struct MusicEstimate {
    std::vector<double> angles_deg; // ascending, length = num_sources
    bool ambiguous = false;         // fewer peaks than requested sources
};

// Peaks of the spectrum on a uniform grid, refined by quadratic
// interpolation of the null spectrum around each peak. Reliable inside
// roughly (-45, 45) degrees for a 4-element array; towards endfire the
// widening beam makes low-SNR estimates collapse, which is the regime the
// learned models are meant to cover.
MusicEstimate estimate_aoa_music(const CxMatrix& r, int num_sources, const ArrayConfig& config,
                                 double grid_step_deg = 0.1);
MusicEstimate estimate_aoa_music(const CovarianceStack& stack, int num_sources,
                                 const ArrayConfig& config, double grid_step_deg = 0.1);
MusicEstimate estimate_aoa_music(const IQFrame& frame, int num_sources,
                                 double grid_step_deg = 0.1);

} // namespace aoa
