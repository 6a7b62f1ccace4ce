#include "aoa/music.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "aoa/parallel.hpp"

namespace aoa {

namespace {

CxMatrix matmul(const CxMatrix& a, const CxMatrix& b) {
    CxMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CxMatrix adjoint(const CxMatrix& a) {
    CxMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
    return t;
}

double off_diagonal_norm(const CxMatrix& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) acc += std::norm(a(i, j));
    return std::sqrt(acc);
}

double frobenius(const CxMatrix& a) {
    double acc = 0.0;
    for (const cplx& v : a.values()) acc += std::norm(v);
    return std::sqrt(acc);
}

} // namespace

Eigendecomposition eigendecompose_hermitian(const CxMatrix& r) {
    const std::size_t m = r.rows();
    if (m == 0 || r.cols() != m) throw std::invalid_argument("eigendecomposition needs a square matrix");
    for (const cplx& v : r.values())
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("matrix has non-finite entries");

    // symmetrize first; sample covariances are Hermitian only up to rounding
    CxMatrix a(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) = 0.5 * (r(i, j) + std::conj(r(j, i)));

    CxMatrix v = CxMatrix::identity(m);
    const double tol = 1e-15 * (1.0 + frobenius(a));
    for (int sweep = 0; sweep < 100 && off_diagonal_norm(a) > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                const cplx apq = a(p, q);
                if (std::abs(apq) <= tol * 1e-2) continue;
                // phase factor reduces the (p,q) block to a real symmetric
                // rotation problem
                const double phi = std::arg(apq);
                const double theta =
                    0.5 * std::atan2(2.0 * std::abs(apq), a(q, q).real() - a(p, p).real());
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                CxMatrix j = CxMatrix::identity(m);
                j(p, p) = c;
                j(p, q) = s;
                j(q, p) = -s * std::polar(1.0, -phi);
                j(q, q) = c * std::polar(1.0, -phi);
                a = matmul(adjoint(j), matmul(a, j));
                v = matmul(v, j);
            }
        }
    }

    Eigendecomposition eig;
    eig.eigenvalues.resize(m);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
    eig.eigenvectors = CxMatrix(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        eig.eigenvalues[j] = a(order[j], order[j]).real();
        for (std::size_t i = 0; i < m; ++i) eig.eigenvectors(i, j) = v(i, order[j]);
    }
    return eig;
}

MusicSpectrum music_spectrum(const CxMatrix& r, int num_sources,
                             const std::vector<double>& grid_deg, const ArrayConfig& config) {
    config.validate();
    const int m = config.num_elements;
    if (num_sources < 1 || num_sources >= m)
        throw std::invalid_argument("number of sources must satisfy 1 <= L < M");
    if (grid_deg.empty()) throw std::invalid_argument("scan grid must be non-empty");
    if (r.rows() != static_cast<std::size_t>(m) || r.cols() != static_cast<std::size_t>(m))
        throw std::invalid_argument("covariance size does not match the array config");

    const Eigendecomposition eig = eigendecompose_hermitian(r);
    const std::size_t noise_dim = static_cast<std::size_t>(m - num_sources);

    MusicSpectrum spec;
    spec.grid_deg = grid_deg;
    spec.assumed_sources = num_sources;
    spec.power.assign(grid_deg.size(), 0.0);
    par::parallel_for(static_cast<std::int64_t>(grid_deg.size()), [&](std::int64_t g) {
        const SteeringVector a = steering_vector(grid_deg[static_cast<std::size_t>(g)], config);
        double denom = 0.0;
        for (std::size_t k = 0; k < noise_dim; ++k) {
            cplx dot = 0.0;
            for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i)
                dot += std::conj(a.elements[i]) * eig.eigenvectors(i, k);
            denom += std::norm(dot);
        }
        spec.power[static_cast<std::size_t>(g)] = 1.0 / std::max(denom, 1e-300);
    });
    return spec;
}

namespace {

struct Peak {
    std::size_t index;
    double power;
};

} // namespace

MusicEstimate estimate_aoa_music(const CxMatrix& r, int num_sources, const ArrayConfig& config,
                                 double grid_step_deg) {
    if (grid_step_deg <= 0.0) throw std::invalid_argument("grid step must be positive");
    std::vector<double> grid;
    for (double a = -90.0; a <= 90.0 + 1e-9; a += grid_step_deg) grid.push_back(std::min(a, 90.0));
    const MusicSpectrum spec = music_spectrum(r, num_sources, grid, config);

    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        if (spec.power[i] > spec.power[i - 1] && spec.power[i] > spec.power[i + 1])
            peaks.push_back({i, spec.power[i]});
    std::sort(peaks.begin(), peaks.end(), [&](const Peak& a, const Peak& b) {
        if (a.power != b.power) return a.power > b.power;
        return grid[a.index] < grid[b.index];
    });

    MusicEstimate est;
    const std::size_t want = static_cast<std::size_t>(num_sources);
    if (peaks.size() < want) {
        est.ambiguous = true;
        const std::size_t global =
            static_cast<std::size_t>(std::max_element(spec.power.begin(), spec.power.end()) -
                                     spec.power.begin());
        while (peaks.size() < want) peaks.push_back({global, spec.power[global]});
    }

    for (std::size_t k = 0; k < want; ++k) {
        const std::size_t i = peaks[k].index;
        double angle = grid[i];
        if (i > 0 && i + 1 < grid.size()) {
            // parabola through the null spectrum, which stays smooth where
            // the power spectrum spikes
            const double dm = 1.0 / spec.power[i - 1];
            const double d0 = 1.0 / spec.power[i];
            const double dp = 1.0 / spec.power[i + 1];
            const double denom = dm - 2.0 * d0 + dp;
            if (denom > 0.0) {
                double delta = 0.5 * (dm - dp) / denom;
                delta = std::clamp(delta, -1.0, 1.0);
                angle += delta * grid_step_deg;
            }
        }
        est.angles_deg.push_back(angle);
    }
    std::sort(est.angles_deg.begin(), est.angles_deg.end());
    return est;
}

MusicEstimate estimate_aoa_music(const CovarianceStack& stack, int num_sources,
                                 const ArrayConfig& config, double grid_step_deg) {
    return estimate_aoa_music(average_covariance(stack), num_sources, config, grid_step_deg);
}

MusicEstimate estimate_aoa_music(const IQFrame& frame, int num_sources, double grid_step_deg) {
    const std::size_t window = frame.num_samples() / kDefaultWindowCount;
    const CovarianceStack stack = stack_covariances(frame, window, kDefaultWindowCount);
    return estimate_aoa_music(stack, num_sources, frame.config, grid_step_deg);
}

} // namespace aoa
