#pragma once

#include <cstdint>
#include <string>

#include "ncce/rng.hpp"
#include "ncce/types.hpp"

namespace ncce {

/// RSS (magnitude-squared) observations of one beacon burst.
struct RssMeasurements {
    VecR values;                // length M, each >= 0
    double noise_variance = 0.0;
};

/// Complex (coherent) observations; baseline comparisons only.
struct CoherentMeasurements {
    VecC values; // length M
};

/// The physically applied quantized beacon matrix together with its virtual
/// decomposition A_final ~= A_PR * A_CS. Neither factor is applied in
/// hardware; A_PR drives phase retrieval, A_CS drives compressive estimation.
struct SensingEnsemble {
    MatC a_final;                 // M x N, entries in {1, -1, j, -j}
    MatC a_cs;                    // M_CS x N
    MatC a_pr;                    // M x M_CS
    double mismatch_fro_rel = 0.0; // ||A_PR*A_CS - A_final||_F / ||A_final||_F
    std::uint64_t seed = 0;

    int m() const { return static_cast<int>(a_final.rows()); }
    int m_cs() const { return static_cast<int>(a_cs.rows()); }
    int n() const { return static_cast<int>(a_final.cols()); }
};

/// Nearest element of {1, j, -1, -j} by phase; ties go to the candidate with
/// the smaller phase angle (measured in [0, 2*pi)); zero maps to 1.
cplx quantize_to_alphabet(cplx v);

MatC quantize_matrix(const MatC& a);

/// True iff v is exactly one of {1, -1, j, -j}.
bool in_alphabet(cplx v);

/// i.i.d. entries uniform over {1, -1, j, -j}.
MatC sample_quantized_matrix(int m, int n, Rng& rng);

/// i.i.d. CN(0, 1/n) entries (per-component variance 1/(2n)), so rows have
/// expected squared norm 1.
MatC sample_gaussian_matrix(int m_cs, int n, Rng& rng);

/// A_CS^+ = A_CS^H (A_CS A_CS^H)^{-1} via Cholesky of the small Gram system.
/// Throws DegenerateMatrixError when the Gram matrix condition number
/// exceeds 1e12.
MatC row_pseudoinverse(const MatC& a_cs);

/// Full generation pipeline: draw A over the alphabet, draw A_CS Gaussian,
/// set A_PR = A * A_CS^+, requantize A_PR * A_CS entrywise, and record the
/// relative Frobenius mismatch. Requires 2*m_cs <= m and m_cs <= n.
SensingEnsemble build_ensemble(int m, int m_cs, int n, std::uint64_t seed);

/// y_b = (row_b a) . h + CN(0, noise_std^2) noise.
CoherentMeasurements measure_coherent(const MatC& a, const VecC& h,
                                      double noise_std, Rng& rng);

/// y_b = |(row_b a) . h + n_b|^2 with pre-detection noise n_b ~ CN(0, noise_std^2).
RssMeasurements measure_rss(const MatC& a, const VecC& h, double noise_std,
                            Rng& rng);

/// Sidecar serialization for experiment reproducibility. The alphabet matrix
/// is stored as 2-bit codes 0..3 meaning {1, j, -1, -j}; complex matrices as
/// row-major [re, im] pairs.
void save_ensemble_json(const std::string& path, const SensingEnsemble& e);
SensingEnsemble load_ensemble_json(const std::string& path);

} // namespace ncce
