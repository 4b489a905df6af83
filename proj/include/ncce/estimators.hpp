#pragma once

#include "ncce/nomp.hpp"
#include "ncce/sensing.hpp"

namespace ncce {

/// Two-stage noncoherent estimator: Wirtinger Flow recovers the auxiliary
/// vector y_CS from RSS, then NOMP extracts paths against the A_CS
/// dictionary. The stage-1 global phase is absorbed into the amplitudes.
EstimateResult estimate_noncoherent(const RssMeasurements& y,
                                    const SensingEnsemble& ensemble,
                                    const WfOptions& wf_opts,
                                    const NompOptions& nomp_opts);

/// Coherent baseline: NOMP directly on complex measurements with dictionary
/// f(w) = A * a(w).
EstimateResult estimate_coherent(const CoherentMeasurements& y, const MatC& a,
                                 const NompOptions& nomp_opts);

} // namespace ncce
