#include "ncce/estimators.hpp"

#include <chrono>

namespace ncce {

EstimateResult estimate_noncoherent(const RssMeasurements& y,
                                    const SensingEnsemble& ensemble,
                                    const WfOptions& wf_opts,
                                    const NompOptions& nomp_opts) {
    const auto t_start = std::chrono::steady_clock::now();

    WfResult stage1 = wirtinger_flow(ensemble.a_pr, y, wf_opts);
    if (stage1.degenerate) {
        EstimateResult result;
        result.stage1 = std::move(stage1);
        result.residual_energy_rel = 1.0;
        result.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                .count();
        return result;
    }

    EstimateResult result = extract_paths(stage1.estimate, ensemble.a_cs, nomp_opts);
    result.stage1 = std::move(stage1);
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

EstimateResult estimate_coherent(const CoherentMeasurements& y, const MatC& a,
                                 const NompOptions& nomp_opts) {
    return extract_paths(y.values, a, nomp_opts);
}

} // namespace ncce
