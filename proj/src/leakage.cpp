#include "rb/leakage.hpp"

#include <cmath>
#include <stdexcept>

#include "rb/clifford.hpp"
#include "rb/engine.hpp"

namespace rb {

double LeakageFdmParams::d_term() const {
    return a51 / (3.0 * std::sqrt(2.0) * (1.0 - a55));
}

double LeakageFdmParams::c2() const { return 1.0 / 6.0 - d_term(); }

double LeakageFdmParams::c3() const { return 1.0 / 3.0 + d_term(); }

double leakage_fdm(long m, const LeakageFdmParams& p) {
    if (m < 0) throw std::invalid_argument("leakage_fdm: m < 0");
    const double md = static_cast<double>(m);
    // geometric feed term, with the a55 -> 1 limit m a51/(3 sqrt 2)
    double feed;
    if (std::abs(1.0 - p.a55) < 1e-12) {
        feed = md * p.a51 / (3.0 * std::sqrt(2.0));
    } else {
        feed = p.a51 * (1.0 - std::pow(p.a55, md)) /
               (3.0 * std::sqrt(2.0) * (1.0 - p.a55));
    }
    return 0.5 * std::pow(p.alpha, md) + 1.0 / 3.0 +
           std::pow(p.a55, md) / 6.0 + feed;
}

LeakageFdmParams extract_block_params(const Ptm& qutrit_error) {
    if (qutrit_error.dim() != 3)
        throw std::invalid_argument("extract_block_params: need a qutrit PTM");
    if (!qutrit_error.is_trace_preserving(1e-8))
        throw std::invalid_argument(
            "extract_block_params: channel is not trace preserving");
    const Ptm tw = ExtendedQutritGroup::instance().twirl(qutrit_error);
    const auto& m = tw.entries();
    const double off_block =
        std::max(m.topRightCorner(5, 4).cwiseAbs().maxCoeff(),
                 m.bottomLeftCorner(4, 5).cwiseAbs().maxCoeff());
    if (off_block > 1e-8)
        throw std::logic_error(
            "extract_block_params: twirl left off-block mass " +
            std::to_string(off_block));
    LeakageFdmParams p;
    p.alpha = (m(1, 1) + m(2, 2) + m(3, 3)) / 3.0;
    p.a55 = m(4, 4);
    p.a51 = m(4, 0);
    return p;
}

DecaySeries run_leakage_rb(const NoiseModelConfig& noise, int k,
                           const std::vector<int>& m_grid, std::uint64_t seed,
                           int threads) {
    if (noise.kind != NoiseKind::leakage_fixed &&
        noise.kind != NoiseKind::leakage_random)
        throw std::invalid_argument("run_leakage_rb: need a leakage noise kind");
    ExperimentPlan plan;
    plan.protocol = Protocol::srb;
    plan.k = k;
    plan.m_grid = m_grid;
    plan.noise = noise;
    plan.seed = seed;
    return run_srb(plan, threads);
}

}  // namespace rb
