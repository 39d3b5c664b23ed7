#include "rb/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rb/clifford.hpp"
#include "rb/rng.hpp"
#include "rb/stats.hpp"

namespace rb {

std::vector<int> default_m_grid(int m_max) {
    if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
    std::vector<int> grid;
    for (long m = 1; m <= m_max; m *= 2) grid.push_back(static_cast<int>(m));
    return grid;
}

void ExperimentPlan::validate() const {
    if (k < 1) throw std::invalid_argument("plan: K must be >= 1");
    if (m_grid.empty()) throw std::invalid_argument("plan: empty m grid");
    for (size_t i = 0; i < m_grid.size(); ++i) {
        if (m_grid[i] < 1)
            throw std::invalid_argument("plan: sequence lengths must be >= 1");
        if (i > 0 && m_grid[i] <= m_grid[i - 1])
            throw std::invalid_argument("plan: m grid must be strictly increasing");
    }
    if (shots && *shots < 1)
        throw std::invalid_argument("plan: shots must be >= 1");
    if (noise.r < 0.0) throw std::invalid_argument("plan: negative error rate");
    if (protocol == Protocol::irb) {
        if (!interleaved)
            throw std::invalid_argument("plan: irb needs an interleaved gate");
        if (interleaved->gate < 0 || interleaved->gate >= 24)
            throw std::invalid_argument("plan: interleaved gate index out of range");
        const NoiseKind k1 = noise.kind;
        if (k1 == NoiseKind::leakage_fixed || k1 == NoiseKind::leakage_random)
            throw std::invalid_argument("plan: irb is qubit-only");
    }
}

namespace {

// Uniform group interface over the 24-element Clifford group and the
// 48-element extended qutrit group.
struct GroupOps {
    int n = 24;
    const std::vector<Ptm>* ptms = nullptr;
    const CliffordGroup* qubit = nullptr;
    const ExtendedQutritGroup* qutrit = nullptr;

    static GroupOps for_dim(int dim) {
        GroupOps ops;
        if (dim == 2) {
            ops.qubit = &CliffordGroup::instance();
            ops.n = 24;
            ops.ptms = &ops.qubit->ptms();
        } else {
            ops.qutrit = &ExtendedQutritGroup::instance();
            ops.n = 48;
        }
        return ops;
    }

    const Eigen::MatrixXd& ptm(int i) const {
        return qubit ? (*ptms)[i].entries() : qutrit->element(i).entries();
    }
    int product(int a, int b) const {
        return qubit ? qubit->product(a, b) : qutrit->product(a, b);
    }
    int inverse(int a) const {
        return qubit ? qubit->inverse(a) : qutrit->inverse(a);
    }
};

struct RunContext {
    const ExperimentPlan* plan;
    const NoiseModel* model;
    const NoiseModel* int_model = nullptr;  // interleaved noise, irb only
    GroupOps group;
    Eigen::VectorXd prep;
    Eigen::VectorXd meas;
    bool interleave = false;
    std::uint64_t stream_tag = 0;
};

// Hands out error-channel matrices for one sequence without reallocating on
// the cached kinds; slow drift pins one channel per sequence index.
struct ErrorSource {
    const NoiseModel* model;
    Ptm scratch{2, Eigen::MatrixXd::Identity(4, 4)};

    void start_sequence(int k, Rng& rng) {
        if (model->kind() == NoiseKind::slow_drift)
            scratch = model->error_for(0, 1, k, rng);
    }
    const Eigen::MatrixXd& entries(int gate, int j, int k, Rng& rng) {
        switch (model->kind()) {
            case NoiseKind::gaussian_fast:
                scratch = model->error_for(gate, j, k, rng);
                return scratch.entries();
            case NoiseKind::slow_drift:
                return scratch.entries();
            default: {
                const auto& ge = model->gate_errors();
                return ge[ge.size() == 1 ? 0 : gate].entries();
            }
        }
    }
};

double sequence_survival(const RunContext& ctx, int m, int k) {
    Rng rng(child_seed(ctx.plan->seed, static_cast<std::uint64_t>(m),
                       static_cast<std::uint64_t>(k), ctx.stream_tag));
    const auto& group = ctx.group;
    ErrorSource noise{ctx.model};
    noise.start_sequence(k, rng);
    ErrorSource int_noise{ctx.int_model};
    if (ctx.interleave) int_noise.start_sequence(k, rng);

    Eigen::VectorXd state = ctx.prep;
    Eigen::VectorXd tmp(state.size());
    int ideal_acc = -1;  // folded ideal composite, as a group index
    const int int_gate = ctx.interleave ? ctx.plan->interleaved->gate : -1;

    for (int j = 1; j <= m; ++j) {
        const int g = static_cast<int>(rng.uniform_int(group.n));
        tmp.noalias() = group.ptm(g) * state;
        state.noalias() = noise.entries(g, j, k, rng) * tmp;
        ideal_acc = (j == 1) ? g : group.product(g, ideal_acc);
        if (ctx.interleave) {
            // gate under test: its error acts before the ideal gate
            tmp.noalias() = int_noise.entries(int_gate, j, k, rng) * state;
            state.noalias() = group.ptm(int_gate) * tmp;
            ideal_acc = group.product(int_gate, ideal_acc);
        }
    }
    const int inv = group.inverse(ideal_acc);
    tmp.noalias() = group.ptm(inv) * state;
    state.noalias() = noise.entries(inv, m + 1, k, rng) * tmp;

    double f = ctx.meas.dot(state);
    if (ctx.plan->shots) {
        const double p = std::clamp(f, 0.0, 1.0);
        f = static_cast<double>(rng.binomial(*ctx.plan->shots, p)) /
            static_cast<double>(*ctx.plan->shots);
    }
    return f;
}

DecaySeries run_protocol(const RunContext& ctx, int threads) {
    const ExperimentPlan& plan = *ctx.plan;
    DecaySeries series;
    series.k = plan.k;

    std::vector<double> fk(plan.k);
    for (int m : plan.m_grid) {
        auto worker = [&](int lo, int hi) {
            for (int k = lo; k < hi; ++k) fk[k] = sequence_survival(ctx, m, k);
        };
        if (threads <= 1 || plan.k < 2 * threads) {
            worker(0, plan.k);
        } else {
            std::vector<std::thread> pool;
            const int chunk = (plan.k + threads - 1) / threads;
            for (int t = 0; t < threads; ++t) {
                const int lo = t * chunk;
                const int hi = std::min(plan.k, lo + chunk);
                if (lo < hi) pool.emplace_back(worker, lo, hi);
            }
            for (auto& th : pool) th.join();
        }
        const auto stats = mean_and_stderr(fk);
        series.m.push_back(m);
        series.f_mean.push_back(stats.mean);
        series.f_stderr.push_back(stats.stderr_);
    }

    nlohmann::json meta;
    meta["protocol"] = plan.protocol == Protocol::irb ? "irb" : "srb";
    meta["interleaved_run"] = ctx.interleave;
    meta["k"] = plan.k;
    meta["seed"] = plan.seed;
    meta["m_grid"] = plan.m_grid;
    if (plan.shots)
        meta["shots"] = *plan.shots;
    else
        meta["shots"] = nullptr;
    meta["noise"] = {{"kind", noise_kind_name(plan.noise.kind)},
                     {"r", plan.noise.r},
                     {"seed", plan.noise.seed}};
    meta["true_r"] = ctx.model->true_average_error();
    if (ctx.interleave && ctx.int_model) {
        meta["interleaved"] = {
            {"gate", plan.interleaved->gate},
            {"kind", noise_kind_name(plan.interleaved->noise.kind)},
            {"r", plan.interleaved->noise.r},
            {"true_r", ctx.int_model->true_average_error()}};
    }
    series.meta = meta.dump();
    return series;
}

}  // namespace

DecaySeries run_srb(const ExperimentPlan& plan, int threads) {
    plan.validate();
    const NoiseModel model = NoiseModel::build(plan.noise, plan.k);
    RunContext ctx;
    ctx.plan = &plan;
    ctx.model = &model;
    ctx.group = GroupOps::for_dim(model.dim());
    ctx.prep = ground_state(model.dim());
    ctx.meas = ctx.prep;
    return run_protocol(ctx, threads);
}

std::pair<DecaySeries, DecaySeries> run_irb(const ExperimentPlan& plan,
                                            int threads) {
    plan.validate();
    if (plan.protocol != Protocol::irb)
        throw std::invalid_argument("run_irb: plan.protocol must be irb");
    const NoiseModel model = NoiseModel::build(plan.noise, plan.k);
    const NoiseModel int_model =
        NoiseModel::build(plan.interleaved->noise, plan.k);
    if (int_model.dim() != 2)
        throw std::invalid_argument("run_irb: interleaved noise must be qubit");

    RunContext ref;
    ref.plan = &plan;
    ref.model = &model;
    ref.group = GroupOps::for_dim(2);
    ref.prep = ground_state(2);
    ref.meas = ref.prep;
    DecaySeries reference = run_protocol(ref, threads);

    RunContext inter = ref;
    inter.int_model = &int_model;
    inter.interleave = true;
    inter.stream_tag = 1;  // fresh sequences for the second experiment
    DecaySeries interleaved = run_protocol(inter, threads);
    return {std::move(reference), std::move(interleaved)};
}

double irb_estimate_r(double alpha_ref, double alpha_interleaved, int dim) {
    if (alpha_ref == 0.0)
        throw std::invalid_argument("irb_estimate_r: alpha_ref is zero");
    return (1.0 - alpha_interleaved / alpha_ref) * (dim - 1) / dim;
}

}  // namespace rb
