#include "shp/portfolio.hpp"

namespace shp {

void validate_theta(const ThetaStrategy& theta, int d) {
    for (const auto& step : theta.steps) {
        if (static_cast<int>(step.size()) != d)
            fail_validation("DimensionMismatch", "transfer matrix is d x d",
                            "bad transfer shape");
        for (int i = 0; i < d; ++i) {
            if (static_cast<int>(step[i].size()) != d)
                fail_validation("DimensionMismatch", "transfer matrix is d x d",
                                "bad transfer shape");
            for (int j = 0; j < d; ++j) {
                if (i == j && step[i][j] != 0)
                    fail_validation("DimensionMismatch", "zero transfer diagonal",
                                    "nonzero diagonal transfer");
                if (step[i][j] < 0)
                    fail_validation("DimensionMismatch", "transfers are nonnegative",
                                    "negative transfer");
            }
        }
    }
}

KStrategy theta_to_k(const ExchangeMatrix& ex, const ThetaStrategy& theta) {
    validate_theta(theta, ex.d);
    KStrategy out;
    out.steps.reserve(theta.steps.size());
    for (const auto& step : theta.steps) out.steps.push_back(aggregate_transfers(ex, step));
    return out;
}

ThetaStrategy k_to_theta(const ExchangeMatrix& ex, const KStrategy& k) {
    ThetaStrategy out;
    out.steps.reserve(k.steps.size());
    for (const auto& step : k.steps) {
        auto witness = transfer_witness(ex, step);
        if (!witness)
            fail_runtime("NotInCone", "each step rate lies in the solvency cone",
                         "no transfer decomposition for a step rate");
        out.steps.push_back(std::move(*witness));
    }
    return out;
}

KhatPath khat_on_path(const KStrategy& k, const PathSet& paths, int path_index) {
    if (path_index < 0 || path_index >= static_cast<int>(paths.s.size()))
        fail_validation("GridMismatch", "path index within the simulated set",
                        "path index out of range");
    if (static_cast<int>(k.steps.size()) != paths.n_steps)
        fail_validation("GridMismatch", "one strategy step per grid step",
                        "strategy length mismatch");
    KhatPath out;
    out.steps.resize(k.steps.size());
    for (size_t step = 0; step < k.steps.size(); ++step) {
        const auto& s = paths.s[path_index][step];
        if (static_cast<int>(k.steps[step].size()) != paths.d)
            fail_validation("GridMismatch", "rate length equals d", "bad rate length");
        out.steps[step].resize(paths.d);
        for (int c = 0; c < paths.d; ++c)
            out.steps[step][c] = rat_to_double(k.steps[step][c]) / s[c];
    }
    return out;
}

ValuePaths simulate_value(const MarketModel& model, const PathSet& paths, int path_index,
                          const KhatPath& khat, const std::vector<double>& v0hat) {
    validate_model(model);
    if (path_index < 0 || path_index >= static_cast<int>(paths.s.size()))
        fail_validation("GridMismatch", "path index within the simulated set",
                        "path index out of range");
    int n = paths.n_steps;
    if (static_cast<int>(khat.steps.size()) != n)
        fail_validation("GridMismatch", "one strategy step per grid step",
                        "strategy length mismatch");
    int d = paths.d;
    if (static_cast<int>(v0hat.size()) != d)
        fail_validation("GridMismatch", "initial holding length equals d",
                        "bad initial holding length");

    ValuePaths out;
    out.vhat.assign(n + 1, std::vector<double>(d));
    out.v_direct.assign(n + 1, std::vector<double>(d));
    out.v_stepped.assign(n + 1, std::vector<double>(d));
    const auto& s = paths.s[path_index];

    out.vhat[0] = v0hat;
    for (int c = 0; c < d; ++c) {
        out.v_direct[0][c] = v0hat[c] * s[0][c];
        out.v_stepped[0][c] = out.v_direct[0][c];
    }
    for (int k = 0; k < n; ++k) {
        double dt = rat_to_double(paths.grid[k + 1] - paths.grid[k]);
        if (static_cast<int>(khat.steps[k].size()) != d)
            fail_validation("GridMismatch", "rate length equals d", "bad rate length");
        for (int c = 0; c < d; ++c) {
            out.vhat[k + 1][c] = out.vhat[k][c] - khat.steps[k][c] * dt;
            out.v_direct[k + 1][c] = out.vhat[k + 1][c] * s[k + 1][c];
            // realized gross return, then the trading drain at step-start prices
            double gross = s[k + 1][c] / s[k][c];
            out.v_stepped[k + 1][c] =
                out.v_stepped[k][c] * gross - khat.steps[k][c] * s[k][c] * dt;
        }
    }
    return out;
}

} // namespace shp
