#include "bhldp/io/reports.hpp"

#include "bhldp/io/output.hpp"

namespace bhldp::io {

using nlohmann::json;

json report(const ModelParams& p) {
    return {{"lambda", p.lambda}, {"mu", p.mu}, {"N", p.N}, {"T", p.T_horizon}};
}

json report(const ode::Stats& s) {
    return {{"accepted", s.accepted}, {"rejected", s.rejected}, {"domain_rejections", s.domain_rejections}};
}

json report(const StationaryAnalysis& a) {
    json roots = json::array();
    for (const auto& r : a.roots)
        roots.push_back({{"x", r.x}, {"stability", to_string(r.stability)}, {"rhs_slope", json_number(r.rhs_slope)}});
    return {{"exists", a.exists},
            {"roots", roots},
            {"margin", a.margin},
            {"mu_over_lambda_threshold", existence_threshold}};
}

json report(const RegimeSolution& r) {
    const auto& q = r.residuals;
    return {{"B", r.B},
            {"x_B", r.x_B},
            {"kappa1", r.kappa1},
            {"kappa2", r.kappa2},
            {"I_rate", r.I_rate},
            {"asymptotic_x", r.asymptotic_x},
            {"ratio", r.x_B / r.asymptotic_x},
            {"residuals",
             {{"absorption_balance", q.absorption_balance},
              {"emission_balance", q.emission_balance},
              {"drift", q.drift},
              {"bracket", q.bracket},
              {"momentum", q.momentum},
              {"regime_equation", q.regime_equation}}}};
}

json report(const GInfimum& g) {
    return {{"B", g.B},
            {"x_star", g.x_star},
            {"c2_star", g.c2_star},
            {"rate", g.rate},
            {"I_star", g.I_star},
            {"c2_on_boundary", g.c2_on_boundary},
            {"rare", g.rare}};
}

json report(const ProbeReport& r) {
    json starts = json::array();
    for (const auto& s : r.starts)
        starts.push_back({{"value", json_number(s.value)}, {"evaluations", s.evaluations}, {"converged", s.converged}});
    return {{"B", r.B},
            {"n_knots", r.n_knots},
            {"constant_x", r.constant_x},
            {"knot_t", r.knot_t},
            {"best_x", r.best_x},
            {"best_y", r.best_y},
            {"best_I", json_number(r.best_I)},
            {"G", report(r.G)},
            {"gap", json_number(r.gap)},
            {"relative_gap", json_number(r.relative_gap)},
            {"relaxation_lowers_I", r.relaxation_lowers_I},
            {"starts", starts},
            {"label", r.label}};
}

json report(const EstimatorReport& r) {
    return {{"method", to_string(r.method)},
            {"N", r.N},
            {"B", r.B},
            {"T", r.T},
            {"n_replicas", r.n_replicas},
            {"seed", r.seed},
            {"initial_k", r.initial_k ? json(*r.initial_k) : json("uniform")},
            {"tilt", {{"kappa1", r.tilt.kappa1}, {"kappa2", r.tilt.kappa2}}},
            {"hits", r.hits},
            {"estimate", r.estimate},
            {"log_estimate", json_number(r.log_estimate)},
            {"log_per_quantum", json_number(r.log_per_quantum)},
            {"std_error", r.std_error},
            {"relative_error", json_number(r.relative_error)},
            {"upper_bound_95", r.upper_bound_95 ? json(*r.upper_bound_95) : json(nullptr)},
            {"ess", r.ess},
            {"ess_warning", r.ess_warning},
            {"mean_emission_rate", r.mean_emission_rate},
            {"mean_fraction", r.mean_fraction}};
}

json report(const SlopeReport& r) {
    json points = json::array();
    for (const auto& p : r.points)
        points.push_back({{"N", p.N},
                          {"neg_log_p", json_number(p.neg_log_p)},
                          {"sigma", json_number(p.sigma)},
                          {"estimator", report(p.report)}});
    json j = {{"B", r.B},
              {"T", r.T},
              {"points", points},
              {"regime", report(r.regime)},
              {"G", report(r.G)},
              {"fitted", r.fitted},
              {"diagnostic", r.diagnostic},
              {"tolerance", r.tolerance}};
    if (r.fitted) {
        j["slope"] = r.slope;
        j["slope_se"] = r.slope_se;
        j["ci95"] = {r.ci_low, r.ci_high};
        j["intercept"] = r.intercept;
        j["relative_deviation"] = r.relative_deviation;
        j["within_upper_bound"] = r.within_upper_bound;
        j["agrees"] = r.agrees;
    }
    j["probe"] = r.probe ? report(*r.probe) : json(nullptr);
    return j;
}

}  // namespace bhldp::io
