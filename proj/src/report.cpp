#include "nbodylab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace nbodylab::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const AlphaSystem& sys,
                          const TrajectoryRecord& record) {
    const std::size_t n = sys.size();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i)
        os << ",x" << i << ",y" << i << ",z" << i << ",vx" << i << ",vy" << i << ",vz" << i;
    os << ",E,A1,A2,A3,I,Idot,K_omega,set_label\n";
    for (const TrajectorySample& s : record.samples) {
        os << format_double(s.t);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3& p = s.state.positions[i];
            const Vec3& v = s.state.velocities[i];
            os << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
               << format_double(p.z) << ',' << format_double(v.x) << ',' << format_double(v.y)
               << ',' << format_double(v.z);
        }
        const InvariantRecord& r = s.invariants;
        os << ',' << format_double(r.energy) << ',' << format_double(r.angular_momentum.x) << ','
           << format_double(r.angular_momentum.y) << ',' << format_double(r.angular_momentum.z)
           << ',' << format_double(r.inertia) << ',' << format_double(r.inertia_rate) << ','
           << format_double(s.k_omega) << ',' << to_string(s.label) << '\n';
    }
}

namespace {

nlohmann::json events_json(const std::vector<TrajectoryEvent>& events) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TrajectoryEvent& e : events) arr.push_back({{"t", e.t}, {"kind", to_string(e.kind)}});
    return arr;
}

nlohmann::json positions_json(const std::vector<Vec3>& q) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Vec3& p : q) arr.push_back({p.x, p.y, p.z});
    return arr;
}

} // namespace

nlohmann::json classify_report(const AlphaSystem& sys, double omega, double e_star,
                               const ClassifyResult& result, const std::string& config_hash) {
    nlohmann::json history = nlohmann::json::array();
    for (const LabelInterval& iv : result.set_history)
        history.push_back(
            {{"t_begin", iv.t_begin}, {"t_end", iv.t_end}, {"label", to_string(iv.label)}});
    nlohmann::json j{
        {"config_hash", config_hash},
        {"alpha", sys.alpha()},
        {"omega", omega},
        {"e_star", e_star},
        {"outcome", to_string(result.outcome.kind)},
        {"reason", result.outcome.reason},
        {"set_history", history},
        {"transition_count", result.transition_count},
        {"k_sign_changes", result.k_sign_changes},
        {"theory_applicable", result.theory_applicable},
        {"low_accuracy", result.low_accuracy},
        {"events", events_json(result.record.events)},
    };
    if (std::isfinite(result.outcome.t_collision)) j["t_collision"] = result.outcome.t_collision;
    return j;
}

nlohmann::json excited_energy_report(const AlphaSystem& sys, double omega,
                                     const equilibria::ExcitedEnergyResult& result,
                                     const std::string& config_hash) {
    nlohmann::json j{
        {"config_hash", config_hash},
        {"alpha", sys.alpha()},
        {"omega", omega},
        {"e_star", result.e_star},
        {"u_star", result.u_star},
        {"multiplier", result.multiplier},
        {"degenerate_alpha", result.degenerate_alpha},
        {"minimizer_planar", result.minimizer_planar},
        {"minimizer_collinear", result.minimizer_collinear},
        {"starts_attempted", result.starts_attempted},
        {"starts_converged", result.starts_converged},
        {"minimizer",
         {{"positions", positions_json(result.minimizer.positions)},
          {"residual", result.minimizer.residual},
          {"omega", result.minimizer.omega}}},
    };
    return j;
}

nlohmann::json macmillan_report(const macmillan::MacParams& params, double z3_amplitude,
                                const macmillan::TransitionResult& result,
                                const macmillan::TransitionResult* control,
                                const std::string& config_hash) {
    nlohmann::json j{
        {"config_hash", config_hash},
        {"alpha", params.alpha},
        {"epsilon", params.epsilon},
        {"omega", params.omega()},
        {"z3_amplitude", z3_amplitude},
        {"r12_initial", result.r12_used},
        {"transition_count", result.count},
        {"transition_times", result.transition_times},
        {"pattern_ok", result.pattern_ok},
        {"mean_abs_z3_k_positive", result.mean_abs_z3_k_positive},
        {"mean_abs_z3_k_negative", result.mean_abs_z3_k_negative},
        {"energy_drift", result.energy_drift},
        {"excited_energy", macmillan::eps_excited_energy(params)},
    };
    if (control) {
        j["control"] = {{"transition_count", control->count}, {"max_abs_k", control->max_abs_k}};
    }
    return j;
}

std::string svg_line_chart(const std::string& title, const std::vector<SvgSeries>& series,
                           const std::string& x_label, const std::string& y_label,
                           const std::string& config_hash) {
    const double width = 860, height = 560;
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const SvgSeries& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmin < xmax)) { xmin = 0; xmax = 1; }
    if (!(ymin < ymax)) { ymin -= 0.5; ymax += 0.5; }
    const double xr = xmax - xmin, yr = ymax - ymin;
    auto px = [&](double x) { return ml + (x - xmin) / xr * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - ymin) / yr * (height - mt - mb); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string((int)width) +
           "\" height=\"" + std::to_string((int)height) + "\" viewBox=\"0 0 " +
           std::to_string((int)width) + " " + std::to_string((int)height) + "\">\n";
    svg += "<!-- config-hash: " + config_hash + " -->\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string((int)(width / 2)) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"16\">" +
           title + "</text>\n";
    // axes
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  ml, height - mb, width - mr, height - mb, ml, mt, ml, height - mb);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"12\">%s</text>\n"
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"12\" "
                  "transform=\"rotate(-90 %.1f %.1f)\">%s</text>\n",
                  (width - ml) / 2, height - 12.0, x_label.c_str(), 16.0, height / 2, 16.0,
                  height / 2, y_label.c_str());
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"10\">%s, %s</text>\n"
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"10\">%s, %s</text>\n",
                  ml, height - mb + 16.0, format_double(xmin).c_str(), format_double(ymin).c_str(),
                  width - mr - 180.0, mt - 6.0, format_double(xmax).c_str(),
                  format_double(ymax).c_str());
    svg += buf;

    int legend_y = (int)mt;
    for (const SvgSeries& s : series) {
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
            svg += buf;
        }
        svg += "\"/>\n";
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%d\" font-family=\"monospace\" font-size=\"12\" "
                      "fill=\"%s\">%s</text>\n",
                      width - mr - 180.0, legend_y += 16, s.color.c_str(), s.label.c_str());
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

namespace {

void validate_one(const nlohmann::json& value, const nlohmann::json& spec, const std::string& path);

void validate_fields(const nlohmann::json& instance, const nlohmann::json& schema,
                     const std::string& path) {
    if (!instance.is_object()) throw ConfigError(path + ": expected an object");
    if (schema.contains("required"))
        for (const auto& [field, spec] : schema.at("required").items()) {
            if (!instance.contains(field))
                throw ConfigError(path + ": missing required field '" + field + "'");
            validate_one(instance.at(field), spec, path + "." + field);
        }
    if (schema.contains("optional"))
        for (const auto& [field, spec] : schema.at("optional").items())
            if (instance.contains(field)) validate_one(instance.at(field), spec, path + "." + field);
}

void validate_one(const nlohmann::json& value, const nlohmann::json& spec,
                  const std::string& path) {
    if (spec.is_string()) {
        const std::string t = spec.get<std::string>();
        const bool ok = (t == "number" && value.is_number()) ||
                        (t == "integer" && value.is_number_integer()) ||
                        (t == "string" && value.is_string()) ||
                        (t == "boolean" && value.is_boolean());
        if (!ok) throw ConfigError(path + ": expected " + t);
        return;
    }
    if (spec.is_object() && spec.contains("array")) {
        if (!value.is_array()) throw ConfigError(path + ": expected an array");
        int i = 0;
        for (const auto& item : value) validate_one(item, spec.at("array"), path + "[" + std::to_string(i++) + "]");
        return;
    }
    validate_fields(value, spec, path);
}

} // namespace

void validate_schema(const nlohmann::json& instance, const nlohmann::json& schema,
                     const std::string& path) {
    validate_fields(instance, schema, path);
}

nlohmann::json schema_classify() {
    return nlohmann::json{
        {"required",
         {{"config_hash", "string"},
          {"alpha", "number"},
          {"omega", "number"},
          {"e_star", "number"},
          {"outcome", "string"},
          {"reason", "string"},
          {"transition_count", "integer"},
          {"k_sign_changes", "integer"},
          {"theory_applicable", "boolean"},
          {"low_accuracy", "boolean"},
          {"set_history",
           {{"array",
             {{"required",
               {{"t_begin", "number"}, {"t_end", "number"}, {"label", "string"}}}}}}},
          {"events",
           {{"array", {{"required", {{"t", "number"}, {"kind", "string"}}}}}}}}},
        {"optional", {{"t_collision", "number"}}}};
}

nlohmann::json schema_excited_energy() {
    return nlohmann::json{
        {"required",
         {{"config_hash", "string"},
          {"alpha", "number"},
          {"omega", "number"},
          {"e_star", "number"},
          {"u_star", "number"},
          {"multiplier", "number"},
          {"degenerate_alpha", "boolean"},
          {"minimizer_planar", "boolean"},
          {"minimizer_collinear", "boolean"},
          {"starts_attempted", "integer"},
          {"starts_converged", "integer"},
          {"minimizer",
           {{"required",
             {{"positions", {{"array", {{"array", "number"}}}}},
              {"residual", "number"},
              {"omega", "number"}}}}}}}};
}

nlohmann::json schema_macmillan() {
    return nlohmann::json{
        {"required",
         {{"config_hash", "string"},
          {"alpha", "number"},
          {"epsilon", "number"},
          {"omega", "number"},
          {"z3_amplitude", "number"},
          {"r12_initial", "number"},
          {"transition_count", "integer"},
          {"transition_times", {{"array", "number"}}},
          {"pattern_ok", "boolean"},
          {"mean_abs_z3_k_positive", "number"},
          {"mean_abs_z3_k_negative", "number"},
          {"energy_drift", "number"},
          {"excited_energy", "number"}}},
        {"optional",
         {{"control",
           {{"required", {{"transition_count", "integer"}, {"max_abs_k", "number"}}}}}}}};
}

} // namespace nbodylab::io
