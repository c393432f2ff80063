#ifndef NBODYLAB_REPORT_HPP
#define NBODYLAB_REPORT_HPP

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nbodylab/equilibria.hpp"
#include "nbodylab/integrate.hpp"
#include "nbodylab/macmillan.hpp"

namespace nbodylab::io {

/// Shortest round-trippable decimal form of a double; all emitted numbers go
/// through here so identical inputs give byte-identical files.
std::string format_double(double v);

/// Trajectory CSV with the fixed column order
///   t, x1,y1,z1,vx1,vy1,vz1, ..., E, A1, A2, A3, I, Idot, K_omega, set_label
/// and a mandatory header row.
void write_trajectory_csv(std::ostream& os, const AlphaSystem& sys,
                          const TrajectoryRecord& record);

nlohmann::json classify_report(const AlphaSystem& sys, double omega, double e_star,
                               const ClassifyResult& result, const std::string& config_hash);

nlohmann::json excited_energy_report(const AlphaSystem& sys, double omega,
                                     const equilibria::ExcitedEnergyResult& result,
                                     const std::string& config_hash);

nlohmann::json macmillan_report(const macmillan::MacParams& params, double z3_amplitude,
                                const macmillan::TransitionResult& result,
                                const macmillan::TransitionResult* control,
                                const std::string& config_hash);

/// One series of a line chart.
struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

/// Standalone SVG line chart with a data-provenance comment (config hash).
std::string svg_line_chart(const std::string& title, const std::vector<SvgSeries>& series,
                           const std::string& x_label, const std::string& y_label,
                           const std::string& config_hash);

/// Minimal schema dialect: {"required": {field: spec}, "optional": {field: spec}}
/// where spec is "number" | "string" | "boolean" | "integer" | {"array": spec}
/// | an object schema of the same shape. validate_schema throws ConfigError
/// with a path on the first mismatch.
void validate_schema(const nlohmann::json& instance, const nlohmann::json& schema,
                     const std::string& path = "$");

nlohmann::json schema_classify();
nlohmann::json schema_excited_energy();
nlohmann::json schema_macmillan();

} // namespace nbodylab::io

#endif
