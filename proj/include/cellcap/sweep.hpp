#pragma once

#include "cellcap/arq_sim.hpp"
#include "cellcap/bounds.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cellcap::sweep {

inline constexpr std::string_view tool_version = "1.0.0";

enum class Format { csv, json };
enum class ReferenceKind { poly, exp };

std::string_view to_string(Format f);
std::string_view to_string(ReferenceKind k);

struct SweepSpec {
    arq::SimScenario scenario;    // cfg.bs_density is overwritten per grid point
    double mu_density_ratio = 10.0; // mu = ratio * lambda
    std::vector<double> grid;
    std::vector<bounds::BoundKind> bounds;
    std::optional<double> bound_eta; // empty: use the measured eta
    double bound_delta = 0.0;
    bounds::InterferenceFactorForm ub_form = bounds::InterferenceFactorForm::corrected;
    std::vector<ReferenceKind> references;
    std::optional<double> reference_anchor; // lambda0; empty: first grid point
    std::string out;
    Format format = Format::csv;
    std::string preset; // name when loaded from a preset, otherwise empty
    bool seed_in_config = false;
};

/// Parses a flat `key = value` file. Unknown keys and malformed values
/// raise config_error naming the key. Missing keys keep their defaults.
SweepSpec parse_config(std::string_view text);
SweepSpec load_config_file(const std::string& path);

/// Built-in figure presets: fig3, fig4, fig5, fig6.
std::vector<std::string> preset_names();
std::string preset_text(std::string_view name);
SweepSpec load_preset(std::string_view name);

/// Checks every invariant; throws config_error naming the key.
void validate_config(const SweepSpec& spec);

/// Full normalized configuration as `key = value` lines.
std::string normalized_echo(const SweepSpec& spec);

struct SweepRow {
    double lambda = 0.0;
    double mean_delay_censored = 0.0;
    double ci_halfwidth = 0.0;
    double survival_at_tmax = 0.0;
    std::size_t censored_count = 0;
    std::size_t n = 0;
    double capacity_network = 0.0;
    double capacity_per_bs = 0.0;
    double capacity_per_mu = 0.0;
    double eta_measured = 0.0;
    double eta_used = 0.0;
    std::vector<double> bound_values;     // aligned with SweepSpec::bounds, canonical order
    std::vector<double> reference_values; // aligned with SweepSpec::references
};

/// Bound parameters for one grid point, with the strategy's tau and epsilon.
bounds::BoundParams bound_params(const SweepSpec& spec, double lambda, double eta);

/// Scenario for one grid point.
arq::SimScenario scenario_at(const SweepSpec& spec, double lambda);

/// Simulates every grid point and evaluates the requested bounds and
/// reference curves. Rows are in grid order.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Column names in output order.
std::vector<std::string> column_names(const SweepSpec& spec);

void write_csv(std::ostream& os, const SweepSpec& spec, const std::vector<SweepRow>& rows);
void write_json(std::ostream& os, const SweepSpec& spec, const std::vector<SweepRow>& rows);

/// Writes rows to spec.out in spec.format. Throws io_error when the path
/// cannot be opened.
void write_output(const SweepSpec& spec, const std::vector<SweepRow>& rows);

/// Reference curve through (lambda0, y0): y0 (lambda/lambda0)^(-alpha/2) for
/// poly, y0 exp(slope (lambda - lambda0)) for exp. `shape` is alpha for poly
/// and the slope for exp. Throws request_error when lambda0 is not a grid point.
std::vector<double> emit_reference_curve(ReferenceKind kind, const std::vector<double>& grid,
                                         double lambda0, double y0, double shape);

} // namespace cellcap::sweep
