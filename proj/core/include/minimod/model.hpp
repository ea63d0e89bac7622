#pragma once

#include <optional>
#include <string>
#include <utility>

#include "minimod/grid.hpp"

namespace minimod {

/// Material volumes. vp is always present; vs (elastic) and rho
/// (variable-density) are optional. Ghost shells hold edge-replicated values.
struct EarthModel {
    Grid3D grid;
    Field vp;
    std::optional<Field> vs;
    std::optional<Field> rho;
    float vmin = 0.0f; // min(vp), recomputed on construction/load
    float vmax = 0.0f;

    bool has_vs() const { return vs.has_value(); }
    bool has_rho() const { return rho.has_value(); }
};

EarthModel constant_model(const Grid3D& grid, float vp,
                          std::optional<float> vs = std::nullopt,
                          std::optional<float> rho = std::nullopt);

/// Two horizontal layers: top half vp=1500, bottom half vp=4500 (the CLI
/// default model; reproduces the run-report vmin/vmax). rho is constant 1000
/// so the variable-density propagators also run on it.
EarthModel default_layered_model(const Grid3D& grid);

/// Manifest JSON: { "n": [...], "d": [...], "components": {"vp": "vp.f32", ...},
/// "dtype": "f32le", "order": "z-fastest" }; volumes are headerless f32 LE,
/// interior only, z fastest.
EarthModel load_model(const std::string& manifest_path);
void save_model(const EarthModel& model, const std::string& manifest_path);

/// lambda = rho (vp^2 - 2 vs^2), mu = rho vs^2; requires vs and rho.
std::pair<Field, Field> lame_parameters(const EarthModel& model);

/// Validates invariants (vp > 0, rho > 0, 0 <= vs < vp, all finite) and
/// recomputes vmin/vmax. Throws ValidationError.
void validate_model(EarthModel& model);

} // namespace minimod
