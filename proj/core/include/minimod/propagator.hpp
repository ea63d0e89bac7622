#pragma once

#include <cmath>
#include <optional>

#include "minimod/cpml.hpp"
#include "minimod/grid.hpp"
#include "minimod/model.hpp"
#include "minimod/parallel.hpp"
#include "minimod/stencil.hpp"

namespace minimod {

enum class Propagator { AcousticIsoCd, AcousticIso, ElasticIso };

Propagator propagator_from_name(const std::string& name);
std::string propagator_name(Propagator p);

/// Options shared by all three engines. `ndamping`/`fmax`/`r_target` feed the
/// CPML profile; `taper` enables the material cosine taper over the
/// outermost `ntaper` shells of the damping region (inert for homogeneous
/// models, off by default so oracle comparisons stay exact).
struct EngineOptions {
    std::array<int, 3> ndamping{0, 0, 0};
    double fmax = 25.0;
    double r_target = 1e-3;
    bool free_surface = false;
    bool taper = false;
    std::array<int, 3> ntaper{3, 3, 3};
};

namespace detail {

/// Cosine taper of a material volume toward its value `ntaper` shells in
/// from each boundary. Identity on homogeneous volumes.
template <typename T>
void taper_material(FieldT<T>& f, std::array<int, 3> ntaper, std::array<int, 3> offset,
                    std::array<int, 3> global_n) {
    const Grid3D& g = f.grid;
    for (int ax = 0; ax < 3; ++ax) {
        const int nt = ntaper[ax];
        if (nt < 1) continue;
        for (int i = 0; i < g.n[0]; ++i)
            for (int j = 0; j < g.n[1]; ++j)
                for (int k = 0; k < g.n[2]; ++k) {
                    const int idx[3] = {i, j, k};
                    const int gi = idx[ax] + offset[ax];
                    const int depth = std::min(gi, global_n[ax] - 1 - gi); // shells from boundary
                    if (depth >= nt) continue;
                    // reference point nt shells in, along this axis
                    int ref[3] = {i, j, k};
                    ref[ax] = gi < nt ? nt - offset[ax] : global_n[ax] - 1 - nt - offset[ax];
                    if (ref[ax] < 0 || ref[ax] >= g.n[ax]) continue; // reference owned elsewhere
                    const double beta =
                        0.5 * (1.0 - std::cos(M_PI * (depth + 1) / static_cast<double>(nt + 1)));
                    const T fv = f.at(i, j, k);
                    const T fr = f.at(ref[0], ref[1], ref[2]);
                    f.at(i, j, k) = static_cast<T>(fr + beta * (fv - fr));
                }
    }
    fill_ghosts_replicate(f);
}

/// A damping region: its box in local interior coordinates plus the CPML
/// memory variables, allocated only over the box.
template <typename T>
struct CdDampRegion {
    IndexBox box;
    std::array<BoxArray<T>, 3> psi;  // convolved first derivative, with halo
    std::array<BoxArray<T>, 3> zeta; // convolved second derivative
};

template <typename T, std::size_t NTERMS>
struct FoDampRegion { // first-order systems: one memory field per derivative term
    IndexBox box;
    std::array<BoxArray<T>, NTERMS> psi;
};

} // namespace detail

/// Second-order constant-density acoustic propagator on a collocated grid:
///   p_next = 2 p_cur - p_prev + dt^2 vp^2 lap(p_cur)
/// on the inner region; in the damping slabs each axis term of the Laplacian
/// is augmented with recursive-convolution memory variables
///   psi  <- b psi  + a dp/dx
///   zeta <- b zeta + a (d2p/dx2 + dpsi/dx)
///   term  = d2p/dx2 + dpsi/dx + zeta
/// which degenerates bitwise to the plain stencil where a = 0, b = 1.
///
/// The engine runs on a local sub-box of a global grid (`offset`, `global_n`)
/// so the distributed executor can reuse it rank-locally; single-node use
/// passes offset = 0 and global_n = grid.n.
template <typename T>
class AcousticCdEngine {
public:
    AcousticCdEngine(const Grid3D& local_grid, std::array<int, 3> offset,
                     std::array<int, 3> global_n, const FieldT<T>& vp_local,
                     const EngineOptions& opts, T dt, double vmax_global);

    /// One time step. `src` is in local interior coordinates (nullopt when
    /// this rank does not own the source). Injection adds
    /// dt^2 vp(src)^2 * amplitude to p_next before rotation.
    void step(T source_amplitude, std::optional<std::array<int, 3>> src,
              const TaskRunner& runner = TaskRunner(1));

    FieldT<T>& pressure() { return p_cur_; }
    const FieldT<T>& pressure() const { return p_cur_; }
    FieldT<T>& pressure_prev() { return p_prev_; }
    const Grid3D& grid() const { return grid_; }
    T dt() const { return dt_; }

    /// Mutable so tests can degenerate the recurrence (a = 0, b = 1) in place.
    CpmlProfileT<T>& profile() { return profile_; }
    const CpmlProfileT<T>& profile() const { return profile_; }

    /// Seed p_prev/p_cur directly (time-reversal and oracle tests).
    void set_state(const FieldT<T>& p_prev, const FieldT<T>& p_cur) {
        p_prev_ = p_prev;
        p_cur_ = p_cur;
    }

private:
    void update_plain(const IndexBox& box);
    void update_damping_pass1(detail::CdDampRegion<T>& r);
    void update_damping_pass2(detail::CdDampRegion<T>& r);

    Grid3D grid_;
    std::array<int, 3> offset_;
    std::array<int, 3> global_n_;
    FieldT<T> vp_;
    FieldT<T> p_prev_, p_cur_, p_next_;
    AxisWeights<T> w2_[3]; // second derivative per axis
    AxisWeights<T> w1_[3]; // collocated first derivative per axis
    CpmlProfileT<T> profile_;
    std::vector<IndexBox> inner_;                       // local plain boxes
    std::vector<detail::CdDampRegion<T>> damping_;      // local damping boxes
    std::vector<IndexBox> inner_tiles_;                 // fixed tiling for the runner
    T dt_, dt2_;
    bool free_surface_;
};

/// First-order variable-density acoustic propagator on a Yee grid. Velocities
/// are face-centered (+1/2 along their own axis), pressure cell-centered.
/// Leapfrog: v <- v + dt/rho grad p (forward derivatives), then
/// p <- p + dt rho vp^2 (div v + f) (backward derivatives).
template <typename T>
class AcousticVdEngine {
public:
    AcousticVdEngine(const Grid3D& grid, const EarthModel& model, const EngineOptions& opts, T dt);

    /// `source_amplitude` should be the time-integrated wavelet sample (the
    /// source enters this system one time-derivative earlier than the
    /// second-order formulation).
    void step(T source_amplitude, std::optional<std::array<int, 3>> src,
              const TaskRunner& runner = TaskRunner(1));

    FieldT<T>& pressure() { return p_; }
    FieldT<T>& velocity(int axis) { return axis == 0 ? vx_ : axis == 1 ? vy_ : vz_; }
    const Grid3D& grid() const { return grid_; }
    T dt() const { return dt_; }

private:
    void update_velocity(const IndexBox& box, detail::FoDampRegion<T, 6>* damp);
    void update_pressure(const IndexBox& box, detail::FoDampRegion<T, 6>* damp);

    Grid3D grid_;
    FieldT<T> vp_, rho_;
    FieldT<T> p_, vx_, vy_, vz_;
    AxisWeights<T> ws_[3]; // staggered first derivative per axis
    CpmlProfileT<T> profile_;
    std::vector<IndexBox> inner_;
    std::vector<detail::FoDampRegion<T, 6>> damping_; // terms: dp/dx,y,z, dvx/dx, dvy/dy, dvz/dz
    std::vector<IndexBox> inner_tiles_;
    T dt_;
    bool free_surface_;
};

/// First-order isotropic elastic propagator on a Yee grid (Voigt stresses).
/// Staggering: velocities face-centered, normal stresses cell-centered, shear
/// stresses edge-centered. The six derivative rows of the stress update and
/// their adjoints in the velocity update use opposite half-cell shifts.
template <typename T>
class ElasticIsoEngine {
public:
    ElasticIsoEngine(const Grid3D& grid, const EarthModel& model, const EngineOptions& opts, T dt);

    /// Explosive source: adds dt rho vp^2 * amplitude to the three normal
    /// stresses at `src`; pass the time-integrated wavelet sample.
    void step(T source_amplitude, std::optional<std::array<int, 3>> src,
              const TaskRunner& runner = TaskRunner(1));

    /// Mean normal stress (sxx+syy+szz)/3, the acoustic-pressure analog.
    T pressure_at(std::array<int, 3> loc) const {
        return (sxx_.at(loc[0], loc[1], loc[2]) + syy_.at(loc[0], loc[1], loc[2]) +
                szz_.at(loc[0], loc[1], loc[2])) / T(3);
    }
    FieldT<T>& stress(int voigt); // 0..5 = xx, yy, zz, yz, xz, xy
    FieldT<T>& velocity(int axis) { return axis == 0 ? vx_ : axis == 1 ? vy_ : vz_; }
    const Grid3D& grid() const { return grid_; }
    T dt() const { return dt_; }

private:
    void update_stress(const IndexBox& box, detail::FoDampRegion<T, 9>* damp);
    void update_velocity(const IndexBox& box, detail::FoDampRegion<T, 9>* damp);

    Grid3D grid_;
    FieldT<T> lambda_, mu_, rho_, scale_; // scale = rho vp^2 (source normalization)
    FieldT<T> sxx_, syy_, szz_, syz_, sxz_, sxy_;
    FieldT<T> vx_, vy_, vz_;
    AxisWeights<T> ws_[3];
    CpmlProfileT<T> profile_;
    std::vector<IndexBox> inner_;
    std::vector<detail::FoDampRegion<T, 9>> stress_damp_;   // 9 stress-side terms
    std::vector<detail::FoDampRegion<T, 9>> velocity_damp_; // 9 velocity-side terms
    std::vector<IndexBox> inner_tiles_;
    T dt_;
    bool free_surface_;
};

} // namespace minimod

#include "minimod/propagator_impl.hpp"
