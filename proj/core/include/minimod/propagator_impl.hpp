#pragma once

// Implementation of the three propagator engines. Included by propagator.hpp.

namespace minimod {
namespace detail {

constexpr int kTileX = 8; // fixed inner-region tile height along x

inline std::vector<IndexBox> tile_boxes(const std::vector<IndexBox>& boxes) {
    std::vector<IndexBox> tiles;
    for (const auto& b : boxes)
        for (int x = b.lo[0]; x < b.hi[0]; x += kTileX) {
            IndexBox t = b;
            t.lo[0] = x;
            t.hi[0] = std::min(b.hi[0], x + kTileX);
            tiles.push_back(t);
        }
    return tiles;
}

/// Global inner/damping partition clipped to this rank's local box and
/// shifted into local interior coordinates.
struct LocalRegions {
    std::vector<IndexBox> inner;
    std::vector<IndexBox> damping;
};

inline LocalRegions clip_regions(std::array<int, 3> global_n, std::array<double, 3> d, int radius,
                                 std::array<int, 3> ndamping, std::array<int, 3> offset,
                                 std::array<int, 3> local_n) {
    const RegionPartition part = partition_regions(make_grid(global_n, d, radius), ndamping);
    const IndexBox local{{offset[0], offset[1], offset[2]},
                         {offset[0] + local_n[0], offset[1] + local_n[1], offset[2] + local_n[2]}};
    auto to_local = [&](IndexBox b) {
        for (int a = 0; a < 3; ++a) {
            b.lo[a] -= offset[a];
            b.hi[a] -= offset[a];
        }
        return b;
    };
    LocalRegions r;
    if (auto b = intersect(part.inner, local); !b.empty()) r.inner.push_back(to_local(b));
    for (const auto& s : part.slabs)
        if (auto b = intersect(s, local); !b.empty()) r.damping.push_back(to_local(b));
    return r;
}

} // namespace detail

// ---------------------------------------------------------------- acoustic_cd

template <typename T>
AcousticCdEngine<T>::AcousticCdEngine(const Grid3D& local_grid, std::array<int, 3> offset,
                                      std::array<int, 3> global_n, const FieldT<T>& vp_local,
                                      const EngineOptions& opts, T dt, double vmax_global)
    : grid_(local_grid),
      offset_(offset),
      global_n_(global_n),
      vp_(vp_local),
      p_prev_(local_grid, "p_prev"),
      p_cur_(local_grid, "p_cur"),
      p_next_(local_grid, "p_next"),
      dt_(dt),
      dt2_(dt * dt),
      free_surface_(opts.free_surface) {
    for (int ax = 0; ax < 3; ++ax) {
        w2_[ax] = AxisWeights<T>(second_derivative_coeffs(grid_.radius, grid_.d[ax]));
        w1_[ax] = AxisWeights<T>(central_first_derivative_coeffs(grid_.radius, grid_.d[ax]));
    }
    profile_ = build_profile<T>(global_n, grid_.d, opts.ndamping, opts.fmax, vmax_global, dt,
                                opts.r_target, opts.free_surface);
    if (opts.taper) detail::taper_material(vp_, opts.ntaper, offset, global_n);
    auto regions = detail::clip_regions(global_n, grid_.d, grid_.radius, opts.ndamping, offset,
                                        grid_.n);
    inner_ = std::move(regions.inner);
    for (const auto& box : regions.damping) {
        detail::CdDampRegion<T> r;
        r.box = box;
        for (int ax = 0; ax < 3; ++ax) {
            r.psi[ax] = BoxArray<T>(box, grid_.radius);
            r.zeta[ax] = BoxArray<T>(box, 0);
        }
        damping_.push_back(std::move(r));
    }
    inner_tiles_ = detail::tile_boxes(inner_);
}

template <typename T>
void AcousticCdEngine<T>::update_plain(const IndexBox& box) {
    const std::size_t sx = grid_.stride_x(), sy = grid_.stride_y();
    for (int i = box.lo[0]; i < box.hi[0]; ++i)
        for (int j = box.lo[1]; j < box.hi[1]; ++j) {
            const std::size_t base = grid_.offset(i, j, box.lo[2]);
            const T* pc = &p_cur_.data[base];
            const T* pp = &p_prev_.data[base];
            const T* vp = &vp_.data[base];
            T* pn = &p_next_.data[base];
            for (int k = box.lo[2]; k < box.hi[2]; ++k, ++pc, ++pp, ++vp, ++pn) {
                const T lap = laplacian_at(pc, sx, sy, w2_[0], w2_[1], w2_[2]);
                *pn = T(2) * pc[0] - pp[0] + dt2_ * vp[0] * vp[0] * lap;
            }
        }
}

template <typename T>
void AcousticCdEngine<T>::update_damping_pass1(detail::CdDampRegion<T>& r) {
    const long long s[3] = {static_cast<long long>(grid_.stride_x()),
                            static_cast<long long>(grid_.stride_y()), 1};
    for (int i = r.box.lo[0]; i < r.box.hi[0]; ++i)
        for (int j = r.box.lo[1]; j < r.box.hi[1]; ++j)
            for (int k = r.box.lo[2]; k < r.box.hi[2]; ++k) {
                const T* pc = &p_cur_.data[grid_.offset(i, j, k)];
                const int gidx[3] = {i + offset_[0], j + offset_[1], k + offset_[2]};
                for (int ax = 0; ax < 3; ++ax) {
                    const auto& A = profile_.axis[ax];
                    const T b = A.b[gidx[ax]], a = A.a[gidx[ax]];
                    const T dp = central_derivative_at(pc, s[ax], w1_[ax]);
                    T& psi = r.psi[ax].at(i, j, k);
                    psi = b * psi + a * dp;
                }
            }
}

template <typename T>
void AcousticCdEngine<T>::update_damping_pass2(detail::CdDampRegion<T>& r) {
    const long long s[3] = {static_cast<long long>(grid_.stride_x()),
                            static_cast<long long>(grid_.stride_y()), 1};
    for (int i = r.box.lo[0]; i < r.box.hi[0]; ++i)
        for (int j = r.box.lo[1]; j < r.box.hi[1]; ++j)
            for (int k = r.box.lo[2]; k < r.box.hi[2]; ++k) {
                const std::size_t base = grid_.offset(i, j, k);
                const T* pc = &p_cur_.data[base];
                const int gidx[3] = {i + offset_[0], j + offset_[1], k + offset_[2]};
                T term[3];
                for (int ax = 0; ax < 3; ++ax) {
                    const auto& A = profile_.axis[ax];
                    const T b = A.b[gidx[ax]], a = A.a[gidx[ax]], ik = A.inv_kappa[gidx[ax]];
                    const T d2p = second_derivative_at(pc, s[ax], w2_[ax]);
                    const long long ps[3] = {static_cast<long long>(r.psi[ax].stride_x()),
                                             static_cast<long long>(r.psi[ax].stride_y()), 1};
                    const T* psi_c = &r.psi[ax].v[r.psi[ax].offset(i, j, k)];
                    const T dpsi = central_derivative_at(psi_c, ps[ax], w1_[ax]);
                    T& zeta = r.zeta[ax].at(i, j, k);
                    zeta = b * zeta + a * (d2p * ik + dpsi);
                    term[ax] = d2p * ik + dpsi + zeta;
                }
                const T lap = term[0] + term[1] + term[2];
                p_next_.data[base] =
                    T(2) * pc[0] - p_prev_.data[base] + dt2_ * vp_.data[base] * vp_.data[base] * lap;
            }
}

template <typename T>
void AcousticCdEngine<T>::step(T source_amplitude, std::optional<std::array<int, 3>> src,
                               const TaskRunner& runner) {
    runner.run(static_cast<int>(damping_.size()),
               [&](int t) { update_damping_pass1(damping_[t]); });
    const int ntiles = static_cast<int>(inner_tiles_.size());
    runner.run(ntiles + static_cast<int>(damping_.size()), [&](int t) {
        if (t < ntiles)
            update_plain(inner_tiles_[t]);
        else
            update_damping_pass2(damping_[t - ntiles]);
    });
    if (src) {
        const T vps = vp_.at((*src)[0], (*src)[1], (*src)[2]);
        p_next_.at((*src)[0], (*src)[1], (*src)[2]) += dt2_ * vps * vps * source_amplitude;
    }
    if (free_surface_ && offset_[2] == 0) apply_free_surface_pressure(p_next_);
    std::swap(p_prev_, p_cur_);
    std::swap(p_cur_, p_next_);
}

// ---------------------------------------------------------------- acoustic_vd

template <typename T>
AcousticVdEngine<T>::AcousticVdEngine(const Grid3D& grid, const EarthModel& model,
                                      const EngineOptions& opts, T dt)
    : grid_(grid),
      p_(grid, "p"),
      vx_(grid, "vx"),
      vy_(grid, "vy"),
      vz_(grid, "vz"),
      dt_(dt),
      free_surface_(opts.free_surface) {
    if (!model.has_rho())
        throw ValidationError("acoustic_iso requires a density volume (rho)");
    vp_ = FieldT<T>(grid, "vp");
    rho_ = FieldT<T>(grid, "rho");
    const int r = grid.radius;
    for (int i = -r; i < grid.n[0] + r; ++i)
        for (int j = -r; j < grid.n[1] + r; ++j)
            for (int k = -r; k < grid.n[2] + r; ++k) {
                vp_.at(i, j, k) = static_cast<T>(model.vp.at(i, j, k));
                rho_.at(i, j, k) = static_cast<T>(model.rho->at(i, j, k));
            }
    for (int ax = 0; ax < 3; ++ax)
        ws_[ax] = AxisWeights<T>(staggered_first_derivative_coeffs(grid.radius, grid.d[ax]));
    profile_ = build_profile<T>(grid.n, grid.d, opts.ndamping, opts.fmax, model.vmax, dt,
                                opts.r_target, opts.free_surface);
    if (opts.taper) detail::taper_material(vp_, opts.ntaper, {0, 0, 0}, grid.n);
    auto regions =
        detail::clip_regions(grid.n, grid.d, grid.radius, opts.ndamping, {0, 0, 0}, grid.n);
    inner_ = std::move(regions.inner);
    for (const auto& box : regions.damping) {
        detail::FoDampRegion<T, 6> r6;
        r6.box = box;
        for (auto& b : r6.psi) b = BoxArray<T>(box, 0);
        damping_.push_back(std::move(r6));
    }
    inner_tiles_ = detail::tile_boxes(inner_);
}

template <typename T>
void AcousticVdEngine<T>::update_velocity(const IndexBox& box,
                                          detail::FoDampRegion<T, 6>* damp) {
    const long long s[3] = {static_cast<long long>(grid_.stride_x()),
                            static_cast<long long>(grid_.stride_y()), 1};
    for (int i = box.lo[0]; i < box.hi[0]; ++i)
        for (int j = box.lo[1]; j < box.hi[1]; ++j)
            for (int k = box.lo[2]; k < box.hi[2]; ++k) {
                const std::size_t base = grid_.offset(i, j, k);
                const T* pc = &p_.data[base];
                const T inv_rho = dt_ / rho_.data[base];
                const int gidx[3] = {i, j, k};
                T dp[3];
                for (int ax = 0; ax < 3; ++ax) {
                    dp[ax] = staggered_derivative_at(pc, s[ax], ws_[ax], DerivDir::Forward);
                    if (damp) {
                        const auto& A = profile_.axis[ax];
                        const T b = A.b[gidx[ax]], a = A.a[gidx[ax]], ik = A.inv_kappa[gidx[ax]];
                        T& psi = damp->psi[ax].at(i, j, k);
                        psi = b * psi + a * dp[ax];
                        dp[ax] = dp[ax] * ik + psi;
                    }
                }
                vx_.data[base] += inv_rho * dp[0];
                vy_.data[base] += inv_rho * dp[1];
                vz_.data[base] += inv_rho * dp[2];
            }
}

template <typename T>
void AcousticVdEngine<T>::update_pressure(const IndexBox& box,
                                          detail::FoDampRegion<T, 6>* damp) {
    const long long s[3] = {static_cast<long long>(grid_.stride_x()),
                            static_cast<long long>(grid_.stride_y()), 1};
    for (int i = box.lo[0]; i < box.hi[0]; ++i)
        for (int j = box.lo[1]; j < box.hi[1]; ++j)
            for (int k = box.lo[2]; k < box.hi[2]; ++k) {
                const std::size_t base = grid_.offset(i, j, k);
                const int gidx[3] = {i, j, k};
                const FieldT<T>* v[3] = {&vx_, &vy_, &vz_};
                T dv[3];
                for (int ax = 0; ax < 3; ++ax) {
                    dv[ax] = staggered_derivative_at(&v[ax]->data[base], s[ax], ws_[ax],
                                                     DerivDir::Backward);
                    if (damp) {
                        const auto& A = profile_.axis[ax];
                        const T b = A.b[gidx[ax]], a = A.a[gidx[ax]], ik = A.inv_kappa[gidx[ax]];
                        T& psi = damp->psi[3 + ax].at(i, j, k);
                        psi = b * psi + a * dv[ax];
                        dv[ax] = dv[ax] * ik + psi;
                    }
                }
                const T bulk = rho_.data[base] * vp_.data[base] * vp_.data[base];
                p_.data[base] += dt_ * bulk * (dv[0] + dv[1] + dv[2]);
            }
}

template <typename T>
void AcousticVdEngine<T>::step(T source_amplitude, std::optional<std::array<int, 3>> src,
                               const TaskRunner& runner) {
    const int ntiles = static_cast<int>(inner_tiles_.size());
    const int ndamp = static_cast<int>(damping_.size());
    runner.run(ntiles + ndamp, [&](int t) {
        if (t < ntiles)
            update_velocity(inner_tiles_[t], nullptr);
        else
            update_velocity(damping_[t - ntiles].box, &damping_[t - ntiles]);
    });
    runner.run(ntiles + ndamp, [&](int t) {
        if (t < ntiles)
            update_pressure(inner_tiles_[t], nullptr);
        else
            update_pressure(damping_[t - ntiles].box, &damping_[t - ntiles]);
    });
    if (src) {
        const std::size_t base = grid_.offset((*src)[0], (*src)[1], (*src)[2]);
        const T bulk = rho_.data[base] * vp_.data[base] * vp_.data[base];
        p_.data[base] += dt_ * bulk * source_amplitude;
    }
    if (free_surface_) apply_free_surface_pressure(p_);
}

// ---------------------------------------------------------------- elastic_iso

template <typename T>
ElasticIsoEngine<T>::ElasticIsoEngine(const Grid3D& grid, const EarthModel& model,
                                      const EngineOptions& opts, T dt)
    : grid_(grid),
      sxx_(grid, "sxx"),
      syy_(grid, "syy"),
      szz_(grid, "szz"),
      syz_(grid, "syz"),
      sxz_(grid, "sxz"),
      sxy_(grid, "sxy"),
      vx_(grid, "vx"),
      vy_(grid, "vy"),
      vz_(grid, "vz"),
      dt_(dt),
      free_surface_(opts.free_surface) {
    if (!model.has_vs() || !model.has_rho())
        throw ValidationError("elastic_iso requires vs and rho volumes");
    auto [lambda, mu] = lame_parameters(model);
    lambda_ = FieldT<T>(grid, "lambda");
    mu_ = FieldT<T>(grid, "mu");
    rho_ = FieldT<T>(grid, "rho");
    scale_ = FieldT<T>(grid, "rho_vp2");
    const int r = grid.radius;
    for (int i = -r; i < grid.n[0] + r; ++i)
        for (int j = -r; j < grid.n[1] + r; ++j)
            for (int k = -r; k < grid.n[2] + r; ++k) {
                lambda_.at(i, j, k) = static_cast<T>(lambda.at(i, j, k));
                mu_.at(i, j, k) = static_cast<T>(mu.at(i, j, k));
                rho_.at(i, j, k) = static_cast<T>(model.rho->at(i, j, k));
                const T vp = static_cast<T>(model.vp.at(i, j, k));
                scale_.at(i, j, k) = static_cast<T>(model.rho->at(i, j, k)) * vp * vp;
            }
    for (int ax = 0; ax < 3; ++ax)
        ws_[ax] = AxisWeights<T>(staggered_first_derivative_coeffs(grid.radius, grid.d[ax]));
    profile_ = build_profile<T>(grid.n, grid.d, opts.ndamping, opts.fmax, model.vmax, dt,
                                opts.r_target, opts.free_surface);
    auto regions =
        detail::clip_regions(grid.n, grid.d, grid.radius, opts.ndamping, {0, 0, 0}, grid.n);
    inner_ = std::move(regions.inner);
    for (const auto& box : regions.damping) {
        detail::FoDampRegion<T, 9> rs, rv;
        rs.box = rv.box = box;
        for (auto& b : rs.psi) b = BoxArray<T>(box, 0);
        for (auto& b : rv.psi) b = BoxArray<T>(box, 0);
        stress_damp_.push_back(std::move(rs));
        velocity_damp_.push_back(std::move(rv));
    }
    inner_tiles_ = detail::tile_boxes(inner_);
}

template <typename T>
FieldT<T>& ElasticIsoEngine<T>::stress(int voigt) {
    switch (voigt) {
        case 0: return sxx_;
        case 1: return syy_;
        case 2: return szz_;
        case 3: return syz_;
        case 4: return sxz_;
        default: return sxy_;
    }
}

template <typename T>
void ElasticIsoEngine<T>::update_stress(const IndexBox& box, detail::FoDampRegion<T, 9>* damp) {
    const long long s[3] = {static_cast<long long>(grid_.stride_x()),
                            static_cast<long long>(grid_.stride_y()), 1};
    for (int i = box.lo[0]; i < box.hi[0]; ++i)
        for (int j = box.lo[1]; j < box.hi[1]; ++j)
            for (int k = box.lo[2]; k < box.hi[2]; ++k) {
                const std::size_t base = grid_.offset(i, j, k);
                const int gidx[3] = {i, j, k};
                auto cpml = [&](int term, int ax, T deriv) -> T {
                    if (!damp) return deriv;
                    const auto& A = profile_.axis[ax];
                    const T b = A.b[gidx[ax]], a = A.a[gidx[ax]], ik = A.inv_kappa[gidx[ax]];
                    T& psi = damp->psi[term].at(i, j, k);
                    psi = b * psi + a * deriv;
                    return deriv * ik + psi;
                };
                // D v, rows in the order xx, yy, zz, yz, xz, xy
                const T exx = cpml(0, 0, staggered_derivative_at(&vx_.data[base], s[0], ws_[0],
                                                                 DerivDir::Backward));
                const T eyy = cpml(1, 1, staggered_derivative_at(&vy_.data[base], s[1], ws_[1],
                                                                 DerivDir::Backward));
                const T ezz = cpml(2, 2, staggered_derivative_at(&vz_.data[base], s[2], ws_[2],
                                                                 DerivDir::Backward));
                const T dvx_dy = cpml(3, 1, staggered_derivative_at(&vx_.data[base], s[1], ws_[1],
                                                                    DerivDir::Forward));
                const T dvy_dx = cpml(4, 0, staggered_derivative_at(&vy_.data[base], s[0], ws_[0],
                                                                    DerivDir::Forward));
                const T dvx_dz = cpml(5, 2, staggered_derivative_at(&vx_.data[base], s[2], ws_[2],
                                                                    DerivDir::Forward));
                const T dvz_dx = cpml(6, 0, staggered_derivative_at(&vz_.data[base], s[0], ws_[0],
                                                                    DerivDir::Forward));
                const T dvy_dz = cpml(7, 2, staggered_derivative_at(&vy_.data[base], s[2], ws_[2],
                                                                    DerivDir::Forward));
                const T dvz_dy = cpml(8, 1, staggered_derivative_at(&vz_.data[base], s[1], ws_[1],
                                                                    DerivDir::Forward));
                const T lam = lambda_.data[base], mu = mu_.data[base];
                sxx_.data[base] += dt_ * ((lam + T(2) * mu) * exx + lam * (eyy + ezz));
                syy_.data[base] += dt_ * ((lam + T(2) * mu) * eyy + lam * (exx + ezz));
                szz_.data[base] += dt_ * ((lam + T(2) * mu) * ezz + lam * (exx + eyy));
                syz_.data[base] += dt_ * mu * (dvz_dy + dvy_dz);
                sxz_.data[base] += dt_ * mu * (dvz_dx + dvx_dz);
                sxy_.data[base] += dt_ * mu * (dvy_dx + dvx_dy);
            }
}

template <typename T>
void ElasticIsoEngine<T>::update_velocity(const IndexBox& box, detail::FoDampRegion<T, 9>* damp) {
    const long long s[3] = {static_cast<long long>(grid_.stride_x()),
                            static_cast<long long>(grid_.stride_y()), 1};
    for (int i = box.lo[0]; i < box.hi[0]; ++i)
        for (int j = box.lo[1]; j < box.hi[1]; ++j)
            for (int k = box.lo[2]; k < box.hi[2]; ++k) {
                const std::size_t base = grid_.offset(i, j, k);
                const int gidx[3] = {i, j, k};
                auto cpml = [&](int term, int ax, T deriv) -> T {
                    if (!damp) return deriv;
                    const auto& A = profile_.axis[ax];
                    const T b = A.b[gidx[ax]], a = A.a[gidx[ax]], ik = A.inv_kappa[gidx[ax]];
                    T& psi = damp->psi[term].at(i, j, k);
                    psi = b * psi + a * deriv;
                    return deriv * ik + psi;
                };
                // D^t sigma: same sparsity, opposite half-cell shifts
                const T dsxx_dx = cpml(0, 0, staggered_derivative_at(&sxx_.data[base], s[0], ws_[0],
                                                                     DerivDir::Forward));
                const T dsxy_dy = cpml(1, 1, staggered_derivative_at(&sxy_.data[base], s[1], ws_[1],
                                                                     DerivDir::Backward));
                const T dsxz_dz = cpml(2, 2, staggered_derivative_at(&sxz_.data[base], s[2], ws_[2],
                                                                     DerivDir::Backward));
                const T dsxy_dx = cpml(3, 0, staggered_derivative_at(&sxy_.data[base], s[0], ws_[0],
                                                                     DerivDir::Backward));
                const T dsyy_dy = cpml(4, 1, staggered_derivative_at(&syy_.data[base], s[1], ws_[1],
                                                                     DerivDir::Forward));
                const T dsyz_dz = cpml(5, 2, staggered_derivative_at(&syz_.data[base], s[2], ws_[2],
                                                                     DerivDir::Backward));
                const T dsxz_dx = cpml(6, 0, staggered_derivative_at(&sxz_.data[base], s[0], ws_[0],
                                                                     DerivDir::Backward));
                const T dsyz_dy = cpml(7, 1, staggered_derivative_at(&syz_.data[base], s[1], ws_[1],
                                                                     DerivDir::Backward));
                const T dszz_dz = cpml(8, 2, staggered_derivative_at(&szz_.data[base], s[2], ws_[2],
                                                                     DerivDir::Forward));
                const T inv_rho = dt_ / rho_.data[base];
                vx_.data[base] += inv_rho * (dsxx_dx + dsxy_dy + dsxz_dz);
                vy_.data[base] += inv_rho * (dsxy_dx + dsyy_dy + dsyz_dz);
                vz_.data[base] += inv_rho * (dsxz_dx + dsyz_dy + dszz_dz);
            }
}

template <typename T>
void ElasticIsoEngine<T>::step(T source_amplitude, std::optional<std::array<int, 3>> src,
                               const TaskRunner& runner) {
    const int ntiles = static_cast<int>(inner_tiles_.size());
    const int ndamp = static_cast<int>(stress_damp_.size());
    runner.run(ntiles + ndamp, [&](int t) {
        if (t < ntiles)
            update_stress(inner_tiles_[t], nullptr);
        else
            update_stress(stress_damp_[t - ntiles].box, &stress_damp_[t - ntiles]);
    });
    if (src) {
        const std::size_t base = grid_.offset((*src)[0], (*src)[1], (*src)[2]);
        const T inc = dt_ * scale_.data[base] * source_amplitude;
        sxx_.data[base] += inc;
        syy_.data[base] += inc;
        szz_.data[base] += inc;
    }
    if (free_surface_) apply_free_surface_stress(szz_, sxz_, syz_);
    runner.run(ntiles + ndamp, [&](int t) {
        if (t < ntiles)
            update_velocity(inner_tiles_[t], nullptr);
        else
            update_velocity(velocity_damp_[t - ntiles].box, &velocity_damp_[t - ntiles]);
    });
}

} // namespace minimod
