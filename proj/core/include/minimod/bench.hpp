#pragma once

#include <functional>
#include <string>
#include <vector>

#include "minimod/driver.hpp"

namespace minimod {

/// Floating-point operation tally accumulated by CountedValue.
struct OpTally {
    long long adds = 0;
    long long muls = 0;
    long long total() const { return adds + muls; }
};

/// Counting scalar: arithmetic on it records operations into a shared tally
/// instead of computing anything. The kernel cost models are obtained by
/// replaying the per-point update expressions with CountedValue operands, so
/// the counts track the implemented expression tree rather than a hand-kept
/// constant.
class CountedValue {
public:
    explicit CountedValue(OpTally* t) : t_(t) {}
    CountedValue operator+(CountedValue) const { ++t_->adds; return *this; }
    CountedValue operator-(CountedValue) const { ++t_->adds; return *this; }
    CountedValue operator*(CountedValue) const { ++t_->muls; return *this; }
    CountedValue operator/(CountedValue) const { ++t_->muls; return *this; } // div counted as mul
    CountedValue& operator+=(CountedValue) { ++t_->adds; return *this; }
    CountedValue& operator-=(CountedValue) { ++t_->adds; return *this; }

private:
    OpTally* t_;
};

/// Per-point cost of one time step under the compulsory-traffic model: each
/// wavefield or material array touched per point costs one 4-byte access
/// (reads and the writes both count; caches are ignored).
struct KernelCostModel {
    long long flops_per_point = 0;
    long long bytes_per_point = 0;
    double arithmetic_intensity = 0.0; // flops / bytes
};

KernelCostModel count_stencil_cost(Propagator propagator, int radius);

enum class WeakMode { Ideal, Practical };

/// Problem sizes for a weak-scaling sweep from a cubic baseline.
/// Ideal grows the x extent linearly: (r*base, base, base). Practical keeps
/// the domain cubic with side = base * r^(1/3) rounded up to a multiple
/// of 64.
std::vector<std::pair<int, std::array<int, 3>>> weak_scaling_plan(int base,
                                                                  const std::vector<int>& ranks,
                                                                  WeakMode mode);

enum class ScalingMode { Strong, WeakIdeal, WeakPractical };

struct ScalingRun {
    std::string run_id;
    Propagator propagator = Propagator::AcousticIsoCd;
    Target target = Target::Seq;
    int ranks = 1;
    int nthreads = 1;
    std::array<int, 3> n{0, 0, 0};
    int nsteps = 0;
    double kernel_s = 0.0;
    double modeling_s = 0.0;
    double points_per_s = 0.0; // interior points * steps / kernel_s
    double efficiency_pct = 0.0;
    bool ok = true;
    std::string error; // set when the run failed; timings are then zero
};

struct ScalingResult {
    ScalingMode mode = ScalingMode::Strong;
    std::vector<ScalingRun> runs;
};

/// Efficiency of run i against runs[0] as the baseline:
///   strong:          t0 * r0 / (ti * ri)
///   weak (both):     t0 * points_i / (ti * ri * points_0)
/// The weak form normalizes per point so the practical plan's rounded sizes
/// compare fairly; for ideal sizes it reduces to t0 / ti. Failed runs keep
/// efficiency 0.
void compute_efficiency(ScalingResult& result);

/// Executes one config and reports (kernel_s, modeling_s); injectable so the
/// efficiency arithmetic is testable on synthetic timings. The default
/// executes run() (ranks = 1) or run_distributed_inproc (ranks > 1, splitting
/// along x).
using ScalingExecutor = std::function<std::pair<double, double>(const SimConfig&, int ranks)>;

/// Runs every plan entry with the template config resized per entry. A
/// failing entry is recorded with its error message and the sweep continues.
ScalingResult run_scaling(const std::vector<std::pair<int, std::array<int, 3>>>& plan,
                          const SimConfig& config_template, ScalingMode mode,
                          const ScalingExecutor& executor = {});

/// CSV with the fixed header
/// run_id,propagator,target,ranks,nthreads,nx,ny,nz,nsteps,kernel_s,modeling_s,points_per_s,efficiency_pct
std::string emit_csv(const ScalingResult& result);
ScalingResult parse_csv(const std::string& csv);

/// Hardware ceilings for roofline plots, read from a JSON machine file:
/// { "peak_gflops": g, "peak_bw_gbs": { "<level>": gbs, ... } }.
/// Never measured; the file is authoritative.
struct MachineSpec {
    double peak_gflops = 0.0;
    std::vector<std::pair<std::string, double>> bw_levels; // name -> GB/s
};

MachineSpec load_machine_file(const std::string& path);

/// Static SVG charts (atomic write: tmp + rename).
void emit_efficiency_plot(const ScalingResult& result, const std::string& path);
void emit_roofline_plot(const KernelCostModel& cost, const MachineSpec& machine,
                        double achieved_gflops, const std::string& path);

/// Writes <prefix>.csv, and with `plots` also <prefix>_efficiency.svg plus,
/// given a machine spec, <prefix>_roofline.svg. Returns the file paths.
std::vector<std::string> emit_report(const ScalingResult& result, const KernelCostModel& cost,
                                     const std::string& prefix, bool plots,
                                     const MachineSpec* machine = nullptr);

} // namespace minimod
