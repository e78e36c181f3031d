#pragma once

#include "cqed/hilbert.hpp"
#include "cqed/params.hpp"
#include "cqed/philox.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cqed {

enum class Scheme { diffusion, jump };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view text);

/// Product initial state |n>|s1>|s2>, or a coherent field when `coherent` is set.
struct InitialState {
    int fock = 1;
    int s1 = 0;
    int s2 = 0;
    std::optional<cplx> coherent;
};

/// Observable labels: a (complex, stored as re_a and im_a), n, s1x, s1y, s1z,
/// s2x, s2y, s2z, pe (excited population of the external atom).
std::vector<std::string> default_observables();

/// Complex Wiener paths with E|dW|^2 = dt, one per channel. The increment over
/// coarse interval k is drawn directly; interior points are Brownian-bridge
/// midpoints keyed by (k, channel, level, index), so every refinement of the
/// time grid sees the same path.
class WienerPaths {
public:
    static constexpr int tick_bits = 32;
    static constexpr std::uint64_t full_ticks = std::uint64_t{1} << tick_bits;

    WienerPaths(std::uint64_t seed, double coarse_dt) : rng_(seed), dt_(coarse_dt) {}

    /// W(k dt + tick dt / full_ticks) - W(k dt) for tick in [0, full_ticks].
    cplx value(std::uint64_t k, std::uint32_t channel, std::uint64_t tick) const;

    /// Uniform draw in (0, 1) from a stream disjoint from the Wiener paths.
    double uniform(std::uint64_t k, std::uint32_t stream) const;

private:
    cplx draw(std::uint64_t k, std::uint32_t channel, int level, std::uint32_t index) const;

    Philox4x32 rng_;
    double dt_;
};

struct TrajectoryConfig {
    SystemParams params;
    int n_fock = 10;
    Scheme scheme = Scheme::diffusion;
    std::uint64_t seed = 1;
    double t_end = 10.0;
    double sample_dt = 0.01;  // also the coarse grid of the Wiener paths
    InitialState initial;
    std::vector<std::string> observables = default_observables();

    double tolerance = 1e-3;       // per-step error of the diffusion scheme (step doubling)
    double norm_tolerance = 1e-6;  // per-step norm drift before renormalization
    int max_refinement = 30;       // finest diffusion step is sample_dt / 2^max_refinement
    double truncation_tol = 1e-6;  // top-two Fock populations at each sample; <= 0 disables

    /// Accumulate the reduced field state over samples with t >= field_average_from.
    std::optional<double> field_average_from;

    void validate() const;
};

struct JumpEvent {
    double time = 0.0;
    int channel = 0;
};

struct TrajectoryRecord {
    TrajectoryConfig config;
    std::vector<double> time;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // data[column][sample]
    std::vector<JumpEvent> events;

    Matrix field_average;  // empty unless requested
    int field_samples = 0;

    long accepted_steps = 0;
    long rejected_steps = 0;
    double max_norm_drift = 0.0;      // largest |1 - ||psi||| before renormalization
    double max_renorm_error = 0.0;    // largest |1 - ||psi||| after renormalization
    double max_hermitian_imag = 0.0;  // largest |Im <O>| over Hermitian observables

    /// Throws InvalidArgument for an unknown column.
    const std::vector<double>& column(std::string_view name) const;
};

/// One stochastic unraveling of the cascaded master equation. Throws
/// TruncationError when a sampled state populates the top Fock levels and
/// StiffnessFailure when the diffusion step refines past max_refinement.
TrajectoryRecord run_trajectory(const TrajectoryConfig& cfg);

/// The external atom alone, driven by the coherent amplitude
/// adiabatic_steady_state(params).Y_pp and decaying through the forwards and
/// sideways channels with the same noise streams as run_trajectory. Requested
/// labels other than s2x, s2y, s2z and pe are skipped.
TrajectoryRecord run_reduced_resfl_trajectory(const TrajectoryConfig& cfg);

/// Runs one trajectory per seed on a pool of worker threads. The pool size is
/// `workers`, else the CQED_WORKERS environment variable, else the hardware
/// concurrency. Results are in seed order.
std::vector<TrajectoryRecord> run_ensemble(const TrajectoryConfig& cfg,
                                           const std::vector<std::uint64_t>& seeds,
                                           int workers = 0);

int default_workers();

struct BistabilityOptions {
    double hysteresis = 0.1;          // fraction of |Im alpha_ss| (rms of Im <a> below threshold)
    double smoothing = 1.0;           // centred running mean of Im <a> before labelling, in 1/kappa; 0 disables
    double coincidence_window = 2.0;  // in units of 1/kappa
    double q_extent = 0.0;            // half-width of the Q grid; 0 picks 1.6 |alpha_ss| + 3
    int q_points = 121;
    double q_prominence = 0.1;        // fraction of the global maximum
    double q_conjugate_tol = 1.0;     // |alpha_1 - conj(alpha_2)|; 1 is the width of a coherent state in Q
};

struct QPeak {
    cplx alpha{0.0, 0.0};
    double value = 0.0;
};

struct BistabilityReport {
    double threshold = 0.0;             // hysteresis half-width applied to Im <a>
    int switches = 0;
    int raw_switches = 0;               // same labelling without smoothing
    std::vector<double> dwell_times;    // completed segments only
    double mean_dwell = 0.0;
    double sign_correlation = 0.0;      // duration-weighted segment mean of sign(s1y) sign(s2y)
    double coincidence = 0.0;           // fraction of field switches near an s2y flip
    double mean_photons = 0.0;
    std::vector<QPeak> q_peaks;         // prominent local maxima of the averaged Q function
    int q_raw_maxima = 0;               // every strict local maximum on the grid
    bool q_conjugate = false;           // two peaks at conjugate amplitudes
};

/// Dwell statistics of the field phase across an ensemble. Throws
/// NoSwitchesDetected when no record switches.
BistabilityReport bistability_statistics(const std::vector<TrajectoryRecord>& records,
                                         const BistabilityOptions& opts = {});

/// Local maxima of Q on an nx by ny grid (x fastest, 8-neighbour) whose
/// topographic prominence is at least `min_prominence` times the global
/// maximum. The global maximum itself always counts. With min_prominence = 0
/// every strict local maximum is returned.
/// Exactly two peaks, off the real axis by more than `tolerance`, with
/// |alpha_1 - conj(alpha_2)| <= tolerance.
bool conjugate_pair(const std::vector<QPeak>& peaks, double tolerance);

std::vector<QPeak> q_local_maxima(const std::vector<double>& q, const std::vector<cplx>& grid,
                                  int nx, int ny, double min_prominence = 0.1);

}  // namespace cqed
