#include "cqed/trajectories.hpp"

#include "cqed/errors.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/meanfield.hpp"
#include "cqed/philox.hpp"

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

namespace cqed {

std::string_view to_string(Scheme s) { return s == Scheme::diffusion ? "diffusion" : "jump"; }

Scheme parse_scheme(std::string_view text) {
    if (text == "diffusion") return Scheme::diffusion;
    if (text == "jump") return Scheme::jump;
    throw InvalidArgument("unknown scheme '" + std::string(text) + "'");
}

std::vector<std::string> default_observables() { return {"a", "n", "s1y", "s1z", "s2y", "s2z", "pe"}; }

namespace {

constexpr int kTickBits = WienerPaths::tick_bits;
constexpr std::uint64_t kFullTicks = WienerPaths::full_ticks;
constexpr std::uint32_t kJumpStream = 0xFFFFu;

}  // namespace

cplx WienerPaths::value(std::uint64_t k, std::uint32_t channel, std::uint64_t tick) const {
    if (tick == 0) return {0.0, 0.0};
    cplx hi_w = std::sqrt(dt_) * draw(k, channel, 0, 0);
    if (tick >= full_ticks) return hi_w;
    std::uint64_t lo = 0, hi = full_ticks;
    cplx lo_w{0.0, 0.0};
    for (int level = 1;; ++level) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        const double span = static_cast<double>(hi - lo) / static_cast<double>(full_ticks) * dt_;
        const auto index = static_cast<std::uint32_t>(mid >> (tick_bits - level));
        const cplx mid_w = 0.5 * (lo_w + hi_w) + std::sqrt(span / 4.0) * draw(k, channel, level, index);
        if (tick == mid) return mid_w;
        if (tick < mid) {
            hi = mid;
            hi_w = mid_w;
        } else {
            lo = mid;
            lo_w = mid_w;
        }
    }
}

double WienerPaths::uniform(std::uint64_t k, std::uint32_t stream) const {
    return rng_.uniform_pair({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32), kJumpStream << 8,
                              stream})[0];
}

cplx WienerPaths::draw(std::uint64_t k, std::uint32_t channel, int level, std::uint32_t index) const {
    return rng_.complex_normal({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                                (channel << 8) | static_cast<std::uint32_t>(level), index});
}

void TrajectoryConfig::validate() const {
    params.validate();
    if (n_fock < 1) throw InvalidArgument("n_fock must be at least 1");
    if (!(sample_dt > 0.0)) throw InvalidArgument("sample_dt must be positive");
    if (!(t_end >= sample_dt)) throw InvalidArgument("t_end must be at least sample_dt");
    if (!(tolerance > 0.0) || !(norm_tolerance > 0.0)) throw InvalidArgument("tolerances must be positive");
    if (max_refinement < 1 || max_refinement >= kTickBits)
        throw InvalidArgument("max_refinement must lie in [1, 31]");
    if (initial.fock < 0 || initial.fock > n_fock) throw InvalidArgument("initial Fock state outside the space");
    if (initial.s1 < 0 || initial.s1 > 1 || initial.s2 < 0 || initial.s2 > 1)
        throw InvalidArgument("initial atomic states must be 0 or 1");
    if (observables.empty()) throw InvalidArgument("no observables requested");
}

const std::vector<double>& TrajectoryRecord::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return data[i];
    throw InvalidArgument("record has no column '" + std::string(name) + "'");
}

namespace {

using RowOp = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

struct Channel {
    std::uint32_t id;
    RowOp C;
};

struct Observable {
    std::string name;
    SparseOp op;
    bool complex_valued = false;
};

struct Model {
    int dim = 0;
    RowOp G;  // -i H - (1/2) sum C+ C
    std::vector<Channel> channels;
    std::vector<Observable> observables;
    std::optional<SpaceLayout> layout;  // full model only
};

RowOp effective_generator(const SparseOp& H, const std::vector<Channel>& channels) {
    SparseOp G = cplx(0.0, -1.0) * H;
    for (const Channel& c : channels) {
        const SparseOp C(c.C);
        G -= 0.5 * SparseOp(C.adjoint() * C);
    }
    G.prune(cplx(0.0, 0.0));
    return RowOp(G);
}

void add_channel(std::vector<Channel>& out, std::uint32_t id, const SparseOp& C) {
    if (C.norm() > 0.0) out.push_back({id, C});
}

Observable make_observable(const std::string& name, const SparseOp& m, const SparseOp& p, const SparseOp& z,
                           const SparseOp& id) {
    const cplx i(0.0, 1.0);
    if (name.ends_with("x")) return {name, SparseOp(p + m), false};
    if (name.ends_with("y")) return {name, SparseOp(-i * (p - m)), false};
    if (name.ends_with("z")) return {name, z, false};
    return {name, SparseOp(0.5 * (id + z)), false};  // pe
}

Model full_model(const TrajectoryConfig& cfg) {
    const SpaceLayout layout(cfg.n_fock);
    const OperatorSet ops = build_operators(layout);
    Model m;
    m.dim = layout.total_dim();
    m.layout = layout;
    const auto C = collapse_operators(cfg.params, ops);
    for (std::size_t k = 0; k < C.size(); ++k) add_channel(m.channels, static_cast<std::uint32_t>(k), C[k]);
    m.G = effective_generator(hamiltonian(cfg.params, ops), m.channels);
    for (const std::string& name : cfg.observables) {
        if (name == "a") {
            m.observables.push_back({name, ops.a, true});
        } else if (name == "n") {
            m.observables.push_back({name, SparseOp(ops.ad * ops.a), false});
        } else if (name == "s1x" || name == "s1y" || name == "s1z") {
            m.observables.push_back(make_observable(name, ops.s1m, ops.s1p, ops.s1z, ops.id));
        } else if (name == "s2x" || name == "s2y" || name == "s2z" || name == "pe") {
            m.observables.push_back(make_observable(name, ops.s2m, ops.s2p, ops.s2z, ops.id));
        } else {
            throw InvalidArgument("unknown observable '" + name + "'");
        }
    }
    return m;
}

Model reduced_model(const TrajectoryConfig& cfg) {
    const SystemParams& p = cfg.params;
    if (!(p.gamma > 0.0)) throw InvalidArgument("reduced trajectory needs gamma > 0");
    SparseOp sm(2, 2), sp(2, 2), sz(2, 2), id(2, 2);
    sm.insert(0, 1) = 1.0;
    sp.insert(1, 0) = 1.0;
    sz.insert(0, 0) = -1.0;
    sz.insert(1, 1) = 1.0;
    id.setIdentity();
    Model m;
    m.dim = 2;
    add_channel(m.channels, 0, SparseOp(std::sqrt(p.focusing * p.gamma / 2.0) * sm));
    add_channel(m.channels, 1, SparseOp(std::sqrt((2.0 - p.focusing) * p.gamma / 2.0) * sm));
    // Rabi term i E (s- - s+) with E = gamma Y / (2 sqrt 2), Y the dressed drive.
    const double E = p.gamma * adiabatic_steady_state(p).Y_pp / (2.0 * std::sqrt(2.0));
    const SparseOp H = cplx(0.0, E) * SparseOp(sm - sp);
    m.G = effective_generator(H, m.channels);
    for (const std::string& name : cfg.observables)
        if (name == "s2x" || name == "s2y" || name == "s2z" || name == "pe")
            m.observables.push_back(make_observable(name, sm, sp, sz, id));
    if (m.observables.empty()) throw InvalidArgument("reduced trajectory records only s2x, s2y, s2z, pe");
    return m;
}

Vector initial_vector(const TrajectoryConfig& cfg, const Model& m) {
    Vector psi = Vector::Zero(m.dim);
    if (!m.layout) {
        psi(cfg.initial.s2) = 1.0;
        return psi;
    }
    const SpaceLayout& l = *m.layout;
    if (cfg.initial.coherent) {
        const Vector amp = coherent_amplitudes(cfg.n_fock, *cfg.initial.coherent);
        for (int n = 0; n <= cfg.n_fock; ++n) psi(l.index(n, cfg.initial.s1, cfg.initial.s2)) = amp(n);
    } else {
        psi(l.index(cfg.initial.fock, cfg.initial.s1, cfg.initial.s2)) = 1.0;
    }
    psi.normalize();
    return psi;
}

class Recorder {
public:
    Recorder(const TrajectoryConfig& cfg, const Model& m, TrajectoryRecord& rec) : cfg_(cfg), m_(m), rec_(rec) {
        for (const Observable& o : m.observables) {
            if (o.complex_valued) {
                rec.columns.push_back("re_" + o.name);
                rec.columns.push_back("im_" + o.name);
            } else {
                rec.columns.push_back(o.name);
            }
        }
        rec.data.assign(rec.columns.size(), {});
        if (cfg.field_average_from && m.layout) rec.field_average = Matrix::Zero(cfg.n_fock + 1, cfg.n_fock + 1);
    }

    /// `psi` need not be normalized.
    void sample(double t, const Vector& psi) {
        const double norm2 = psi.squaredNorm();
        rec_.time.push_back(t);
        std::size_t col = 0;
        for (const Observable& o : m_.observables) {
            const cplx v = psi.dot(o.op * psi) / norm2;
            if (o.complex_valued) {
                rec_.data[col++].push_back(v.real());
                rec_.data[col++].push_back(v.imag());
            } else {
                rec_.max_hermitian_imag = std::max(rec_.max_hermitian_imag, std::abs(v.imag()));
                rec_.data[col++].push_back(v.real());
            }
        }
        if (!m_.layout) return;
        const SpaceLayout& l = *m_.layout;
        if (cfg_.truncation_tol > 0.0) {
            double top = 0.0;
            for (int n = std::max(0, cfg_.n_fock - 1); n <= cfg_.n_fock; ++n)
                for (int s = 0; s < 4; ++s) top += std::norm(psi(l.index(n, 0, 0) + s));
            if (top / norm2 > cfg_.truncation_tol) {
                throw TruncationError("trajectory: top Fock population " + std::to_string(top / norm2) +
                                      " at t = " + std::to_string(t) + " with n_fock = " +
                                      std::to_string(cfg_.n_fock));
            }
        }
        if (cfg_.field_average_from && t >= *cfg_.field_average_from) {
            rec_.field_average += partial_trace_field(StateVector(l, psi / std::sqrt(norm2)));
            ++rec_.field_samples;
        }
    }

    void finish() {
        if (rec_.field_samples > 0) rec_.field_average /= static_cast<double>(rec_.field_samples);
    }

private:
    const TrajectoryConfig& cfg_;
    const Model& m_;
    TrajectoryRecord& rec_;
};

long sample_count(const TrajectoryConfig& cfg) { return std::lround(cfg.t_end / cfg.sample_dt); }

/// Quantum state diffusion in Stratonovich form. With normalized expectations the
/// Ito-Stratonovich correction only rescales psi, so it is absorbed into the drift
/// as (1/2) Var(C_k) psi, which keeps the exact flow norm-preserving.
class DiffusionStepper {
public:
    explicit DiffusionStepper(const Model& m) : m_(m), k_(4, Vector(m.dim)), u_(m.channels.size(), Vector(m.dim)) {}

    /// One fourth-order Runge-Kutta step of psi' = h a(psi) + sum_k b_k(psi) dW_k with the
    /// increments frozen over the step.
    Vector step(const Vector& psi, double h, const std::vector<cplx>& dW) {
        field(psi, h, dW, k_[0]);
        tmp_ = psi + 0.5 * k_[0];
        field(tmp_, h, dW, k_[1]);
        tmp_ = psi + 0.5 * k_[1];
        field(tmp_, h, dW, k_[2]);
        tmp_ = psi + k_[2];
        field(tmp_, h, dW, k_[3]);
        return psi + (k_[0] + 2.0 * k_[1] + 2.0 * k_[2] + k_[3]) / 6.0;
    }

private:
    void field(const Vector& psi, double h, const std::vector<cplx>& dW, Vector& out) {
        const double norm2 = psi.squaredNorm();
        out.noalias() = m_.G * psi;
        out *= h;
        cplx scalar{0.0, 0.0};
        for (std::size_t c = 0; c < m_.channels.size(); ++c) {
            Vector& u = u_[c];
            u.noalias() = m_.channels[c].C * psi;
            const cplx mean = psi.dot(u) / norm2;
            const double second = u.squaredNorm() / norm2;
            const double var = second - std::norm(mean);
            out += (h * std::conj(mean) + dW[c]) * u;
            scalar += h * (-0.5 * std::norm(mean) + 0.5 * var) - mean * dW[c];
        }
        out += scalar * psi;
    }

    const Model& m_;
    std::vector<Vector> k_;
    std::vector<Vector> u_;
    Vector tmp_;
};

void run_diffusion(const TrajectoryConfig& cfg, const Model& m, TrajectoryRecord& rec) {
    Recorder out(cfg, m, rec);
    const WienerPaths noise(cfg.seed, cfg.sample_dt);
    DiffusionStepper stepper(m);
    const std::size_t nch = m.channels.size();
    std::vector<cplx> w_pos(nch), w_half(nch), w_end(nch), dW(nch), dW1(nch), dW2(nch);

    Vector psi = initial_vector(cfg, m);
    out.sample(0.0, psi);
    const long n = sample_count(cfg);
    const double tick = cfg.sample_dt / static_cast<double>(kFullTicks);
    int level = 4;
    for (long k = 0; k < n; ++k) {
        const auto kk = static_cast<std::uint64_t>(k);
        std::uint64_t pos = 0;
        for (std::size_t c = 0; c < nch; ++c) w_pos[c] = 0.0;
        while (pos < kFullTicks) {
            while ((pos & ((kFullTicks >> level) - 1)) != 0) ++level;
            if (level > cfg.max_refinement) {
                throw StiffnessFailure("diffusion step refined below sample_dt / 2^" +
                                       std::to_string(cfg.max_refinement) + " at t = " +
                                       std::to_string((static_cast<double>(k) + pos / double(kFullTicks)) * cfg.sample_dt));
            }
            const std::uint64_t s = kFullTicks >> level;
            for (std::size_t c = 0; c < nch; ++c) {
                w_half[c] = noise.value(kk, m.channels[c].id, pos + s / 2);
                w_end[c] = noise.value(kk, m.channels[c].id, pos + s);
                dW[c] = w_end[c] - w_pos[c];
                dW1[c] = w_half[c] - w_pos[c];
                dW2[c] = w_end[c] - w_half[c];
            }
            const double h = static_cast<double>(s) * tick;
            const Vector full = stepper.step(psi, h, dW);
            const Vector half = stepper.step(stepper.step(psi, 0.5 * h, dW1), 0.5 * h, dW2);
            const double err = (full - half).norm();
            const double drift = std::abs(half.norm() - 1.0);
            if (err <= cfg.tolerance && drift <= cfg.norm_tolerance) {
                psi = half / half.norm();
                rec.max_renorm_error = std::max(rec.max_renorm_error, std::abs(psi.norm() - 1.0));
                pos += s;
                w_pos = w_end;
                ++rec.accepted_steps;
                rec.max_norm_drift = std::max(rec.max_norm_drift, drift);
                if (err < 0.25 * cfg.tolerance && drift < 0.25 * cfg.norm_tolerance && level > 0) --level;
            } else {
                ++rec.rejected_steps;
                ++level;
            }
        }
        out.sample(static_cast<double>(k + 1) * cfg.sample_dt, psi);
    }
    out.finish();
}

void run_jump(const TrajectoryConfig& cfg, const Model& m, TrajectoryRecord& rec) {
    namespace ode = boost::numeric::odeint;
    using State = Eigen::VectorXd;
    Recorder out(cfg, m, rec);
    const WienerPaths noise(cfg.seed, cfg.sample_dt);
    const int dim = m.dim;

    const auto as_complex = [dim](const State& x) {
        return Eigen::Map<const Vector>(reinterpret_cast<const cplx*>(x.data()), dim);
    };
    const auto as_real = [dim](const Vector& v) {
        return State(Eigen::Map<const State>(reinterpret_cast<const double*>(v.data()), 2 * dim));
    };
    const auto rhs = [&](const State& x, State& dx, double) {
        dx.resize(2 * dim);
        Eigen::Map<Vector>(reinterpret_cast<cplx*>(dx.data()), dim).noalias() = m.G * as_complex(x);
    };

    Vector psi = initial_vector(cfg, m);
    out.sample(0.0, psi);
    const long n = sample_count(cfg);
    const double span = cfg.t_end;
    std::uint64_t jumps = 0;
    double threshold = noise.uniform(jumps, 0);

    using Stepper = ode::runge_kutta_dopri5<State, double, State, double, ode::vector_space_algebra>;
    auto stepper = ode::make_dense_output(1e-12, 1e-10, Stepper());
    stepper.initialize(as_real(psi), 0.0, 0.1 * cfg.sample_dt);
    State probe(2 * dim);
    long next = 1;
    while (next <= n) {
        const double t0 = stepper.current_time();
        try {
            stepper.do_step(rhs);
        } catch (const ode::odeint_error& e) {
            throw StiffnessFailure(std::string("jump trajectory: ") + e.what());
        }
        if (!(stepper.current_time_step() >= 1e-12 * span))
            throw StiffnessFailure("jump trajectory: step size collapsed at t = " + std::to_string(t0));
        const double t1 = stepper.current_time();
        double tau = std::numeric_limits<double>::infinity();
        if (stepper.current_state().squaredNorm() < threshold) {
            // The norm decreases monotonically, so bisection brackets the jump time.
            double lo = t0, hi = t1;
            for (int it = 0; it < 60 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                stepper.calc_state(mid, probe);
                (probe.squaredNorm() < threshold ? hi : lo) = mid;
            }
            tau = hi;
        }
        for (; next <= n; ++next) {
            const double ts = static_cast<double>(next) * cfg.sample_dt;
            if (ts > t1 || ts >= tau) break;
            stepper.calc_state(ts, probe);
            out.sample(ts, as_complex(probe));
        }
        if (std::isfinite(tau)) {
            stepper.calc_state(tau, probe);
            psi = as_complex(probe);
            std::vector<double> weight(m.channels.size());
            double total = 0.0;
            for (std::size_t c = 0; c < m.channels.size(); ++c) total += weight[c] = (m.channels[c].C * psi).squaredNorm();
            double pick = noise.uniform(jumps, 1) * total;
            std::size_t chosen = 0;
            while (chosen + 1 < weight.size() && pick >= weight[chosen]) pick -= weight[chosen++];
            psi = m.channels[chosen].C * psi;
            psi.normalize();
            rec.max_renorm_error = std::max(rec.max_renorm_error, std::abs(psi.norm() - 1.0));
            rec.events.push_back({tau, static_cast<int>(m.channels[chosen].id)});
            ++jumps;
            threshold = noise.uniform(jumps, 0);
            stepper.initialize(as_real(psi), tau, std::max(stepper.current_time_step(), 1e-6 * cfg.sample_dt));
        }
        ++rec.accepted_steps;
    }
    out.finish();
}

TrajectoryRecord run_model(const TrajectoryConfig& cfg, const Model& m) {
    TrajectoryRecord rec;
    rec.config = cfg;
    if (cfg.scheme == Scheme::diffusion) {
        run_diffusion(cfg, m, rec);
    } else {
        run_jump(cfg, m, rec);
    }
    return rec;
}

}  // namespace

TrajectoryRecord run_trajectory(const TrajectoryConfig& cfg) {
    cfg.validate();
    return run_model(cfg, full_model(cfg));
}

TrajectoryRecord run_reduced_resfl_trajectory(const TrajectoryConfig& cfg) {
    cfg.validate();
    return run_model(cfg, reduced_model(cfg));
}

int default_workers() {
    if (const char* env = std::getenv("CQED_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<TrajectoryRecord> run_ensemble(const TrajectoryConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                           int workers) {
    cfg.validate();
    const Model m = full_model(cfg);
    const std::size_t n = seeds.size();
    std::vector<TrajectoryRecord> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                TrajectoryConfig c = cfg;
                c.seed = seeds[i];
                out[i] = run_model(c, m);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int pool = static_cast<int>(std::min<std::size_t>(n, workers > 0 ? workers : default_workers()));
    std::vector<std::thread> threads;
    for (int t = 1; t < pool; ++t) threads.emplace_back(work);
    work();
    for (std::thread& t : threads) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

namespace {

/// Hysteresis labels: +1 above `th`, -1 below `-th`, otherwise the previous
/// label (0 before the first crossing).
std::vector<int> hysteresis_labels(const std::vector<double>& x, double th) {
    std::vector<int> out(x.size());
    int state = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > th) state = 1;
        if (x[i] < -th) state = -1;
        out[i] = state;
    }
    return out;
}

struct Segment {
    std::size_t begin = 0;  // first sample with the label
    std::size_t end = 0;    // one past the last
    int label = 0;
};

std::vector<Segment> segments_of(const std::vector<int>& labels) {
    std::vector<Segment> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 0) continue;
        if (out.empty() || out.back().label != labels[i]) out.push_back({i, i + 1, labels[i]});
        else out.back().end = i + 1;
    }
    return out;
}

double rms(const std::vector<double>& x) {
    double s = 0.0;
    for (const double v : x) s += v * v;
    return x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(x.size()));
}

/// Centred running mean over `width` samples, shrinking at the ends.
std::vector<double> running_mean(const std::vector<double>& x, std::size_t width) {
    if (width <= 1) return x;
    std::vector<double> prefix(x.size() + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i];
    std::vector<double> out(x.size());
    const std::size_t half = width / 2;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(x.size(), i + half + 1);
        out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
    return out;
}

int sign_of_mean(const std::vector<double>& x, const Segment& seg) {
    double s = 0.0;
    for (std::size_t i = seg.begin; i < seg.end; ++i) s += x[i];
    return s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
}

}  // namespace

std::vector<QPeak> q_local_maxima(const std::vector<double>& q, const std::vector<cplx>& grid, int nx, int ny,
                                  double min_prominence) {
    if (static_cast<int>(q.size()) != nx * ny || grid.size() != q.size())
        throw InvalidArgument("Q grid size mismatch");
    if (q.empty()) return {};
    const double top = *std::max_element(q.begin(), q.end());

    // Flood from the top down; a component's peak loses its prominence at the
    // level where it merges into a component with a higher peak.
    std::vector<int> order(q.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return q[a] > q[b]; });
    std::vector<int> parent(q.size(), -1), peak(q.size(), -1);
    std::vector<double> prominence(q.size(), 0.0);
    auto root = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (const int i : order) {
        parent[i] = i;
        peak[i] = i;
        const int ix = i % nx, iy = i / nx;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int jx = ix + dx, jy = iy + dy;
                if ((dx == 0 && dy == 0) || jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
                const int j = jy * nx + jx;
                if (parent[j] < 0) continue;
                const int ri = root(i), rj = root(j);
                if (ri == rj) continue;
                const bool keep_i = q[peak[ri]] > q[peak[rj]] || (q[peak[ri]] == q[peak[rj]] && peak[ri] < peak[rj]);
                const int hi = keep_i ? ri : rj, lo = keep_i ? rj : ri;
                prominence[peak[lo]] = q[peak[lo]] - q[i];
                parent[lo] = hi;
            }
    }
    prominence[peak[root(order.front())]] = top;

    std::vector<QPeak> out;
    for (int iy = 1; iy + 1 < ny; ++iy) {
        for (int ix = 1; ix + 1 < nx; ++ix) {
            const int i = iy * nx + ix;
            const double v = q[i];
            bool strict = true;
            for (int dy = -1; dy <= 1 && strict; ++dy)
                for (int dx = -1; dx <= 1 && strict; ++dx)
                    if ((dx != 0 || dy != 0) && !(v > q[(iy + dy) * nx + ix + dx])) strict = false;
            if (strict && prominence[i] >= min_prominence * top) out.push_back({grid[i], v});
        }
    }
    std::sort(out.begin(), out.end(), [](const QPeak& a, const QPeak& b) { return a.value > b.value; });
    return out;
}

BistabilityReport bistability_statistics(const std::vector<TrajectoryRecord>& records,
                                         const BistabilityOptions& opts) {
    if (records.empty()) throw InvalidArgument("bistability statistics need at least one record");
    BistabilityReport rep;
    double weighted_sign = 0.0, weight = 0.0, photons = 0.0;
    long photon_samples = 0;
    int matched = 0;
    Matrix field;
    int field_samples = 0;
    double alpha_scale = 0.0;

    for (const TrajectoryRecord& r : records) {
        const std::vector<double>& t = r.time;
        const std::vector<double>& im = r.column("im_a");
        const std::vector<double>& s1 = r.column("s1y");
        const std::vector<double>& s2 = r.column("s2y");
        const NeoclassicalField nf = neoclassical_field(r.config.params);
        const double th = nf.bimodal ? opts.hysteresis * std::abs(nf.plus.imag()) : opts.hysteresis * rms(im);
        rep.threshold = th;
        alpha_scale = std::max(alpha_scale, nf.bimodal ? std::abs(nf.plus) : std::sqrt(2.0) * rms(im));

        std::size_t width = 1;
        if (opts.smoothing > 0.0 && t.size() > 1)
            width = static_cast<std::size_t>(std::lround(opts.smoothing / r.config.params.kappa / (t[1] - t[0])));
        const std::vector<Segment> segs = segments_of(hysteresis_labels(running_mean(im, width), th));
        rep.raw_switches += std::max(0, static_cast<int>(segments_of(hysteresis_labels(im, th)).size()) - 1);
        const std::vector<Segment> atom = segments_of(hysteresis_labels(s2, opts.hysteresis * rms(s2)));
        std::vector<double> atom_flips;
        for (std::size_t i = 1; i < atom.size(); ++i) atom_flips.push_back(t[atom[i].begin]);

        const double window = opts.coincidence_window / r.config.params.kappa;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const Segment& seg = segs[i];
            const double duration = t[seg.end - 1] - t[seg.begin];
            const int l1 = sign_of_mean(s1, seg);
            const int l2 = sign_of_mean(s2, seg);
            weighted_sign += duration * l1 * l2;
            weight += duration;
            if (i == 0) continue;
            ++rep.switches;
            const double ts = t[seg.begin];
            if (std::any_of(atom_flips.begin(), atom_flips.end(),
                            [&](double f) { return std::abs(f - ts) <= window; }))
                ++matched;
            if (i + 1 < segs.size()) rep.dwell_times.push_back(t[segs[i + 1].begin] - ts);
        }

        if (std::find(r.columns.begin(), r.columns.end(), "n") != r.columns.end()) {
            const std::vector<double>& n = r.column("n");
            const double from = r.config.field_average_from.value_or(t.front());
            for (std::size_t i = 0; i < t.size(); ++i)
                if (t[i] >= from) {
                    photons += n[i];
                    ++photon_samples;
                }
        }
        if (r.field_samples > 0) {
            if (field.size() == 0) field = Matrix::Zero(r.field_average.rows(), r.field_average.cols());
            if (field.rows() != r.field_average.rows()) throw InvalidArgument("records use different n_fock");
            field += static_cast<double>(r.field_samples) * r.field_average;
            field_samples += r.field_samples;
        }
    }
    if (rep.switches == 0) throw NoSwitchesDetected("no field-phase switch in " + std::to_string(records.size()) + " records");

    if (!rep.dwell_times.empty()) {
        double s = 0.0;
        for (const double d : rep.dwell_times) s += d;
        rep.mean_dwell = s / static_cast<double>(rep.dwell_times.size());
    }
    rep.sign_correlation = weight > 0.0 ? weighted_sign / weight : 0.0;
    rep.coincidence = static_cast<double>(matched) / rep.switches;
    rep.mean_photons = photon_samples > 0 ? photons / static_cast<double>(photon_samples) : 0.0;

    if (field_samples > 0) {
        field /= static_cast<double>(field_samples);
        const double extent = opts.q_extent > 0.0 ? opts.q_extent : 1.6 * alpha_scale + 3.0;
        const int np = opts.q_points;
        const std::vector<cplx> grid = complex_grid(-extent, extent, np, -extent, extent, np);
        const HusimiResult q = husimi_q(field, grid);
        rep.q_peaks = q_local_maxima(q.values, grid, np, np, opts.q_prominence);
        rep.q_raw_maxima = static_cast<int>(q_local_maxima(q.values, grid, np, np, 0.0).size());
        rep.q_conjugate = conjugate_pair(rep.q_peaks, opts.q_conjugate_tol);
    }
    return rep;
}

bool conjugate_pair(const std::vector<QPeak>& peaks, double tolerance) {
    return peaks.size() == 2 && std::abs(peaks[0].alpha - std::conj(peaks[1].alpha)) <= tolerance &&
           std::abs(peaks[0].alpha.imag()) > tolerance && std::abs(peaks[1].alpha.imag()) > tolerance;
}

}  // namespace cqed
