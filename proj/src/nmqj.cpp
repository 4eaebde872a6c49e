#include "qbatt/nmqj.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qbatt/error.hpp"

namespace qbatt {

ComplexMatrix jump_operator() { return on_charger(pauli::x()); }

TrajectoryHierarchy::TrajectoryHierarchy(const StateVector4& psi0, int n_max)
    : n_max_(n_max), psi0_(psi0.normalized()), frame_(ComplexMatrix::identity(4))
{
    if (n_max < 0 || n_max > kMaxJumpLevel) {
        throw ValidationError("TrajectoryHierarchy: n_max must be 0, 1 or 2 (got " + std::to_string(n_max) + ")");
    }
}

double TrajectoryHierarchy::K1_sum() const
{
    double sum = 0.0;
    for (const auto& e : level1_) {
        sum += e.weight;
    }
    return sum;
}

double TrajectoryHierarchy::K2_sum() const
{
    double sum = 0.0;
    for (const auto& a : level2_) {
        sum += a.weight;
    }
    return sum;
}

StateVector4 TrajectoryHierarchy::level0_state() const { return frame_ * psi0_; }

StateVector4 TrajectoryHierarchy::level1_state(std::size_t i) const { return frame_ * level1_.at(i).state; }

ComplexMatrix TrajectoryHierarchy::level2_sigma(std::size_t i) const
{
    return frame_ * level2_.at(i).sigma * frame_.adjoint();
}

void TrajectoryHierarchy::advance(const ComplexMatrix& U) { frame_ = U * frame_; }

double TrajectoryHierarchy::step_positive(std::size_t step, double gamma0, double dt, const ComplexMatrix& U)
{
    const double r = gamma0 * dt;
    if (!(r >= 0.0)) {
        throw ValidationError("step_positive: gamma0 must be >= 0");
    }
    if (r >= 1.0) {
        throw NumericalError("step_positive: gamma0*dt = " + to_text(r) + " >= 1; step too coarse");
    }
    const double keep = 1.0 - r;
    double discarded = 0.0;

    // The jump operator seen from the frame of the stored states.
    const ComplexMatrix x = frame_.adjoint() * jump_operator() * frame_;

    if (n_max_ >= 2) {
        for (std::size_t i = 0; i < level2_.size(); ++i) {
            auto& agg = level2_[i];
            discarded += r * agg.weight;
            agg.sigma *= keep;
            agg.weight *= keep;
            const double inject = r * level1_[i].weight;
            const StateVector4 flipped = x * level1_[i].state;
            ComplexMatrix born = outer(flipped, flipped);
            born *= inject;
            agg.sigma += born;
            agg.weight += inject;
        }
    }
    if (n_max_ >= 1) {
        for (auto& e : level1_) {
            if (n_max_ == 1) {
                discarded += r * e.weight;
            }
            e.weight *= keep;
        }
        level1_.push_back({step, (x * psi0_).normalized(), r * k0_});
        if (n_max_ >= 2) {
            level2_.push_back({ComplexMatrix::zero(4), 0.0});
        }
    } else {
        discarded += r * k0_;
    }
    k0_ *= keep;

    advance(U);
    return discarded;
}

double TrajectoryHierarchy::step_negative(double gamma0, double dt, const ComplexMatrix& U, NmqjVariant variant)
{
    const double g = -gamma0 * dt;
    if (!(g >= 0.0)) {
        throw ValidationError("step_negative: gamma0 must be < 0");
    }
    if (g >= 1.0) {
        throw NumericalError("step_negative: |gamma0|*dt = " + to_text(g) + " >= 1; step too coarse");
    }
    const bool literal = variant == NmqjVariant::literal;
    double shortfall = 0.0;

    // All transfers use the weights at the start of the step.
    const double k0 = k0_;
    const double k1_sum = K1_sum();

    // Level 0 regains weight from level 1, or from nowhere at the top level.
    if (n_max_ >= 1 || literal) {
        k0_ = k0 * (1.0 + g);
    }
    if (n_max_ == 0) {
        advance(U);
        return 0.0;
    }

    const double requested_from_level1 = g * k0;
    if (k1_sum <= 0.0) {
        shortfall += requested_from_level1;
    }
    for (std::size_t i = 0; i < level1_.size(); ++i) {
        auto& e = level1_[i];
        const double k1 = e.weight;
        const double loss = k1_sum > 0.0 ? requested_from_level1 * (k1 / k1_sum) : 0.0;
        double gain = 0.0;
        if (n_max_ >= 2) {
            auto& agg = level2_[i];
            const double k2 = agg.weight;
            const double available = literal ? k2 * (1.0 + g) : k2;
            gain = std::min(g * k1, available);
            shortfall += g * k1 - gain;
            const double remaining = available - gain;
            if (k2 > 0.0) {
                agg.sigma *= remaining / k2;
            }
            agg.weight = remaining;
        } else if (literal) {
            gain = g * k1;
        }
        double updated = k1 - loss + gain;
        if (updated < 0.0) {
            shortfall += -updated;
            updated = 0.0;
        }
        e.weight = updated;
    }

    advance(U);
    return shortfall;
}

DensityMatrix4 TrajectoryHierarchy::reconstruct(bool renormalize) const
{
    ComplexMatrix rho = outer(psi0_, psi0_) * cplx(k0_);
    for (const auto& e : level1_) {
        if (e.weight != 0.0) {
            rho += outer(e.state, e.state) * cplx(e.weight);
        }
    }
    for (const auto& a : level2_) {
        if (a.weight != 0.0) {
            rho += a.sigma;
        }
    }
    rho = hermitian_part(frame_ * rho * frame_.adjoint());
    if (renormalize) {
        const double total = rho.trace().real();
        if (!(total > 0.0)) {
            throw NumericalError("reconstruct: cannot renormalize a zero-weight hierarchy");
        }
        rho *= 1.0 / total;
    }
    return DensityMatrix4::from_matrix(rho);
}

void NmqjConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("NmqjConfig: dt must be > 0");
    }
    if (!(t_max > 0.0)) {
        throw ValidationError("NmqjConfig: t_max must be > 0");
    }
    if (n_max < 0 || n_max > kMaxJumpLevel) {
        throw ValidationError("NmqjConfig: n_max must be 0, 1 or 2 (higher levels are not supported)");
    }
    if (record_stride < 1) {
        throw ValidationError("NmqjConfig: record_stride must be >= 1");
    }
    if (!(clamp_tolerance >= 0.0)) {
        throw ValidationError("NmqjConfig: clamp_tolerance must be >= 0");
    }
}

NmqjResult run_nmqj(const StateVector4& psi0, const SystemParams& params, const NmqjConfig& cfg,
                    const RateSchedule& schedule)
{
    cfg.validate();
    params.validate();
    params.check_resonant();
    if (std::abs(schedule.dt() - cfg.dt) > 1e-15 * cfg.dt) {
        throw ValidationError("run_nmqj: schedule grid spacing differs from dt");
    }
    const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
    if (schedule.size() < steps + 1) {
        throw ValidationError("run_nmqj: schedule shorter than t_max");
    }

    NmqjResult result;
    TrajectoryHierarchy h(psi0, cfg.n_max);

    const auto record = [&](std::size_t k) {
        const DensityMatrix4 rho = h.reconstruct(cfg.renormalize);
        ObservableRow row = observe(rho, schedule.time(k), schedule.gamma0(k));
        row.K0 = h.K0();
        row.K1_sum = h.K1_sum();
        row.K2_sum = h.K2_sum();
        row.K_total = h.total_weight();
        result.series.rows.push_back(row);
        result.states.push_back(rho);
    };

    record(0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = schedule.time(k);
        const double gamma0 = schedule.gamma0(k);
        const ComplexMatrix U = step_propagator(t, cfg.dt, params, cfg.propagator, cfg.frame);
        if (rate_sign(gamma0) > 0) {
            result.discarded_total += h.step_positive(k, std::max(gamma0, 0.0), cfg.dt, U);
        } else {
            result.clamp_total += h.step_negative(gamma0, cfg.dt, U, cfg.variant);
            if (result.clamp_total > cfg.clamp_tolerance) {
                throw NumericalError("run_nmqj: capped reversed-jump transfers total " +
                                     to_text(result.clamp_total) + " > clamp_tolerance " +
                                     to_text(cfg.clamp_tolerance) + " at lambda*t = " +
                                     to_text(schedule.time(k + 1)));
            }
        }
        if ((k + 1) % static_cast<std::size_t>(cfg.record_stride) == 0 || k + 1 == steps) {
            record(k + 1);
        }
    }
    if (result.clamp_total > 1e-6) {
        result.warnings.push_back("run_nmqj: capped reversed-jump transfers total " +
                                  to_text(result.clamp_total));
    }
    return result;
}

NmqjResult run_nmqj(const StateVector4& psi0, const SystemParams& params, const NmqjConfig& cfg)
{
    cfg.validate();
    return run_nmqj(psi0, params, cfg, RateSchedule::build(params, cfg.t_max, cfg.dt));
}

} // namespace qbatt
