#include "tgf/rdsolver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace tgf {

namespace {
void check_grids(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}
}  // namespace

SpectralField doss_sussmann(const SpectralField& m, const OUState& q, double varsigma) {
    check_grids(m.grid, q.q.grid, "doss_sussmann");
    SpectralField z = m;
    if (varsigma != 0.0) axpy(z, -varsigma, q.q);
    return z;
}

SpectralField doss_sussmann_inverse(const SpectralField& z, const OUState& q, double varsigma) {
    check_grids(z.grid, q.q.grid, "doss_sussmann");
    SpectralField m = z;
    if (varsigma != 0.0) axpy(m, varsigma, q.q);
    return m;
}

RpdeStepper::RpdeStepper(const GridSpec& g, const FluidParams& p, const SpectralField& forcing,
                         double dt, const WienerPath& path)
    : path_(path), core_(g, p, forcing, dt), dt_(dt), w_(g), dw_(g) {
    check_grids(g, path.grid(), "RpdeStepper");
    const double ratio = dt / path.dt_base();
    agg_ = static_cast<int>(std::llround(ratio));
    if (agg_ < 1 || std::abs(ratio - agg_) > 1e-9)
        throw std::invalid_argument("RpdeStepper: dt must be an integer multiple of the path step");
}

void RpdeStepper::step(StoState& st) {
    step_with_q(st.z, st.q.q, st.varsigma);
    ou_step(st.q, path_, st.j, agg_);
    st.j += agg_;
    st.t += dt_;
}

void RpdeStepper::step_with_q(SpectralField& z, const SpectralField& qf, double varsigma) {
    if (varsigma == 0.0) {
        core_.step(z, z, nullptr, 0.0);
        return;
    }
    w_ = z;
    axpy(w_, varsigma, qf);
    core_.step(z, w_, &qf, varsigma);
}

void RpdeStepper::em_step(SpectralField& m, std::int64_t j_local, double varsigma) {
    if (varsigma == 0.0) {
        core_.step(m, m, nullptr, 0.0);
        return;
    }
    set_zero(dw_);
    cplx one[2], acc[2];
    const GridSpec& g = path_.grid();
    for (std::size_t k = 0; k < path_.modes().size(); ++k) {
        acc[0] = acc[1] = cplx{};
        for (int i = 0; i < agg_; ++i) {
            path_.increment(k, j_local + i, one);
            acc[0] += one[0];
            acc[1] += one[1];
        }
        const DrivenMode& dm = path_.modes()[k];
        dw_.at(0, g.index_of(dm.kx), g.index_of(dm.ky)) = acc[0];
        dw_.at(1, g.index_of(dm.kx), g.index_of(dm.ky)) = acc[1];
        dw_.at(0, g.index_of(-dm.kx), g.index_of(-dm.ky)) = std::conj(acc[0]);
        dw_.at(1, g.index_of(-dm.kx), g.index_of(-dm.ky)) = std::conj(acc[1]);
    }
    core_.step(m, m, &dw_, varsigma / dt_);
}

StoState step_rpde(const StoState& st, const SpectralField& g, const FluidParams& p, double dt,
                   const WienerPath& path) {
    RpdeStepper stepper(st.z.grid, p, g, dt, path);
    StoState out = st;
    stepper.step(out);
    return out;
}

SpectralField em_direct_step(const SpectralField& m, const SpectralField& g, const FluidParams& p,
                             double dt, const WienerPath& path, std::int64_t j_local,
                             double varsigma) {
    RpdeStepper stepper(m.grid, p, g, dt, path);
    SpectralField out = m;
    stepper.em_step(out, j_local, varsigma);
    return out;
}

PullbackResult pullback_solve(const WienerPath& path, const std::vector<SpectralField>& ics,
                              const SpectralField& g, const FluidParams& p, double T, double dt,
                              double varsigma, const QTrajectory* qtr,
                              TrajectoryRecord* record_first, int record_stride) {
    if (ics.empty()) throw std::invalid_argument("pullback_solve: need at least one IC");
    const GridSpec& grid = path.grid();
    const double ratio = dt / path.dt_base();
    const int agg = static_cast<int>(std::llround(ratio));
    if (agg < 1 || std::abs(ratio - agg) > 1e-9)
        throw std::invalid_argument("pullback_solve: dt must be a multiple of the path step");
    const std::int64_t nsteps = std::llround(T / dt);
    if (nsteps * agg != path.n_steps() || std::abs(nsteps * dt - T) > 1e-9 * std::max(T, 1.0))
        throw std::invalid_argument("pullback_solve: T must span the path window");

    QTrajectory local;
    if (!qtr) {
        local = ou_trajectory(path, agg);
        qtr = &local;
    }
    if (qtr->n_samples != nsteps + 1 || qtr->agg != agg)
        throw std::invalid_argument("pullback_solve: OU trajectory does not match the run grid");

    RpdeStepper stepper(grid, p, g, dt, path);
    SpectralField qf(grid);

    PullbackResult out;
    out.T_used = nsteps * dt;
    for (std::size_t ic = 0; ic < ics.size(); ++ic) {
        check_grids(ics[ic].grid, grid, "pullback_solve");
        SpectralField z = leray_project(ics[ic]);
        if (varsigma != 0.0) {
            q_to_field(path, qtr->at(0), qf);
            axpy(z, -varsigma, qf);  // Z(-T) = psi - varsigma q(-T)
        }
        const bool record = record_first && ic == 0;
        std::optional<TrajectoryMonitor> mon;
        SpectralField mphys(grid);
        auto record_now = [&](std::int64_t s) {
            mphys = z;
            if (varsigma != 0.0) {
                q_to_field(path, qtr->at(s), qf);
                axpy(mphys, varsigma, qf);
            }
            mon->sample(*record_first, (s - nsteps) * dt, mphys);
        };
        if (record) {
            record_first->g_hm1 = norm(g, NormKind::Hminus1);
            mon.emplace(p, record_first->g_hm1);
            record_now(0);
        }
        bool blew_up = false;
        try {
            for (std::int64_t s = 0; s < nsteps; ++s) {
                if (varsigma != 0.0) q_to_field(path, qtr->at(s), qf);
                stepper.step_with_q(z, qf, varsigma);
                if (record && ((s + 1) % record_stride == 0 || s + 1 == nsteps)) record_now(s + 1);
            }
        } catch (const BlowupError&) {
            blew_up = true;
        }
        if (blew_up) {
            out.excluded.push_back(static_cast<int>(ic));
            out.finals.emplace_back(grid);
            continue;
        }
        if (varsigma != 0.0) {
            q_to_field(path, qtr->at(nsteps), qf);
            axpy(z, varsigma, qf);  // m(0) = z(0) + varsigma q(0)
        }
        out.finals.push_back(std::move(z));
    }
    for (std::size_t i = 0; i < out.finals.size(); ++i) {
        if (std::find(out.excluded.begin(), out.excluded.end(), int(i)) != out.excluded.end())
            continue;
        for (std::size_t j = i + 1; j < out.finals.size(); ++j) {
            if (std::find(out.excluded.begin(), out.excluded.end(), int(j)) != out.excluded.end())
                continue;
            out.max_pairwise =
                std::max(out.max_pairwise, norm(subbed(out.finals[i], out.finals[j]), NormKind::L2));
        }
    }
    return out;
}

}  // namespace tgf
