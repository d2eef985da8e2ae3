#pragma once

// Torque-sensor bench replay for a single swashplateless rotor.
//
// The fore motor runs a fixed throttle with a phase-locked sinusoid on top.
// Reported reaction torque:
//
//     tau = C_m * (u_cmd - T_d1) + C_m * (a sigma / g_in) * [K_beta(beta) x]_theta
//
// i.e. the commanded modulation torque plus the hub-coupling term fed back
// into the shaft, converted from model units back to throttle units
// (g_in = input_per_throttle).

#include <cmath>
#include <cstddef>

#include "dart/analysis/spectral.hpp"
#include "dart/control/modulation.hpp"
#include "dart/error.hpp"
#include "dart/splm/rotor.hpp"

namespace dart::splm {

struct BenchOptions {
    double settle_time = 2.0;  // s simulated before recording starts
    int substeps = 4;          // integrator steps per output sample
};

struct BenchRun {
    analysis::TimeSeries torque;
    RotorState final_state;
    double rotor_speed = 0.0;  // rad/s
};

inline BenchRun bench_run(const SplmParams& params, double throttle, double amplitude, double phase,
                          double duration, double fs, const BenchOptions& opt = {}) {
    const SplmModel model(params);
    if (!(duration > 0.0)) throw ParameterError("bench duration must be > 0");
    if (!(fs > 0.0)) throw ParameterError("sample rate must be > 0");
    if (!(amplitude >= 0.0)) throw ParameterError("modulation amplitude must be >= 0");
    if (opt.substeps < 1 || !(opt.settle_time >= 0.0)) throw ParameterError("invalid bench options");

    const double omega = params.speed_per_throttle * throttle;
    if (!(fs >= 2.0 * omega / (2.0 * kPi))) {
        throw ParameterError("sample rate must be at least twice the rotor rotation frequency");
    }
    const double lag = params.phase_lag(omega);
    const Eigen::Vector2d mod = control::modulation_vector(amplitude, phase);
    const double g_in = params.input_per_throttle;

    // Encoder angle follows the nominal rotation; the modulation is locked to it.
    const auto command = [&](double t) { return control::modulation_signal(throttle, mod, omega * t, lag); };
    const auto input = [&](double t) { return g_in * command(t); };

    const Vec3 kb_dir = kbeta_direction(params.downwash, params.hinge_offset);
    const double coupling_to_throttle = params.torque_gain / (model.input_scale() * g_in);
    const auto torque = [&](double t, const RotorState& s) {
        const double coupling = kb_dir[0] * pitch_lag_ratio(params.variant, s.x[2]) * s.x[1];
        return params.torque_gain * (command(t) - throttle) + coupling_to_throttle * coupling;
    };

    RotorState state;
    state.x = model.static_equilibrium(g_in * throttle);

    const double dt = 1.0 / (fs * opt.substeps);
    if (dt > 2e-3) throw ParameterError("sample rate too low for the rotor integrator step");
    const auto settle_samples = static_cast<long>(std::llround(opt.settle_time * fs));
    const auto samples = static_cast<std::size_t>(std::llround(duration * fs));

    BenchRun run;
    run.rotor_speed = omega;
    run.torque.fs = fs;
    run.torque.unit = "N*m";
    run.torque.values.reserve(samples);

    // Time is measured from the start of the recording; settling runs at t < 0.
    for (long k = -settle_samples; k < static_cast<long>(samples); ++k) {
        const double t_sample = static_cast<double>(k) / fs;
        if (k >= 0) run.torque.values.push_back(torque(t_sample, state));
        for (int j = 0; j < opt.substeps; ++j) {
            state = model.step(state, input, t_sample + j * dt, dt);
        }
        if (!state.x.allFinite()) throw SimulationFault(k, "rotor state diverged");
    }
    run.final_state = state;
    return run;
}

inline analysis::TimeSeries bench_torque_series(const SplmParams& params, double throttle, double amplitude,
                                                double phase, double duration, double fs,
                                                const BenchOptions& opt = {}) {
    return bench_run(params, throttle, amplitude, phase, duration, fs, opt).torque;
}

}  // namespace dart::splm
