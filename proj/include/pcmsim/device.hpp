#pragma once

// Behavioral model of a single phase-change memory cell.
//
// A cell is just a resistance. SET pulses crystallize part of the remaining
// amorphous volume, which we model as exponential relaxation toward r_min:
//
//     R' = r_min + (R - r_min) * (1 - alpha_set) * (1 + eps),  eps ~ N(0, sigma_c2c)
//
// RESET pulses re-amorphize the cell to a lognormally distributed level whose
// median and coefficient of variation are chosen by the caller. All
// operations are pure: state in, state and energy out.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "pcmsim/error.hpp"
#include "pcmsim/random.hpp"

namespace pcmsim {

using Ohms = double;
using Volts = double;
using Seconds = double;
using Amperes = double;
using Joules = double;

struct DeviceParams {
	Ohms r_min = 10e3;
	Ohms r_max = 10e6;
	Ohms r_reset_full_median = 1e6;
	Ohms r_reset_partial_median = 1e6;
	double alpha_set = 0.6;
	double sigma_c2c = 0.05;
	Volts v_set_threshold = 0.5;
	Volts v_reset_threshold = 1.2;

	Ohms clamp(Ohms r) const { return std::clamp(r, r_min, r_max); }

	void validate() const
	{
		if (!(r_min > 0.0 && r_min < r_reset_partial_median && r_reset_partial_median <= r_reset_full_median &&
		      r_reset_full_median <= r_max))
			throw Error(Errc::InvalidParams, "need 0 < r_min < r_reset_partial_median <= r_reset_full_median <= r_max");
		if (!(alpha_set > 0.0 && alpha_set < 1.0))
			throw Error(Errc::InvalidParams, "alpha_set must lie in (0, 1)");
		if (!(sigma_c2c >= 0.0))
			throw Error(Errc::InvalidParams, "sigma_c2c must be >= 0");
		if (!(v_set_threshold < v_reset_threshold))
			throw Error(Errc::InvalidParams, "v_set_threshold must be below v_reset_threshold");
	}
};

enum class PulseRole { Set, Reset, Read };

inline const char *to_string(PulseRole role)
{
	switch (role) {
	case PulseRole::Set: return "set";
	case PulseRole::Reset: return "reset";
	case PulseRole::Read: return "read";
	}
	return "?";
}

// Trapezoidal voltage pulse: linear rise, flat top, linear fall.
struct PulseSpec {
	Volts amplitude = 0.0;
	Seconds t_rise = 0.0;
	Seconds t_width = 0.0;
	Seconds t_fall = 0.0;
	PulseRole role = PulseRole::Read;

	Seconds duration() const { return t_rise + t_width + t_fall; }

	// Shape check only; the read-disturb rule needs DeviceParams.
	void validate() const
	{
		if (!(amplitude >= 0.0 && t_rise >= 0.0 && t_width >= 0.0 && t_fall >= 0.0))
			throw Error(Errc::InvalidPulse, "pulse amplitude and times must be non-negative");
	}

	void validate(const DeviceParams &params) const
	{
		validate();
		if (role == PulseRole::Read && amplitude > params.v_set_threshold)
			throw Error(Errc::InvalidPulse, "read pulse amplitude exceeds v_set_threshold and would disturb the cell");
	}

	static PulseSpec set(Volts a, Seconds rise, Seconds width, Seconds fall)
	{
		return {a, rise, width, fall, PulseRole::Set};
	}
	static PulseSpec reset(Volts a, Seconds rise, Seconds width, Seconds fall)
	{
		return {a, rise, width, fall, PulseRole::Reset};
	}
	static PulseSpec read(Volts a, Seconds width) { return {a, 0.0, width, 0.0, PulseRole::Read}; }
};

// Defaults used throughout: 1 V SET at 50 ns/300 ns/1 us, 1.5 V RESET at
// 20 ns/50 ns/5 ns, 0.1 V rectangular read over a 100 us window.
inline PulseSpec default_set_pulse() { return PulseSpec::set(1.0, 50e-9, 300e-9, 1e-6); }
inline PulseSpec default_reset_pulse() { return PulseSpec::reset(1.5, 20e-9, 50e-9, 5e-9); }
inline PulseSpec default_read_pulse() { return PulseSpec::read(0.1, 100e-6); }

struct PcmCell {
	Ohms resistance = 1e6;
	std::uint32_t pulse_count_set = 0;

	friend bool operator==(const PcmCell &, const PcmCell &) = default;
};

struct PulseOutcome {
	PcmCell cell;
	Joules energy = 0.0;
};

// Integral of v(t)^2 / R over the trapezoid. On a linear ramp v^2 integrates
// to A^2 * t / 3, so the whole pulse is A^2/R * (rise/3 + width + fall/3).
inline Joules pulse_energy(const PulseSpec &pulse, Ohms resistance_before)
{
	const double a2 = pulse.amplitude * pulse.amplitude;
	return a2 / resistance_before * (pulse.t_rise / 3.0 + pulse.t_width + pulse.t_fall / 3.0);
}

inline Amperes read_current(const PcmCell &cell, Volts v_read) { return v_read / cell.resistance; }

inline PulseOutcome apply_set_pulse(const PcmCell &cell, const PulseSpec &pulse, const DeviceParams &params, Rng &rng)
{
	if (pulse.role != PulseRole::Set)
		throw Error(Errc::InvalidPulse, "apply_set_pulse needs a SET pulse");
	pulse.validate();
	if (pulse.amplitude < params.v_set_threshold)
		throw Error(Errc::AmplitudeBelowThreshold, "SET amplitude " + std::to_string(pulse.amplitude) +
		                                               " V below v_set_threshold " +
		                                               std::to_string(params.v_set_threshold) + " V");

	const double eps = params.sigma_c2c > 0.0 ? params.sigma_c2c * standard_normal(rng) : 0.0;
	const Ohms excess = cell.resistance - params.r_min;

	PulseOutcome out;
	out.energy = pulse_energy(pulse, cell.resistance);
	out.cell.resistance = params.clamp(params.r_min + excess * (1.0 - params.alpha_set) * (1.0 + eps));
	out.cell.pulse_count_set = cell.pulse_count_set + 1;
	return out;
}

// Shape parameter of a lognormal whose coefficient of variation is cv.
inline double lognormal_sigma(double cv) { return std::sqrt(std::log1p(cv * cv)); }

inline PulseOutcome apply_reset_pulse(const PcmCell &cell, const PulseSpec &pulse, const DeviceParams &params,
                                      Ohms target_median, double rel_spread, Rng &rng)
{
	if (pulse.role != PulseRole::Reset)
		throw Error(Errc::InvalidPulse, "apply_reset_pulse needs a RESET pulse");
	pulse.validate();
	if (pulse.amplitude < params.v_reset_threshold)
		throw Error(Errc::AmplitudeBelowThreshold, "RESET amplitude " + std::to_string(pulse.amplitude) +
		                                               " V below v_reset_threshold " +
		                                               std::to_string(params.v_reset_threshold) + " V");
	if (!(target_median > 0.0) || !(rel_spread >= 0.0))
		throw Error(Errc::InvalidParams, "RESET target median must be positive and spread non-negative");

	// Always draw, so RNG consumption does not depend on the spread.
	const double z = standard_normal(rng);

	PulseOutcome out;
	out.energy = pulse_energy(pulse, cell.resistance);
	out.cell.resistance = params.clamp(target_median * std::exp(lognormal_sigma(rel_spread) * z));
	out.cell.pulse_count_set = 0;
	return out;
}

} // namespace pcmsim
