#pragma once

// Recurrent integrate-and-fire network on top of a crossbar.
//
// Neuron i owns bitline i (its input) and wordline i (its output). In one
// iteration a firing neuron gates its wordline and drives a SET pulse on its
// bitline, so the synapses between co-firing neurons get stronger. A
// non-firing neuron applies a read pulse on its bitline and integrates the
// current through the gated wordlines; if that exceeds its threshold it
// fires in the next iteration.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pcmsim/crossbar.hpp"

namespace pcmsim {

struct Pattern {
	std::vector<bool> bits;

	Pattern() = default;
	explicit Pattern(std::vector<bool> b) : bits(std::move(b)) {}

	static Pattern from_on(std::size_t n, const IndexSet &on)
	{
		Pattern p(std::vector<bool>(n, false));
		for (auto i : normalize_indices(on, n))
			p.bits[i] = true;
		return p;
	}

	std::size_t size() const { return bits.size(); }

	IndexSet on_set() const
	{
		IndexSet on;
		for (std::size_t i = 0; i < bits.size(); ++i)
			if (bits[i])
				on.push_back(i);
		return on;
	}

	friend bool operator==(const Pattern &, const Pattern &) = default;
};

// The two 10-pixel patterns, 0-indexed: neurons #1,2,3,4,6 and #5,7,8,9,10.
inline Pattern pattern_one() { return Pattern::from_on(10, {0, 1, 2, 3, 5}); }
inline Pattern pattern_two() { return Pattern::from_on(10, {4, 6, 7, 8, 9}); }

struct NeuronState {
	bool firing = false;
	Amperes input_current = 0.0;
	Amperes threshold = 0.0;
};

// Which wordlines are gated when measuring the untrained input currents.
enum class ThresholdGating { Stimulus, All };
// PerNeuron: each neuron scales its own initial current. Shared: one value,
// the largest scaled initial current among the non-stimulated neurons.
enum class ThresholdRule { PerNeuron, Shared };

struct ProtocolParams {
	Volts v_read = 0.1;
	PulseSpec read_pulse = default_read_pulse();
	PulseSpec program_pulse = default_set_pulse();
	double threshold_factor = 2.0;
	bool include_diagonal = true;
	unsigned pulses_per_coactivation = 1;
	ThresholdGating threshold_gating = ThresholdGating::Stimulus;
	ThresholdRule threshold_rule = ThresholdRule::PerNeuron;

	// The read pulse actually applied: read_pulse's timing at v_read.
	PulseSpec effective_read_pulse() const
	{
		PulseSpec p = read_pulse;
		p.amplitude = v_read;
		p.role = PulseRole::Read;
		return p;
	}

	void validate(const DeviceParams &device) const
	{
		if (!(threshold_factor >= 1.0))
			throw Error(Errc::InvalidParams, "threshold_factor must be >= 1");
		if (!(v_read >= 0.0 && v_read < device.v_set_threshold))
			throw Error(Errc::InvalidParams, "v_read must be non-negative and below v_set_threshold");
		if (pulses_per_coactivation < 1)
			throw Error(Errc::InvalidParams, "pulses_per_coactivation must be >= 1");
		if (program_pulse.role != PulseRole::Set)
			throw Error(Errc::InvalidPulse, "program_pulse must be a SET pulse");
		program_pulse.validate();
		effective_read_pulse().validate(device);
	}
};

struct EpochTrace {
	std::size_t epoch = 0;
	std::size_t pattern = 0;
	IndexSet firing_set;
	std::vector<Amperes> currents; // 0 for firing neurons, which do not read
	Joules program_energy = 0.0;
	Joules read_energy = 0.0;
	std::optional<Matrix> resistance_snapshot;
};

inline void check_pattern(const CrossbarArray &array, const Pattern &p)
{
	if (p.size() != array.n())
		throw Error(Errc::DimensionMismatch, "pattern length " + std::to_string(p.size()) + " != array dimension " +
		                                         std::to_string(array.n()));
}

inline IndexSet all_indices(std::size_t n)
{
	IndexSet s(n);
	for (std::size_t i = 0; i < n; ++i)
		s[i] = i;
	return s;
}

inline std::vector<Amperes> compute_thresholds(const CrossbarArray &array, const Pattern &stimulus,
                                               const ProtocolParams &pp)
{
	check_pattern(array, stimulus);
	const auto on = stimulus.on_set();
	if (on.empty())
		throw Error(Errc::EmptyStimulus, "threshold stimulus has no ON neurons");

	const IndexSet gated = pp.threshold_gating == ThresholdGating::All ? all_indices(array.n()) : on;
	const auto pulse = pp.effective_read_pulse();
	std::vector<Amperes> th(array.n());
	for (std::size_t i = 0; i < array.n(); ++i)
		th[i] = pp.threshold_factor * read_bitline(array, i, gated, pulse).current;

	if (pp.threshold_rule == ThresholdRule::Shared) {
		Amperes shared = 0.0;
		for (std::size_t i = 0; i < array.n(); ++i)
			if (!stimulus.bits[i] || on.size() == array.n())
				shared = std::max(shared, th[i]);
		std::fill(th.begin(), th.end(), shared);
	}
	return th;
}

struct TrainingResult {
	CrossbarArray array;
	EpochTrace trace;
};

// One presentation of `pattern` with firing clamped to its ON set: PROGRAM
// phase on ON x ON, then every OFF neuron reads its bitline.
inline TrainingResult training_epoch(const CrossbarArray &array, const Pattern &pattern, const ProtocolParams &pp,
                                     Rng &rng)
{
	check_pattern(array, pattern);
	const auto firing = pattern.on_set();

	TrainingResult out{array, {}};
	out.trace.firing_set = firing;
	for (unsigned k = 0; k < pp.pulses_per_coactivation; ++k) {
		auto prog = program_cells(out.array, firing, firing, pp.program_pulse, rng, pp.include_diagonal);
		out.array = std::move(prog.array);
		out.trace.program_energy += prog.energy;
	}

	const auto pulse = pp.effective_read_pulse();
	out.trace.currents.assign(array.n(), 0.0);
	for (std::size_t i = 0; i < array.n(); ++i) {
		if (pattern.bits[i])
			continue;
		auto r = read_bitline(out.array, i, firing, pulse);
		out.trace.currents[i] = r.current;
		out.trace.read_energy += r.energy;
	}
	return out;
}

struct ProbeStep {
	IndexSet firing_set;
	std::vector<Amperes> currents; // 0 for neurons already firing
};

struct ProbeResult {
	IndexSet final_set;
	std::vector<ProbeStep> steps;
	std::vector<NeuronState> neurons; // input_current is each neuron's last read, 0 if it never read
	Joules read_energy = 0.0;
	bool converged = true; // false: still recruiting when max_steps ran out
};

// Read-only pattern completion. Each step every non-firing neuron reads with
// the current firing set gated; strictly supra-threshold neurons join the
// firing set for the next step. Stops at a fixpoint or after max_steps reads.
inline ProbeResult recall_probe(const CrossbarArray &array, const Pattern &partial,
                                const std::vector<Amperes> &thresholds, const ProtocolParams &pp,
                                std::size_t max_steps)
{
	check_pattern(array, partial);
	if (thresholds.size() != array.n())
		throw Error(Errc::DimensionMismatch, "need one threshold per neuron");
	if (partial.on_set().empty())
		throw Error(Errc::EmptyStimulus, "probe stimulus has no ON neurons");

	const auto pulse = pp.effective_read_pulse();
	std::vector<bool> firing = partial.bits;
	ProbeResult out;
	out.converged = false;

	std::vector<Amperes> currents(array.n(), 0.0);
	std::vector<Amperes> last_read(array.n(), 0.0);
	for (std::size_t step = 0; step < max_steps; ++step) {
		const auto gated = Pattern(firing).on_set();
		std::fill(currents.begin(), currents.end(), 0.0);
		std::vector<std::size_t> recruits;
		for (std::size_t i = 0; i < array.n(); ++i) {
			if (firing[i])
				continue;
			auto r = read_bitline(array, i, gated, pulse);
			currents[i] = r.current;
			last_read[i] = r.current;
			out.read_energy += r.energy;
			if (r.current > thresholds[i])
				recruits.push_back(i);
		}
		out.steps.push_back({gated, currents});
		if (recruits.empty()) {
			out.converged = true;
			break;
		}
		for (auto i : recruits)
			firing[i] = true;
	}

	out.final_set = Pattern(firing).on_set();
	out.neurons.resize(array.n());
	for (std::size_t i = 0; i < array.n(); ++i)
		out.neurons[i] = {firing[i], last_read[i], thresholds[i]};
	return out;
}

inline bool recall_success(const IndexSet &final_set, const Pattern &target)
{
	auto got = final_set;
	std::sort(got.begin(), got.end());
	got.erase(std::unique(got.begin(), got.end()), got.end());
	return got == target.on_set();
}

} // namespace pcmsim
