#pragma once

// End-to-end learning experiments: train the configured patterns epoch by
// epoch, probe recall after each epoch, and sweep the initial variation
// across seeds.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "pcmsim/network.hpp"

namespace pcmsim {

struct ExperimentConfig {
	std::size_t n = 10;
	DeviceParams device;
	ProtocolParams protocol;
	InitScheme init;
	std::vector<Pattern> patterns{pattern_one(), pattern_two()};
	Pattern recall_stimulus = Pattern::from_on(10, {0, 1, 2, 3});
	Pattern recall_target = pattern_one();
	std::size_t max_epochs = 20;
	std::uint64_t seed = 1;
	std::size_t snapshot_every = 1; // 0 disables snapshots

	void validate() const
	{
		if (n < 2)
			throw Error(Errc::InvalidDimension, "n must be >= 2");
		device.validate();
		protocol.validate(device);
		init.validate();
		if (patterns.empty())
			throw Error(Errc::InvalidParams, "at least one training pattern is required");
		for (const auto &p : patterns)
			if (p.size() != n)
				throw Error(Errc::DimensionMismatch, "training pattern length differs from n");
		if (recall_stimulus.size() != n || recall_target.size() != n)
			throw Error(Errc::DimensionMismatch, "recall pattern length differs from n");
		if (recall_stimulus.on_set().empty())
			throw Error(Errc::EmptyStimulus, "recall_stimulus has no ON neurons");
		for (std::size_t i = 0; i < n; ++i)
			if (recall_stimulus.bits[i] && !recall_target.bits[i])
				throw Error(Errc::InvalidParams, "recall_target must contain every recall_stimulus neuron");
		if (max_epochs < 1)
			throw Error(Errc::InvalidParams, "max_epochs must be >= 1");
	}
};

struct EnergyBreakdown {
	Joules program = 0.0;
	Joules train_read = 0.0;
	Joules probe_read = 0.0;

	Joules total() const { return program + train_read + probe_read; }
};

struct ProbeRecord {
	std::size_t epoch = 0;
	IndexSet final_set;
	std::size_t steps = 0;
	bool converged = true;
	bool success = false;
	Joules read_energy = 0.0;
	std::vector<Amperes> currents; // last read of each neuron
};

struct Snapshot {
	std::size_t epoch = 0;
	Matrix resistances;
};

struct RunReport {
	std::optional<std::size_t> epochs_to_recall;
	Joules total_energy = 0.0;
	EnergyBreakdown energy_breakdown;
	ArrayStats initial_stats;
	ArrayStats final_stats;
	std::vector<Amperes> thresholds;
	std::vector<EpochTrace> traces;
	std::vector<ProbeRecord> probes;
	std::vector<double> contrast_history;
	Matrix baseline;
	std::vector<Snapshot> snapshots;
	DeviceParams device;
};

// Mean conductance of ON x ON cells over mean conductance of all others.
inline double weight_contrast(const CrossbarArray &array, const Pattern &pattern)
{
	check_pattern(array, pattern);
	double in_sum = 0.0, out_sum = 0.0;
	std::size_t in_n = 0, out_n = 0;
	for (std::size_t i = 0; i < array.n(); ++i) {
		for (std::size_t j = 0; j < array.n(); ++j) {
			const double g = 1.0 / array.at(i, j).resistance;
			if (pattern.bits[i] && pattern.bits[j]) {
				in_sum += g;
				++in_n;
			} else {
				out_sum += g;
				++out_n;
			}
		}
	}
	if (in_n == 0 || out_n == 0)
		throw Error(Errc::DegeneratePattern, "weight contrast needs both ON x ON cells and other cells");
	return (in_sum / static_cast<double>(in_n)) / (out_sum / static_cast<double>(out_n));
}

inline RunReport learn_and_recall(const ExperimentConfig &config)
{
	config.validate();
	Rng rng(config.seed);
	const auto &pp = config.protocol;

	CrossbarArray array = init_array(config.n, config.init, config.device, rng);

	RunReport report;
	report.device = config.device;
	report.baseline = array.resistances();
	report.initial_stats = array_stats(array);
	report.thresholds = compute_thresholds(array, config.recall_stimulus, pp);
	if (config.snapshot_every > 0)
		report.snapshots.push_back({0, report.baseline});

	for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
		for (std::size_t k = 0; k < config.patterns.size(); ++k) {
			auto tr = training_epoch(array, config.patterns[k], pp, rng);
			array = std::move(tr.array);
			tr.trace.epoch = epoch;
			tr.trace.pattern = k;
			report.energy_breakdown.program += tr.trace.program_energy;
			report.energy_breakdown.train_read += tr.trace.read_energy;
			report.traces.push_back(std::move(tr.trace));
		}
		if (config.snapshot_every > 0 && epoch % config.snapshot_every == 0) {
			report.traces.back().resistance_snapshot = array.resistances();
			report.snapshots.push_back({epoch, array.resistances()});
		}

		auto probe = recall_probe(array, config.recall_stimulus, report.thresholds, pp, config.n);
		report.energy_breakdown.probe_read += probe.read_energy;

		ProbeRecord rec;
		rec.epoch = epoch;
		rec.final_set = probe.final_set;
		rec.steps = probe.steps.size();
		rec.converged = probe.converged;
		rec.success = recall_success(probe.final_set, config.recall_target);
		rec.read_energy = probe.read_energy;
		for (const auto &ns : probe.neurons)
			rec.currents.push_back(ns.input_current);
		report.probes.push_back(std::move(rec));

		report.contrast_history.push_back(weight_contrast(array, config.recall_target));

		if (report.probes.back().success) {
			report.epochs_to_recall = epoch;
			break;
		}
	}

	report.final_stats = array_stats(array);
	report.total_energy = report.energy_breakdown.total();
	return report;
}

struct SweepRow {
	double cv = 0.0;
	double median_epochs = 0.0;
	Joules mean_energy = 0.0;
	double success_rate = 0.0;
};

struct RunSummary {
	std::optional<std::size_t> epochs_to_recall;
	Joules total_energy = 0.0;
};

// Runs that never recall are censored at max_epochs + 1 for the median.
inline double censored_epochs(const RunSummary &r, std::size_t max_epochs)
{
	return static_cast<double>(r.epochs_to_recall.value_or(max_epochs + 1));
}

inline double median_of(std::vector<double> v)
{
	if (v.empty())
		return 0.0;
	std::sort(v.begin(), v.end());
	const std::size_t m = v.size() / 2;
	return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline ExperimentConfig sweep_job_config(const ExperimentConfig &base, std::size_t cv_index, double cv,
                                         std::size_t seed_index)
{
	ExperimentConfig cfg = base;
	cfg.init.cv = cv;
	cfg.seed = derive_seed(base.seed, {cv_index, seed_index});
	cfg.snapshot_every = 0;
	return cfg;
}

// Every (cv, seed) pair as an independent job. runs[c][s] holds the outcome
// for cvs[c] and seed index s regardless of thread scheduling.
inline std::vector<std::vector<RunSummary>> sweep_runs(const ExperimentConfig &base, const std::vector<double> &cvs,
                                                       std::size_t seeds_per_cv, unsigned threads = 0)
{
	if (cvs.empty())
		throw Error(Errc::InvalidParams, "cvs must be non-empty");
	if (!std::is_sorted(cvs.begin(), cvs.end()))
		throw Error(Errc::InvalidParams, "cvs must be sorted ascending");
	if (seeds_per_cv < 1)
		throw Error(Errc::InvalidParams, "seeds_per_cv must be >= 1");
	for (double cv : cvs) {
		InitScheme s = base.init;
		s.cv = cv;
		s.validate();
	}
	base.validate();

	std::vector<std::vector<RunSummary>> runs(cvs.size(), std::vector<RunSummary>(seeds_per_cv));
	const std::size_t jobs = cvs.size() * seeds_per_cv;
	std::atomic<std::size_t> next{0};

	auto worker = [&] {
		for (std::size_t job = next++; job < jobs; job = next++) {
			const std::size_t c = job / seeds_per_cv, s = job % seeds_per_cv;
			const auto report = learn_and_recall(sweep_job_config(base, c, cvs[c], s));
			runs[c][s] = {report.epochs_to_recall, report.total_energy};
		}
	};

	if (threads == 0)
		threads = std::max(1u, std::thread::hardware_concurrency());
	threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
	if (threads <= 1) {
		worker();
	} else {
		std::vector<std::jthread> pool;
		for (unsigned t = 0; t < threads; ++t)
			pool.emplace_back(worker);
	}
	return runs;
}

inline SweepRow summarize(double cv, const std::vector<RunSummary> &runs, std::size_t max_epochs)
{
	SweepRow row;
	row.cv = cv;
	std::vector<double> epochs;
	std::size_t ok = 0;
	for (const auto &r : runs) {
		epochs.push_back(censored_epochs(r, max_epochs));
		row.mean_energy += r.total_energy;
		ok += r.epochs_to_recall.has_value();
	}
	row.median_epochs = median_of(epochs);
	row.mean_energy /= static_cast<double>(runs.size());
	row.success_rate = static_cast<double>(ok) / static_cast<double>(runs.size());
	return row;
}

inline std::vector<SweepRow> variation_sweep(const ExperimentConfig &base, const std::vector<double> &cvs,
                                             std::size_t seeds_per_cv, unsigned threads = 0)
{
	const auto runs = sweep_runs(base, cvs, seeds_per_cv, threads);
	std::vector<SweepRow> rows;
	for (std::size_t c = 0; c < cvs.size(); ++c)
		rows.push_back(summarize(cvs[c], runs[c], base.max_epochs));
	return rows;
}

struct Histogram {
	std::vector<double> edges; // bins + 1 log-spaced edges in ohms
	std::vector<std::size_t> counts;
};

inline Histogram log_histogram(const std::vector<double> &values, Ohms lo, Ohms hi, std::size_t bins)
{
	Histogram h;
	h.edges.resize(bins + 1);
	h.counts.assign(bins, 0);
	const double span = std::log(hi / lo);
	for (std::size_t k = 0; k <= bins; ++k)
		h.edges[k] = lo * std::exp(span * static_cast<double>(k) / static_cast<double>(bins));
	h.edges.front() = lo;
	h.edges.back() = hi;
	for (double v : values) {
		const double pos = std::log(v / lo) / span * static_cast<double>(bins);
		auto k = static_cast<std::ptrdiff_t>(std::floor(pos));
		k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(bins) - 1);
		++h.counts[static_cast<std::size_t>(k)];
	}
	return h;
}

struct DistributionSnapshot {
	std::size_t epoch = 0;
	Histogram histogram;
	Matrix normalized_weights;
};

// Default 20 bins per decade over [r_min, r_max].
inline std::vector<DistributionSnapshot> distribution_history(const RunReport &report, std::size_t bins = 0)
{
	if (report.snapshots.empty())
		throw Error(Errc::NoSnapshots, "run report carries no resistance snapshots");
	const auto &d = report.device;
	if (bins == 0)
		bins = static_cast<std::size_t>(std::max(1.0, std::round(20.0 * std::log10(d.r_max / d.r_min))));

	const CrossbarArray baseline(report.baseline, d);
	std::vector<DistributionSnapshot> out;
	for (const auto &snap : report.snapshots) {
		const CrossbarArray current(snap.resistances, d);
		out.push_back({snap.epoch, log_histogram(snap.resistances.data, d.r_min, d.r_max, bins),
		               normalized_weights(current, baseline)});
	}
	return out;
}

} // namespace pcmsim
