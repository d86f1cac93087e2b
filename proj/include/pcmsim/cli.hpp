#pragma once

// Command-line front end. Kept out of pcmsim.hpp so library users do not
// pull in CLI11.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pcmsim/pcmsim.hpp"

namespace pcmsim::cli {

enum ExitCode : int {
	Ok = 0,
	Usage = 1,
	ConfigError = 2,
	IoError = 3,
	SimulationError = 4,
};

inline int exit_code_for(Errc code)
{
	switch (code) {
	case Errc::ConfigParse: return ConfigError;
	case Errc::Io: return IoError;
	default: return SimulationError;
	}
}

struct Invocation {
	std::string config_path;
	std::string out_dir = ".";
	std::optional<std::uint64_t> seed_override;
	std::optional<std::size_t> epochs_override;
	bool quiet = false;

	std::string array_path;    // recall
	std::string baseline_path; // recall, optional
	std::size_t pulses = 30;   // device-curve
};

namespace fs = std::filesystem;

inline ConfigFile load_with_overrides(const Invocation &inv)
{
	if (!fs::exists(inv.config_path))
		throw Error(Errc::Io, "config file not found: " + inv.config_path);
	auto cfg = load_config(inv.config_path);
	if (inv.seed_override)
		cfg.experiment.seed = *inv.seed_override;
	if (inv.epochs_override)
		cfg.experiment.max_epochs = *inv.epochs_override;
	cfg.experiment.validate();
	return cfg;
}

inline std::string epoch_tag(std::size_t epoch)
{
	char buf[16];
	std::snprintf(buf, sizeof buf, "%04zu", epoch);
	return buf;
}

inline int run_learn(const Invocation &inv, std::ostream &log)
{
	const auto cfg = load_with_overrides(inv);
	const auto report = learn_and_recall(cfg.experiment);
	const fs::path out = inv.out_dir;

	write_text_file(out / "report.json", to_json(report).dump(2) + "\n");

	std::string traces;
	for (const auto &t : report.traces)
		traces += to_json(t).dump() + "\n";
	write_text_file(out / "traces.jsonl", traces);

	if (!report.snapshots.empty()) {
		std::string stats;
		for (const auto &s : report.snapshots) {
			write_text_file(out / "snapshots" / ("resistance_epoch_" + epoch_tag(s.epoch) + ".csv"),
			                matrix_csv(s.resistances));
			stats += stats_record(s.epoch, array_stats(CrossbarArray(s.resistances, report.device))).dump() + "\n";
		}
		const auto history = distribution_history(report);
		for (const auto &h : history)
			write_text_file(out / "snapshots" / ("normalized_epoch_" + epoch_tag(h.epoch) + ".csv"),
			                matrix_csv(h.normalized_weights));
		write_text_file(out / "stats.jsonl", stats);
		write_text_file(out / "histograms.csv", histogram_csv(history));
	}

	if (!inv.quiet) {
		log << "epochs_to_recall: "
		    << (report.epochs_to_recall ? std::to_string(*report.epochs_to_recall) : std::string("NotReached"))
		    << "\ntotal_energy_J: " << report.total_energy << "\ninitial_cv: " << report.initial_stats.cv << "\n";
	}
	return Ok;
}

inline int run_recall(const Invocation &inv, std::ostream &log)
{
	const auto cfg = load_with_overrides(inv);
	const auto &e = cfg.experiment;
	const CrossbarArray trained(matrix_from_csv(read_text_file(inv.array_path), inv.array_path), e.device);
	if (trained.n() != e.n)
		throw Error(Errc::DimensionMismatch, inv.array_path + " is not " + std::to_string(e.n) + "x" + std::to_string(e.n));

	// Thresholds come from the untrained array: either given, or regenerated
	// from the config's init scheme and seed exactly as `learn` builds it.
	std::optional<CrossbarArray> baseline;
	if (!inv.baseline_path.empty()) {
		baseline.emplace(matrix_from_csv(read_text_file(inv.baseline_path), inv.baseline_path), e.device);
	} else {
		Rng rng(e.seed);
		baseline.emplace(init_array(e.n, e.init, e.device, rng));
	}
	const auto thresholds = compute_thresholds(*baseline, e.recall_stimulus, e.protocol);
	const auto probe = recall_probe(trained, e.recall_stimulus, thresholds, e.protocol, e.n);

	const fs::path out = inv.out_dir;
	std::string lines;
	for (std::size_t s = 0; s < probe.steps.size(); ++s)
		lines += json{{"step", s}, {"firing_set", probe.steps[s].firing_set}, {"currents_A", probe.steps[s].currents}}
		             .dump() +
		         "\n";
	write_text_file(out / "recall_trace.jsonl", lines);

	const bool success = recall_success(probe.final_set, e.recall_target);
	const json summary = {{"final_set", probe.final_set},   {"converged", probe.converged},
	                      {"success", success},             {"read_energy_J", probe.read_energy},
	                      {"thresholds_A", thresholds},     {"steps", probe.steps.size()}};
	write_text_file(out / "recall.json", summary.dump(2) + "\n");

	if (!inv.quiet)
		log << "final_set: " << json(probe.final_set).dump() << "\nsuccess: " << (success ? "true" : "false") << "\n";
	return Ok;
}

inline int run_sweep(const Invocation &inv, std::ostream &log)
{
	const auto cfg = load_with_overrides(inv);
	if (cfg.sweep.cvs.empty())
		throw Error(Errc::ConfigParse, inv.config_path + ": sweep needs a non-empty \"cvs\" list");
	const auto rows = variation_sweep(cfg.experiment, cfg.sweep.cvs, cfg.sweep.seeds_per_cv);
	write_text_file(fs::path(inv.out_dir) / "sweep.csv", sweep_csv(rows));
	if (!inv.quiet)
		log << sweep_csv(rows);
	return Ok;
}

// Gradual-SET trajectory of one cell starting at the init median.
inline int run_device_curve(const Invocation &inv, std::ostream &log)
{
	const auto cfg = load_with_overrides(inv);
	const auto &e = cfg.experiment;
	Rng rng(e.seed);
	PcmCell cell{e.device.clamp(e.init.median), 0};
	std::string csv = "pulse_index,resistance_ohm,energy_J\n0," + detail::fmt(cell.resistance) + ",0\n";
	for (std::size_t k = 1; k <= inv.pulses; ++k) {
		auto r = apply_set_pulse(cell, e.protocol.program_pulse, e.device, rng);
		cell = r.cell;
		csv += std::to_string(k) + ',' + detail::fmt(cell.resistance) + ',' + detail::fmt(r.energy) + '\n';
	}
	write_text_file(fs::path(inv.out_dir) / "device_curve.csv", csv);
	if (!inv.quiet)
		log << "final_resistance_ohm: " << cell.resistance << "\n";
	return Ok;
}

inline int run_cli(int argc, const char *const *argv, std::ostream &log = std::cout, std::ostream &err = std::cerr)
{
	CLI::App app{"Behavioral simulator of a PCM synaptic crossbar with Hebbian learning", "sim"};
	app.require_subcommand(1);

	Invocation inv;
	auto add_common = [&](CLI::App *sub) {
		sub->add_option("--config", inv.config_path, "Experiment JSON config")->required();
		sub->add_option("--out-dir", inv.out_dir, "Directory for output artifacts");
		sub->add_option("--seed", inv.seed_override, "Override the config seed");
		sub->add_option("--epochs", inv.epochs_override, "Override max_epochs");
		sub->add_flag("--quiet", inv.quiet, "Suppress the summary on stdout");
	};

	auto *learn = app.add_subcommand("learn", "Train the patterns and probe recall after every epoch");
	auto *recall = app.add_subcommand("recall", "Run one read-only recall probe on a stored array CSV");
	auto *sweep = app.add_subcommand("sweep", "Epochs-to-recall and energy across initial variation levels");
	auto *curve = app.add_subcommand("device-curve", "Gradual SET trajectory of a single cell");
	for (auto *s : {learn, recall, sweep, curve})
		add_common(s);
	recall->add_option("--array", inv.array_path, "Trained resistance matrix (CSV, ohms)")->required();
	recall->add_option("--baseline", inv.baseline_path, "Untrained resistance matrix used for thresholds");
	curve->add_option("--pulses", inv.pulses, "Number of SET pulses");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		const int rc = app.exit(e, log, err);
		return rc == 0 ? Ok : Usage;
	}

	try {
		if (*learn)
			return run_learn(inv, log);
		if (*recall)
			return run_recall(inv, log);
		if (*sweep)
			return run_sweep(inv, log);
		return run_device_curve(inv, log);
	} catch (const Error &e) {
		err << "sim: " << e.what() << "\n";
		return exit_code_for(e.code());
	} catch (const std::exception &e) {
		err << "sim: " << e.what() << "\n";
		return SimulationError;
	}
}

} // namespace pcmsim::cli
