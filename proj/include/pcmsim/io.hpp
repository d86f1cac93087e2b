#pragma once

// JSON config/report serialization and CSV artifacts.
//
// Config keys mirror the struct field names. Report and CSV keys carry an SI
// unit suffix (_J, _A, _ohm) wherever the value has a unit.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcmsim/experiments.hpp"

namespace pcmsim {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json &j, std::initializer_list<const char *> allowed, const std::string &where)
{
	if (!j.is_object())
		throw Error(Errc::ConfigParse, where + ": expected a JSON object");
	for (auto it = j.begin(); it != j.end(); ++it) {
		bool known = false;
		for (const char *k : allowed)
			known = known || it.key() == k;
		if (!known)
			throw Error(Errc::ConfigParse, where + ": unknown key \"" + it.key() + "\"");
	}
}

template <typename T>
void read_opt(const json &j, const char *key, T &out, const std::string &where)
{
	if (!j.contains(key))
		return;
	try {
		out = j.at(key).get<T>();
	} catch (const json::exception &e) {
		throw Error(Errc::ConfigParse, where + "." + key + ": " + e.what());
	}
}

// Shortest text that round-trips the double exactly.
inline std::string fmt(double v)
{
	char buf[32];
	for (int prec = 6; prec <= 17; ++prec) {
		std::snprintf(buf, sizeof buf, "%.*g", prec, v);
		if (std::strtod(buf, nullptr) == v)
			break;
	}
	return buf;
}

} // namespace detail

// ---- enums ---------------------------------------------------------------

inline PulseRole pulse_role_from(const std::string &s)
{
	if (s == "set") return PulseRole::Set;
	if (s == "reset") return PulseRole::Reset;
	if (s == "read") return PulseRole::Read;
	throw Error(Errc::ConfigParse, "unknown pulse role \"" + s + "\"");
}

inline InitVariant init_variant_from(const std::string &s)
{
	if (s == "uniform_partial_reset") return InitVariant::UniformPartialReset;
	if (s == "tuned_full_reset") return InitVariant::TunedFullReset;
	throw Error(Errc::ConfigParse, "unknown init variant \"" + s + "\"");
}

inline const char *to_string(ThresholdGating g) { return g == ThresholdGating::All ? "all" : "stimulus"; }
inline const char *to_string(ThresholdRule r) { return r == ThresholdRule::Shared ? "shared" : "per_neuron"; }

inline ThresholdGating threshold_gating_from(const std::string &s)
{
	if (s == "stimulus") return ThresholdGating::Stimulus;
	if (s == "all") return ThresholdGating::All;
	throw Error(Errc::ConfigParse, "unknown threshold_gating \"" + s + "\"");
}

inline ThresholdRule threshold_rule_from(const std::string &s)
{
	if (s == "per_neuron") return ThresholdRule::PerNeuron;
	if (s == "shared") return ThresholdRule::Shared;
	throw Error(Errc::ConfigParse, "unknown threshold_rule \"" + s + "\"");
}

// ---- config types --------------------------------------------------------

inline json to_json(const DeviceParams &d)
{
	return {{"r_min", d.r_min},
	        {"r_max", d.r_max},
	        {"r_reset_full_median", d.r_reset_full_median},
	        {"r_reset_partial_median", d.r_reset_partial_median},
	        {"alpha_set", d.alpha_set},
	        {"sigma_c2c", d.sigma_c2c},
	        {"v_set_threshold", d.v_set_threshold},
	        {"v_reset_threshold", d.v_reset_threshold}};
}

inline DeviceParams device_from_json(const json &j, DeviceParams d = {})
{
	const std::string w = "device";
	detail::reject_unknown_keys(j, {"r_min", "r_max", "r_reset_full_median", "r_reset_partial_median", "alpha_set",
	                                "sigma_c2c", "v_set_threshold", "v_reset_threshold"}, w);
	detail::read_opt(j, "r_min", d.r_min, w);
	detail::read_opt(j, "r_max", d.r_max, w);
	detail::read_opt(j, "r_reset_full_median", d.r_reset_full_median, w);
	detail::read_opt(j, "r_reset_partial_median", d.r_reset_partial_median, w);
	detail::read_opt(j, "alpha_set", d.alpha_set, w);
	detail::read_opt(j, "sigma_c2c", d.sigma_c2c, w);
	detail::read_opt(j, "v_set_threshold", d.v_set_threshold, w);
	detail::read_opt(j, "v_reset_threshold", d.v_reset_threshold, w);
	return d;
}

inline json to_json(const PulseSpec &p)
{
	return {{"amplitude", p.amplitude},
	        {"t_rise", p.t_rise},
	        {"t_width", p.t_width},
	        {"t_fall", p.t_fall},
	        {"role", to_string(p.role)}};
}

inline PulseSpec pulse_from_json(const json &j, PulseSpec p, const std::string &w)
{
	detail::reject_unknown_keys(j, {"amplitude", "t_rise", "t_width", "t_fall", "role"}, w);
	detail::read_opt(j, "amplitude", p.amplitude, w);
	detail::read_opt(j, "t_rise", p.t_rise, w);
	detail::read_opt(j, "t_width", p.t_width, w);
	detail::read_opt(j, "t_fall", p.t_fall, w);
	if (j.contains("role")) {
		std::string role;
		detail::read_opt(j, "role", role, w);
		p.role = pulse_role_from(role);
	}
	return p;
}

inline json to_json(const ProtocolParams &pp)
{
	return {{"v_read", pp.v_read},
	        {"read_pulse", to_json(pp.read_pulse)},
	        {"program_pulse", to_json(pp.program_pulse)},
	        {"threshold_factor", pp.threshold_factor},
	        {"include_diagonal", pp.include_diagonal},
	        {"pulses_per_coactivation", pp.pulses_per_coactivation},
	        {"threshold_gating", to_string(pp.threshold_gating)},
	        {"threshold_rule", to_string(pp.threshold_rule)}};
}

inline ProtocolParams protocol_from_json(const json &j, ProtocolParams pp = {})
{
	const std::string w = "protocol";
	detail::reject_unknown_keys(j, {"v_read", "read_pulse", "program_pulse", "threshold_factor", "include_diagonal",
	                                "pulses_per_coactivation", "threshold_gating", "threshold_rule"}, w);
	detail::read_opt(j, "v_read", pp.v_read, w);
	if (j.contains("read_pulse"))
		pp.read_pulse = pulse_from_json(j["read_pulse"], pp.read_pulse, w + ".read_pulse");
	if (j.contains("program_pulse"))
		pp.program_pulse = pulse_from_json(j["program_pulse"], pp.program_pulse, w + ".program_pulse");
	detail::read_opt(j, "threshold_factor", pp.threshold_factor, w);
	detail::read_opt(j, "include_diagonal", pp.include_diagonal, w);
	detail::read_opt(j, "pulses_per_coactivation", pp.pulses_per_coactivation, w);
	std::string s;
	if (j.contains("threshold_gating")) {
		detail::read_opt(j, "threshold_gating", s, w);
		pp.threshold_gating = threshold_gating_from(s);
	}
	if (j.contains("threshold_rule")) {
		detail::read_opt(j, "threshold_rule", s, w);
		pp.threshold_rule = threshold_rule_from(s);
	}
	return pp;
}

inline json to_json(const InitScheme &s)
{
	return {{"variant", to_string(s.variant)},
	        {"cv", s.cv},
	        {"median", s.median},
	        {"reset_pulse", to_json(s.reset_pulse)}};
}

inline InitScheme init_from_json(const json &j, InitScheme s = {})
{
	const std::string w = "init";
	detail::reject_unknown_keys(j, {"variant", "cv", "median", "reset_pulse"}, w);
	if (j.contains("variant")) {
		std::string v;
		detail::read_opt(j, "variant", v, w);
		s.variant = init_variant_from(v);
	}
	detail::read_opt(j, "cv", s.cv, w);
	detail::read_opt(j, "median", s.median, w);
	if (j.contains("reset_pulse"))
		s.reset_pulse = pulse_from_json(j["reset_pulse"], s.reset_pulse, w + ".reset_pulse");
	return s;
}

inline json to_json(const Pattern &p)
{
	json a = json::array();
	for (bool b : p.bits)
		a.push_back(b ? 1 : 0);
	return a;
}

inline Pattern pattern_from_json(const json &j, const std::string &w)
{
	if (!j.is_array())
		throw Error(Errc::ConfigParse, w + ": pattern must be an array of 0/1");
	Pattern p;
	for (const auto &v : j) {
		if (v.is_boolean())
			p.bits.push_back(v.get<bool>());
		else if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1))
			p.bits.push_back(v.get<int>() == 1);
		else
			throw Error(Errc::ConfigParse, w + ": pattern entries must be 0, 1, true or false");
	}
	return p;
}

inline json to_json(const ExperimentConfig &c)
{
	json pats = json::array();
	for (const auto &p : c.patterns)
		pats.push_back(to_json(p));
	return {{"n", c.n},
	        {"device", to_json(c.device)},
	        {"protocol", to_json(c.protocol)},
	        {"init", to_json(c.init)},
	        {"patterns", pats},
	        {"recall_stimulus", to_json(c.recall_stimulus)},
	        {"recall_target", to_json(c.recall_target)},
	        {"max_epochs", c.max_epochs},
	        {"seed", c.seed},
	        {"snapshot_every", c.snapshot_every}};
}

// Sweep settings ride along in the same file as the experiment.
struct SweepSettings {
	std::vector<double> cvs;
	std::size_t seeds_per_cv = 200;
};

struct ConfigFile {
	ExperimentConfig experiment;
	SweepSettings sweep;
};

inline ConfigFile config_from_json(const json &j)
{
	const std::string w = "config";
	detail::reject_unknown_keys(j, {"n", "device", "protocol", "init", "patterns", "recall_stimulus", "recall_target",
	                                "max_epochs", "seed", "snapshot_every", "cvs", "seeds_per_cv"}, w);
	ConfigFile f;
	auto &c = f.experiment;
	detail::read_opt(j, "n", c.n, w);
	if (j.contains("device"))
		c.device = device_from_json(j["device"]);
	if (j.contains("protocol"))
		c.protocol = protocol_from_json(j["protocol"]);
	if (j.contains("init"))
		c.init = init_from_json(j["init"]);
	if (j.contains("patterns")) {
		if (!j["patterns"].is_array())
			throw Error(Errc::ConfigParse, "config.patterns must be an array");
		c.patterns.clear();
		for (std::size_t k = 0; k < j["patterns"].size(); ++k)
			c.patterns.push_back(pattern_from_json(j["patterns"][k], "config.patterns[" + std::to_string(k) + "]"));
	}
	if (j.contains("recall_stimulus"))
		c.recall_stimulus = pattern_from_json(j["recall_stimulus"], "config.recall_stimulus");
	if (j.contains("recall_target"))
		c.recall_target = pattern_from_json(j["recall_target"], "config.recall_target");
	detail::read_opt(j, "max_epochs", c.max_epochs, w);
	detail::read_opt(j, "seed", c.seed, w);
	detail::read_opt(j, "snapshot_every", c.snapshot_every, w);
	detail::read_opt(j, "cvs", f.sweep.cvs, w);
	detail::read_opt(j, "seeds_per_cv", f.sweep.seeds_per_cv, w);
	return f;
}

inline std::string read_text_file(const std::filesystem::path &path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw Error(Errc::Io, "cannot open " + path.string());
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

inline ConfigFile load_config(const std::filesystem::path &path)
{
	const auto text = read_text_file(path);
	json j;
	try {
		j = json::parse(text);
	} catch (const json::parse_error &e) {
		throw Error(Errc::ConfigParse, path.string() + ": " + e.what());
	}
	auto f = config_from_json(j);
	try {
		f.experiment.validate();
	} catch (const Error &e) {
		throw Error(Errc::ConfigParse, path.string() + ": " + e.what());
	}
	return f;
}

// ---- report types --------------------------------------------------------

inline json to_json(const ArrayStats &s)
{
	return {{"mean_ohm", s.mean}, {"std_ohm", s.std},       {"cv", s.cv},
	        {"min_ohm", s.min},   {"max_ohm", s.max},       {"median_ohm", s.median}};
}

inline json stats_record(std::size_t epoch, const ArrayStats &s)
{
	json j = to_json(s);
	j["epoch"] = epoch;
	return j;
}

inline json to_json(const EpochTrace &t)
{
	return {{"epoch", t.epoch},
	        {"pattern", t.pattern},
	        {"firing_set", t.firing_set},
	        {"currents_A", t.currents},
	        {"program_energy_J", t.program_energy},
	        {"read_energy_J", t.read_energy}};
}

inline json to_json(const ProbeRecord &p)
{
	return {{"epoch", p.epoch},
	        {"final_set", p.final_set},
	        {"steps", p.steps},
	        {"converged", p.converged},
	        {"success", p.success},
	        {"read_energy_J", p.read_energy},
	        {"currents_A", p.currents}};
}

inline json to_json(const RunReport &r)
{
	json probes = json::array();
	for (const auto &p : r.probes)
		probes.push_back(to_json(p));
	json stats = json::array();
	for (const auto &s : r.snapshots) {
		const CrossbarArray a(s.resistances, r.device);
		stats.push_back(stats_record(s.epoch, array_stats(a)));
	}
	return {{"epochs_to_recall", r.epochs_to_recall ? json(*r.epochs_to_recall) : json("NotReached")},
	        {"total_energy_J", r.total_energy},
	        {"energy_breakdown",
	         {{"program_J", r.energy_breakdown.program},
	          {"train_read_J", r.energy_breakdown.train_read},
	          {"probe_read_J", r.energy_breakdown.probe_read}}},
	        {"initial_cv", r.initial_stats.cv},
	        {"initial_stats", to_json(r.initial_stats)},
	        {"final_stats", to_json(r.final_stats)},
	        {"thresholds_A", r.thresholds},
	        {"probes", probes},
	        {"contrast_history", r.contrast_history},
	        {"snapshot_stats", stats}};
}

// ---- CSV -----------------------------------------------------------------

inline std::string matrix_csv(const Matrix &m)
{
	std::string out;
	for (std::size_t i = 0; i < m.rows; ++i) {
		for (std::size_t j = 0; j < m.cols; ++j) {
			if (j)
				out += ',';
			out += detail::fmt(m(i, j));
		}
		out += '\n';
	}
	return out;
}

inline Matrix matrix_from_csv(const std::string &text, const std::string &where = "csv")
{
	std::vector<std::vector<double>> rows;
	std::istringstream in(text);
	std::string line;
	while (std::getline(in, line)) {
		if (!line.empty() && line.back() == '\r')
			line.pop_back();
		if (line.empty())
			continue;
		std::vector<double> row;
		std::istringstream ls(line);
		std::string cell;
		while (std::getline(ls, cell, ',')) {
			char *end = nullptr;
			const double v = std::strtod(cell.c_str(), &end);
			if (end == cell.c_str())
				throw Error(Errc::ConfigParse, where + ": non-numeric cell \"" + cell + "\"");
			row.push_back(v);
		}
		rows.push_back(std::move(row));
	}
	if (rows.empty())
		throw Error(Errc::ConfigParse, where + ": empty matrix");
	Matrix m(rows.size(), rows.front().size());
	for (std::size_t i = 0; i < rows.size(); ++i) {
		if (rows[i].size() != m.cols)
			throw Error(Errc::ConfigParse, where + ": ragged row " + std::to_string(i));
		for (std::size_t j = 0; j < m.cols; ++j)
			m(i, j) = rows[i][j];
	}
	return m;
}

inline std::string sweep_csv(const std::vector<SweepRow> &rows)
{
	std::string out = "cv,median_epochs,mean_energy_J,success_rate\n";
	for (const auto &r : rows)
		out += detail::fmt(r.cv) + ',' + detail::fmt(r.median_epochs) + ',' + detail::fmt(r.mean_energy) + ',' +
		       detail::fmt(r.success_rate) + '\n';
	return out;
}

inline std::string histogram_csv(const std::vector<DistributionSnapshot> &history)
{
	std::string out = "epoch,bin_low_ohm,bin_high_ohm,count\n";
	for (const auto &h : history)
		for (std::size_t k = 0; k < h.histogram.counts.size(); ++k)
			out += std::to_string(h.epoch) + ',' + detail::fmt(h.histogram.edges[k]) + ',' +
			       detail::fmt(h.histogram.edges[k + 1]) + ',' + std::to_string(h.histogram.counts[k]) + '\n';
	return out;
}

inline void write_text_file(const std::filesystem::path &path, const std::string &text)
{
	std::error_code ec;
	if (path.has_parent_path())
		std::filesystem::create_directories(path.parent_path(), ec);
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw Error(Errc::Io, "cannot write " + path.string());
	out << text;
	if (!out)
		throw Error(Errc::Io, "write failed for " + path.string());
}

} // namespace pcmsim
