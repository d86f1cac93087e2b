// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "pcmsim/cli.hpp"

using namespace pcmsim;
namespace fs = std::filesystem;

namespace {

const fs::path config_dir = PCMSIM_CONFIG_DIR;

struct Outcome {
	bool pass = true;
	std::string detail;

	void check(bool ok, const std::string &what)
	{
		if (!ok) {
			pass = false;
			detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
		}
	}
	void note(const std::string &what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v)
{
	char buf[48];
	std::snprintf(buf, sizeof buf, "%.4g", v);
	return buf;
}

ExperimentConfig paper_config() { return load_config(config_dir / "paper10x10.json").experiment; }

const std::vector<double> sweep_cvs{0.05, 0.09, 0.30, 0.60};
constexpr std::size_t seeds_per_cv = 200;

// Criteria 1 and 3 share one sweep.
struct SweepData {
	std::vector<std::vector<RunSummary>> runs;
	std::vector<SweepRow> rows;
	double seconds = 0.0;
};

const SweepData &sweep_data()
{
	static const SweepData data = [] {
		SweepData d;
		const auto base = paper_config();
		const auto t0 = std::chrono::steady_clock::now();
		d.runs = sweep_runs(base, sweep_cvs, seeds_per_cv);
		for (std::size_t c = 0; c < sweep_cvs.size(); ++c)
			d.rows.push_back(summarize(sweep_cvs[c], d.runs[c], base.max_epochs));
		d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
		return d;
	}();
	return data;
}

Outcome epochs_vs_variation()
{
	Outcome o;
	const auto &d = sweep_data();
	const double lo = d.rows[1].median_epochs, hi = d.rows[3].median_epochs;
	std::string medians;
	for (const auto &r : d.rows)
		medians += (medians.empty() ? "" : ", ") + num(r.cv) + ":" + num(r.median_epochs);
	o.note("median epochs {" + medians + "}");
	o.check(lo <= 2.0, "median(cv=0.09) <= 2");
	o.check(hi >= 4.0 * lo, "median(cv=0.60) >= 4 x median(cv=0.09)");
	for (std::size_t k = 1; k < d.rows.size(); ++k)
		o.check(d.rows[k].median_epochs >= d.rows[k - 1].median_epochs, "monotone medians at cv=" + num(d.rows[k].cv));
	o.note("runtime " + num(d.seconds) + " s");
	o.check(d.seconds < 60.0, "runtime < 60 s");
	return o;
}

Outcome recall_chain()
{
	Outcome o;
	auto c = paper_config();
	c.device.sigma_c2c = 0.0;
	c.device.alpha_set = 0.6;
	c.init.cv = 0.0;
	c.protocol.threshold_factor = 2.0;
	const auto r = learn_and_recall(c);

	const CrossbarArray baseline(r.baseline, c.device);
	const double initial = read_bitline(baseline, 5, {0, 1, 2, 3}, c.protocol.effective_read_pulse()).current;
	const double threshold = r.thresholds[5];
	const double trained = r.probes.empty() ? 0.0 : r.probes[0].currents[5];
	auto rel = [](double got, double want) { return std::abs(got - want) / want; };

	o.check(r.epochs_to_recall && *r.epochs_to_recall == 1, "epochs_to_recall == 1");
	o.check(!r.probes.empty() && r.probes[0].final_set == IndexSet{0, 1, 2, 3, 5}, "final set == {1,2,3,4,6}");
	o.check(rel(initial, 400e-9) <= 1e-9, "initial current 400 nA");
	o.check(rel(threshold, 800e-9) <= 1e-9, "threshold 800 nA");
	o.check(rel(trained, 4 * 0.1 / 406e3) <= 1e-9, "post-training current 985.2 nA");
	o.note("currents " + num(initial * 1e9) + " -> " + num(threshold * 1e9) + " -> " + num(trained * 1e9) + " nA");
	return o;
}

Outcome energy_ordering()
{
	Outcome o;
	const auto &d = sweep_data();
	const double lo = d.rows[1].mean_energy, hi = d.rows[3].mean_energy;
	o.note("mean energy cv=0.09 " + num(lo) + " J, cv=0.60 " + num(hi) + " J, ratio " + num(hi / lo));
	o.check(hi >= 3.0 * lo, "mean_energy(0.60) >= 3 x mean_energy(0.09)");
	return o;
}

Outcome no_spurious_recall()
{
	Outcome o;
	const auto base = paper_config();
	const auto target = base.recall_target.on_set();
	std::size_t succeeded = 0, spurious = 0, untrained_bad = 0;

	for (std::size_t c = 0; c < sweep_cvs.size(); ++c) {
		for (std::size_t s = 0; s < seeds_per_cv; ++s) {
			const auto cfg = sweep_job_config(base, c, sweep_cvs[c], s);

			Rng rng(cfg.seed);
			const auto untrained = init_array(cfg.n, cfg.init, cfg.device, rng);
			const auto th = compute_thresholds(untrained, cfg.recall_stimulus, cfg.protocol);
			if (recall_probe(untrained, cfg.recall_stimulus, th, cfg.protocol, cfg.n).final_set !=
			    cfg.recall_stimulus.on_set())
				++untrained_bad;

			if (sweep_cvs[c] != 0.09)
				continue;
			const auto r = learn_and_recall(cfg);
			if (!r.epochs_to_recall)
				continue;
			++succeeded;
			for (const auto &p : r.probes)
				for (auto i : p.final_set)
					if (std::find(target.begin(), target.end(), i) == target.end()) {
						++spurious;
						break;
					}
		}
	}
	o.note(std::to_string(succeeded) + " successful cv=0.09 runs, " + std::to_string(spurious) +
	       " with spurious firing; " + std::to_string(untrained_bad) + " untrained probes off-stimulus");
	o.check(succeeded > 0, "some cv=0.09 run succeeds");
	o.check(spurious == 0, "no spurious neuron in cv=0.09 probes");
	o.check(untrained_bad == 0, "untrained probe returns the stimulus");
	return o;
}

Outcome locality_and_purity()
{
	Outcome o;
	constexpr int cases = 10000;
	Rng rng(20240601);
	std::uniform_int_distribution<std::size_t> dim(2, 16);
	std::uniform_real_distribution<double> u(0.0, 1.0);
	int addressing = 0, purity = 0, bounds = 0, oracle_mismatch = 0;

	for (int k = 0; k < cases; ++k) {
		const std::size_t n = dim(rng);
		DeviceParams p;
		p.sigma_c2c = 0.3 * u(rng);
		InitScheme scheme{u(rng) < 0.5 ? InitVariant::UniformPartialReset : InitVariant::TunedFullReset, 1.5 * u(rng),
		                  std::exp(std::log(20e3) + std::log(400.0) * u(rng))};
		auto array = init_array(n, scheme, p, rng);

		IndexSet driven, gated;
		std::vector<int> mask(n, 0);
		for (std::size_t i = 0; i < n; ++i) {
			if (u(rng) < 0.4)
				driven.push_back(i);
			if (u(rng) < 0.4) {
				gated.push_back(i);
				mask[i] = 1;
			}
		}

		const ProtocolParams pp;
		const auto before = array;
		const auto bl = static_cast<std::size_t>(u(rng) * static_cast<double>(n)) % n;
		const auto read = read_bitline(array, bl, gated, pp.effective_read_pulse());
		std::vector<double> row(n);
		for (std::size_t j = 0; j < n; ++j)
			row[j] = array.at(bl, j).resistance;
		const double want = oracle::masked_bitline_current(row, mask, pp.v_read);
		if (want == 0.0 ? read.current != 0.0 : std::abs(read.current - want) > 1e-12 * want)
			++oracle_mismatch;

		Pattern stim(std::vector<bool>(n, false));
		stim.bits[bl] = true;
		const auto th = compute_thresholds(array, stim, pp);
		(void)recall_probe(array, stim, th, pp, n);
		if (!(array == before))
			++purity;

		const auto prog = program_cells(array, driven, gated, pp.program_pulse, rng);
		for (std::size_t i = 0; i < n; ++i) {
			for (std::size_t j = 0; j < n; ++j) {
				const bool in = std::count(driven.begin(), driven.end(), i) && mask[j];
				const auto &a = prog.array.at(i, j), &b = array.at(i, j);
				if (in != (a.pulse_count_set == b.pulse_count_set + 1) || (!in && !(a == b)))
					++addressing;
				if (a.resistance < p.r_min || a.resistance > p.r_max)
					++bounds;
			}
		}
		if (prog.programmed_count != driven.size() * gated.size())
			++addressing;
	}
	o.note(std::to_string(cases) + " cases");
	o.check(addressing == 0, "program_cells addresses exactly driven x gated (" + std::to_string(addressing) + ")");
	o.check(purity == 0, "reads and probes are bit-pure (" + std::to_string(purity) + ")");
	o.check(bounds == 0, "resistances within [r_min, r_max] (" + std::to_string(bounds) + ")");
	o.check(oracle_mismatch == 0, "bitline current matches masked-sum oracle (" + std::to_string(oracle_mismatch) + ")");
	return o;
}

Outcome device_law()
{
	Outcome o;
	DeviceParams p;
	p.sigma_c2c = 0.0;
	Rng rng(1);
	PcmCell cell{1e6, 0};
	double worst = 0.0;
	for (int k = 1; k <= 50; ++k) {
		cell = apply_set_pulse(cell, default_set_pulse(), p, rng).cell;
		const double want = oracle::set_trajectory(1e6, p.r_min, p.alpha_set, k);
		worst = std::max(worst, std::abs(cell.resistance - want) / want);
	}
	o.note("SET trajectory max rel err " + num(worst));
	o.check(worst <= 1e-12, "geometric SET trajectory within 1e-12");

	std::uniform_real_distribution<double> amp(0.01, 2.0), t(0.0, 2e-6), logr(std::log(1e4), std::log(1e7));
	double eworst = 0.0;
	for (int k = 0; k < 2000; ++k) {
		const double a = amp(rng), tr = t(rng), tw = t(rng), tf = t(rng), r = std::exp(logr(rng));
		const double got = pulse_energy({a, tr, tw, tf, PulseRole::Set}, r);
		const double want = oracle::pulse_energy_quadrature(a, tr, tw, tf, r);
		eworst = std::max(eworst, std::abs(got - want) / want);
	}
	o.note("pulse energy max rel err " + num(eworst));
	o.check(eworst <= 1e-9, "pulse_energy matches quadrature within 1e-9");

	for (double target : {0.09, 0.60}) {
		double sum = 0.0;
		for (std::uint64_t s = 0; s < 500; ++s) {
			Rng r(derive_seed(99, {s}));
			const auto a = init_array(10, InitScheme{InitVariant::UniformPartialReset, target, 1e6}, DeviceParams{}, r);
			sum += oracle::population_moments(a.resistances().data).cv;
		}
		const double mean = sum / 500.0;
		o.note("init cv " + num(target) + " -> ensemble " + num(mean));
		o.check(std::abs(mean - target) <= 0.10 * target, "lognormal init CV within 10% at cv=" + num(target));
	}
	return o;
}

std::vector<std::pair<fs::path, std::string>> snapshot_dir(const fs::path &dir)
{
	std::vector<std::pair<fs::path, std::string>> files;
	for (const auto &e : fs::recursive_directory_iterator(dir))
		if (e.is_regular_file())
			files.emplace_back(fs::relative(e.path(), dir), read_text_file(e.path()));
	std::sort(files.begin(), files.end());
	return files;
}

Outcome reproducibility()
{
	Outcome o;
	const fs::path root = fs::temp_directory_path() / ("pcmsim_acceptance_" + std::to_string(::getpid()));
	fs::remove_all(root);
	std::size_t compared = 0;
	for (const auto &entry : fs::directory_iterator(config_dir)) {
		if (entry.path().extension() != ".json")
			continue;
		const bool is_sweep = load_config(entry.path()).sweep.cvs.size() > 0;
		std::vector<std::vector<std::pair<fs::path, std::string>>> outs;
		for (int rep = 0; rep < 2; ++rep) {
			const auto dir = root / entry.path().stem() / std::to_string(rep);
			std::vector<std::string> args{"sim", is_sweep ? "sweep" : "learn", "--config", entry.path().string(),
			                              "--out-dir", dir.string(), "--quiet"};
			std::vector<const char *> argv;
			for (auto &a : args)
				argv.push_back(a.c_str());
			std::ostringstream out, err;
			const int rc = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
			o.check(rc == 0, entry.path().filename().string() + " exit " + std::to_string(rc) + " " + err.str());
			outs.push_back(snapshot_dir(dir));
		}
		o.check(!outs[0].empty() && outs[0] == outs[1], entry.path().filename().string() + " byte-identical");
		compared += outs[0].size();
	}
	fs::remove_all(root);
	o.note(std::to_string(compared) + " files compared");
	return o;
}

} // namespace

int main()
{
	const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
	    {"AC1 epochs-vs-variation ordering", epochs_vs_variation},
	    {"AC2 deterministic recall chain", recall_chain},
	    {"AC3 energy ordering", energy_ordering},
	    {"AC4 no spurious recall", no_spurious_recall},
	    {"AC5 Hebbian locality and purity", locality_and_purity},
	    {"AC6 device-law oracle", device_law},
	    {"AC7 reproducibility", reproducibility},
	};

	int failed = 0;
	for (const auto &[name, fn] : criteria) {
		Outcome o;
		try {
			o = fn();
		} catch (const std::exception &e) {
			o.pass = false;
			o.detail = std::string("exception: ") + e.what();
		}
		std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
		failed += !o.pass;
	}
	std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
	return failed == 0 ? 0 : 1;
}
