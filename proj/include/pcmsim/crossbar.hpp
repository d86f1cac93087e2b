#pragma once

// N x N array of 1T1R PCM cells.
//
// Cell (i, j) sits on bitline i and wordline j. A wordline gates the
// selection transistors of its cells; a bitline carries the read or
// programming voltage. The selection transistor is ideal: a gated cell
// conducts as its PCM resistance, an ungated one not at all.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pcmsim/device.hpp"

namespace pcmsim {

using IndexSet = std::vector<std::size_t>;

// Dense row-major matrix of doubles, used for resistance snapshots and
// normalized weights.
struct Matrix {
	std::size_t rows = 0;
	std::size_t cols = 0;
	std::vector<double> data;

	Matrix() = default;
	Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

	double &operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
	double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

	friend bool operator==(const Matrix &, const Matrix &) = default;
};

class CrossbarArray {
public:
	CrossbarArray(std::size_t n, const DeviceParams &params, Ohms initial = 1e6)
	: n_(n), params_(params), cells_(n * n, PcmCell{params.clamp(initial), 0})
	{
		if (n < 2)
			throw Error(Errc::InvalidDimension, "array dimension must be >= 2, got " + std::to_string(n));
	}

	// Build from an explicit resistance matrix (e.g. loaded from CSV).
	CrossbarArray(const Matrix &resistances, const DeviceParams &params)
	: CrossbarArray(resistances.rows, params)
	{
		if (resistances.rows != resistances.cols)
			throw Error(Errc::DimensionMismatch, "resistance matrix must be square");
		for (std::size_t k = 0; k < cells_.size(); ++k) {
			const double r = resistances.data[k];
			if (!(r >= params.r_min && r <= params.r_max))
				throw Error(Errc::InvalidParams, "resistance " + std::to_string(r) + " outside [r_min, r_max]");
			cells_[k].resistance = r;
		}
	}

	std::size_t n() const { return n_; }
	const DeviceParams &params() const { return params_; }

	const PcmCell &at(std::size_t bl, std::size_t wl) const { return cells_[index(bl, wl)]; }
	PcmCell &at(std::size_t bl, std::size_t wl) { return cells_[index(bl, wl)]; }

	const std::vector<PcmCell> &cells() const { return cells_; }

	Matrix resistances() const
	{
		Matrix m(n_, n_);
		for (std::size_t k = 0; k < cells_.size(); ++k)
			m.data[k] = cells_[k].resistance;
		return m;
	}

	friend bool operator==(const CrossbarArray &a, const CrossbarArray &b)
	{
		return a.n_ == b.n_ && a.cells_ == b.cells_;
	}

private:
	std::size_t index(std::size_t bl, std::size_t wl) const
	{
		if (bl >= n_ || wl >= n_)
			throw Error(Errc::IndexOutOfRange, "cell (" + std::to_string(bl) + ", " + std::to_string(wl) +
			                                       ") outside " + std::to_string(n_) + "x" + std::to_string(n_));
		return bl * n_ + wl;
	}

	std::size_t n_;
	DeviceParams params_;
	std::vector<PcmCell> cells_;
};

// Sorted, deduplicated copy of `set`; throws if any index is >= n.
inline IndexSet normalize_indices(IndexSet set, std::size_t n)
{
	std::sort(set.begin(), set.end());
	set.erase(std::unique(set.begin(), set.end()), set.end());
	if (!set.empty() && set.back() >= n)
		throw Error(Errc::IndexOutOfRange, "index " + std::to_string(set.back()) + " >= " + std::to_string(n));
	return set;
}

enum class InitVariant {
	// Same RESET pulse on every cell: partial RESET, wide spread.
	UniformPartialReset,
	// Per-cell tuned amplitudes: full RESET, tight spread.
	TunedFullReset,
};

inline const char *to_string(InitVariant v)
{
	return v == InitVariant::UniformPartialReset ? "uniform_partial_reset" : "tuned_full_reset";
}

struct InitScheme {
	InitVariant variant = InitVariant::TunedFullReset;
	double cv = 0.0;
	Ohms median = 1e6;
	PulseSpec reset_pulse = default_reset_pulse();

	void validate() const
	{
		if (!(cv >= 0.0 && cv < 2.0))
			throw Error(Errc::InvalidParams, "init cv must lie in [0, 2)");
		if (!(median > 0.0))
			throw Error(Errc::InvalidParams, "init median must be positive");
	}
};

// Every cell gets one RESET toward (median, cv). Cells start from r_max so
// the RESET energy is defined; it is not part of any learning ledger.
inline CrossbarArray init_array(std::size_t n, const InitScheme &scheme, const DeviceParams &params, Rng &rng)
{
	params.validate();
	scheme.validate();
	CrossbarArray array(n, params, params.r_max);
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = 0; j < n; ++j)
			array.at(i, j) = apply_reset_pulse(array.at(i, j), scheme.reset_pulse, params, scheme.median, scheme.cv, rng).cell;
	return array;
}

struct BitlineRead {
	Amperes current = 0.0;
	Joules energy = 0.0;
};

inline BitlineRead read_bitline(const CrossbarArray &array, std::size_t bl, const IndexSet &gated_wls,
                                const PulseSpec &read_pulse)
{
	if (read_pulse.role != PulseRole::Read)
		throw Error(Errc::InvalidPulse, "read_bitline needs a READ pulse");
	read_pulse.validate(array.params());
	if (bl >= array.n())
		throw Error(Errc::IndexOutOfRange, "bitline " + std::to_string(bl) + " >= " + std::to_string(array.n()));

	BitlineRead out;
	for (auto wl : normalize_indices(gated_wls, array.n())) {
		const PcmCell &cell = array.at(bl, wl);
		out.current += read_current(cell, read_pulse.amplitude);
		out.energy += pulse_energy(read_pulse, cell.resistance);
	}
	return out;
}

struct ProgramResult {
	CrossbarArray array;
	Joules energy = 0.0;
	std::size_t programmed_count = 0;
};

// SET every cell on (driven bitline, gated wordline). With include_diagonal
// false the self-synapses (i, i) are skipped. Cells are visited row-major so
// the random stream is consumed in a fixed order.
inline ProgramResult program_cells(const CrossbarArray &array, const IndexSet &driven_bls, const IndexSet &gated_wls,
                                   const PulseSpec &pulse, Rng &rng, bool include_diagonal = true)
{
	const auto driven = normalize_indices(driven_bls, array.n());
	const auto gated = normalize_indices(gated_wls, array.n());
	if (pulse.role != PulseRole::Set)
		throw Error(Errc::InvalidPulse, "program_cells needs a SET pulse");

	ProgramResult out{array, 0.0, 0};
	for (auto i : driven) {
		for (auto j : gated) {
			if (!include_diagonal && i == j)
				continue;
			auto r = apply_set_pulse(out.array.at(i, j), pulse, array.params(), rng);
			out.array.at(i, j) = r.cell;
			out.energy += r.energy;
			++out.programmed_count;
		}
	}
	return out;
}

struct ArrayStats {
	Ohms mean = 0.0;
	Ohms std = 0.0;
	double cv = 0.0;
	Ohms min = 0.0;
	Ohms max = 0.0;
	Ohms median = 0.0;
};

inline ArrayStats stats_of(std::vector<double> values)
{
	ArrayStats s;
	if (values.empty())
		return s;
	double sum = 0.0;
	for (double v : values)
		sum += v;
	s.mean = sum / static_cast<double>(values.size());
	double ss = 0.0;
	for (double v : values)
		ss += (v - s.mean) * (v - s.mean);
	s.std = std::sqrt(ss / static_cast<double>(values.size()));
	s.cv = s.std / s.mean;

	std::sort(values.begin(), values.end());
	s.min = values.front();
	s.max = values.back();
	const std::size_t m = values.size() / 2;
	s.median = values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
	return s;
}

// Population statistics over all n^2 resistances.
inline ArrayStats array_stats(const CrossbarArray &array) { return stats_of(array.resistances().data); }

inline Matrix normalized_weights(const CrossbarArray &array, const CrossbarArray &baseline)
{
	if (array.n() != baseline.n())
		throw Error(Errc::DimensionMismatch, "array is " + std::to_string(array.n()) + "x" + std::to_string(array.n()) +
		                                         ", baseline is " + std::to_string(baseline.n()) + "x" +
		                                         std::to_string(baseline.n()));
	Matrix w(array.n(), array.n());
	for (std::size_t i = 0; i < array.n(); ++i)
		for (std::size_t j = 0; j < array.n(); ++j)
			w(i, j) = array.at(i, j).resistance / baseline.at(i, j).resistance;
	return w;
}

} // namespace pcmsim
