#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pcmsim {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Good avalanche, so consecutive inputs give
// unrelated outputs.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

// Derive a child seed from a master seed and a path of indices, e.g.
// (master, cv index, seed index) for one sweep job. Deterministic and
// independent of evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept
{
	std::uint64_t s = splitmix64(master);
	for (auto p : path)
		s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
	return s;
}

inline double standard_normal(Rng &rng)
{
	std::normal_distribution<double> dist(0.0, 1.0);
	return dist(rng);
}

} // namespace pcmsim
