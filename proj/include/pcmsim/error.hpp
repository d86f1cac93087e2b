#pragma once

#include <stdexcept>
#include <string>

namespace pcmsim {

enum class Errc {
	AmplitudeBelowThreshold,
	InvalidPulse,
	InvalidParams,
	InvalidDimension,
	IndexOutOfRange,
	DimensionMismatch,
	EmptyStimulus,
	DegeneratePattern,
	NoSnapshots,
	ConfigParse,
	Io,
};

inline const char *to_string(Errc code)
{
	switch (code) {
	case Errc::AmplitudeBelowThreshold: return "AmplitudeBelowThreshold";
	case Errc::InvalidPulse: return "InvalidPulse";
	case Errc::InvalidParams: return "InvalidParams";
	case Errc::InvalidDimension: return "InvalidDimension";
	case Errc::IndexOutOfRange: return "IndexOutOfRange";
	case Errc::DimensionMismatch: return "DimensionMismatch";
	case Errc::EmptyStimulus: return "EmptyStimulus";
	case Errc::DegeneratePattern: return "DegeneratePattern";
	case Errc::NoSnapshots: return "NoSnapshots";
	case Errc::ConfigParse: return "ConfigParse";
	case Errc::Io: return "Io";
	}
	return "Unknown";
}

// All simulator failures are reported through this exception. The code is
// what callers branch on; the message is for humans.
class Error : public std::runtime_error {
public:
	Error(Errc code, const std::string &what)
	: std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
	{}

	Errc code() const noexcept { return code_; }

private:
	Errc code_;
};

} // namespace pcmsim
