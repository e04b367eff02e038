#include <dropstyle/errors.hpp>
#include <dropstyle/schedule.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace dropstyle
{
	std::string to_string(ScheduleStrategy s)
	{
		switch (s)
		{
		case ScheduleStrategy::linear_temporal: return "linear-temporal";
		case ScheduleStrategy::quadratic_temporal: return "quadratic-temporal";
		case ScheduleStrategy::geometry: return "geometry";
		case ScheduleStrategy::stress: return "stress";
		}
		return "?";
	}

	ScheduleStrategy parse_schedule_strategy(const std::string &name)
	{
		std::string n = name;
		std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return c == '_' ? '-' : std::tolower(c); });
		if (n == "linear-temporal" || n == "linear")
			return ScheduleStrategy::linear_temporal;
		if (n == "quadratic-temporal" || n == "quadratic")
			return ScheduleStrategy::quadratic_temporal;
		if (n == "geometry")
			return ScheduleStrategy::geometry;
		if (n == "stress")
			return ScheduleStrategy::stress;
		throw ConfigError("unknown schedule strategy '" + name + "'");
	}

	bool is_temporal(ScheduleStrategy s)
	{
		return s == ScheduleStrategy::linear_temporal || s == ScheduleStrategy::quadratic_temporal;
	}

	void ScheduleConfig::validate() const
	{
		if (sim_budget < 1)
			throw DomainError("sim budget must be >= 1");
		if (!(geometry_fraction > 0.0 && geometry_fraction <= 1.0))
			throw DomainError("geometry fraction must lie in (0, 1]");
		if (!(stress_floor > 0.0 && stress_floor < 1.0))
			throw DomainError("stress floor must lie in (0, 1)");
	}

	std::vector<int> temporal_schedule(int iterations, int sims, TemporalShape shape)
	{
		if (sims < 1 || sims > iterations)
			throw DomainError("temporal schedule needs 1 <= J <= N (got J=" + std::to_string(sims) + ", N=" + std::to_string(iterations) + ")");
		std::vector<int> out;
		out.reserve(static_cast<std::size_t>(sims));
		const double n = iterations, j_max = sims;
		for (int j = 1; j <= sims; ++j)
		{
			const double f = j / j_max;
			int idx;
			if (shape == TemporalShape::linear)
				idx = static_cast<int>(std::lround(f * n));
			else
				idx = std::max(1, static_cast<int>(std::lround(n * f * f)));
			idx = std::clamp(idx, 1, iterations);
			if (out.empty() || idx > out.back())
				out.push_back(idx);
		}
		return out;
	}

	bool geometry_trigger(const ScheduleState &state, const ThicknessField &thickness, double fraction)
	{
		if (state.delta.size() != thickness.size())
			throw LengthMismatch("displacement tracker has " + std::to_string(state.delta.size()) + " entries, thickness " + std::to_string(thickness.size()));
		for (std::size_t v = 0; v < thickness.size(); ++v)
			if (state.delta[v] >= fraction * thickness[v])
				return true;
		return false;
	}

	std::vector<double> stress_thresholds(const ThicknessField &thickness, const NormalizedStress &sn, double fraction, double floor)
	{
		if (thickness.size() != sn.size())
			throw LengthMismatch("thickness has " + std::to_string(thickness.size()) + " entries, stress " + std::to_string(sn.size()));
		if (!(floor > 0.0))
			throw DomainError("stress floor must be > 0");
		std::vector<double> t(thickness.size());
		for (std::size_t v = 0; v < t.size(); ++v)
			t[v] = fraction * thickness[v] * std::max(floor, 1.0 - std::min(sn[v], 1.0));
		return t;
	}

	bool stress_trigger(const ScheduleState &state)
	{
		if (!state.thresholds)
			throw ThresholdsUninitialized("stress thresholds were never computed");
		const auto &t = *state.thresholds;
		if (t.size() != state.delta.size())
			throw LengthMismatch("thresholds and displacement tracker differ in length");
		for (std::size_t v = 0; v < t.size(); ++v)
			if (state.delta[v] >= t[v])
				return true;
		return false;
	}
} // namespace dropstyle
