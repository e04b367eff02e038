#pragma once

#include <dropstyle/field.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dropstyle
{
	enum class ScheduleStrategy
	{
		linear_temporal,
		quadratic_temporal,
		geometry,
		stress
	};

	enum class TemporalShape
	{
		linear,
		quadratic
	};

	std::string to_string(ScheduleStrategy s); ///< CLI spelling, e.g. "linear-temporal"
	ScheduleStrategy parse_schedule_strategy(const std::string &name);
	bool is_temporal(ScheduleStrategy s);

	struct ScheduleConfig
	{
		ScheduleStrategy strategy = ScheduleStrategy::stress;
		int sim_budget = 10;
		double geometry_fraction = 0.10;
		double stress_floor = 0.05;

		void validate() const;
	};

	struct ScheduleState
	{
		std::vector<double> delta;                     ///< |displacement| accumulated since the last simulation
		std::optional<std::vector<double>> thresholds; ///< per-vertex trigger distances
		int last_sim = 0;

		void reset_delta() { std::fill(delta.begin(), delta.end(), 0.0); }
	};

	/// Sorted, strictly increasing iteration indices in [1, n] that end at n.
	std::vector<int> temporal_schedule(int iterations, int sims, TemporalShape shape);

	bool geometry_trigger(const ScheduleState &state, const ThicknessField &thickness, double fraction);

	std::vector<double> stress_thresholds(const ThicknessField &thickness, const NormalizedStress &sn, double fraction, double floor);

	bool stress_trigger(const ScheduleState &state);
} // namespace dropstyle
