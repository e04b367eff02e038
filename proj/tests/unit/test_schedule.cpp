#include <doctest.h>

#include <dropstyle/errors.hpp>
#include <dropstyle/schedule.hpp>

#include <random>

using namespace dropstyle;

namespace
{
	ScheduleState state_with(std::vector<double> delta)
	{
		ScheduleState s;
		s.delta = std::move(delta);
		return s;
	}

	// first 1-based step at which the trigger fires on a cumulative trace, or 0
	template <typename Trigger>
	int first_fire(const std::vector<std::vector<double>> &steps, Trigger fires)
	{
		ScheduleState s = state_with(std::vector<double>(steps.front().size(), 0.0));
		for (std::size_t i = 0; i < steps.size(); ++i)
		{
			for (std::size_t v = 0; v < s.delta.size(); ++v)
				s.delta[v] += steps[i][v];
			if (fires(s))
				return static_cast<int>(i) + 1;
		}
		return 0;
	}
} // namespace

TEST_CASE("temporal schedules")
{
	CHECK(temporal_schedule(200, 10, TemporalShape::linear) == std::vector<int>{20, 40, 60, 80, 100, 120, 140, 160, 180, 200});
	CHECK(temporal_schedule(200, 10, TemporalShape::quadratic) == std::vector<int>{2, 8, 18, 32, 50, 72, 98, 128, 162, 200});
	CHECK(temporal_schedule(200, 1, TemporalShape::linear) == std::vector<int>{200});
	CHECK(temporal_schedule(200, 1, TemporalShape::quadratic) == std::vector<int>{200});
	CHECK(temporal_schedule(5, 5, TemporalShape::linear) == std::vector<int>{1, 2, 3, 4, 5});
	// crowded early indices collapse instead of repeating
	const std::vector<int> q = temporal_schedule(10, 10, TemporalShape::quadratic);
	CHECK(q.front() == 1);
	CHECK(q.back() == 10);
	for (std::size_t i = 1; i < q.size(); ++i)
		CHECK(q[i] > q[i - 1]);
	CHECK_THROWS_AS(temporal_schedule(10, 0, TemporalShape::linear), DomainError);
	CHECK_THROWS_AS(temporal_schedule(10, 11, TemporalShape::quadratic), DomainError);
}

TEST_CASE("quadratic gaps grow")
{
	const std::vector<int> q = temporal_schedule(1000, 10, TemporalShape::quadratic);
	for (std::size_t i = 2; i < q.size(); ++i)
		CHECK(q[i] - q[i - 1] > q[i - 1] - q[i - 2]);
}

TEST_CASE("geometry trigger")
{
	const ThicknessField t(3, 2.0);
	CHECK_FALSE(geometry_trigger(state_with({0.1, 0.1, 0.1}), t, 0.10));
	CHECK(geometry_trigger(state_with({0.0, 0.24, 0.0}), t, 0.10));
	CHECK(geometry_trigger(state_with({0.0, 0.10 * 2.0, 0.0}), t, 0.10));
	CHECK_THROWS_AS(geometry_trigger(state_with({0.0}), t, 0.1), LengthMismatch);
}

TEST_CASE("stress thresholds")
{
	const ThicknessField t({2.0, 2.0, 2.0, 2.0});
	const std::vector<double> th = stress_thresholds(t, NormalizedStress({0.0, 1.0, 0.5, 3.0}), 0.1, 0.05);
	CHECK(th[0] == doctest::Approx(0.2));
	CHECK(th[1] == doctest::Approx(0.1 * 2.0 * 0.05));
	CHECK(th[2] == doctest::Approx(0.1));
	CHECK(th[3] == doctest::Approx(0.1 * 2.0 * 0.05));
	CHECK_THROWS_AS(stress_thresholds(t, NormalizedStress(3, 0.0), 0.1, 0.05), LengthMismatch);
}

TEST_CASE("stress thresholds never exceed geometry thresholds")
{
	std::mt19937_64 rng(4);
	std::uniform_real_distribution<double> thick(0.1, 5.0), stress(0.0, 2.0);
	ThicknessField t(1000, 0.0);
	NormalizedStress sn(1000, 0.0);
	for (std::size_t v = 0; v < 1000; ++v)
	{
		t[v] = thick(rng);
		sn[v] = v % 10 == 0 ? 0.0 : stress(rng);
	}
	const std::vector<double> th = stress_thresholds(t, sn, 0.1, 0.05);
	for (std::size_t v = 0; v < 1000; ++v)
	{
		CHECK(th[v] > 0.0);
		if (sn[v] == 0.0)
			CHECK(th[v] == doctest::Approx(0.1 * t[v]));
		else
			CHECK(th[v] < 0.1 * t[v]);
	}
}

TEST_CASE("stress trigger")
{
	ScheduleState s = state_with({0.0, 0.0});
	CHECK_THROWS_AS(stress_trigger(s), ThresholdsUninitialized);
	s.thresholds = std::vector<double>{0.1, 0.2};
	CHECK_FALSE(stress_trigger(s));
	s.delta = {0.05, 0.2};
	CHECK(stress_trigger(s));
	s.reset_delta();
	CHECK_FALSE(stress_trigger(s));
	s.thresholds = std::vector<double>{0.1};
	CHECK_THROWS_AS(stress_trigger(s), LengthMismatch);
}

TEST_CASE("stress trigger fires no later than geometry trigger on the same trace")
{
	std::mt19937_64 rng(8);
	std::uniform_real_distribution<double> step(0.0, 0.01), thick(0.5, 2.0), stress(0.0, 1.5);
	for (int trial = 0; trial < 50; ++trial)
	{
		const std::size_t n = 200;
		ThicknessField t(n, 0.0);
		NormalizedStress sn(n, 0.0);
		for (std::size_t v = 0; v < n; ++v)
		{
			t[v] = thick(rng);
			sn[v] = stress(rng);
		}
		std::vector<std::vector<double>> steps(400, std::vector<double>(n));
		for (auto &s : steps)
			for (double &x : s)
				x = step(rng);
		const std::vector<double> th = stress_thresholds(t, sn, 0.1, 0.05);
		const int g = first_fire(steps, [&](const ScheduleState &s) { return geometry_trigger(s, t, 0.1); });
		const int st = first_fire(steps, [&](ScheduleState s) {
			s.thresholds = th;
			return stress_trigger(s);
		});
		REQUIRE(g > 0);
		REQUIRE(st > 0);
		CHECK(st <= g);
	}
}

TEST_CASE("strategy names and config")
{
	for (ScheduleStrategy s : {ScheduleStrategy::linear_temporal, ScheduleStrategy::quadratic_temporal, ScheduleStrategy::geometry, ScheduleStrategy::stress})
		CHECK(parse_schedule_strategy(to_string(s)) == s);
	CHECK(parse_schedule_strategy("linear_temporal") == ScheduleStrategy::linear_temporal);
	CHECK(parse_schedule_strategy("Quadratic") == ScheduleStrategy::quadratic_temporal);
	CHECK_THROWS_AS(parse_schedule_strategy("random"), ConfigError);
	CHECK(is_temporal(ScheduleStrategy::linear_temporal));
	CHECK_FALSE(is_temporal(ScheduleStrategy::stress));

	ScheduleConfig c;
	CHECK_NOTHROW(c.validate());
	c.sim_budget = 0;
	CHECK_THROWS_AS(c.validate(), DomainError);
	c = ScheduleConfig{};
	c.geometry_fraction = 0.0;
	CHECK_THROWS_AS(c.validate(), DomainError);
	c = ScheduleConfig{};
	c.stress_floor = 0.0;
	CHECK_THROWS_AS(c.validate(), DomainError);
}
