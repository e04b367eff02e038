#pragma once

#include <dropstyle/pipeline.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dropstyle
{
	struct NamedMesh
	{
		std::string name;
		SurfaceMesh mesh;
	};

	struct BatchGrid
	{
		std::vector<std::uint64_t> seeds;
		std::vector<ControlStrategy> controls = {ControlStrategy::none, ControlStrategy::linear, ControlStrategy::exponential, ControlStrategy::frozen};
		std::vector<ScheduleStrategy> schedules = {ScheduleStrategy::linear_temporal, ScheduleStrategy::quadratic_temporal, ScheduleStrategy::geometry, ScheduleStrategy::stress};
		int concurrent_cells = 1;
	};

	struct BatchCell
	{
		std::string mesh;
		std::uint64_t seed = 0;
		ControlStrategy control = ControlStrategy::none;
		ScheduleStrategy schedule = ScheduleStrategy::stress;
		std::optional<RunReport> report; ///< empty when the run failed
		std::string error;
	};

	struct AggregateRow
	{
		ControlStrategy control = ControlStrategy::none;
		ScheduleStrategy schedule = ScheduleStrategy::stress;
		int runs = 0;
		int failures = 0;
		double viability_pct = 0.0; ///< failed runs count as not viable
		double mean_sim_count = 0.0;
		double mean_wall_time = 0.0;
		double mean_style_attainment = 0.0;
		double mean_max_stress = 0.0;
	};

	/// Runs every (mesh, seed, control, schedule) cell. Cells are independent;
	/// a failing cell is recorded and the batch carries on.
	std::vector<BatchCell> batch_evaluate(const std::vector<NamedMesh> &meshes, const BatchGrid &grid, const PipelineConfig &base);

	/// One row per (control, schedule), in grid order.
	std::vector<AggregateRow> aggregate(const std::vector<BatchCell> &cells, const BatchGrid &grid);

	void write_aggregate_csv(const std::vector<AggregateRow> &rows, std::ostream &out);
	void write_cells_csv(const std::vector<BatchCell> &cells, std::ostream &out);
} // namespace dropstyle
