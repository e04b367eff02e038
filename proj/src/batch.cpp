#include <dropstyle/batch.hpp>
#include <dropstyle/errors.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

namespace dropstyle
{
	std::vector<BatchCell> batch_evaluate(const std::vector<NamedMesh> &meshes, const BatchGrid &grid, const PipelineConfig &base)
	{
		std::vector<BatchCell> cells;
		for (const NamedMesh &m : meshes)
			for (std::uint64_t seed : grid.seeds)
				for (ControlStrategy c : grid.controls)
					for (ScheduleStrategy s : grid.schedules)
					{
						BatchCell cell;
						cell.mesh = m.name;
						cell.seed = seed;
						cell.control = c;
						cell.schedule = s;
						cells.push_back(std::move(cell));
					}
		const std::size_t per_mesh = grid.seeds.size() * grid.controls.size() * grid.schedules.size();

		std::atomic<std::size_t> next{0};
		auto worker = [&]() {
			for (std::size_t k = next++; k < cells.size(); k = next++)
			{
				BatchCell &cell = cells[k];
				PipelineConfig cfg = base;
				cfg.style.seed = cell.seed;
				cfg.control.strategy = cell.control;
				cfg.schedule.strategy = cell.schedule;
				cfg.sim.trace_path.reset();
				try
				{
					cell.report = run_pipeline(meshes[k / per_mesh].mesh, cfg).report;
				}
				catch (const std::exception &e)
				{
					cell.error = e.what();
					spdlog::warn("batch cell {} seed {} {}/{} failed: {}", cell.mesh, cell.seed,
								 to_string(cell.control), to_string(cell.schedule), cell.error);
				}
			}
		};
		const int threads = std::max(1, grid.concurrent_cells);
		std::vector<std::thread> pool;
		for (int t = 1; t < threads; ++t)
			pool.emplace_back(worker);
		worker();
		for (auto &t : pool)
			t.join();
		return cells;
	}

	std::vector<AggregateRow> aggregate(const std::vector<BatchCell> &cells, const BatchGrid &grid)
	{
		std::vector<AggregateRow> rows;
		for (ControlStrategy c : grid.controls)
			for (ScheduleStrategy s : grid.schedules)
			{
				AggregateRow row;
				row.control = c;
				row.schedule = s;
				int viable = 0, ok = 0;
				for (const BatchCell &cell : cells)
				{
					if (cell.control != c || cell.schedule != s)
						continue;
					++row.runs;
					if (!cell.report)
					{
						++row.failures;
						continue;
					}
					++ok;
					const RunReport &r = *cell.report;
					if (r.verdict == Viability::viable)
						++viable;
					row.mean_sim_count += r.sim_count;
					row.mean_wall_time += r.wall_time.total;
					row.mean_style_attainment += r.style_attainment;
					row.mean_max_stress += r.max_stress;
				}
				if (row.runs > 0)
					row.viability_pct = 100.0 * viable / row.runs;
				if (ok > 0)
				{
					row.mean_sim_count /= ok;
					row.mean_wall_time /= ok;
					row.mean_style_attainment /= ok;
					row.mean_max_stress /= ok;
				}
				rows.push_back(row);
			}
		return rows;
	}

	void write_aggregate_csv(const std::vector<AggregateRow> &rows, std::ostream &out)
	{
		out << "control,schedule,runs,failures,viability_pct,mean_sim_count,mean_wall_time_s,mean_style_attainment,mean_max_stress_pa\n";
		out.precision(10);
		for (const AggregateRow &r : rows)
			out << to_string(r.control) << ',' << to_string(r.schedule) << ',' << r.runs << ',' << r.failures << ','
				<< r.viability_pct << ',' << r.mean_sim_count << ',' << r.mean_wall_time << ','
				<< r.mean_style_attainment << ',' << r.mean_max_stress << '\n';
		if (!out)
			throw IoError("failed writing aggregate CSV");
	}

	void write_cells_csv(const std::vector<BatchCell> &cells, std::ostream &out)
	{
		out << "mesh,seed,control,schedule,verdict,max_stress_pa,sim_count,wall_time_s,style_attainment,error\n";
		out.precision(10);
		for (const BatchCell &c : cells)
		{
			out << c.mesh << ',' << c.seed << ',' << to_string(c.control) << ',' << to_string(c.schedule) << ',';
			if (c.report)
				out << to_string(c.report->verdict) << ',' << c.report->max_stress << ',' << c.report->sim_count << ','
					<< c.report->wall_time.total << ',' << c.report->style_attainment << ',';
			else
				out << "failed,,,,,";
			std::string err = c.error;
			std::replace(err.begin(), err.end(), ',', ';');
			std::replace(err.begin(), err.end(), '\n', ' ');
			out << err << '\n';
		}
		if (!out)
			throw IoError("failed writing cell CSV");
	}
} // namespace dropstyle
